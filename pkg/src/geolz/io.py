"""CSV output.

Files start with a block of ``#`` comment lines holding every parameter
needed to reproduce the run, then a header row, then one row per point.
Numbers are written with 12 significant digits.
"""

from __future__ import annotations

import contextlib
import io
import math
import sys
from typing import Iterable, Mapping, Sequence, TextIO

import numpy as np

from . import __version__
from .dynamics import Trajectory
from .errors import IoError
from .experiments import DecayFit, SweepResult, TimeTrace


def format_number(x) -> str:
    """Decimal text with 12 significant digits."""
    return f"{float(x):.12g}"


def _param_text(v) -> str:
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    return str(v)


@contextlib.contextmanager
def _open_out(path):
    if path is None or path == "-":
        yield sys.stdout
        return
    if isinstance(path, io.TextIOBase):
        yield path
        return
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            yield fh
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_table(path, header: Sequence[str], rows: Iterable[Sequence[float]],
                params: Mapping[str, object] | None = None,
                notes: Sequence[str] = ()) -> None:
    """Write a comment block, a header and numeric rows.

    Parameters
    ----------
    path : str, path-like, text stream, "-" or None
        Destination; ``"-"`` and None mean standard output.
    header : sequence of str
    rows : iterable of sequences of float
    params : mapping, optional
        Written as ``# key = value`` lines in insertion order.
    notes : sequence of str
        Extra free-text comment lines.
    """
    lines = [f"# geolz {__version__}"]
    lines += [f"# {n}" for n in notes]
    lines += [f"# {k} = {_param_text(v)}" for k, v in (params or {}).items()]
    lines.append(",".join(header))
    lines += [",".join(format_number(x) for x in r) for r in rows]
    with _open_out(path) as fh:
        try:
            fh.write("\n".join(lines) + "\n")
        except OSError as exc:
            raise IoError(str(exc)) from exc


def write_csv(result, path, params: Mapping[str, object] | None = None,
              notes: Sequence[str] = ()) -> None:
    """Write a `SweepResult`, `Trajectory`, `TimeTrace` or `DecayFit` as CSV.

    ``params`` are appended after the result's own parameter record.

    Raises
    ------
    IoError
        When the destination cannot be written.
    TypeError
        For unsupported result types.
    """
    extra = dict(params or {})
    notes = list(notes)
    if isinstance(result, SweepResult):
        meta = {"method": result.method, **result.params, **extra}
        if result.p1.size:
            notes.append(f"contrast = {format_number(result.contrast)}")
        if result.second_axis_name is None:
            header = [result.axis_name, "p1"]
            rows = zip(result.axis_values, result.p1)
        else:
            header = [result.second_axis_name, result.axis_name, "p1"]
            rows = ((y, x, result.p1[i, j]) for i, y in enumerate(result.second_axis_values)
                    for j, x in enumerate(result.axis_values))
        write_table(path, header, rows, meta, notes)
    elif isinstance(result, TimeTrace):
        notes += [f"plateau_window_s = {format_number(result.window[0])},"
                  f"{format_number(result.window[1])}",
                  f"plateau_p1 = {format_number(result.plateau_p1)}",
                  f"plateau_std = {format_number(result.plateau_std)}",
                  f"p_lz_prime = {format_number(result.p_lz_prime)}"]
        rows = zip(result.trajectory.times, result.populations, result.trajectory.populations)
        write_table(path, ["t_s", "p1", "p1_bare"], rows, extra, notes)
    elif isinstance(result, Trajectory):
        write_table(path, ["t_s", "p1"], zip(result.times, result.populations),
                    {"kind": result.kind, **extra}, notes)
    elif isinstance(result, DecayFit):
        header = ["amplitude", "time_constant_s", "offset", "residual_norm",
                  "time_constant_stderr_s"]
        row = (result.amplitude, result.time_constant, result.offset, result.residual_norm,
               result.time_constant_stderr)
        write_table(path, header, [row], extra, notes)
    else:
        raise TypeError(f"cannot write {type(result).__name__} as CSV")


def read_csv(path) -> tuple[dict[str, str], list[str], np.ndarray]:
    """Read a file written by `write_csv`.

    Returns
    -------
    params : dict
        ``key = value`` comment lines (values as text).
    header : list of str
    data : ndarray, shape (rows, columns)
    """
    params: dict[str, str] = {}
    header: list[str] = []
    rows: list[list[float]] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                body = line[1:].strip()
                if " = " in body:
                    k, v = body.split(" = ", 1)
                    params[k] = v
            elif not header:
                header = line.split(",")
            elif line:
                rows.append([float(x) for x in line.split(",")])
    data = np.array(rows, dtype=float).reshape(len(rows), len(header))
    return params, header, data
