# %% [markdown]
# # Geometric interference
#
# The echoed cycle sweeps through the crossing, rotates the drive azimuth
# out to theta and back, and sweeps through again. Only the azimuth
# excursion should matter for the final population.

# %%
import math

import numpy as np

from geolz import analytic
from geolz.experiments import run_glzi_map, run_glzi_theta_sweep, run_time_trace

thetas = np.linspace(0, 2 * math.pi, 32, endpoint=False)
sweep = run_glzi_theta_sweep(thetas, workers=4)

# %% [markdown]
# The time trace at theta = pi/2 gives the effective crossing probability
# from the population plateau after the first crossing.

# %%
trace = run_time_trace(math.pi / 2, flatness=math.inf)
p_eff = trace.p_lz_prime
print(f"plateau P1 {trace.plateau_p1:.4f} (std {trace.plateau_std:.4f}), p' = {p_eff:.4f}")

closed = analytic.glzi_population(p_eff, thetas)
for th, num, ref in zip(thetas[::4], sweep.p1[::4], closed[::4]):
    print(f"theta {th:5.3f}   simulated {num:.4f}   closed form {ref:.4f}")
print(f"fringe contrast {sweep.contrast:.4f}")

# %% [markdown]
# Changing the sweep time changes the crossing probability and so the
# fringe depth. The fringe maximum stays at theta = 0.

# %%
grid = run_glzi_map(thetas, [10e-9, 25e-9, 40e-9], workers=4)
for tp, row in zip(grid.second_axis_values, grid.p1):
    print(f"tau_p {tp * 1e9:4.0f} ns: argmax theta {thetas[np.argmax(row)]:.3f}, "
          f"depth {row.max() - row.min():.3f}")
