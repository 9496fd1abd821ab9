# %% [markdown]
# # Flux-biased phase qubit
#
# The qubit frequency is the small-oscillation frequency at the bottom of
# the potential well. Tuning the external flux moves the well and so sets
# the detuning seen by the drive.

# %%
import math

import numpy as np

from geolz import qubit

params = qubit.DEFAULT_PARAMS
print(f"E_C {params.charging_energy / (2 * math.pi) / 1e9:.4f} GHz, "
      f"E_J {params.josephson_energy / (2 * math.pi) / 1e12:.3f} THz, "
      f"E_L {params.inductance_energy / (2 * math.pi) / 1e12:.3f} THz")

for bias, omega in qubit.spectroscopy_curve(params, np.linspace(3.0, 4.5, 7)):
    geom = qubit.stationary_phase_points(params.with_flux(bias))
    print(f"flux {bias:.2f} rad: well at {geom.phi_min:.4f}, barrier at {geom.phi_max:.4f}, "
          f"spacing {omega / (2 * math.pi) / 1e9:.4f} GHz")

# %% [markdown]
# Inverting the curve gives the bias for each operating point. The drive
# at the middle point then sees about +/- 100 MHz of detuning at the other two.

# %%
biases = qubit.operating_biases(params)
drive = qubit.OPERATING_POINTS["M"]
for name, b in biases.items():
    d = qubit.detuning(params.with_flux(b), drive)
    print(f"{name}: flux {b:.5f} rad, detuning {d / (2 * math.pi) / 1e6:+.2f} MHz")
