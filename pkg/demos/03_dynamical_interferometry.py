# %% [markdown]
# # Dynamical interference
#
# Without the echo and at fixed drive phase, the two crossings interfere
# through the dynamical phase accumulated between them. The population
# then oscillates with the cycle period.

# %%
import numpy as np

from geolz.dynamics import DecoherenceParams
from geolz.experiments import run_dlzi_sweep

periods = np.linspace(60e-9, 160e-9, 26)
coherent = run_dlzi_sweep(periods, workers=4)
model = run_dlzi_sweep(periods, method="impulse")
noisy = run_dlzi_sweep(periods, method="master", dec=DecoherenceParams(118e-9, 157e-9),
                       workers=4)

for tc, a, b, c in zip(periods[::3], coherent.p1[::3], model.p1[::3], noisy.p1[::3]):
    print(f"tau_C {tc * 1e9:5.1f} ns   schrodinger {a:.3f}   impulse {b:.3f}   master {c:.3f}")
print(f"contrast: schrodinger {coherent.contrast:.3f}, impulse {model.contrast:.3f}, "
      f"master {noisy.contrast:.3f}")
