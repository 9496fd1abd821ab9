# %% [markdown]
# # Relaxation and echo protocols
#
# A pi pulse followed by a variable wait measures T1. A Hahn echo measures
# T2. Both are simulated with the master equation and fitted to a single
# exponential.

# %%
import numpy as np

from geolz.dynamics import DecoherenceParams
from geolz.experiments import fit_exponential, run_t1, run_t2_echo, simulate_shots

dec = DecoherenceParams(T1=118e-9, T2=157e-9)
t1_data, t1_fit = run_t1(np.linspace(0, 400e-9, 21), dec, workers=4)
t2_data, t2_fit = run_t2_echo(np.linspace(0, 200e-9, 21), dec, workers=4)
print(f"T1 fit {t1_fit.time_constant * 1e9:.2f} ns")
print(f"T2 fit {t2_fit.time_constant * 1e9:.2f} ns")

# %% [markdown]
# Finite shot counts add binomial noise. Refitting the sampled T1 curve
# shows how the statistical error bar grows as the shot count falls.

# %%
for shots in (100, 1000, 10000):
    noisy = simulate_shots(t1_data.p1, shots, seed=11)
    fit = fit_exponential(t1_data.axis_values, noisy)
    print(f"{shots:6d} shots: T1 = {fit.time_constant * 1e9:6.1f} "
          f"+- {fit.time_constant_stderr * 1e9:4.1f} ns")
