"""
Convergence of the scheme and the vanishing-viscosity limit
===========================================================

The sup error of the monotone scheme decays like ``delta^alpha``; the
viscous solutions approach the same limit as ``eps`` goes to zero.
"""

import numpy as np
import matplotlib.pyplot as plt

from vortexmass.characteristics import eval_m, square_data
from vortexmass.hjfd import convergence_study
from vortexmass.viscous import vanishing_viscosity_study

data = square_data()

############################################################
# Rates for three mobilities

fig, ax = plt.subplots()
for alpha in (0.3, 0.5, 0.7):
    oracle = lambda t, r, a=alpha: eval_m(t, r, data, a)
    table = convergence_study(data, [0.1, 0.05, 0.025], oracle, T=1.0, alpha=alpha)
    print(f"alpha={alpha}: slope {table.slope:.3f}")
    ax.loglog(table.deltas, table.errors, "o-", label=f"alpha={alpha}")
ax.set_xlabel("delta")
ax.set_ylabel("sup error at T=1")
ax.legend()

############################################################
# Viscous runs against a fine FD reference

study = vanishing_viscosity_study(data, [1e-1, 1e-2, 1e-3], 1.0, 0.5, window=(0.0, 2.0), rho_max=5.0)
for eps, dist in study.rows():
    print(f"eps={eps:g}: sup distance {dist:.4f}")
plt.show()
