"""
Long-time behaviour
===================

Rescaled solutions of square data approach the self-similar profile.
Gap data converge only away from the origin.
"""

import numpy as np
import matplotlib.pyplot as plt

from vortexmass.analysis import radial_evaluator, relative_error_profile, rescale_profile
from vortexmass.characteristics import eval_u, gap_data, square_data
from vortexmass.exact import SelfSimilarParams, profile_F

alpha = 0.5
y = np.concatenate([[0.0], np.geomspace(1e-3, 50, 400)])

fig, ax = plt.subplots()
ax.loglog(y[1:], profile_F(SelfSimilarParams(alpha, 1.0), y[1:]), "k", label="F_M")
for name, data in (("square", square_data()), ("gap", gap_data(1.0, 1.0, 0.5))):
    u = radial_evaluator(lambda t, r, d=data: eval_u(t, r, d, alpha), 1)
    for t in (10.0, 1000.0):
        w = rescale_profile(u, alpha, 1, t, y)
        ax.loglog(y[1:], w.w[1:], lw=0.8, label=f"{name}, t={t:g}")
    errs = [relative_error_profile(u, data.mass, alpha, 1, t, y) for t in (10, 100, 1000)]
    errs_away = [relative_error_profile(u, data.mass, alpha, 1, t, y, y_min=0.05) for t in (10, 100, 1000)]
    print(name, "full grid:", np.round(errs, 6), "y >= 0.05:", np.round(errs_away, 6))
ax.set_xlabel("|y|")
ax.set_ylabel("w")
ax.legend()
plt.show()
