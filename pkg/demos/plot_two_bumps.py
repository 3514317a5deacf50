"""
Shock between two bumps
=======================

The fan of an inner bump catches up with an outer bump. The shock is
tracked by integrating the Rankine-Hugoniot law with RK4 and compared with
the sharpest jump of a finite-difference solution.
"""

import numpy as np
import matplotlib.pyplot as plt

from vortexmass.hjfd import derive_u, run_fd
from vortexmass.shocks import TwoBumpParams, lax_oleinik_check, two_bump_solve

params = TwoBumpParams(c1=1.0, c2=1.0, a=1.5, b=2.5, alpha=0.5)
path, sol = two_bump_solve(params, t_end=1.0, h=1e-3)
print("RK4 step-halving error estimate:", path.error_estimate)
print("Lax-Oleinik holds:", lax_oleinik_check(sol, path, params.alpha).all_passed)

############################################################
# Finite differences with a small regularisation on a coarse grid

delta, h = 1e-3, 2e-3
h_t = 0.9 * h * delta ** (1 - params.alpha) / (params.alpha * params.mass)
fd = run_fd(params.m0, 1.0, delta, params.alpha, rho_max=6.0, h_rho=h, h_t=h_t, M_bar=params.mass, save_times=[0.5, 1.0])
u_fd = derive_u(fd)

fig, ax = plt.subplots()
rho = np.linspace(0, 6, 1200)
for T in (0.5, 1.0):
    k = int(np.argmin(np.abs(fd.times - T)))
    ax.plot(rho, sol.u(T, rho), label=f"pasted, t={T}")
    ax.plot(fd.rho, u_fd[k], lw=0.7, label=f"FD, t={T}")
    ax.axvline(path(T), color="k", lw=0.5)
ax.set_xlabel("rho")
ax.set_ylabel("u")
ax.legend()

fig, ax = plt.subplots()
ax.plot(path.times, path.positions)
ax.set_xlabel("t")
ax.set_ylabel("S(t)")
plt.show()
