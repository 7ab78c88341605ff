"""Pointwise symbols, ellipticity, boundary conditions and the regularity check.

Run with ``python demos/02_symbols_and_boundary.py``.
"""
import numpy as np

from kfueter.lopatinskii import SLInstance, sl_direct_check, sl_reduced_nonsingular
from kfueter.symbols import boundary_conditions, check_symbol_exactness, ellipticity_check

rng = np.random.default_rng(0)
k = 4

xi = rng.standard_normal(4)
xi /= np.linalg.norm(xi)
rep = check_symbol_exactness(k, xi)
print(f"symbol sequence at a random unit xi, k={k}")
print(f"  rank D0 = {rep.rank_d0}, rank D1 = {rep.rank_d1}, gap = {rep.ker_im_gap:.1e}")

# The symbol of -box1 is positive definite and homogeneous of degree two.
lam = ellipticity_check(k, xi)
print(f"  lambda_min = {lam:.6f}, at 2 xi: {ellipticity_check(k, 2 * xi):.6f}")

# Natural boundary conditions on a face with normal e0.
bc = boundary_conditions(k, (1.0, 0.0, 0.0, 0.0))
print(f"\nboundary conditions at nu = e0, k={k}:")
for line in bc.describe():
    print("  " + line)
print("  top-space field vanishes on the boundary:", bc.Psi_dirichlet)

# Two independent routes to the regularity condition.
print("\nregularity on random (nu, xi) pairs")
for _ in range(5):
    inst = SLInstance.random(k, rng)
    red = sl_reduced_nonsingular(inst)
    direct = sl_direct_check(inst)
    print(
        f"  |Lambda|/|xi| = {red.lambda_ratio:.3f}  pivots = "
        + ", ".join(f"{p:.3f}" for p in red.pivot_trace)
        + f"  decaying dim = {direct.decaying_dim}  sigma_min = {direct.sigma_min:.3f}"
    )
