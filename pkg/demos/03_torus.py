"""Hodge splitting and the solution operator on the periodic 4-torus.

Run with ``python demos/03_torus.py``.
"""
import numpy as np

from kfueter.grids import Field, TorusGrid
from kfueter.errors import OrthogonalityError
from kfueter.operators import build_d0
from kfueter.torus import apply_op, hodge_decompose, solve_d0_torus

rng = np.random.default_rng(1)
grid = TorusGrid(8)
k = 2

f = Field.random(grid, 2 * k, rng)
h = hodge_decompose(k, f)
print("norms of exact / coexact / harmonic parts:",
      ", ".join(f"{p.norm():.3f}" for p in h.parts()))
print(f"reconstruction error {h.reconstruction_error(f) / f.norm():.1e}")
gram = h.gram()
print(f"largest off-diagonal inner product {np.abs(gram - np.diag(np.diag(gram))).max():.1e}")

# A compatible right-hand side: the image of a mean-zero field.
g = Field.random(grid, k + 1, rng, mean_zero=True)
rhs = apply_op(build_d0(k), g)
u = solve_d0_torus(k, rhs)
res = (apply_op(build_d0(k), u) - rhs).norm() / rhs.norm()
print(f"\nD0 u = f solved with relative residual {res:.1e}")

# Constants are harmonic, so they are not in the image of D0.
try:
    solve_d0_torus(k, Field.constant(grid, [1, 0, 0, 0]))
except OrthogonalityError as exc:
    print("constant right-hand side rejected:", exc)
