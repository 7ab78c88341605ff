"""The shifted-grid discrete complex on a box.

Run with ``python demos/04_box_grid.py``.
"""
import numpy as np

from kfueter import bvp
from kfueter.grids import BoxGrid

rng = np.random.default_rng(2)
k, n = 2, 4
c = bvp.assemble(k, BoxGrid(n))
print("unknowns per level:", c.sizes)

phi = rng.standard_normal(c.A0.shape[1])
print(f"|A1 A0 phi| / |phi| = {np.linalg.norm(c.A1 @ (c.A0 @ phi)) / np.linalg.norm(phi):.1e}")

# The harmonic space is the kernel of A0 A0^H + A1^H A1.
basis = bvp.harmonic_basis(c)
print("harmonic space:", basis.summary())
print(f"A1 onto level 2: relative smallest eigenvalue of A1 A1^H = {bvp.d1_surjectivity(c):.3f}")

f = rng.standard_normal(c.A0.shape[0]) + 1j * rng.standard_normal(c.A0.shape[0])
h = bvp.hodge_decompose_grid(c, f, basis=basis)
print("\npart norms:", ", ".join(f"{np.linalg.norm(p):.3f}" for p in h.parts()))
print(f"reconstruction {np.linalg.norm(sum(h.parts()) - f) / np.linalg.norm(f):.1e}")

# The exact part is in the image of A0, so D0 u = exact part is solvable.
sol = bvp.solve_d0_grid(c, h.exact, basis=basis)
print(f"solve for the exact part: residual {sol.residual / np.linalg.norm(h.exact):.1e}, "
      f"|u|/|f| = {sol.norm_ratio:.3f}")
