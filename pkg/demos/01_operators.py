"""Building the operator matrices and their Laplacians.

Run with ``python demos/01_operators.py``.
"""
from kfueter import operators as ops

k = 3

# D0 maps k+1 components to 2k; each row touches two neighbouring columns.
d0 = ops.build_d0(k)
print(f"D0 for k={k}, shape {d0.shape}")
print(ops.format_operator(d0))

# D1 is banded: row j uses columns 2j..2j+3.
d1 = ops.build_d1(k)
print(f"\nD1 for k={k}, shape {d1.shape}")
print(ops.format_operator(d1))

# Composition is exact polynomial arithmetic, so the complex property is an
# equality of coefficient arrays rather than a tolerance check.
print("\nD1 D0 is the zero operator:", ops.compose(d1, d0).is_zero())

# The middle Laplacian is block diagonal with 2x2 blocks at both ends and
# -2 Delta in between.
b1 = ops.box1(k)
print("\nbox1 equals its closed form:", b1 == ops.box1_closed_form(k))
print(ops.format_operator(b1))

# The same entries in Cartesian derivatives.
print("\nbox2 in the x basis:")
print(ops.format_operator(ops.box2(k), basis="x"))
