"""Index layouts and coordinate conventions shared by every module.

Coordinates are ``z0 = x0 + i x1`` and ``z1 = x2 + i x3``.  A first-order
constant-coefficient operator ``sum_m c_m d/dx_m`` is stored as the length-4
complex vector ``(c0, c1, c2, c3)``.  The complex derivatives below omit the
customary factor 1/2, so ``dz0 dz0bar + dz1 dz1bar`` is the full Laplacian.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, IndexRangeError

DX = np.eye(4, dtype=complex)

DZ0 = np.array([1, -1j, 0, 0])
DZ0BAR = np.array([1, 1j, 0, 0])
DZ1 = np.array([0, 0, 1, -1j])
DZ1BAR = np.array([0, 0, 1, 1j])

#: z-basis names in the order used by :data:`Z_FROM_X`.
Z_NAMES = ("∂z0", "∂z̄0", "∂z1", "∂z̄1")

# Row m expresses d/dx_m in the z-basis (dz0, dz0bar, dz1, dz1bar).
X_IN_Z = np.array(
    [
        [0.5, 0.5, 0, 0],
        [0.5j, -0.5j, 0, 0],
        [0, 0, 0.5, 0.5],
        [0, 0, 0.5j, -0.5j],
    ]
)
#: Columns are the x-coefficient vectors of dz0, dz0bar, dz1, dz1bar.
Z_FROM_X = np.column_stack([DZ0, DZ0BAR, DZ1, DZ1BAR])

# Lowered gradient nabla_{AB'}; entry [A][B'] is a coefficient vector.
NABLA_LOWER = np.array(
    [
        [[1, 1j, 0, 0], [0, 0, -1, -1j]],
        [[0, 0, 1, -1j], [1, -1j, 0, 0]],
    ]
)

# Index raising on the primed slot: nabla_A^{A'} = nabla_{AB'} R[B', A'].
_RAISE = np.array([[0, -1], [1, 0]])

#: Raised gradient nabla_A^{A'}, shape (2, 2, 4).
NABLA = np.einsum("abm,bc->acm", NABLA_LOWER, _RAISE)


def laplacian_tensor():
    """Symmetric 4x4 coefficient tensor of the Euclidean Laplacian."""
    return np.eye(4, dtype=complex)


def product_tensor(a, b):
    """Symmetrised coefficient tensor of the product of two first-order symbols."""
    t = np.multiply.outer(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    return 0.5 * (t + t.T)


@dataclass(frozen=True)
class ComponentLayout:
    """Component counts of the three spaces in the complex for a given ``k``."""

    k: int

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 2:
            raise DomainError(f"k must be an integer >= 2, got {self.k!r}")

    @property
    def n_phi(self):
        return self.k + 1

    @property
    def n_psi(self):
        return 2 * self.k

    @property
    def n_Psi(self):
        return self.k - 1


def check_k(k):
    """Validate ``k`` and return it as an ``int``."""
    return ComponentLayout(k).k


def flat_index_psi(A, j, k):
    """Flat position of the middle-space component ``psi_{A,j}``.

    ``A`` is the unprimed index and ``j`` the number of primed indices equal
    to ``1'``.  The layout is ``2*j + A``.
    """
    check_k(k)
    if A not in (0, 1):
        raise IndexRangeError(f"A must be 0 or 1, got {A!r}")
    if not 0 <= j <= k - 1:
        raise IndexRangeError(f"j must lie in [0, {k - 1}], got {j!r}")
    return 2 * j + A


def unflat_index_psi(i, k):
    check_k(k)
    if not 0 <= i < 2 * k:
        raise IndexRangeError(f"flat index must lie in [0, {2 * k - 1}], got {i!r}")
    return i % 2, i // 2
