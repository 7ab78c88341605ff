"""Pointwise linear algebra on symbol matrices.

Ranks, exactness of the symbol sequence, ellipticity of the associated
Laplacian, the orthogonal splitting of C^{2k} at a normal vector, and the
boundary conditions read off from the adjoint symbol.
"""
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import sympy

from .conventions import check_k
from .errors import DomainError, EllipticityViolation, ExactnessViolation
from .operators import box1, build_d0, build_d1, formal_adjoint, symbol_fourier, symbol_real

RANK_RTOL = 1e-10


def numeric_rank(M, tol=RANK_RTOL):
    """Number of singular values above ``tol`` times the largest one."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    M = np.atleast_2d(np.asarray(M))
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


@lru_cache(maxsize=None)
def _ops(k):
    d0, d1 = build_d0(k), build_d1(k)
    return d0, d1, formal_adjoint(d0), formal_adjoint(d1), box1(k)


def _require_nonzero(xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (4,) or not np.any(xi):
        raise DomainError("xi must be a nonzero real 4-vector")
    return xi


def _range_basis(M, rank):
    u = np.linalg.svd(M)[0]
    return u[:, :rank]


def _null_basis(M, rank):
    vh = np.linalg.svd(M)[2]
    return vh[rank:].conj().T


@dataclass
class SymbolReport:
    k: int
    xi: list
    rank_d0: int
    rank_d1: int
    product_norm: float
    ker_im_gap: float
    lambda_min: float

    def to_json(self):
        return asdict(self)


def check_symbol_exactness(k, xi, tol=1e-10):
    """Verify the symbol sequence ``C^{k+1} -> C^{2k} -> C^{k-1}`` is exact at ``xi``.

    ``ker_im_gap`` is the sine of the largest principal angle between
    ``ker S1`` and ``im S0``.  ``lambda_min`` is included so the report matches
    the published JSON layout; see :func:`ellipticity_check`.

    Raises
    ------
    ExactnessViolation
        If a rank is wrong, ``|S1 S0|`` exceeds ``tol``, or the gap exceeds ``tol``.
    """
    k = check_k(k)
    xi = _require_nonzero(xi)
    d0, d1 = _ops(k)[:2]
    s0 = symbol_fourier(d0, xi)
    s1 = symbol_fourier(d1, xi)
    r0 = numeric_rank(s0)
    r1 = numeric_rank(s1)
    prod = float(np.linalg.norm(s1 @ s0, 2))
    ker = _null_basis(s1, r1)
    im = _range_basis(s0, r0)
    if ker.shape[1] != im.shape[1]:
        gap = 1.0
    else:
        gap = float(np.sin(scipy.linalg.subspace_angles(ker, im).max()))
    report = SymbolReport(
        k=k,
        xi=xi.tolist(),
        rank_d0=r0,
        rank_d1=r1,
        product_norm=prod,
        ker_im_gap=gap,
        lambda_min=ellipticity_check(k, xi),
    )
    if r0 != k + 1 or r1 != k - 1 or prod > tol * max(1.0, float(xi @ xi)) or gap > tol:
        raise ExactnessViolation(f"symbol sequence not exact at xi={xi.tolist()}: {report}")
    return report


def ellipticity_check(k, xi):
    """Smallest eigenvalue of the (Hermitian) symbol of ``-box1`` at ``xi``."""
    k = check_k(k)
    xi = _require_nonzero(xi)
    sym = -symbol_real(_ops(k)[4], xi)
    sym = 0.5 * (sym + sym.conj().T)
    lam = float(np.linalg.eigvalsh(sym)[0])
    if lam <= 0:
        raise EllipticityViolation(f"symbol of -box1 not positive definite at xi={xi.tolist()}")
    return lam


def orthogonal_projectors(k, nu):
    """Orthogonal projectors onto ``im D0(nu)`` and ``im D1*(nu)``."""
    k = check_k(k)
    nu = np.asarray(nu, dtype=float)
    d0, d1, _, d1s, _ = _ops(k)
    a = _range_basis(symbol_real(d0, nu), k + 1)
    b = _range_basis(symbol_real(d1s, nu), k - 1)
    return a @ a.conj().T, b @ b.conj().T


def zeta(nu):
    """``(zeta0, zeta1) = (nu0 - i nu1, nu2 - i nu3)``."""
    nu = np.asarray(nu, dtype=float)
    return complex(nu[0], -nu[1]), complex(nu[2], -nu[3])


def zeta_block_det(nu):
    """Determinant of the leading 2x2 block ``[[-conj z1, -conj z0], [z0, -z1]]`` of ``D0(nu)``."""
    z0, z1 = zeta(nu)
    return np.linalg.det(np.array([[-np.conj(z1), -np.conj(z0)], [z0, -z1]]))


@dataclass
class BoundaryConditions:
    """Linear boundary conditions on the middle-space field at normal ``nu``.

    ``rows`` is ``D0*(nu)``; each row is a condition ``rows[i] @ psi = 0``.
    ``Psi_dirichlet`` records that ``D1*(nu)`` is injective, so the top-space
    field must vanish on the boundary.
    """

    k: int
    nu: list
    rows: np.ndarray
    rank: int
    Psi_dirichlet: bool

    def reduced(self):
        """Exact reduced row echelon form of the conditions (a sympy Matrix).

        Only meaningful when the entries are Gaussian integers, as for the
        coordinate normals.
        """
        return _exact_rref(self.rows)

    def describe(self):
        """Conditions as strings such as ``psi0 - psi3 = 0``."""
        out = []
        mat = self.reduced()
        for i in range(mat.rows):
            terms = []
            for j in range(mat.cols):
                c = mat[i, j]
                if c == 0:
                    continue
                sign = "-" if (c.is_real and c < 0) else "+"
                mag = -c if sign == "-" else c
                coef = "" if mag == 1 else f"({mag})*"
                terms.append((sign, f"{coef}psi{j}"))
            if not terms:
                continue
            text = ("-" if terms[0][0] == "-" else "") + terms[0][1]
            for sign, body in terms[1:]:
                text += f" {sign} {body}"
            out.append(text + " = 0")
        return out


def _exact_rref(rows):
    def to_exact(z):
        re, im = float(np.real(z)), float(np.imag(z))
        return sympy.nsimplify(re, rational=True) + sympy.I * sympy.nsimplify(im, rational=True)

    mat = sympy.Matrix([[to_exact(z) for z in row] for row in np.asarray(rows)])
    return mat.rref()[0]


def boundary_conditions(k, nu):
    k = check_k(k)
    nu = np.asarray(nu, dtype=float)
    _, _, d0s, d1s, _ = _ops(k)
    rows = symbol_real(d0s, nu)
    rank = numeric_rank(rows)
    injective = numeric_rank(symbol_real(d1s, nu)) == k - 1
    return BoundaryConditions(k=k, nu=nu.tolist(), rows=rows, rank=rank, Psi_dirichlet=injective)


def expected_normal_conditions(k):
    """The conditions at ``nu = (1, 0, 0, 0)`` in closed form, as a matrix.

    ``psi_1 = psi_{2k-2} = 0`` and ``psi_j - psi_{j+3} = 0`` for even
    ``j <= 2k - 4``.
    """
    k = check_k(k)
    rows = []
    e = np.eye(2 * k)
    rows.append(e[1])
    rows.append(e[2 * k - 2])
    for j in range(0, 2 * k - 3, 2):
        rows.append(e[j] - e[j + 3])
    return np.array(rows)
