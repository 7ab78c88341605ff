"""Shapiro-Lopatinskii condition for the natural boundary problem of ``box1``.

Two independent routes:

* :func:`sl_reduced_nonsingular` runs Gaussian elimination on the tridiagonal
  matrix with diagonal ``-2|xi|`` and off-diagonals ``Lambda``, ``conj(Lambda)``
  and checks every pivot stays below ``-|xi|``.
* :func:`sl_direct_check` works straight from the frozen half-line ODE
  ``box1(i xi + nu d/dt) u = 0``: it computes the decaying invariant subspace
  of the first-order companion system and tests that the boundary operators
  are injective on it.
"""
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .conventions import check_k
from .errors import DomainError, RootSplitError, TheoryViolation
from .symbols import _ops
from .operators import symbol_fourier, symbol_line, symbol_real

UNIT_TOL = 1e-12


@dataclass(frozen=True)
class SLInstance:
    k: int
    nu: tuple
    xi: tuple

    def __post_init__(self):
        check_k(self.k)
        nu = np.asarray(self.nu, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if nu.shape != (4,) or xi.shape != (4,):
            raise DomainError("nu and xi must be 4-vectors")
        if abs(np.linalg.norm(nu) - 1) > UNIT_TOL:
            raise DomainError(f"nu must be a unit vector, |nu| = {np.linalg.norm(nu)!r}")
        xn = np.linalg.norm(xi)
        if xn == 0:
            raise DomainError("xi must be nonzero")
        if abs(xi @ nu) > UNIT_TOL * xn:
            raise DomainError(f"xi must be orthogonal to nu, xi.nu = {xi @ nu!r}")
        object.__setattr__(self, "nu", tuple(nu.tolist()))
        object.__setattr__(self, "xi", tuple(xi.tolist()))

    @property
    def nu_array(self):
        return np.array(self.nu)

    @property
    def xi_array(self):
        return np.array(self.xi)

    @property
    def xi_norm(self):
        return float(np.linalg.norm(self.xi))

    @classmethod
    def random(cls, k, rng, xi_scale=(0.5, 2.0)):
        """Random unit ``nu`` and a random ``xi`` orthogonal to it."""
        nu = rng.standard_normal(4)
        nu /= np.linalg.norm(nu)
        xi = rng.standard_normal(4)
        xi -= (xi @ nu) * nu
        xi *= rng.uniform(*xi_scale) / np.linalg.norm(xi)
        xi -= (xi @ nu) * nu
        return cls(k, tuple(nu), tuple(xi))


def mu_frames(nu):
    """The two tangent unit vectors ``(mu, mu_tilde)`` paired with ``nu``."""
    n0, n1, n2, n3 = np.asarray(nu, dtype=float)
    mu = np.array([-n2, -n3, n0, n1])
    mu_t = np.array([-n3, n2, -n1, n0])
    return mu, mu_t


def lambda_coupling(inst):
    """``Lambda = i (mu . xi) - mu_tilde . xi``; satisfies ``|Lambda| <= |xi|``."""
    mu, mu_t = mu_frames(inst.nu)
    xi = inst.xi_array
    return complex(-(mu_t @ xi), mu @ xi)


def sl_reduced_matrix(inst):
    n = inst.k - 1
    lam = lambda_coupling(inst)
    m = np.diag(np.full(n, -2 * inst.xi_norm, dtype=complex))
    if n > 1:
        m += np.diag(np.full(n - 1, lam), -1) + np.diag(np.full(n - 1, np.conj(lam)), 1)
    return m


@dataclass
class ReducedResult:
    det: complex
    pivot_trace: list
    nonsingular: bool
    lambda_ratio: float  # |Lambda| / |xi|

    def to_json(self):
        d = asdict(self)
        d["det"] = [self.det.real, self.det.imag]
        return d


def sl_reduced_nonsingular(inst, rtol=1e-10):
    """Pivot recursion ``p1 = -2|xi|``, ``p_{j+1} = -2|xi| - |Lambda|^2 / p_j``.

    Raises :class:`TheoryViolation` if a pivot reaches ``-|xi|`` or the pivot
    product disagrees with the direct determinant.
    """
    x = inst.xi_norm
    lam2 = abs(lambda_coupling(inst)) ** 2
    pivots = [-2 * x]
    for _ in range(inst.k - 2):
        pivots.append(-2 * x - lam2 / pivots[-1])
    bad = [p for p in pivots if not p < -x]
    if bad:
        raise TheoryViolation(f"pivot {bad[0]!r} not below -|xi| = {-x!r} for {inst}")
    det = complex(np.prod(pivots))
    direct = complex(np.linalg.det(sl_reduced_matrix(inst)))
    if abs(direct - det) > rtol * abs(det):
        raise TheoryViolation(f"pivot determinant {det} disagrees with direct {direct}")
    return ReducedResult(
        det=det,
        pivot_trace=pivots,
        nonsingular=True,
        lambda_ratio=abs(lambda_coupling(inst)) / x,
    )


@dataclass
class DirectResult:
    decaying_dim: int
    sigma_min: float
    min_abs_real: float  # distance of the closest root to the imaginary axis, over |xi|
    regular: bool

    def to_json(self):
        return asdict(self)


def decaying_subspace(inst, split_tol=1e-8):
    """Orthonormal basis of initial data ``(u(0), u'(0))`` of decaying solutions.

    The quadratic pencil ``A0 + lam A1 + lam^2 A2`` of ``box1`` along the
    line is rewritten as ``z' = C z`` with ``z = (u, u')``; an ordered Schur
    form collects the invariant subspace with ``Re lam < 0``.  This also
    covers repeated roots, whose solutions carry polynomial factors in ``t``.

    Returns ``(basis, eigenvalues)`` with ``basis`` of shape ``(4k, dim)``.
    """
    k = inst.k
    a0, a1, a2 = symbol_line(_ops(k)[4], inst.xi_array, inst.nu_array)
    n = 2 * k
    a2_inv = np.linalg.inv(a2)
    comp = np.zeros((2 * n, 2 * n), dtype=complex)
    comp[:n, n:] = np.eye(n)
    comp[n:, :n] = -a2_inv @ a0
    comp[n:, n:] = -a2_inv @ a1
    cut = split_tol * inst.xi_norm
    t, z, sdim = scipy.linalg.schur(comp, output="complex", sort=lambda w: w.real < -cut)
    return z[:, :sdim], np.diag(t)


def boundary_matrix(inst):
    """Rows acting on ``(u(0), u'(0))``: ``D0*(nu) u`` and ``D1(i xi) u + D1(nu) u'``."""
    k = inst.k
    _, d1, d0s, _, _ = _ops(k)
    nu, xi = inst.nu_array, inst.xi_array
    top = np.hstack([symbol_real(d0s, nu), np.zeros((k + 1, 2 * k))])
    bottom = np.hstack([symbol_fourier(d1, xi), symbol_real(d1, nu)])
    return np.vstack([top, bottom])


def sl_direct_check(inst, tol=1e-6, split_tol=1e-8):
    """Injectivity of the boundary map on decaying solutions.

    Raises :class:`RootSplitError` unless exactly ``2k`` roots (with
    multiplicity) have negative real part and none sits on the imaginary axis.
    """
    basis, eigs = decaying_subspace(inst, split_tol)
    dim = basis.shape[1]
    min_abs_real = float(np.min(np.abs(eigs.real)) / inst.xi_norm)
    if dim != 2 * inst.k or min_abs_real <= split_tol:
        raise RootSplitError(
            f"expected {2 * inst.k} decaying modes, found {dim} "
            f"(closest root to the axis: {min_abs_real:.3e}) for {inst}"
        )
    bmap = boundary_matrix(inst) @ basis
    sigma = float(np.linalg.svd(bmap, compute_uv=False)[-1])
    return DirectResult(
        decaying_dim=dim,
        sigma_min=sigma,
        min_abs_real=min_abs_real,
        regular=sigma > tol,
    )
