"""Discrete Hodge theory for the complex on a 4D box.

The three spaces live on shrinking grids (``n+1``, ``n`` and ``n-1`` points
per dimension).  Each symbolic entry ``sum_m c_m d/dx_m`` becomes
``sum_m c_m delta_m`` with the forward difference ``delta_m`` followed by
dropping the last layer along every other axis.  Forward differences and
these restrictions commute, so ``A1 A0 = 0`` holds exactly.

Adjoints are plain conjugate transposes.  This builds natural boundary
conditions into ``box1 = A0 A0^H + A1^H A1``; its kernel is the discrete
harmonic space.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .conventions import check_k
from .errors import CompatibilityError, OrthogonalityError, SolverError
from .grids import BoxGrid, Field
from .operators import build_d0, build_d1

logger = logging.getLogger(__name__)

DENSE_LIMIT = 2000


def _forward_difference(n_in, h):
    n_out = n_in - 1
    diff = (sp.eye(n_out, n_in, k=1) - sp.eye(n_out, n_in)) / h
    keep = sp.eye(n_out, n_in)
    return diff.tocsr(), keep.tocsr()


def level_differences(grid, level):
    """The four scalar difference maps from ``level`` to ``level + 1``."""
    diff, keep = _forward_difference(grid.n + 1 - level, grid.h)
    out = []
    for m in range(4):
        mat = None
        for axis in range(4):
            factor = diff if axis == m else keep
            mat = factor if mat is None else sp.kron(mat, factor, format="csr")
        out.append(mat)
    return out


def _stencil_matrix(op, deltas):
    blocks = [[None] * op.cols for _ in range(op.rows)]
    for i in range(op.rows):
        for j in range(op.cols):
            c = op.coeffs[i, j]
            if np.any(c):
                blocks[i][j] = sum(c[m] * deltas[m] for m in range(4) if c[m] != 0)
    shape_rows = deltas[0].shape[0]
    shape_cols = deltas[0].shape[1]
    # bmat needs at least one block per block-row and block-column
    for i in range(op.rows):
        if all(b is None for b in blocks[i]):
            blocks[i][0] = sp.csr_matrix((shape_rows, shape_cols))
    for j in range(op.cols):
        if all(blocks[i][j] is None for i in range(op.rows)):
            blocks[0][j] = sp.csr_matrix((shape_rows, shape_cols))
    return sp.bmat(blocks, format="csr", dtype=complex)


@dataclass
class DiscreteComplex:
    k: int
    grid: BoxGrid
    A0: sp.csr_matrix
    A1: sp.csr_matrix

    @property
    def sizes(self):
        return self.A0.shape[1], self.A0.shape[0], self.A1.shape[0]

    def to_vector(self, f):
        """Component-major vector of a field."""
        return np.moveaxis(f.values, -1, 0).ravel()

    def to_field(self, vec, level):
        m = {0: self.k + 1, 1: 2 * self.k, 2: self.k - 1}[level]
        shape = self.grid.level_shape(level)
        return Field(self.grid, np.moveaxis(np.asarray(vec).reshape((m,) + shape), 0, -1), level)


def assemble(k, grid):
    """Sparse ``A0`` (level 0 -> 1) and ``A1`` (level 1 -> 2)."""
    k = check_k(k)
    a0 = _stencil_matrix(build_d0(k), level_differences(grid, 0))
    a1 = _stencil_matrix(build_d1(k), level_differences(grid, 1))
    return DiscreteComplex(k=k, grid=grid, A0=a0, A1=a1)


def discrete_box1(c):
    """``A0 A0^H + A1^H A1`` on level-1 fields."""
    a0, a1 = c.A0, c.A1
    return (a0 @ a0.conj().T + a1.conj().T @ a1).tocsr()


@dataclass
class HarmonicBasis:
    """Orthonormal basis (columns of ``vectors``) of the discrete harmonic space."""

    vectors: np.ndarray
    eigenvalues: np.ndarray  # eigenvalues of box1 below the cut
    lambda_max: float
    cut: float
    next_eigenvalue: float  # smallest eigenvalue above the cut
    joint_residual: np.ndarray = field(default=None)  # |A0^H v| + |A1 v| per vector

    @property
    def dim(self):
        return self.vectors.shape[1]

    @property
    def gap(self):
        """Ratio of the first retained-out eigenvalue to the cut."""
        return self.next_eigenvalue / self.cut if self.cut > 0 else np.inf

    def project(self, vec):
        v = self.vectors
        return v @ (v.conj().T @ vec)

    def summary(self):
        return {
            "dim": self.dim,
            "lambda_max": self.lambda_max,
            "cut": self.cut,
            "next_eigenvalue": self.next_eigenvalue,
            "gap": self.gap,
            "max_joint_residual": float(self.joint_residual.max()) if self.dim else 0.0,
        }


def harmonic_basis(c, tol=1e-8, box=None):
    """Eigenvectors of ``box1`` with eigenvalue below ``tol * lambda_max``.

    Problems with at most ``DENSE_LIMIT`` unknowns use a dense Hermitian
    eigensolver; larger ones use
    shift-invert Lanczos, growing the number of requested eigenpairs until
    one lands above the cut.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    box = discrete_box1(c) if box is None else box
    n = box.shape[0]
    if n <= DENSE_LIMIT:
        w, v = scipy.linalg.eigh(box.toarray())
        lam_max = float(w[-1])
        cut = tol * lam_max
        d = int(np.searchsorted(w, cut))
        vecs, vals = v[:, :d], w[:d]
        nxt = float(w[d]) if d < n else np.inf
    else:
        vecs, vals, lam_max, cut, nxt = _sparse_kernel(box, tol)
    resid = np.array(
        [
            np.linalg.norm(c.A0.conj().T @ vecs[:, i]) + np.linalg.norm(c.A1 @ vecs[:, i])
            for i in range(vecs.shape[1])
        ]
    )
    logger.debug("harmonic dim %d, cut %.3e, next %.3e", vecs.shape[1], cut, nxt)
    return HarmonicBasis(vecs, vals, lam_max, cut, nxt, resid)


def _start_vector(n):
    # fixed ARPACK start vector keeps repeated runs bit-identical
    rng = np.random.default_rng(12345)
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def _sparse_kernel(box, tol):
    try:
        lam_max = float(
            spla.eigsh(
                box, k=1, which="LA", v0=_start_vector(box.shape[0]), return_eigenvectors=False
            )[0]
        )
    except spla.ArpackNoConvergence as exc:
        raise SolverError("largest-eigenvalue estimate did not converge") from exc
    cut = tol * lam_max
    n = box.shape[0]
    start = _start_vector(n)
    nev = 16
    history = []
    while True:
        nev = min(nev, n - 2)
        try:
            w, v = spla.eigsh(box, k=nev, sigma=-1e-6 * lam_max, which="LM", v0=start)
        except spla.ArpackNoConvergence as exc:
            raise SolverError("shift-invert Lanczos did not converge", history) from exc
        order = np.argsort(w)
        w, v = w[order], v[:, order]
        history.append((nev, float(w[-1])))
        d = int(np.searchsorted(w, cut))
        if d < len(w):
            return v[:, :d], w[:d], lam_max, cut, float(w[d])
        if nev >= n - 2:
            raise SolverError("kernel dimension exceeds the Lanczos budget", history)
        nev *= 2


@dataclass
class CGResult:
    u: np.ndarray
    residual: float
    iterations: int
    history: list


def solve_box1(c, f, tol=1e-10, basis=None, maxiter=None, box=None):
    """Solve ``box1 u = f - P f`` with ``u`` orthogonal to the harmonic space.

    Conjugate gradients run on the deflated operator ``(I - P) box1 (I - P)``.
    ``f`` may be a level-1 :class:`Field` or a vector.  Returns a
    :class:`CGResult`; raises :class:`SolverError` if the residual target
    ``tol * |f|`` is not met.
    """
    box = discrete_box1(c) if box is None else box
    basis = harmonic_basis(c, box=box) if basis is None else basis
    vec = c.to_vector(f) if isinstance(f, Field) else np.asarray(f, dtype=complex)
    fnorm = float(np.linalg.norm(vec))
    if fnorm == 0:
        return CGResult(np.zeros_like(vec), 0.0, 0, [])
    rhs = vec - basis.project(vec)
    target = tol * fnorm

    def deflate(x):
        return x - basis.project(x)

    op = spla.LinearOperator(box.shape, matvec=lambda x: deflate(box @ deflate(x)), dtype=complex)
    history = []

    def record(xk):
        history.append(float(np.linalg.norm(op.matvec(xk) - rhs)))

    maxiter = maxiter if maxiter is not None else 10 * box.shape[0]
    if np.linalg.norm(rhs) <= target:
        u = np.zeros_like(rhs)
    else:
        u, info = spla.cg(op, rhs, rtol=0.0, atol=0.5 * target, maxiter=maxiter, callback=record)
        if info < 0:
            raise SolverError("conjugate gradients broke down", history)
        u = deflate(u)
    residual = float(np.linalg.norm(box @ u - rhs))
    if residual > target:
        raise SolverError(f"CG stagnated at residual {residual:.3e} > {target:.3e}", history)
    return CGResult(u, residual, len(history), history)


@dataclass
class GridHodgeResult:
    exact: np.ndarray
    coexact: np.ndarray
    harmonic: np.ndarray
    potential: np.ndarray  # N1 f

    def parts(self):
        return self.exact, self.coexact, self.harmonic

    def gram(self):
        p = self.parts()
        return np.array([[np.vdot(b, a) for b in p] for a in p])


def hodge_decompose_grid(c, f, tol=1e-10, basis=None):
    """``f = A0 A0^H N1 f + A1^H A1 N1 f + P f`` on level-1 fields."""
    box = discrete_box1(c)
    basis = harmonic_basis(c, box=box) if basis is None else basis
    vec = c.to_vector(f) if isinstance(f, Field) else np.asarray(f, dtype=complex)
    u = solve_box1(c, vec, tol=tol, basis=basis, box=box).u
    a0, a1 = c.A0, c.A1
    exact = a0 @ (a0.conj().T @ u)
    coexact = a1.conj().T @ (a1 @ u)
    return GridHodgeResult(exact, coexact, basis.project(vec), u)


@dataclass
class D0GridSolution:
    u: np.ndarray
    residual: float
    constant: float  # residual / (tol |f|)
    norm_ratio: float  # |u| / |f|


def solve_d0_grid(c, f, tol=1e-10, basis=None):
    """``u = A0^H N1 f`` for ``f`` with ``A1 f = 0`` and ``P f = 0``.

    Raises :class:`CompatibilityError` or :class:`OrthogonalityError` when
    the measured relative violation exceeds ``tol``.
    """
    box = discrete_box1(c)
    basis = harmonic_basis(c, box=box) if basis is None else basis
    vec = c.to_vector(f) if isinstance(f, Field) else np.asarray(f, dtype=complex)
    fnorm = float(np.linalg.norm(vec))
    if fnorm == 0:
        return D0GridSolution(np.zeros(c.A0.shape[1], dtype=complex), 0.0, 0.0, 0.0)
    compat = float(np.linalg.norm(c.A1 @ vec)) / fnorm
    if compat > tol:
        raise CompatibilityError(f"|A1 f| / |f| = {compat:.3e} exceeds {tol:g}", compat)
    harm = float(np.linalg.norm(basis.project(vec))) / fnorm
    if harm > tol:
        raise OrthogonalityError(f"|P f| / |f| = {harm:.3e} exceeds {tol:g}", harm)
    n1f = solve_box1(c, vec, tol=tol, basis=basis, box=box).u
    u = c.A0.conj().T @ n1f
    residual = float(np.linalg.norm(c.A0 @ u - vec))
    return D0GridSolution(u, residual, residual / (tol * fnorm), float(np.linalg.norm(u)) / fnorm)


def d1_surjectivity(c):
    """Smallest eigenvalue of ``A1 A1^H`` relative to the largest.

    Positive means the discrete ``A1`` is onto level-2 fields.
    """
    gram = (c.A1 @ c.A1.conj().T).toarray()
    w = np.linalg.eigvalsh(gram)
    return float(w[0] / w[-1])


def solve_d1_grid(c, Psi, tol=1e-10):
    """Minimum-norm ``psi = A1^H (A1 A1^H)^{-1} Psi`` on level-1 fields.

    ``A1 A1^H`` is positive definite whenever the discrete ``A1`` is onto,
    which :func:`d1_surjectivity` reports.  Returns ``(psi, residual)`` with
    the residual ``|A1 psi - Psi|``.
    """
    vec = c.to_vector(Psi) if isinstance(Psi, Field) else np.asarray(Psi, dtype=complex)
    norm = float(np.linalg.norm(vec))
    if norm == 0:
        return np.zeros(c.A1.shape[1], dtype=complex), 0.0
    gram = (c.A1 @ c.A1.conj().T).tocsr()
    history = []
    x, info = spla.cg(
        gram,
        vec,
        rtol=0.0,
        atol=0.5 * tol * norm,
        maxiter=10 * gram.shape[0],
        callback=lambda xk: history.append(float(np.linalg.norm(gram @ xk - vec))),
    )
    psi = c.A1.conj().T @ x
    residual = float(np.linalg.norm(c.A1 @ psi - vec))
    if info != 0 or residual > tol * norm:
        raise SolverError(f"A1 A1^H solve reached residual {residual:.3e}", history)
    return psi, residual
