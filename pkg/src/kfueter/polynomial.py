"""Exactness of the complex on polynomial data.

A :class:`PolyField` is an ``m``-component vector of complex polynomials in
``(x0, x1, x2, x3)``.  Because every operator here is homogeneous of degree
one, the problem ``D0 phi = psi`` splits by degree: the degree-``d`` part of
``psi`` only sees the degree-``d+1`` part of ``phi``.  Each piece is a small
dense linear system over monomial coefficients.
"""
import json
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np
import scipy.linalg

from .errors import CompatibilityError, ExactnessViolation, ShapeError
from .operators import build_d0, build_d1


@lru_cache(maxsize=None)
def homogeneous_monomials(d):
    """Exponent tuples ``(a0, a1, a2, a3)`` with ``sum == d``, in a fixed order."""
    if d < 0:
        return ()
    out = []
    for combo in combinations_with_replacement(range(4), d):
        a = [0, 0, 0, 0]
        for m in combo:
            a[m] += 1
        out.append(tuple(a))
    return tuple(sorted(out, reverse=True))


@dataclass
class PolyField:
    m: int
    degree: int
    components: list = field(default=None)  # list of {exponent tuple: complex}

    def __post_init__(self):
        if self.components is None:
            self.components = [{} for _ in range(self.m)]
        if len(self.components) != self.m:
            raise ShapeError(f"expected {self.m} components, got {len(self.components)}")
        clean = []
        for comp in self.components:
            c = {}
            for a, v in comp.items():
                a = tuple(int(x) for x in a)
                if len(a) != 4 or min(a) < 0:
                    raise ValueError(f"bad exponent {a}")
                if sum(a) > self.degree:
                    raise ValueError(f"monomial {a} exceeds degree bound {self.degree}")
                if v != 0:
                    c[a] = complex(v)
            clean.append(c)
        self.components = clean

    @classmethod
    def zeros(cls, m, degree):
        return cls(m, degree)

    @classmethod
    def random(cls, m, degree, rng):
        """Dense random field with standard complex normal coefficients."""
        comps = []
        for _ in range(m):
            comp = {}
            for d in range(degree + 1):
                for a in homogeneous_monomials(d):
                    comp[a] = complex(rng.standard_normal(), rng.standard_normal())
            comps.append(comp)
        return cls(m, degree, comps)

    def homogeneous_part(self, d):
        """Stacked coefficient vector of the degree-``d`` part (component-major)."""
        mons = homogeneous_monomials(d)
        out = np.zeros(self.m * len(mons), dtype=complex)
        index = {a: i for i, a in enumerate(mons)}
        for c, comp in enumerate(self.components):
            for a, v in comp.items():
                if sum(a) == d:
                    out[c * len(mons) + index[a]] = v
        return out

    def set_homogeneous_part(self, d, vec):
        mons = homogeneous_monomials(d)
        vec = np.asarray(vec).reshape(self.m, len(mons))
        for c in range(self.m):
            comp = self.components[c]
            for a in mons:
                comp.pop(a, None)
            for a, v in zip(mons, vec[c]):
                if v != 0:
                    comp[a] = complex(v)

    def coefficient_vector(self):
        return np.concatenate([self.homogeneous_part(d) for d in range(self.degree + 1)])

    def norm(self):
        return float(np.linalg.norm(self.coefficient_vector()))

    def __call__(self, x):
        """Evaluate at a point ``x`` of R^4 (or C^4)."""
        x = np.asarray(x)
        return np.array(
            [sum(v * np.prod(x ** np.array(a)) for a, v in comp.items()) for comp in self.components],
            dtype=complex,
        )

    def __sub__(self, other):
        if other.m != self.m:
            raise ShapeError("component count mismatch")
        deg = max(self.degree, other.degree)
        comps = []
        for a, b in zip(self.components, other.components):
            c = dict(a)
            for key, v in b.items():
                c[key] = c.get(key, 0) - v
            comps.append(c)
        return PolyField(self.m, deg, comps)

    def to_json(self):
        return {
            "m": self.m,
            "degree": self.degree,
            "components": [
                [
                    {"monomial": list(a), "re": v.real, "im": v.imag}
                    for a, v in sorted(comp.items(), key=lambda t: (sum(t[0]), t[0]))
                ]
                for comp in self.components
            ],
        }

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        comps = [
            {tuple(t["monomial"]): complex(t["re"], t["im"]) for t in terms}
            for terms in data["components"]
        ]
        return cls(data["m"], data["degree"], comps)


def apply_poly(op, p):
    """Apply a first-order operator to a polynomial field exactly."""
    if op.cols != p.m:
        raise ShapeError(f"operator has {op.cols} columns, field has {p.m} components")
    out = [{} for _ in range(op.rows)]
    for j, comp in enumerate(p.components):
        for a, v in comp.items():
            for mvar in range(4):
                if a[mvar] == 0:
                    continue
                da = list(a)
                da[mvar] -= 1
                da = tuple(da)
                scale = a[mvar] * v
                for i in range(op.rows):
                    c = op.coeffs[i, j, mvar]
                    if c != 0:
                        out[i][da] = out[i].get(da, 0) + c * scale
    return PolyField(op.rows, max(p.degree - 1, 0), out)


def degree_matrix(op, d):
    """Matrix of ``op`` from degree-``d`` homogeneous fields to degree ``d-1``.

    Columns are indexed by (input component, monomial), rows by (output
    component, monomial), both component-major as in
    :meth:`PolyField.homogeneous_part`.
    """
    src = homogeneous_monomials(d)
    dst = homogeneous_monomials(d - 1)
    dst_index = {a: i for i, a in enumerate(dst)}
    ns, nd = len(src), len(dst)
    mat = np.zeros((op.rows * nd, op.cols * ns), dtype=complex)
    for col_mon, a in enumerate(src):
        for mvar in range(4):
            if a[mvar] == 0:
                continue
            da = list(a)
            da[mvar] -= 1
            r = dst_index[tuple(da)]
            for i in range(op.rows):
                for j in range(op.cols):
                    c = op.coeffs[i, j, mvar]
                    if c != 0:
                        mat[i * nd + r, j * ns + col_mon] += a[mvar] * c
    return mat


def solve_d0_poly(k, psi, tol=1e-10):
    """Polynomial ``phi`` with ``D0 phi = psi`` for compatible ``psi``.

    Each degree is solved by minimum-norm least squares.  Raises
    :class:`CompatibilityError` when ``D1 psi != 0`` and
    :class:`ExactnessViolation` if the residual exceeds ``tol`` (relative to
    ``max(1, |psi|)``).
    """
    d0, d1 = build_d0(k), build_d1(k)
    if psi.m != d0.rows:
        raise ShapeError(f"expected a {d0.rows}-component field, got {psi.m}")
    scale = max(1.0, psi.norm())
    compat = apply_poly(d1, psi).norm()
    if compat > tol * scale:
        raise CompatibilityError(
            f"D1 psi has norm {compat:.3e}; psi is not in the kernel of D1", compat / scale
        )
    phi = PolyField(d0.cols, psi.degree + 1)
    for d in range(psi.degree + 1):
        rhs = psi.homogeneous_part(d)
        if not np.any(rhs):
            continue
        mat = degree_matrix(d0, d + 1)
        sol = scipy.linalg.lstsq(mat, rhs, lapack_driver="gelsd")[0]
        phi.set_homogeneous_part(d + 1, sol)
    residual = (apply_poly(d0, phi) - psi).norm()
    if residual > tol * scale:
        raise ExactnessViolation(f"D0 phi - psi has norm {residual:.3e}")
    return phi


def exactness_dimensions(k, d, rtol=1e-10):
    """Dimension bookkeeping of ``ker D1`` vs ``im D0`` in degree ``d``.

    Returns a dict with ``dim_ker_d1`` (on degree-``d`` fields), ``rank_d0``
    (image of degree-``d+1`` fields) and ``product_norm`` of the composed
    coefficient matrices.  Exactness at degree ``d`` means the two
    dimensions agree (the product vanishing gives the inclusion).
    """
    m1 = degree_matrix(build_d1(k), d)
    m0 = degree_matrix(build_d0(k), d + 1)
    n_cols = m1.shape[1]
    rank1 = np.linalg.matrix_rank(m1, tol=_rank_tol(m1, rtol)) if m1.size else 0
    rank0 = np.linalg.matrix_rank(m0, tol=_rank_tol(m0, rtol))
    prod = m1 @ m0 if m1.size else np.zeros((0, m0.shape[1]))
    return {
        "k": k,
        "degree": d,
        "dim_ker_d1": int(n_cols - rank1),
        "rank_d0": int(rank0),
        "product_norm": float(np.abs(prod).max()) if prod.size else 0.0,
    }


def _rank_tol(mat, rtol):
    s = np.linalg.norm(mat, 2) if mat.size else 0.0
    return max(rtol * s, 1e-300)
