"""Verification suites shared by the command line and the acceptance tests.

Each suite returns a list of :class:`CheckResult`.  Every numeric entry
carries the tolerance it was judged against, and failures keep the data
needed to replay the instance (``k``, ``nu``, ``xi``, seed).
"""
import time
from dataclasses import dataclass, field

import numpy as np

from . import operators as ops
from .errors import KFueterError
from .lopatinskii import SLInstance, lambda_coupling, sl_direct_check, sl_reduced_nonsingular
from .polynomial import PolyField, apply_poly, exactness_dimensions, solve_d0_poly
from .symbols import (
    boundary_conditions,
    check_symbol_exactness,
    ellipticity_check,
    expected_normal_conditions,
    zeta,
    zeta_block_det,
)

SUITES = ("complex", "laplacian", "symbol", "sl", "poly", "boundary")


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    k: int = None
    details: dict = field(default_factory=dict)

    def to_json(self):
        out = {"name": self.name, "passed": bool(self.passed), "value": self.value, "tol": self.tol}
        if self.k is not None:
            out["k"] = self.k
        if self.details:
            out["details"] = self.details
        return out


def _le(name, value, tol, k=None, **details):
    return CheckResult(name, bool(value <= tol), float(value), float(tol), k, details)


def _exact(name, a, b, k=None):
    """Exact operator equality; ``value`` is the largest coefficient difference."""
    diff = float(np.abs(a.coeffs - b.coeffs).max()) if a.shape == b.shape else np.inf
    return CheckResult(name, a == b, diff, 0.0, k)


def unit_vector(rng):
    v = rng.standard_normal(4)
    return v / np.linalg.norm(v)


# ----------------------------------------------------------------- suites


def suite_complex(ks, **_):
    out = []
    for k in ks:
        prod = ops.compose(ops.build_d1(k), ops.build_d0(k))
        out.append(
            CheckResult("d1_d0_zero", prod.is_zero(), float(np.abs(prod.coeffs).max()), 0.0, k)
        )
    return out


def box1_k2_block_form():
    """The k = 2 Laplacian in block form: ``-[[D+D1, L, 0, 0], [Lb, D+D2, 0, 0], ...]``."""
    p = ops.laplacian_parts()
    z = np.zeros((4, 4), dtype=complex)
    rows = [
        [p["Delta"] + p["Delta1"], p["L"], z, z],
        [p["Lbar"], p["Delta"] + p["Delta2"], z, z],
        [z, z, p["Delta"] + p["Delta2"], -p["L"]],
        [z, z, -p["Lbar"], p["Delta"] + p["Delta1"]],
    ]
    return ops.SecondOrderOperator(-np.array(rows))


def _diag_operator(entries):
    n = len(entries)
    c = np.zeros((n, n, 4, 4), dtype=complex)
    for i, e in enumerate(entries):
        c[i, i] = e
    return ops.SecondOrderOperator(c)


def suite_laplacian(ks, **_):
    lap = ops.laplacian_parts()["Delta"]
    out = []
    for k in ks:
        out.append(_exact("box1_closed_form", ops.box1(k), ops.box1_closed_form(k), k))
        out.append(_exact("box2_minus_2_delta", ops.box2(k), _diag_operator([-2 * lap] * (k - 1)), k))
        if k == 2:
            out.append(_exact("box1_k2_block_form", ops.box1(2), box1_k2_block_form(), 2))
            out.append(_exact("box0_k2", ops.box0(2), _diag_operator([-lap, -2 * lap, -lap]), 2))
    return out


def suite_symbol(ks, samples=1000, rng=None, tol=1e-10, **_):
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for k in ks:
        worst = {"product_norm": 0.0, "ker_im_gap": 0.0, "homogeneity": 0.0, "zeta_det": 0.0}
        lam_min = np.inf
        rank_ok = True
        failure = None
        for _ in range(samples):
            xi = unit_vector(rng)
            try:
                rep = check_symbol_exactness(k, xi, tol=tol)
                lam2 = ellipticity_check(k, 2 * xi)
            except KFueterError as exc:
                failure = {"xi": xi.tolist(), "error": str(exc)}
                rank_ok = False
                break
            rank_ok &= rep.rank_d0 == k + 1 and rep.rank_d1 == k - 1
            worst["product_norm"] = max(worst["product_norm"], rep.product_norm)
            worst["ker_im_gap"] = max(worst["ker_im_gap"], rep.ker_im_gap)
            worst["homogeneity"] = max(worst["homogeneity"], abs(lam2 / rep.lambda_min - 4) / 4)
            lam_min = min(lam_min, rep.lambda_min)
            z0, z1 = zeta(xi)
            ref = abs(z0) ** 2 + abs(z1) ** 2
            worst["zeta_det"] = max(worst["zeta_det"], abs(zeta_block_det(xi) - ref) / ref)
        extra = {"failure": failure} if failure else {}
        out.append(CheckResult("ranks", rank_ok, float(not rank_ok), 0.0, k, extra))
        out.append(_le("product_norm", worst["product_norm"], 1e-12, k))
        out.append(_le("ker_im_gap", worst["ker_im_gap"], tol, k))
        out.append(CheckResult("lambda_min_positive", lam_min > 0, lam_min, 0.0, k))
        out.append(_le("homogeneity_ratio", worst["homogeneity"], 1e-10, k))
        out.append(_le("zeta_det_identity", worst["zeta_det"], 1e-12, k))
    return out


def suite_sl(ks, samples=500, rng=None, tol=1e-6, **_):
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for k in ks:
        sigma_min = np.inf
        ratios = []
        k3_err = 0.0
        reduced_ok = direct_ok = True
        failure = None
        for _ in range(samples):
            inst = SLInstance.random(k, rng)
            try:
                red = sl_reduced_nonsingular(inst)
                direct = sl_direct_check(inst, tol=tol)
            except KFueterError as exc:
                failure = {"nu": list(inst.nu), "xi": list(inst.xi), "error": str(exc)}
                reduced_ok = direct_ok = False
                break
            ratios.append(red.lambda_ratio)
            reduced_ok &= red.nonsingular and abs(red.det) > 0
            direct_ok &= direct.regular and direct.decaying_dim == 2 * k
            if not direct.regular and failure is None:
                failure = {"nu": list(inst.nu), "xi": list(inst.xi), "sigma_min": direct.sigma_min}
            sigma_min = min(sigma_min, direct.sigma_min)
            if k == 3:
                x2 = inst.xi_norm**2
                ref = 4 * x2 - abs(lambda_coupling(inst)) ** 2
                k3_err = max(k3_err, abs(red.det - ref) / abs(ref))
        extra = {"failure": failure} if failure else {}
        out.append(CheckResult("reduced_pivots", reduced_ok, float(not reduced_ok), 0.0, k, extra))
        out.append(
            CheckResult(
                "direct_sigma_min",
                direct_ok,
                float(sigma_min),
                tol,
                k,
                dict(extra, lambda_ratio_min=float(min(ratios, default=np.nan)),
                     lambda_ratio_max=float(max(ratios, default=np.nan))),
            )
        )
        if k == 3:
            out.append(_le("k3_det_identity", k3_err, 1e-12, k))
    return out


def suite_poly(ks, rng=None, tol=1e-10, degree=3, **_):
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    for k in ks:
        d0 = ops.build_d0(k)
        phi0 = PolyField.random(k + 1, degree, rng)
        psi = apply_poly(d0, phi0)
        try:
            phi = solve_d0_poly(k, psi, tol=tol)
            residual = (apply_poly(d0, phi) - psi).norm()
        except KFueterError as exc:
            out.append(CheckResult("poly_round_trip", False, np.inf, tol, k, {"error": str(exc)}))
            continue
        out.append(_le("poly_round_trip", residual, tol, k))
        for d in range(degree + 1):
            dims = exactness_dimensions(k, d)
            ok = dims["dim_ker_d1"] == dims["rank_d0"] and dims["product_norm"] == 0
            out.append(
                CheckResult(
                    "kernel_image_dimensions",
                    ok,
                    float(dims["dim_ker_d1"] - dims["rank_d0"]),
                    0.0,
                    k,
                    {"degree": d, "dim_ker_d1": dims["dim_ker_d1"], "rank_d0": dims["rank_d0"]},
                )
            )
    return out


def suite_boundary(ks, **_):
    out = []
    for k in ks:
        bc = boundary_conditions(k, (1.0, 0.0, 0.0, 0.0))
        got = bc.reduced()
        want = _sympy_rref(expected_normal_conditions(k))
        ok = got == want and bc.Psi_dirichlet
        out.append(
            CheckResult("normal_conditions", ok, float(not ok), 0.0, k, {"conditions": bc.describe()})
        )
    return out


def _sympy_rref(rows):
    import sympy

    return sympy.Matrix(np.asarray(rows).real.astype(int).tolist()).rref()[0]


_RUNNERS = {
    "complex": suite_complex,
    "laplacian": suite_laplacian,
    "symbol": suite_symbol,
    "sl": suite_sl,
    "poly": suite_poly,
    "boundary": suite_boundary,
}


def run_suite(name, ks, samples=None, seed=0):
    """Run a suite and return ``(results, elapsed_seconds)``."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    kwargs = {"rng": np.random.default_rng(seed)}
    if samples is not None:
        kwargs["samples"] = samples
    start = time.perf_counter()
    results = _RUNNERS[name](list(ks), **kwargs)
    return results, time.perf_counter() - start
