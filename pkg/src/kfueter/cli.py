"""Command line front end: ``kfueter ops print | check | solve | bvp box``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
errors and 3 for unreadable or unwritable files.  ``FH_THREADS`` caps the
threads used by the BLAS and LAPACK backends.
"""
import argparse
import contextlib
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import bvp, checks, fieldio, torus
from . import operators as ops
from .conventions import check_k
from .errors import CompatibilityError, DomainError, KFueterError, MeanModeError, OrthogonalityError
from .grids import BoxGrid, Field, TorusGrid

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class FieldFileError(Exception):
    pass


def _read_input(path):
    try:
        return fieldio.read_field(path)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise FieldFileError(f"cannot read field file {path}: {exc}") from exc


def parse_k_range(text):
    """``"3"``, ``"2..8"`` or ``"2,4,5"`` to a list of ints, each at least 2."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            ks = list(range(int(lo), int(hi) + 1))
        else:
            ks = [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse k range {text!r}") from exc
    if not ks or min(ks) < 2:
        raise UsageError(f"k must be at least 2, got {text!r}")
    return ks


def _threads():
    value = os.environ.get("FH_THREADS")
    if not value:
        return contextlib.nullcontext()
    from threadpoolctl import threadpool_limits

    return threadpool_limits(limits=int(value))


def make_report(command, parameters, results, seed, wall_time, **extra):
    report = {
        "command": command,
        "parameters": parameters,
        "seed": seed,
        "checks": [r.to_json() for r in results],
        "passed": all(r.passed for r in results),
        "wall_time": wall_time,
    }
    report.update(extra)
    return report


def dump_report(report):
    return json.dumps(_jsonable(report), sort_keys=True, indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if np.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def _emit(report, out):
    text = dump_report(report)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


# ---------------------------------------------------------------- ops print


def cmd_ops_print(args):
    k = args.k
    if k < 2:
        raise UsageError("k must be at least 2")
    d0, d1 = ops.build_d0(k), ops.build_d1(k)
    table = {
        "d0": d0,
        "d1": d1,
        "d0_adjoint": ops.formal_adjoint(d0),
        "d1_adjoint": ops.formal_adjoint(d1),
        "box0": ops.box0(k),
        "box1": ops.box1(k),
        "box2": ops.box2(k),
    }
    if args.format == "json":
        print(json.dumps({"k": k, "operators": {n: ops.operator_to_json(o) for n, o in table.items()}},
                         sort_keys=True))
    else:
        blocks = [f"{name} (k={k})\n{ops.format_operator(op, args.basis)}" for name, op in table.items()]
        print("\n\n".join(blocks))
    return EXIT_OK


# ------------------------------------------------------------------- check


def cmd_check(args):
    ks = parse_k_range(args.k)
    results, elapsed = checks.run_suite(args.suite, ks, samples=args.samples, seed=args.seed)
    params = {"suite": args.suite, "k": ks, "samples": args.samples}
    report = make_report("check", params, results, args.seed, elapsed)
    return _emit(report, args.out)


# ------------------------------------------------------------------- solve


def _error_entry(exc, tol):
    name = {CompatibilityError: "compatibility", OrthogonalityError: "orthogonality",
            MeanModeError: "mean_mode"}.get(type(exc), type(exc).__name__)
    violation = getattr(exc, "violation", None)
    return checks.CheckResult(name, False, float(violation) if violation is not None else np.inf,
                              tol, None, {"error": str(exc)})


def _input_field(args, grid, level, m, exact_builder):
    """Read ``--input`` or build a seeded fixture (``exact_builder(rng)`` when given)."""
    if args.input:
        f = _read_input(args.input)
        if f.m != m or f.grid != grid or f.level != level:
            raise UsageError(
                f"input field (m={f.m}, grid={f.grid}, level={f.level}) does not match "
                f"the task (m={m}, grid={grid}, level={level})"
            )
        return f, {"input": str(args.input)}
    rng = np.random.default_rng(args.seed)
    if exact_builder is not None:
        return exact_builder(rng), {"input": "generated", "fixture": "exact"}
    mean_zero = grid.kind == "torus"
    return Field.random(grid, m, rng, level=level, mean_zero=mean_zero), {
        "input": "generated", "fixture": "random"}


def _write_fields(path, fields):
    if not path:
        return
    path = Path(path)
    if len(fields) == 1:
        fieldio.write_field(next(iter(fields.values())), path)
        return
    for name, f in fields.items():
        fieldio.write_field(f, path.with_name(f"{path.stem}_{name}{path.suffix}"))


def _solve_torus(args, k, tol):
    grid = TorusGrid(args.n, args.period)
    results, fields, extra = [], {}, {}
    if args.task == "d0":
        def exact(rng):
            g = Field.random(grid, k + 1, rng, mean_zero=True)
            return torus.apply_op(ops.build_d0(k), g)
        f, meta = _input_field(args, grid, 0, 2 * k, exact)
        u = torus.solve_d0_torus(k, f, tol=tol)
        res = (torus.apply_op(ops.build_d0(k), u) - f).norm() / max(f.norm(), 1e-300)
        results.append(checks._le("residual", res, 10 * tol, k))
        fields["solution"] = u
    elif args.task == "d1":
        f, meta = _input_field(args, grid, 0, k - 1, None)
        psi = torus.solve_d1_torus(k, f, tol=tol)
        res = (torus.apply_op(ops.build_d1(k), psi) - f).norm() / max(f.norm(), 1e-300)
        results.append(checks._le("residual", res, 10 * tol, k))
        fields["solution"] = psi
    elif args.task == "box1":
        f, meta = _input_field(args, grid, 0, 2 * k, None)
        u = torus.box1_inverse(k, f)
        hod = torus.hodge_decompose(k, f)
        lhs = torus.apply_op(ops.box1(k), u)
        res = (lhs - (f - hod.harmonic_part)).norm() / max(f.norm(), 1e-300)
        results.append(checks._le("residual", res, 10 * tol, k))
        fields["solution"] = u
    else:
        f, meta = _input_field(args, grid, 0, 2 * k, None)
        hod = torus.hodge_decompose(k, f)
        fn = max(f.norm(), 1e-300)
        results.append(checks._le("reconstruction", hod.reconstruction_error(f) / fn, 10 * tol, k))
        gram = hod.gram()
        off = np.abs(gram - np.diag(np.diag(gram))).max() / fn**2
        results.append(checks._le("orthogonality", off, 10 * tol, k))
        extra["orthogonality_matrix"] = (gram / fn**2).tolist()
        fields = {"exact": hod.exact_part, "coexact": hod.coexact_part, "harmonic": hod.harmonic_part}
    return results, fields, dict(extra, **meta)


def _solve_box(args, k, tol):
    grid = BoxGrid(args.n, args.h)
    c = bvp.assemble(k, grid)
    basis = bvp.harmonic_basis(c)
    results, fields = [], {}
    extra = {"harmonic": basis.summary()}
    if args.task == "d0":
        def exact(rng):
            g = Field.random(grid, k + 1, rng, level=0)
            vec = c.A0 @ c.to_vector(g)
            return c.to_field(vec - basis.project(vec), 1)
        f, meta = _input_field(args, grid, 1, 2 * k, exact)
        sol = bvp.solve_d0_grid(c, f, tol=tol, basis=basis)
        fn = max(f.norm(), 1e-300)
        results.append(checks._le("residual", sol.residual / fn, 1e3 * tol, k,
                                  constant=sol.constant, norm_ratio=sol.norm_ratio))
        fields["solution"] = c.to_field(sol.u, 0)
    elif args.task == "d1":
        f, meta = _input_field(args, grid, 2, k - 1, None)
        psi, res = bvp.solve_d1_grid(c, f, tol=tol)
        results.append(checks._le("residual", res / max(f.norm(), 1e-300), tol, k))
        fields["solution"] = c.to_field(psi, 1)
    elif args.task == "box1":
        f, meta = _input_field(args, grid, 1, 2 * k, None)
        cg = bvp.solve_box1(c, f, tol=tol, basis=basis)
        results.append(checks._le("residual", cg.residual / max(f.norm(), 1e-300), tol, k,
                                  iterations=cg.iterations))
        fields["solution"] = c.to_field(cg.u, 1)
    else:
        f, meta = _input_field(args, grid, 1, 2 * k, None)
        results_h, fields, extra_h = _box_hodge(c, f, tol, basis)
        results += results_h
        extra.update(extra_h)
    return results, fields, dict(extra, **meta)


def _box_hodge(c, f, tol, basis):
    vec = c.to_vector(f)
    fn = max(float(np.linalg.norm(vec)), 1e-300)
    hod = bvp.hodge_decompose_grid(c, vec, tol=tol, basis=basis)
    recon = float(np.linalg.norm(sum(hod.parts()) - vec)) / fn
    gram = hod.gram()
    off = float(np.abs(gram - np.diag(np.diag(gram))).max()) / fn**2
    results = [
        checks._le("reconstruction", recon, 10 * tol, c.k),
        checks._le("orthogonality", off, 10 * tol, c.k),
    ]
    fields = {name: c.to_field(v, 1) for name, v in zip(("exact", "coexact", "harmonic"), hod.parts())}
    return results, fields, {"orthogonality_matrix": (gram / fn**2).tolist()}


def cmd_solve(args):
    k = check_k(args.k)
    start = time.perf_counter()
    params = {"domain": args.domain, "task": args.task, "k": k, "n": args.n, "tol": args.tol}
    params.update({"period": args.period} if args.domain == "torus" else {"h": args.h})
    try:
        runner = _solve_torus if args.domain == "torus" else _solve_box
        results, fields, extra = runner(args, k, args.tol)
    except (CompatibilityError, OrthogonalityError, MeanModeError) as exc:
        results, fields, extra = [_error_entry(exc, args.tol)], {}, {}
    _write_fields(args.field_out, fields)
    report = make_report("solve", params, results, args.seed, time.perf_counter() - start, **extra)
    return _emit(report, args.out)


def cmd_bvp_box(args):
    """Discrete complex diagnostics and a Hodge split on the box grid."""
    k = check_k(args.k)
    start = time.perf_counter()
    grid = BoxGrid(args.n, args.h)
    c = bvp.assemble(k, grid)
    rng = np.random.default_rng(args.seed)
    tol = args.tol
    box = bvp.discrete_box1(c)
    basis = bvp.harmonic_basis(c, box=box)
    results = []

    phi = rng.standard_normal(c.A0.shape[1]) + 1j * rng.standard_normal(c.A0.shape[1])
    results.append(checks._le("a1_a0_zero", np.linalg.norm(c.A1 @ (c.A0 @ phi)) / np.linalg.norm(phi),
                              1e-13, k))
    u = rng.standard_normal(box.shape[0]) + 1j * rng.standard_normal(box.shape[0])
    v = rng.standard_normal(box.shape[0]) + 1j * rng.standard_normal(box.shape[0])
    herm = abs(np.vdot(v, box @ u) - np.vdot(box @ v, u)) / (np.linalg.norm(u) * np.linalg.norm(v))
    results.append(checks._le("box1_hermitian", herm, 1e-13, k))
    quad = np.vdot(u, box @ u).real
    results.append(checks.CheckResult("box1_psd", quad >= 0, float(quad), 0.0, k))
    joint = float(basis.joint_residual.max()) if basis.dim else 0.0
    results.append(checks._le("harmonic_joint_kernel", joint, np.sqrt(basis.cut / basis.lambda_max), k))

    if args.input:
        f = _read_input(args.input)
        if f.grid != grid or f.level != 1 or f.m != 2 * k:
            raise UsageError("input must be a level-1 box field with 2k components on the given grid")
        source = str(args.input)
    else:
        f = Field.random(grid, 2 * k, rng, level=1)
        source = "generated"
    hres, fields, extra = _box_hodge(c, f, tol, basis)
    results += hres

    g = rng.standard_normal(c.A0.shape[1]) + 1j * rng.standard_normal(c.A0.shape[1])
    rhs = c.A0 @ g
    rhs -= basis.project(rhs)
    sol = bvp.solve_d0_grid(c, rhs, tol=tol, basis=basis)
    results.append(checks._le("d0_round_trip", sol.residual / np.linalg.norm(rhs), 1e3 * tol, k,
                              constant=sol.constant, norm_ratio=sol.norm_ratio))
    _write_fields(args.field_out, fields)
    params = {"k": k, "n": args.n, "h": args.h, "tol": tol, "input": source}
    report = make_report(
        "bvp box", params, results, args.seed, time.perf_counter() - start,
        harmonic=basis.summary(), d1_surjectivity=bvp.d1_surjectivity(c),
        sizes=list(c.sizes), **extra,
    )
    return _emit(report, args.out)


# ------------------------------------------------------------------ parser


def build_parser():
    p = argparse.ArgumentParser(prog="kfueter", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    p_ops = sub.add_parser("ops", help="operator rendering")
    ops_sub = p_ops.add_subparsers(dest="action", required=True)
    pp = ops_sub.add_parser("print", help="print D0, D1, adjoints and the three Laplacians")
    pp.add_argument("--k", type=int, required=True)
    pp.add_argument("--format", choices=("text", "json"), default="text")
    pp.add_argument("--basis", choices=("z", "x"), default="z")
    pp.set_defaults(func=cmd_ops_print)

    pc = sub.add_parser("check", help="run a verification suite")
    pc.add_argument("suite", choices=checks.SUITES)
    pc.add_argument("--k", default="2..8", help='single k, range "2..8" or list "2,3"')
    pc.add_argument("--samples", type=int, default=None)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_check)

    ps = sub.add_parser("solve", help="solve on the torus or the box grid")
    ps.add_argument("--domain", choices=("torus", "box"), required=True)
    ps.add_argument("--task", choices=("d0", "d1", "box1", "hodge"), required=True)
    ps.add_argument("--k", type=int, required=True)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--period", type=float, default=2 * np.pi)
    ps.add_argument("--h", type=float, default=1.0)
    ps.add_argument("--input", default=None, help="field file (JSON or binary); seeded fixture if omitted")
    ps.add_argument("--tol", type=float, default=1e-10)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--out", default=None)
    ps.add_argument("--field-out", default=None)
    ps.set_defaults(func=cmd_solve)

    pb = sub.add_parser("bvp", help="discrete boundary value problems")
    b_sub = pb.add_subparsers(dest="domain", required=True)
    pbb = b_sub.add_parser("box", help="discrete complex diagnostics and Hodge split on a box")
    pbb.add_argument("--k", type=int, required=True)
    pbb.add_argument("--n", type=int, required=True)
    pbb.add_argument("--h", type=float, default=1.0)
    pbb.add_argument("--input", default=None)
    pbb.add_argument("--tol", type=float, default=1e-10)
    pbb.add_argument("--seed", type=int, default=0)
    pbb.add_argument("--out", default=None)
    pbb.add_argument("--field-out", default=None)
    pbb.set_defaults(func=cmd_bvp_box)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        with _threads():
            return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldFileError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KFueterError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
