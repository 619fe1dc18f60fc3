"""Command-line front end.

Every subcommand accepts ``--params FILE`` (JSON ``{"mu": [m1, m2], "sigma":
[s1, s2], "rho": r, "refl": [r1, r2]}``), ``--seed``, ``--out-dir``,
``--threads`` and ``--json``.  Files are written atomically into the output
directory (default: ``$RBMWEDGE_OUT_DIR`` or the working directory) together
with a ``manifest.json`` listing them.

Exit codes: 0 success, 1 usage error, 2 domain or validation error, 3 a
statistical check failed (some ``|z| > 3``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import platform
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .exceptions import RBMError
from .model import (DEFAULT_ASYMMETRIC, DEFAULT_SYMMETRIC, ModelParams,
                    is_symmetric, validate, wedge_angles)

OUT_DIR_ENV = "RBMWEDGE_OUT_DIR"
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_STATS = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


# ---------------------------------------------------------------------------
# output plumbing
# ---------------------------------------------------------------------------

def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _umask() -> int:
    mask = os.umask(0)
    os.umask(mask)
    return mask


def atomic_write(path: Path, data: str | bytes) -> Path:
    """Write to a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.chmod(tmp, 0o666 & ~_umask())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


@dataclass
class RunManifest:
    command: list
    params_hash: str
    seed: int
    versions: dict
    wall_time: float = 0.0
    outputs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _versions() -> dict:
    import numba
    import scipy
    import sklearn
    return {"rbmwedge": __version__, "python": platform.python_version(),
            "numpy": np.__version__, "scipy": scipy.__version__,
            "numba": numba.__version__, "scikit-learn": sklearn.__version__}


class Run:
    """Collects outputs of one invocation and writes the manifest."""

    def __init__(self, args, argv):
        self.args = args
        self.out_dir = Path(args.out_dir or os.environ.get(OUT_DIR_ENV, "."))
        self.manifest = RunManifest(list(argv), args.params_obj.digest(), args.seed, _versions())
        self.t0 = time.perf_counter()

    def path(self, name) -> Path:
        p = Path(name)
        return p if p.is_absolute() else self.out_dir / p

    def write(self, name, data) -> Path:
        p = atomic_write(self.path(name), data)
        self.manifest.outputs.append(str(p))
        return p

    def write_json(self, name, obj) -> Path:
        return self.write(name, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")

    def write_csv(self, name, header, rows) -> Path:
        return self.write(name, _csv_text(header, rows))

    def emit(self, obj, text: str | None = None) -> None:
        if self.args.json or text is None:
            print(json.dumps(_jsonable(obj), indent=2, sort_keys=True))
        else:
            print(text)

    def finish(self) -> None:
        if self.manifest.outputs:
            self.manifest.wall_time = time.perf_counter() - self.t0
            atomic_write(self.out_dir / "manifest.json",
                         json.dumps(_jsonable(self.manifest.to_dict()), indent=2) + "\n")


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def _parse_point(text: str) -> list:
    return [parse_complex(t) for t in text.split(",")]


def _sim_config(args):
    from .simulate import SimConfig
    kw = {"seed": args.seed}
    for name in ("h", "horizon", "replicas"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    if "horizon" in kw:
        kw["burn_in"] = min(SimConfig.burn_in, 0.05 * kw["horizon"])
    return SimConfig(**kw)


def _estimates(args):
    from .estimate import PathEstimates
    from .simulate import simulate_path
    return PathEstimates(simulate_path(args.params_obj, _sim_config(args)))


def _z_exit(reports) -> int:
    return EXIT_OK if all(r.passed for r in reports) else EXIT_STATS


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_params_check(run, args) -> int:
    P = args.params_obj
    rep = validate(P)
    sym = is_symmetric(P)
    out = {"params": P.to_dict(), "hash": P.digest(), "symmetric": sym,
           "recurrence": rep.to_dict(), "angles": asdict(wedge_angles(P)) if sym else None}
    run.emit(out)
    return EXIT_OK if rep.recurrent else EXIT_DOMAIN


def cmd_params_template(run, args) -> int:
    P = DEFAULT_SYMMETRIC if args.symmetric else DEFAULT_ASYMMETRIC
    print(json.dumps(P.to_dict(), indent=2))
    return EXIT_OK


def cmd_kernel_branch_points(run, args) -> int:
    from .kernel import branch_points
    kids = ["U", "V"] + (["SYM"] if is_symmetric(args.params_obj) else [])
    out = {f"{k}_{v}": branch_points(args.params_obj, k, v).to_dict()
           for k in kids for v in ("P", "Q")}
    run.emit(out)
    return EXIT_OK


def cmd_kernel_eval(run, args) -> int:
    from .kernel import branch_eval
    t = np.linspace(-args.span, args.span, args.grid)
    arg = 1j * t if args.axis == "imag" else t.astype(complex)
    b1 = branch_eval(args.params_obj, args.kernel, args.variable, 1, arg, check_cut=False)
    b2 = branch_eval(args.params_obj, args.kernel, args.variable, 2, arg, check_cut=False)
    rows = [(a.real, a.imag, x.real, x.imag, y.real, y.imag) for a, x, y in zip(arg, b1, b2)]
    p = run.write_csv(args.out, ["arg_re", "arg_im", "p1_re", "p1_im", "p2_re", "p2_im"], rows)
    run.emit({"out": str(p), "rows": len(rows)}, str(p))
    return EXIT_OK


def cmd_kernel_hyperbola(run, args) -> int:
    from .kernel import hyperbola
    kids = ["U", "V"] + (["SYM"] if is_symmetric(args.params_obj) else [])
    out = {}
    for k in kids:
        for v in ("P", "Q"):
            h = hyperbola(args.params_obj, k, v)
            d = h.to_dict()
            d.update({"vertices": h.vertices, "foci": h.foci})
            out[f"{k}_{v}"] = d
    run.emit(out)
    return EXIT_OK


def cmd_kernel_automorphy(run, args) -> int:
    from .kernel import check_automorphy
    P = args.params_obj if args.params else DEFAULT_SYMMETRIC
    out = check_automorphy(P, parse_complex(args.point))
    run.emit(out)
    return EXIT_OK if out["consistent"] else EXIT_DOMAIN


def cmd_simulate(run, args) -> int:
    from .simulate import SimConfig, simulate_path
    cfg = SimConfig(h=args.h or 1e-3, horizon=args.steps * (args.h or 1e-3), burn_in=0.0,
                    seed=args.seed, replicas=1, record_every=1, n_batches=2,
                    start=tuple(args.start))
    path = simulate_path(args.params_obj, cfg)
    z = path.states[0].astype(float)
    dl = path.dL[0].astype(float)
    t = path.times(0)
    if args.format == "raw":
        data = np.column_stack([t, z, dl]).astype("<f8").tobytes(order="C")
        p = run.write(args.out, data)
    else:
        p = run.write_csv(args.out, ["t", "z1", "z2", "dL1", "dL2"],
                          zip(t, z[:, 0], z[:, 1], dl[:, 0], dl[:, 1]))
    run.emit({"out": str(p), "steps": len(t), "L_total": path.L_total}, str(p))
    return EXIT_OK


def cmd_estimate_laplace(run, args) -> int:
    est = _estimates(args)
    pt = _parse_point(args.at)
    target = args.target
    if target in ("L1", "L2"):
        if len(pt) != 2:
            raise UsageError("L1/L2 need --at 'x,y'")
        e = est.L("S1" if target == "L1" else "S2", pt[0], pt[1])
    elif target in ("m", "n"):
        e = getattr(est, target)(pt[0])
    else:
        e = est.ell(int(target[-1]), pt[0])
    out = {"target": target, "at": pt, "value_re": e.value.real, "value_im": e.value.imag,
           "se_re": e.se[0], "se_im": e.se[1]}
    run.emit(out)
    return EXIT_OK


def cmd_estimate_density(run, args) -> int:
    from .estimate import estimate_density
    est = _estimates(args)
    g = estimate_density(est.path)
    p = run.write_csv(args.out, ["z1", "z2", "density", "se"], g.to_rows())
    run.emit({"out": str(p), "mass_in_window": g.mass()}, str(p))
    return EXIT_OK


def _load_points(spec: str):
    if Path(spec).exists():
        raw = json.loads(Path(spec).read_text())
        pts = []
        for item in raw:
            vals = [parse_complex(v) if isinstance(v, str) else complex(*v) if isinstance(v, list)
                    else complex(v) for v in item]
            pts.append(tuple(vals))
        return pts
    try:
        return int(spec)
    except ValueError:
        raise UsageError(f"--points must be a JSON file or a count, got {spec!r}") from None


def cmd_check_feq(run, args) -> int:
    from .feq import (bonferroni_note, check_feq_S1, check_feq_S2, check_feq_sum,
                      sum_domain_points)
    est = _estimates(args)
    pts = _load_points(args.points)
    eq = "sum" if args.sum else args.equation
    if isinstance(pts, int):
        if eq != "sum":
            raise UsageError("random points are only drawn for the summed equation; pass a file")
        pts = sum_domain_points(pts, seed=args.seed)
    fn = {"sum": check_feq_sum, "S1": check_feq_S1, "S2": check_feq_S2}[eq]
    reports = [fn(args.params_obj, est, x, y) for x, y in pts]
    out = [r.to_dict() for r in reports]
    if args.out:
        run.write_json(args.out, out)
    run.emit(out, "\n".join(f"z = {r.z:6.2f}  {'pass' if r.passed else 'FAIL'}" for r in reports)
             + "\n" + bonferroni_note(reports))
    return _z_exit(reports)


def cmd_check_bar(run, args) -> int:
    from .feq import TestFunction, check_bar
    est = _estimates(args)
    x, y = _parse_point(args.at)
    tf = TestFunction("exp", x, y, window=args.window)
    rep = check_bar(args.params_obj, est.path, tf)
    run.emit(rep.to_dict(), f"z = {rep.z:.2f}  {'pass' if rep.passed else 'FAIL'}")
    return _z_exit([rep])


def cmd_bvp_gmatrix(run, args) -> int:
    from .bvp import g_matrix
    G = g_matrix(args.params_obj, args.q)
    out = G.to_dict()
    out["abs_det"] = abs(G.det)
    run.emit(out)
    return EXIT_OK


def cmd_bvp_check(run, args) -> int:
    from .bvp import check_boundary_condition, cut_grid
    est = _estimates(args)
    ok, rejected = cut_grid(args.params_obj, est, args.cut_points)
    reports = [check_boundary_condition(args.params_obj, est, q) for q in ok]
    out = {"points": [r.to_dict() for r in reports],
           "rejected": [{"q": q, "reason": m} for q, m in rejected]}
    if args.out:
        run.write_json(args.out, out)
    run.emit(out, "\n".join(f"q = {r.q:9.4f}  z = {r.z:6.2f}  {'pass' if r.passed else 'FAIL'}"
                            for r in reports) + f"\n{len(rejected)} scanned points rejected")
    return _z_exit(reports)


def cmd_bvp_fredholm(run, args) -> int:
    from .bvp import fredholm_solve
    est = _estimates(args)
    sol = fredholm_solve(args.params_obj, est, n=args.nodes)
    p = run.write_csv(args.out, ["angle", "phi1_re", "phi1_im", "phi2_re", "phi2_im"],
                      sol.to_rows())
    out = {"out": str(p), "nodes": args.nodes, "residual": sol.residual,
           "condition": sol.condition, "analytic_mismatch": sol.analytic_mismatch,
           "exponent": sol.exponent}
    run.emit(out)
    return EXIT_OK


def _symmetric_params(args) -> ModelParams:
    return args.params_obj if args.params else DEFAULT_SYMMETRIC


def cmd_symmetric_classify(run, args) -> int:
    from .symmetric import classify
    run.emit(classify(_symmetric_params(args)).to_dict())
    return EXIT_OK


def cmd_symmetric_bvp_check(run, args) -> int:
    from .estimate import PathEstimates
    from .simulate import simulate_path
    from .symmetric import curve_points, scalar_bvp_condition
    P = _symmetric_params(args)
    est = PathEstimates(simulate_path(P, _sim_config(args)))
    reports = [scalar_bvp_condition(P, est, p) for p in curve_points(P, args.points, est)]
    out = [r.to_dict() for r in reports]
    if args.out:
        run.write_json(args.out, out)
    run.emit(out, "\n".join(f"p = {r.point[0]:.4f}  z = {r.z:5.2f}  "
                            f"{'pass' if r.passed else 'FAIL'}" for r in reports))
    return _z_exit(reports)


def _polar_rows(cfg, n_r: int, n_t: int, rmax: float):
    from .symmetric import remarkable_density
    r = np.linspace(rmax / n_r, rmax, n_r)
    t = np.linspace(-cfg.beta / 2, cfg.beta / 2, n_t)
    R, T = np.meshgrid(r, t, indexing="ij")
    D = remarkable_density(cfg, R, T)
    return zip(R.ravel(), T.ravel(), D.ravel())


def cmd_symmetric_density(run, args) -> int:
    from .symmetric import RemarkableDensity, remarkable_params
    P = args.params_obj if args.params else remarkable_params()
    cfg = RemarkableDensity.for_params(P)
    p = run.write_csv(args.grid, ["r", "t", "density"],
                      _polar_rows(cfg, args.n, args.n, args.rmax))
    run.emit({"out": str(p), "density": cfg.to_dict()}, str(p))
    return EXIT_OK


def cmd_symmetric_verify(run, args) -> int:
    from .simulate import simulate_path
    from .symmetric import remarkable_params, verify_remarkable
    P = args.params_obj if args.params else remarkable_params()
    path = simulate_path(P, _sim_config(args)) if args.mc else None
    rep = verify_remarkable(P, path=path)
    run.emit(rep.to_dict(), f"normalization {rep.normalization:.12f}  bar residual "
             f"{rep.bar_residual:.3g}  tv {rep.tv}  {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK if rep.passed else EXIT_STATS


def cmd_figure(run, args) -> int:
    P = args.params_obj
    fig = args.figure
    written = []
    if fig == "branch-curves":
        from .kernel import branch_eval
        x = np.linspace(-args.span, args.span, args.n)
        for kid in ("U", "V"):
            for i in (1, 2):
                v = branch_eval(P, kid, "P", i, 1j * x, check_cut=False)
                written.append(run.write_csv(f"branch_P{i}{kid.lower()}.csv", ["x", "re", "im"],
                                             zip(x, v.real, v.imag)))
    elif fig == "hyperbolas":
        from .kernel import branch_eval_cut, branch_points
        for kid in ("U", "V"):
            fam = branch_points(P, kid, "P")
            rows = []
            for q in np.concatenate([fam.bp_low - np.geomspace(1e-6, args.span, args.n),
                                     fam.bp_high + np.geomspace(1e-6, args.span, args.n)]):
                for side in ("above", "below"):
                    for i in (1, 2):
                        v = branch_eval_cut(P, kid, "P", i, q, side)
                        rows.append((q, side, i, v.real, v.imag))
            written.append(run.write_csv(f"hyperbola_{kid}.csv",
                                         ["q", "side", "branch", "x", "y"], rows))
    elif fig == "density-grid":
        from .estimate import estimate_density
        g = estimate_density(_estimates(args).path)
        written.append(run.write_csv("density_grid.csv", ["z1", "z2", "density", "se"],
                                     g.to_rows()))
    else:
        from .symmetric import RemarkableDensity, remarkable_params
        Q = P if args.params else remarkable_params()
        cfg = RemarkableDensity.for_params(Q)
        written.append(run.write_csv("remarkable_density.csv", ["r", "t", "density"],
                                     _polar_rows(cfg, args.n, args.n, args.span)))
    run.emit({"figure": fig, "files": [str(p) for p in written]},
             "\n".join(str(p) for p in written))
    return EXIT_OK


def replay_argv(manifest_path) -> list:
    """Command line recorded in a run manifest, without the program name."""
    cmd = json.loads(Path(manifest_path).read_text())["command"]
    if not cmd or cmd[0] != "rbmwedge" or (len(cmd) > 1 and cmd[1] == "replay"):
        raise ValueError(f"{manifest_path} does not record a replayable command")
    return list(cmd[1:])


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    c = _Parser(add_help=False)
    c.add_argument("--params", help="JSON parameter file (default: built-in configuration)")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out-dir", help=f"output directory (default: ${OUT_DIR_ENV} or .)")
    c.add_argument("--threads", type=int, default=0, help="numba worker threads (0: leave as is)")
    c.add_argument("--json", action="store_true", help="print machine-readable JSON")
    return c


def _sim_flags() -> argparse.ArgumentParser:
    s = _Parser(add_help=False)
    s.add_argument("--h", type=float, help="time step")
    s.add_argument("--horizon", type=float, help="simulated time per replica")
    s.add_argument("--replicas", type=int)
    return s


def build_parser() -> argparse.ArgumentParser:
    common, sim = _common(), _sim_flags()
    parser = _Parser(prog="rbmwedge", description="Reflected Brownian motion in the "
                     "three-quarter plane: kernels, simulation, checks and boundary problems.")
    parser.add_argument("--version", action="version", version=__version__)
    top = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def leaf(group, name, fn, *, mc=False, **kw):
        p = group.add_parser(name, parents=[common] + ([sim] if mc else []), **kw)
        p.set_defaults(fn=fn)
        return p

    g = top.add_parser("params").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(g, "check", cmd_params_check, help="validate parameters")
    leaf(g, "template", cmd_params_template).add_argument("--symmetric", action="store_true")

    g = top.add_parser("kernel").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(g, "branch-points", cmd_kernel_branch_points)
    p = leaf(g, "eval", cmd_kernel_eval)
    p.add_argument("--kernel", default="U", choices=["U", "V", "SYM"])
    p.add_argument("--variable", default="P", choices=["P", "Q"])
    p.add_argument("--grid", type=int, default=201)
    p.add_argument("--span", type=float, default=5.0)
    p.add_argument("--axis", default="imag", choices=["imag", "real"])
    p.add_argument("--out", default="kernel_eval.csv")
    leaf(g, "hyperbola", cmd_kernel_hyperbola)
    leaf(g, "automorphy", cmd_kernel_automorphy).add_argument("--point", required=True)

    p = leaf(top, "simulate", cmd_simulate)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--h", type=float)
    p.add_argument("--start", type=float, nargs=2, default=(1.0, 1.0))
    p.add_argument("--out", default="path.csv")
    p.add_argument("--format", default="csv", choices=["csv", "raw"])

    g = top.add_parser("estimate").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = leaf(g, "laplace", cmd_estimate_laplace, mc=True)
    p.add_argument("--target", required=True, choices=["L1", "L2", "m", "n", "ell1", "ell2"])
    p.add_argument("--at", required=True, 
                   help="'x,y' or 'x', complex values like 1+2i; "
                        "write negative values as --at=-0.5,-0.3")
    leaf(g, "density", cmd_estimate_density, mc=True).add_argument("--out", default="grid.csv")

    g = top.add_parser("check").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    p = leaf(g, "feq", cmd_check_feq, mc=True)
    p.add_argument("--points", default="20", help="JSON file of [x, y] pairs, or a count")
    p.add_argument("--sum", action="store_true", help="summed equation (no m, n, E terms)")
    p.add_argument("--equation", default="sum", choices=["sum", "S1", "S2"])
    p.add_argument("--out")
    p = leaf(g, "bar", cmd_check_bar, mc=True)
    p.add_argument("--at", default="-0.5,-0.5", help="exponent 'x,y' of the test function")
    p.add_argument("--window", type=float, help="half-width of the smooth cutoff")

    g = top.add_parser("bvp").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(g, "gmatrix", cmd_bvp_gmatrix).add_argument("--q", type=float, required=True)
    p = leaf(g, "check", cmd_bvp_check, mc=True)
    p.add_argument("--cut-points", type=int, default=10)
    p.add_argument("--out")
    p = leaf(g, "fredholm", cmd_bvp_fredholm, mc=True)
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--out", default="phi.csv")

    g = top.add_parser("symmetric").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    leaf(g, "classify", cmd_symmetric_classify)
    p = leaf(g, "bvp-check", cmd_symmetric_bvp_check, mc=True)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--out")
    p = leaf(g, "density", cmd_symmetric_density)
    p.add_argument("--grid", default="remarkable_density.csv")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--rmax", type=float, default=5.0)
    p = leaf(g, "verify-remarkable", cmd_symmetric_verify, mc=True)
    p.add_argument("--mc", action="store_true", help="also compare with a simulated histogram")

    p = leaf(top, "figure", cmd_figure, mc=True)
    p.add_argument("figure", choices=["branch-curves", "hyperbolas", "density-grid",
                                      "remarkable-density"])
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--span", type=float, default=5.0)
    p = top.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(fn=None)
    return parser


def dispatch(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "replay":
            return dispatch(replay_argv(args.manifest))
        args.params_obj = ModelParams.from_json(args.params) if args.params else DEFAULT_ASYMMETRIC
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if args.threads > 0:
        import numba
        numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
    run = Run(args, ["rbmwedge"] + argv)
    try:
        code = args.fn(run, args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (RBMError, ValueError, ArithmeticError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    run.finish()
    return code


def main() -> None:
    sys.exit(dispatch())
