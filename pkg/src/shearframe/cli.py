"""Command-line entry point.

Every command writes its artifacts into ``--outdir`` together with
``<command>.manifest.json`` holding the resolved parameters and a sha256 of
each artifact.  Exit status: 0 success, 2 a checked bound failed, 1 usage.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

EXIT_OK, EXIT_USAGE, EXIT_FAIL = 0, 1, 2
THREADS_ENV = "SHEARFRAME_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.6g}"


def _write_csv(path: Path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    def __init__(self, args, command: str):
        self.command = command
        self.outdir = Path(args.outdir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self.params = {k: v for k, v in sorted(vars(args).items())
                       if k not in ("func", "outdir", "command")}
        self.artifacts: list[Path] = []
        self.extra: dict = {}

    def path(self, name: str) -> Path:
        p = self.outdir / name
        self.artifacts.append(p)
        return p

    def finish(self, status: int) -> int:
        manifest = {
            "command": self.command,
            "parameters": self.params,
            "threads": _threads(),
            "status": status,
            "artifacts": {p.name: _sha256(p) for p in self.artifacts if p.exists()},
            **self.extra,
        }
        _write_json(self.outdir / f"{self.command}.manifest.json", manifest)
        return status


def _threads() -> int | None:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if n < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def _apply_thread_cap():
    n = _threads()
    if n is not None:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


# -- configuration helpers -----------------------------------------------------

def _add_config_args(p, jmax_default=None):
    p.add_argument("--config", help="JSON file with shear-system parameters")
    p.add_argument("--example", type=int, choices=(1, 2),
                   help="use Example 1 (N1=4, N2=3) or Example 2 (N1=6, N2=4)")
    p.add_argument("--kind", choices=("bspline", "pseudo"))
    p.add_argument("--N1", type=int)
    p.add_argument("--N2", type=int)
    p.add_argument("--l1", type=int)
    p.add_argument("--l2", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--jmax", type=int, default=jmax_default)
    p.add_argument("--c", type=float, nargs=2, metavar=("C1", "C2"))


def _config(args):
    from .shearlet import EXAMPLE1, EXAMPLE2, ShearSystemConfig

    if args.config and args.example:
        raise UsageError("give either --config or --example, not both")
    if args.config:
        cfg = ShearSystemConfig.from_dict(json.loads(Path(args.config).read_text()))
    elif args.example == 1:
        cfg = EXAMPLE1
    else:
        cfg = EXAMPLE2
    over = {}
    for name, key in (("kind", "kind"), ("N1", "N1"), ("N2", "N2"), ("l1", "l1"),
                      ("l2", "l2"), ("alpha", "alpha"), ("jmax", "j_max")):
        v = getattr(args, name)
        if v is not None:
            over[key] = v
    if args.c is not None:
        over["c"] = tuple(args.c)
    try:
        return cfg.replace(**over) if over else cfg
    except ValueError as exc:
        raise UsageError(str(exc))


def _order(N, l):
    from .pseudospline import MaskOrder
    try:
        return MaskOrder(N, l)
    except ValueError as exc:
        raise UsageError(str(exc))


# -- commands ------------------------------------------------------------------

def cmd_table1(args) -> int:
    from .pseudospline import table1

    run = Run(args, "table1")
    rows = table1(2, 9)
    out = run.path(args.out)
    _write_csv(out, ["N", "l", "beta"], rows)
    if args.precise:
        _write_json(run.path(Path(args.out).stem + ".precise.json"),
                    [{"N": N, "l": l, "beta": b} for N, l, b in rows])
    return run.finish(EXIT_OK)


def cmd_mask_check(args) -> int:
    import numpy as np

    from .pseudospline import MaskOrder, expanded_mask, identity_residual, mask_eval
    from .trigpoly import highpass_from_lowpass

    run = Run(args, "mask-check")
    x = np.linspace(-np.pi, np.pi, args.grid)
    pos = np.linspace(0, np.pi, args.grid)
    rows, worst = [], 0.0
    for N in range(1, args.Nmax + 1):
        for l in range(N):
            o = MaskOrder(N, l)
            ident = float(np.max(identity_residual(o, x)))
            a = expanded_mask(o)
            expand = float(np.max(np.abs(a.eval(x) - mask_eval(o, x))))
            aa = np.abs(a.eval(pos))
            bb = np.abs(highpass_from_lowpass(a).eval(pos))
            mono = float(max(np.max(np.diff(aa)), np.max(-np.diff(bb)), 0.0))
            rows.append((N, l, ident, expand, mono))
            worst = max(worst, ident, expand, mono)
    _write_csv(run.path(args.out), ["N", "l", "identity_residual", "expansion_error",
                                    "monotonicity_violation"], rows)
    run.extra["max_residual"] = worst
    print(f"max residual {worst:.3g} over {len(rows)} orders")
    return run.finish(EXIT_OK if worst <= args.tol else EXIT_FAIL)


def cmd_bounds(args) -> int:
    import numpy as np

    from .pseudospline import constants
    from .refinable import RefinableEvaluator, bound_suite, phi_hat

    order = _order(args.N, args.l)
    if not 0 < args.K <= math.pi:
        raise UsageError("--K must lie in (0, pi]")
    run = Run(args, "bounds")
    bc = constants(order, J=args.J, K=args.K)
    xi = np.linspace(-args.ximax, args.ximax, args.grid)
    ph = np.abs(phi_hat(RefinableEvaluator(order), xi))
    lower = np.where(np.abs(xi) <= args.K, bc.C4, 0.0)
    with np.errstate(divide="ignore"):
        upper = np.exp(np.minimum(0.0, bc.log_C3 + bc.upper_exponent * np.log(np.abs(xi))))
    _write_csv(run.path(args.out), ["xi", "phi_hat_abs", "lower", "upper"],
               zip(xi, ph, lower, upper))
    suite = bound_suite(order, K=args.K, J=args.J)
    consts = {"C1": bc.C1, "C2": bc.C2, "Cb": bc.Cb, "q1": bc.q1, "q2": bc.q2,
              "kappa": bc.kappa, "beta": bc.beta, "J": bc.J, "log_C3": bc.log_C3,
              "C3": bc.C3 if math.isfinite(bc.C3) else None, "C4": bc.C4, "k0": bc.k0,
              "K": bc.K, "upper_exponent": bc.upper_exponent}
    _write_json(run.path(Path(args.out).stem + ".summary.json"),
                {"constants": consts, "violations": suite})
    bad = {k: v for k, v in suite.items() if v > 1e-9}
    for k, v in bad.items():
        print(f"violation {k}: {v:.3g}", file=sys.stderr)
    return run.finish(EXIT_FAIL if bad else EXIT_OK)


def cmd_frame_scan(args) -> int:
    import numpy as np

    from .shearlet import CoverageError, cone_frame_scan

    cfg = _config(args)
    run = Run(args, "frame-scan")
    try:
        rep = cone_frame_scan(cfg, grid=args.grid, octaves=args.octaves, refine=args.refine)
    except CoverageError as exc:
        print(str(exc), file=sys.stderr)
        return run.finish(EXIT_FAIL)
    out = run.path(args.out)
    data = np.column_stack([rep.xi1.ravel(), rep.xi2.ravel(), rep.theta0.ravel()])
    np.savetxt(out, data, fmt="%.6g", delimiter=",", header="xi1,xi2,theta0", comments="")
    summary = rep.summary()
    summary["config"] = cfg.to_dict()
    summary["hypotheses"] = cfg.hypotheses()
    _write_json(run.path(Path(args.out).stem + ".summary.json"), summary)
    print(json.dumps({k: summary[k] for k in ("L_inf", "L_sup", "theory_lower", "coverage_ok")}))
    return run.finish(EXIT_OK if rep.ok else EXIT_FAIL)


def cmd_decay_check(args) -> int:
    from dataclasses import asdict

    from .shearlet import decay_condition_check

    cfg = _config(args)
    run = Run(args, "decay-check")
    rep = decay_condition_check(cfg, n_samples=args.samples, seed=args.seed)
    body = asdict(rep)
    body.update(passed=rep.passed, failures=rep.failures(), config=cfg.to_dict())
    _write_json(run.path(args.out), body)
    print("pass" if rep.passed else "fail: " + "; ".join(rep.failures()))
    return run.finish(EXIT_OK if rep.passed else EXIT_FAIL)


def cmd_cartoon_gen(args) -> int:
    from .cartoon import DEFAULT_SPEC, CartoonSpec, SpecError, generate
    from .imageio import write_pgm, write_png

    try:
        spec = CartoonSpec.from_json(Path(args.spec).read_text()) if args.spec else DEFAULT_SPEC
        spec.validate()
    except (SpecError, TypeError, KeyError) as exc:
        print(f"invalid cartoon spec: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if args.M < 1 or args.M & (args.M - 1):
        raise UsageError("--M must be a power of two")
    run = Run(args, "cartoon-gen")
    img = generate(spec, args.M, supersample=args.supersample)
    write_pgm(run.path(args.out), img)
    if args.png:
        write_png(run.path(args.png), img)
    _write_json(run.path(Path(args.out).stem + ".spec.json"), spec.to_dict())
    return run.finish(EXIT_OK)


def cmd_sparse_approx(args) -> int:
    import numpy as np

    from .cartoon import DEFAULT_SPEC, generate
    from .imageio import read_pgm
    from .transform import build_filter_bank, build_wavelet_bank, nterm_curve

    cfg = _config(args)
    try:
        Ns = [int(s) for s in args.Ns.split(",") if s.strip()]
    except ValueError:
        raise UsageError("--Ns takes a comma-separated list of integers")
    if args.image:
        img = read_pgm(args.image)
        if img.shape[0] != img.shape[1]:
            raise UsageError("image must be square")
    else:
        img = generate(DEFAULT_SPEC, args.M)
    run = Run(args, "sparse-approx")
    sampled = not args.undecimated
    es = nterm_curve(build_filter_bank(cfg, img.shape[0]), img, Ns, sampled=sampled)
    ew = nterm_curve(build_wavelet_bank(cfg, img.shape[0]), img, Ns, sampled=sampled)
    rows = list(zip(Ns, es, ew))
    _write_csv(run.path(args.out), ["N", "err2_shearlet", "err2_wavelet"], rows)
    L = np.log(np.asarray(Ns, float))
    fit = {}
    if len(Ns) >= 2:
        fit = {"slope_shearlet": float(np.polyfit(L, np.log(es), 1)[0]),
               "slope_wavelet": float(np.polyfit(L, np.log(ew), 1)[0])}
    summary = {"norm2": float(np.mean(img**2)), "config": cfg.to_dict(), **fit}
    _write_json(run.path(Path(args.out).stem + ".summary.json"), summary)
    if args.precise:
        _write_json(run.path(Path(args.out).stem + ".precise.json"),
                    [{"N": n, "err2_shearlet": a, "err2_wavelet": b} for n, a, b in rows])
    print(json.dumps(fit))
    return run.finish(EXIT_OK)


def cmd_transform_roundtrip(args) -> int:
    import numpy as np

    from .transform import analyze, build_filter_bank, synthesize

    cfg = _config(args)
    try:
        fb = build_filter_bank(cfg, args.M)
    except ValueError as exc:
        raise UsageError(str(exc))
    run = Run(args, "transform-roundtrip")
    rng = np.random.default_rng(args.seed)
    rows = []
    worst_rt = worst_en = 0.0
    for t in range(args.count):
        f = rng.standard_normal((args.M, args.M))
        st = analyze(fb, f)
        g = synthesize(fb, st)
        rt = float(np.linalg.norm(g - f) / np.linalg.norm(f))
        F = np.fft.fft2(f)
        ref = float(np.sum(fb.gamma * np.abs(F) ** 2) / args.M**2)
        en = abs(st.energy() - ref) / ref
        rows.append((t, rt, en))
        worst_rt, worst_en = max(worst_rt, rt), max(worst_en, en)
    _write_csv(run.path(args.out), ["trial", "rel_l2_error", "energy_rel_error"], rows)
    lo, hi = fb.frame_bounds
    run.extra.update(max_rel_l2_error=worst_rt, max_energy_rel_error=worst_en,
                     gamma_min=lo, gamma_max=hi, channels=fb.n_channels)
    ok = worst_rt <= 1e-8 and worst_en <= 1e-10
    print(f"max roundtrip {worst_rt:.3g}, max energy mismatch {worst_en:.3g}")
    return run.finish(EXIT_OK if ok else EXIT_FAIL)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="shearframe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--outdir", default=".")
        sp.set_defaults(func=func)
        return sp

    sp = add("table1", cmd_table1, "decay rates beta_{N,l} for 2 <= N <= 9")
    sp.add_argument("--out", default="table1.csv")
    sp.add_argument("--precise", action="store_true")

    sp = add("mask-check", cmd_mask_check, "binomial identity and mask expansion")
    sp.add_argument("--Nmax", type=int, default=9)
    sp.add_argument("--grid", type=int, default=2048)
    sp.add_argument("--tol", type=float, default=1e-12)
    sp.add_argument("--out", default="mask_check.csv")

    sp = add("bounds", cmd_bounds, "explicit constants and the phi_hat sandwich")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--l", type=int, default=0)
    sp.add_argument("--K", type=float, default=math.pi)
    sp.add_argument("--J", type=int, default=10)
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--ximax", type=float, default=2**10 * math.pi)
    sp.add_argument("--out", default="bounds.csv")

    sp = add("frame-scan", cmd_frame_scan, "cone lower/upper frame bound scan")
    _add_config_args(sp, jmax_default=20)
    sp.add_argument("--grid", type=int, default=512)
    sp.add_argument("--octaves", type=float)
    sp.add_argument("--refine", action="store_true")
    sp.add_argument("--out", default="frame_scan.csv")

    sp = add("decay-check", cmd_decay_check, "decay conditions for sparse approximation")
    _add_config_args(sp)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="decay_check.json")

    sp = add("cartoon-gen", cmd_cartoon_gen, "cartoon-like test image")
    sp.add_argument("--spec")
    sp.add_argument("--M", type=int, default=512)
    sp.add_argument("--supersample", type=int, default=1)
    sp.add_argument("--out", default="cartoon.pgm")
    sp.add_argument("--png")

    sp = add("sparse-approx", cmd_sparse_approx, "N-term error, shearlets vs wavelets")
    _add_config_args(sp)
    sp.add_argument("--image", help="PGM input (default: the built-in cartoon)")
    sp.add_argument("--M", type=int, default=512)
    sp.add_argument("--Ns", default=",".join(str(2**k) for k in range(8, 15)))
    sp.add_argument("--undecimated", action="store_true",
                    help="count every pixel translate instead of the sampled lattice")
    sp.add_argument("--precise", action="store_true")
    sp.add_argument("--out", default="sparse_approx.csv")

    sp = add("transform-roundtrip", cmd_transform_roundtrip, "analysis/synthesis exactness")
    _add_config_args(sp)
    sp.add_argument("--M", type=int, default=256)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default="roundtrip.csv")
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    try:
        _apply_thread_cap()
        if not argv:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
