"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 general
position violated.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .delaunay import build_mosaic, size_stats
from .formats import (FormatError, format_config, format_points, mingling_csv, mosaic_to_json, parse_config,
                      parse_points, q, radius_to_json, sixpack_svg, sixpack_to_json)
from .generators import GeneratorSpec
from .geometry import GeneralPositionError, GeometryError
from .mst import max_ratio_bruteforce, mst_ratio
from .radius import radius_function
from .sixpack import InclusionSpec, sixpack_of

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_GP = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config(args) -> dict[str, str]:
    return parse_config(_read(args.config)) if getattr(args, "config", None) else {}


def _load_points(args, cfg: dict[str, str]):
    # files must be in general position unless told otherwise; lattices never are
    gp = not (getattr(args, "allow_degenerate", False) or cfg.get("allow_degenerate") == "true")
    if getattr(args, "generate", None) or (not getattr(args, "input", None) and "generator.kind" in cfg):
        gen = {k[len("generator."):]: v for k, v in cfg.items() if k.startswith("generator.")}
        if getattr(args, "generate", None):
            gen.update(dict(tok.split("=", 1) for tok in args.generate.split(",") if "=" in tok))
        if "kind" not in gen:
            raise InputError("generator spec needs kind=...")
        try:
            spec = GeneratorSpec.from_config(gen)
            args.generator_seed = spec.seed
            chi = spec.build()
        except (GeometryError, ValueError) as exc:
            raise InputError(f"bad generator spec: {exc}") from exc
    elif getattr(args, "input", None):
        chi = parse_points(_read(args.input), general_position=gp)
    else:
        raise InputError("no input file or generator given")
    jitter = getattr(args, "jitter", None)
    if jitter is None and "jitter" in cfg:
        jitter = int(cfg["jitter"])
    if jitter is not None:
        args.jitter = jitter
        chi = chi.jittered(jitter)
    return chi


def _scale(args, cfg) -> Fraction:
    raw = args.scale if getattr(args, "scale", None) is not None else cfg.get("scale", "1")
    try:
        M = Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad scale {raw!r}") from exc
    if M <= 0:
        raise InputError("scale must be positive")
    return M


def parse_mode(text: str, sigma_size: int) -> InclusionSpec:
    """``color:j``, ``t1..t2`` or ``identity``."""
    text = text.strip()
    try:
        if text == "identity":
            return InclusionSpec("identity")
        if text.startswith("color:"):
            j = int(text.split(":", 1)[1])
            if not 0 <= j < sigma_size:
                raise InputError(f"color {j} outside 0..{sigma_size - 1}")
            return InclusionSpec("color", color=j)
        if ".." in text:
            a, b = (int(x) for x in text.split(".."))
            if not 1 <= a < b <= sigma_size:
                raise InputError(f"need 1 <= t1 < t2 <= {sigma_size}")
            return InclusionSpec("chromatic", t1=a, t2=b)
    except ValueError as exc:
        raise InputError(f"bad mode {text!r}") from exc
    raise InputError(f"bad mode {text!r}; use color:j, t1..t2 or identity")


# ---------------------------------------------------------------------------
# commands


def cmd_delaunay(args) -> int:
    cfg = _config(args)
    chi = _load_points(args, cfg)
    M = _scale(args, cfg)
    m = build_mosaic(chi, M=M)
    stats = size_stats(m)
    _emit(mosaic_to_json(m, stats, {"scale": q(M), "jitter": args.jitter}), args.output)
    print(f"simplices per dimension {list(stats.counts)}, total {stats.total}, "
          f"spread {stats.spread:.6g}", file=sys.stderr)
    return EXIT_OK


def cmd_filtration(args) -> int:
    cfg = _config(args)
    chi = _load_points(args, cfg)
    m = build_mosaic(chi, M=_scale(args, cfg))
    rf = radius_function(m, chi)
    _emit(radius_to_json(rf), args.output)
    return EXIT_OK


def cmd_sixpack(args) -> int:
    cfg = _config(args)
    chi = _load_points(args, cfg)
    spec = parse_mode(args.mode or cfg.get("mode", "color:0"), chi.sigma_size)
    C_raw = args.C if args.C is not None else cfg.get("C")
    m = build_mosaic(chi, M=_scale(args, cfg))
    rf = radius_function(m, chi)
    try:
        C_sq = Fraction(C_raw) ** 2 if C_raw is not None else None
        pack = sixpack_of(m, rf, spec, C_sq)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(str(exc)) from exc
    meta = {"mode": args.mode or cfg.get("mode", "color:0"),
            "seed": getattr(args, "generator_seed", None), "jitter": args.jitter}
    _emit(sixpack_to_json(pack, meta), args.output)
    thr = args.threshold if args.threshold is not None else cfg.get("threshold")
    if thr is not None:
        for label, dgm in pack.items():
            counts = [len(dgm.in_dim(p).above(float(thr))) for p in range(chi.dim_d + 1)]
            print(f"{label}: points with persistence > {thr} per dimension {counts}", file=sys.stderr)
    if args.plot:
        Path(args.plot).write_text(sixpack_svg(pack, show_collapsible=args.show_collapsible,
                                               barcode=args.barcode))
    return EXIT_OK


def cmd_mst_ratio(args) -> int:
    cfg = _config(args)
    chi = _load_points(args, cfg)
    if args.brute_force:
        coloring, mu = max_ratio_bruteforce(chi.points, args.brute_force)
        _emit(f"mu={mu:.12f}\ncoloring={' '.join(map(str, coloring))}\n", args.output)
        return EXIT_OK
    rep = mst_ratio(chi)
    extra = {"n": len(chi), "colors": chi.sigma_size}
    if args.csv:
        _emit(mingling_csv(rep, extra), args.output)
    else:
        lines = [f"mst_ratio={rep.mst_ratio:.12f}", f"image_share={rep.image_share:.12f}",
                 f"kernel_share={rep.kernel_share:.12f}", f"union_length={rep.union_length:.12f}"]
        lines += [f"length_color_{j}={x:.12f}" for j, x in enumerate(rep.per_color_length)]
        lines += [f"n={len(chi)}", f"colors={chi.sigma_size}"]
        _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _config(args)
    if not args.generate and "generator.kind" not in cfg:
        raise InputError("generate needs --generate kind=... or a config with generator.kind")
    args.input = None
    chi = _load_points(args, cfg)
    _emit(format_points(chi), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    from .validation import SUITES, run_suite

    if args.suite not in SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    results = run_suite(args.suite, args.seed, args.trials)
    ok = True
    lines = []
    for r in results:
        lines.append(r.summary(timing=False))
        print(f"{r.suite}: {r.seconds:.1f}s", file=sys.stderr)
        lines += [f"  {f}" for f in r.failures[:20]]
        ok &= r.passed
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_config(args) -> int:
    """Print the default configuration."""
    from .generators import AnnuliConfig

    a = AnnuliConfig()
    cfg = {"scale": "1", "mode": "color:0", "threshold": str(a.threshold), "generator.kind": "annuli",
           "generator.seed": "0", "generator.extra.inner": str(a.inner), "generator.extra.outer": str(a.outer),
           "generator.extra.spacing": str(a.spacing), "generator.extra.fill_radius": str(a.fill_radius),
           "generator.extra.n_in": str(a.n_in), "generator.extra.n_out": str(a.n_out)}
    _emit(format_config(cfg), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chromatic-alpha", description="Chromatic alpha complexes and 6-packs.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_input=True):
        if needs_input:
            sp.add_argument("input", nargs="?", help="point file ('-' for stdin)")
        sp.add_argument("-o", "--output", help="output file (default stdout)")
        sp.add_argument("--config", help="flat key=value config file")
        sp.add_argument("--generate", help="generator spec, e.g. kind=hexagonal,portion=10")
        sp.add_argument("--jitter", type=int, help="seed for a tiny exact perturbation")
        sp.add_argument("--allow-degenerate", action="store_true",
                        help="triangulate through cospherical subsets instead of failing (exit 3)")

    sp = sub.add_parser("delaunay", help="chromatic Delaunay mosaic and size statistics")
    common(sp)
    sp.add_argument("--scale", help="color block scale M (rational)")
    sp.set_defaults(func=cmd_delaunay)

    sp = sub.add_parser("filtration", help="radius function (simplex, value_sq)")
    common(sp)
    sp.add_argument("--scale")
    sp.set_defaults(func=cmd_filtration)

    sp = sub.add_parser("sixpack", help="6-pack of an inclusion of subcomplexes")
    common(sp)
    sp.add_argument("--scale")
    sp.add_argument("--mode", help="color:j, t1..t2 or identity (default color:0)")
    sp.add_argument("--C", help="radius at which essential classes are closed")
    sp.add_argument("--plot", help="write an SVG grid of the six diagrams")
    sp.add_argument("--show-collapsible", action="store_true", help="also plot zero-persistence points")
    sp.add_argument("--threshold", help="report how many points have persistence above this radius")
    sp.add_argument("--barcode", action="store_true", help="plot intervals instead of diagram points")
    sp.set_defaults(func=cmd_sixpack)

    sp = sub.add_parser("mst-ratio", help="MST-ratio and kernel/image shares")
    common(sp)
    sp.add_argument("--csv", action="store_true")
    sp.add_argument("--brute-force", type=int, choices=(2, 3),
                    help="maximize the ratio over all colorings with this many colors")
    sp.set_defaults(func=cmd_mst_ratio)

    sp = sub.add_parser("generate", help="write a generated point file")
    common(sp, needs_input=False)
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("validate", help="randomized validation suites")
    sp.add_argument("--suite", required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--trials", type=int)
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("config", help="print the default config file")
    sp.add_argument("-o", "--output")
    sp.set_defaults(func=cmd_config)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GeneralPositionError as exc:
        subset = f" (points {list(exc.subset)})" if exc.subset else ""
        print(f"error: general position violated: {exc}{subset}", file=sys.stderr)
        return EXIT_GP
    except (InputError, FormatError, GeometryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
