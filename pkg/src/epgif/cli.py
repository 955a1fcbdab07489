"""Command-line interface.

Exit status: 0 success, 1 invalid arguments, 2 I/O or file-format
failure, 3 dimension mismatch.
"""
from __future__ import annotations

import argparse
import io
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import synthetic
from .baseline import BaselineParams, ggif_chi, ggif_gamma, ggif_filter, gif_filter, wgif_filter, wgif_weighting
from .edge_perceptual import RHO_MODES, EpgifParams, dump_diagnostics, epgif_filter
from .errors import ImageFormatError, ParameterError, ShapeError
from .image import MultiPlaneImage, load_image, save_image, to_luminance, write_bytes_atomic
from .metrics import MetricReport, emit_report, psnr, report_csv, ssim
from .pipelines import FUSION_BETA, detail_enhance, detail_layer, exposure_fuse, row_profile

FILTERS = ("gif", "wgif", "ggif", "epgif")
EXIT_ARGS, EXIT_IO, EXIT_SHAPE = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ARGS, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def _name_list(text: str) -> list[str]:
    names = [v.strip().lower() for v in text.split(",") if v.strip()]
    for n in names:
        if n not in FILTERS:
            raise argparse.ArgumentTypeError(f"unknown filter {n!r}; choose from {', '.join(FILTERS)}")
    return names


def _add_filter_args(p, beta_default=None, with_filter=True):
    if with_filter:
        p.add_argument("--filter", choices=FILTERS, default="epgif", help="smoothing filter")
    p.add_argument("--zeta", type=int, default=16, help="window radius in pixels")
    p.add_argument("--lambda", dest="lam", type=float, default=0.01, help="regularization strength")
    p.add_argument("--c", type=float, default=0.35, help="EPGIF tanh offset, in (0, 0.5)")
    beta_help = "EPGIF residual scale" + (" (1/50 for fuse)" if beta_default else "")
    p.add_argument("--beta", type=float, default=beta_default or 1.0 / 500.0, help=beta_help)
    p.add_argument("--epsilon", type=float, default=None, help="weighting floor; None means (0.001 L)^2")
    p.add_argument("--rho-mode", choices=RHO_MODES, default="unit", help="EPGIF contrast factor")
    p.add_argument("--paper-literal-weight-sign", action="store_true", default=False,
                   help="use exp(+M) aggregation weights (comparison only)")


def _add_output_args(p):
    p.add_argument("-o", "--output", required=True, help="output image path")
    p.add_argument("--bit-depth", type=int, choices=(8, 16), default=8, help="output sample depth")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="epgif", description="Guided image filtering (GIF, WGIF, GGIF, EPGIF).",
                     formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("smooth", help="edge-preserving smoothing", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="input image")
    p.add_argument("--guide", default=None, help="guidance image; None means self-guided")
    _add_output_args(p)
    _add_filter_args(p)

    p = sub.add_parser("enhance", help="detail enhancement", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="input image")
    _add_output_args(p)
    _add_filter_args(p)
    p.add_argument("--amplification", type=float, default=5.0, help="detail layer gain")
    p.add_argument("--dump-detail", nargs="?", const="", default=None,
                   help="also write 0.5 + detail layer; optional path, else <output>_detail")

    p = sub.add_parser("fuse", help="multi-exposure fusion", formatter_class=fmt)
    p.add_argument("-i", "--input", nargs="+", required=True, help="exposure frames")
    _add_output_args(p)
    _add_filter_args(p, beta_default=FUSION_BETA, with_filter=False)
    p.add_argument("--levels", type=int, default=5, help="pyramid levels")

    p = sub.add_parser("compare", help="PSNR/SSIM sweep of all four filters", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="degraded input image")
    p.add_argument("--reference", required=True, help="clean reference image")
    p.add_argument("-o", "--output", default=None, help="CSV path; None means stdout")
    p.add_argument("--lambdas", type=_float_list, default=[0.01, 0.04, 0.16], help="comma-separated lambdas")
    p.add_argument("--zetas", type=_int_list, default=[2, 4, 8], help="comma-separated radii")
    _add_filter_args(p, with_filter=False)

    p = sub.add_parser("weights", help="dump edge-aware weighting fields", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="guidance image")
    p.add_argument("-o", "--output", required=True, help="output prefix; files are <prefix>_<field>.png/.npy")
    _add_filter_args(p)

    p = sub.add_parser("profile", help="1-D row profile CSV across filters", formatter_class=fmt)
    p.add_argument("-i", "--input", required=True, help="input image")
    p.add_argument("--row", type=int, required=True, help="row index")
    p.add_argument("--channel", type=int, default=0, help="plane index (0 = red or gray)")
    p.add_argument("--filters", type=_name_list, default=["gif", "wgif", "ggif", "epgif"],
                   help="comma-separated filters")
    p.add_argument("-o", "--output", default=None, help="CSV path; None means stdout")
    _add_filter_args(p, with_filter=False)

    p = sub.add_parser("synth", help="write a seeded synthetic test scene", formatter_class=fmt)
    p.add_argument("--kind", choices=("mosaic", "noisy-mosaic", "step", "textured-step", "dark", "bright"),
                   default="mosaic", help="scene type")
    p.add_argument("--size", type=int, default=128, help="side length in pixels")
    p.add_argument("--seed", type=int, default=0, help="scene seed")
    p.add_argument("--noise-seed", type=int, default=1000, help="noise seed for noisy-mosaic")
    p.add_argument("--sigma", type=float, default=0.05, help="noise std for noisy-mosaic")
    _add_output_args(p)
    return parser


# -- helpers ---------------------------------------------------------------------

def _epgif_params(args, radius=None, lam=None) -> EpgifParams:
    return EpgifParams(
        radius=args.zeta if radius is None else radius,
        lam=args.lam if lam is None else lam,
        c=args.c,
        beta=args.beta,
        epsilon=args.epsilon,
        rho_mode=args.rho_mode,
        paper_literal_weight_sign=args.paper_literal_weight_sign,
    )


def _plane_filter(name: str, args, radius=None, lam=None):
    """Return ``fn(X, G) -> plane`` for the named filter."""
    radius = args.zeta if radius is None else radius
    lam = args.lam if lam is None else lam
    if name == "epgif":
        params = _epgif_params(args, radius, lam)
        return lambda X, G: epgif_filter(X, G, params)
    params = BaselineParams(radius=radius, lam=lam, epsilon=args.epsilon)
    fn = {"gif": gif_filter, "wgif": wgif_filter, "ggif": ggif_filter}[name]
    return lambda X, G: fn(X, G, params)


def _guides(img: MultiPlaneImage, guide: MultiPlaneImage | None) -> list:
    if guide is None:
        return list(img.planes)
    if guide.shape != img.shape:
        raise ShapeError(f"guidance {guide.shape} does not match input {img.shape}")
    if len(guide) == len(img):
        return list(guide.planes)
    lum = to_luminance(guide)
    return [lum] * len(img)


def _filter_image(name, args, img, guide=None, radius=None, lam=None) -> MultiPlaneImage:
    fn = _plane_filter(name, args, radius, lam)
    planes = tuple(fn(x, g) for x, g in zip(img.planes, _guides(img, guide)))
    return MultiPlaneImage(planes, img.dynamic_range)


def _write_text(path, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        write_bytes_atomic(path, text.encode())


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("EPGIF_THREADS", "1")))
    except ValueError:
        return 1


# -- subcommands ------------------------------------------------------------------

def cmd_smooth(args) -> int:
    img = load_image(args.input)
    guide = load_image(args.guide) if args.guide else None
    start = time.perf_counter()
    out = _filter_image(args.filter, args, img, guide)
    elapsed = (time.perf_counter() - start) * 1000.0
    save_image(out, args.output, clamp=True, bit_depth=args.bit_depth)
    print(f"filter={args.filter} zeta={args.zeta} lambda={args.lam:g} time_ms={elapsed:.1f}")
    return 0


def cmd_enhance(args) -> int:
    img = load_image(args.input)
    fn = _plane_filter(args.filter, args)

    def smoother(p):
        return fn(p, p)

    params = _epgif_params(args)
    out = detail_enhance(img, params, args.amplification, smoother)
    save_image(out, args.output, clamp=True, bit_depth=args.bit_depth)
    if args.dump_detail is not None:
        path = Path(args.dump_detail) if args.dump_detail else _detail_path(Path(args.output))
        detail = detail_layer(img, params, smoother).map_planes(lambda d: 0.5 + d)
        save_image(detail, path, clamp=True, bit_depth=args.bit_depth)
    return 0


def _detail_path(output: Path) -> Path:
    return output.with_name(f"{output.stem}_detail{output.suffix}")


def cmd_fuse(args) -> int:
    frames = [load_image(p) for p in args.input]
    out = exposure_fuse(frames, _epgif_params(args), args.levels)
    save_image(out, args.output, clamp=True, bit_depth=args.bit_depth)
    return 0


def cmd_compare(args) -> int:
    if not args.lambdas or not args.zetas:
        raise UsageError("--lambdas and --zetas need at least one value each")
    img = load_image(args.input)
    ref = load_image(args.reference)
    if ref.shape != img.shape or len(ref) != len(img):
        raise ShapeError(f"reference {ref.shape} does not match input {img.shape}")
    for z in args.zetas:
        BaselineParams(radius=z, lam=args.lambdas[0])
    for lam in args.lambdas:
        BaselineParams(radius=1, lam=lam)
    cells = [(f, z, lam) for f in FILTERS for z in args.zetas for lam in args.lambdas]

    def run(cell):
        name, z, lam = cell
        out = _filter_image(name, args, img, None, z, lam)
        p = float(np.mean([psnr(o, r, ref.dynamic_range) for o, r in zip(out.planes, ref.planes)]))
        s = float(np.mean([ssim(o, r, ref.dynamic_range) for o, r in zip(out.planes, ref.planes)]))
        return name.upper(), z, lam, p, s

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        results = list(pool.map(run, cells))
    report = MetricReport()
    for row in results:
        report.add(*row)
    if args.output is None:
        sys.stdout.write(report_csv(report))
    else:
        emit_report(report, args.output)
    return 0


def _save_field(prefix: str, name: str, raw: np.ndarray, normalized: np.ndarray) -> None:
    save_image(MultiPlaneImage((normalized,)), f"{prefix}_{name}.png", clamp=True)
    buf = io.BytesIO()
    np.save(buf, raw, allow_pickle=False)
    write_bytes_atomic(f"{prefix}_{name}.npy", buf.getvalue())


def _minmax(field):
    lo, hi = float(field.min()), float(field.max())
    return np.zeros_like(field) if hi <= lo else (field - lo) / (hi - lo)


def cmd_weights(args) -> int:
    G = to_luminance(load_image(args.input))
    if args.filter == "gif":
        raise UsageError("GIF has no edge-aware weighting to dump")
    params = BaselineParams(radius=args.zeta, lam=args.lam, epsilon=args.epsilon)
    if args.filter == "wgif":
        fields = {"phi": wgif_weighting(G, params.eps)}
    elif args.filter == "ggif":
        chi = ggif_chi(G, args.zeta)
        shifted = chi + params.eps
        fields = {"phi_hat": shifted * np.mean(1.0 / shifted), "gamma": ggif_gamma(chi)}
    else:
        diag = dump_diagnostics(G, G, _epgif_params(args))
        fields = {k: diag[k] for k in ("psi", "tau", "eta", "w")}
    for name, raw in fields.items():
        _save_field(args.output, name, raw, _minmax(raw))
    return 0


def cmd_profile(args) -> int:
    img = load_image(args.input)
    if not 0 <= args.channel < len(img):
        raise UsageError(f"channel {args.channel} outside [0, {len(img)})")
    if not 0 <= args.row < img.height:
        raise UsageError(f"row {args.row} outside [0, {img.height})")
    X = img.planes[args.channel]
    outputs = [(name, _plane_filter(name, args)(X, X)) for name in args.filters]
    _write_text(args.output, row_profile(X, outputs, args.row))
    return 0


def cmd_synth(args) -> int:
    if args.size < 16:
        raise UsageError("--size must be >= 16")
    kind = args.kind
    if kind == "mosaic":
        arr = synthetic.mosaic(args.size, seed=args.seed)
    elif kind == "noisy-mosaic":
        arr = synthetic.add_noise(synthetic.mosaic(args.size, seed=args.seed), args.sigma, args.noise_seed)
    elif kind == "step":
        arr = synthetic.step(args.size)
    elif kind == "textured-step":
        arr = synthetic.textured_step(args.size, seed=args.seed)
    else:
        dark, bright = synthetic.bracketed_pair(args.size, args.seed)
        arr = dark if kind == "dark" else bright
    save_image(MultiPlaneImage.from_array(arr), args.output, clamp=True, bit_depth=args.bit_depth)
    return 0


COMMANDS = {
    "smooth": cmd_smooth,
    "enhance": cmd_enhance,
    "fuse": cmd_fuse,
    "compare": cmd_compare,
    "weights": cmd_weights,
    "profile": cmd_profile,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ShapeError as exc:
        print(f"epgif: shape mismatch: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (ParameterError, UsageError) as exc:
        print(f"epgif: invalid arguments: {exc}", file=sys.stderr)
        return EXIT_ARGS
    except (OSError, ImageFormatError) as exc:
        print(f"epgif: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
