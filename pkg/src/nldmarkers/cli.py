"""Command line entry point: ``nldmarkers {extract,stats,synth,filter}``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from nldmarkers.fileio import ManifestError, read_feature_table, read_frame, read_manifest, write_frame
from nldmarkers.hurst import HurstConfig
from nldmarkers.pipeline import RunConfig, config_header, run_pipeline, write_stats
from nldmarkers.preprocess import FilterSpec, preprocess, select_channel

log = logging.getLogger("nldmarkers")


def _add_processing_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fs", type=float, default=300.0, help="sampling rate in Hz (default 300)")
    p.add_argument("--channel", default="F4", help="channel used when the manifest gives none (default F4)")
    p.add_argument("--highpass", type=float, default=1.0, help="high-pass cutoff in Hz (default 1.0)")
    p.add_argument("--notch", type=float, default=50.0, help="notch frequency in Hz (default 50)")
    p.add_argument("--notch-q", type=float, default=30.0)
    p.add_argument("--filter-order", type=int, default=4)
    p.add_argument("--causal", action="store_true", help="single forward pass instead of zero-phase filtering")


def _filter_spec(args) -> FilterSpec:
    return FilterSpec(args.highpass, args.notch, args.notch_q, args.filter_order, not args.causal)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nldmarkers", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    ex = sub.add_parser("extract", help="manifest -> features.csv and trajectories")
    ex.add_argument("--manifest", required=True, type=Path)
    ex.add_argument("--out", required=True, type=Path)
    _add_processing_flags(ex)
    ex.add_argument("--hurst-wmin", type=int, default=16)
    ex.add_argument("--hurst-wmax-frac", type=float, default=0.25)
    ex.add_argument("--hurst-nwin", type=int, default=20)
    ex.add_argument("--fd-depth", type=int, default=8, help="box sizes 2^-1 .. 2^-depth (default 8)")
    ex.add_argument("--entropy-bins", type=int, default=128)
    ex.add_argument("--entropy-c", type=float, default=1.0)
    ex.add_argument("--alpha", type=float, default=0.05)
    ex.add_argument("--svg", action="store_true", help="also render trajectory charts")

    st = sub.add_parser("stats", help="features -> correlation matrix, F-test, first/last H delta")
    st.add_argument("--features", required=True, type=Path, help="features.csv or features_full.csv")
    st.add_argument("--out", required=True, type=Path)
    st.add_argument("--alpha", type=float, default=0.05)
    st.add_argument("--vars", default="H,D,S,Experience,Age", help="comma-separated correlation variables")
    st.add_argument("--pairs", default="S:H,S:D,H:D", help="F-test column pairs, e.g. S:H,Subject:D")
    st.add_argument("--svg", action="store_true", help="also render the correlation heatmap")

    sy = sub.add_parser("synth", help="write a synthetic fixture file")
    sy.add_argument("kind", choices=("fgn", "white", "koch"))
    sy.add_argument("--out", required=True, type=Path)
    sy.add_argument("--n", type=int, default=4096)
    sy.add_argument("--hurst", type=float, default=0.5, help="target H for fgn")
    sy.add_argument("--seed", type=int, default=0)
    sy.add_argument("--depth", type=int, default=5, help="Koch recursion depth")
    sy.add_argument("--channel", default="F4", help="column name for signal fixtures")

    fl = sub.add_parser("filter", help="apply the preprocessing chain to one recording")
    fl.add_argument("--input", required=True, type=Path)
    fl.add_argument("--out", required=True, type=Path)
    _add_processing_flags(fl)
    return parser


def _cmd_extract(args) -> int:
    cfg = RunConfig(
        sample_rate=args.fs,
        filters=_filter_spec(args),
        hurst=HurstConfig(args.hurst_wmin, args.hurst_wmax_frac, args.hurst_nwin),
        fd_depth=args.fd_depth,
        entropy_bins=args.entropy_bins,
        entropy_c=args.entropy_c,
        alpha=args.alpha,
        out_dir=args.out,
        emit_svg=args.svg,
    )
    manifest = read_manifest(args.manifest, default_channel=args.channel)
    result = run_pipeline(manifest, cfg)
    print(f"{len(result.table)} rows written to {args.out / 'features.csv'}")
    if result.errors:
        print(f"{len(result.errors)} entries failed; see {args.out / 'errors.txt'}", file=sys.stderr)
        return 1
    return 0


def _cmd_stats(args) -> int:
    table = read_feature_table(args.features)
    variables = [v.strip() for v in args.vars.split(",") if v.strip()]
    pairs = [tuple(p.split(":")) for p in args.pairs.split(",") if p.strip()]
    if any(len(p) != 2 for p in pairs):
        raise ValueError(f"bad --pairs value {args.pairs!r}; expected A:B,C:D")
    paths = write_stats(table, args.out, args.alpha, variables, pairs, args.svg)
    for p in paths:
        print(p)
    return 0


def _cmd_synth(args) -> int:
    from nldmarkers import oracles

    if args.kind == "koch":
        curve = oracles.gen_koch(oracles.KochSpec(args.depth))
        write_frame(args.out, {"x": curve.points[:, 0], "y": curve.points[:, 1]}, [f"koch depth={args.depth}"])
        return 0
    if args.kind == "fgn":
        series = oracles.gen_fgn(oracles.FgnSpec(args.hurst, args.n, args.seed))
        note = f"fgn h_true={args.hurst} n={args.n} seed={args.seed}"
    else:
        series = oracles.gen_white(args.n, args.seed)
        note = f"white n={args.n} seed={args.seed}"
    write_frame(args.out, {args.channel: series.samples}, [note])
    return 0


def _cmd_filter(args) -> int:
    spec = _filter_spec(args)
    series = select_channel(read_frame(args.input), args.channel, args.fs)
    clean = preprocess(series, spec)
    cfg = RunConfig(sample_rate=args.fs, filters=spec)
    header = [h for h in config_header(cfg) if h.startswith(("nldmarkers", "sample_rate", "filter."))]
    write_frame(args.out, {args.channel: clean.samples}, header)
    return 0


COMMANDS = {"extract": _cmd_extract, "stats": _cmd_stats, "synth": _cmd_synth, "filter": _cmd_filter}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ManifestError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
