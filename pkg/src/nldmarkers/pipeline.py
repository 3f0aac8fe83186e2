"""Batch extraction: manifest -> preprocess -> (S, H, D) per session -> report files."""
from __future__ import annotations

import csv
import io
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path

from nldmarkers import __version__
from nldmarkers.entropy import DEFAULT_BINS, signal_entropy
from nldmarkers.fractal import FractalFit, dyadic_grid, embed_signal, fractal_dimension
from nldmarkers.hurst import HurstConfig, HurstFit, hurst_exponent
from nldmarkers.fileio import FEATURE_COLUMNS, Manifest, read_frame, sha256_file
from nldmarkers.preprocess import FilterSpec, preprocess, select_channel
from nldmarkers.stats import (
    FeatureRow,
    FeatureTable,
    first_last_delta,
    f_test_two_sample,
    pearson_matrix,
)

__all__ = [
    "RunConfig",
    "EntryResult",
    "PipelineResult",
    "extract_features",
    "run_pipeline",
    "emit_trajectories",
    "write_stats",
    "config_header",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    sample_rate: float = 300.0
    filters: FilterSpec = field(default_factory=FilterSpec)
    hurst: HurstConfig = field(default_factory=HurstConfig)
    fd_depth: int = 8
    entropy_bins: int = DEFAULT_BINS
    entropy_c: float = 1.0
    alpha: float = 0.05
    out_dir: Path = Path("out")
    emit_svg: bool = False

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        self.filters.check(self.sample_rate)
        if self.fd_depth < 4:
            raise ValueError("fd_depth must be >= 4 (the box-counting fit needs 4 sizes)")
        if self.entropy_bins < 1 or not self.entropy_c > 0:
            raise ValueError("entropy_bins must be >= 1 and entropy_c > 0")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")

    def parameters(self) -> dict:
        p = {"sample_rate": self.sample_rate}
        p.update({f"filter.{k}": v for k, v in asdict(self.filters).items()})
        p.update({f"hurst.{k}": v for k, v in asdict(self.hurst).items()})
        p.update(fd_depth=self.fd_depth, entropy_bins=self.entropy_bins,
                 entropy_c=self.entropy_c, alpha=self.alpha)
        return p


@dataclass
class EntryResult:
    row: FeatureRow
    h_r_squared: float
    d_r_squared: float
    h_out_of_range: bool
    d_out_of_range: bool


@dataclass
class PipelineResult:
    table: FeatureTable
    entries: list[EntryResult]
    errors: list[str]

    @property
    def ok(self) -> bool:
        return not self.errors


def extract_features(series, cfg: RunConfig) -> tuple[float, HurstFit, FractalFit]:
    """Preprocess one channel and return ``(entropy, hurst_fit, fractal_fit)``."""
    clean = preprocess(series, cfg.filters)
    ent = signal_entropy(clean, cfg.entropy_bins, cfg.entropy_c)
    hfit = hurst_exponent(clean, cfg.hurst)
    dfit = fractal_dimension(embed_signal(clean), dyadic_grid(cfg.fd_depth))
    return ent.s, hfit, dfit


def config_header(cfg: RunConfig, digests: list[tuple[str, str]] = ()) -> list[str]:
    lines = [f"nldmarkers {__version__}"]
    lines += [f"{k}={v}" for k, v in cfg.parameters().items()]
    lines += [f"input {name} sha256={d}" for name, d in digests]
    return lines


def _fmt_num(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:g}"


def _write_csv(path: Path, header: list[str], columns, rows) -> None:
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8")


def run_pipeline(manifest: Manifest, cfg: RunConfig) -> PipelineResult:
    """Process every manifest entry; a failing entry is recorded and the rest still run."""
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not manifest.entries:
        log.warning("manifest is empty; writing an empty feature table")

    results: list[EntryResult] = []
    errors: list[str] = []
    digests: list[tuple[str, str]] = []
    for i, e in enumerate(manifest.entries, start=1):
        tag = f"entry {i} (subject {e.subject_id}, {e.session_label}, {e.file_path})"
        try:
            digests.append((str(e.file_path), sha256_file(e.file_path)))
            frame = read_frame(e.file_path)
            series = select_channel(frame, e.channel, cfg.sample_rate)
            s, hfit, dfit = extract_features(series, cfg)
            row = FeatureRow(e.subject_id, e.session_label, s, hfit.h, dfit.d, e.age, e.experience)
            results.append(EntryResult(row, hfit.r_squared, dfit.r_squared, hfit.out_of_range, dfit.out_of_range))
        except (OSError, ValueError, KeyError, ArithmeticError) as exc:
            msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
            errors.append(f"{tag}: {type(exc).__name__}: {msg}")
            log.error("%s failed: %s", tag, msg)

    table = FeatureTable([r.row for r in results]).sorted()
    by_row = {id(r.row): r for r in results}
    ordered = [by_row[id(row)] for row in table.rows]

    header = config_header(cfg, digests)
    _write_csv(out / "features.csv", header, FEATURE_COLUMNS, [
        (r.subject_id, r.session_label, f"{r.s:.2f}", f"{r.h:.2f}", f"{r.d:.2f}", _fmt_num(r.age), _fmt_num(r.experience))
        for r in table.rows
    ])
    _write_csv(out / "features_full.csv", header,
               FEATURE_COLUMNS + ("H_r_squared", "D_r_squared", "H_out_of_range", "D_out_of_range"), [
        (x.row.subject_id, x.row.session_label, repr(x.row.s), repr(x.row.h), repr(x.row.d),
         _fmt_num(x.row.age), _fmt_num(x.row.experience), repr(x.h_r_squared), repr(x.d_r_squared),
         int(x.h_out_of_range), int(x.d_out_of_range))
        for x in ordered
    ])
    (out / "errors.txt").write_text("".join(f"{m}\n" for m in errors), encoding="utf-8")
    if len(table):
        emit_trajectories(table, out, cfg.emit_svg, header)
    return PipelineResult(table, ordered, errors)


def trajectory_rows(t: FeatureTable, feature: str) -> list[tuple[int, int, float]]:
    """``(subject_id, session_index, value)`` with 1-based indices in canonical session order."""
    rows = []
    for sid, sessions in t.subjects().items():
        for k, r in enumerate(sessions, start=1):
            rows.append((sid, k, float(getattr(r, feature.lower()))))
    return rows


def emit_trajectories(t: FeatureTable, out, svg: bool = False, header=()) -> list[Path]:
    """Write ``trajectories_{S,H,D}.csv`` and, with ``svg``, one line chart per feature."""
    out = Path(out)
    written = []
    for feat in ("S", "H", "D"):
        rows = trajectory_rows(t, feat)
        path = out / f"trajectories_{feat}.csv"
        _write_csv(path, list(header), ("subject_id", "session_index", "value"),
                   [(sid, k, repr(v)) for sid, k, v in rows])
        written.append(path)
        if svg:
            from nldmarkers.plotting import plot_trajectories

            written.append(plot_trajectories(rows, feat, out / f"trajectories_{feat}.svg"))
    return written


def write_stats(t: FeatureTable, out, alpha: float = 0.05, variables=("H", "D", "S", "Experience", "Age"),
                pairs=(("S", "H"), ("S", "D"), ("H", "D")), svg: bool = False) -> list[Path]:
    """Correlation matrix, F-test report and first/last H delta for a feature table."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    cm = pearson_matrix(t, variables)
    _write_csv(out / "correlation.csv", [], ["", *cm.labels],
               [[lab, *(repr(float(v)) for v in cm.values[i])] for i, lab in enumerate(cm.labels)])
    written.append(out / "correlation.csv")

    blocks = [f"F-Test Two-Sample for Variances (alpha={alpha})"]
    for a, b in pairs:
        rep = f_test_two_sample(t.column(a), t.column(b), alpha, labels=(a, b))
        verdict = "significant" if rep.significant else "not significant"
        blocks.append(f"{rep.to_text()}\nresult: {verdict} at alpha={alpha}")
    (out / "ftest.txt").write_text("\n\n".join(blocks) + "\n", encoding="utf-8")
    written.append(out / "ftest.txt")

    deltas = first_last_delta(t)
    _write_csv(out / "first_last_delta.csv", [], ("subject_id", "first_session", "last_session", "h_first", "h_last", "delta", "flag"), [
        (d.subject_id, d.first_session, d.last_session or "",
         "" if d.h_first is None else repr(d.h_first), "" if d.h_last is None else repr(d.h_last),
         "" if d.delta is None else repr(d.delta), "single_session" if d.flagged else "")
        for d in deltas
    ])
    written.append(out / "first_last_delta.csv")

    if svg:
        from nldmarkers.plotting import plot_correlation

        written.append(plot_correlation(cm, out / "correlation.svg"))
    return written
