"""Exit criteria for the package, one test per criterion.

Each test records a PASS/FAIL line (shown in the terminal summary) and
asserts at the pinned tolerance.
"""
import csv
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from nldmarkers.entropy import AmplitudeHistogram, shannon_entropy
from nldmarkers.fileio import read_feature_table, read_manifest, write_frame
from nldmarkers.fractal import fractal_dimension
from nldmarkers.hurst import hurst_exponent
from nldmarkers.oracles import FgnSpec, KochSpec, gen_fgn, gen_koch, gen_white
from nldmarkers.pipeline import RunConfig, extract_features, run_pipeline
from nldmarkers.preprocess import FilterSpec, magnitude_response
from nldmarkers.series import SampledSeries
from nldmarkers.stats import f_cdf, f_crit, first_last_delta, pearson

DATA = Path(__file__).parent / "data"


def db(gain):
    return 20 * np.log10(gain)


def test_01_koch_dimension(acceptance):
    t0 = time.perf_counter()
    d = fractal_dimension(gen_koch(KochSpec(6))).d
    dt = time.perf_counter() - t0
    ok = 1.18 <= d <= 1.34 and dt < 5
    acceptance("1 Koch dimension", ok, f"d={d:.4f} (target [1.18, 1.34], log4/log3={math.log(4) / math.log(3):.4f}), {dt:.2f}s < 5s")
    assert ok


def test_02_f_critical_value(acceptance):
    t0 = time.perf_counter()
    c = f_crit(0.05, 159, 159)
    dt = time.perf_counter() - t0
    ok = abs(c - 1.3002) <= 0.001 and dt < 1
    acceptance("2 F critical value", ok,
               f"f_crit(0.05, 159, 159)={c:.6f} vs 1.3002 +/- 0.001 ({dt * 1e3:.1f} ms); "
               f"the published 1.300182 equals f_crit(0.05, 158, 158)={f_crit(0.05, 158, 158):.6f}")
    assert ok


def test_03_hurst_white_noise(acceptance):
    t0 = time.perf_counter()
    hs = [hurst_exponent(gen_white(4096, seed)).h for seed in range(20)]
    dt = time.perf_counter() - t0
    m = float(np.mean(hs))
    ok = abs(m - 0.5) <= 0.08 and dt < 30
    bias = f"; classical R/S upward bias {m - 0.5:+.3f}" if m > 0.5 else ""
    acceptance("3 Hurst white-noise anchor", ok, f"mean h={m:.4f} (0.5 +/- 0.08){bias}, {dt:.2f}s < 30s")
    assert ok


def test_04_hurst_oracle_sweep(acceptance):
    t0 = time.perf_counter()
    means = {}
    for h in (0.3, 0.7, 0.9):
        means[h] = float(np.mean([hurst_exponent(gen_fgn(FgnSpec(h, 2**14, seed))).h for seed in range(20)]))
    dt = time.perf_counter() - t0
    within = all(abs(means[h] - h) <= 0.08 for h in means)
    ordered = means[0.3] < means[0.7] < means[0.9]
    ok = within and ordered and dt < 120
    detail = ", ".join(f"H={h}: {v:.4f}" for h, v in means.items())
    acceptance("4 Hurst oracle sweep", ok, f"{detail} (each +/- 0.08, strictly increasing={ordered}), {dt:.1f}s < 120s")
    assert ok


def test_05_entropy_exactness(acceptance):
    errs = []
    for m in (1, 2, 3, 10, 64, 128, 1000):
        p = np.full(m, 1.0 / m)
        h = AmplitudeHistogram(m, p, np.linspace(0, 1, m + 1))
        for c in (1.0, 2.5):
            errs.append(abs(shannon_entropy(h, c).s - c * math.log(m)))
    two = AmplitudeHistogram(2, np.array([0.25, 0.75]), np.array([0.0, 0.5, 1.0]))
    direct = -(0.25 * math.log(0.25) + 0.75 * math.log(0.75))
    s = shannon_entropy(two, 1.0).s
    ok = max(errs) <= 1e-12 and abs(s - 0.562335) <= 1e-6 and abs(s - direct) <= 1e-12
    acceptance("5 Entropy exactness", ok, f"max |s - c ln m|={max(errs):.1e} (<=1e-12); p=(.25,.75) -> {s:.7f} (0.562335 +/- 1e-6)")
    assert ok


def _f_density(x, d1, d2):
    logc = math.lgamma((d1 + d2) / 2) - math.lgamma(d1 / 2) - math.lgamma(d2 / 2) + (d1 / 2) * math.log(d1 / d2)
    return math.exp(logc + (d1 / 2 - 1) * math.log(x) - ((d1 + d2) / 2) * math.log1p(d1 * x / d2))


def test_06_statistics_exactness(acceptance):
    x = np.array([1.0, 2.0, 3.0])
    triples = [
        (x, x, 1.0),
        (x, -x, -1.0),
        (x, np.array([1.0, 2.0, 4.0]), math.sqrt(27 / 28)),
        (x, np.array([3.0, 1.0, 2.0]), -0.5),
        (x, np.array([2.0, 2.0, 5.0]), math.sqrt(3) / 2),
    ]
    r_err = max(abs(pearson(a, b) - r) for a, b, r in triples)

    rng = np.random.default_rng(2024)
    f_err = 0.0
    for _ in range(50):
        d1, d2 = int(rng.integers(1, 61)), int(rng.integers(1, 61))
        xv = float(np.exp(rng.uniform(np.log(0.05), np.log(10.0))))
        ref, _ = integrate.quad(_f_density, 0.0, xv, args=(d1, d2), epsabs=1e-14, epsrel=1e-13, limit=500)
        f_err = max(f_err, abs(f_cdf(xv, d1, d2) - ref))
    ok = r_err <= 1e-12 and f_err <= 1e-9
    acceptance("6 Statistics exactness", ok, f"Pearson max err={r_err:.1e} (<=1e-12); f_cdf vs quadrature max err={f_err:.1e} over 50 points (<=1e-9)")
    assert ok


def test_07_filter_responses(acceptance):
    spec, fs = FilterSpec(), 300.0
    hp = magnitude_response("highpass", spec, fs, [0.1, 10.0])
    nt = magnitude_response("notch", spec, fs, [50.0, 10.0])
    hp01, hp10, nt50, nt10 = db(hp[0]), db(hp[1]), db(max(nt[0], 1e-300)), db(nt[1])
    ok = hp01 <= -30 and abs(hp10) <= 1 and nt50 <= -30 and abs(nt10) <= 1
    acceptance("7 Filter responses", ok,
               f"high-pass {hp01:.1f} dB @0.1 Hz, {hp10:+.4f} dB @10 Hz; notch {nt50:.1f} dB @50 Hz, {nt10:+.4f} dB @10 Hz")
    assert ok


def test_08_pipeline_determinism_and_layout(acceptance, tmp_path):
    for i in range(3):
        write_frame(tmp_path / f"r{i}.csv", {"F4": gen_white(2048, 100 + i).samples * 15.0})
    with open(tmp_path / "m.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["file_path", "subject_id", "session_label", "age", "experience"])
        w.writerows([("r0.csv", 1, "DAY_DRIVING_B", 44, 24), ("r1.csv", 1, "DAY_DRIVING_A", 44, 24),
                     ("r2.csv", 2, "RAIN_DRIVING_D", 53, 17)])
    manifest = read_manifest(tmp_path / "m.csv")
    run_pipeline(manifest, RunConfig(out_dir=tmp_path / "a"))
    run_pipeline(manifest, RunConfig(out_dir=tmp_path / "b"))
    a = (tmp_path / "a" / "features.csv").read_bytes()
    b = (tmp_path / "b" / "features.csv").read_bytes()
    header = [ln for ln in a.decode().splitlines() if not ln.startswith("#")][0]
    identical = a == b
    layout = header == "Subject,Session,S,H,D,Age,Driving Experience"
    (d,) = first_last_delta(read_feature_table(DATA / "table1_subject1.csv"))
    delta_ok = abs(d.delta - 0.10) <= 1e-12 and (d.h_first, d.h_last) == (0.69, 0.79)
    ok = identical and layout and delta_ok
    acceptance("8 Pipeline determinism and layout", ok,
               f"byte-identical={identical}, column order ok={layout}, subject-1 delta={d.delta:+.2f} ({d.h_first} -> {d.h_last})")
    assert ok


def _eeg_like(seed, fs=300.0, n=2**14):
    rng = np.random.default_rng(seed)
    t = np.arange(n) / fs
    background = gen_fgn(FgnSpec(0.7, n, seed)).samples * 8.0
    alpha = 12.0 * np.sin(2 * np.pi * rng.uniform(8, 12) * t + rng.uniform(0, 6.28)) * (1 + 0.3 * np.sin(2 * np.pi * 0.2 * t))
    theta = 6.0 * np.sin(2 * np.pi * rng.uniform(4, 7) * t)
    line = 20.0 * np.sin(2 * np.pi * 50.0 * t)
    drift = 30.0 * t / t[-1] + 10.0 * np.sin(2 * np.pi * 0.05 * t)
    return SampledSeries(background + alpha + theta + line + drift, fs)


def test_09_range_sanity_and_non_reproducibility(acceptance):
    cfg = RunConfig()
    inputs = [_eeg_like(s) for s in range(5)] + [gen_white(8192, 7, 300.0), gen_fgn(FgnSpec(0.8, 8192, 3), 300.0)]
    bad = []
    for i, x in enumerate(inputs):
        s, hfit, dfit = extract_features(x, cfg)
        if not (0 < hfit.h < 1.2 and 0.8 < dfit.d < 2.2 and 0 <= s <= math.log(cfg.entropy_bins)):
            bad.append((i, s, hfit.h, dfit.d))
    ok = not bad
    acceptance("9 Range sanity", ok,
               f"{len(inputs) - len(bad)}/{len(inputs)} EEG-like/synthetic inputs in H (0,1.2), D (0.8,2.2), S [0, ln {cfg.entropy_bins}]. "
               "Published absolute S/H/D are not reproducible: binning, window grid and embedding are unstated")
    assert ok, bad
