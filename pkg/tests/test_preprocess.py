import numpy as np
import pytest

from nldmarkers.preprocess import (
    FilterSpec,
    detrend_linear,
    highpass,
    highpass_sos,
    magnitude_response,
    notch,
    notch_sos,
    preprocess,
    select_channel,
)
from nldmarkers.series import SampledSeries

FS = 300.0


def sine(f, seconds=20.0, fs=FS, amp=1.0, phase=0.0):
    t = np.arange(int(seconds * fs)) / fs
    return SampledSeries(amp * np.sin(2 * np.pi * f * t + phase), fs)


def tone_amplitude(y, f, fs=FS):
    """Least-squares amplitude of the ``f`` Hz component of ``y``."""
    t = np.arange(y.size) / fs
    basis = np.column_stack([np.sin(2 * np.pi * f * t), np.cos(2 * np.pi * f * t)])
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    return float(np.hypot(*coef))


def middle(y, frac=0.25):
    k = int(y.size * frac)
    return y[k:-k]


def direct_response(sos, f, fs):
    """Evaluate the cascade transfer function by plain polynomial evaluation in z^-1."""
    zinv = np.exp(-2j * np.pi * np.asarray(f) / fs)
    h = np.ones_like(zinv)
    for b0, b1, b2, a0, a1, a2 in sos:
        h *= (b0 + b1 * zinv + b2 * zinv**2) / (a0 + a1 * zinv + a2 * zinv**2)
    return np.abs(h)


# detrend -------------------------------------------------------------------

def test_detrend_ramp_and_constant():
    assert np.max(np.abs(detrend_linear(SampledSeries(np.arange(100.0))).samples)) < 1e-9
    assert np.max(np.abs(detrend_linear(SampledSeries(np.full(50, 5.0))).samples)) < 1e-9


def test_detrend_recovers_sine_under_ramp():
    n = 1000
    t = np.arange(n) / FS
    s = np.sin(2 * np.pi * 10 * t)
    ramp = 3.0 + 0.7 * np.arange(n)
    # oracle: closed-form normal equations for the sine's own best line
    i = np.arange(n, dtype=float)
    sx, sxx, sy, sxy = i.sum(), (i * i).sum(), s.sum(), (i * s).sum()
    slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
    icpt = (sy - slope * sx) / n
    expected = s - (icpt + slope * i)
    got = detrend_linear(SampledSeries(ramp + s, FS)).samples
    assert np.max(np.abs(got - expected)) < 1e-6
    assert np.max(np.abs(got - s)) < 0.02  # the sine alone carries a small LS line


def test_detrend_zero_mean_zero_slope_and_idempotent(rng):
    x = SampledSeries(rng.standard_normal(500).cumsum(), FS)
    d = detrend_linear(x)
    assert abs(d.samples.mean()) < 1e-9
    assert abs(np.polyfit(np.arange(500), d.samples, 1)[0]) < 1e-12
    np.testing.assert_allclose(detrend_linear(d).samples, d.samples, atol=1e-9)


def test_detrend_needs_two_samples():
    with pytest.raises(ValueError):
        detrend_linear(SampledSeries([1.0]))


# high-pass -----------------------------------------------------------------

def test_highpass_removes_dc():
    y = highpass(SampledSeries(np.full(6000, 5.0), FS)).samples
    assert np.max(np.abs(middle(y))) < 5e-3


def test_highpass_time_domain_attenuation():
    low = highpass(sine(0.1, seconds=120)).samples
    assert 20 * np.log10(tone_amplitude(middle(low), 0.1)) <= -30
    passband = highpass(sine(10.0)).samples
    assert abs(20 * np.log10(tone_amplitude(middle(passband), 10.0))) <= 1


@pytest.mark.parametrize("zero_phase", [True, False])
def test_highpass_analytic_response(zero_phase):
    spec = FilterSpec(zero_phase=zero_phase)
    f = np.array([0.1, 0.5, 2.0, 10.0, 60.0])
    single = direct_response(highpass_sos(spec, FS), f, FS)
    # bilinear Butterworth: |H|^2 = 1 / (1 + (tan(pi fc/fs) / tan(pi f/fs))^(2N))
    ratio = np.tan(np.pi * spec.highpass_cutoff / FS) / np.tan(np.pi * f / FS)
    np.testing.assert_allclose(single, 1 / np.sqrt(1 + ratio ** (2 * spec.filter_order)), rtol=1e-9)
    eff = single**2 if zero_phase else single
    np.testing.assert_allclose(magnitude_response("highpass", spec, FS, f), eff, rtol=1e-9)


def test_highpass_config_error():
    with pytest.raises(ValueError):
        highpass(SampledSeries(np.zeros(100), 1.5))


# notch ---------------------------------------------------------------------

def test_notch_time_domain():
    y50 = notch(sine(50.0)).samples
    assert 20 * np.log10(tone_amplitude(middle(y50), 50.0)) <= -30
    y10 = notch(sine(10.0)).samples
    assert abs(20 * np.log10(tone_amplitude(middle(y10), 10.0))) <= 1
    c = notch(SampledSeries(np.full(3000, 2.5), FS)).samples
    assert np.max(np.abs(c - 2.5)) < 1e-6


def test_notch_bandwidth_and_response():
    spec = FilterSpec()
    sos = notch_sos(spec, FS)
    bw = spec.notch_freq / spec.notch_q
    # -3 dB points of a second-order notch sit at f0 +/- bw/2 (approximately, for narrow notches)
    f = np.linspace(40, 60, 20001)
    mag = direct_response(sos, f, FS)
    inside = f[mag < 1 / np.sqrt(2)]
    assert inside.max() - inside.min() == pytest.approx(bw, rel=0.02)
    np.testing.assert_allclose(magnitude_response("notch", spec, FS, f), mag**2, rtol=1e-9, atol=1e-15)


def test_notch_config_error():
    with pytest.raises(ValueError):
        notch(SampledSeries(np.zeros(100), 100.0))


# shared properties ---------------------------------------------------------

@pytest.mark.parametrize("op", [highpass, notch, preprocess])
@pytest.mark.parametrize("zero_phase", [True, False])
def test_linearity(op, zero_phase, rng):
    spec = FilterSpec(zero_phase=zero_phase)
    x = rng.standard_normal(3000)
    y = rng.standard_normal(3000).cumsum()
    a, b = 1.7, -0.4
    lhs = op(SampledSeries(a * x + b * y, FS), spec).samples
    rhs = a * op(SampledSeries(x, FS), spec).samples + b * op(SampledSeries(y, FS), spec).samples
    assert np.max(np.abs(lhs - rhs)) <= 1e-9 * max(1.0, np.max(np.abs(rhs)))


@pytest.mark.parametrize("op", [highpass, notch])
def test_zero_phase_has_no_lag(op):
    x = sine(10.0, seconds=10, phase=0.3)
    y = op(x).samples
    xm, ym = middle(x.samples), middle(y)
    lags = np.arange(-15, 16)
    xc = [np.dot(xm[20:-20], np.roll(ym, k)[20:-20]) for k in lags]
    assert lags[int(np.argmax(xc))] == 0


def test_filter_spec_validation():
    with pytest.raises(ValueError):
        FilterSpec(filter_order=3)
    with pytest.raises(ValueError):
        FilterSpec(notch_q=0)
    with pytest.raises(ValueError):
        FilterSpec(highpass_cutoff=60).check(300)
    with pytest.raises(ValueError):
        FilterSpec().check(90)
    FilterSpec().check(300)


# channel selection ---------------------------------------------------------

def test_select_channel():
    frame = {"F3": np.array([1.0, 2.0]), "F4": np.array([3.0, 4.0])}
    s = select_channel(frame, "F4", FS)
    np.testing.assert_array_equal(s.samples, [3.0, 4.0])
    assert s.sample_rate == FS
    with pytest.raises(KeyError, match="F3, F4"):
        select_channel(frame, "XX", FS)


def test_select_channel_headset_layout():
    names = ["F3", "F4", "C3", "C4", "P3", "Pz", "P4"]
    frame = {n: np.full(4, float(i)) for i, n in enumerate(names)}
    np.testing.assert_array_equal(select_channel(frame, "Pz", FS).samples, np.full(4, 5.0))
