import math
import warnings

import numpy as np
import pytest

from gapfill import (
    GridTooCoarse,
    MaskViolation,
    SignalWindow,
    WindowTooSmall,
    ZeroSignal,
    build_kernel,
    degeneracy_diagnostic,
    l1_mass,
    recover,
    relative_error,
    robustness_bound,
)
from gapfill.band_space import BandGeometry
from gapfill.recovery import band_grid


def band_limited(times, cut=2.0, seed=0):
    """Random sum of shifted sincs with spectrum inside ``|w| < cut``; exact values known."""
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(6)
    shifts = rng.uniform(-8, 8, 6)
    u = np.subtract.outer(np.asarray(times, dtype=float), shifts)
    return (cut / math.pi) * np.sinc(cut * u / math.pi) @ amps


@pytest.fixture(scope="module")
def kernel03():
    return build_kernel([0, 3], 15, 200)


def window_for(kernel, values_fn, shift=0, extra=10):
    R = kernel.tap_radius
    start = kernel.times[0] + shift - R - extra
    t = np.arange(start, kernel.times[-1] + shift + R + extra + 1)
    return SignalWindow.from_values(start, values_fn(t), [s + shift for s in kernel.times])


def test_window_basics():
    w = SignalWindow.from_values(-2, [1, 2, 3, 4, 5], [0])
    assert w.end == 2 and w.missing_times == (0,)
    assert w.value(1) == 4.0
    assert w.shifted(3).missing_times == (3,)
    with pytest.raises(ValueError):
        SignalWindow.from_values(0, [1, 2], [5])
    p = w.with_missing([1, 2], poison=np.nan)
    assert p.missing_times == (1, 2) and np.isnan(p.samples[-2:]).all()


def test_recovery_improves_with_radius():
    fn = lambda t: band_limited(t, cut=1.5, seed=5)  # noqa: E731
    truth = fn(np.array([0, 15]))
    errs = []
    for R in (50, 200, 800):
        k = build_kernel([0, 15], 15, R)
        errs.append(np.max(np.abs(recover(window_for(k, fn), k).estimates - truth)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3


def test_in_band_signal_recovered(kernel03):
    w = window_for(kernel03, lambda t: band_limited(t, cut=1.5))
    res = recover(w, kernel03)
    truth = band_limited(np.array([0, 3]), cut=1.5)
    assert np.max(np.abs(res.estimates - truth)) < 0.05


def test_linearity(kernel03):
    a = window_for(kernel03, lambda t: band_limited(t, seed=1))
    b = window_for(kernel03, lambda t: band_limited(t, seed=2))
    combo = SignalWindow(a.start, 2 * a.samples - 0.5 * b.samples, a.missing)
    ra, rb, rc = (recover(x, kernel03).estimates for x in (a, b, combo))
    np.testing.assert_allclose(rc, 2 * ra - 0.5 * rb, rtol=1e-12, atol=1e-12)


def test_shift_invariance(kernel03):
    fn = lambda t: band_limited(t, seed=3)  # noqa: E731
    base = window_for(kernel03, fn)
    moved = SignalWindow(base.start + 7, base.samples, base.shifted(7).missing)
    r0 = recover(base, kernel03)
    r7 = recover(moved, kernel03, shift=7)
    assert r7.times == (7, 10)
    np.testing.assert_array_equal(r0.estimates, r7.estimates)


def test_nan_poisoning_does_not_propagate(kernel03):
    w = window_for(kernel03, lambda t: band_limited(t, seed=4))
    clean = recover(w, kernel03).estimates
    for poison in (np.nan, np.inf, 1e300):
        p = w.with_missing(w.missing_times, poison=poison)
        np.testing.assert_array_equal(recover(p, kernel03).estimates, clean)


def test_mask_mismatch_names_index(kernel03):
    w = window_for(kernel03, lambda t: band_limited(t))
    wrong = w.with_missing([0, 4])
    with pytest.raises(MaskViolation) as exc:
        recover(wrong, kernel03)
    assert exc.value.index in (3, 4)
    extra = w.with_missing([0, 3, 9])
    with pytest.raises(MaskViolation, match="9") as exc:
        recover(extra, kernel03)
    assert exc.value.index == 9


def test_window_too_small_warns(kernel03):
    t = np.arange(-50, 51)
    w = SignalWindow.from_values(-50, band_limited(t), [0, 3])
    with pytest.warns(WindowTooSmall):
        recover(w, kernel03)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        recover(w, kernel03, truncate=True)


def test_golden_value():
    # frozen regression value for a fixed deterministic input
    k = build_kernel([0, 3], 15, 60)
    t = np.arange(-63, 67)
    w = SignalWindow.from_values(-63, np.cos(0.7 * t) + 0.3 * np.sin(1.9 * t), [0, 3])
    est = recover(w, k).estimates
    np.testing.assert_allclose(est, [1.2246021088216668, -0.7369350482230974], rtol=1e-12)


def test_relative_error_definition():
    truth = np.array([1.0, -1.0])
    est = np.array([1.1, -1.3])
    x = np.array([0.0, 1.0, -1.0, 2.0, 0.0])  # N = 2
    expected = math.sqrt((0.01 + 0.09) / 2) / math.sqrt(6.0 / 2)
    assert relative_error(est, truth, x) == pytest.approx(expected, rel=1e-15)
    w = SignalWindow.from_values(-2, [0.0, np.nan, np.nan, 2.0, 0.0], [-1, 0])
    assert relative_error(est, truth, w) == pytest.approx(expected, rel=1e-15)
    with pytest.raises(ZeroSignal):
        relative_error(est, truth, np.zeros(5))


def test_robustness_bound():
    assert robustness_bound(0.1, 0.05, 14.0) == pytest.approx(0.1 + 0.75)
    with pytest.raises(ValueError):
        robustness_bound(-1, 0, 0)


def test_degeneracy_diagnostic():
    k = build_kernel([0, 3], 15, 20)
    geom = BandGeometry(15)
    zero = lambda om: np.where(np.abs(om) < geom.edge, 1.0, 0.0)  # noqa: E731
    assert degeneracy_diagnostic(zero, k.transfer.w, geom) == (0.0, 0.0)
    ones = lambda om: np.ones_like(om)  # noqa: E731
    zeta, psi = degeneracy_diagnostic(ones, k.transfer.w, geom)
    assert psi == pytest.approx(math.sqrt(2 * math.pi / 15), rel=1e-12)
    band_l1 = l1_mass(k.transfer) - 2 * geom.edge
    assert zeta == pytest.approx(band_l1, rel=1e-4)
    om = band_grid(geom, 10)
    with pytest.raises(GridTooCoarse):
        degeneracy_diagnostic(np.ones_like(om), k.transfer.w, geom, omega=om)
