"""Truncated-convolution recovery of missing samples and error metrics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import GridTooCoarse, MaskViolation, WindowTooSmall, ZeroSignal
from .band_space import BandGeometry, CosineSpan
from .kernel import RecoveryKernel

__all__ = [
    "SignalWindow",
    "RecoveryResult",
    "recover",
    "relative_error",
    "robustness_bound",
    "band_grid",
    "degeneracy_diagnostic",
]


@dataclass(frozen=True, eq=False)
class SignalWindow:
    """Real samples on consecutive integer times ``start, start+1, ...``.

    ``missing[i]`` marks samples that must not be used; their entries in
    ``samples`` are ignored (NaN is fine).
    """

    start: int
    samples: np.ndarray
    missing: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        missing = np.asarray(self.missing, dtype=bool)
        if samples.ndim != 1 or samples.shape != missing.shape:
            raise ValueError("samples and missing mask must be 1-D of equal length")
        object.__setattr__(self, "start", int(self.start))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "missing", missing)

    @classmethod
    def from_values(cls, start, values, missing_times=()) -> "SignalWindow":
        values = np.asarray(values, dtype=float)
        mask = np.zeros(values.shape, dtype=bool)
        for t in missing_times:
            i = t - start
            if not 0 <= i < len(values):
                raise ValueError(f"missing time {t} outside window")
            mask[i] = True
        return cls(start, values, mask)

    @property
    def end(self) -> int:
        return self.start + len(self.samples) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.start, self.end + 1)

    @property
    def missing_times(self) -> tuple[int, ...]:
        return tuple(int(t) for t in self.times[self.missing])

    def value(self, t: int) -> float:
        return float(self.samples[t - self.start])

    def shifted(self, r: int) -> "SignalWindow":
        return SignalWindow(self.start + r, self.samples.copy(), self.missing.copy())

    def with_missing(self, times, poison: float | None = None) -> "SignalWindow":
        """Copy with exactly ``times`` marked missing, optionally overwritten by ``poison``."""
        w = SignalWindow.from_values(self.start, self.samples.copy(), times)
        if poison is not None:
            w.samples[w.missing] = poison
        return w


@dataclass(frozen=True)
class RecoveryResult:
    times: tuple[int, ...]
    estimates: np.ndarray
    used_taps: int
    truncation_radius: int

    def as_dict(self) -> dict[int, float]:
        return {t: float(v) for t, v in zip(self.times, self.estimates)}


def _check_mask(window: SignalWindow, kernel: RecoveryKernel, targets):
    target_set = set(targets)
    for t in targets:
        if not window.start <= t <= window.end:
            raise MaskViolation(f"missing time {t} lies outside the window", index=t)
        if not window.missing[t - window.start]:
            raise MaskViolation(
                f"index {t} is in the shifted missing set but not marked missing", index=t
            )
    for s in window.missing_times:
        if s not in target_set:
            hits = [t for t in targets if kernel.tap(t - s) != 0.0]
            raise MaskViolation(
                f"index {s} is marked missing but not in the shifted set {sorted(target_set)}"
                + (f"; nonzero tap h({hits[0] - s}) would multiply it" if hits else ""),
                index=s,
            )
    for t in targets:
        for s in targets:
            if kernel.tap(t - s) != 0.0:
                raise MaskViolation(
                    f"kernel tap h({t - s}) is nonzero on the difference set", index=s
                )


def recover(
    window: SignalWindow, kernel: RecoveryKernel, shift: int = 0, truncate: bool = False
) -> RecoveryResult:
    """Estimate the samples at ``shift + T`` from the observed samples of ``window``.

    The estimate at ``t`` is ``sum_s h(t - s) x(s)`` over observed ``s`` in the
    window.  Missing samples never enter the sum.  When the window is
    narrower than the kernel support a :class:`WindowTooSmall` warning is
    issued unless ``truncate`` is set.

    Raises
    ------
    MaskViolation
        If the window's missing set is not ``shift + T`` or the kernel does
        not vanish on the difference set.
    """
    targets = tuple(t + shift for t in kernel.times)
    _check_mask(window, kernel, targets)
    R = kernel.tap_radius
    lo, hi = targets[0] - R, targets[-1] + R
    if not truncate and (window.start > lo or window.end < hi):
        warnings.warn(
            f"window [{window.start}, {window.end}] does not cover kernel support "
            f"[{lo}, {hi}]; truncated convolution applied",
            WindowTooSmall,
            stacklevel=2,
        )
    observed = ~window.missing
    s = window.times[observed]
    x = window.samples[observed]
    estimates = np.empty(len(targets))
    used = 0
    for i, t in enumerate(targets):
        h = kernel.lookup(t - s)
        estimates[i] = np.dot(h, x)
        used += int(np.count_nonzero(h))
    radius = min(min(t - window.start, window.end - t) for t in targets)
    return RecoveryResult(targets, estimates, used, int(radius))


def relative_error(estimates, truth, window) -> float:
    """RMS error over the missing points relative to the window's RMS level.

    ``sqrt(mean_k |est_k - x_k|^2) / sqrt(sum_t x(t)^2 / N)`` where the window
    holds ``2N + 1`` samples of the true signal.  ``window`` is an array of
    true samples or a :class:`SignalWindow`; missing entries of the latter
    are taken from ``truth`` in shifted-set order.
    """
    est = np.asarray(estimates, dtype=float)
    tru = np.asarray(truth, dtype=float)
    if est.shape != tru.shape:
        raise ValueError("estimates and truth differ in shape")
    if isinstance(window, SignalWindow):
        x = window.samples.copy()
        if window.missing.sum() == len(tru):
            x[window.missing] = tru
    else:
        x = np.asarray(window, dtype=float)
    N = (len(x) - 1) / 2
    if N <= 0:
        raise ValueError("window needs at least 3 samples")
    denom = math.sqrt(math.fsum(x * x) / N)
    if not denom >= 1e-14:
        raise ZeroSignal(f"signal RMS {denom:.3e} is below 1e-14")
    num = math.sqrt(math.fsum((est - tru) ** 2) / len(est))
    return num / denom


def robustness_bound(epsilon: float, sigma: float, kappa: float) -> float:
    """Sup-norm error bound ``epsilon + sigma * (kappa + 1)`` under noise of spectral L1 size sigma."""
    if epsilon < 0 or sigma < 0 or kappa < 0:
        raise ValueError("epsilon, sigma and kappa must be nonnegative")
    return epsilon + sigma * (kappa + 1)


def band_grid(geom: BandGeometry, points: int = 513) -> np.ndarray:
    """Grid covering both bands next to ``+-pi`` including their endpoints."""
    right = np.linspace(geom.edge, math.pi, points)
    return np.concatenate([-right[::-1], right])


def degeneracy_diagnostic(spectrum, w: CosineSpan, geom: BandGeometry | None = None,
                          omega=None, min_points: int = 256):
    """Band norms ``(zeta, psi)`` of a spectrum near ``+-pi``.

    ``zeta = int |w X|`` and ``psi = sqrt(int |X|^2)`` over the two bands of
    width ``pi/n``, by the trapezoidal rule.  ``spectrum`` is either a
    callable of ``omega`` or sampled values on the grid ``omega``.

    Raises
    ------
    GridTooCoarse
        If fewer than ``min_points`` grid points fall in each band.
    """
    geom = geom or w.geom
    if callable(spectrum):
        omega = band_grid(geom, max(min_points, 513)) if omega is None else np.asarray(omega)
        mag = np.abs(np.asarray(spectrum(omega)))
    else:
        if omega is None:
            raise ValueError("sampled spectrum needs its omega grid")
        omega = np.asarray(omega, dtype=float)
        mag = np.abs(np.asarray(spectrum))
    zeta = psi2 = 0.0
    for sign in (-1.0, 1.0):
        sel = sign * omega >= geom.edge
        if sel.sum() < min_points:
            raise GridTooCoarse(
                f"{int(sel.sum())} grid points in the band, need at least {min_points}"
            )
        order = np.argsort(omega[sel])
        om, m = omega[sel][order], mag[sel][order]
        zeta += np.trapezoid(np.abs(w(np.abs(om))) * m, om)
        psi2 += np.trapezoid(m * m, om)
    return float(zeta), float(math.sqrt(psi2))
