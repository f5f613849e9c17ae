"""Recovering kernels and their diagnostics.

The transfer function is 1 on the passband ``|w| < pi - pi/n`` and
``-w_n(w)`` on the two bands next to ``+-pi``.  Its inverse transform has a
closed form through the band-space inner products; zeroing it on the
difference set of the missing times gives the recovering kernel.
"""
from __future__ import annotations

import functools
import math
import threading
from dataclasses import dataclass, field
from typing import Mapping

import mpmath as mp
import numpy as np
from scipy import optimize

from . import band_space
from .band_space import DPS, BandGeometry, CosineSpan, _sin_edge
from .index_sets import DifferenceStructure, MissingIndexSet, partition

__all__ = [
    "TransferFunction",
    "RecoveryKernel",
    "transfer_function",
    "transfer_eval",
    "passband_tap",
    "tilde_tap",
    "tilde_taps",
    "build_kernel",
    "is_member_H_T",
    "kappa",
    "kappa_grid",
    "mask_correction_l1",
    "l1_mass",
]


@dataclass(frozen=True)
class TransferFunction:
    structure: DifferenceStructure
    w: CosineSpan

    @property
    def n(self) -> int:
        return self.structure.n

    @property
    def geom(self) -> BandGeometry:
        return BandGeometry(self.structure.n)


def transfer_function(T, n: int) -> TransferFunction:
    structure = partition(T, n)
    geom = BandGeometry(n)
    return TransferFunction(structure, band_space.w(structure, geom))


def transfer_eval(tf: TransferFunction, omega):
    """Transfer function on ``(-pi, pi]``; the band is closed at ``pi - pi/n``."""
    om = np.abs(np.asarray(omega, dtype=float))
    band = om >= tf.geom.edge
    out = np.ones_like(om)
    if band.any():
        out[band] = -np.asarray(tf.w(om[band]))
    return out if out.ndim else float(out)


def passband_tap(t: int, n: int) -> float:
    """``sin(pi t - t pi/n) / (pi t)``, the kernel value on the difference set."""
    return math.sin(math.pi * t - t * math.pi / n) / (math.pi * t)


def _tilde_tap_mp(tf: TransferFunction, t: int):
    t = abs(t)
    n = tf.n
    passband = _sin_edge(t, n) / (mp.pi * t)
    return passband - tf.w.inner_cos_mp(t) / mp.pi


def tilde_tap(tf: TransferFunction, t: int) -> float:
    """Inverse transform of the transfer function at integer time ``t``.

    Zero at ``t = 0``; on the rest of the difference set the band term
    vanishes by orthogonality and the value is :func:`passband_tap`.
    """
    t = int(t)
    if t == 0:
        return 0.0
    if t in tf.structure.s_T:
        return passband_tap(t, tf.n)
    with mp.workdps(DPS):
        return float(_tilde_tap_mp(tf, t))


def tilde_taps(tf: TransferFunction, radius: int) -> np.ndarray:
    """``tilde_tap`` for ``t = -radius..radius``."""
    half = np.array([tilde_tap(tf, t) for t in range(radius + 1)])
    return np.concatenate([half[:0:-1], half])


@dataclass(frozen=True, eq=False)
class RecoveryKernel:
    """Masked kernel with a finite tap table on ``-tap_radius..tap_radius``."""

    transfer: TransferFunction
    tap_radius: int
    taps: np.ndarray = field(repr=False)

    @property
    def structure(self) -> DifferenceStructure:
        return self.transfer.structure

    @property
    def times(self) -> tuple[int, ...]:
        return self.structure.times

    @property
    def n(self) -> int:
        return self.transfer.n

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.tap_radius, self.tap_radius + 1)

    def tap(self, t: int) -> float:
        if abs(t) > self.tap_radius:
            return 0.0
        return float(self.taps[t + self.tap_radius])

    def lookup(self, t) -> np.ndarray:
        """Vectorised tap lookup; zero outside the table."""
        t = np.asarray(t)
        inside = np.abs(t) <= self.tap_radius
        out = np.zeros(t.shape)
        out[inside] = self.taps[t[inside] + self.tap_radius]
        return out

    def as_mapping(self) -> dict[int, float]:
        return {int(t): float(v) for t, v in zip(self.offsets, self.taps)}

    def to_dict(self, include_taps: bool = True) -> dict:
        d = {
            "T": list(self.times),
            "n": self.n,
            "tap_radius": self.tap_radius,
            "w": self.transfer.w.to_dict(),
        }
        if include_taps:
            d["taps"] = [{"t": int(t), "value": float(v)} for t, v in zip(self.offsets, self.taps)]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RecoveryKernel":
        T, n, radius = tuple(d["T"]), int(d["n"]), int(d["tap_radius"])
        if "taps" not in d:
            return build_kernel(T, n, radius)
        structure = partition(T, n)
        tf = TransferFunction(structure, CosineSpan.from_dict(d["w"]))
        taps = np.zeros(2 * radius + 1)
        for entry in d["taps"]:
            taps[int(entry["t"]) + radius] = float(entry["value"])
        kernel = cls(tf, radius, taps)
        if not is_member_H_T(kernel, T):
            raise ValueError("kernel taps do not vanish on the difference set")
        return kernel


_cache_lock = threading.Lock()


@functools.lru_cache(maxsize=64)
def _build_cached(times: tuple[int, ...], n: int, radius: int) -> RecoveryKernel:
    tf = transfer_function(times, n)
    taps = tilde_taps(tf, radius)
    for s in tf.structure.s_T:
        taps[s + radius] = 0.0
    taps.setflags(write=False)
    return RecoveryKernel(tf, radius, taps)


def build_kernel(T, n: int, tap_radius: int) -> RecoveryKernel:
    """Masked recovering kernel for missing times ``T`` and band parameter ``n``.

    Cached per ``(T, n, tap_radius)``.

    Raises
    ------
    IllConditioned
        Propagated from the band-space projection.
    """
    T = T if isinstance(T, MissingIndexSet) else MissingIndexSet(T)
    s_max = T.times[-1] - T.times[0]
    if tap_radius < s_max:
        raise ValueError(f"tap_radius {tap_radius} is smaller than max difference {s_max}")
    with _cache_lock:
        return _build_cached(T.times, int(n), int(tap_radius))


def is_member_H_T(taps, T) -> bool:
    """True iff every tap on the difference set of ``T`` is exactly zero.

    ``taps`` is a :class:`RecoveryKernel` or a mapping ``t -> value``
    (absent entries count as zero).
    """
    from .index_sets import difference_set

    if isinstance(taps, RecoveryKernel):
        get = taps.tap
    elif isinstance(taps, Mapping):
        get = lambda t: taps.get(t, 0.0)  # noqa: E731
    else:
        raise TypeError("taps must be a RecoveryKernel or a mapping")
    return all(get(s) == 0.0 for s in difference_set(T))


def kappa_grid(geom: BandGeometry, grid_size: int = 4096, refine: int = 64) -> np.ndarray:
    """Uniform grid on ``[0, pi]`` plus a refinement around the band edge."""
    base = np.linspace(0.0, math.pi, grid_size)
    h = math.pi / (grid_size - 1)
    edge = geom.edge
    local = np.linspace(edge - 2 * h, min(edge + 2 * h, math.pi), refine)
    return np.unique(np.concatenate([base, local, [edge]]))


def kappa(tf: TransferFunction, grid_size: int = 4096) -> float:
    """Sup of ``|transfer|`` over a grid; even symmetry means ``[0, pi]`` suffices."""
    if grid_size < 1000:
        raise ValueError("grid_size must be at least 1000")
    grid = kappa_grid(tf.geom, grid_size)
    return float(np.max(np.abs(transfer_eval(tf, grid))))


def mask_correction_l1(tf: TransferFunction) -> float:
    """``sum |tilde_h(t)|`` over the difference set; bounds ``sup |H_n - tilde H_n|``."""
    return math.fsum(abs(passband_tap(s, tf.n)) for s in tf.structure.s_T if s != 0)


def _w_integral(w: CosineSpan, a, b):
    """Closed-form ``int_a^b w`` in mpf."""
    total = mp.mpf(0)
    for f, c in zip(w.freqs, w.coeffs):
        if f == 0:
            total += c * (b - a)
        else:
            total += c * (mp.sin(f * b) - mp.sin(f * a)) / f
    return total


def l1_mass(tf: TransferFunction, samples: int = 512) -> float:
    """``int_{-pi}^{pi} |transfer|``.

    Passband contributes ``2 (pi - pi/n)``; on the band ``w_n`` is split at
    its sign changes and each piece integrated in closed form.
    """
    geom = tf.geom
    grid = np.linspace(geom.edge, math.pi, samples + 1)
    vals = np.asarray(tf.w(grid))
    cuts = [geom.edge]
    for a, b, va, vb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if va == 0.0:
            cuts.append(float(a))
        elif va * vb < 0:
            cuts.append(optimize.brentq(tf.w, a, b, xtol=1e-15))
    with mp.workdps(DPS):
        edge = mp.pi - mp.pi / geom.n
        pts = [edge] + [mp.mpf(c) for c in cuts[1:]] + [+mp.pi]
        band = mp.fsum(abs(_w_integral(tf.w, a, b)) for a, b in zip(pts[:-1], pts[1:]))
        return float(2 * edge + 2 * band)
