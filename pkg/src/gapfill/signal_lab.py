"""Monte-Carlo test signals and the recovery benchmark.

A trial draws a random spectrum on ``(-pi, 0)``: a Fourier polynomial
``f1(w) = sum_j a_j exp(i k_j w)`` with ``nbar`` nonzero terms, multiplied
by a complex constant ``alpha_k`` on each of ``nbar`` equal subintervals.
The term frequencies ``k_j`` are spread over ``[-N, N]`` so the signal
fills the observation window (``freq_mode="window"``); ``freq_mode="low"``
uses ``k_j = 0..nbar-1`` and gives a signal concentrated near ``t = 0``.  The spectrum on
``(0, pi)`` is the Hermitian mirror, so the signal is real, and everything
within ``eps_band`` of ``+-pi`` is cut away.  Because the spectrum is
piecewise a trigonometric polynomial, the inverse transform has a closed
form; a quadrature route is kept for cross-checking.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .exceptions import NonRealSignal
from .index_sets import MissingIndexSet
from .kernel import build_kernel, kappa, mask_correction_l1
from .recovery import SignalWindow, recover, relative_error, robustness_bound

__all__ = [
    "GeneratorConfig",
    "SpectralProfile",
    "NoiseProfile",
    "ExperimentReport",
    "trial_rng",
    "generate_profile",
    "synthesize",
    "synthesize_quadrature",
    "noise_profile",
    "inject_noise",
    "run_experiment",
]

IMAG_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorConfig:
    nbar: int = 10
    eps_band: float = 0.4
    N: int = 300
    seed: int = 0
    trials: int = 100
    freq_mode: str = "window"

    def __post_init__(self):
        if self.freq_mode not in ("window", "low"):
            raise ValueError("freq_mode must be 'window' or 'low'")
        if self.nbar < 1:
            raise ValueError("nbar must be >= 1")
        if not 0 < self.eps_band < math.pi:
            raise ValueError("eps_band must lie in (0, pi)")
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent Philox stream for one trial, keyed by ``(seed, trial)``."""
    ss = np.random.SeedSequence(seed, spawn_key=(trial,))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Piecewise spectrum ``f2`` on ``(-pi, 0)`` and its Hermitian completion.

    ``poly[j]`` is the real coefficient of ``exp(i freqs[j] w)`` in ``f1``;
    ``alpha[k]`` scales ``f1`` on ``I_k = (-pi + k pi/nbar, -pi + (k+1) pi/nbar)``.
    """

    poly: np.ndarray
    alpha: np.ndarray
    freqs: np.ndarray

    @property
    def nbar(self) -> int:
        return len(self.alpha)

    @property
    def breakpoints(self) -> np.ndarray:
        return -math.pi + math.pi * np.arange(self.nbar + 1) / self.nbar

    def f1(self, omega):
        om = np.asarray(omega, dtype=float)
        return np.exp(1j * np.multiply.outer(om, self.freqs)) @ self.poly

    def f2(self, omega):
        om = np.asarray(omega, dtype=float)
        k = np.floor((om + math.pi) * self.nbar / math.pi).astype(int)
        inside = (om > -math.pi) & (om < 0)
        a = np.where(inside, self.alpha[np.clip(k, 0, self.nbar - 1)], 0)
        return a * self.f1(om)

    def spectrum(self, omega, eps_band: float = 0.0):
        """``X1(w) = f2(w) + conj(f2(-w))``, zeroed within ``eps_band`` of ``+-pi``."""
        om = np.asarray(omega, dtype=float)
        X = self.f2(om) + np.conj(self.f2(-om))
        if eps_band > 0:
            X = np.where(np.abs(om) < math.pi - eps_band, X, 0)
        return X


def generate_profile(cfg: GeneratorConfig, rng: np.random.Generator) -> SpectralProfile:
    """Random spectral profile; draw order is fixed so equal seeds pair across ``N``."""
    poly = rng.standard_normal(cfg.nbar)
    re = rng.standard_normal(cfg.nbar)
    im = rng.standard_normal(cfg.nbar)
    u = rng.uniform(-1.0, 1.0, cfg.nbar)
    if cfg.freq_mode == "window":
        freqs = np.rint(u * cfg.N).astype(np.int64)
    else:
        freqs = np.arange(cfg.nbar, dtype=np.int64)
    return SpectralProfile(poly, re + 1j * im, freqs)


def _exp_integral(m, a, b):
    """``int_a^b exp(i m w) dw`` for integer arrays ``m``."""
    m = np.asarray(m, dtype=float)
    safe = np.where(m == 0, 1.0, m)
    val = (np.exp(1j * m * b) - np.exp(1j * m * a)) / (1j * safe)
    return np.where(m == 0, b - a, val)


def _inverse_transform(profile: SpectralProfile, times, eps_band: float) -> np.ndarray:
    """Closed-form ``(1/2pi) int X e^{iwt}`` over ``|w| < pi - eps_band``; complex."""
    t = np.asarray(times, dtype=float)
    j = profile.freqs
    lo_cut = -math.pi + eps_band
    bp = profile.breakpoints
    total = np.zeros(t.shape, dtype=complex)
    for k in range(profile.nbar):
        a, b = max(bp[k], lo_cut), bp[k + 1]
        if a >= b:
            continue
        # f2 on I_k: alpha_k * sum_j poly_j e^{i k_j w}
        left = _exp_integral(np.add.outer(t, j), a, b) @ profile.poly
        # mirror on -I_k: conj(f2(-w)) = conj(alpha_k) * sum_j poly_j e^{i k_j w}
        right = _exp_integral(np.add.outer(t, j), -b, -a) @ profile.poly
        total += profile.alpha[k] * left + np.conj(profile.alpha[k]) * right
    return total / (2 * math.pi)


def _real_part(values: np.ndarray) -> np.ndarray:
    resid = np.max(np.abs(values.imag), initial=0.0)
    if resid > IMAG_TOL:
        raise NonRealSignal(f"imaginary residue {resid:.3e} exceeds {IMAG_TOL:.0e}")
    return values.real.copy()


def synthesize(profile: SpectralProfile, cfg: GeneratorConfig, start: int | None = None,
               length: int | None = None) -> SignalWindow:
    """Samples of the band-limited signal on ``[-N, N]`` (or a custom range)."""
    start = -cfg.N if start is None else start
    length = 2 * cfg.N + 1 if length is None else length
    times = np.arange(start, start + length)
    x = _real_part(_inverse_transform(profile, times, cfg.eps_band))
    return SignalWindow(start, x, np.zeros(length, dtype=bool))


def synthesize_quadrature(profile: SpectralProfile, times, eps_band: float,
                          epsabs: float = 1e-10) -> np.ndarray:
    """Inverse transform by adaptive quadrature, split at every breakpoint.

    Slow; used to cross-check :func:`synthesize`.
    """
    cut = math.pi - eps_band
    pts = np.concatenate([profile.breakpoints, -profile.breakpoints, [-cut, cut]])
    pts = np.unique(pts[(pts >= -cut) & (pts <= cut)])
    out = []
    for t in np.atleast_1d(times):
        re = im = 0.0
        for a, b in zip(pts[:-1], pts[1:]):
            mid = 0.5 * (a + b)

            def fr(w, t=t, mid=mid):
                return (profile.spectrum(w if w != a and w != b else mid) * np.exp(1j * w * t)).real

            def fi(w, t=t, mid=mid):
                return (profile.spectrum(w if w != a and w != b else mid) * np.exp(1j * w * t)).imag

            re += integrate.quad(fr, a, b, epsabs=epsabs, epsrel=0, limit=200)[0]
            im += integrate.quad(fi, a, b, epsabs=epsabs, epsrel=0, limit=200)[0]
        out.append(complex(re, im) / (2 * math.pi))
    return _real_part(np.array(out))


@dataclass(frozen=True, eq=False)
class NoiseProfile:
    """Full-band random spectrum scaled to spectral L1 norm ``sigma``."""

    profile: SpectralProfile
    scale: float
    sigma: float

    def spectrum(self, omega):
        return self.scale * self.profile.spectrum(omega)

    def l1_norm(self) -> float:
        return self.scale * _spectral_l1(self.profile)

    def samples(self, times) -> np.ndarray:
        return self.scale * _real_part(_inverse_transform(self.profile, times, 0.0))


def _spectral_l1(profile: SpectralProfile, tol: float = 1e-11, min_width: float = 1e-9) -> float:
    """``int |X(w)| dw`` over ``[-pi, pi]`` by adaptive composite Gauss-Legendre.

    ``|X|`` is smooth on each constant-``alpha`` piece except where the trig
    polynomial nearly vanishes, which leaves a sharp dip.  Panels start at a
    quarter period of the highest frequency and are bisected until a
    16-point and a 24-point rule agree to ``tol`` times the panel width.
    Phase rounding in ``exp(i k w)`` grows with ``k``, so panels narrower
    than ``min_width`` are accepted as they are.
    """
    x_hi, w_hi = np.polynomial.legendre.leggauss(24)
    x_lo, w_lo = np.polynomial.legendre.leggauss(16)
    kmax = max(1, int(np.abs(profile.freqs).max()))
    bp = np.unique(np.concatenate([profile.breakpoints, -profile.breakpoints]))
    lo, hi = [], []
    for a, b in zip(bp[:-1], bp[1:]):
        edges = np.linspace(a, b, max(4, math.ceil((b - a) * kmax * 2 / math.pi) * 2) + 1)
        lo.append(edges[:-1])
        hi.append(edges[1:])
    lo, hi = np.concatenate(lo), np.concatenate(hi)

    def rule(mid, half, x, wts):
        om = mid[:, None] + half[:, None] * x
        vals = np.abs(profile.spectrum(om.ravel())).reshape(om.shape)
        return half * (vals @ wts)

    done = []
    while len(lo):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        fine = rule(mid, half, x_hi, w_hi)
        ok = np.abs(fine - rule(mid, half, x_lo, w_lo)) <= tol * 2 * half
        ok |= half < min_width
        done.append(fine[ok])
        lo, hi = np.concatenate([lo[~ok], mid[~ok]]), np.concatenate([mid[~ok], hi[~ok]])
    return math.fsum(np.concatenate(done))


def noise_profile(sigma: float, rng: np.random.Generator, nbar: int = 10,
                  spread: int = 1) -> NoiseProfile:
    """Random full-band profile with term frequencies in ``[-spread, spread]``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    prof = generate_profile(GeneratorConfig(nbar=nbar, N=max(spread, 1), trials=1), rng)
    l1 = _spectral_l1(prof)
    return NoiseProfile(prof, sigma / l1 if sigma > 0 else 0.0, sigma)


def inject_noise(window: SignalWindow, sigma: float, rng: np.random.Generator,
                 nbar: int = 10) -> SignalWindow:
    """Add full-band noise whose spectrum has L1 norm exactly ``sigma``."""
    if sigma == 0:
        return window
    noise = noise_profile(sigma, rng, nbar, spread=len(window.samples) // 2)
    return SignalWindow(window.start, window.samples + noise.samples(window.times),
                        window.missing.copy())


@dataclass
class ExperimentReport:
    times: tuple[int, ...]
    n: int
    config: dict
    sigma: float
    kappa: float
    mask_correction: float
    trials: list[dict] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([tr["rel_error"] for tr in self.trials])

    @property
    def mean(self) -> float:
        return math.fsum(self.errors) / len(self.trials)

    @property
    def median(self) -> float:
        return float(np.median(self.errors))

    @property
    def stderr(self) -> float:
        e = self.errors
        if len(e) < 2:
            return 0.0
        m = self.mean
        return math.sqrt(math.fsum((e - m) ** 2) / (len(e) - 1) / len(e))

    def summary(self) -> dict:
        out = {"mean": self.mean, "median": self.median, "stderr": self.stderr,
               "trials": len(self.trials)}
        if self.sigma > 0:
            out["bound_violations"] = sum(not tr["within_bound"] for tr in self.trials)
        return out

    def to_dict(self) -> dict:
        return {
            "T": list(self.times), "n": self.n, "config": self.config, "sigma": self.sigma,
            "kappa": self.kappa, "mask_correction": self.mask_correction,
            "summary": self.summary(), "trials": self.trials,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = list(self.trials[0].keys())
        writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for tr in self.trials:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in tr.items()})
        return buf.getvalue()


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("GAPFILL_THREADS", "1")))
    except ValueError:
        return 1


def _run_trial(trial: int, T: MissingIndexSet, cfg: GeneratorConfig, kernel, sigma: float,
               kap: float, allowance: float) -> dict:
    rng = trial_rng(cfg.seed, trial)
    profile = generate_profile(cfg, rng)
    clean = synthesize(profile, cfg)
    idx = [t - clean.start for t in T]
    result = recover(clean.with_missing(T.times, poison=np.nan), kernel, truncate=True)
    truth = clean.samples[idx]
    err = result.estimates - truth
    row = {
        "trial": trial,
        "rel_error": relative_error(result.estimates, truth, clean.samples),
        "sup_error": float(np.max(np.abs(err))),
    }
    if sigma > 0:
        noisy = inject_noise(clean, sigma, rng, cfg.nbar)
        res_n = recover(noisy.with_missing(T.times, poison=np.nan), kernel, truncate=True)
        truth_n = noisy.samples[idx]
        sup_n = float(np.max(np.abs(res_n.estimates - truth_n)))
        bound = robustness_bound(row["sup_error"], sigma, kap) + sigma * allowance
        row.update(noisy_rel_error=relative_error(res_n.estimates, truth_n, noisy.samples),
                   noisy_sup_error=sup_n, bound=bound, within_bound=sup_n <= bound)
    return row


def run_experiment(T, n: int, cfg: GeneratorConfig, sigma: float = 0.0,
                   threads: int | None = None) -> ExperimentReport:
    """Recover the samples at ``T`` over ``cfg.trials`` random signals.

    Each trial draws from its own Philox stream keyed by ``(cfg.seed, trial)``,
    so results do not depend on thread count or order.  With ``sigma > 0``
    every trial is repeated with added noise and compared against the
    robustness bound, using the trial's own noiseless sup error as epsilon
    and the mask correction as allowance for the gap between the masked
    and unmasked transfer functions.
    """
    T = T if isinstance(T, MissingIndexSet) else MissingIndexSet(T)
    if max(abs(t) for t in T) > cfg.N:
        raise ValueError(f"missing times {T.times} must lie in [-N, N] = [-{cfg.N}, {cfg.N}]")
    radius = cfg.N + max(abs(t) for t in T)
    kernel = build_kernel(T, n, radius)
    kap = kappa(kernel.transfer)
    corr = mask_correction_l1(kernel.transfer)
    report = ExperimentReport(T.times, n, asdict(cfg), sigma, kap, corr)
    threads = threads or _threads()
    args = (T, cfg, kernel, sigma, kap, corr)
    if threads == 1:
        rows = [_run_trial(i, *args) for i in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda i: _run_trial(i, *args), range(cfg.trials)))
    report.trials = rows
    return report
