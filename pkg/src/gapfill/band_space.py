"""Linear algebra over cosines restricted to the band next to omega = pi.

Functions live on ``D_n = (pi - pi/n, pi)`` with the plain ``d omega``
measure.  Everything here is a finite combination of ``cos(t * omega)``
with integer ``t``, so inner products have closed forms and the projection
of the constant onto ``span(cos(t_k omega))`` is a small symmetric
positive-definite solve.

On a short arc these cosines are close to linearly dependent and the
coefficients of the band weight grow to 1e10 and beyond while the function
itself stays moderate.  Double precision cannot represent such a function
to 1e-10, so the Gram system, the coefficients, and all inner products are
carried in mpmath at ``DPS`` decimal digits.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath as mp
import numpy as np

from .exceptions import DegenerateProjection, IllConditioned
from .index_sets import DifferenceStructure

__all__ = [
    "BandGeometry",
    "CosineSpan",
    "inner_product",
    "gram_matrix",
    "gram_condition",
    "xi",
    "xi_gram_schmidt",
    "w",
    "COND_LIMIT",
    "POSITIVITY_FLOOR",
    "DPS",
]

DPS = 60
COND_LIMIT = 1e12
POSITIVITY_FLOOR = 1e-13


@dataclass(frozen=True)
class BandGeometry:
    n: int

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 2:
            raise ValueError(f"band parameter n must be an integer >= 2, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def edge(self) -> float:
        """Lower edge ``pi - pi/n`` of the one-sided band."""
        return math.pi - math.pi / self.n

    @property
    def D_n(self) -> tuple[float, float]:
        return (self.edge, math.pi)

    @property
    def Dtilde_n(self):
        return ((-math.pi, -self.edge), (self.edge, math.pi))

    @property
    def width(self) -> float:
        return math.pi / self.n


def _sin_edge(m: int, n: int):
    """``sin(m (pi - pi/n))`` for integer ``m`` as an mpf.

    ``sin(m pi - m pi/n) = (-1)**(m+1) sin(m pi/n)``; ``m`` is reduced modulo
    ``2n`` in integers so multiples of ``n`` give exactly zero.
    """
    r = m % (2 * n)
    if r % n == 0:
        return mp.mpf(0)
    s = mp.sinpi(mp.mpf(r) / n)
    return s if m % 2 else -s


def _ip(a: int, b: int, n: int):
    """Closed-form ``int_{D_n} cos(a w) cos(b w) dw`` as an mpf."""
    a, b = abs(int(a)), abs(int(b))
    if a == b:
        if a == 0:
            return mp.pi / n
        return mp.pi / (2 * n) - _sin_edge(2 * a, n) / (4 * a)
    d, s = a - b, a + b
    return -(_sin_edge(d, n) / d + _sin_edge(s, n) / s) / 2


def inner_product(a: int, b: int, geom: BandGeometry) -> float:
    """Integral of ``cos(a w) cos(b w)`` over ``D_n``."""
    if a < 0 or b < 0:
        raise ValueError("frequencies must be nonnegative")
    with mp.workdps(DPS):
        return float(_ip(a, b, geom.n))


def _gram_mp(freqs: Sequence[int], n: int):
    return mp.matrix([[_ip(a, b, n) for b in freqs] for a in freqs])


def gram_matrix(freqs: Sequence[int], geom: BandGeometry) -> np.ndarray:
    with mp.workdps(DPS):
        G = _gram_mp(freqs, geom.n)
        return np.array(G.tolist(), dtype=float).reshape(len(freqs), len(freqs))


def gram_condition(freqs: Sequence[int], geom: BandGeometry) -> float:
    """1-norm condition number of the Gram matrix of ``cos(t w)``, ``t`` in ``freqs``."""
    if not freqs:
        return 1.0
    with mp.workdps(DPS):
        G = _gram_mp(freqs, geom.n)
        try:
            return float(mp.mnorm(G, 1) * mp.mnorm(G**-1, 1))
        except ZeroDivisionError:
            return math.inf


def _to_mpf(x):
    if isinstance(x, mp.mpf):
        return x
    if isinstance(x, str):
        return mp.mpf(x)
    return mp.mpf(float(x))


@dataclass(frozen=True)
class CosineSpan:
    """``f(w) = sum_k coeffs[k] * cos(freqs[k] * w)`` considered on ``D_n``.

    Coefficients are mpf.  Evaluation is even in ``w``, which gives the
    symmetric extension onto the band next to ``-pi``.
    """

    n: int
    freqs: tuple[int, ...]
    coeffs: tuple

    def __post_init__(self):
        if len(self.freqs) != len(self.coeffs):
            raise ValueError("freqs and coeffs differ in length")
        if len(set(self.freqs)) != len(self.freqs):
            raise ValueError("frequencies must be distinct")
        if any(f < 0 for f in self.freqs):
            raise ValueError("frequencies must be nonnegative")
        with mp.workdps(DPS):
            object.__setattr__(self, "freqs", tuple(int(f) for f in self.freqs))
            object.__setattr__(self, "coeffs", tuple(_to_mpf(c) for c in self.coeffs))

    @classmethod
    def constant(cls, n: int, value=1) -> "CosineSpan":
        return cls(n, (0,), (value,))

    @property
    def geom(self) -> BandGeometry:
        return BandGeometry(self.n)

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def eval_mp(self, omega):
        with mp.workdps(DPS):
            om = _to_mpf(omega)
            return mp.fsum(c * mp.cos(f * om) for f, c in zip(self.freqs, self.coeffs))

    def __call__(self, omega):
        """Evaluate at float ``omega`` (scalar or array); accurate to double precision."""
        arr = np.asarray(omega, dtype=float)
        if np.abs(self.float_coeffs()).sum() < 1e3:
            f = np.asarray(self.freqs, dtype=float)
            out = np.cos(np.multiply.outer(arr, f)) @ self.float_coeffs()
        else:
            with mp.workdps(DPS):
                flat = [float(self.eval_mp(float(x))) for x in arr.ravel()]
            out = np.array(flat).reshape(arr.shape)
        return out if out.ndim else float(out)

    def scaled(self, factor) -> "CosineSpan":
        with mp.workdps(DPS):
            factor = _to_mpf(factor)
            return CosineSpan(self.n, self.freqs, tuple(factor * c for c in self.coeffs))

    def inner_cos_mp(self, freq: int):
        with mp.workdps(DPS):
            return mp.fsum(c * _ip(f, freq, self.n) for f, c in zip(self.freqs, self.coeffs))

    def inner_cos(self, freq: int) -> float:
        """``(self, cos(freq w))`` on ``D_n``."""
        return float(self.inner_cos_mp(freq))

    def inner_mp(self, other: "CosineSpan"):
        if other.n != self.n:
            raise ValueError("cannot mix spans on different bands")
        with mp.workdps(DPS):
            return mp.fsum(
                c * d * _ip(f, g, self.n)
                for f, c in zip(self.freqs, self.coeffs)
                for g, d in zip(other.freqs, other.coeffs)
            )

    def inner(self, other: "CosineSpan") -> float:
        return float(self.inner_mp(other))

    def norm(self) -> float:
        with mp.workdps(DPS):
            return float(mp.sqrt(max(self.inner_mp(self), 0)))

    def to_dict(self) -> dict:
        with mp.workdps(DPS):
            terms = [
                {"freq": f, "coeff": float(c), "coeff_exact": mp.nstr(c, DPS)}
                for f, c in zip(self.freqs, self.coeffs)
            ]
        return {"n": self.n, "terms": terms}

    @classmethod
    def from_dict(cls, d: dict) -> "CosineSpan":
        terms = d["terms"]
        coeffs = tuple(t.get("coeff_exact", t["coeff"]) for t in terms)
        return cls(int(d["n"]), tuple(int(t["freq"]) for t in terms), coeffs)


def _check_structure(structure: DifferenceStructure, geom: BandGeometry):
    if structure.n != geom.n:
        raise ValueError(f"structure built for n={structure.n}, geometry has n={geom.n}")


def xi(structure: DifferenceStructure, geom: BandGeometry) -> CosineSpan:
    """Residual of projecting the constant onto ``span(cos(t_k w))`` over ``D_n``.

    Solved through the Gram system rather than sequential Gram-Schmidt.  The
    two agree because the constant is already orthogonal to ``cos(t w)``
    whenever ``t`` is a multiple of ``n``.

    Raises
    ------
    IllConditioned
        If the Gram condition number exceeds ``COND_LIMIT``.
    """
    _check_structure(structure, geom)
    freqs = structure.ordering
    if not freqs:
        return CosineSpan.constant(geom.n)
    cond = gram_condition(freqs, geom)
    if not cond <= COND_LIMIT:
        raise IllConditioned(cond, COND_LIMIT)
    with mp.workdps(DPS):
        G = _gram_mp(freqs, geom.n)
        g = mp.matrix([_ip(0, f, geom.n) for f in freqs])
        c = mp.cholesky_solve(G, g)
        return CosineSpan(geom.n, (0,) + tuple(freqs), (mp.mpf(1),) + tuple(-x for x in c))


def xi_gram_schmidt(structure: DifferenceStructure, geom: BandGeometry) -> CosineSpan:
    """Reference construction by literal sequential Gram-Schmidt.

    Orthonormalises ``cos(t_1 w), ..., cos(t_q w)`` in order and removes
    from the constant its components along ``v_{p+1}, ..., v_q`` only.
    """
    _check_structure(structure, geom)
    freqs = structure.ordering
    q, p = len(freqs), structure.p
    if q == 0:
        return CosineSpan.constant(geom.n)
    with mp.workdps(DPS):
        G = _gram_mp(freqs, geom.n)
        g = [_ip(0, f, geom.n) for f in freqs]

        def ip(u, v):
            return mp.fsum(u[i] * G[i, j] * v[j] for i in range(q) for j in range(q))

        V = []
        for k in range(q):
            v = [mp.mpf(int(i == k)) for i in range(q)]
            for vj in V:
                proj = ip(vj, v)
                v = [a - proj * b for a, b in zip(v, vj)]
            nrm = mp.sqrt(ip(v, v))
            V.append([a / nrm for a in v])
        total = [mp.mpf(0)] * q
        for k in range(p, q):
            e0_vk = mp.fsum(gi * vi for gi, vi in zip(g, V[k]))
            total = [a + e0_vk * b for a, b in zip(total, V[k])]
        return CosineSpan(geom.n, (0,) + tuple(freqs), (mp.mpf(1),) + tuple(-x for x in total))


def w(structure: DifferenceStructure, geom: BandGeometry) -> CosineSpan:
    """Band weight ``(pi - pi/n) * xi / (xi, 1)``.

    Integrates to ``pi - pi/n`` over ``D_n`` and is orthogonal there to every
    ``cos(t w)`` with ``t`` a positive difference of missing times.

    Raises
    ------
    DegenerateProjection
        If ``(xi, 1)`` is not above ``POSITIVITY_FLOOR``.
    """
    x = xi(structure, geom)
    with mp.workdps(DPS):
        mass = x.inner_cos_mp(0)
        if not mass > POSITIVITY_FLOOR:
            raise DegenerateProjection(
                f"(xi_n, 1) = {float(mass):.3e} is not above {POSITIVITY_FLOOR:.0e}; "
                "the constant is numerically inside the cosine span"
            )
        return x.scaled((mp.pi - mp.pi / geom.n) / mass)
