"""Index-set algebra for the times of missing samples.

A kernel that recovers the samples at times ``T`` must vanish on every
pairwise difference ``t - s`` with ``t, s`` in ``T``.  The positive
differences are further split by divisibility by the band parameter ``n``,
which fixes the order of the cosine family used to build the kernel.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "MissingIndexSet",
    "DifferenceStructure",
    "difference_set",
    "partition",
    "parse_times",
]


@dataclass(frozen=True)
class MissingIndexSet:
    """Sorted, distinct integer times of the missing samples."""

    times: tuple[int, ...]

    def __init__(self, times: Iterable[int]):
        raw = list(times)
        if not raw:
            raise ValueError("missing-time set must be non-empty")
        vals = []
        for t in raw:
            if isinstance(t, bool) or int(t) != t:
                raise ValueError(f"missing time {t!r} is not an integer")
            vals.append(int(t))
        if len(set(vals)) != len(vals):
            dup = sorted({v for v in vals if vals.count(v) > 1})
            raise ValueError(f"duplicate missing times: {dup}")
        object.__setattr__(self, "times", tuple(sorted(vals)))

    def __iter__(self):
        return iter(self.times)

    def __len__(self):
        return len(self.times)

    def shifted(self, r: int) -> tuple[int, ...]:
        return tuple(t + r for t in self.times)

    def to_json(self) -> str:
        return json.dumps(list(self.times))


def parse_times(text: str) -> MissingIndexSet:
    """Parse ``"0,3"`` or a JSON array ``"[0, 3]"``."""
    text = text.strip()
    if text.startswith("["):
        return MissingIndexSet(json.loads(text))
    return MissingIndexSet(int(tok) for tok in text.split(",") if tok.strip())


def _as_set(T) -> MissingIndexSet:
    return T if isinstance(T, MissingIndexSet) else MissingIndexSet(T)


def difference_set(T) -> tuple[int, ...]:
    """All pairwise differences ``t - s`` for ``t, s`` in ``T``, sorted."""
    T = _as_set(T)
    return tuple(sorted({t - s for t in T for s in T}))


@dataclass(frozen=True)
class DifferenceStructure:
    """Difference set of ``T`` and its split by divisibility by ``n``.

    ``ordering`` lists the multiples of ``n`` first, then the rest, each
    block ascending; ``p`` is the size of the first block and ``q`` the
    total.
    """

    times: tuple[int, ...]
    n: int
    s_T: tuple[int, ...]
    p_T: tuple[int, ...]
    p_nT: tuple[int, ...]
    pbar_nT: tuple[int, ...]

    @property
    def ordering(self) -> tuple[int, ...]:
        return self.p_nT + self.pbar_nT

    @property
    def p(self) -> int:
        return len(self.p_nT)

    @property
    def q(self) -> int:
        return len(self.p_T)


def partition(T, n: int) -> DifferenceStructure:
    T = _as_set(T)
    if isinstance(n, bool) or int(n) != n or n <= 1:
        raise ValueError(f"band parameter n must be an integer >= 2, got {n!r}")
    n = int(n)
    s_T = difference_set(T)
    p_T = tuple(s for s in s_T if s > 0)
    p_nT = tuple(s for s in p_T if s % n == 0)
    pbar = tuple(s for s in p_T if s % n != 0)
    return DifferenceStructure(T.times, n, s_T, p_T, p_nT, pbar)
