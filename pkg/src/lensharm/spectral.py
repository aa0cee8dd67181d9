"""Exact spectral counting for lens spaces.

The eigenvalue s(s + 2n - 2) of the Laplace-Beltrami operator on
S^{2n-1} has an eigenspace that splits into torus weight spaces H_{s,a},
a in Z^n.  A weight space survives on the lens space exactly when a lies
in the congruence lattice T, so multiplicities, and the binomially
weighted counts F over cones, are sums of shell counts N(k) of T.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .cones import OrthantCone
from .lattice import (
    CongruenceLattice,
    LensParams,
    Region,
    as_point,
    build_lattice,
    shell_counts,
)


def harmonic_dim(n: int, s: int, a) -> int:
    """dim H_{s,a}: C(r+n-2, n-2) when |a|_1 = s - 2r with r >= 0, else 0."""
    if n < 2 or s < 0:
        raise ValueError("need n >= 2 and s >= 0")
    norm = as_point(a).l1_norm if not isinstance(a, int) else a
    gap = s - norm
    if gap < 0 or gap % 2:
        return 0
    return comb(gap // 2 + n - 2, n - 2)


@dataclass(frozen=True)
class ConeUnion:
    """Finite union of cones; shared boundary points are counted once."""

    cones: tuple

    @property
    def n(self) -> int:
        return self.cones[0].n

    def contains(self, point) -> bool:
        return any(c.contains(point) for c in self.cones)


@lru_cache(maxsize=2048)
def _compositions_array(s: int, n: int) -> np.ndarray:
    if n == 1:
        out = np.array([[s]], dtype=np.int64)
    elif n == 2:
        a = np.arange(s + 1, dtype=np.int64)
        out = np.column_stack((a, s - a))
    else:
        blocks = []
        for first in range(s + 1):
            sub = _compositions_array(s - first, n - 1)
            blocks.append(np.column_stack((np.full(len(sub), first, dtype=np.int64), sub)))
        out = np.concatenate(blocks)
    out.setflags(write=False)
    return out


def _cone_facets(region) -> list[np.ndarray]:
    cones = region.cones if isinstance(region, ConeUnion) else (region,)
    return [c.facet_matrix() for c in cones]


def _enumerate_cone_counts(lattice: CongruenceLattice, region, start: int, stop: int) -> list[int]:
    p = np.array(lattice.params.p, dtype=np.int64)
    facets = _cone_facets(region)
    out = []
    for s in range(start, stop):
        pts = _compositions_array(s, lattice.n)
        pts = pts[(pts @ p) % lattice.q == 0]
        inside = np.zeros(len(pts), dtype=bool)
        for m in facets:
            inside |= (pts @ m.T >= 0).all(axis=1)
        out.append(int(inside.sum()))
    return out


class _ShellCache:
    """Growing table N(0), N(1), ... for one (lattice, region) pair."""

    def __init__(self, lattice: CongruenceLattice, region):
        self.lattice = lattice
        self.region = region
        self._counts: list[int] = []
        self._lock = threading.Lock()

    def counts(self, s_max: int) -> list[int]:
        with self._lock:
            have = len(self._counts)
            if have <= s_max:
                if isinstance(self.region, Region):
                    target = max(s_max, 2 * have)
                    self._counts = shell_counts(self.lattice, self.region, target)
                else:
                    self._counts = self._counts + _enumerate_cone_counts(
                        self.lattice, self.region, have, s_max + 1
                    )
            return self._counts[: s_max + 1]


@lru_cache(maxsize=256)
def _cache_for(lattice: CongruenceLattice, region) -> _ShellCache:
    return _ShellCache(lattice, region)


def _normalize_region(lattice: CongruenceLattice, region):
    if isinstance(region, OrthantCone):
        signs = region.signature.signs
        reflected = build_lattice(
            LensParams(lattice.q, tuple(s * p for s, p in zip(signs, lattice.params.p)))
        )
        return reflected, Region.CLOSED_ORTHANT
    if not isinstance(region, Region) and region.n != lattice.n:
        raise ValueError("region and lattice dimensions differ")
    return lattice, region


def shell_count_table(lattice: CongruenceLattice, region, s_max: int) -> list[int]:
    """[N(0), ..., N(s_max)] over ``region`` (DP for orthants, enumeration for cones)."""
    if s_max < 0:
        return []
    lattice, region = _normalize_region(lattice, region)
    return _cache_for(lattice, region).counts(s_max)


def count_N(lattice: CongruenceLattice, region, s: int) -> int:
    if s < 0:
        return 0
    return shell_count_table(lattice, region, s)[s]


def F_from_counts(counts: Sequence[int], n: int, t: int) -> int:
    prefix = np.cumsum(np.asarray(counts[: t + 1], dtype=object))
    return sum(comb(r + n - 2, n - 2) * int(prefix[t - 2 * r]) for r in range(t // 2 + 1))


def count_F(lattice: CongruenceLattice, region, t: int) -> int:
    """F(t) = sum_{s<=t} sum_r C(r+n-2, n-2) N(s-2r), via prefix sums of N."""
    if t < 0:
        return 0
    return F_from_counts(shell_count_table(lattice, region, t), lattice.n, t)


def F_series(counts: Sequence[int], n: int) -> list[int]:
    """F(0..len-1) from shell counts in one pass."""
    out, prefix, running = [], [], 0
    for c in counts:
        running += int(c)
        prefix.append(running)
    for t in range(len(counts)):
        out.append(sum(comb(r + n - 2, n - 2) * prefix[t - 2 * r] for r in range(t // 2 + 1)))
    return out


def recover_shell_counts(F_values: Sequence[int], n: int) -> list[int]:
    """Invert the triangular F <- N relation."""
    counts: list[int] = []
    prev = 0
    for t, F in enumerate(F_values):
        level = F - prev
        prev = F
        level -= sum(comb(r + n - 2, n - 2) * counts[t - 2 * r] for r in range(1, t // 2 + 1))
        counts.append(level)
    return counts


def multiplicities_from_profile(profile: Sequence[int], n: int) -> list[int]:
    return [
        sum(comb(r + n - 2, n - 2) * profile[s - 2 * r] for r in range(s // 2 + 1))
        for s in range(len(profile))
    ]


def multiplicity(lattice: CongruenceLattice, s: int) -> int:
    """Dimension of the s(s+2n-2) eigenspace of the lens space."""
    if s < 0:
        raise ValueError("degree must be nonnegative")
    profile = shell_count_table(lattice, Region.FULL, s)
    n = lattice.n
    return sum(comb(r + n - 2, n - 2) * profile[s - 2 * r] for r in range(s // 2 + 1))


class SpectrumRow(NamedTuple):
    s: int
    eigenvalue: int
    multiplicity: int
    cumulative: int


@dataclass(frozen=True)
class SpectrumTable:
    params: LensParams
    rows: tuple[SpectrumRow, ...]

    @property
    def multiplicities(self) -> list[int]:
        return [r.multiplicity for r in self.rows]


def spectrum_table(lattice: CongruenceLattice, s_max: int) -> SpectrumTable:
    if s_max < 0:
        raise ValueError("s_max must be nonnegative")
    n = lattice.n
    mults = multiplicities_from_profile(shell_count_table(lattice, Region.FULL, s_max), n)
    rows, total = [], 0
    for s, m in enumerate(mults):
        total += m
        rows.append(SpectrumRow(s, s * (s + 2 * n - 2), m, total))
    return SpectrumTable(lattice.params, tuple(rows))


def sphere_multiplicity(n: int, s: int) -> int:
    """Multiplicity of s(s+2n-2) on S^{2n-1}: harmonic polynomials of degree s in 2n variables."""
    d = 2 * n
    return comb(s + d - 1, d - 1) - (comb(s + d - 3, d - 1) if s >= 2 else 0)
