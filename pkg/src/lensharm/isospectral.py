"""Isospectrality of lens spaces through l1-shell profiles of their lattices.

Two lens spaces are isospectral exactly when their lattices have the same
number of points on every l1-sphere.  Profiles are compared to a finite
depth, so every positive verdict here is "agrees through depth K".
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

from .lattice import DimensionError, LensParams, Region, build_lattice
from .spectral import shell_count_table, spectrum_table


class InternalInconsistency(AssertionError):
    """Shell-profile and multiplicity verdicts disagree (a bug, never expected)."""


def _params(x) -> LensParams:
    if isinstance(x, LensParams):
        return x
    q, *p = x
    return LensParams(q, tuple(p))


@dataclass(frozen=True)
class ShellProfile:
    params: LensParams
    counts: tuple[int, ...]


def shell_profile(lattice, K: int) -> ShellProfile:
    if K < 0:
        raise ValueError("depth must be nonnegative")
    if isinstance(lattice, (LensParams, tuple)):
        lattice = build_lattice(_params(lattice))
    return ShellProfile(lattice.params, tuple(shell_count_table(lattice, Region.FULL, K)))


@dataclass(frozen=True)
class IsospectralVerdict:
    isospectral_up_to_K: bool
    depth: int
    first_differing_shell: int | None


def _first_difference(a: Sequence[int], b: Sequence[int]) -> int | None:
    return next((k for k, (x, y) in enumerate(zip(a, b)) if x != y), None)


def isospectral(params1, params2, K: int) -> IsospectralVerdict:
    p1, p2 = _params(params1), _params(params2)
    if p1.n != p2.n:
        raise DimensionError(f"dimension mismatch: n={p1.n} vs n={p2.n}")
    if K < 1:
        raise ValueError("depth must be at least 1")
    a = shell_profile(p1, K).counts
    b = shell_profile(p2, K).counts
    k = _first_difference(a, b)
    return IsospectralVerdict(k is None, K, k)


def first_differing_degree(params1, params2, s_max: int) -> int | None:
    m1 = spectrum_table(build_lattice(_params(params1)), s_max).multiplicities
    m2 = spectrum_table(build_lattice(_params(params2)), s_max).multiplicities
    return _first_difference(m1, m2)


def multiplicity_crosscheck(params1, params2, s_max: int) -> bool:
    """Compare eigenvalue multiplicities through degree s_max.

    The multiplicity table is a unitriangular transform of the shell
    profile, so the answer must match :func:`isospectral` at the same depth.
    """
    p1, p2 = _params(params1), _params(params2)
    if p1.n != p2.n:
        raise DimensionError(f"dimension mismatch: n={p1.n} vs n={p2.n}")
    diff = first_differing_degree(p1, p2, s_max)
    verdict = isospectral(p1, p2, max(s_max, 1))
    if (diff is None) != verdict.isospectral_up_to_K or diff != verdict.first_differing_shell:
        raise InternalInconsistency(
            f"multiplicities (first diff {diff}) and shell profiles "
            f"(first diff {verdict.first_differing_shell}) disagree for {p1} vs {p2}"
        )
    return diff is None


# -- isometry classes -------------------------------------------------------

@dataclass(frozen=True, order=True)
class IsometryClass:
    """Canonical representative of a tuple under permutation, sign and unit scaling."""

    q: int
    representative: tuple[int, ...]


def units(q: int) -> list[int]:
    return [l for l in range(1, q) if math.gcd(l, q) == 1] if q > 1 else [0]


def canonicalize_isometry(params) -> IsometryClass:
    """Lexicographic minimum of sorted(min(l*p_j, q - l*p_j) mod q) over units l."""
    params = _params(params)
    q = params.q
    if q == 1:
        return IsometryClass(1, params.p)
    best = None
    for l in units(q):
        cand = tuple(sorted(min(x, q - x) for x in ((l * pj) % q for pj in params.p)))
        if best is None or cand < best:
            best = cand
    return IsometryClass(q, best)


def class_representatives(n: int, q: int) -> list[IsometryClass]:
    """All isometry classes of n-tuples of units mod q, sorted."""
    if q == 1:
        return [IsometryClass(1, (0,) * n)]
    folded = sorted({min(u, q - u) for u in units(q)})
    seen = set()
    # every class has a member whose first entry is 1
    for rest in product(folded, repeat=n - 1):
        if list(rest) != sorted(rest):
            continue
        seen.add(canonicalize_isometry(LensParams(q, (1,) + rest)))
    return sorted(seen)


@dataclass(frozen=True)
class IsospectralPair:
    q: int
    p1: tuple[int, ...]
    p2: tuple[int, ...]
    verified_depth: int
    profile_prefix: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "p1": list(self.p1),
            "p2": list(self.p2),
            "verified_depth": self.verified_depth,
            "profile_prefix": list(self.profile_prefix),
        }


def default_depth(q: int) -> int:
    return 2 * q


def _pairs_for_q(n: int, q: int, K: int | None, verify_depth: int) -> list[IsospectralPair]:
    depth = K if K is not None else default_depth(q)
    buckets: dict[tuple[int, ...], list[IsometryClass]] = {}
    for cls in class_representatives(n, q):
        prof = shell_profile(LensParams(q, cls.representative), depth).counts
        buckets.setdefault(prof, []).append(cls)
    out = []
    for prof in sorted(buckets):
        members = buckets[prof]
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                a, b = members[i].representative, members[j].representative
                if not multiplicity_crosscheck(LensParams(q, a), LensParams(q, b), verify_depth):
                    continue
                out.append(IsospectralPair(q, a, b, max(depth, verify_depth), prof))
    return out


def search_pairs(n: int, q_range: Iterable[int], K: int | None = None,
                 verify_depth: int = 60, workers: int = 1) -> list[IsospectralPair]:
    """Isospectral (to the verified depth) pairs from distinct isometry classes.

    For each q, class representatives are bucketed by shell profile to depth
    ``K`` (default 2q); colliding pairs are re-verified by comparing
    multiplicity tables through ``verify_depth``.  Output order is by q, then
    profile, then representative, independent of ``workers``.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    qs = sorted(set(int(q) for q in q_range))
    if workers > 1 and len(qs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_pairs_for_q, [n] * len(qs), qs, [K] * len(qs),
                                   [verify_depth] * len(qs)))
    else:
        chunks = [_pairs_for_q(n, q, K, verify_depth) for q in qs]
    return [pair for chunk in chunks for pair in chunk]
