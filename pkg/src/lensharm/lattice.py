"""Congruence lattices attached to lens spaces.

A lens space L(q; p_1, ..., p_n) is encoded by the index-q sublattice

    T = {a in Z^n : sum_j a_j p_j = 0 (mod q)}

and everything spectral about the lens space is read off from how many
points of T sit on each l1-shell.  This module builds T, tests membership,
lists shell points, and counts them with a residue-tracking dynamic
program.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np


class LensParamsError(ValueError):
    """Raised for parameter tuples that do not define a lens space."""


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class LensParams:
    """Lens-space parameters (q; p_1, ..., p_n), residues stored reduced mod q."""

    q: int
    p: tuple[int, ...]

    def __post_init__(self):
        q = int(self.q)
        if q < 1:
            raise LensParamsError(f"q must be a positive integer, got {self.q}")
        p = tuple(int(x) for x in self.p)
        if len(p) < 2:
            raise LensParamsError(f"need at least two p_j (n >= 2), got n={len(p)}")
        for j, pj in enumerate(p, start=1):
            if math.gcd(pj, q) != 1:
                raise LensParamsError(
                    f"p_{j}={pj} is not prime to q={q} (gcd={math.gcd(pj, q)})"
                )
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", tuple(pj % q for pj in p))

    @property
    def n(self) -> int:
        return len(self.p)

    def __str__(self):
        return f"L({self.q}; {', '.join(map(str, self.p))})"


@dataclass(frozen=True)
class LatticePoint:
    coords: tuple[int, ...]
    l1_norm: int = field(init=False)

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "l1_norm", sum(abs(c) for c in coords))

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def as_point(point) -> LatticePoint:
    if isinstance(point, LatticePoint):
        return point
    return LatticePoint(tuple(point))


@dataclass(frozen=True)
class CongruenceLattice:
    """The lattice T of a lens space with a canonical generating matrix.

    ``basis`` is stored row-major; its *columns* generate T and it is in
    upper-triangular column Hermite normal form.
    """

    params: LensParams
    basis: tuple[tuple[int, ...], ...]

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def q(self) -> int:
        return self.params.q

    def columns(self) -> list[tuple[int, ...]]:
        return [tuple(row[j] for row in self.basis) for j in range(self.n)]

    def det(self) -> int:
        # triangular
        return math.prod(self.basis[i][i] for i in range(self.n))

    def __contains__(self, point) -> bool:
        return contains(self, point)


class Region(enum.Enum):
    """Shell regions the dynamic-programming counter understands."""

    FULL = "full"
    CLOSED_ORTHANT = "closed"
    OPEN_ORTHANT = "open"


# A shell region is either one of the Region kinds or a cone object exposing
# ``contains(coords)`` and living in the closed positive orthant.
ShellRegion = Union[Region, "object"]


def hermite_normal_form(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Upper-triangular column HNF of a nonsingular integer matrix.

    Column operations only, so the column lattice is preserved.  Diagonal
    entries are positive and entries to the right of a pivot are reduced
    into ``[0, pivot)``.
    """
    a = [list(map(int, row)) for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise DimensionError("hermite_normal_form expects a square matrix")

    def col_axpy(dst, src, k):
        # column dst -= k * column src
        for row in a:
            row[dst] -= k * row[src]

    def col_swap(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]

    for i in range(n - 1, -1, -1):
        # clear row i in columns 0..i-1 using Euclid against column i
        for j in range(i):
            while a[i][j] != 0:
                if a[i][i] == 0 or abs(a[i][j]) < abs(a[i][i]):
                    col_swap(i, j)
                    continue
                col_axpy(j, i, a[i][j] // a[i][i])
        if a[i][i] == 0:
            raise ValueError("matrix is singular")
        if a[i][i] < 0:
            for row in a:
                row[i] = -row[i]
    for i in range(n - 1, -1, -1):
        piv = a[i][i]
        for j in range(i + 1, n):
            col_axpy(j, i, a[i][j] // piv)
    return a


def build_lattice(params: LensParams) -> CongruenceLattice:
    """Construct T for ``params`` with its canonical basis.

    Starts from the columns q*e_1 and e_j - c_j*e_1 (c_j = p_j / p_1 mod q),
    which span T with index q by construction, then reduces to HNF.
    """
    if not isinstance(params, LensParams):
        params = LensParams(*params)
    n, q = params.n, params.q
    a = [[0] * n for _ in range(n)]
    a[0][0] = q
    if q == 1:
        for j in range(1, n):
            a[j][j] = 1
    else:
        inv1 = pow(params.p[0], -1, q)
        for j in range(1, n):
            a[j][j] = 1
            a[0][j] = -(params.p[j] * inv1 % q)
    basis = hermite_normal_form(a)
    return CongruenceLattice(params, tuple(tuple(row) for row in basis))


def contains(lattice: CongruenceLattice, point) -> bool:
    coords = as_point(point).coords
    if len(coords) != lattice.n:
        raise DimensionError(
            f"point has {len(coords)} coordinates, lattice lives in Z^{lattice.n}"
        )
    q = lattice.q
    return sum(a * p for a, p in zip(coords, lattice.params.p)) % q == 0


def _compositions(s: int, n: int) -> Iterator[tuple[int, ...]]:
    """Nonnegative compositions of s into n parts, lexicographic order."""
    if n == 1:
        yield (s,)
        return
    for first in range(s + 1):
        for rest in _compositions(s - first, n - 1):
            yield (first,) + rest


def _signed_shell(s: int, n: int) -> Iterator[tuple[int, ...]]:
    for comp in _compositions(s, n):
        support = [i for i, c in enumerate(comp) if c]
        for mask in range(1 << len(support)):
            v = list(comp)
            for bit, i in enumerate(support):
                if mask >> bit & 1:
                    v[i] = -v[i]
            yield tuple(v)


def _region_filter(region, n: int):
    if region is Region.FULL or region is Region.CLOSED_ORTHANT:
        return None
    if region is Region.OPEN_ORTHANT:
        return lambda v: all(v)
    if hasattr(region, "contains"):
        if getattr(region, "n", n) != n:
            raise DimensionError("cone and lattice dimensions differ")
        return region.contains
    raise TypeError(f"unsupported shell region {region!r}")


def shell_points(lattice: CongruenceLattice, region, s: int) -> list[LatticePoint]:
    """Points of T in ``region`` with l1-norm exactly ``s``, sorted lexicographically."""
    if s < 0:
        return []
    n, q, p = lattice.n, lattice.q, lattice.params.p
    gen = _signed_shell(s, n) if region is Region.FULL else _compositions(s, n)
    keep = _region_filter(region, n)
    out = []
    for v in gen:
        if sum(a * b for a, b in zip(v, p)) % q:
            continue
        if keep is not None and not keep(v):
            continue
        out.append(v)
    out.sort()
    return [LatticePoint(v) for v in out]


def _dp_dtype(s_max: int, n: int):
    # every DP cell is bounded by #{a in Z^n : |a|_1 <= s_max}
    return np.int64 if (2 * s_max + 1) ** n < 2**62 else object


def shell_counts(lattice: CongruenceLattice, region: Region, s_max: int) -> list[int]:
    """N(0), ..., N(s_max) for an orthant or full region, in O(n q s_max).

    Table ``dp[m, r]`` counts partial vectors of l1-norm m whose weighted
    coordinate sum is r mod q.  Appending a coordinate with weight p
    multiplies the generating series by 1/(1 - x w^p) (closed orthant),
    minus 1 for the open orthant, or 1/(1 - x w^p) + 1/(1 - x w^-p) - 1
    for a signed coordinate; each geometric factor is a first-order
    recurrence along m.
    """
    if not isinstance(region, Region):
        raise TypeError(
            "the DP counter supports only full / closed / open orthant regions; "
            "count cones through the enumeration path"
        )
    if s_max < 0:
        return []
    q = lattice.q
    dp = np.zeros((s_max + 1, q), dtype=_dp_dtype(s_max, lattice.n))
    dp[0, 0] = 1

    rows = np.arange(s_max + 1)[:, None]
    cols = np.arange(q)[None, :]

    def geometric(old, shift):
        # new[m, r] = old[m, r] + new[m-1, r-shift]; reading row m at offset
        # m*shift turns this into a running sum down the columns
        idx = (cols + rows * shift) % q
        twisted = np.cumsum(np.take_along_axis(old, idx, axis=1), axis=0, dtype=old.dtype)
        new = np.empty_like(old)
        np.put_along_axis(new, idx, twisted, axis=1)
        return new

    for pj in lattice.params.p:
        if region is Region.CLOSED_ORTHANT:
            dp = geometric(dp, pj)
        elif region is Region.OPEN_ORTHANT:
            dp = geometric(dp, pj) - dp
        else:
            dp = geometric(dp, pj) + geometric(dp, -pj) - dp
    return [int(x) for x in dp[:, 0]]


def shell_count_fast(lattice: CongruenceLattice, region: Region, s: int) -> int:
    if s < 0:
        return 0
    return shell_counts(lattice, region, s)[s]
