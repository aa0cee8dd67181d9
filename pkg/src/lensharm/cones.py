"""Simplicial cones in the closed positive orthant and their l1-ball sections."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np


class DegenerateConeError(ValueError):
    pass


def _det(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant by fraction-valued Gaussian elimination."""
    a = [list(map(Fraction, r)) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _solve(columns: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve sum_i x_i * columns[i] = rhs exactly (columns independent)."""
    n = len(columns)
    aug = [[Fraction(columns[j][i]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for c in range(n):
        piv = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [x * inv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [aug[i][n] for i in range(n)]


def _primitive(ray: Sequence[Fraction]) -> tuple[int, ...]:
    den = math.lcm(*(x.denominator for x in ray))
    ints = [int(x * den) for x in ray]
    g = math.gcd(*ints)
    return tuple(v // g for v in ints)


@dataclass(frozen=True)
class SimplicialCone:
    """Cone spanned by n independent nonnegative rays.

    ``rays`` keep the caller's (rational) values; membership tests run on
    primitive integer multiples of the rays, which span the same cone.
    """

    rays: tuple[tuple[Fraction, ...], ...]
    _facets: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        rays = tuple(tuple(Fraction(x) for x in r) for r in self.rays)
        n = len(rays)
        if n == 0 or any(len(r) != n for r in rays):
            raise DegenerateConeError(f"need n rays of length n, got {len(rays)} rays")
        if any(x < 0 for r in rays for x in r):
            raise DegenerateConeError("cone rays must lie in the closed positive orthant")
        if any(not any(r) for r in rays):
            raise DegenerateConeError("zero ray")
        object.__setattr__(self, "rays", rays)
        ints = [_primitive(r) for r in rays]
        d = _det(ints)  # rows = rays, same |det| as the column matrix
        if d == 0:
            raise DegenerateConeError("cone rays are linearly dependent")
        # lambda = R^{-1} x with R = [rays as columns]; scaled by |det R| the
        # inverse is the signed adjugate, an integer matrix.
        sign = 1 if d > 0 else -1
        inv_cols = [_solve(ints, [Fraction(int(k == j)) for j in range(n)]) for k in range(n)]
        facets = tuple(
            tuple(int(inv_cols[k][i] * d * sign) for k in range(n)) for i in range(n)
        )
        object.__setattr__(self, "_facets", facets)

    @property
    def n(self) -> int:
        return len(self.rays)

    @classmethod
    def standard(cls, n: int) -> "SimplicialCone":
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def contains(self, point) -> bool:
        """Fast membership for integer points (facet inequalities)."""
        return all(sum(f * x for f, x in zip(row, point)) >= 0 for row in self._facets)

    def facet_matrix(self) -> np.ndarray:
        """Integer matrix M with x in cone iff M @ x >= 0."""
        return np.array(self._facets, dtype=np.int64)

    def split(self, interior_ray) -> list["SimplicialCone"]:
        """Stellar subdivision at ``interior_ray``; parts with zero volume dropped."""
        lam = _solve(self.rays, [Fraction(x) for x in interior_ray])
        if any(x < 0 for x in lam):
            raise ValueError("ray is not inside the cone")
        parts = []
        for i, li in enumerate(lam):
            if li == 0:
                continue
            rays = list(self.rays)
            rays[i] = tuple(Fraction(x) for x in interior_ray)
            parts.append(SimplicialCone(tuple(rays)))
        return parts


@dataclass(frozen=True)
class OrthantSignature:
    signs: tuple[int, ...]

    def __post_init__(self):
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError("orthant signs must be +1 or -1")


@dataclass(frozen=True)
class OrthantCone:
    """A coordinate orthant, paired with the reflection onto the positive one."""

    signature: OrthantSignature

    @property
    def n(self) -> int:
        return len(self.signature.signs)

    @property
    def rays(self) -> tuple[tuple[int, ...], ...]:
        s = self.signature.signs
        return tuple(tuple(s[i] if i == j else 0 for j in range(self.n)) for i in range(self.n))

    def reflect(self, point) -> tuple[int, ...]:
        return tuple(s * x for s, x in zip(self.signature.signs, point))

    def contains(self, point) -> bool:
        return all(x >= 0 for x in self.reflect(point))

    def positive_cone(self) -> SimplicialCone:
        return SimplicialCone.standard(self.n)


def orthant_cone(sig: OrthantSignature | Sequence[int]) -> OrthantCone:
    if not isinstance(sig, OrthantSignature):
        sig = OrthantSignature(tuple(sig))
    return OrthantCone(sig)


def cone_contains(cone, point) -> bool:
    """Exact membership: solve point = sum lambda_i ray_i and check lambda >= 0."""
    pt = [Fraction(x) for x in point]
    if len(pt) != cone.n:
        raise ValueError("dimension mismatch")
    if not any(pt):
        return True
    lam = _solve([[Fraction(x) for x in r] for r in cone.rays], pt)
    return all(x >= 0 for x in lam)


def section_volume(cone) -> Fraction:
    """Vol(cone ∩ B_l1(0,1)) = |det(normalized rays)| / n!."""
    n = cone.n
    normed = []
    for r in cone.rays:
        norm = sum(abs(Fraction(x)) for x in r)
        if norm == 0:
            raise DegenerateConeError("ray with zero l1-norm")
        normed.append([Fraction(x) / norm for x in r])
    return abs(_det(normed)) / math.factorial(n)


def transformed_section_volume(cone, lattice) -> Fraction:
    """Vol(A^{-1} cone ∩ B_l1(0,1)) = section_volume / |det A|."""
    if cone.n != lattice.n:
        raise ValueError("cone and lattice dimensions differ")
    return section_volume(cone) / abs(lattice.det())


def parse_cone(text: str) -> SimplicialCone:
    """Parse the one-ray-per-line format ("1,1" / "1/2,0")."""
    rays = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        rays.append(tuple(Fraction(tok.strip()) for tok in line.split(",")))
    return SimplicialCone(tuple(rays))


def format_cone(cone) -> str:
    return "\n".join(",".join(str(x) for x in r) for r in cone.rays) + "\n"
