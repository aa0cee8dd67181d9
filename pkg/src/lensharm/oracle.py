"""Slow reference implementations used to pin fixtures and check fast paths.

Nothing here imports the counting or geometry modules: regions are passed
as plain strings ("full", "closed", "open") or as a tuple of integer rays.
Library modules never import it; only the undocumented `oracle` CLI command does.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

import mpmath

SHELL_GUARD = 10**7


class OracleError(RuntimeError):
    pass


def _q_and_p(params):
    if hasattr(params, "q"):
        return params.q, tuple(params.p)
    q, *p = params
    return q, tuple(p)


def _region_key(region):
    value = getattr(region, "value", region)
    if isinstance(value, str):
        return value
    rays = getattr(region, "rays", region)
    return tuple(tuple(Fraction(x) for x in r) for r in rays)


def _leibniz_det(m):
    n = len(m)
    total = 0
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1) ** inv
        for i, j in enumerate(perm):
            term *= m[i][j]
        total += term
    return total


def in_cone_cramer(rays, x) -> bool:
    """x in cone(rays) via Cramer's rule: each coefficient det_i/det >= 0."""
    n = len(rays)
    cols = [list(r) for r in rays]
    mat = [[cols[j][i] for j in range(n)] for i in range(n)]
    d = _leibniz_det(mat)
    for i in range(n):
        m = [row[:] for row in mat]
        for k in range(n):
            m[k][i] = x[k]
        if _leibniz_det(m) * d < 0:
            return False
    return True


def _nonneg_vectors(s, n):
    # all nonnegative integer n-vectors with coordinate sum s
    if n == 1:
        return [[s]]
    out = []
    for head in range(s, -1, -1):
        for tail in _nonneg_vectors(s - head, n - 1):
            out.append([head] + tail)
    return out


def _shell_size(s, n, signed):
    from math import comb

    if s == 0:
        return 1
    if not signed:
        return comb(s + n - 1, n - 1)
    return sum(comb(n, k) * 2**k * comb(s - 1, k - 1) for k in range(1, n + 1))


def brute_shell_count(params, region, s: int) -> int:
    """Count T-points of l1-norm s in region by listing every such vector."""
    q, p = _q_and_p(params)
    n = len(p)
    key = _region_key(region)
    signed = key == "full"
    if _shell_size(s, n, signed) > SHELL_GUARD:
        raise OracleError(f"shell {s} in dimension {n} is too large to enumerate")
    count = 0
    for v in _nonneg_vectors(s, n):
        if signed:
            candidates = set()
            for signs in product((1, -1), repeat=n):
                candidates.add(tuple(a * b for a, b in zip(signs, v)))
        else:
            candidates = {tuple(v)}
        for w in candidates:
            if sum(a * b for a, b in zip(w, p)) % q != 0:
                continue
            if key == "open" and 0 in w:
                continue
            if isinstance(key, tuple) and not in_cone_cramer(key, w):
                continue
            count += 1
    return count


def molien_multiplicity(params, s_max: int, dps: int = 60) -> list[int]:
    """Eigenvalue multiplicities from the invariant-theory series.

    Expands (1 - z^2) (1/q) sum_l prod_j 1/((1 - z w^{l p_j})(1 - z w^{-l p_j}))
    to degree s_max with w = exp(2 pi i / q), then rounds each coefficient and
    requires the rounding residue to be below 1e-20.
    """
    q, p = _q_and_p(params)
    with mpmath.workdps(dps):
        total = [mpmath.mpc(0)] * (s_max + 1)
        for l in range(q):
            series = [mpmath.mpc(0)] * (s_max + 1)
            series[0] = mpmath.mpc(1)
            for pj in p:
                for sign in (1, -1):
                    c = mpmath.exp(2j * mpmath.pi * sign * l * pj / q)
                    # multiply by 1/(1 - c z)
                    for k in range(1, s_max + 1):
                        series[k] += c * series[k - 1]
            total = [a + b for a, b in zip(total, series)]
        coeffs = [total[k] - (total[k - 2] if k >= 2 else 0) for k in range(s_max + 1)]
        out = []
        for k, c in enumerate(coeffs):
            c = c / q
            r = int(mpmath.nint(c.real))
            residue = abs(c - r)
            if residue > mpmath.mpf(10) ** -20:
                raise OracleError(f"coefficient {k} rounds with residue {residue}")
            out.append(r)
    return out


def brute_harmonic_dim(n: int, s: int, a) -> int:
    """Case-split of the weight-space dimension, re-evaluated literally."""
    norm = sum(abs(int(x)) for x in a)
    r = 0
    while norm + 2 * r <= s:
        if norm == s - 2 * r:
            top, k = r + n - 2, n - 2
            value = Fraction(1)
            for i in range(k):
                value = value * (top - i) / (i + 1)
            return int(value)
        r += 1
    return 0
