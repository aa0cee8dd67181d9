import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lensharm.cones import SimplicialCone, orthant_cone
from lensharm.lattice import LensParams, Region, build_lattice, shell_points
from lensharm.oracle import brute_harmonic_dim, brute_shell_count, molien_multiplicity
from lensharm.spectral import (
    ConeUnion,
    F_series,
    count_F,
    count_N,
    harmonic_dim,
    multiplicity,
    recover_shell_counts,
    shell_count_table,
    spectrum_table,
    sphere_multiplicity,
)


def lat(q, *p):
    return build_lattice(LensParams(q, p))


def _oracle_F(params, region, t):
    n = len(params[1:])
    N = [brute_shell_count(params, region, s) for s in range(t + 1)]
    return sum(
        math.comb(r + n - 2, n - 2) * N[s - 2 * r] for s in range(t + 1) for r in range(s // 2 + 1)
    )


@pytest.mark.parametrize(
    "n, s, a, expected",
    [(3, 2, (1, 1, 0), 1), (3, 4, (1, 1, 0), 2), (2, 3, (2, 0), 0)],
)
def test_harmonic_dim_examples(n, s, a, expected):
    assert harmonic_dim(n, s, a) == expected
    assert brute_harmonic_dim(n, s, a) == expected


def test_harmonic_dim_rejects_bad_args():
    with pytest.raises(ValueError):
        harmonic_dim(1, 2, (1,))


@settings(max_examples=200)
@given(st.integers(2, 5), st.integers(0, 20), st.lists(st.integers(-6, 6), min_size=5, max_size=5),
       st.randoms())
def test_harmonic_dim_depends_only_on_norm(n, s, coords, rnd):
    a = coords[:n]
    b = [x * rnd.choice((1, -1)) for x in a]
    rnd.shuffle(b)
    assert harmonic_dim(n, s, a) == harmonic_dim(n, s, b) == brute_harmonic_dim(n, s, a)


def test_count_N_examples():
    assert count_N(lat(3, 1, 1), Region.CLOSED_ORTHANT, 3) == 4
    cone = SimplicialCone(((1, 1), (1, 0)))
    assert count_N(lat(1, 0, 0), cone, 2) == 2
    assert [p.coords for p in shell_points(lat(1, 0, 0), cone, 2)] == [(1, 1), (2, 0)]
    for region in (Region.FULL, Region.CLOSED_ORTHANT, cone):
        assert count_N(lat(5, 1, 2), region, 0) == 1


def test_count_F_examples():
    assert count_F(lat(1, 0, 0), Region.CLOSED_ORTHANT, 2) == 7
    assert count_F(lat(7, 1, 3), Region.FULL, 0) == 1
    # pinned by the enumeration oracle: N = 1, 0, 3 so F(2) = 1 + 0 + (3 + 1)
    assert _oracle_F((2, 1, 1), "closed", 2) == 5
    assert count_F(lat(2, 1, 1), Region.CLOSED_ORTHANT, 2) == 5


@pytest.mark.parametrize("params", [(3, 1, 1), (5, 1, 2), (4, 1, 3, 1), (1, 0, 0, 0)])
def test_count_F_matches_oracle(params):
    lattice = build_lattice(LensParams(params[0], params[1:]))
    for region, key in [(Region.CLOSED_ORTHANT, "closed"), (Region.OPEN_ORTHANT, "open"),
                        (Region.FULL, "full")]:
        for t in (0, 1, 5, 9):
            assert count_F(lattice, region, t) == _oracle_F(params, key, t)


def test_cone_counts_match_oracle():
    rng = random.Random(7)
    from lensharm.measures import random_cone

    for _ in range(12):
        n = rng.randint(2, 3)
        q = rng.choice([1, 3, 4, 5])
        p = tuple(rng.choice([u for u in range(1, q + 1) if math.gcd(u, q) == 1]) for _ in range(n))
        cone = random_cone(n, rng, 4)
        lattice = build_lattice(LensParams(q, p))
        got = shell_count_table(lattice, cone, 10)
        assert got == [brute_shell_count((q,) + p, cone, s) for s in range(11)]


def test_cone_union_deduplicates_shared_face():
    left = SimplicialCone(((1, 0), (1, 1)))
    right = SimplicialCone(((1, 1), (0, 1)))
    union = ConeUnion((left, right))
    z2 = lat(1, 0, 0)
    # union is the whole orthant; diagonal points are counted once
    assert shell_count_table(z2, union, 12) == shell_count_table(z2, Region.CLOSED_ORTHANT, 12)


def test_signed_orthant_regions_partition_by_reflection():
    import itertools

    lattice = lat(7, 1, 3, 2)
    open_total = sum(
        shell_count_table(lattice, orthant_cone(sig), 15)[15] for sig in itertools.product((1, -1), repeat=3)
    )
    # closed orthants overcount points on coordinate planes
    assert open_total >= shell_count_table(lattice, Region.FULL, 15)[15]
    sig = (1, -1, 1)
    expect = brute_shell_count((7, 1, -3, 2), "closed", 15)
    assert shell_count_table(lattice, orthant_cone(sig), 15)[15] == expect


def test_multiplicity_examples():
    assert multiplicity(lat(1, 0, 0), 5) == 36
    assert multiplicity(lat(2, 1, 1), 1) == 0
    assert multiplicity(lat(2, 1, 1), 2) == 9
    assert molien_multiplicity((2, 1, 1), 2) == [1, 0, 9]


def test_spectrum_table_examples():
    t = spectrum_table(lat(1, 0, 0), 2)
    assert t.multiplicities == [1, 4, 9]
    assert [r.eigenvalue for r in t.rows] == [0, 3, 8]
    assert [r.cumulative for r in t.rows] == [1, 5, 14]
    assert spectrum_table(lat(2, 1, 1), 2).multiplicities == [1, 0, 9]
    t0 = spectrum_table(lat(9, 2, 5, 7), 0)
    assert [tuple(r) for r in t0.rows] == [(0, 0, 1, 1)]


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_multiplicities(n):
    table = spectrum_table(build_lattice(LensParams(1, (0,) * n)), 30)
    assert table.multiplicities == [sphere_multiplicity(n, s) for s in range(31)]
    if n == 2:
        assert table.multiplicities == [(s + 1) ** 2 for s in range(31)]


@pytest.mark.parametrize("params", [(5, 1, 2), (7, 1, 2, 3), (12, 1, 5, 7, 11), (9, 2, 4)])
def test_lens_multiplicity_below_sphere(params):
    lattice = build_lattice(LensParams(params[0], params[1:]))
    n = lattice.n
    for row in spectrum_table(lattice, 30).rows:
        assert row.multiplicity <= sphere_multiplicity(n, row.s)


@pytest.mark.parametrize("params", [(5, 1, 2), (7, 1, 2, 3), (3, 1, 1)])
def test_triangular_relation_inverts(params):
    lattice = build_lattice(LensParams(params[0], params[1:]))
    for region in (Region.CLOSED_ORTHANT, Region.FULL, SimplicialCone.standard(lattice.n)):
        N = shell_count_table(lattice, region, 30)
        F = [count_F(lattice, region, t) for t in range(31)]
        assert F == F_series(N, lattice.n)
        assert recover_shell_counts(F, lattice.n) == N


def test_cached_counts_grow_consistently():
    lattice = lat(11, 1, 2, 3)
    small = shell_count_table(lattice, Region.FULL, 5)
    big = shell_count_table(lattice, Region.FULL, 40)
    assert big[:6] == small
    assert shell_count_table(lattice, Region.FULL, 7) == big[:8]


def test_parallel_reads_see_complete_tables():
    from concurrent.futures import ThreadPoolExecutor

    lattice = lat(13, 1, 4, 6)
    ref = shell_count_table(build_lattice(LensParams(13, (1, 4, 6))), Region.OPEN_ORTHANT, 80)
    with ThreadPoolExecutor(8) as pool:
        results = list(pool.map(lambda s: shell_count_table(lattice, Region.OPEN_ORTHANT, s), range(80)))
    for s, r in enumerate(results):
        assert r == ref[: s + 1]
