"""Acceptance gate. Each test records one line per criterion via the
``criterion`` fixture; the summary is printed at the end of the run."""
import json
import math
import random
import time
from fractions import Fraction
from math import comb, factorial
from pathlib import Path

import mpmath
import pytest

from lensharm.cli import run
from lensharm.cones import SimplicialCone
from lensharm.isospectral import canonicalize_isometry, isospectral
from lensharm.lattice import LensParams, Region, build_lattice, shell_count_fast, shell_counts
from lensharm.measures import (
    beta_constant,
    mu_closed_form,
    nu_closed_form,
    nu_empirical,
    random_cone,
    weyl_constants,
)
from lensharm.oracle import brute_shell_count, molien_multiplicity
from lensharm.spectral import spectrum_table

FIXTURE = Path(__file__).parent / "fixtures" / "isospectral_n3_q49.jsonl"


def _random_params(rng, n_range, q_max):
    n = rng.randint(*n_range)
    q = rng.randint(1, q_max)
    if q == 1:
        return LensParams(1, (0,) * n)
    units = [u for u in range(1, q) if math.gcd(u, q) == 1]
    return LensParams(q, tuple(rng.choice(units) for _ in range(n)))


def test_a1_sphere_spectrum(criterion):
    start = time.perf_counter()
    ok = True
    for n in (2, 3, 4):
        got = spectrum_table(build_lattice(LensParams(1, (0,) * n)), 30).multiplicities
        expect = [comb(s + 2 * n - 1, 2 * n - 1) - (comb(s + 2 * n - 3, 2 * n - 1) if s >= 2 else 0)
                  for s in range(31)]
        ok &= got == expect
        if n == 2:
            ok &= got == [(s + 1) ** 2 for s in range(31)]
    elapsed = time.perf_counter() - start
    ok &= elapsed < 5
    criterion("A1 sphere spectrum", ok, f"n=2..4, s<=30, {elapsed:.2f}s")
    assert ok


def test_a2_molien_equivalence(criterion):
    rng = random.Random(2024)
    start = time.perf_counter()
    mismatches = []
    for _ in range(50):
        params = _random_params(rng, (2, 4), 12)
        mine = spectrum_table(build_lattice(params), 25).multiplicities
        ref = molien_multiplicity((params.q,) + params.p, 25)
        if mine != ref:
            mismatches.append((params.q, params.p))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    criterion("A2 Molien equivalence", ok, f"50 instances, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert ok


A3_CASES = [(2, 1, 600, 0.03), (2, 3, 600, 0.03), (2, 5, 600, 0.03), (3, 1, 120, 0.05), (3, 2, 120, 0.05)]


@pytest.mark.parametrize("n, q, t, tol", A3_CASES)
def test_a3_orthant_convergence(criterion, n, q, t, tol):
    p = (0,) * n if q == 1 else (1,) * n
    lattice = build_lattice(LensParams(q, p))
    closed = nu_closed_form(lattice, Region.CLOSED_ORTHANT)
    simplified = Fraction(1, factorial(2 * n - 1) * 2 ** (n - 1) * q)
    start = time.perf_counter()
    report = nu_empirical(lattice, SimplicialCone.standard(n), [t], tolerance=tol)
    err = report.final_relative_error
    # open-orthant value is reported for diagnosis only
    open_counts = shell_counts(lattice, Region.OPEN_ORTHANT, t)
    open_F = sum(comb(r + n - 2, n - 2) * open_counts[s - 2 * r]
                 for s in range(t + 1) for r in range(s // 2 + 1))
    open_err = abs(Fraction(open_F, t ** (2 * n - 1)) / closed - 1)
    elapsed = time.perf_counter() - start
    ok = closed == simplified and err <= tol and elapsed < 120
    criterion("A3 orthant convergence", ok,
              f"n={n} q={q} t={t} err={err:.2%} (tol {tol:.0%}, open orthant {float(open_err):.2%})")
    assert ok


def test_a4_weyl_reconciliation(criterion):
    ok = True
    for n in (2, 3):
        for q in (1, 2, 3, 5, 7):
            wc = weyl_constants(n, q)
            orthant = nu_closed_form(build_lattice(LensParams(q, (0,) * n if q == 1 else (1,) * n)),
                                     Region.CLOSED_ORTHANT)
            ok &= 2**n * orthant == wc.weyl_limit
            ok &= wc.paper_total == 2**n * wc.weyl_limit
            with mpmath.workdps(50):
                d = 2 * n - 1
                omega = mpmath.pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
                vol = 2 * mpmath.pi**n / mpmath.gamma(n)
                direct = (2 * mpmath.pi) ** (1 - 2 * n) * omega * vol / q
                exact = mpmath.mpf(wc.weyl_limit.numerator) / wc.weyl_limit.denominator
                ok &= abs(direct - exact) < mpmath.mpf(10) ** -40
    wc = weyl_constants(2, 1)
    criterion("A4 Weyl reconciliation", ok,
              f"10 cases exact; stated total is 2^n x Weyl limit (n=2,q=1: {wc.paper_total} vs {wc.weyl_limit})")
    assert ok


def test_a5_criterion_equivalence(criterion):
    rng = random.Random(55)
    start = time.perf_counter()
    ok = True
    agree = 0
    for i in range(40):
        a = _random_params(rng, (2, 3), 15)
        if i % 3 == 0 and a.q > 1:
            # an isometric partner so that both sides of the equivalence occur
            unit = rng.choice([u for u in range(1, a.q) if math.gcd(u, a.q) == 1])
            b = LensParams(a.q, tuple(reversed([(unit * x) % a.q for x in a.p])))
        else:
            units = [u for u in range(1, a.q) if math.gcd(u, a.q) == 1] or [0]
            b = LensParams(a.q, tuple(rng.choice(units) for _ in a.p))
        D = rng.randint(1, 25)
        by_profile = isospectral(a, b, D).isospectral_up_to_K
        ma = spectrum_table(build_lattice(a), D).multiplicities
        mb = spectrum_table(build_lattice(b), D).multiplicities
        by_molien = molien_multiplicity((a.q,) + a.p, D) == molien_multiplicity((b.q,) + b.p, D)
        ok &= by_profile == (ma == mb) == by_molien
        agree += by_profile
    elapsed = time.perf_counter() - start
    ok &= elapsed < 60
    criterion("A5 isospectrality criterion", ok, f"40 pairs ({agree} agreeing), {elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def search_output():
    start = time.perf_counter()
    code, out, _ = run(["isospec", "search", "--n", "3", "--qmax", "49"])
    return code, [json.loads(line) for line in out.splitlines()], time.perf_counter() - start


def test_a6_isospectral_discovery(criterion, search_output):
    code, rows, elapsed = search_output
    ok = code == 0 and len(rows) >= 1 and elapsed < 600
    first = rows[0] if rows else None
    if first:
        a = LensParams(first["q"], tuple(first["p1"]))
        b = LensParams(first["q"], tuple(first["p2"]))
        ok &= canonicalize_isometry(a) != canonicalize_isometry(b)
        ok &= molien_multiplicity((a.q,) + a.p, 60) == molien_multiplicity((b.q,) + b.p, 60)
        ok &= spectrum_table(build_lattice(a), 60).multiplicities == spectrum_table(build_lattice(b), 60).multiplicities
    frozen = [json.loads(line) for line in FIXTURE.read_text().splitlines()]
    ok &= rows == frozen
    label = f"({first['q']};{first['p1']}) ~ ({first['q']};{first['p2']})" if first else "none"
    criterion("A6 isospectral discovery", ok, f"{len(rows)} pairs, first {label}, {elapsed:.1f}s")
    assert ok


def test_a7_mu_nu_proportional(criterion):
    rng = random.Random(77)
    ok = True
    for _ in range(20):
        params = _random_params(rng, (2, 5), 30)
        cone = random_cone(len(params.p), rng)
        lattice = build_lattice(params)
        ok &= nu_closed_form(lattice, cone) == beta_constant(len(params.p)) * mu_closed_form(lattice, cone)
    criterion("A7 mu/nu proportionality", ok, "20 random cones and lattices, exact")
    assert ok


def test_a8_dp_matches_enumeration(criterion):
    rng = random.Random(88)
    bad = []
    checked = 0
    for n in (2, 3, 4):
        for q in range(1, 13):
            if q == 1:
                p = (0,) * n
            else:
                units = [u for u in range(1, q) if math.gcd(u, q) == 1]
                p = tuple(rng.choice(units) for _ in range(n))
            lattice = build_lattice(LensParams(q, p))
            for region in Region:
                fast = shell_counts(lattice, region, 25)
                for s in range(26):
                    checked += 1
                    if fast[s] != brute_shell_count((q,) + p, region.value, s):
                        bad.append((n, q, p, region.value, s))
    lattice = build_lattice(LensParams(7, (1, 2, 3)))
    t0 = time.perf_counter()
    slow = brute_shell_count((7, 1, 2, 3), "full", 200)
    t_brute = time.perf_counter() - t0
    t0 = time.perf_counter()
    quick = shell_count_fast(lattice, Region.FULL, 200)
    t_fast = time.perf_counter() - t0
    speedup = t_brute / t_fast
    ok = not bad and slow == quick and speedup >= 50
    criterion("A8 DP vs enumeration", ok,
              f"{checked} shell counts, {len(bad)} mismatches, speedup {speedup:.0f}x at n=3 q=7 s=200")
    assert ok


def test_a9_determinant_identity(criterion, search_output):
    rng = random.Random(99)
    ok = True
    for _ in range(100):
        params = _random_params(rng, (2, 6), 40)
        lattice = build_lattice(params)
        n = len(params.p)
        ok &= abs(lattice.det()) == params.q
        ok &= mu_closed_form(lattice, SimplicialCone.standard(n)) == Fraction(1, params.q * factorial(n))
    _, rows, _ = search_output
    pair = rows[0]
    la = build_lattice(LensParams(pair["q"], tuple(pair["p1"])))
    lb = build_lattice(LensParams(pair["q"], tuple(pair["p2"])))
    for _ in range(20):
        cone = random_cone(3, rng)
        ok &= mu_closed_form(la, cone) == mu_closed_form(lb, cone)
    criterion("A9 determinant identity", ok, "100 random lattices; 20 cones on the isospectral pair")
    assert ok
