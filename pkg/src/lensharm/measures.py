"""Harmonic-counting (nu) and lattice-counting (mu) measures of cones.

Closed forms are exact rationals.  Empirical values come from exact
integer counts divided by the appropriate power of the truncation
parameter, so every sample is itself an exact rational.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .cones import OrthantCone, SimplicialCone, section_volume, transformed_section_volume
from .lattice import CongruenceLattice, Region
from .spectral import ConeUnion, F_from_counts, shell_count_table

DEFAULT_TOLERANCE = 0.02
DEFAULT_BUDGET = 50_000_000


class BudgetExceeded(RuntimeError):
    """Counting work for the next sample exceeds the configured cap."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


def beta_function(a: int, b: int) -> Fraction:
    """B(a, b) for positive integers, (a-1)!(b-1)!/(a+b-1)!."""
    return Fraction(math.factorial(a - 1) * math.factorial(b - 1), math.factorial(a + b - 1))


def beta_constant(n: int) -> Fraction:
    """B(n-1, n+1) / ((n-2)! 2^(n-1)), the nu/mu proportionality constant."""
    if n < 2:
        raise ValueError("n must be at least 2")
    return beta_function(n - 1, n + 1) / (math.factorial(n - 2) * 2 ** (n - 1))


def _parts(cone):
    if isinstance(cone, ConeUnion):
        return cone.cones
    return (cone,)


def _volume(cone, lattice) -> Fraction:
    if isinstance(cone, Region):
        cone = SimplicialCone.standard(lattice.n)
    return sum((transformed_section_volume(c, lattice) for c in _parts(cone)), Fraction(0))


def mu_closed_form(lattice: CongruenceLattice, cone) -> Fraction:
    return _volume(cone, lattice)


def nu_closed_form(lattice: CongruenceLattice, cone) -> Fraction:
    return beta_constant(lattice.n) * _volume(cone, lattice)


def orthant_nu(n: int, q: int) -> Fraction:
    """Simplified closed form of nu on one orthant, 1/((2n-1)! 2^(n-1) q)."""
    return Fraction(1, math.factorial(2 * n - 1) * 2 ** (n - 1) * q)


# -- empirical side ---------------------------------------------------------

def _is_standard(cone) -> bool:
    if not isinstance(cone, SimplicialCone):
        return False
    supports = []
    for r in cone.rays:
        nz = [i for i, x in enumerate(r) if x]
        if len(nz) != 1:
            return False
        supports.append(nz[0])
    return sorted(supports) == list(range(cone.n))


def counting_region(cone):
    """Region handed to the shell counter; the standard cone goes to the DP path."""
    if isinstance(cone, (Region, OrthantCone)):
        return cone
    if _is_standard(cone):
        return Region.CLOSED_ORTHANT
    return cone


def _work(lattice, region, t: int) -> int:
    if isinstance(region, (Region, OrthantCone)):
        return lattice.n * lattice.q * (t + 1)
    return math.comb(t + lattice.n, lattice.n) * len(_parts(region))


def _to_decimal(x: Fraction, digits: int = 30) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(x.numerator) / Decimal(x.denominator)


def _fraction_json(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


def _cone_json(cone):
    if isinstance(cone, Region):
        return cone.value
    if isinstance(cone, ConeUnion):
        return [_cone_json(c) for c in cone.cones]
    return [[str(Fraction(x)) for x in r] for r in cone.rays]


@dataclass
class MeasureReport:
    kind: str
    params: tuple
    cone: object
    closed_form: Fraction
    samples: list[tuple[int, Fraction]] = field(default_factory=list)
    fitted_error_slope: float | None = None
    error_constant: float | None = None
    tolerance: float = DEFAULT_TOLERANCE
    passed: bool = False
    complete: bool = True

    @property
    def final_ratio(self) -> Fraction | None:
        return self.samples[-1][1] if self.samples else None

    @property
    def final_relative_error(self) -> float | None:
        if not self.samples:
            return None
        return float(abs(self.samples[-1][1] - self.closed_form) / self.closed_form)

    def to_dict(self) -> dict:
        q, p = self.params
        return {
            "kind": self.kind,
            "q": q,
            "p": list(p),
            "cone": _cone_json(self.cone),
            "closed_form": _fraction_json(self.closed_form),
            "samples": [{"t": t, "ratio": str(_to_decimal(r))} for t, r in self.samples],
            "fitted_error_slope": self.fitted_error_slope,
            "error_constant": self.error_constant,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "complete": self.complete,
        }

    def to_csv(self) -> str:
        lines = ["t,ratio"]
        lines += [f"{t},{_to_decimal(r)}" for t, r in self.samples]
        return "\n".join(lines) + "\n"


def _assess(report: MeasureReport) -> None:
    if not report.samples:
        report.passed = False
        return
    ts = np.array([t for t, _ in report.samples], dtype=float)
    errs = np.array([float(r - report.closed_form) for _, r in report.samples])
    # least squares for err ~ C / t
    C = float(np.sum(errs / ts) / np.sum(1.0 / ts**2))
    report.error_constant = C
    nz = np.abs(errs) > 0
    if nz.sum() >= 2:
        slope = np.polyfit(np.log(ts[nz]), np.log(np.abs(errs[nz])), 1)[0]
        report.fitted_error_slope = float(slope)
    else:
        report.fitted_error_slope = None
    bound = report.tolerance * float(report.closed_form)
    if len(ts) >= 2:
        # one sample cannot separate C from the error itself
        bound = max(2 * abs(C) / ts[-1], bound)
    report.passed = bool(abs(errs[-1]) <= bound)


def _check_schedule(values: Sequence[int]) -> list[int]:
    vals = [int(v) for v in values]
    if not vals or any(v <= 0 for v in vals) or vals != sorted(vals):
        raise ValueError("sample schedule must be ascending positive integers")
    return vals


def _empirical(kind, lattice, cone, values, tolerance, budget):
    region = counting_region(cone)
    closed = nu_closed_form(lattice, cone) if kind == "nu" else mu_closed_form(lattice, cone)
    report = MeasureReport(kind, (lattice.q, lattice.params.p), cone, closed, tolerance=tolerance)
    n = lattice.n
    for t in _check_schedule(values):
        if _work(lattice, region, t) > budget:
            report.complete = False
            _assess(report)
            raise BudgetExceeded(f"sample at t={t} exceeds work budget {budget}", report)
        counts = shell_count_table(lattice, region, t)
        if kind == "nu":
            value = F_from_counts(counts, n, t)
            ratio = Fraction(value, t ** (2 * n - 1))
        else:
            ratio = Fraction(sum(counts), t**n)
        report.samples.append((t, ratio))
    _assess(report)
    return report


def nu_empirical(lattice, cone, t_values: Iterable[int], tolerance=DEFAULT_TOLERANCE,
                 budget=DEFAULT_BUDGET) -> MeasureReport:
    """Sample F(t)/t^(2n-1) over the cone and compare with the closed form."""
    return _empirical("nu", lattice, cone, list(t_values), tolerance, budget)


def mu_empirical(lattice, cone, s_values: Iterable[int], tolerance=DEFAULT_TOLERANCE,
                 budget=DEFAULT_BUDGET) -> MeasureReport:
    """Sample card(T ∩ s K)/s^n, K the cone's unit l1-ball section."""
    return _empirical("mu", lattice, cone, list(s_values), tolerance, budget)


def doubling_schedule(t_max: int, count: int = 4) -> list[int]:
    vals = sorted({max(1, t_max >> k) for k in range(count)})
    return vals


# -- Weyl constants ---------------------------------------------------------

@dataclass(frozen=True)
class PiMonomial:
    """coef * pi**power with rational coefficient and exponent."""

    coef: Fraction
    power: Fraction

    def __mul__(self, other):
        if not isinstance(other, PiMonomial):
            other = PiMonomial(Fraction(other), Fraction(0))
        return PiMonomial(self.coef * other.coef, self.power + other.power)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, PiMonomial):
            other = PiMonomial(Fraction(other), Fraction(0))
        return PiMonomial(self.coef / other.coef, self.power - other.power)

    def __pow__(self, k: int):
        return PiMonomial(self.coef**k, self.power * k)

    def rational(self) -> Fraction:
        if self.power != 0:
            raise ValueError(f"pi power {self.power} does not cancel")
        return self.coef

    def evaluate(self, dps: int = 50):
        with mpmath.workdps(dps):
            coef = mpmath.mpf(self.coef.numerator) / self.coef.denominator
            power = mpmath.mpf(self.power.numerator) / self.power.denominator
            return coef * mpmath.pi**power


PI = PiMonomial(Fraction(1), Fraction(1))


def gamma_half_integer(n: int) -> PiMonomial:
    """Gamma(n + 1/2) = (2n)! sqrt(pi) / (4^n n!)."""
    return PiMonomial(Fraction(math.factorial(2 * n), 4**n * math.factorial(n)), Fraction(1, 2))


def unit_ball_volume_odd(n: int) -> PiMonomial:
    """omega_{2n-1}, volume of the unit ball in R^(2n-1)."""
    return PiMonomial(Fraction(1), Fraction(2 * n - 1, 2)) / gamma_half_integer(n)


def sphere_volume(n: int) -> PiMonomial:
    """Vol(S^(2n-1)) = 2 pi^n / (n-1)!."""
    return PiMonomial(Fraction(2, math.factorial(n - 1)), Fraction(n))


@dataclass(frozen=True)
class WeylConstants:
    n: int
    q: int
    omega: PiMonomial
    sphere_volume: PiMonomial
    weyl_limit: Fraction
    paper_total: Fraction
    orthant_limit: Fraction
    weyl_limit_decimal: str
    paper_total_decimal: str
    orthant_limit_decimal: str


def weyl_constants(n: int, q: int, dps: int = 40) -> WeylConstants:
    """Weyl-law constant for the lens space and the two candidate totals.

    The exact values come from symbolic pi bookkeeping; the decimals are an
    independent floating evaluation with mpmath's gamma function.
    """
    if n < 2 or q < 1:
        raise ValueError("need n >= 2 and q >= 1")
    omega = unit_ball_volume_odd(n)
    vol = sphere_volume(n)
    base = omega * vol * PI ** (1 - 2 * n)
    weyl = (base * Fraction(2) ** (1 - 2 * n) / q).rational()
    stated = (base * Fraction(2) ** (1 - n) / q).rational()
    with mpmath.workdps(dps + 10):
        pi = mpmath.pi
        d = 2 * n - 1
        om = pi ** (mpmath.mpf(d) / 2) / mpmath.gamma(mpmath.mpf(d) / 2 + 1)
        sv = 2 * pi**n / mpmath.gamma(n)
        w = (2 * pi) ** (-d) * om * sv / q
        pt = mpmath.mpf(2) ** (1 - n) * pi ** (-d) * om * sv / q
        fmt = lambda x: mpmath.nstr(x, dps, strip_zeros=False)
        decs = (fmt(w), fmt(pt), fmt(w / 2**n))
    return WeylConstants(n, q, omega, vol, weyl, stated, weyl / 2**n, *decs)


# -- total mass and proportionality ---------------------------------------

def random_cone(n: int, rng: random.Random, max_entry: int = 6) -> SimplicialCone:
    from .cones import DegenerateConeError

    while True:
        rays = tuple(tuple(rng.randint(0, max_entry) for _ in range(n)) for _ in range(n))
        try:
            return SimplicialCone(rays)
        except DegenerateConeError:
            continue


@dataclass
class TotalMeasureCheck:
    params: tuple
    orthant_value: Fraction
    total: Fraction
    weyl_limit: Fraction
    paper_total: Fraction
    matches_weyl: bool
    matches_paper: bool
    ratios: list[Fraction]
    ratio_constant: Fraction
    ratios_constant: bool

    @property
    def verdict(self) -> str:
        if self.matches_weyl and not self.matches_paper:
            return "matches Weyl limit"
        if self.matches_paper and not self.matches_weyl:
            return "matches stated total"
        if self.matches_weyl:
            return "matches both"
        return "matches neither"


def total_measure_check(lattice: CongruenceLattice, cones=None, seed: int = 0,
                        n_random: int = 20) -> TotalMeasureCheck:
    """Total nu mass over all 2^n orthants against both candidate constants.

    Also checks that nu/mu equals beta_constant(n) on every cone in
    ``cones`` (default: ``n_random`` seeded random cones).
    """
    n, q = lattice.n, lattice.q
    orth = nu_closed_form(lattice, SimplicialCone.standard(n))
    total = 2**n * orth
    wc = weyl_constants(n, q)
    if cones is None:
        rng = random.Random(seed)
        cones = [random_cone(n, rng) for _ in range(n_random)]
    ratios = [nu_closed_form(lattice, c) / mu_closed_form(lattice, c) for c in cones]
    b = beta_constant(n)
    return TotalMeasureCheck(
        (q, lattice.params.p), orth, total, wc.weyl_limit, wc.paper_total,
        total == wc.weyl_limit, total == wc.paper_total, ratios, b,
        all(r == b for r in ratios),
    )


__all__ = [
    "BudgetExceeded", "MeasureReport", "PiMonomial", "TotalMeasureCheck", "WeylConstants",
    "beta_constant", "beta_function", "counting_region", "doubling_schedule", "mu_closed_form",
    "mu_empirical", "nu_closed_form", "nu_empirical", "orthant_nu", "random_cone",
    "section_volume", "total_measure_check", "weyl_constants",
]
