"""Structure checks for the t-indexed Maxwell-Boltzmann composition family.

The composed moments mu^(t)_n are polynomials in t, so the semigroup law
"compose at s, then convolve with the composition at t, and you get the
composition at s+t" is a statement about bivariate polynomials in (s, t).
This module verifies it coefficientwise in exact arithmetic, examines the
alternating-term structure of a single composed moment, checks the
two-sided envelope t*mu_n >= mu^(t)_n > (1-theta)*t*mu_n for log-convex
input, and runs the empirical theta-threshold scan on the canonical
lattice family mu_n = q^(n^2), whose log-convexity ratio is the constant
theta = 1/q^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt
from typing import Optional, Sequence

from .moment_algebra import (
    MomentSequence,
    TPolynomial,
    _composition_sum,
    binom_general,
    mb_compose_t,
)
from .stieltjes import PositivityVerdict, stieltjes_verdict

# ---------------------------------------------------------------------------
# bivariate polynomials in (s, t), kept as {(i, j): Fraction} with zero
# coefficients dropped


def _bi_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for key, c in b.items():
        c2 = out.get(key, Fraction(0)) + c
        if c2:
            out[key] = c2
        else:
            out.pop(key, None)
    return out


def _bi_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, j), c in a.items():
        for (k, l), d in b.items():
            key = (i + k, j + l)
            c2 = out.get(key, Fraction(0)) + c * d
            if c2:
                out[key] = c2
            else:
                out.pop(key, None)
    return out


def _poly_in_s(p: TPolynomial) -> dict:
    return {(i, 0): c for i, c in enumerate(p.coeffs) if c}


def _poly_in_t(p: TPolynomial) -> dict:
    return {(0, j): c for j, c in enumerate(p.coeffs) if c}


def _poly_in_s_plus_t(p: TPolynomial) -> dict:
    """Substitute s + t for the variable of a univariate polynomial."""
    out: dict = {}
    for d, c in enumerate(p.coeffs):
        if not c:
            continue
        for i in range(d + 1):
            key = (i, d - i)
            c2 = out.get(key, Fraction(0)) + c * comb(d, i)
            if c2:
                out[key] = c2
            else:
                out.pop(key, None)
    return out


@dataclass(frozen=True)
class SemigroupIdentityReport:
    """Coefficientwise comparison of the composed-then-convolved moments
    against the composition at s + t, through the given depth."""

    depth: int
    holds: bool
    first_failure: Optional[int] = None

    def __bool__(self) -> bool:
        return self.holds


def mb_semigroup_identity(m: MomentSequence, depth: int) -> SemigroupIdentityReport:
    """Verify sum_j C(n,j) mu^(s)_j mu^(t)_{n-j} = mu^(s+t)_n exactly.

    Both sides are expanded as bivariate polynomials in (s, t) and compared
    coefficient by coefficient, for every n <= depth.
    """
    m.require_exact("mb_semigroup_identity")
    if depth > m.degree:
        raise ValueError(f"depth {depth} exceeds sequence degree {m.degree}")
    polys = mb_compose_t(m, depth)
    for n in range(depth + 1):
        lhs: dict = {}
        for j in range(n + 1):
            term = _bi_mul(_poly_in_s(polys[j]), _poly_in_t(polys[n - j]))
            lhs = _bi_add(lhs, {k: comb(n, j) * c for k, c in term.items()})
        rhs = _poly_in_s_plus_t(polys[n])
        if lhs != rhs:
            return SemigroupIdentityReport(depth, False, n)
    return SemigroupIdentityReport(depth, True)


# ---------------------------------------------------------------------------
# alternating-term structure of a single composed moment


@dataclass(frozen=True)
class AlternationReport:
    """Term-by-term structure of mu^(t)_n grouped by occupancy count j.

    terms[j-1] is C(t,j) * S_j(n) for j = 1..n, so the composed moment is
    their plain sum. The four checks are reported independently; `holds`
    is their conjunction. Preconditions (t inside (0,1), strict
    log-convexity of the examined prefix) are reported, never enforced:
    a failure outside the precondition region is informative, not an error.
    """

    t: Fraction
    n: int
    terms: tuple
    leading_term: Fraction
    leading_matches: bool
    signs_alternate: bool
    moduli_nonincreasing: bool
    tails_bounded: bool
    preconditions: dict

    @property
    def holds(self) -> bool:
        return (self.leading_matches and self.signs_alternate
                and self.moduli_nonincreasing and self.tails_bounded)


def alternation_check(m: MomentSequence, t, n: int) -> AlternationReport:
    """Group mu^(t)_n by occupancy count and test the alternating pattern.

    Checks that the j=1 term equals t*mu_n, that term signs alternate with
    j, that absolute values never increase, and that each tail sum is no
    larger in modulus than the term just before it.
    """
    m.require_exact("alternation_check")
    t = Fraction(t)
    if not 1 <= n <= m.degree:
        raise ValueError("need 1 <= n <= degree")
    vals = [Fraction(v) for v in m.values]
    terms = tuple(binom_general(t, j) * _composition_sum(vals, n, j)
                  for j in range(1, n + 1))

    leading = t * vals[n]
    signs_ok = all((-1) ** j * terms[j] > 0 if terms[j] else False
                   for j in range(len(terms)))
    moduli = [abs(x) for x in terms]
    moduli_ok = all(a >= b for a, b in zip(moduli, moduli[1:]))
    tails_ok = True
    for j in range(1, len(terms)):
        if abs(sum(terms[j:])) > moduli[j - 1]:
            tails_ok = False
            break

    strict = None
    if n >= 2:
        strict = all(vals[k] ** 2 < vals[k - 1] * vals[k + 1]
                     for k in range(1, n))
    pre = {"t_in_unit_interval": 0 < t < 1, "strictly_log_convex": strict}
    return AlternationReport(t, n, terms, leading, terms[0] == leading,
                             signs_ok, moduli_ok, tails_ok, pre)


# ---------------------------------------------------------------------------
# two-sided envelope


@dataclass(frozen=True)
class EnvelopeReport:
    """Outcome of the bound t*mu_n >= mu^(t)_n > (1-theta)*t*mu_n.

    kind is "holds", "violated" or "precondition-failed"; rows carries
    (n, lower, value, upper) for every checked n. The upper bound is an
    equality at n = 1, hence non-strict.
    """

    kind: str
    theta: Fraction
    t: Fraction
    depth: int
    rows: tuple = ()
    witness: Optional[tuple] = None

    @property
    def holds(self) -> bool:
        return self.kind == "holds"


def envelope_bounds_check(m: MomentSequence, theta, t, depth: int) -> EnvelopeReport:
    """Check the composed moments against their two-sided linear envelope.

    Requires the examined prefix to be theta-log-convex (every ratio
    mu_n^2/(mu_{n-1} mu_{n+1}) at most theta) and t in (0, 1); when either
    fails the report says so instead of judging the bounds.
    """
    m.require_exact("envelope_bounds_check")
    theta = Fraction(theta)
    t = Fraction(t)
    if not 1 <= depth <= m.degree:
        raise ValueError("need 1 <= depth <= degree")
    vals = [Fraction(v) for v in m.values]
    if any(v <= 0 for v in vals[:depth + 1]):
        raise ValueError("envelope_bounds_check needs positive entries")
    if not 0 < t < 1:
        return EnvelopeReport("precondition-failed", theta, t, depth,
                              witness=("t outside (0,1)", t))
    for k in range(1, depth):
        ratio = vals[k] ** 2 / (vals[k - 1] * vals[k + 1])
        if ratio > theta:
            return EnvelopeReport("precondition-failed", theta, t, depth,
                                  witness=("log-convexity ratio exceeds theta",
                                           k, ratio))
    polys = mb_compose_t(m, depth)
    rows = []
    for n in range(1, depth + 1):
        value = polys[n](t)
        upper = t * vals[n]
        lower = (1 - theta) * upper
        rows.append((n, lower, value, upper))
        if not (lower < value <= upper):
            return EnvelopeReport("violated", theta, t, depth, tuple(rows),
                                  witness=(n, lower, value, upper))
    return EnvelopeReport("holds", theta, t, depth, tuple(rows))


# ---------------------------------------------------------------------------
# theta-threshold scan


def _rational_sqrt(x: Fraction) -> Optional[Fraction]:
    num, den = x.numerator, x.denominator
    if num < 0:
        return None
    a, b = isqrt(num), isqrt(den)
    if a * a == num and b * b == den:
        return Fraction(a, b)
    return None


def lattice_family(q: Fraction, upto: int) -> MomentSequence:
    """The canonical constant-ratio log-convex family mu_n = q^(n^2)."""
    q = Fraction(q)
    if q <= 1:
        raise ValueError("q must exceed 1")
    return MomentSequence.from_exact([q ** (n * n) for n in range(upto + 1)])


@dataclass(frozen=True)
class ScanCell:
    """Stieltjes outcome for one (theta, t) pair of the scan grid."""

    theta: Fraction
    t: Fraction
    verdict: PositivityVerdict

    @property
    def passed(self) -> bool:
        return self.verdict.kind == "strictly-positive"


DEFAULT_THETA_GRID = (Fraction(1, 100), Fraction(1, 36), Fraction(1, 16),
                      Fraction(1, 9), Fraction(1, 4))
DEFAULT_T_GRID = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))
REFERENCE_THRESHOLD = Fraction(1, 6)


@dataclass(frozen=True)
class ThresholdScanResult:
    """Pass/fail grid of the composed lattice families under the Stieltjes
    test, with the largest all-pass theta and the 1/6 reference line.

    monotone_in_theta records whether each t-column is downward closed
    (failures only above some theta); it is observed from the grid, never
    assumed. ratio_bounds carries theta/(1-theta)^2 per theta, with a
    verdict against `delta` when one was supplied.
    """

    theta_grid: tuple
    t_grid: tuple
    depth: int
    pass_matrix: tuple
    empirical_theta_max: Optional[Fraction]
    reference_threshold: Fraction
    monotone_in_theta: bool
    ratio_bounds: tuple
    delta: Optional[Fraction] = None


def theta_threshold_scan(theta_grid: Sequence = DEFAULT_THETA_GRID,
                         t_grid: Sequence = DEFAULT_T_GRID,
                         depth: int = 5,
                         delta=None) -> ThresholdScanResult:
    """Scan lattice families over a theta grid for Stieltjes survival.

    Each theta must be 1/q^2 for rational q; the family mu_n = q^(n^2) is
    composed at every t of the grid and the composed prefix is run through
    stieltjes_verdict to `depth`, all in exact arithmetic. The result is
    reproducible bit for bit.
    """
    thetas = sorted(Fraction(x) for x in theta_grid)
    ts = tuple(Fraction(x) for x in t_grid)
    if any(not 0 < th < 1 for th in thetas):
        raise ValueError("theta values must lie in (0,1)")
    if any(not 0 < t < 1 for t in ts):
        raise ValueError("t values must lie in (0,1)")
    delta = Fraction(delta) if delta is not None else None

    matrix = []
    for theta in thetas:
        q = _rational_sqrt(1 / theta)
        if q is None:
            raise ValueError(f"theta={theta} is not 1/q^2 for rational q")
        m = lattice_family(q, 2 * depth + 1)
        polys = mb_compose_t(m, 2 * depth + 1)
        row = []
        for t in ts:
            composed = MomentSequence.from_exact([p(t) for p in polys])
            row.append(ScanCell(theta, t, stieltjes_verdict(composed, depth)))
        matrix.append(tuple(row))

    best = None
    for theta, row in zip(thetas, matrix):
        if all(cell.passed for cell in row):
            best = theta
    monotone = True
    for col in range(len(ts)):
        seen_fail = False
        for row in matrix:
            if not row[col].passed:
                seen_fail = True
            elif seen_fail:
                monotone = False
    ratios = tuple((theta, theta / (1 - theta) ** 2,
                    None if delta is None else theta / (1 - theta) ** 2 <= delta)
                   for theta in thetas)
    return ThresholdScanResult(tuple(thetas), ts, depth, tuple(matrix), best,
                               REFERENCE_THRESHOLD, monotone, ratios, delta)
