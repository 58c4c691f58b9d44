"""Exact Hankel analysis of moment sequences.

Determinants, Stieltjes positivity verdicts, Fekete total positivity,
indeterminacy diagnostics and log-convexity reports. The exact paths work on
Fractions and integers only; a sequence on the approximate backend may still
obtain the verdict-style reports by supplying an explicit tolerance, in which
case its dyadic float entries are converted to exact rationals and any
determinant smaller than tolerance * (Hadamard bound) in absolute value is
classified as numerically zero.

All verdicts are depth-qualified: they speak about the examined window only
and never claim more than finite-depth evidence.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Optional, Sequence, Union

from .exceptions import BackendError
from .moment_algebra import MomentSequence

DEFAULT_TOLERANCE = Fraction(1, 2 ** 40)


@dataclass(frozen=True)
class HankelQuery:
    """Address of the (size+1) x (size+1) Hankel matrix [a_{shift+i+j}].

    The matrix spans sequence indices shift .. shift + 2*size, so a size-0
    query addresses the single entry a_shift.
    """

    shift: int
    size: int

    def __post_init__(self):
        if self.shift < 0 or self.size < 0:
            raise ValueError("shift and size must be non-negative")

    @property
    def max_index(self) -> int:
        return self.shift + 2 * self.size


def _mpf_to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    if man == 0 and exp == 0:
        return Fraction(0)
    val = Fraction(-int(man) if sign else int(man))
    if exp >= 0:
        return val * (1 << exp)
    return val / (1 << (-exp))


def _sequence_values(m, tolerance=None) -> list:
    """Entries of m as exact Fractions; approximate input needs a tolerance."""
    if isinstance(m, MomentSequence):
        if m.exact:
            return list(m.values)
        if tolerance is None:
            raise BackendError(
                "exact Hankel analysis of an approximate sequence needs an explicit tolerance")
        return [_mpf_to_fraction(v) for v in m.values]
    return [Fraction(v) for v in m]


def hankel_matrix(values: Sequence, q: HankelQuery) -> list:
    if q.max_index >= len(values):
        raise ValueError(
            "query (shift=%d, size=%d) needs index %d but sequence ends at %d"
            % (q.shift, q.size, q.max_index, len(values) - 1))
    n = q.size + 1
    return [[values[q.shift + i + j] for j in range(n)] for i in range(n)]


def _det_bareiss(rows: list) -> Fraction:
    """Exact determinant by fraction-free Bareiss elimination.

    Denominators are cleared per row first so the elimination runs on
    integers; the accumulated row multipliers divide out at the end.
    """
    n = len(rows)
    denom_product = 1
    m = []
    for row in rows:
        row = [Fraction(v) for v in row]
        lcm = 1
        for v in row:
            d = v.denominator
            lcm = lcm * d // gcd(lcm, d)
        denom_product *= lcm
        m.append([int(v * lcm) for v in row])

    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = None
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    swap = r
                    break
            if swap is None:
                return Fraction(0)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                m[i][j] = (pivot * m[i][j] - mik * m[k][j]) // prev
            m[i][k] = 0
        prev = pivot
    return Fraction(sign * m[n - 1][n - 1], denom_product)


def hankel_det(m, q: HankelQuery) -> Fraction:
    """Exact Hankel determinant at the addressed window.

    Accepts a MomentSequence (exact backend) or any sequence of rationals.
    """
    if isinstance(m, MomentSequence):
        m.require_exact("hankel_det")
    vals = _sequence_values(m)
    return _det_bareiss(hankel_matrix(vals, q))


def _hadamard_bound(rows) -> Fraction:
    """Upper bound on |det| by the product of row Euclidean norms.

    The square roots are replaced by cheap rational over-estimates, so the
    returned value is a valid (slightly loose) bound.
    """
    bound = Fraction(1)
    for row in rows:
        s = sum(Fraction(v) ** 2 for v in row)
        if s == 0:
            return Fraction(0)
        # ceil-ish rational sqrt upper bound
        num = isqrt(s.numerator) + 1
        den = isqrt(s.denominator)
        bound *= Fraction(num, max(den, 1))
    return bound


class _SignJudge:
    """Classify exact determinants, treating tiny ones as zero when a
    tolerance is in force (approximate-backend inputs only)."""

    def __init__(self, tolerance: Optional[Fraction]):
        self.tolerance = tolerance

    def sign(self, det: Fraction, rows) -> int:
        if self.tolerance is not None:
            cutoff = self.tolerance * _hadamard_bound(rows)
            if abs(det) <= cutoff:
                return 0
        if det > 0:
            return 1
        if det < 0:
            return -1
        return 0


def _judge_for(m, tolerance) -> tuple:
    """(values, judge) for an input sequence, enforcing backend rules."""
    if isinstance(m, MomentSequence) and not m.exact:
        if tolerance is None:
            raise BackendError(
                "approximate sequences need an explicit tolerance for Hankel verdicts")
        tol = Fraction(tolerance) if not isinstance(tolerance, Fraction) else tolerance
        return [_mpf_to_fraction(v) for v in m.values], _SignJudge(tol)
    vals = _sequence_values(m)
    return vals, _SignJudge(None)


@dataclass(frozen=True)
class PositivityVerdict:
    """Outcome of the two-shift Hankel positivity check.

    kind: "strictly-positive", "semi-definite" or "not-stieltjes".
    witness carries the offending query for the last two kinds, with its
    exact determinant value (for a negative entry the query has size 0 and
    the value is the entry itself).
    """

    kind: str
    depth: int
    witness: Optional[HankelQuery] = None
    witness_value: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.kind == "strictly-positive"


def stieltjes_verdict(m, upto: int, tolerance=None) -> PositivityVerdict:
    """Check the Stieltjes condition to finite depth.

    Evaluates the shift-0 and shift-1 Hankel determinants of all sizes up to
    `upto`. All strictly positive (and all window entries positive) means
    the prefix is consistent with a Stieltjes moment sequence at this depth.
    A negative determinant, or a negative entry anywhere in the examined
    window, refutes it outright; a zero yields the semi-definite verdict.

    The sequence must supply every index the depth claims to have checked
    (2*upto + 2 entries); a shorter prefix is an error, never a silently
    weaker certificate.
    """
    if upto < 0:
        raise ValueError("upto must be >= 0")
    vals, judge = _judge_for(m, tolerance)
    top = 1 + 2 * upto
    if len(vals) <= top:
        raise ValueError("depth %d needs %d entries, got %d"
                         % (upto, top + 1, len(vals)))
    for idx in range(top + 1):
        s = judge.sign(Fraction(vals[idx]), [[vals[idx]]])
        if s < 0:
            return PositivityVerdict("not-stieltjes", upto,
                                     HankelQuery(idx, 0), Fraction(vals[idx]))
    first_zero = None
    for size in range(upto + 1):
        for shift in (0, 1):
            q = HankelQuery(shift, size)
            rows = hankel_matrix(vals, q)
            det = _det_bareiss(rows)
            s = judge.sign(det, rows)
            if s < 0:
                return PositivityVerdict("not-stieltjes", upto, q, det)
            if s == 0 and first_zero is None:
                first_zero = (q, det)
    if first_zero is not None:
        return PositivityVerdict("semi-definite", upto, first_zero[0], first_zero[1])
    return PositivityVerdict("strictly-positive", upto)


@dataclass(frozen=True)
class TotalPositivityVerdict:
    """Outcome of the Fekete consecutive-minor enumeration.

    kind: "strictly-tp", "semi-definite" or "not-tp". The witness names the
    offending minor by (row_start, col_start, order).
    """

    kind: str
    query: HankelQuery
    minors_checked: int
    witness: Optional[tuple] = None
    witness_value: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.kind == "strictly-tp"


def fekete_total_positivity(m, q: HankelQuery, tolerance=None) -> TotalPositivityVerdict:
    """Strict total positivity of the addressed Hankel matrix.

    Fekete's criterion: if every minor on consecutive row and column index
    blocks is strictly positive, the matrix is strictly totally positive,
    so only (size+1)^2-ish many minors need evaluation instead of all of
    them. Any negative consecutive minor refutes TP outright; a zero one
    yields the semi-definite verdict (strictness fails, and Fekete's
    reduction no longer certifies the remaining minors).
    """
    vals, judge = _judge_for(m, tolerance)
    matrix = hankel_matrix(vals, q)
    n = q.size + 1
    checked = 0
    first_zero = None
    for order in range(1, n + 1):
        for r0 in range(n - order + 1):
            for c0 in range(n - order + 1):
                sub = [row[c0:c0 + order] for row in matrix[r0:r0 + order]]
                det = _det_bareiss(sub)
                checked += 1
                s = judge.sign(det, sub)
                if s < 0:
                    return TotalPositivityVerdict("not-tp", q, checked,
                                                  (r0, c0, order), det)
                if s == 0 and first_zero is None:
                    first_zero = ((r0, c0, order), det)
    if first_zero is not None:
        return TotalPositivityVerdict("semi-definite", q, checked,
                                      first_zero[0], first_zero[1])
    return TotalPositivityVerdict("strictly-tp", q, checked)


@dataclass(frozen=True)
class IndeterminacyRatios:
    """Determinant ratio diagnostics for the indeterminacy criterion.

    shift0[n-1] = det(shift 0, size n) / det(shift 2, size n-1) and
    shift1[n-1] = det(shift 1, size n) / det(shift 3, size n-1), for
    n = 1..upto. A None entry marks a zero denominator (degenerate case).
    Indeterminate-type sequences keep both ratios bounded away from zero;
    ratios collapsing toward zero are consistent with determinacy. The
    `bounded_away` flags implement a finite-depth heuristic: the last ratio
    retains at least `collapse_factor` of the sequence maximum.
    """

    shift0: tuple
    shift1: tuple
    upto: int
    degenerate: bool
    collapse_factor: Fraction
    shift0_bounded_away: Optional[bool]
    shift1_bounded_away: Optional[bool]


def _ratio_family(vals, judge, base_shift: int, upto: int):
    out = []
    degenerate = False
    for n in range(1, upto + 1):
        num_q = HankelQuery(base_shift, n)
        den_q = HankelQuery(base_shift + 2, n - 1)
        num_rows = hankel_matrix(vals, num_q)
        den_rows = hankel_matrix(vals, den_q)
        num = _det_bareiss(num_rows)
        den = _det_bareiss(den_rows)
        if judge.sign(den, den_rows) == 0:
            out.append(None)
            degenerate = True
        else:
            out.append(num / den)
    return out, degenerate


def _bounded_away(ratios, collapse_factor: Fraction) -> Optional[bool]:
    defined = [r for r in ratios if r is not None]
    if len(defined) < 2 or len(defined) != len(ratios):
        return None
    peak = max(abs(r) for r in defined)
    if peak == 0:
        return False
    return abs(defined[-1]) >= collapse_factor * peak


def indeterminacy_ratios(m, upto: int, tolerance=None,
                         collapse_factor: Fraction = Fraction(1, 10)) -> IndeterminacyRatios:
    """Compute the two determinant-ratio sequences used as an indeterminacy
    diagnostic, with a qualitative bounded-away-from-zero flag.

    The flag is heuristic and depth-limited by construction; it reports
    whether the final ratio is still within collapse_factor of the largest
    one seen, which separates the lattice-type (ratios tending to positive
    limits) from the Poisson-type (ratios collapsing to 0) behaviour at
    accessible depths. Needs 2*upto + 2 entries.
    """
    vals, judge = _judge_for(m, tolerance)
    if len(vals) < 2 * upto + 2:
        raise ValueError("upto %d needs %d entries, got %d"
                         % (upto, 2 * upto + 2, len(vals)))
    s0, d0 = _ratio_family(vals, judge, 0, upto)
    s1, d1 = _ratio_family(vals, judge, 1, upto)
    return IndeterminacyRatios(
        shift0=tuple(s0),
        shift1=tuple(s1),
        upto=upto,
        degenerate=d0 or d1,
        collapse_factor=collapse_factor,
        shift0_bounded_away=_bounded_away(s0, collapse_factor),
        shift1_bounded_away=_bounded_away(s1, collapse_factor),
    )


@dataclass(frozen=True)
class Mu1ThresholdReport:
    """Critical first-moment values from vanishing shift-1 determinants.

    values[d-1] is the number c such that replacing mu_1 by c makes the
    shift-1 Hankel determinant of size d vanish; the determinant is affine
    in that corner entry, so the root is exact. None marks a degenerate
    depth (zero cofactor). On Stieltjes inputs the sequence is non-
    decreasing and stays below mu_1; mu_1 exceeding its limit is the
    indeterminacy side of the criterion.
    """

    values: tuple
    mu1: Fraction
    non_decreasing: Optional[bool]
    all_below_mu1: Optional[bool]


def mu1_threshold_sequence(m, upto: int, tolerance=None) -> Mu1ThresholdReport:
    """The singular first-moment value at each depth d = 1..upto.

    det(shift-1, size d) = C * mu_1 + D with mu_1 only in entry (0,0); C is
    the shift-3 size d-1 minor, so the root is -D/C whenever C is nonzero.
    Needs 2*upto + 2 entries.
    """
    vals, judge = _judge_for(m, tolerance)
    if len(vals) < 2 * upto + 2:
        raise ValueError("upto %d needs %d entries, got %d"
                         % (upto, 2 * upto + 2, len(vals)))
    out = []
    for d in range(1, upto + 1):
        q = HankelQuery(1, d)
        rows = hankel_matrix(vals, q)
        cof_q = HankelQuery(3, d - 1)
        cof_rows = hankel_matrix(vals, cof_q)
        cof = _det_bareiss(cof_rows)
        if judge.sign(cof, cof_rows) == 0:
            out.append(None)
            continue
        det_full = _det_bareiss(rows)
        # det = cof * mu_1 + D  =>  D = det - cof * mu_1; root = -D / cof
        d_part = det_full - cof * Fraction(vals[1])
        out.append(-d_part / cof)
    defined = [v for v in out if v is not None]
    non_dec = None
    below = None
    if defined and len(defined) == len(out):
        non_dec = all(x <= y for x, y in zip(defined, defined[1:]))
        below = all(v < Fraction(vals[1]) for v in defined)
    return Mu1ThresholdReport(tuple(out), Fraction(vals[1]), non_dec, below)


@dataclass(frozen=True)
class LogConvexityReport:
    """theta_n = mu_n^2 / (mu_{n-1} mu_{n+1}) for n = 1..N-1, with the sup,
    a tail-sup over the last half of the indices (the finite-depth surrogate
    for the limiting critical ratio), and a verdict.

    verdict: "strictly-log-convex" (sup < 1), "log-convex" (sup <= 1) or
    "not-log-convex". On the approximate backend the comparisons allow a
    relative tolerance around 1.
    """

    theta: tuple
    theta_sup: object
    critical_ratio_tail: object
    tail_start: int
    verdict: str


def log_convexity_report(m, tolerance=None) -> LogConvexityReport:
    """Ratio diagnostics; requires all entries positive.

    Works on both backends; exact sequences get exact Fractions, approximate
    ones mpmath values with `tolerance` (default 2^-40) around the theta <= 1
    comparisons.
    """
    if isinstance(m, MomentSequence):
        m.require_positive()
        vals = m.values
        exact = m.exact
    else:
        vals = list(m)
        if any(v <= 0 for v in vals):
            raise ValueError("log_convexity_report needs positive entries")
        exact = True
    if len(vals) < 3:
        raise ValueError("need at least three entries for a theta value")
    theta = tuple(vals[n] ** 2 / (vals[n - 1] * vals[n + 1]) for n in range(1, len(vals) - 1))
    sup = max(theta)
    tail_start = len(theta) // 2
    tail = max(theta[tail_start:])
    if exact:
        tol = Fraction(0)
    else:
        tol = Fraction(tolerance) if tolerance is not None else DEFAULT_TOLERANCE
    if all(th < 1 - tol for th in theta):
        verdict = "strictly-log-convex"
    elif all(th <= 1 + tol for th in theta):
        verdict = "log-convex"
    else:
        verdict = "not-log-convex"
    return LogConvexityReport(theta, sup, tail, tail_start + 1, verdict)


@dataclass(frozen=True)
class SplitBoundVerdict:
    """Outcome of the split-product bound check.

    kind: "holds", "violated" or "precondition-failed". For a violation the
    witness is (k, n) with the exact left and right sides.
    """

    kind: str
    theta: Fraction
    witness: Optional[tuple] = None
    lhs: Optional[Fraction] = None
    rhs: Optional[Fraction] = None

    @property
    def ok(self) -> bool:
        return self.kind == "holds"


def split_bound_check(m, theta) -> SplitBoundVerdict:
    """For a theta-log-convex prefix with mu_0 = 1, check
    mu_k mu_{n-k} / mu_n <= theta^{k(n-k)} for all 1 <= k < n <= N.

    Verifies theta-log-convexity first (theta_j <= theta for every j) and
    reports a precondition failure instead of judging the bound when the
    input is not theta-log-convex. Equality is attained entrywise on the
    geometric-in-n^2 family mu_n = theta^{-n^2/2}.
    """
    if isinstance(m, MomentSequence):
        m.require_exact("split_bound_check")
        m.require_positive()
        vals = list(m.values)
    else:
        vals = [Fraction(v) for v in m]
        if any(v <= 0 for v in vals):
            raise ValueError("split_bound_check needs positive entries")
    theta = Fraction(theta)
    rep = log_convexity_report(vals)
    if any(th > theta for th in rep.theta):
        return SplitBoundVerdict("precondition-failed", theta,
                                 witness=("theta_n exceeds theta",))
    n_max = len(vals) - 1
    for n in range(2, n_max + 1):
        for k in range(1, n):
            lhs = vals[k] * vals[n - k] / vals[n]
            rhs = theta ** (k * (n - k))
            if lhs > rhs:
                return SplitBoundVerdict("violated", theta, (k, n), lhs, rhs)
    return SplitBoundVerdict("holds", theta)
