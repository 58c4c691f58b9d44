"""Infinite-divisibility tests for lattice distributions.

The recursion test recovers the compound-Poisson jump rates (r_k) implied by
a pmf: a distribution on the non-negative integers is infinitely divisible
exactly when its probability generating function is exp(lambda (Q(z) - 1))
with Q a pgf, which forces

    (j + 1) p_{j+1} = sum_{k=0}^{j} p_{j-k} r_k,      r_k >= 0.

Solving for r_k (Katti's test) and finding a certified negative entry
therefore disproves infinite divisibility. On exact pmfs the recursion runs
in rational arithmetic; on approximate pmfs every p_k is widened to an
interval of its stated error and the recursion runs in outward-rounded
interval arithmetic, so a sign claim survives any error assignment within
the bounds. The recursion is scale invariant, so unnormalized exact weights
are fine.

The companion check is the classical sufficient condition: a pmf with
everywhere-positive masses that is log-convex (p_k^2 <= p_{k-1} p_{k+1}) is
infinitely divisible. Passing it certifies ID; failing says nothing.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import mpmath
from mpmath import iv, mpf

from .distributions import DiscretePMF
from .exceptions import PrecisionError


@dataclass(frozen=True)
class KattiReport:
    """Recovered rates r_0..r_kmax with certified radii.

    error_bound is the largest radius; following the conservative reading,
    an entry counts as negative only when r_k + error_bound < 0. verdict is
    "not-infinitely-divisible" when a certified negative exists,
    "inconclusive" when the error bound swamps every entry's sign, and
    "no-certified-negative" otherwise (a finite prefix cannot certify ID).
    """

    r: tuple
    radii: tuple
    error_bound: Union[Fraction, mpf]
    kmax: int
    exact: bool

    @property
    def certified_negative(self) -> tuple:
        return tuple(k for k, v in enumerate(self.r) if v + self.error_bound < 0)

    @property
    def first_negative(self) -> Optional[int]:
        neg = self.certified_negative
        return neg[0] if neg else None

    @property
    def verdict(self) -> str:
        if self.certified_negative:
            return "not-infinitely-divisible"
        if not self.exact and all(abs(v) <= self.error_bound for v in self.r):
            return "inconclusive"
        return "no-certified-negative"


def _katti_exact(masses, kmax: int) -> KattiReport:
    p = [Fraction(v) for v in masses]
    if p[0] <= 0:
        raise ValueError("katti_r needs p_0 > 0")
    r = []
    for j in range(kmax + 1):
        acc = (j + 1) * p[j + 1]
        for k in range(j):
            acc -= p[j - k] * r[k]
        r.append(acc / p[0])
    zero = Fraction(0)
    return KattiReport(tuple(r), tuple(zero for _ in r), zero, kmax, exact=True)


def _katti_interval(pmf: DiscretePMF, kmax: int) -> KattiReport:
    saved = iv.prec
    try:
        iv.prec = (pmf.precision_bits or 128) + 20
        # widen each point value by the stated error in interval arithmetic,
        # so the endpoints round outward and containment is preserved
        err = iv.mpf([-mpf(pmf.entry_error), mpf(pmf.entry_error)])
        p = [iv.mpf(v) + err for v in pmf.masses]
        if not p[0] > 0:
            raise PrecisionError("p_0 - error does not exceed 0; cannot run the recursion")
        r = []
        for j in range(kmax + 1):
            acc = (j + 1) * p[j + 1]
            for k in range(j):
                acc -= p[j - k] * r[k]
            r.append(acc / p[0])
        mids = tuple(mpf(x.mid) for x in r)
        radii = tuple(mpf(x.delta) / 2 for x in r)
    finally:
        iv.prec = saved
    return KattiReport(mids, radii, max(radii), kmax, exact=False)


def katti_r(pmf: DiscretePMF, kmax: Optional[int] = None) -> KattiReport:
    """Recover (r_k) for k = 0..kmax; needs masses up to index kmax + 1.

    kmax defaults to len(pmf) - 2, using the whole pmf.
    """
    if kmax is None:
        kmax = len(pmf.masses) - 2
    if kmax < 0:
        raise ValueError("kmax out of range")
    if kmax + 1 > pmf.kmax:
        raise ValueError("need masses up to index kmax + 1 = %d" % (kmax + 1))
    if pmf.exact:
        return _katti_exact(pmf.masses, kmax)
    return _katti_interval(pmf, kmax)


@dataclass(frozen=True)
class LogConvexVerdict:
    """kind: "log-convex" (ID certificate), "not-log-convex" (no
    conclusion), "inapplicable" (a zero or sign-uncertified mass in range),
    or "uncertified" (error bounds too wide to decide either way)."""

    kind: str
    witness: Optional[int] = None

    @property
    def certifies_id(self) -> bool:
        return self.kind == "log-convex"


def logconvex_pmf_check(pmf: DiscretePMF, upto: Optional[int] = None) -> LogConvexVerdict:
    """Check p_k^2 <= p_{k-1} p_{k+1} on the examined range.

    All comparisons are certified against the pmf's entry error; a pass is
    an infinite-divisibility certificate (scale invariant, so unnormalized
    exact weights work too).
    """
    if upto is None:
        upto = pmf.kmax
    if upto > pmf.kmax:
        raise ValueError("upto exceeds pmf length")
    if pmf.exact:
        p = pmf.masses[:upto + 1]
        for k, v in enumerate(p):
            if v <= 0:
                return LogConvexVerdict("inapplicable", k)
        for k in range(1, upto):
            if p[k] ** 2 > p[k - 1] * p[k + 1]:
                return LogConvexVerdict("not-log-convex", k)
        return LogConvexVerdict("log-convex")

    err = mpf(pmf.entry_error)
    p = [mpf(v) for v in pmf.masses[:upto + 1]]
    for k, v in enumerate(p):
        if not v - err > 0:
            return LogConvexVerdict("inapplicable", k)
    uncertified = None
    for k in range(1, upto):
        holds = (p[k] + err) ** 2 <= (p[k - 1] - err) * (p[k + 1] - err)
        fails = (p[k] - err) ** 2 > (p[k - 1] + err) * (p[k + 1] + err)
        if fails:
            return LogConvexVerdict("not-log-convex", k)
        if not holds and uncertified is None:
            uncertified = k
    if uncertified is not None:
        return LogConvexVerdict("uncertified", uncertified)
    return LogConvexVerdict("log-convex")


def pmf_from_rates(rates, kmax: int) -> DiscretePMF:
    """Exact pmf (up to the e^{-lambda} normalizer) with prescribed rates.

    Runs the defining recursion forward from p_0 = 1:
    p_{j+1} = (sum_{k<=j} p_{j-k} r_k) / (j + 1). With non-negative rates
    this is the compound-Poisson construction, so katti_r on the result
    recovers the rates exactly; useful as a round-trip oracle and for
    building ID test fixtures.
    """
    rs = [Fraction(v) for v in rates]
    if len(rs) < kmax:
        rs = rs + [Fraction(0)] * (kmax - len(rs))
    p = [Fraction(1)]
    for j in range(kmax):
        acc = Fraction(0)
        for k in range(j + 1):
            acc += p[j - k] * rs[k]
        p.append(acc / (j + 1))
    return DiscretePMF(masses=tuple(p), exact=True)
