"""Moment sequences and their convolution algebra.

Three composition laws act on finite moment prefixes (mu_0 = 1, mu_1, ..., mu_N):

* classical binomial convolution (moments of a sum of independent variables),
* the t-indexed combinatorial composition built from cell occupancies, whose
  n-th entry is a polynomial in t of degree at most n ("mb" operations below,
  after the Maxwell-Boltzmann occupancy statistics the coefficients count),
* Boolean convolution, under which Boolean cumulants add.

Everything exact runs on Fraction; approximate sequences carry mpmath floats
with a declared working precision. Operations that produce symbolic output in
t refuse approximate inputs.

A note on positivity: a genuine moment sequence has mu_n > 0 for all n, and
the analysis routines that need positivity check it via require_positive().
The constructor deliberately does not force it, because the t-composition of
a legal moment sequence can leave the positive cone for fractional t. Those
candidate outputs are exactly the objects the Hankel machinery is there to
interrogate, so they must be representable.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Optional, Sequence, Union

import mpmath
from mpmath import mpf

from .combinatorics import binom_general, compositions, multinomial
from .exceptions import BackendError

Rational = Union[Fraction, int]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError("exact backend requires int, Fraction, or rational string, got %r" % (x,))


@dataclass(frozen=True)
class MomentSequence:
    """Finite prefix (mu_0, ..., mu_N) of a moment sequence.

    values[0] must equal 1. `exact` selects the arithmetic backend: Fraction
    entries when True, mpmath floats at `precision_bits` when False.
    """

    values: tuple
    exact: bool = True
    precision_bits: Optional[int] = None

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("empty moment sequence")
        if self.exact:
            vals = tuple(_as_fraction(v) for v in self.values)
            if self.precision_bits is not None:
                raise ValueError("exact sequences carry no precision_bits")
        else:
            if self.precision_bits is None or self.precision_bits < 64:
                raise ValueError("approximate sequences need precision_bits >= 64")
            with mpmath.workprec(self.precision_bits):
                vals = tuple(mpf(v) if not isinstance(v, mpf) else v for v in self.values)
        object.__setattr__(self, "values", vals)
        if vals[0] != 1:
            raise ValueError("mu_0 must equal 1, got %s" % (vals[0],))

    @classmethod
    def from_exact(cls, values: Iterable) -> "MomentSequence":
        return cls(tuple(values), exact=True)

    @classmethod
    def from_approx(cls, values: Iterable, precision_bits: int) -> "MomentSequence":
        return cls(tuple(values), exact=False, precision_bits=precision_bits)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    @property
    def degree(self) -> int:
        """Largest moment index N present."""
        return len(self.values) - 1

    @property
    def backend(self) -> str:
        return "exact" if self.exact else "approx"

    @property
    def strictly_positive(self) -> bool:
        return all(v > 0 for v in self.values)

    def require_positive(self) -> None:
        for n, v in enumerate(self.values):
            if v <= 0:
                raise ValueError("entry mu_%d = %s is not positive" % (n, v))

    def require_exact(self, what: str) -> None:
        if not self.exact:
            raise BackendError("%s requires the exact backend" % what)


@dataclass(frozen=True)
class CumulantSequence:
    """Cumulants (kappa_1, ..., kappa_N) paired with a backend tag."""

    values: tuple
    exact: bool = True
    precision_bits: Optional[int] = None

    def __post_init__(self):
        if self.exact:
            object.__setattr__(self, "values", tuple(_as_fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        """kappa_i, 1-based as in the usual notation."""
        if i < 1:
            raise IndexError("cumulant indices start at 1")
        return self.values[i - 1]

    def scaled(self, t) -> "CumulantSequence":
        t = _as_fraction(t) if self.exact else mpf(t)
        return CumulantSequence(tuple(t * v for v in self.values), self.exact, self.precision_bits)


@dataclass(frozen=True)
class BooleanCumulantSequence:
    """Boolean cumulants (b_1, ..., b_N); they add under Boolean convolution."""

    values: tuple
    exact: bool = True
    precision_bits: Optional[int] = None

    def __post_init__(self):
        if self.exact:
            object.__setattr__(self, "values", tuple(_as_fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        if i < 1:
            raise IndexError("Boolean cumulant indices start at 1")
        return self.values[i - 1]

    def scaled(self, t) -> "BooleanCumulantSequence":
        t = _as_fraction(t) if self.exact else mpf(t)
        return BooleanCumulantSequence(tuple(t * v for v in self.values), self.exact, self.precision_bits)


class TPolynomial:
    """Polynomial in the semigroup parameter t with exact rational coefficients.

    coeffs[i] multiplies t**i; trailing zeros are normalized away so equality
    is structural.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Rational]):
        cs = [_as_fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t) -> Fraction:
        t = _as_fraction(t)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def __eq__(self, other) -> bool:
        if isinstance(other, TPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == (Fraction(other),)
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other) -> "TPolynomial":
        if isinstance(other, (int, Fraction)):
            other = TPolynomial([other])
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return TPolynomial([
            (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)
        ])

    __radd__ = __add__

    def __neg__(self) -> "TPolynomial":
        return TPolynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "TPolynomial":
        if isinstance(other, (int, Fraction)):
            other = TPolynomial([other])
        return self + (-other)

    def __mul__(self, other) -> "TPolynomial":
        if isinstance(other, (int, Fraction)):
            return TPolynomial([c * other for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return TPolynomial(out)

    __rmul__ = __mul__

    def __repr__(self):
        return "TPolynomial(%r)" % (self.coeffs,)


@lru_cache(maxsize=None)
def _binom_poly(j: int) -> TPolynomial:
    """C(t, j) = t(t-1)...(t-j+1)/j! expanded as a polynomial in t."""
    poly = TPolynomial([1])
    for i in range(j):
        poly = poly * TPolynomial([-i, 1])
    return poly * Fraction(1, factorial(j))


def _same_backend(a: MomentSequence, b: MomentSequence, what: str) -> None:
    if a.exact != b.exact:
        raise BackendError("%s refuses to mix exact and approximate sequences" % what)


def _result_like(a: MomentSequence, values) -> MomentSequence:
    return MomentSequence(tuple(values), exact=a.exact, precision_bits=a.precision_bits)


def classical_convolve(a: MomentSequence, b: MomentSequence, upto: Optional[int] = None) -> MomentSequence:
    """Moments of X + Y for independent X, Y: sum_j C(n,j) a_j b_{n-j}."""
    _same_backend(a, b, "classical_convolve")
    if upto is None:
        upto = min(a.degree, b.degree)
    if upto > a.degree or upto > b.degree:
        raise ValueError("upto=%d exceeds an input length" % upto)
    out = []
    for n in range(upto + 1):
        acc = sum(comb(n, j) * a[j] * b[n - j] for j in range(n + 1))
        out.append(acc)
    return _result_like(a, out)


def _composition_sum(m: MomentSequence, n: int, j: int):
    """S_j(n) = sum over compositions (n_1..n_j) of n of multinomial * prod mu_{n_i}."""
    acc = None
    for parts in compositions(n, j):
        term = multinomial(n, parts)
        prod = m[parts[0]]
        for p in parts[1:]:
            prod = prod * m[p]
        term = term * prod
        acc = term if acc is None else acc + term
    if acc is None:
        return Fraction(0) if m.exact else mpf(0)
    return acc


def mb_compose_integer(m: MomentSequence, k: int, upto: Optional[int] = None) -> MomentSequence:
    """k-th composition power via the occupancy sum sum_j C(k,j) S_j(n).

    Agrees with the k-fold classical self-convolution; the combinatorial sum
    is the definition, the convolution identity is verified in the tests.
    k = 0 gives the convolution identity (1, 0, 0, ...).
    """
    if k < 0:
        raise ValueError("mb_compose_integer needs k >= 0")
    if upto is None:
        upto = m.degree
    if upto > m.degree:
        raise ValueError("upto exceeds input length")
    out = [m[0] * 0 + 1]
    for n in range(1, upto + 1):
        acc = None
        for j in range(1, min(k, n) + 1):
            c = comb(k, j)
            term = c * _composition_sum(m, n, j)
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else m[0] * 0)
    return _result_like(m, out)


def mb_compose_t(m: MomentSequence, upto: Optional[int] = None) -> list:
    """The n-th composed moment as an exact polynomial in t, for n = 0..upto.

    Entry n is sum_{j=1}^{n} C(t, j) S_j(n) with C(t, j) expanded in powers
    of t, so the degree is at most n. Evaluating at a positive integer k
    reproduces mb_compose_integer(m, k); fractional t gives the candidate
    moment sequence of the t-th convolution power, which need not be a
    moment sequence at all.

    At t = 1/2 the first entries are (1/2)mu_2 - (1/4)mu_1^2 and
    (1/2)mu_3 - (3/4)mu_2 mu_1 + (3/8)mu_1^3. At t = 1/3 the third entry
    evaluates to (1/3)mu_3 - (2/3)mu_2 mu_1 + (10/27)mu_1^3; the
    coefficients t, 3t(t-1), t(t-1)(t-2) follow from the defining sum and
    are easy to re-derive by hand.
    """
    m.require_exact("mb_compose_t")
    if upto is None:
        upto = m.degree
    if upto > m.degree:
        raise ValueError("upto exceeds input length")
    polys = [TPolynomial([1])]
    for n in range(1, upto + 1):
        acc = TPolynomial([0])
        for j in range(1, n + 1):
            s = _composition_sum(m, n, j)
            if s != 0:
                acc = acc + _binom_poly(j) * s
        polys.append(acc)
    return polys


def mb_compose_at(m: MomentSequence, t, upto: Optional[int] = None) -> MomentSequence:
    """Evaluate the t-composition at a single rational t."""
    polys = mb_compose_t(m, upto)
    return MomentSequence(tuple(p(t) for p in polys), exact=True)


def cumulants_from_moments(m: MomentSequence) -> CumulantSequence:
    """Invert m_n = sum_{k=0}^{n-1} C(n-1,k) kappa_{k+1} m_{n-1-k}."""
    kappas = []
    for n in range(1, m.degree + 1):
        acc = m[n]
        for k in range(n - 1):
            acc = acc - comb(n - 1, k) * kappas[k] * m[n - 1 - k]
        kappas.append(acc)
    return CumulantSequence(tuple(kappas), m.exact, m.precision_bits)


def moments_from_cumulants(k: CumulantSequence) -> MomentSequence:
    """Forward direction of the same recursion; exact inverse of the above."""
    one = Fraction(1) if k.exact else mpf(1)
    out = [one]
    for n in range(1, len(k) + 1):
        acc = None
        for j in range(n):
            term = comb(n - 1, j) * k[j + 1] * out[n - 1 - j]
            acc = term if acc is None else acc + term
        out.append(acc)
    return MomentSequence(tuple(out), k.exact, k.precision_bits)


def levy_moments_at_t(k: CumulantSequence, t) -> MomentSequence:
    """Moments at time t of the process whose cumulants at time 1 are k.

    Cumulants are additive over independent increments, so this is just
    moments_from_cumulants(t * k). For the k derived from a moment prefix m,
    the result coincides with mb_compose_t(m) evaluated at t, entry by
    entry; that identity is a polynomial one and holds for every rational t.
    """
    return moments_from_cumulants(k.scaled(t))


def boolean_cumulants_from_moments(m: MomentSequence) -> BooleanCumulantSequence:
    """Invert m_n = sum_{k=1}^{n} b_k m_{n-k} (m_0 = 1).

    Unrolled: b_1 = m_1, b_2 = m_2 - m_1^2, b_3 = m_3 - 2 m_1 m_2 + m_1^3.
    """
    bs = []
    for n in range(1, m.degree + 1):
        acc = m[n]
        for k in range(1, n):
            acc = acc - bs[k - 1] * m[n - k]
        bs.append(acc)
    return BooleanCumulantSequence(tuple(bs), m.exact, m.precision_bits)


def moments_from_boolean_cumulants(b: BooleanCumulantSequence) -> MomentSequence:
    one = Fraction(1) if b.exact else mpf(1)
    out = [one]
    for n in range(1, len(b) + 1):
        acc = None
        for k in range(1, n + 1):
            term = b[k] * out[n - k]
            acc = term if acc is None else acc + term
        out.append(acc)
    return MomentSequence(tuple(out), b.exact, b.precision_bits)


def boolean_convolve(a: MomentSequence, b: MomentSequence, upto: Optional[int] = None) -> MomentSequence:
    """Boolean convolution: add Boolean cumulants, rebuild moments.

    Coincides with classical convolution up to n = 2; at n = 3 it gives
    m_3 + 2 m_2 n_1 + 2 n_2 m_1 + m_1^2 n_1 + n_1^2 m_1 + n_3 instead of the
    classical m_3 + 3 m_2 n_1 + 3 m_1 n_2 + n_3.
    """
    _same_backend(a, b, "boolean_convolve")
    if upto is None:
        upto = min(a.degree, b.degree)
    if upto > a.degree or upto > b.degree:
        raise ValueError("upto exceeds an input length")
    ba = boolean_cumulants_from_moments(a).values[:upto]
    bb = boolean_cumulants_from_moments(b).values[:upto]
    summed = tuple(x + y for x, y in zip(ba, bb))
    return moments_from_boolean_cumulants(
        BooleanCumulantSequence(summed, a.exact, a.precision_bits))


def boolean_power_t(m: MomentSequence, t, upto: Optional[int] = None) -> MomentSequence:
    """Boolean t-th convolution power: scale Boolean cumulants by t >= 0.

    Exists for every t >= 0 (every law is Boolean infinitely divisible);
    integer t reproduces iterated boolean_convolve, and
    (power_t m)_2 = t m_2 + t(t-1) m_1^2.
    """
    tq = _as_fraction(t) if m.exact else mpf(t)
    if tq < 0:
        raise ValueError("boolean_power_t needs t >= 0")
    if upto is None:
        upto = m.degree
    if upto > m.degree:
        raise ValueError("upto exceeds input length")
    bs = BooleanCumulantSequence(
        boolean_cumulants_from_moments(m).values[:upto], m.exact, m.precision_bits)
    return moments_from_boolean_cumulants(bs.scaled(tq))
