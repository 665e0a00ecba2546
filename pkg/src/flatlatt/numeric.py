"""Certified scalar arithmetic and the Perron eigen-solver.

Three kinds of scalar flow through the package:

* ``int`` / ``Fraction`` -- exact rationals, always in lowest terms.
* :class:`AlgebraicNumber` -- an element of a real number field
  ``Q(rho)`` (``rho`` the Perron root of some integer matrix).  It is
  an interval scalar carrying an exact witness: zero tests are exact,
  signs are decided by refining the enclosure of ``rho``.
* :class:`Interval` -- an outward-rounded dyadic enclosure.  Intervals
  may carry a *refiner* (recompute at higher precision) and a *key*
  (a hashable description of the exact expression they enclose).  Two
  intervals are only ever reported equal when their keys coincide or
  both are the same point.

Arithmetic between two exact rationals never leaves ``Fraction``;
arithmetic inside one number field returns a ``Fraction`` whenever the
result is rational.
"""

import math
import os
from decimal import ROUND_CEILING, ROUND_FLOOR, Context, Decimal
from enum import IntEnum
from fractions import Fraction

import numpy as np

from .errors import NotIrreducible, PrecisionExhausted

DEFAULT_PRECISION = 128
DEFAULT_PRECISION_CAP = 2048

_precision_cap = None


def precision_cap():
    """Current maximum refinement precision in bits."""
    if _precision_cap is not None:
        return _precision_cap
    env = os.environ.get("FLATLATT_PRECISION_CAP")
    if env:
        return max(64, int(env))
    return DEFAULT_PRECISION_CAP


def set_precision_cap(bits):
    global _precision_cap
    if bits is not None and bits < 64:
        raise ValueError("precision cap must be at least 64 bits")
    _precision_cap = bits


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


# ---------------------------------------------------------------------------
# dyadic rounding
# ---------------------------------------------------------------------------

def _round(q, prec, up):
    """Round a rational to ``prec`` significant bits, toward +inf if ``up``."""
    q = Fraction(q)
    n, d = q.numerator, q.denominator
    if n == 0:
        return q
    e = abs(n).bit_length() - d.bit_length()
    shift = prec - e
    if shift >= 0:
        num, den = n << shift, d
    else:
        num, den = n, d << -shift
    m = -((-num) // den) if up else num // den
    if shift >= 0:
        return Fraction(m, 1 << shift)
    return Fraction(m << -shift)


def _isqrt_floor(q, prec):
    """Largest dyadic r with ``prec``-ish bits and r*r <= q (q >= 0)."""
    if q <= 0:
        return Fraction(0)
    n, d = q.numerator, q.denominator
    s = max(0, prec - (n.bit_length() - d.bit_length()) // 2 + 2)
    return Fraction(math.isqrt((n << (2 * s)) // d), 1 << s)


def _isqrt_ceil(q, prec):
    if q <= 0:
        return Fraction(0)
    r = _isqrt_floor(q, prec)
    if r * r == q:
        return r
    n, d = q.numerator, q.denominator
    s = max(0, prec - (n.bit_length() - d.bit_length()) // 2 + 2)
    return r + Fraction(1, 1 << s)


def is_rational(x):
    return isinstance(x, (int, Fraction))


# ---------------------------------------------------------------------------
# intervals
# ---------------------------------------------------------------------------

class Interval:
    """Closed interval ``[lo, hi]`` with dyadic rational endpoints."""

    __slots__ = ("lo", "hi", "prec", "key", "_refiner")
    kind = "interval"

    def __init__(self, lo, hi, prec=DEFAULT_PRECISION, key=None, refiner=None):
        lo, hi = Fraction(lo), Fraction(hi)
        if lo > hi:
            raise ValueError("interval with lo > hi")
        self.lo = lo
        self.hi = hi
        self.prec = prec
        self.key = key
        self._refiner = refiner

    @classmethod
    def point(cls, q, prec=DEFAULT_PRECISION):
        q = Fraction(q)
        return cls(q, q, prec, key=("q", q))

    @classmethod
    def lazy(cls, compute, key=None, prec=DEFAULT_PRECISION):
        """Interval from ``compute(prec) -> (lo, hi)``, refinable on demand."""

        def refiner(p):
            lo, hi = compute(p)
            return cls(_round(lo, p, False), _round(hi, p, True), p, key, refiner)

        return refiner(prec)

    def refine(self, prec):
        if self._refiner is None or prec <= self.prec:
            return self
        return self._refiner(prec)

    @property
    def refinable(self):
        return self._refiner is not None

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def contains(self, q):
        return self.lo <= q <= self.hi

    def __repr__(self):
        return "Interval(%s)" % format_scalar(self)

    def __float__(self):
        return float(self.mid)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _combine(name, a, b, fn):
        p = max(a.prec, b.prec)
        lo, hi = fn(a, b)
        key = None
        if a.key is not None and b.key is not None:
            key = (name, a.key, b.key)
        refiner = None
        if a.refinable or b.refinable:
            def refiner(q, a=a, b=b):
                return Interval._combine(name, a.refine(q), b.refine(q), fn)
        return Interval(_round(lo, p, False), _round(hi, p, True), p, key, refiner)

    def _other(self, other):
        if isinstance(other, Interval):
            return other
        if is_rational(other):
            return Interval.point(other, self.prec)
        if isinstance(other, AlgebraicNumber):
            return other.enclosure(self.prec)
        return NotImplemented

    def __add__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return Interval._combine("+", self, other, lambda a, b: (a.lo + b.lo, a.hi + b.hi))

    __radd__ = __add__

    def __neg__(self):
        return Interval._combine("*", self, Interval.point(-1, self.prec),
                                 lambda a, b: (-a.hi, -a.lo))

    def __sub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return Interval._combine("-", self, other, lambda a, b: (a.lo - b.hi, a.hi - b.lo))

    def __rsub__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return other - self

    @staticmethod
    def _mul(a, b):
        ps = (a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi)
        return min(ps), max(ps)

    def __mul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return Interval._combine("*", self, other, Interval._mul)

    def __rmul__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return Interval._combine("*", other, self, Interval._mul)

    def __truediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return _divide(self, other)

    def __rtruediv__(self, other):
        other = self._other(other)
        if other is NotImplemented:
            return other
        return _divide(other, self)

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Interval.point(1, self.prec)
        for _ in range(k):
            out = out * self
        return out

    def sqrt(self):
        def fn(a, _b):
            if a.hi < 0:
                raise ValueError("sqrt of a negative interval")
            return _isqrt_floor(max(a.lo, Fraction(0)), a.prec), _isqrt_ceil(a.hi, a.prec)

        return Interval._combine("sqrt", self, Interval.point(0, self.prec), fn)


def _divide(a, b):
    cap = precision_cap()
    while b.lo <= 0 <= b.hi:
        if not b.refinable or b.prec * 2 > cap:
            raise PrecisionExhausted("divisor interval straddles zero")
        b = b.refine(b.prec * 2)

    def fn(x, y):
        ps = (x.lo / y.lo, x.lo / y.hi, x.hi / y.lo, x.hi / y.hi)
        return min(ps), max(ps)

    return Interval._combine("/", a, b, fn)


# ---------------------------------------------------------------------------
# polynomials over Q (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _padd(p, q):
    n = max(len(p), len(q))
    return _trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def _pneg(p):
    return [-c for c in p]


def _pmul(p, q):
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return _trim(out)


def _pdivmod(p, q):
    p = [Fraction(c) for c in p]
    q = _trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 0)
    lead = Fraction(q[-1])
    while len(p) >= len(q) and p:
        c = p[-1] / lead
        k = len(p) - len(q)
        quot[k] = c
        for i, b in enumerate(q):
            p[i + k] -= c * b
        p = _trim(p)
    return _trim(quot), p


def _peval(p, x):
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _pinverse_mod(a, m):
    """Inverse of ``a`` modulo ``m`` (coprime) by the extended Euclid algorithm."""
    r0, r1 = _trim(m), _trim(a)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pneg(_pmul(q, s1)))
    if len(r0) != 1:
        raise ZeroDivisionError("element is not invertible")
    c = r0[0]
    return [x / c for x in s0]


# ---------------------------------------------------------------------------
# number fields
# ---------------------------------------------------------------------------

class NumberField:
    """``Q(rho)`` for the unique root ``rho`` of an irreducible monic
    polynomial inside an isolating interval ``(lo, hi)``."""

    def __init__(self, minpoly, lo, hi):
        mp = [Fraction(c) for c in _trim(minpoly)]
        lead = mp[-1]
        self.minpoly = tuple(c / lead for c in mp)
        self.degree = len(self.minpoly) - 1
        self.key = (self.minpoly, Fraction(lo), Fraction(hi))
        self._lo, self._hi = Fraction(lo), Fraction(hi)
        self._slo = _peval(self.minpoly, self._lo)
        if self._slo == 0 or _peval(self.minpoly, self._hi) == 0:
            raise ValueError("isolating interval endpoint is a root")

    def __eq__(self, other):
        return isinstance(other, NumberField) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return "NumberField(minpoly=%s, root~%.12g)" % (
            [str(c) for c in self.minpoly], float((self._lo + self._hi) / 2))

    def __getstate__(self):
        return {"minpoly": self.minpoly, "lo": self.key[1], "hi": self.key[2]}

    def __setstate__(self, state):
        self.__init__(state["minpoly"], state["lo"], state["hi"])

    def root_enclosure(self, bits):
        """Bisect the isolating interval until its width is below 2^-bits."""
        target = Fraction(1, 1 << bits)
        while self._hi - self._lo > target:
            mid = _round((self._lo + self._hi) / 2, bits + 8, False)
            if not (self._lo < mid < self._hi):
                mid = (self._lo + self._hi) / 2
            v = _peval(self.minpoly, mid)
            if v == 0:
                self._lo = self._hi = mid
                break
            if (v > 0) == (self._slo > 0):
                self._lo, self._slo = mid, v
            else:
                self._hi = mid
        return self._lo, self._hi

    @property
    def gen(self):
        return AlgebraicNumber(self, [Fraction(0), Fraction(1)])

    def element(self, coeffs):
        return _make_alg(self, coeffs)


def _make_alg(field, coeffs):
    _q, r = _pdivmod([Fraction(c) for c in coeffs], field.minpoly)
    if len(r) <= 1:
        return r[0] if r else Fraction(0)
    return AlgebraicNumber(field, r)


class AlgebraicNumber:
    """Element of a :class:`NumberField`, stored reduced mod the minimal polynomial."""

    __slots__ = ("field", "coeffs", "_sign", "_float")
    kind = "interval"

    def __init__(self, field, coeffs):
        self.field = field
        self.coeffs = tuple(Fraction(c) for c in _trim(coeffs))
        self._sign = None
        self._float = None

    def __getstate__(self):
        return (self.field, self.coeffs)

    def __setstate__(self, state):
        self.field, self.coeffs = state
        self._sign = None
        self._float = None

    def __eq__(self, other):
        if isinstance(other, AlgebraicNumber):
            return self.field == other.field and self.coeffs == other.coeffs
        if is_rational(other):
            return False  # a reduced non-constant element is irrational
        return NotImplemented

    def __hash__(self):
        return hash((self.field.key, self.coeffs))

    def __repr__(self):
        return "AlgebraicNumber(%s)" % format_scalar(self)

    def _coerce(self, other):
        if isinstance(other, AlgebraicNumber):
            if other.field != self.field:
                raise TypeError("elements of different number fields")
            return list(other.coeffs)
        if is_rational(other):
            return [Fraction(other)]
        return None

    def __add__(self, other):
        if isinstance(other, Interval):
            return self.enclosure(other.prec) + other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _make_alg(self.field, _padd(list(self.coeffs), c))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(self.field, _pneg(list(self.coeffs)))

    def __sub__(self, other):
        if isinstance(other, Interval):
            return self.enclosure(other.prec) - other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _make_alg(self.field, _padd(list(self.coeffs), _pneg(c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Interval):
            return self.enclosure(other.prec) * other
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return _make_alg(self.field, _pmul(list(self.coeffs), c))

    __rmul__ = __mul__

    def inverse(self):
        return _make_alg(self.field, _pinverse_mod(list(self.coeffs), list(self.field.minpoly)))

    def __truediv__(self, other):
        if isinstance(other, Interval):
            return self.enclosure(other.prec) / other
        if isinstance(other, AlgebraicNumber):
            return self * other.inverse()
        if is_rational(other):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __rtruediv__(self, other):
        if is_rational(other):
            return self.inverse() * other
        if isinstance(other, Interval):
            return other / self.enclosure(other.prec)
        return NotImplemented

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Fraction(1)
        for _ in range(k):
            out = out * self
        return out

    def _raw_enclosure(self, bits):
        lo, hi = self.field.root_enclosure(bits)
        acc = (Fraction(0), Fraction(0))
        for c in reversed(self.coeffs):
            ps = (acc[0] * lo, acc[0] * hi, acc[1] * lo, acc[1] * hi)
            acc = (min(ps) + c, max(ps) + c)
        return acc

    def enclosure(self, prec=DEFAULT_PRECISION):
        """Interval enclosure with roughly ``prec`` correct bits."""
        extra = 16
        while True:
            lo, hi = self._raw_enclosure(prec + extra)
            scale = max(abs(lo), abs(hi), Fraction(1, 1 << 64))
            if hi - lo <= scale / (1 << prec) or extra > 4 * prec + 64:
                break
            extra *= 2
        out = Interval(_round(lo, prec, False), _round(hi, prec, True), prec,
                       key=("alg", self), refiner=lambda p: self.enclosure(p))
        return out

    def sign(self):
        if self._sign is None:
            if not self.coeffs:
                self._sign = 0
            else:
                p = 64
                cap = precision_cap()
                while True:
                    lo, hi = self._raw_enclosure(p)
                    if lo > 0:
                        self._sign = 1
                        break
                    if hi < 0:
                        self._sign = -1
                        break
                    if p >= cap:
                        raise PrecisionExhausted("could not separate a nonzero algebraic number from 0")
                    p = min(2 * p, cap)
        return self._sign

    def __float__(self):
        if self._float is None:
            lo, hi = self._raw_enclosure(60)
            self._float = float((lo + hi) / 2)
        return self._float

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __lt__(self, other):
        return certified_compare(self, other) == Ordering.LT

    def __le__(self, other):
        return certified_compare(self, other) != Ordering.GT

    def __gt__(self, other):
        return certified_compare(self, other) == Ordering.GT

    def __ge__(self, other):
        return certified_compare(self, other) != Ordering.LT

    def is_rational(self):
        return False


# ---------------------------------------------------------------------------
# comparison and helpers
# ---------------------------------------------------------------------------

def to_interval(x, prec=DEFAULT_PRECISION):
    if isinstance(x, Interval):
        return x.refine(prec)
    if is_rational(x):
        return Interval.point(x, prec)
    if isinstance(x, AlgebraicNumber):
        return x.enclosure(prec)
    if isinstance(x, float):
        return Interval.point(Fraction(x), prec)
    raise TypeError("not a scalar: %r" % (x,))


def sign(x):
    """Certified sign of a scalar (-1, 0 or 1)."""
    if is_rational(x):
        return (x > 0) - (x < 0)
    if isinstance(x, AlgebraicNumber):
        return x.sign()
    return int(certified_compare(x, 0))


def certified_compare(a, b, max_prec=None):
    """True ordering of two scalars.

    Raises PrecisionExhausted when two intervals cannot be separated
    before the precision cap and no exact witness proves equality.
    """
    if is_rational(a) and is_rational(b):
        return Ordering((a > b) - (a < b))
    exact_a = is_rational(a) or isinstance(a, AlgebraicNumber)
    exact_b = is_rational(b) or isinstance(b, AlgebraicNumber)
    if exact_a and exact_b:
        return Ordering(sign(a - b))
    cap = max_prec or precision_cap()
    ia, ib = to_interval(a), to_interval(b)
    if ia.key is not None and ia.key == ib.key:
        return Ordering.EQ
    prec = max(ia.prec, ib.prec, 64)
    while True:
        if ia.hi < ib.lo:
            return Ordering.LT
        if ia.lo > ib.hi:
            return Ordering.GT
        if ia.lo == ia.hi == ib.lo == ib.hi:
            return Ordering.EQ
        if prec >= cap or not (ia.refinable or ib.refinable):
            raise PrecisionExhausted("intervals %s and %s did not separate by %d bits"
                                     % (format_scalar(ia), format_scalar(ib), prec))
        prec = min(prec * 2, cap)
        ia, ib = ia.refine(prec), ib.refine(prec)


def smin(a, b):
    return a if certified_compare(a, b) != Ordering.GT else b


def smax(a, b):
    return a if certified_compare(a, b) != Ordering.LT else b


def sqrt_scalar(x):
    """Square root; exact when ``x`` is the square of a rational."""
    if is_rational(x):
        q = Fraction(x)
        if q < 0:
            raise ValueError("sqrt of a negative number")
        n, d = math.isqrt(q.numerator), math.isqrt(q.denominator)
        if n * n == q.numerator and d * d == q.denominator:
            return Fraction(n, d)
        return Interval.lazy(lambda p: (_isqrt_floor(q, p), _isqrt_ceil(q, p)), key=("sqrt", ("q", q)))
    if isinstance(x, AlgebraicNumber):
        def compute(p):
            e = x.enclosure(p + 8)
            return _isqrt_floor(max(e.lo, Fraction(0)), p), _isqrt_ceil(e.hi, p)

        return Interval.lazy(compute, key=("sqrt", ("alg", x)))
    return x.sqrt()


def exact_value(x):
    """``x`` as a Fraction when it is rational, else None."""
    if is_rational(x):
        return Fraction(x)
    return None


# ---------------------------------------------------------------------------
# transcendental enclosures (mpmath interval backend)
# ---------------------------------------------------------------------------

def _mpf_to_fraction(t):
    sgn, man, exp, _bc = t
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sgn else v


def mp_interval(expr, key=None, prec=DEFAULT_PRECISION):
    """Lazy interval for ``expr(iv)``, evaluated with mpmath's interval context."""
    from mpmath import iv

    def compute(p):
        old = iv.prec
        try:
            iv.prec = p + 16
            val = expr(iv)
            lo_t, hi_t = val._mpi_
        finally:
            iv.prec = old
        return _mpf_to_fraction(lo_t), _mpf_to_fraction(hi_t)

    return Interval.lazy(compute, key=key, prec=prec)


def iv_value(x, iv, p=None):
    """Convert a package scalar into an mpmath interval."""
    if is_rational(x):
        q = Fraction(x)
        return iv.mpf(q.numerator) / iv.mpf(q.denominator)
    i = to_interval(x, p or iv.prec)
    lo, hi = i.lo, i.hi
    lo_iv = iv.mpf(lo.numerator) / iv.mpf(lo.denominator)
    hi_iv = iv.mpf(hi.numerator) / iv.mpf(hi.denominator)
    return iv.mpf([lo_iv.a, hi_iv.b])


def pi_interval():
    return mp_interval(lambda iv: iv.pi, key=("pi",))


# ---------------------------------------------------------------------------
# formatting and parsing
# ---------------------------------------------------------------------------

def _decimal(q, digits, rounding):
    ctx = Context(prec=digits, rounding=rounding)
    return ctx.divide(Decimal(q.numerator), Decimal(q.denominator))


def format_scalar(x, digits=20):
    """Exact rationals as ``p/q``; anything else as an outward-rounded decimal interval."""
    if is_rational(x):
        return str(Fraction(x))
    i = to_interval(x)
    lo = _decimal(i.lo, digits, ROUND_FLOOR)
    hi = _decimal(i.hi, digits, ROUND_CEILING)
    return "[%s,%s]" % (_fmt_dec(lo), _fmt_dec(hi))


def _fmt_dec(d):
    if d and abs(d.adjusted()) > 24:
        return str(d)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s or "0"


def parse_scalar(text):
    """Parse ``"3/4"``, ``"0.45"``, ``"2"`` into an exact Fraction."""
    return Fraction(str(text).strip())


def parse_length_squared(text):
    """Squared length from ``"3"``, ``"1/2"`` or ``"sqrt(5)"``."""
    t = str(text).strip().replace(" ", "")
    if t.startswith("sqrt(") and t.endswith(")"):
        return Fraction(t[5:-1])
    q = Fraction(t)
    return q * q


# ---------------------------------------------------------------------------
# nonnegative integer matrices and the Perron solver
# ---------------------------------------------------------------------------

class NonnegIntMatrix:
    """Square matrix of nonnegative integers."""

    __slots__ = ("rows", "n")

    def __init__(self, rows):
        rows = tuple(tuple(int(v) for v in r) for r in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and non-empty")
        if any(v < 0 for r in rows for v in r):
            raise ValueError("matrix entries must be nonnegative")
        self.rows = rows
        self.n = n

    def __eq__(self, other):
        if isinstance(other, NonnegIntMatrix):
            return self.rows == other.rows
        return self.rows == tuple(tuple(r) for r in other)

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "NonnegIntMatrix(%s)" % ([list(r) for r in self.rows],)

    def tolist(self):
        return [list(r) for r in self.rows]

    def is_irreducible(self):
        """Strong connectivity of the support graph, by reachability closure."""
        n = self.n
        if n == 1:
            return True
        reach = [[bool(self.rows[i][j]) or i == j for j in range(n)] for i in range(n)]
        for k in range(n):
            for i in range(n):
                if reach[i][k]:
                    rk = reach[k]
                    ri = reach[i]
                    for j in range(n):
                        if rk[j]:
                            ri[j] = True
        return all(all(r) for r in reach)

    def charpoly(self):
        """Characteristic polynomial det(tI - E), integer coefficients, lowest first."""
        n = self.n
        a = [[Fraction(v) for v in r] for r in self.rows]
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        m = [[Fraction(0)] * n for _ in range(n)]
        for k in range(1, n + 1):
            # M_k = A M_{k-1} + c_{n-k+1} I
            am = [[sum(a[i][t] * m[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
            for i in range(n):
                am[i][i] += coeffs[n - k + 1]
            m = am
            tr = sum(sum(a[i][t] * m[t][i] for t in range(n)) for i in range(n))
            coeffs[n - k] = -tr / k
        return [int(c) for c in coeffs]


def collatz_wielandt_bracket(E, iterations=200):
    """Certified bracket on the Perron root from a power-iteration vector.

    For any positive vector v, min_i (Ev)_i/v_i <= rho <= max_i (Ev)_i/v_i.
    The iteration runs on E + I, which is primitive whenever E is
    irreducible, so it converges even for periodic E.
    """
    A = np.array(E.rows, dtype=float)
    n = E.n
    M = A + np.eye(n)
    v = np.ones(n)
    for _ in range(iterations):
        w = M @ v
        w /= w.max()
        if np.allclose(w, v, rtol=1e-15, atol=0):
            v = w
            break
        v = w
    vq = [Fraction(max(float(x), 1e-300)) for x in v]
    ratios = []
    for i in range(n):
        ev = sum(E.rows[i][j] * vq[j] for j in range(n))
        ratios.append(ev / vq[i])
    return min(ratios), max(ratios), vq


def _q(x):
    return Fraction(x) if isinstance(x, int) else x


def _null_vector(m):
    """Solve m v = 0 with v[0] = 1 exactly (rank n-1 assumed)."""
    n = len(m)
    # unknowns v[1:], system A x = b with A = m[:,1:], b = -m[:,0]
    rows = [[_q(m[i][j]) for j in range(1, n)] + [-_q(m[i][0])] for i in range(n)]
    ncols = n - 1
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, n):
            if rows[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if len(pivots) != ncols:
        raise ArithmeticError("eigenspace is not one-dimensional")
    for i in range(r, n):
        if rows[i][-1] != 0:
            raise ArithmeticError("inconsistent eigen system")
    v = [Fraction(1)] + [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        v[c + 1] = rows[i][-1]
    return v


def _perron_root(chi):
    """Isolate the largest real root of an integer polynomial (lowest first).

    Returns either an integer or a NumberField whose generator is the root.
    """
    import sympy

    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(chi)), t, domain="ZZ")
    (a, b), _mult = poly.intervals()[-1]
    a, b = Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q))
    for f, _m in poly.factor_list()[1]:
        if f.count_roots(sympy.Rational(a.numerator, a.denominator),
                         sympy.Rational(b.numerator, b.denominator)) == 0:
            continue
        coeffs = [int(c) for c in reversed(f.all_coeffs())]
        if len(coeffs) == 2:
            return Fraction(-coeffs[0], coeffs[1])
        if a == b:
            raise ArithmeticError("irrational root with degenerate isolating interval")
        # shrink until neither endpoint is a root of the factor
        while _peval(coeffs, a) == 0 or _peval(coeffs, b) == 0:
            raise ArithmeticError("isolating interval endpoint is a root")
        return NumberField(coeffs, a, b)
    raise ArithmeticError("no factor vanishes at the isolated root")


def perron(E):
    """Perron root and positive eigenvector (first entry 1) of an irreducible matrix.

    Both are exact: Fractions when the root is an integer, otherwise
    elements of ``Q(rho)``.  The residual ``Ev - rho v`` is checked to be
    exactly zero.
    """
    if not isinstance(E, NonnegIntMatrix):
        E = NonnegIntMatrix(E)
    if not E.is_irreducible():
        raise NotIrreducible("matrix support graph is not strongly connected")
    n = E.n
    if n == 1:
        return Fraction(E.rows[0][0]), (Fraction(1),)
    lo, hi, _v = collatz_wielandt_bracket(E)
    root = _perron_root(E.charpoly())
    if isinstance(root, NumberField):
        rho = root.gen
    else:
        rho = root
    if certified_compare(rho, lo) == Ordering.LT or certified_compare(rho, hi) == Ordering.GT:
        raise ArithmeticError("Perron root outside its Collatz-Wielandt bracket")
    m = [[E.rows[i][j] - (rho if i == j else 0) for j in range(n)] for i in range(n)]
    v = _null_vector(m)
    for x in v:
        if sign(x) <= 0:
            raise ArithmeticError("Perron vector is not strictly positive")
    for i in range(n):
        resid = sum(E.rows[i][j] * v[j] for j in range(n)) - rho * v[i]
        if resid != 0:
            raise ArithmeticError("nonzero eigen residual")
    return rho, tuple(v)
