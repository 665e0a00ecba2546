"""Closed-form evaluation of the quantitative bounds.

Each bound is available as stated and, where an independent check
contradicts the stated constant, in a conservative ``safe`` variant.
Reports always say which variant produced a number.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .combinat import enumerate_diagrams, cycles
from .errors import DomainError
from .numeric import (Interval, Ordering, _round, certified_compare, format_scalar, is_rational,
                      iv_value, mp_interval, sign, smax, smin, sqrt_scalar, to_interval)


def _q(x):
    return Fraction(x) if isinstance(x, int) else x


def _positive(x, what):
    if sign(x) <= 0:
        raise DomainError("%s must be positive" % what)


def _exp_of(expr_key, fn):
    return mp_interval(fn, key=expr_key)


# ---------------------------------------------------------------------------
# uniform periodicity
# ---------------------------------------------------------------------------

def uniform_ratio_bound(alpha, r):
    """s = min{exp(1/(2 alpha e)), (2(r-1) alpha)^(1-r)}; 1 when r = 1."""
    alpha = _q(alpha)
    _positive(alpha, "alpha")
    if r < 1:
        raise DomainError("r must be at least 1")
    if r == 1:
        return Fraction(1)
    expo = _exp_of(("exp(1/(2ae))", alpha), lambda iv: iv.exp(1 / (2 * iv_value(alpha, iv) * iv.e)))
    power = (2 * (r - 1) * alpha) ** (1 - r) if is_rational(alpha) else \
        1 / to_interval(2 * (r - 1) * alpha) ** (r - 1)
    return smin(expo, power)


# ---------------------------------------------------------------------------
# twist vectors
# ---------------------------------------------------------------------------

def divisor_pair_count(K):
    """#{(p, q) in N^2 : pq <= K}."""
    K = math.floor(K)
    return sum(K // p for p in range(1, K + 1))


def twist_factor(beta, safe_constants=False):
    """The per-cylinder factor E with eta(r, beta) = E^(r-1).

    As stated E = (8 beta)^-2 (1 - 2 log 8 beta); raises DomainError when
    that is negative.  The safe factor counts ratio pairs p/q with
    pq <= 1/(4 beta^2).
    """
    beta = _q(beta)
    _positive(beta, "beta")
    if safe_constants:
        return Fraction(divisor_pair_count(1 / (4 * beta * beta)))
    eight = 8 * beta
    if eight == 1:
        return Fraction(1)
    log_term = _exp_of(("1-2log8b", beta), lambda iv: 1 - 2 * iv.log(8 * iv_value(beta, iv)))
    if sign(log_term) < 0:
        raise DomainError("1 - 2 log(8 beta) < 0 for beta = %s" % format_scalar(beta))
    return log_term / (eight * eight)


def twist_count_bound(r, beta, safe_constants=False):
    """eta(r, beta) = (8 beta)^(2(1-r)) (1 - 2 log 8 beta)^(r-1)."""
    if r < 1:
        raise DomainError("r must be at least 1")
    if r == 1:
        return Fraction(1)
    return twist_factor(beta, safe_constants) ** (r - 1)


def twist_ratio_cap(beta, safe_constants=False):
    """Upper bound on pq for twist ratios n_i/n_j = p/q: 1/(64 beta^2), or 1/(4 beta^2) safe."""
    beta = _q(beta)
    _positive(beta, "beta")
    return 1 / ((4 if safe_constants else 64) * beta * beta)


# ---------------------------------------------------------------------------
# rectangles and shortest saddle connections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RectangleCaps:
    pair: object
    standard_form: object
    area_estimate: object

    def __iter__(self):
        return iter((self.pair, self.standard_form, self.area_estimate))


def rectangle_caps(beta, tau, beta0=None):
    """beta/beta0^2 (pair cap), 1/beta (standard form), 2/(tau beta^2) (area estimate)."""
    beta = _q(beta)
    _positive(beta, "beta")
    _positive(tau, "tau")
    pair = None
    if beta0 is not None:
        beta0 = _q(beta0)
        _positive(beta0, "beta0")
        if certified_compare(beta0, beta) == Ordering.GT:
            raise DomainError("beta0 must not exceed beta")
        pair = beta / (beta0 * beta0)
    return RectangleCaps(pair, 1 / beta, 2 / (tau * (beta * beta)))


def shortest_sc_cap(tau, safe_constants=False):
    """sqrt(2/tau) as stated; sqrt(8/tau) with safe constants."""
    _positive(tau, "tau")
    ratio = (8 if safe_constants else 2) / tau
    return sqrt_scalar(ratio) if is_rational(ratio) else to_interval(ratio).sqrt()


# ---------------------------------------------------------------------------
# NST / NSVT conversions
# ---------------------------------------------------------------------------

def nst_nsvt_convert(alpha, r=None):
    """Conversions between triangle and virtual-triangle bounds.

    Returns a dict with:
    ``beta_theorem`` -- 2 alpha exp(-1/(2 alpha e)) (right inclusion);
    ``beta_prop`` -- 2 alpha max{exp(-1/(2 alpha e)), (2(r-1) alpha)^(r-1)} when r is given;
    ``as_stated`` -- left inclusion NSVT(alpha/2) in NST(alpha);
    ``derived_safe`` -- NSVT(2 alpha) in NST(alpha), i.e. alpha(M) >= beta(M)/2.
    """
    alpha = _q(alpha)
    _positive(alpha, "alpha")
    decay = _exp_of(("exp(-1/(2ae))", alpha), lambda iv: iv.exp(-1 / (2 * iv_value(alpha, iv) * iv.e)))
    out = {
        "beta_theorem": 2 * alpha * decay,
        "as_stated": {"nsvt_beta": alpha / 2, "alpha_from_beta_factor": Fraction(2)},
        "derived_safe": {"nsvt_beta": 2 * alpha, "alpha_from_beta_factor": Fraction(1, 2)},
    }
    if r is not None:
        if r < 1:
            raise DomainError("r must be at least 1")
        power = (2 * (r - 1) * alpha) ** (r - 1)
        out["beta_prop"] = 2 * alpha * smax(decay, power)
    return out


def alpha_lower_from_beta(beta, safe_constants=True):
    """Lower bound on alpha(M) from beta(M): beta/2 (derived) or 2 beta (as stated)."""
    beta = _q(beta)
    return beta / 2 if safe_constants else 2 * beta


# ---------------------------------------------------------------------------
# cylinder counts
# ---------------------------------------------------------------------------

def max_cylinders(g, i, j=0):
    """(g + i + floor(j/2) - 1, 2g + i + j - 2): refined and crude cylinder caps."""
    if g < 0 or i < 0 or j < 0 or (g == 0 and i == 0 and j == 0):
        raise DomainError("need g, i, j >= 0, not all zero")
    return g + i + j // 2 - 1, 2 * g + i + j - 2


# ---------------------------------------------------------------------------
# cardinality and coarea
# ---------------------------------------------------------------------------

def _scaled_connected(m, D, n_max):
    """Integers C_n = c_n(m/D) * D^(2n) for n <= n_max, where c_n(E) is the
    weight of transitive pairs in S_n x S_n with E per cycle.

    The weight of all pairs is (E(E+1)...(E+n-1))^2 and splits over
    orbits (exponential formula), which the recursion inverts.
    """
    A = [1] * (n_max + 1)
    p = 1
    for n in range(1, n_max + 1):
        p *= m + (n - 1) * D
        A[n] = p * p
    C = [0] * (n_max + 1)
    for n in range(1, n_max + 1):
        acc = A[n]
        for k in range(1, n):
            acc -= math.comb(n - 1, k - 1) * C[k] * A[n - k]
        C[n] = acc
    return C


def connected_weights(E, n_max):
    """c_n(E) for n <= n_max at a rational E."""
    E = Fraction(E)
    C = _scaled_connected(E.numerator, E.denominator, n_max)
    return [Fraction(C[n], E.denominator ** (2 * n)) for n in range(n_max + 1)]


# endpoint precision for interval twist factors; coarsening is outward, hence sound
_PHI_BITS = 40


def _phi_exact_all(E, l_max):
    E = Fraction(E)
    if E == 0:
        return [None, Fraction(1)] + [Fraction(math.factorial(l - 1) ** 2) for l in range(2, l_max + 1)]
    m, D = E.numerator, E.denominator
    C = _scaled_connected(m, D, l_max)
    return [None] + [Fraction(C[l], D ** (2 * l - 2) * m * m) for l in range(1, l_max + 1)]


def phi_all(E, l_max):
    """[Phi(1), ..., Phi(l_max)] (index 0 unused) for a rational or interval E > 0."""
    if isinstance(E, Interval):
        if E.lo <= 0:
            raise DomainError("twist factor interval reaches 0")
        # c_n has nonnegative coefficients, so Phi is monotone in E; evaluate at both ends
        lo = _phi_exact_all(_round(E.lo, _PHI_BITS, False), l_max)
        hi = _phi_exact_all(_round(E.hi, _PHI_BITS, True), l_max)
        return [None] + [Interval(_round(lo[l], E.prec, False), _round(hi[l], E.prec, True), E.prec)
                         for l in range(1, l_max + 1)]
    return _phi_exact_all(E, l_max)


def phi(l, E):
    """Phi(l, beta) = sum over transitive pairs of E^(|s1|-1) E^(|s2|-1)."""
    return phi_all(E, l)[l]


def phi_by_enumeration(l, E):
    """Phi(l, beta) summed over canonical diagrams weighted by orbit size."""
    from .combinat import canonicalize

    total = 0
    for d in enumerate_diagrams(l):
        orbit = math.factorial(l) // canonicalize(d).stabilizer_order
        r1, r2 = len(cycles(d.sigma_right)), len(cycles(d.sigma_up))
        total += orbit * Fraction(E) ** (r1 + r2 - 2)
    return total


@dataclass
class CardinalityCoarea:
    variant: str
    l_max_cardinality: int
    l_max_coarea: int
    cardinality: object = None
    coarea: object = None
    errors: dict = field(default_factory=dict)

    def to_json(self):
        out = {"variant": self.variant, "l_max_cardinality": self.l_max_cardinality,
               "l_max_coarea": self.l_max_coarea}
        for name in ("cardinality", "coarea"):
            val = getattr(self, name)
            out[name] = format_scalar(val) if val is not None else None
        if self.errors:
            out["errors"] = dict(self.errors)
        return out


def _weighted_sum(l_max, beta, safe_constants):
    if l_max < 1:
        return Fraction(0)
    if l_max == 1:
        return Fraction(1)
    vals = phi_all(twist_factor(beta, safe_constants), l_max)
    total = Fraction(0)
    for l in range(1, l_max + 1):
        term = vals[l] / math.factorial(l - 1)
        if isinstance(term, Interval):
            term = Interval(_round(term.lo, term.prec, False), _round(term.hi, term.prec, True), term.prec)
        total = total + term
    return total


def cardinality_and_coarea(beta, safe_constants=False, include_coarea=True):
    """Caps on |NSVT~(beta)| and on the coarea sum.

    cardinality: sum over l <= 1/beta of Phi(l, beta)/(l-1)!;
    coarea: 2 pi times the same sum over l <= 2/beta^2.
    Each part carries its own DomainError when the stated twist factor
    is undefined.
    """
    beta = _q(beta)
    _positive(beta, "beta")
    l_card = math.floor(1 / Fraction(beta)) if is_rational(beta) else math.floor(1 / float(beta))
    l_area = math.floor(2 / Fraction(beta) ** 2) if is_rational(beta) else math.floor(2 / float(beta) ** 2)
    out = CardinalityCoarea("safe" if safe_constants else "as-stated", l_card, l_area)
    try:
        out.cardinality = _weighted_sum(l_card, beta, safe_constants)
    except DomainError as exc:
        out.errors["cardinality"] = str(exc)
    if not include_coarea:
        return out
    try:
        s = _weighted_sum(l_area, beta, safe_constants)
        pi = mp_interval(lambda iv: iv.pi, key=("pi",))
        out.coarea = 2 * pi * s
    except DomainError as exc:
        out.errors["coarea"] = str(exc)
    return out


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------

def _try(fn, *args, **kw):
    try:
        return format_scalar(fn(*args, **kw))
    except DomainError as exc:
        return {"error": str(exc)}


def bounds_report(alpha=None, beta=None, r=None, tau=None, g=None, i=None, j=None, l=None,
                  beta0=None):
    """Every applicable bound, as stated and safe, keyed by identifier."""
    report = {"input": {}, "as_stated": {}, "safe": {}}
    echo = {"alpha": alpha, "beta": beta, "r": r, "tau": tau, "g": g, "i": i, "j": j, "l": l,
            "beta0": beta0}
    report["input"] = {k: (format_scalar(v) if not isinstance(v, int) else v)
                       for k, v in echo.items() if v is not None}
    for variant, safe in (("as_stated", False), ("safe", True)):
        out = report[variant]
        if alpha is not None:
            if r is not None:
                out["s"] = _try(uniform_ratio_bound, alpha, r)
            conv = nst_nsvt_convert(alpha, r)
            out["beta_theorem"] = format_scalar(conv["beta_theorem"])
            if "beta_prop" in conv:
                out["beta_prop"] = format_scalar(conv["beta_prop"])
            mode = conv["derived_safe" if safe else "as_stated"]
            out["nsvt_beta_for_nst_alpha"] = format_scalar(mode["nsvt_beta"])
        if beta is not None:
            if r is not None:
                out["eta"] = _try(twist_count_bound, r, beta, safe_constants=safe)
            out["pq_cap"] = _try(twist_ratio_cap, beta, safe_constants=safe)
            out["alpha_lower"] = format_scalar(alpha_lower_from_beta(beta, safe_constants=safe))
            cc = cardinality_and_coarea(beta, safe_constants=safe)
            out["cardinality_coarea"] = cc.to_json()
            if tau is not None:
                caps = rectangle_caps(beta, tau, beta0)
                out["rectangles"] = {
                    "pair": format_scalar(caps.pair) if caps.pair is not None else None,
                    "standard_form": format_scalar(caps.standard_form),
                    "area_estimate": format_scalar(caps.area_estimate),
                }
        if tau is not None:
            out["shortest_sc_cap"] = format_scalar(shortest_sc_cap(tau, safe_constants=safe))
        if g is not None and i is not None:
            refined, crude = max_cylinders(g, i, j or 0)
            out["max_cylinders"] = {"refined": refined, "crude": crude}
    return report
