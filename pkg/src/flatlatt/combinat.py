"""Permutations, cylinder diagrams and their topological invariants.

Labels are 0-based internally; the text format and JSON use 1-based
labels.  A cylinder diagram is a pair (sigma_right, sigma_up): rectangle
``k`` has ``sigma_right[k]`` glued to its right side and ``sigma_up[k]``
glued to its top.
"""

import itertools
import math
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidPermutation, InvalidProfile
from .numeric import Interval, mp_interval


class Permutation(tuple):
    """A bijection of {0, ..., n-1} stored as its image tuple."""

    def __new__(cls, images):
        images = tuple(int(i) for i in images)
        if sorted(images) != list(range(len(images))):
            raise InvalidPermutation("not a bijection: %r" % (images,))
        return super().__new__(cls, images)

    @classmethod
    def identity(cls, n):
        return cls(range(n))

    @classmethod
    def from_one_based(cls, images):
        return cls(i - 1 for i in images)

    @classmethod
    def from_cycles(cls, cycles_, n):
        img = list(range(n))
        seen = set()
        for cyc in cycles_:
            for a in cyc:
                if not 0 <= a < n or a in seen:
                    raise InvalidPermutation("bad cycle notation")
                seen.add(a)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img)

    @property
    def n(self):
        return len(self)

    def one_based(self):
        return [i + 1 for i in self]

    def inverse(self):
        inv = [0] * len(self)
        for i, j in enumerate(self):
            inv[j] = i
        return Permutation(inv)

    def compose(self, other):
        """``self o other``: apply ``other`` first."""
        return Permutation(self[other[i]] for i in range(len(self)))

    def conjugate(self, pi):
        """``pi o self o pi^-1``, the permutation after relabeling by ``pi``."""
        out = [0] * len(self)
        for i, j in enumerate(self):
            out[pi[i]] = pi[j]
        return Permutation(out)

    def is_identity(self):
        return all(i == j for i, j in enumerate(self))

    def cycles(self):
        return cycles(self)

    def cycle_type(self):
        return tuple(sorted((len(c) for c in cycles(self)), reverse=True))

    def to_cycle_string(self):
        return "".join("(" + " ".join(str(a + 1) for a in c) + ")" for c in cycles(self))


def cycles(p):
    """Disjoint cycles, each from its smallest element, sorted by that element."""
    n = len(p)
    seen = [False] * n
    out = []
    for s in range(n):
        if seen[s]:
            continue
        cyc = []
        x = s
        while not seen[x]:
            seen[x] = True
            cyc.append(x)
            x = p[x]
        out.append(tuple(cyc))
    return out


def cycle_index(p):
    """Map each label to the index of its cycle (in ``cycles`` order)."""
    idx = [0] * len(p)
    for i, c in enumerate(cycles(p)):
        for a in c:
            idx[a] = i
    return idx


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text, n):
    text = text.strip()
    if not text:
        raise InvalidPermutation("empty cycle notation")
    if _CYCLE_RE.sub("", text).strip():
        raise InvalidPermutation("malformed cycle notation: %r" % text)
    cyc = []
    for body in _CYCLE_RE.findall(text):
        parts = body.replace(",", " ").split()
        if not parts:
            raise InvalidPermutation("empty cycle in %r" % text)
        cyc.append(tuple(int(x) - 1 for x in parts))
    return Permutation.from_cycles(cyc, n)


@dataclass(frozen=True)
class CylinderDiagram:
    sigma_right: Permutation
    sigma_up: Permutation

    def __post_init__(self):
        r = Permutation(self.sigma_right)
        u = Permutation(self.sigma_up)
        if len(r) != len(u) or len(r) == 0:
            raise InvalidPermutation("permutations must act on the same non-empty label set")
        object.__setattr__(self, "sigma_right", r)
        object.__setattr__(self, "sigma_up", u)

    @property
    def l(self):
        return len(self.sigma_right)

    @classmethod
    def parse(cls, text):
        """Parse ``l=3; r=(1 2)(3); u=(1 3)(2)``."""
        fields = {}
        for part in text.split(";"):
            if not part.strip():
                continue
            if "=" not in part:
                raise InvalidPermutation("expected key=value in %r" % part)
            k, v = part.split("=", 1)
            fields[k.strip()] = v.strip()
        try:
            n = int(fields["l"])
            return cls(parse_cycles(fields["r"], n), parse_cycles(fields["u"], n))
        except KeyError as exc:
            raise InvalidPermutation("missing field %s" % exc) from None
        except ValueError as exc:
            raise InvalidPermutation(str(exc)) from None

    def __str__(self):
        return "l=%d; r=%s; u=%s" % (self.l, self.sigma_right.to_cycle_string(),
                                      self.sigma_up.to_cycle_string())

    def commutator(self):
        """sigma_1 sigma_2 sigma_1^-1 sigma_2^-1, applied right to left."""
        r, u = self.sigma_right, self.sigma_up
        return r.compose(u).compose(r.inverse()).compose(u.inverse())


def is_transitive(d):
    """Whether <sigma_1, sigma_2> acts transitively on the labels."""
    n = d.l
    ri, ui = d.sigma_right.inverse(), d.sigma_up.inverse()
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for p in (d.sigma_right, d.sigma_up, ri, ui):
            y = p[x]
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


@dataclass(frozen=True)
class SingularityProfile:
    """Cone-angle multipliers k (angle 2 pi k); k = 1 entries are marked points."""

    multipliers: tuple

    def __post_init__(self):
        ks = tuple(sorted((int(k) for k in self.multipliers), reverse=True))
        if any(k < 1 for k in ks):
            raise InvalidProfile("cone-angle multipliers must be positive")
        object.__setattr__(self, "multipliers", ks)

    @property
    def num_points(self):
        return len(self.multipliers)

    @property
    def num_marked(self):
        return sum(1 for k in self.multipliers if k == 1)

    @property
    def orders(self):
        return tuple(k - 1 for k in self.multipliers)

    def without_marked(self):
        ks = tuple(k for k in self.multipliers if k > 1)
        return SingularityProfile(ks or (1,))

    def as_dict(self):
        return {"multipliers": list(self.multipliers), "marked": self.num_marked}


def singularity_profile(d, drop_marked=False):
    prof = SingularityProfile(tuple(len(c) for c in cycles(d.commutator())))
    return prof.without_marked() if drop_marked else prof


def gamma(profile):
    """tau / pi = 2(2g - 2 + |Sigma|) as an exact integer."""
    excess = sum(profile.orders)
    if excess % 2:
        raise InvalidProfile("sum of cone-angle excesses is odd")
    return 2 * (excess + profile.num_points)


def pi_multiple(q):
    """The scalar ``q * pi`` as a keyed interval."""
    q = Fraction(q)
    pi = mp_interval(lambda iv: iv.pi, key=("pi",))
    return Interval.point(q) * pi


def genus_and_tau(profile):
    """Genus and total angle tau = 2 pi (2g - 2 + |Sigma|)."""
    excess = sum(profile.orders)
    if excess % 2:
        raise InvalidProfile("sum of cone-angle excesses is odd")
    g = 1 + excess // 2
    return g, pi_multiple(gamma(profile))


# ---------------------------------------------------------------------------
# canonical forms
# ---------------------------------------------------------------------------

def _label_twists(d, twists):
    """Per-label twist values (cylinder of the label), or None."""
    if twists is None:
        return None
    nh, nv = twists
    ch, cv = cycle_index(d.sigma_right), cycle_index(d.sigma_up)
    if len(nh) != len(cycles(d.sigma_right)) or len(nv) != len(cycles(d.sigma_up)):
        raise ValueError("twist vector lengths do not match cycle counts")
    return [nh[ch[k]] for k in range(d.l)], [nv[cv[k]] for k in range(d.l)]


def _cycle_values(p, per_label):
    return tuple(per_label[c[0]] for c in cycles(p))


def relabel(d, pi, twists=None):
    """Apply the relabeling ``k -> pi[k]`` to a diagram (and twists)."""
    r = d.sigma_right.conjugate(pi)
    u = d.sigma_up.conjugate(pi)
    nd = CylinderDiagram(r, u)
    if twists is None:
        return nd, None
    lh, lv = _label_twists(d, twists)
    nlh, nlv = [0] * d.l, [0] * d.l
    for k in range(d.l):
        nlh[pi[k]] = lh[k]
        nlv[pi[k]] = lv[k]
    return nd, (_cycle_values(r, nlh), _cycle_values(u, nlv))


def _bfs_relabeling(d, start):
    pi = [-1] * d.l
    pi[start] = 0
    order = [start]
    nxt = 1
    i = 0
    while i < len(order):
        x = order[i]
        i += 1
        for p in (d.sigma_right, d.sigma_up):
            y = p[x]
            if pi[y] < 0:
                pi[y] = nxt
                nxt += 1
                order.append(y)
    return pi


def _encode(d, twists):
    key = (tuple(d.sigma_right), tuple(d.sigma_up))
    if twists is not None:
        key += (tuple(twists[0]), tuple(twists[1]))
    return key


@dataclass(frozen=True)
class Canonical:
    diagram: CylinderDiagram
    twists: tuple
    stabilizer_order: int

    @property
    def key(self):
        return _encode(self.diagram, self.twists)


def canonicalize(d, twists=None):
    """Canonical representative of the relabeling orbit of (sigma_1, sigma_2, n_1, n_2).

    Each start label determines a breadth-first relabeling; the canonical
    form is the least encoding among these ``l`` candidates.  Since the
    diagram is transitive, a relabeling commuting with both permutations
    is fixed by the image of one label, so the number of starts reaching
    the minimum is the order of the stabilizer.
    """
    if not is_transitive(d):
        raise InvalidPermutation("diagram is not transitive")
    best = None
    count = 0
    for s in range(d.l):
        pi = _bfs_relabeling(d, s)
        nd, nt = relabel(d, pi, twists)
        key = _encode(nd, nt)
        if best is None or key < best[0]:
            best = (key, nd, nt)
            count = 1
        elif key == best[0]:
            count += 1
    return Canonical(best[1], best[2], count)


def canonicalize_exhaustive(d, twists=None):
    """Lexicographic minimum over all l! relabelings (reference implementation)."""
    best = None
    count = 0
    for pi in itertools.permutations(range(d.l)):
        nd, nt = relabel(d, pi, twists)
        key = _encode(nd, nt)
        if best is None or key < best[0]:
            best = (key, nd, nt)
            count = 1
        elif key == best[0]:
            count += 1
    return Canonical(best[1], best[2], count)


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def _perm_of_type(parts):
    cyc = []
    start = 0
    for k in parts:
        cyc.append(tuple(range(start, start + k)))
        start += k
    return Permutation.from_cycles(cyc, start)


def enumerate_diagrams(l):
    """All transitive diagrams on ``l`` labels up to relabeling, in canonical order.

    Every orbit meets a pair whose first permutation is a fixed
    representative of its cycle type, so only those pairs are scanned.
    """
    if l < 1:
        raise ValueError("l must be positive")
    found = set()
    out = []
    for parts in _partitions(l):
        r = _perm_of_type(parts)
        for u in itertools.permutations(range(l)):
            d = CylinderDiagram(r, Permutation(u))
            if not is_transitive(d):
                continue
            c = canonicalize(d)
            if c.key not in found:
                found.add(c.key)
                out.append(c)
    out.sort(key=lambda c: c.key)
    return [c.diagram for c in out]


def count_transitive_pairs(l):
    """Brute-force count of transitive pairs in S_l x S_l."""
    perms = [Permutation(p) for p in itertools.permutations(range(l))]
    return sum(1 for r in perms for u in perms if is_transitive(CylinderDiagram(r, u)))


def orbit_size(d):
    return math.factorial(d.l) // canonicalize(d).stabilizer_order


def cycle_type_counter(p):
    return Counter(len(c) for c in cycles(p))
