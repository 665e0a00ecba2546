"""Geometry on rectangle-decomposed translation surfaces.

A :class:`RectangleSurface` keeps its rectangle dimensions in
*pre-coordinates*: exact widths ``w~`` and heights ``h~`` (rationals or
number-field elements) together with exact squared scale factors.  The
real width of rectangle ``k`` is ``sqrt(xscale2) * w~[k]`` and the real
height is ``sqrt(yscale2) * h~[k]``; ``wedge_factor`` is the product of
the two scales.  Squared lengths, wedges and inverse moduli are
therefore exact even when the side lengths themselves are irrational.
"""

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .combinat import (CylinderDiagram, Permutation, SingularityProfile, cycle_index,
                       cycles, gamma, genus_and_tau)
from .errors import DegeneratePair, InsufficientData, NotCommensurable
from .numeric import (Ordering, certified_compare, format_scalar, is_rational, sign,
                      sqrt_scalar)

# relative margin under which a float sign is not trusted
_FLOAT_EPS = 1e-9


def _f(x):
    return float(x)


# ---------------------------------------------------------------------------
# surfaces
# ---------------------------------------------------------------------------

class RectangleSurface:
    """ℓ rectangles glued by (sigma_right, sigma_up), with exact pre-coordinates."""

    def __init__(self, diagram, pre_widths, pre_heights, xscale2, yscale2, wedge_factor,
                 drop_marked=False, name=None, tvdata=None):
        if not isinstance(diagram, CylinderDiagram):
            diagram = CylinderDiagram(*diagram)
        self.diagram = diagram
        self.l = diagram.l
        self.pre_widths = tuple(pre_widths)
        self.pre_heights = tuple(pre_heights)
        if len(self.pre_widths) != self.l or len(self.pre_heights) != self.l:
            raise ValueError("one width and one height per rectangle")
        r, u = diagram.sigma_right, diagram.sigma_up
        for k in range(self.l):
            if self.pre_heights[k] != self.pre_heights[r[k]]:
                raise ValueError("right neighbour of rectangle %d has a different height" % k)
            if self.pre_widths[k] != self.pre_widths[u[k]]:
                raise ValueError("top neighbour of rectangle %d has a different width" % k)
        self.xscale2 = xscale2
        self.yscale2 = yscale2
        self.wedge_factor = wedge_factor
        if self.xscale2 * self.yscale2 != self.wedge_factor * self.wedge_factor:
            raise ValueError("scale factors are inconsistent")
        self.drop_marked = drop_marked
        self.name = name
        self.tvdata = tvdata
        self._init_corners()

    def _init_corners(self):
        r, u = self.diagram.sigma_right, self.diagram.sigma_up
        ri, ui = r.inverse(), u.inverse()
        # turning once around the bottom-left corner of k lands on the bottom-left of c(k)
        c = Permutation(u[r[ui[ri[k]]]] for k in range(self.l))
        self.corner_cycles = cycles(c)
        self.corner_class = cycle_index(c)
        ks = [len(cyc) for cyc in self.corner_cycles]
        sing = [k > 1 or not self.drop_marked for k in ks]
        if not any(sing):
            sing[0] = True
        self.class_singular = tuple(sing)
        self.profile = SingularityProfile(tuple(k for k, s in zip(ks, sing) if s))
        self.genus, self.tau = genus_and_tau(self.profile)
        self.gamma = gamma(self.profile)

    def __repr__(self):
        label = self.name or str(self.diagram)
        return "RectangleSurface(%s)" % label

    # -- basic data -------------------------------------------------------

    def is_singular_label(self, k):
        """Whether the bottom-left corner of rectangle ``k`` lies in Sigma."""
        return self.class_singular[self.corner_class[k]]

    @property
    def xscale(self):
        return sqrt_scalar(self.xscale2)

    @property
    def yscale(self):
        return sqrt_scalar(self.yscale2)

    @property
    def widths(self):
        s = self.xscale
        return tuple(s * w for w in self.pre_widths)

    @property
    def heights(self):
        s = self.yscale
        return tuple(s * h for h in self.pre_heights)

    def area(self):
        return self.wedge_factor * sum(w * h for w, h in zip(self.pre_widths, self.pre_heights))

    def is_exact(self):
        vals = self.pre_widths + self.pre_heights + (self.xscale2, self.yscale2)
        return all(is_rational(v) for v in vals)

    def num_points(self):
        return self.profile.num_points

    def real_hol(self, pre):
        """Real holonomy from a pre-coordinate vector."""
        x, y = pre
        return (self.xscale * x if x != 0 else Fraction(0),
                self.yscale * y if y != 0 else Fraction(0))

    def len2(self, pre):
        x, y = pre
        return self.xscale2 * x * x + self.yscale2 * y * y

    def wedge(self, a, b):
        """Real wedge of two pre-coordinate vectors."""
        return self.wedge_factor * (a[0] * b[1] - a[1] * b[0])

    # -- boundary walks ----------------------------------------------------

    def _walk(self, perm, sizes):
        best = None
        for k in range(self.l):
            if not self.is_singular_label(k):
                continue
            total = 0
            j = k
            while True:
                total = total + sizes[j]
                j = perm[j]
                if self.is_singular_label(j):
                    break
            if best is None or certified_compare(total, best) == Ordering.LT:
                best = total
        return best

    def shortest_horizontal_pre(self):
        """Pre-length of the shortest horizontal saddle connection."""
        return self._walk(self.diagram.sigma_right, self.pre_widths)

    def shortest_vertical_pre(self):
        return self._walk(self.diagram.sigma_up, self.pre_heights)

    def to_json(self):
        return {
            "l": self.l,
            "r": self.diagram.sigma_right.one_based(),
            "u": self.diagram.sigma_up.one_based(),
            "widths": [format_scalar(w) for w in self.widths],
            "heights": [format_scalar(h) for h in self.heights],
            "area": format_scalar(self.area()),
            "genus": self.genus,
            "profile": self.profile.as_dict(),
            "tau_over_pi": self.gamma,
        }


# ---------------------------------------------------------------------------
# saddle connections
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SaddleConnection:
    pre_hol: tuple
    len2: object
    from_class: int
    to_class: int
    frame: int
    start: int
    path: tuple = field(compare=False)
    hol: tuple = field(compare=False)

    @property
    def key(self):
        return (self.frame, self.start, self.pre_hol)

    def to_json(self):
        return {
            "hol": [format_scalar(self.hol[0]), format_scalar(self.hol[1])],
            "from": self.from_class,
            "to": self.to_class,
            "len2": format_scalar(self.len2),
        }


class _Frame:
    """The surface seen after rotating the viewpoint by quarter turns."""

    __slots__ = ("r", "u", "W", "H", "Wf", "Hf", "cls", "xs2", "ys2", "xs2f", "ys2f", "turns")

    def __init__(self, r, u, W, H, cls, xs2, ys2, turns):
        self.r, self.u = r, u
        self.W, self.H = W, H
        self.Wf = [_f(w) for w in W]
        self.Hf = [_f(h) for h in H]
        self.cls = cls
        self.xs2, self.ys2 = xs2, ys2
        self.xs2f, self.ys2f = _f(xs2), _f(ys2)
        self.turns = turns

    def rotated(self):
        # new east is old south, new north is old east
        r = self.u.inverse()
        u = self.r
        cls = [self.cls[self.u[k]] for k in range(len(self.cls))]
        return _Frame(r, u, self.H, self.W, cls, self.ys2, self.xs2, self.turns + 1)

    def to_original(self, v):
        x, y = v
        for _ in range(self.turns):
            x, y = y, -x
        return (x, y)


def _wsign(a, b, af, bf):
    """Exact sign of a x b, decided in floats when clearly nonzero."""
    w = af[0] * bf[1] - af[1] * bf[0]
    scale = abs(af[0] * bf[1]) + abs(af[1] * bf[0])
    if abs(w) > _FLOAT_EPS * scale:
        return 1 if w > 0 else -1
    return sign(a[0] * b[1] - a[1] * b[0])


def _frames(s):
    f = _Frame(s.diagram.sigma_right, s.diagram.sigma_up, s.pre_widths, s.pre_heights,
               list(s.corner_class), s.xscale2, s.yscale2, 0)
    out = [f]
    for _ in range(3):
        f = f.rotated()
        out.append(f)
    return out


class _Search:
    def __init__(self, s, frame, L2):
        self.s = s
        self.fr = frame
        self.L2 = L2
        self.L2f = _f(L2) * (1 + _FLOAT_EPS) + 1e-300
        self.sing = s.class_singular
        self.found = []

    def within(self, v):
        fr = self.fr
        return certified_compare(fr.xs2 * v[0] * v[0] + fr.ys2 * v[1] * v[1], self.L2) != Ordering.GT

    def record(self, start, v, end_label, path):
        fr = self.fr
        pre = fr.to_original(v)
        self.found.append(SaddleConnection(
            pre_hol=pre,
            len2=self.s.len2(pre),
            from_class=fr.cls[start],
            to_class=fr.cls[end_label],
            frame=fr.turns,
            start=start,
            path=tuple(path),
            hol=self.s.real_hol(pre),
        ))

    def east(self, k):
        fr = self.fr
        x, xf = 0, 0.0
        j = k
        path = [k]
        while True:
            x = x + fr.W[j]
            xf += fr.Wf[j]
            if fr.xs2f * xf * xf > self.L2f:
                return
            j = fr.r[j]
            if self.sing[fr.cls[j]]:
                if self.within((x, 0)):
                    self.record(k, (x, 0), j, path)
                return
            path.append(j)

    def _pruned(self, c, cx, cy, cxf, cyf, lo_f, hi_f):
        """Whether every hit beyond rectangle ``c`` is longer than L (float bound with margin)."""
        fr = self.fr
        X = cxf + fr.Wf[c]
        Y = cyf + fr.Hf[c]
        # hits have x >= X (slope >= slope of lo) or y >= Y (slope <= slope of hi)
        lx, ly = lo_f
        hx, hy = hi_f
        b1 = X * X * (fr.xs2f + fr.ys2f * (ly / lx) ** 2) if lx > 0 else math.inf
        b2 = Y * Y * (fr.xs2f * (hx / hy) ** 2 + fr.ys2f) if hy > 0 else math.inf
        return min(b1, b2) > self.L2f

    def cone(self, start, k, ox, oy, oxf, oyf, lo, hi, lo_f, hi_f, lo_closed, hi_closed, path):
        fr = self.fr
        stack = [(k, ox, oy, oxf, oyf, lo, hi, lo_f, hi_f, lo_closed, hi_closed, path)]
        while stack:
            k, ox, oy, oxf, oyf, lo, hi, lo_f, hi_f, lo_closed, hi_closed, path = stack.pop()
            T = (ox + fr.W[k], oy + fr.H[k])
            Tf = (oxf + fr.Wf[k], oyf + fr.Hf[k])
            s_lo = _wsign(lo, T, lo_f, Tf)   # > 0: T strictly above lo
            s_hi = _wsign(T, hi, Tf, hi_f)   # > 0: T strictly below hi
            t_in = (s_lo > 0 or (s_lo == 0 and lo_closed)) and (s_hi > 0 or (s_hi == 0 and hi_closed))
            if t_in and fr.xs2f * Tf[0] ** 2 + fr.ys2f * Tf[1] ** 2 <= self.L2f:
                tr = fr.u[fr.r[k]]
                if self.within(T):
                    if self.sing[fr.cls[tr]]:
                        self.record(start, T, tr, path)
                    else:
                        stack.append((tr, T[0], T[1], Tf[0], Tf[1], T, T, Tf, Tf,
                                      True, True, path + [tr]))
            # part of the cone below T leaves through the right side
            if s_lo > 0:
                c = fr.r[k]
                if s_hi < 0:
                    child = (lo, hi, lo_f, hi_f, lo_closed, hi_closed)
                else:
                    child = (lo, T, lo_f, Tf, lo_closed, False)
                if not self._pruned(c, ox + fr.W[k], oy, Tf[0], oyf, child[2], child[3]):
                    stack.append((c, ox + fr.W[k], oy, Tf[0], oyf) + child + (path + [c],))
            # part above T leaves through the top
            if s_hi > 0:
                c = fr.u[k]
                if s_lo < 0:
                    child = (lo, hi, lo_f, hi_f, lo_closed, hi_closed)
                else:
                    child = (T, hi, Tf, hi_f, False, hi_closed)
                if not self._pruned(c, ox, oy + fr.H[k], oxf, Tf[1], child[2], child[3]):
                    stack.append((c, ox, oy + fr.H[k], oxf, Tf[1]) + child + (path + [c],))

    def run(self):
        fr = self.fr
        for k in range(len(fr.cls)):
            if not self.sing[fr.cls[k]]:
                continue
            self.east(k)
            self.cone(k, k, 0, 0, 0.0, 0.0, (1, 0), (0, 1), (1.0, 0.0), (0.0, 1.0),
                      False, False, [k])
        return self.found


def _angle_key(v):
    return math.atan2(_f(v[1]), _f(v[0])) % (2 * math.pi)


def enumerate_saddle_connections(s, L2):
    """All oriented saddle connections with |hol|^2 <= L2, each once.

    ``L2`` is the squared length bound (exact).  The result is sorted by
    (length, angle) and then by starting sector.
    """
    if sign(L2) <= 0:
        raise ValueError("length bound must be positive")
    found = []
    for fr in _frames(s):
        found.extend(_Search(s, fr, L2).run())
    found.sort(key=lambda sc: (_f(sc.len2), _angle_key(sc.pre_hol), sc.frame, sc.start))
    return found


def holonomy_set(s, L2):
    """Distinct pre-coordinate holonomies up to L."""
    return sorted({sc.pre_hol for sc in enumerate_saddle_connections(s, L2)},
                  key=lambda v: (_f(s.len2(v)), _angle_key(v)))


# ---------------------------------------------------------------------------
# virtual triangles and alpha
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VirtualTriangleResult:
    value: object
    certified: bool
    basis: tuple = None
    pair: tuple = None

    def __iter__(self):
        return iter((self.value, self.certified))


def _pre_wedge(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _canonical_sign(v):
    x, y = v
    sx = sign(x)
    if sx < 0 or (sx == 0 and sign(y) < 0):
        return (-x, -y)
    return (x, y)


def _integral(q):
    return is_rational(q) and Fraction(q).denominator == 1


def lattice_basis(s, hols):
    """The two shortest independent vectors among ``hols`` (pre-coordinates)."""
    ordered = sorted(hols, key=lambda v: (_f(s.len2(v)), _angle_key(v)))
    if not ordered:
        return None
    v1 = ordered[0]
    for v in ordered[1:]:
        if sign(_pre_wedge(v1, v)) != 0:
            return v1, v
    return None


def in_lattice(v, basis):
    v1, v2 = basis
    d = _pre_wedge(v1, v2)
    c1 = _pre_wedge(v, v2) / d
    c2 = _pre_wedge(v1, v) / d
    return _integral(c1) and _integral(c2)


def _distinct_vectors(s, connections):
    return sorted({_canonical_sign(sc.pre_hol) for sc in connections},
                  key=lambda v: (_f(s.len2(v)), _angle_key(v)))


def _smallest_pre_wedges(vecs, count):
    """The ``count`` least distinct nonzero |v ^ w| (pre-coordinates), each with a pair.

    Floats only order the candidate pairs; every returned value is exact.
    """
    if len(vecs) < 2:
        return []
    fl = np.array([(_f(v[0]), _f(v[1])) for v in vecs])
    x, y = fl[:, 0], fl[:, 1]
    iu, ju = np.triu_indices(len(vecs), k=1)
    w = np.abs(x[iu] * y[ju] - y[iu] * x[ju])
    scale = np.abs(x[iu] * y[ju]) + np.abs(y[iu] * x[ju])
    order = np.argsort(w, kind="stable")
    found = []
    for t in order:
        if len(found) >= count:
            top = max(_f(v) for v, _ in found)
            if w[t] > top + _FLOAT_EPS * (scale[t] + 1):
                break
        i, j = int(iu[t]), int(ju[t])
        ex = _pre_wedge(vecs[i], vecs[j])
        sg = sign(ex)
        if sg == 0:
            continue
        ex = ex if sg > 0 else -ex
        if any(ex == v for v, _ in found):
            continue
        found.append((ex, (vecs[i], vecs[j])))
        if len(found) > count:
            found = _sorted_exact(found)[:count]
    return _sorted_exact(found)[:count]


def _sorted_exact(items):
    return sorted(items, key=functools.cmp_to_key(lambda a, b: int(certified_compare(a[0], b[0]))))


def min_virtual_triangle(s, L2, connections=None):
    """Least nonzero |v1 ^ v2| over holonomies of length at most L.

    The value is an upper bound for beta(M); it is marked certified when
    all enumerated holonomies lie in the lattice spanned by the two
    shortest independent ones and that lattice's covolume is the value.
    """
    if connections is None:
        connections = enumerate_saddle_connections(s, L2)
    vecs = _distinct_vectors(s, connections)
    basis = lattice_basis(s, vecs)
    if basis is None:
        raise InsufficientData("fewer than two directions up to the scan length")
    best, best_pair = _smallest_pre_wedges(vecs, 1)[0]
    value = s.wedge_factor * best
    covol = abs(_pre_wedge(*basis))
    certified = covol == best and all(in_lattice(v, basis) for v in vecs)
    return VirtualTriangleResult(value, certified, basis, best_pair)


def wedge_spectrum(s, L2, count=5, connections=None):
    """The ``count`` smallest distinct nonzero wedge values among holonomies up to L."""
    if connections is None:
        connections = enumerate_saddle_connections(s, L2)
    vecs = _distinct_vectors(s, connections)
    return [s.wedge_factor * v for v, _ in _smallest_pre_wedges(vecs, count)]


@dataclass(frozen=True)
class AlphaBracket:
    lo: object
    hi: object
    beta: object
    beta_certified: bool

    @property
    def exact(self):
        if certified_compare(self.lo, self.hi) == Ordering.EQ:
            return self.lo
        return None

    def __iter__(self):
        return iter((self.lo, self.hi))


def alpha_bounds(s, L2, vt=None):
    """Bracket on alpha(M): beta/2 from below (when certified), min(pi/tau, wedge/2) above."""
    if vt is None:
        vt = min_virtual_triangle(s, L2)
    pi_over_tau = Fraction(1, s.gamma)
    half = vt.value / 2
    lo = half if vt.certified else Fraction(0)
    hi = pi_over_tau if certified_compare(pi_over_tau, half) != Ordering.GT else half
    return AlphaBracket(lo, hi, vt.value, vt.certified)


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cylinder:
    members: tuple
    height: object
    circumference: object
    inverse_modulus: object
    area: object
    pre_height: object


@dataclass(frozen=True)
class CylinderData:
    direction: str
    cylinders: tuple
    twists: tuple
    mu: object

    def __iter__(self):
        return iter((self.cylinders, self.twists))


def _twists_from_moduli(mods):
    ratios = [m / mods[0] for m in mods]
    if not all(is_rational(r) for r in ratios):
        return None, None
    inv = [1 / Fraction(r) for r in ratios]
    den = 1
    for q in inv:
        den = den * q.denominator // math.gcd(den, q.denominator)
    ints = [int(q * den) for q in inv]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    twists = tuple(x // g for x in ints)
    return twists, mods[0] * twists[0]


def cylinder_data(s, direction="horizontal"):
    """Cylinders of the horizontal or vertical decomposition, with the twist vector."""
    if direction not in ("horizontal", "vertical"):
        raise ValueError("direction must be horizontal or vertical")
    if direction == "horizontal":
        perm, across, along = s.diagram.sigma_right, s.pre_heights, s.pre_widths
        h_scale, c_scale2 = s.yscale, s.xscale2
        ratio = s.xscale2 / s.wedge_factor
    else:
        perm, across, along = s.diagram.sigma_up, s.pre_widths, s.pre_heights
        h_scale, c_scale2 = s.xscale, s.yscale2
        ratio = s.yscale2 / s.wedge_factor
    cyls = []
    mods = []
    for cyc in cycles(perm):
        h_pre = across[cyc[0]]
        c_pre = sum(along[k] for k in cyc)
        mu = ratio * c_pre / h_pre
        mods.append(mu)
        c_real = sqrt_scalar(c_scale2) * c_pre
        cyls.append(Cylinder(
            members=tuple(cyc),
            height=h_scale * h_pre,
            circumference=c_real,
            inverse_modulus=mu,
            area=s.wedge_factor * c_pre * h_pre,
            pre_height=h_pre,
        ))
    twists, mu = _twists_from_moduli(mods)
    return CylinderData(direction, tuple(cyls), twists, mu)


def common_modulus(s, direction):
    """LCM of the inverse moduli in one direction; NotCommensurable if none exists."""
    cd = cylinder_data(s, direction)
    if cd.twists is None:
        raise NotCommensurable("%s inverse moduli are not commensurable" % direction)
    return cd.mu


# ---------------------------------------------------------------------------
# standard form
# ---------------------------------------------------------------------------

def _as_vector(v):
    if isinstance(v, SaddleConnection):
        return v.hol
    return tuple(Fraction(x) if isinstance(x, int) else x for x in v)


def standardize(s, xi, eta):
    """Unit-determinant g with g(xi) = (sqrt b, 0) and g(eta) = (0, +-sqrt b).

    ``b`` is |xi ^ eta|.  ``xi`` and ``eta`` may be saddle connections of
    ``s`` or plain holonomy pairs.
    """
    if isinstance(xi, SaddleConnection) and isinstance(eta, SaddleConnection):
        det = s.wedge(xi.pre_hol, eta.pre_hol)
    else:
        a, b = _as_vector(xi), _as_vector(eta)
        det = a[0] * b[1] - a[1] * b[0]
    v1, v2 = _as_vector(xi), _as_vector(eta)
    sg = sign(det)
    if sg == 0:
        raise DegeneratePair("saddle connections are parallel")
    b = det if sg > 0 else -det
    root = sqrt_scalar(b)
    inv = ((v2[1] / det, -v2[0] / det), (-v1[1] / det, v1[0] / det))
    row0 = tuple(root * x for x in inv[0])
    row1 = tuple(sg * root * x for x in inv[1])
    return (row0, row1)


def apply_matrix(g, v):
    return (g[0][0] * v[0] + g[0][1] * v[1], g[1][0] * v[0] + g[1][1] * v[1])
