"""The Thurston-Veech construction.

Given a cylinder diagram and Dehn twist vectors for the horizontal
(sigma_1-cycles) and vertical (sigma_2-cycles) cylinders, the cylinder
heights are the Perron eigenvector of ``E1 = A1 B A2 B^t`` and the
widths follow as ``A2 B^t h``.  With this choice the pre-coordinate
inverse moduli are ``lambda / n_i`` horizontally and ``1 / n_j``
vertically, so ``n_i mu_i`` is constant in each direction by
construction.  The surface is then normalized so that the shortest
horizontal and vertical saddle connections have equal length and the
total area is 1.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .combinat import CylinderDiagram, Permutation, canonicalize, cycle_index, cycles, is_transitive
from .errors import InvalidPermutation, NotIrreducible
from .numeric import NonnegIntMatrix, perron
from .surface_geom import RectangleSurface, common_modulus, cylinder_data


def twist_vector(values):
    """Validate a Dehn twist vector: positive integers with gcd 1."""
    vals = tuple(int(v) for v in values)
    if not vals or any(v < 1 for v in vals):
        raise ValueError("twist vector entries must be positive integers")
    g = 0
    for v in vals:
        g = math.gcd(g, v)
    if g != 1:
        raise ValueError("twist vector %r does not have gcd 1" % (vals,))
    return vals


@dataclass(frozen=True)
class TVData:
    diagram: CylinderDiagram
    n_horizontal: tuple
    n_vertical: tuple

    def __post_init__(self):
        object.__setattr__(self, "n_horizontal", twist_vector(self.n_horizontal))
        object.__setattr__(self, "n_vertical", twist_vector(self.n_vertical))
        if len(self.n_horizontal) != len(cycles(self.diagram.sigma_right)):
            raise ValueError("horizontal twist vector length differs from the number of sigma_1 cycles")
        if len(self.n_vertical) != len(cycles(self.diagram.sigma_up)):
            raise ValueError("vertical twist vector length differs from the number of sigma_2 cycles")

    @property
    def l(self):
        return self.diagram.l

    @classmethod
    def from_dict(cls, d):
        try:
            l = int(d["l"])
            r = Permutation.from_one_based(d["r"])
            u = Permutation.from_one_based(d["u"])
            nh, nv = d["nh"], d["nv"]
        except KeyError as exc:
            raise ValueError("TVData is missing field %s" % exc) from None
        if len(r) != l or len(u) != l:
            raise InvalidPermutation("permutation length differs from l")
        return cls(CylinderDiagram(r, u), tuple(nh), tuple(nv))

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def to_dict(self):
        return {
            "l": self.l,
            "r": self.diagram.sigma_right.one_based(),
            "u": self.diagram.sigma_up.one_based(),
            "nh": list(self.n_horizontal),
            "nv": list(self.n_vertical),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def canonical(self):
        c = canonicalize(self.diagram, (self.n_horizontal, self.n_vertical))
        return TVData(c.diagram, c.twists[0], c.twists[1])

    def __str__(self):
        return "%s; nh=%s; nv=%s" % (self.diagram, list(self.n_horizontal), list(self.n_vertical))


def intersection_matrix(d):
    """b_ij = |(i-th sigma_1 cycle) & (j-th sigma_2 cycle)|."""
    ch, cv = cycle_index(d.sigma_right), cycle_index(d.sigma_up)
    B = [[0] * len(cycles(d.sigma_up)) for _ in cycles(d.sigma_right)]
    for k in range(d.l):
        B[ch[k]][cv[k]] += 1
    return B


def transition_matrix(tv):
    """E1 = A1 B A2 B^t with A_d the diagonal matrices of twist entries."""
    B = intersection_matrix(tv.diagram)
    nh, nv = tv.n_horizontal, tv.n_vertical
    p, q = len(nh), len(nv)
    E = [[nh[i] * sum(B[i][j] * nv[j] * B[k][j] for j in range(q)) for k in range(p)]
         for i in range(p)]
    return NonnegIntMatrix(E)


def pre_dimensions(tv):
    """Perron root and per-rectangle pre-widths and pre-heights."""
    d = tv.diagram
    E = transition_matrix(tv)
    if not E.is_irreducible():
        raise NotIrreducible("transition matrix of %s is reducible" % d)
    lam, h = perron(E)
    B = intersection_matrix(d)
    nv = tv.n_vertical
    w = [nv[j] * sum(B[i][j] * h[i] for i in range(len(h))) for j in range(len(nv))]
    ch, cv = cycle_index(d.sigma_right), cycle_index(d.sigma_up)
    widths = tuple(w[cv[k]] for k in range(d.l))
    heights = tuple(h[ch[k]] for k in range(d.l))
    return lam, widths, heights


def _normalized(diagram, widths, heights, drop_marked):
    """Scale factors putting the rectangles in standard form with area 1."""
    probe = RectangleSurface(diagram, widths, heights, Fraction(1), Fraction(1), Fraction(1),
                             drop_marked=drop_marked)
    a = probe.shortest_horizontal_pre()
    b = probe.shortest_vertical_pre()
    area = sum(x * y for x, y in zip(widths, heights))
    return b / (a * area), a / (b * area), 1 / area


def build_surface(tv, drop_marked=False, name=None):
    """Normalized labeled translation surface determined by the TV data."""
    if not isinstance(tv, TVData):
        tv = TVData.from_dict(tv)
    if not is_transitive(tv.diagram):
        raise InvalidPermutation("diagram is not transitive")
    lam, widths, heights = pre_dimensions(tv)
    xs2, ys2, wf = _normalized(tv.diagram, widths, heights, drop_marked)
    s = RectangleSurface(tv.diagram, widths, heights, xs2, ys2, wf,
                         drop_marked=drop_marked, name=name, tvdata=tv)
    s.perron_root = lam
    check_twist_constancy(s, tv)
    return s


def check_twist_constancy(s, tv):
    """n_i mu_i must be one value per direction; raises ArithmeticError otherwise."""
    for direction, nvec in (("horizontal", tv.n_horizontal), ("vertical", tv.n_vertical)):
        cd = cylinder_data(s, direction)
        vals = [n * c.inverse_modulus for n, c in zip(nvec, cd.cylinders)]
        if any(v != vals[0] for v in vals[1:]):
            raise ArithmeticError("n_i mu_i is not constant in the %s direction" % direction)
    return True


def parabolic_generators(s):
    """Derivatives of the horizontal and vertical multi-twists.

    Returns ``([[1, mu], [0, 1]], [[1, 0], [mu', 1]])`` where ``mu`` and
    ``mu'`` are the common multiples of the inverse moduli.
    """
    mu = common_modulus(s, "horizontal")
    mu_v = common_modulus(s, "vertical")
    return ((1, mu), (0, 1)), ((1, 0), (mu_v, 1))


def extract_tvdata(s):
    """Diagram and twist vectors read back from a surface's cylinder data."""
    th = cylinder_data(s, "horizontal").twists
    tv = cylinder_data(s, "vertical").twists
    if th is None or tv is None:
        return None
    return TVData(s.diagram, th, tv)
