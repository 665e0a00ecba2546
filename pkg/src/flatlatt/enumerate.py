"""Enumeration of candidate surfaces in NSVT(beta).

The sweep runs over work units (l, canonical diagram).  Each unit
generates twist-vector pairs, builds every surface, and keeps those
whose observed minimal virtual triangle up to the scan length is at
least beta.  Units are independent; results are merged in unit order so
the catalog does not depend on the number of workers.
"""

import itertools
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .bounds import cardinality_and_coarea
from .combinat import CylinderDiagram, cycles, enumerate_diagrams, gamma, singularity_profile
from .config import RunConfig
from .errors import (BoundViolation, DomainError, FlatLattError, GuardRefusal,
                     InsufficientData)
from .numeric import (Ordering, certified_compare, format_scalar, parse_scalar, pi_interval,
                      set_precision_cap)
from .surface_geom import (alpha_bounds, enumerate_saddle_connections, min_virtual_triangle,
                           wedge_spectrum)
from .tv_construct import TVData, build_surface

log = logging.getLogger(__name__)

CATALOG_VERSION = 1
L_CAP_GUARD = 12
SPECTRUM_SIZE = 5


# ---------------------------------------------------------------------------
# twist vectors
# ---------------------------------------------------------------------------

def ratio_cap(beta, prune):
    """Cap on pq for twist ratios p/q under a prune mode, or None for no cap."""
    if prune == "off":
        return None
    if prune == "strict":
        return 1 / (64 * beta * beta)
    if prune == "safe":
        return 1 / (4 * beta * beta)
    factor = Fraction(prune.split(":", 1)[1])
    return factor / (64 * beta * beta)


def _ratios_ok(vec, cap):
    if cap is None:
        return True
    for a, b in itertools.combinations(vec, 2):
        g = math.gcd(a, b)
        if (a // g) * (b // g) > cap:
            return False
    return True


def twist_vectors(r, max_twist, cap=None):
    """Twist vectors of length r with entries <= max_twist, gcd 1, pairwise pq <= cap.

    Generated in lexicographic order.
    """
    for vec in itertools.product(range(1, max_twist + 1), repeat=r):
        g = 0
        for v in vec:
            g = math.gcd(g, v)
        if g == 1 and _ratios_ok(vec, cap):
            yield vec


# ---------------------------------------------------------------------------
# catalog entries
# ---------------------------------------------------------------------------

@dataclass
class CatalogEntry:
    tvdata: dict
    l: int
    genus: int
    profile: dict
    tau_over_pi: int
    beta: str
    beta_certified: bool
    alpha_lo: str
    alpha_hi: str
    alpha_exact: str
    exact_surface: bool
    fingerprint: str
    provenance: dict
    group: int = None

    def to_dict(self):
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)

    @property
    def sort_key(self):
        tv = self.tvdata
        return (tv["l"], tv["r"], tv["u"], tv["nh"], tv["nv"])


@dataclass
class Catalog:
    beta: str
    config: dict
    entries: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    units_done: list = field(default_factory=list)
    l_cap: int = 0
    version: int = CATALOG_VERSION

    def to_dict(self):
        return {
            "version": self.version,
            "beta": self.beta,
            "config": self.config,
            "l_cap": self.l_cap,
            "units_done": list(self.units_done),
            "entries": [e.to_dict() for e in self.entries],
            "diagnostics": list(self.diagnostics),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_dict(cls, d):
        if d.get("version") != CATALOG_VERSION:
            raise ValueError("unsupported catalog version %r" % d.get("version"))
        return cls(beta=d["beta"], config=d["config"],
                   entries=[CatalogEntry.from_dict(e) for e in d["entries"]],
                   diagnostics=list(d.get("diagnostics", [])),
                   units_done=list(d.get("units_done", [])), l_cap=d.get("l_cap", 0))

    def save(self, path):
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(self.to_json())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def __len__(self):
        return len(self.entries)

    def tvdata_keys(self):
        return {json.dumps(e.tvdata, sort_keys=True) for e in self.entries}


# ---------------------------------------------------------------------------
# the sweep
# ---------------------------------------------------------------------------

def l_cap(beta, cfg):
    """Largest rectangle count to scan."""
    if cfg.l_cap_mode == "coarea":
        # tau >= 2 pi for every profile, so l <= slack/(pi beta^2) covers all profiles
        bound = cfg.slack / (pi_interval() * (beta * beta))
        return math.floor(bound.hi)
    return math.floor(cfg.slack / beta)


def _diagram_allowed(d, beta, cfg):
    if cfg.l_cap_mode != "coarea":
        return True
    g = gamma(singularity_profile(d, cfg.drop_marked))
    # l <= 2 slack / (tau beta^2) with tau = g pi
    lhs = d.l * g * pi_interval() * (beta * beta)
    return certified_compare(lhs, 2 * cfg.slack) != Ordering.GT


def work_units(beta, cfg):
    cap = l_cap(beta, cfg)
    if cap > L_CAP_GUARD and not cfg.allow_large:
        raise GuardRefusal("rectangle cap %d exceeds %d; pass allow_large to override"
                           % (cap, L_CAP_GUARD))
    units = []
    for l in range(1, cap + 1):
        for d in enumerate_diagrams(l):
            if _diagram_allowed(d, beta, cfg):
                units.append(str(d))
    return cap, units


def _fingerprint(s, bracket, spectrum):
    data = [s.genus, list(s.profile.multipliers), s.gamma, format_scalar(bracket.beta),
            [format_scalar(w) for w in spectrum]]
    return json.dumps(data)


def evaluate_tvdata(tv, beta, cfg, provenance=None):
    """Build one surface and test it; returns (entry or None, diagnostic or None)."""
    label = str(tv)
    try:
        s = build_surface(tv, drop_marked=cfg.drop_marked)
    except FlatLattError as exc:
        return None, {"tvdata": tv.to_dict(), "stage": "build", "error": type(exc).__name__,
                      "message": str(exc)}
    # horizontal x vertical shortest connections already give a wedge
    quick = s.shortest_horizontal_pre() * s.shortest_vertical_pre() * s.wedge_factor
    if certified_compare(quick, beta) == Ordering.LT:
        return None, None
    L2 = cfg.L2
    try:
        conns = enumerate_saddle_connections(s, L2)
        vt = min_virtual_triangle(s, L2, conns)
    except InsufficientData as exc:
        return None, {"tvdata": tv.to_dict(), "stage": "spectrum", "error": "InsufficientData",
                      "message": str(exc)}
    except FlatLattError as exc:
        return None, {"tvdata": tv.to_dict(), "stage": "spectrum", "error": type(exc).__name__,
                      "message": str(exc)}
    if certified_compare(vt.value, beta) == Ordering.LT:
        return None, None
    br = alpha_bounds(s, L2, vt)
    spectrum = wedge_spectrum(s, L2, SPECTRUM_SIZE, conns)
    exact = br.exact
    entry = CatalogEntry(
        tvdata=tv.to_dict(),
        l=tv.l,
        genus=s.genus,
        profile=s.profile.as_dict(),
        tau_over_pi=s.gamma,
        beta=format_scalar(vt.value),
        beta_certified=vt.certified,
        alpha_lo=format_scalar(br.lo),
        alpha_hi=format_scalar(br.hi),
        alpha_exact=format_scalar(exact) if exact is not None else None,
        exact_surface=s.is_exact(),
        fingerprint=_fingerprint(s, br, spectrum),
        provenance=provenance or {"source": label},
    )
    return entry, None


def process_unit(unit, beta, cfg):
    """All retained entries and diagnostics of one (l, diagram) unit."""
    set_precision_cap(cfg.precision_cap)
    d = CylinderDiagram.parse(unit)
    cap = ratio_cap(beta, cfg.prune)
    r1, r2 = len(cycles(d.sigma_right)), len(cycles(d.sigma_up))
    seen = set()
    entries, diags = [], []
    pruned = 0
    for nh in twist_vectors(r1, cfg.max_twist):
        if not _ratios_ok(nh, cap):
            pruned += sum(1 for _ in twist_vectors(r2, cfg.max_twist))
            continue
        for nv in twist_vectors(r2, cfg.max_twist):
            if not _ratios_ok(nv, cap):
                pruned += 1
                continue
            tv = TVData(d, nh, nv).canonical()
            key = tv.to_json()
            if key in seen:
                continue
            seen.add(key)
            prov = {"diagram": unit, "nh": list(nh), "nv": list(nv), "prune": cfg.prune}
            entry, diag = evaluate_tvdata(tv, beta, cfg, prov)
            if entry is not None:
                entries.append(entry)
            if diag is not None:
                diags.append(diag)
    entries.sort(key=lambda e: e.sort_key)
    summary = {"unit": unit, "pruned_twist_pairs": pruned, "built": len(seen)}
    return unit, entries, diags, summary


def _run_unit(args):
    return process_unit(*args)


def _group(entries):
    groups = {}
    for e in entries:
        groups.setdefault(e.fingerprint, []).append(e)
    gid = 0
    for fp in sorted(groups):
        members = groups[fp]
        if len(members) > 1:
            for e in members:
                e.group = gid
            gid += 1
        else:
            members[0].group = None


def enumerate_candidates(beta, cfg=None, resume=None, progress=None):
    """Catalog of candidate surfaces with observed beta(M) >= beta.

    ``resume`` is a catalog (or path) from an earlier partial run with
    the same beta and configuration; its finished units are skipped.
    """
    cfg = cfg or RunConfig.default()
    beta = parse_scalar(beta) if isinstance(beta, str) else Fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    cap, units = work_units(beta, cfg)
    catalog = Catalog(beta=str(beta), config=cfg.fingerprint(), l_cap=cap)
    if resume is not None:
        prev = Catalog.load(resume) if isinstance(resume, str) else resume
        if prev.beta != catalog.beta or prev.config != catalog.config:
            raise ValueError("resume catalog was produced with different beta or configuration")
        catalog.entries = list(prev.entries)
        catalog.diagnostics = list(prev.diagnostics)
        catalog.units_done = list(prev.units_done)
    done = set(catalog.units_done)
    todo = [u for u in units if u not in done]
    args = [(u, beta, cfg) for u in todo]

    def absorb(result):
        unit, entries, diags, summary = result
        catalog.entries.extend(entries)
        catalog.diagnostics.extend(diags)
        catalog.units_done.append(unit)
        if progress:
            progress(summary)
        log.info("unit %s: %d built, %d retained", unit, summary["built"], len(entries))
        if cfg.out:
            _finalize(catalog, units)
            catalog.save(cfg.out)

    if cfg.workers == 1 or len(args) <= 1:
        for a in args:
            absorb(_run_unit(a))
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for result in pool.map(_run_unit, args):
                absorb(result)
    _finalize(catalog, units)
    if cfg.out:
        catalog.save(cfg.out)
    return catalog


def _finalize(catalog, units):
    order = {u: i for i, u in enumerate(units)}
    catalog.units_done.sort(key=lambda u: order.get(u, len(order)))
    catalog.entries.sort(key=lambda e: e.sort_key)
    catalog.diagnostics.sort(key=lambda d: json.dumps(d, sort_keys=True))
    _group(catalog.entries)


# ---------------------------------------------------------------------------
# comparison with the cardinality cap
# ---------------------------------------------------------------------------

TWIST_RATIO_NOTE = ("the stated twist-ratio cap pq <= 1/(64 beta^2) excludes surfaces whose "
                    "certified beta is at least beta; prune=safe uses pq <= 1/(4 beta^2)")


def compare_with_paper_bound(catalog, beta, safe_constants=False, reference=None,
                             raise_on_violation=True):
    """Check |catalog| against the cardinality cap.

    Returns a report.  When the cap is defined and exceeded a
    BoundViolation carrying the report is raised (unless disabled).  A
    ``reference`` catalog built without twist pruning lets the report
    list entries that the configured prune dropped.
    """
    beta = parse_scalar(beta) if isinstance(beta, str) else Fraction(beta)
    cc = cardinality_and_coarea(beta, safe_constants, include_coarea=False)
    report = {
        "beta": str(beta),
        "variant": cc.variant,
        "count": len(catalog),
        "cap": format_scalar(cc.cardinality) if cc.cardinality is not None else None,
        "findings": [],
    }
    if cc.cardinality is None:
        report["ok"] = None
        report["findings"].append("cardinality cap undefined: %s" % cc.errors.get("cardinality"))
    else:
        ok = certified_compare(len(catalog), cc.cardinality) != Ordering.GT
        report["ok"] = ok
        report["slack"] = format_scalar(cc.cardinality - len(catalog))
    if reference is not None:
        missing = sorted(reference.tvdata_keys() - catalog.tvdata_keys())
        certified_missing = [e.tvdata for e in reference.entries
                             if json.dumps(e.tvdata, sort_keys=True) in missing and e.beta_certified]
        report["missing_vs_reference"] = [json.loads(k) for k in missing]
        if certified_missing:
            report["findings"].append("%d certified entries missing: %s"
                                      % (len(certified_missing), TWIST_RATIO_NOTE))
    if report["ok"] is False and raise_on_violation:
        raise BoundViolation("catalog of %d entries exceeds cap %s" % (len(catalog), report["cap"]),
                             report)
    return report
