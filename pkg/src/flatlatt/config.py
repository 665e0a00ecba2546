"""Run configuration shared by the CLI and the enumeration pipeline."""

import json
from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction

from .numeric import DEFAULT_PRECISION_CAP, parse_length_squared, parse_scalar, precision_cap

PRUNE_MODES = ("strict", "safe", "off")


def parse_prune(text):
    """Validate a prune mode: strict, safe, off or relaxed:K."""
    text = str(text).strip()
    if text in PRUNE_MODES:
        return text
    if text.startswith("relaxed:"):
        factor = parse_scalar(text.split(":", 1)[1])
        if factor <= 0:
            raise ValueError("relaxation factor must be positive")
        return "relaxed:%s" % factor
    raise ValueError("unknown prune mode %r (use strict, relaxed:K, safe or off)" % text)


@dataclass(frozen=True)
class RunConfig:
    precision_cap: int = DEFAULT_PRECISION_CAP
    safe_constants: bool = False
    prune: str = "safe"
    scan_length: str = "3"
    slack: Fraction = Fraction(1)
    workers: int = 1
    out: str = None
    max_twist: int = 3
    drop_marked: bool = False
    l_cap_mode: str = "standard"
    allow_large: bool = False

    def __post_init__(self):
        if self.precision_cap < 64:
            raise ValueError("precision cap must be at least 64 bits")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if self.max_twist < 1:
            raise ValueError("max_twist must be at least 1")
        if self.l_cap_mode not in ("standard", "coarea"):
            raise ValueError("l_cap_mode must be standard or coarea")
        object.__setattr__(self, "prune", parse_prune(self.prune))
        object.__setattr__(self, "slack", Fraction(self.slack))
        if self.slack <= 0:
            raise ValueError("slack must be positive")
        self.L2  # validates the scan length

    @property
    def L2(self):
        """Squared scan length."""
        return parse_length_squared(self.scan_length)

    @classmethod
    def default(cls):
        return cls(precision_cap=precision_cap())

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        data = dict(data)
        if "slack" in data:
            data["slack"] = parse_scalar(data["slack"])
        if "scan_length" in data:
            data["scan_length"] = str(data["scan_length"])
        return cls(**data)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def with_(self, **kw):
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_dict(self):
        d = asdict(self)
        d["slack"] = str(self.slack)
        return d

    def fingerprint(self):
        """Settings that affect results; worker count and paths are excluded."""
        d = self.to_dict()
        for k in ("workers", "out", "precision_cap"):
            d.pop(k)
        return d
