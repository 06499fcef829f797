"""
Outcomes of the axiom and condition checks.

A report serializes to::

    {"check": "...", "verdict": "...", "witness": {...}, "detail": {...}}
"""

from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
PASS_SAMPLED = "pass_sampled"
VERDICTS = (PASS, FAIL, PASS_SAMPLED)

EXHAUSTIVE = "exhaustive"
SAMPLED = "sampled"
CLOSED_FORM = "closed_form"


def to_json_value(value):
    """Convert numpy scalars and arrays (possibly nested) to plain JSON values."""
    if isinstance(value, dict):
        return {k: to_json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json_value(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_json_value(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def make_witness(space, points, values, relation, **extra):
    """
    Build the witness payload of a failed check.

    Args:
        space (FeltSpace): the space the points belong to
        points (list): the offending points
        values (list of float): the distances exhibiting the violation
        relation (str): human readable description of the violated relation
    """
    witness = {
        "points": [space.point_to_json(p) for p in points],
        "values": [float(v) for v in values],
        "relation": relation,
    }
    if space.is_finite:
        witness["labels"] = [space.format_point(p) for p in points]
    witness.update(to_json_value(extra))
    return witness


@dataclass
class CheckReport:
    """
    Outcome of an axiom or condition check.

    `verdict` is FAIL only together with a witness; PASS on a finite space
    means an exhaustive scan completed, PASS_SAMPLED is reserved for
    continuous spaces.
    """
    check_name: str
    verdict: str
    witness: dict = None
    detail: dict = field(default_factory=dict)
    # ModulusProfile certifying a contraction condition, if any
    profile: object = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError("unknown verdict {!r}".format(self.verdict))
        if self.verdict == FAIL and self.witness is None:
            raise ValueError("a failed check needs a witness")

    @property
    def passed(self):
        return self.verdict != FAIL

    def to_dict(self):
        detail = to_json_value(self.detail)
        if self.profile is not None:
            detail = dict(detail, profile=self.profile.to_dict())
        return {
            "check": self.check_name,
            "verdict": self.verdict,
            "witness": self.witness,
            "detail": detail,
        }

    def __str__(self):
        line = "{:<5} {}".format("FAIL" if self.verdict == FAIL else "PASS", self.check_name)
        if self.verdict == PASS_SAMPLED:
            line += " (sampled)"
        if self.witness is not None:
            line += ": {} points={} values={}".format(
                self.witness["relation"],
                self.witness.get("labels", self.witness["points"]),
                self.witness["values"])
        return line


@dataclass(frozen=True)
class DeltaCertificate:
    """
    A delta certifying the felt continuity condition for one epsilon.

    With scope EXHAUSTIVE every triple (x, y, z) of the finite space with
    p(z, y) < delta satisfies |p(z, x) - p(y, x)| < epsilon.
    """
    epsilon: float
    delta: float
    scope: str

    def to_dict(self):
        return {"epsilon": self.epsilon, "delta": self.delta, "scope": self.scope}
