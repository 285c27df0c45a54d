"""Built-in example groups with calibrated enumeration radii."""

from __future__ import annotations

import math
import os

from .geometry import Isometry
from .groups import FuchsianGroup, Generator, GroupError, parse_group_file

__all__ = [
    "schottky_group",
    "cusped_group",
    "unit_parabolic_group",
    "resolve_group",
    "BUILTIN_NAMES",
    "EXPONENT_RADIUS",
    "PATTERSON_RADIUS",
    "DEFECT_LADDER",
    "EXPERIMENT_PERIODS",
    "DEFAULT_BUMPS",
    "RATIO_BUMPS",
    "BUMP_WIDTHS",
    "MIXING_LEAF_COORDINATE",
    "NONDIV_HEIGHT",
    "EQUIDIST_RADII",
    "MIXING_TIMES",
    "KNOWN_EXPONENTS",
    "builtin_name",
]


def _interval_pair(label: str, center: float, radius: float, kind: str = "hyperbolic"):
    """Letter pairing the boundary intervals [c-r, c+r] and [-c-r, -c+r].

    The matrix [[c/r, (c^2-r^2)/r], [1/r, c/r]] sends the exterior of the
    mirror interval's half-disk onto the interior over [c-r, c+r].
    """
    m = Isometry(center / radius, (center * center - radius * radius) / radius,
                 1.0 / radius, center / radius)
    return [
        Generator(label, m, kind, (center - radius, center + radius)),
        Generator(label.swapcase(), m.inverse(), kind, (-center - radius, -center + radius)),
    ]


def schottky_group() -> FuchsianGroup:
    """Free rank-two group of two interval pairings, no cusps.

    Growth exponent near 0.433; counting to radius 20 costs about 25k words.
    """
    return FuchsianGroup(
        _interval_pair("a", 2.0, 1.0) + _interval_pair("b", 5.0, 1.5),
        name="schottky",
    )


def cusped_group() -> FuchsianGroup:
    """Rank-two group with one cusp: a parabolic pair tangent at 0 plus an
    interval pairing. Growth exponent near 0.647.
    """
    par = Isometry(1.0, 0.0, -4.0, 1.0)
    letters = [
        Generator("p", par, "parabolic", (-0.5, 0.0)),
        Generator("P", par.inverse(), "parabolic", (0.0, 0.5)),
    ]
    return FuchsianGroup(letters + _interval_pair("b", 1.5, 0.7), name="cusped")


def unit_parabolic_group() -> FuchsianGroup:
    """Cyclic group of one unit parabolic, fixed point 0.

    Conjugate to the integer translation group with the conjugacy fixing the
    base point, so orbit counts match the horizontal shift exactly and the
    growth exponent is 1/2.
    """
    par = Isometry(1.0, 0.0, -1.0, 1.0)
    return FuchsianGroup(
        [
            Generator("p", par, "parabolic", (-2.0, 0.0)),
            Generator("P", par.inverse(), "parabolic", (0.0, 2.0)),
        ],
        name="unit-parabolic",
    )


BUILTIN_NAMES = ("schottky", "cusped", "unit-parabolic")

# counting radii giving >= 1000 orbit points at modest enumeration cost
EXPONENT_RADIUS = {"schottky": 20.0, "cusped": 14.0, "unit-parabolic": 30.0}

# displacement prune for boundary-measure construction at word cutoff 14.
# The schottky radius is deep on purpose: the equidistribution experiments
# restrict to horocycle balls and need fine atom resolution near the leaf's
# backward point.
PATTERSON_RADIUS = {"schottky": 22.0, "cusped": 14.0, "unit-parabolic": 16.0}

# (cutoff, radius) ladder for the conformality-defect trend: the radius grows
# with the cutoff so the extra word length actually adds atoms instead of
# being swallowed by the displacement prune.
DEFECT_LADDER = {
    "schottky": ((10, 14.0), (12, 16.0), (14, 18.0)),
    "cusped": ((10, 10.0), (12, 11.0), (14, 12.0)),
}

# long mixed periods give limit points off every short closed geodesic, so
# the horocycle leaf through them wanders early instead of tracing one axis
EXPERIMENT_PERIODS = {
    "schottky": (
        ("a", "b", "A", "b", "a", "B", "a", "b"),
        ("B", "A", "b", "A", "B", "a", "B", "A"),
    ),
    "cusped": (
        ("b", "p", "B", "p", "b", "P", "b", "p"),
        ("B", "P", "b", "P", "B", "p", "B", "P"),
    ),
}

# calibrated bump centers (x, y, angle); ball averages at e^2..e^6 settle
# within a fifth of the quadrature value for these
DEFAULT_BUMPS = {
    "schottky": (
        (0.0, 1.4, 0.0),
        (0.0, 1.7, 1.57),
        (3.25, 0.6, 0.0),
    ),
    "cusped": (
        (-2.4, math.exp(-0.9), -5.0 * math.pi / 8.0),
        (-2.8, math.exp(-0.6), -5.0 * math.pi / 8.0),
    ),
}

# numerator / denominator pair for the arc-length ratio experiment
RATIO_BUMPS = DEFAULT_BUMPS["cusped"]

BUMP_WIDTHS = (1.2, 1.8)

# starting leaf coordinate for the mixing run: the unit ball flowed to t = 6
# then covers the same comb window as the e^6 equidistribution ball
MIXING_LEAF_COORDINATE = -6.0

# cusp-height cap for the non-divergence experiment (compact mass >= 0.8)
NONDIV_HEIGHT = 6.0

EQUIDIST_RADII = (math.e ** 2, math.e ** 4, math.e ** 6)

MIXING_TIMES = tuple(0.5 * k for k in range(13))

# growth rates of the shipped groups at the radii above, as measured by the
# exponent experiment; the rank-one parabolic value is exact. These seed the
# boundary-measure commands so a plain run needs no counting pass first.
KNOWN_EXPONENTS = {
    "schottky": 0.4322791205538202,
    "cusped": 0.646822563859683,
    "unit-parabolic": 0.5,
}


def builtin_name(spec: str) -> str | None:
    """The builtin key a group spec refers to, or None for file paths."""
    name = spec[len("builtin:"):] if spec.startswith("builtin:") else spec
    return name if name in BUILTIN_NAMES else None


def resolve_group(spec: str) -> FuchsianGroup:
    """Group from 'builtin:<name>', a bare builtin name, or a definition file path."""
    name = spec[len("builtin:"):] if spec.startswith("builtin:") else spec
    if name == "schottky":
        return schottky_group()
    if name == "cusped":
        return cusped_group()
    if name == "unit-parabolic":
        return unit_parabolic_group()
    if spec.startswith("builtin:"):
        raise GroupError("unknown builtin group %r; have %s" % (name, ", ".join(BUILTIN_NAMES)))
    if os.path.exists(spec):
        return parse_group_file(spec)
    raise GroupError("no builtin group or file named %r" % spec)
