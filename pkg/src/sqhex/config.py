"""Run configuration read from a TOML file.

Example::

    [lattice]
    N = 60
    segments = [[0.0, 0.5], [1.0, 1.5]]   # or Omega = [...], or staircase = 2
    a_pattern = [1]

    [weights]
    x = [1.0]
    y = {}                                # keys are row indices inside one period

    [run]
    seed = 1
    samples = 10
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ValidationError
from .lattice import LatticeSpec, PeriodicWeights
from .limitshape import BoundaryMeasureSpec


@dataclass
class RunConfig:
    spec: LatticeSpec
    boundary: BoundaryMeasureSpec
    staircase: int | None = None
    run: dict[str, Any] = field(default_factory=dict)


def parse_weights(d: dict[str, Any], a_pattern: list[int]) -> PeriodicWeights:
    n = len(a_pattern)
    x = tuple(float(v) for v in d.get("x", [1.0] * n))
    raw_y = d.get("y")
    if raw_y is None:
        y = {i + 1: 1.0 for i, a in enumerate(a_pattern) if a == 0}
    else:
        y = {int(k): float(v) for k, v in raw_y.items()}
    return PeriodicWeights(x=x, y=y)


def from_dict(d: dict[str, Any]) -> RunConfig:
    lat = d.get("lattice")
    if not isinstance(lat, dict):
        raise ValidationError("config needs a [lattice] table")
    try:
        N = int(lat["N"])
    except KeyError:
        raise ValidationError("lattice.N is required") from None
    a_pattern = [int(v) for v in lat.get("a_pattern", [1])]
    weights = parse_weights(d.get("weights", {}), a_pattern)
    given = [k for k in ("Omega", "segments", "staircase") if k in lat]
    if len(given) != 1:
        raise ValidationError("give exactly one of lattice.Omega, lattice.segments, lattice.staircase")
    M = None
    if "Omega" in lat:
        spec = LatticeSpec(N, tuple(int(v) for v in lat["Omega"]), tuple(a_pattern), weights)
        boundary = BoundaryMeasureSpec.from_omega(spec.Omega)
    elif "segments" in lat:
        segs = [(float(a), float(b)) for a, b in lat["segments"]]
        spec = LatticeSpec.from_segments(N, segs, a_pattern, weights)
        boundary = BoundaryMeasureSpec(tuple(segs))
    else:
        M = int(lat["staircase"])
        if M < 1:
            raise ValidationError("lattice.staircase must be at least 1")
        spec = LatticeSpec.staircase(N, M, a_pattern, weights)
        boundary = BoundaryMeasureSpec.staircase(M)
    return RunConfig(spec, boundary, M, dict(d.get("run", {})))


def load(path: str | Path) -> RunConfig:
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ValidationError(f"cannot parse {path}: {exc}") from None
    return from_dict(data)
