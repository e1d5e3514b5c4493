"""Run configuration: one JSON object per run, validated exhaustively."""

import json
from dataclasses import dataclass, field

import numpy as np

from . import tolerances
from .errors import ParseError, ValidationError


@dataclass
class RunConfig:
    n: int
    sphere_weights: list
    action_weights: list
    mu: list | None
    samples: int
    seed: int
    tol: dict
    lam: list | None = None
    flow_steps: int = 512
    directions: int = 2
    workers: int = 1
    preset: str | None = None
    description: str = ""

    @property
    def d(self):
        return len(self.action_weights)

    @property
    def is_round(self):
        return all(abs(w - 1.0) < 1e-15 for w in self.sphere_weights)

    def echo(self):
        return {
            "n": self.n,
            "sphere_weights": list(self.sphere_weights),
            "action_weights": [list(r) for r in self.action_weights],
            "mu": None if self.mu is None else list(self.mu),
            "samples": self.samples,
            "seed": self.seed,
            "lam": None if self.lam is None else list(self.lam),
            "flow_steps": self.flow_steps,
            "directions": self.directions,
            "preset": self.preset,
            "description": self.description,
            "tolerances": dict(sorted(self.tol.items())),
        }


def load_config(path):
    """Parse and validate a JSON config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError([f"config: cannot read {path}: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise ParseError([f"config: invalid JSON in {path}: {exc}"]) from exc
    if not isinstance(raw, dict):
        raise ParseError(["config: top level must be a JSON object"])
    return build_config(raw)


def build_config(raw, command=None):
    """Validate a raw dict; every violation is reported, not just the first."""
    errors = []

    def get_int(name, default, minimum):
        v = raw.get(name, default)
        if not isinstance(v, (int, np.integer)) or isinstance(v, bool):
            errors.append(f"{name}: expected integer, got {v!r}")
            return default
        if v < minimum:
            errors.append(f"{name}: must be >= {minimum}, got {v}")
        return int(v)

    n = get_int("n", 4, 2)
    samples = get_int("samples", 100, 1)
    seed = get_int("seed", 0, 0)
    flow_steps = get_int("flow_steps", 512, 64)
    directions = get_int("directions", 2, 1)
    workers = get_int("workers", 1, 1)

    sw = raw.get("sphere_weights", [1.0] * n)
    try:
        sw = [float(x) for x in sw]
    except (TypeError, ValueError):
        errors.append(f"sphere_weights: expected numbers, got {sw!r}")
        sw = [1.0] * n
    if len(sw) != n:
        errors.append(f"sphere_weights: expected {n} entries, got {len(sw)}")
    if any(x <= 0 for x in sw):
        errors.append("sphere_weights: entries must be strictly positive")
    if any(a > b for a, b in zip(sw, sw[1:])):
        errors.append("sphere_weights: entries must be nondecreasing")

    aw = raw.get("action_weights")
    if aw is None:
        errors.append("action_weights: required")
        aw = [[0.0] * n]
    else:
        try:
            aw = [[float(x) for x in row] for row in aw]
        except (TypeError, ValueError):
            errors.append(f"action_weights: expected a matrix, got {aw!r}")
            aw = [[0.0] * n]
        if len(aw) < 1:
            errors.append("action_weights: need at least one row (d >= 1)")
        if any(len(row) != n for row in aw):
            errors.append(f"action_weights: every row must have n = {n} entries")

    mu = raw.get("mu")
    if mu is not None:
        try:
            mu = [float(x) for x in mu]
        except (TypeError, ValueError):
            errors.append(f"mu: expected numbers, got {mu!r}")
            mu = None
    needs_mu = command in ("check-hypotheses", "reduce", "curvature-scan", "cone-check")
    if needs_mu:
        if mu is None:
            errors.append(f"mu: required for command {command!r}")
        elif all(x == 0.0 for x in mu):
            errors.append("mu: must not be all zero for ray reduction")
    if mu is not None and len(aw) and len(mu) != len(aw):
        errors.append(f"mu: expected {len(aw)} entries to match d, got {len(mu)}")

    lam = raw.get("lam")
    if lam is not None:
        try:
            lam = [float(x) for x in lam]
        except (TypeError, ValueError):
            errors.append(f"lam: expected numbers, got {lam!r}")
            lam = None

    tol = dict(tolerances.DEFAULTS)
    overrides = raw.get("tolerances", {})
    if not isinstance(overrides, dict):
        errors.append("tolerances: expected a name -> value map")
    else:
        for k, v in overrides.items():
            if k not in tol:
                errors.append(f"tolerances.{k}: unknown tolerance name")
            else:
                tol[k] = float(v)

    known = {
        "n", "sphere_weights", "action_weights", "mu", "samples", "seed",
        "tolerances", "lam", "flow_steps", "directions", "workers",
        "preset", "description",
    }
    for k in raw:
        if k not in known:
            errors.append(f"{k}: unknown field")

    if errors:
        raise ValidationError(errors)
    return RunConfig(
        n=n, sphere_weights=sw, action_weights=aw, mu=mu, samples=samples,
        seed=seed, tol=tol, lam=lam, flow_steps=flow_steps,
        directions=directions, workers=workers,
        preset=raw.get("preset"), description=raw.get("description", ""),
    )
