"""Run-wide tunables.

Every numeric policy knob lives here so that command-line flags, environment
overrides, and tests all draw from one place.  Nothing in the package reads
ambient entropy: randomized procedures take an explicit seed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Config:
    # sampling window for eventual-truth verdicts
    horizon: int = 64
    # numeric-tier magnitude heuristics (window = [1, horizon])
    infinitesimal_tol: float = 1e-9      # |value| below this on the last quarter
    growth_ratio: float = 2.0            # sustained |v[i+1]/v[i]| above this => infinite
    bounded_cap: float = 1e9             # window max below this => bounded evidence
    # power-series display / comparison order
    order: int = 12
    # polydisc radius for sampling and quadrature
    radius: int = 1
    # sample count for the evaluation oracle
    samples: int = 128
    # root finding (univariate, per materialized index)
    dk_iterations: int = 200
    dk_tol: float = 1e-12
    # quadrature slack for coefficient recovery checks
    quadrature_slack: float = 1e-8
    # generic float tolerance for reports
    tol: float = 1e-9
    seed: int = 0

    def with_overrides(self, **kw) -> "Config":
        return replace(self, **kw)


def default_config() -> Config:
    """Config with the stock horizon, honouring HYPERPOLY_HORIZON if set."""
    env = os.environ.get("HYPERPOLY_HORIZON")
    if env is not None:
        try:
            h = int(env)
        except ValueError:
            raise ValueError(f"HYPERPOLY_HORIZON must be an integer, got {env!r}")
        if h < 1:
            raise ValueError("HYPERPOLY_HORIZON must be >= 1")
        return Config(horizon=h)
    return Config()


DEFAULT = Config()
