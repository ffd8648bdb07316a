"""Experiment configuration: one JSON document per run.

Example::

    {
      "ensemble": {"N": 512, "offdiag": {"family": "rademacher_gauss", "a": 0.8, "sigma": 0.6}},
      "interval": [-1.0, 1.0],
      "functions": [{"type": "bump", "center": 0.0, "halfwidth": 0.3}],
      "replicas": 4000,
      "seed": 20240601,
      "options": {"n_max": 512, "K_max": 64, "r": 0.5, "k_range": [2, 32]}
    }

The diagonal law is derived from the off-diagonal one unless given
explicitly under ``ensemble.diag``.
"""

import json
from dataclasses import dataclass, field

from .ensemble import EnsembleSpec, make_distribution, matched_diagonal, validate_assumption
from .testfn import Interval, dirichlet_modes, from_config


class ConfigError(ValueError):
    pass


DEFAULT_SEED = 20240601


def _distribution(entry, default_variance):
    entry = dict(entry)
    family = entry.pop("family")
    variance = entry.pop("variance", default_variance)
    return make_distribution(family, entry, variance)


@dataclass
class ExperimentConfig:
    raw: dict
    spec: EnsembleSpec
    interval: Interval
    functions: list
    replicas: int
    seed: int
    options: dict = field(default_factory=dict)
    output_dir: str = "out"
    threads: int = None

    def option(self, name, default=None):
        return self.options.get(name, default)

    def dirichlet(self, K=None):
        return dirichlet_modes(K or int(self.option("K_max", 64)), self.interval)

    def to_dict(self):
        out = dict(self.raw)
        out["seed"] = self.seed
        out["ensemble_resolved"] = self.spec.to_dict()
        out["functions_resolved"] = [fn.to_dict() for fn in self.functions]
        return out


def parse_config(raw, seed=None, output_dir=None, threads=None):
    """Validate a config mapping; raises ConfigError on any defect."""
    try:
        ens = raw.get("ensemble", {"N": 512, "offdiag": {"family": "gaussian"}})
        offdiag = _distribution(ens.get("offdiag", {"family": "gaussian"}), 1.0)
        diag = _distribution(ens["diag"], 2.0) if "diag" in ens else matched_diagonal(offdiag)
        spec = EnsembleSpec(int(ens.get("N", 512)), offdiag, diag)
        a, b = raw.get("interval", [-1.0, 1.0])
        interval = Interval(float(a), float(b))
        functions = [from_config(e, interval) for e in raw.get("functions", [])]
        replicas = int(raw.get("replicas", 2))
        chosen_seed = seed if seed is not None else raw.get("seed", DEFAULT_SEED)
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    report = validate_assumption(spec)
    if not report.passed:
        raise ConfigError("ensemble violates the entry assumptions: " + "; ".join(report.failures))
    if replicas < 2:
        raise ConfigError("replicas must be at least 2")
    if not 0 <= int(chosen_seed) < 2 ** 64:
        raise ConfigError("seed must be a 64-bit unsigned integer")
    return ExperimentConfig(
        raw=dict(raw),
        spec=spec,
        interval=interval,
        functions=functions,
        replicas=replicas,
        seed=int(chosen_seed),
        options=dict(raw.get("options", {})),
        output_dir=output_dir or raw.get("output_dir", "out"),
        threads=threads if threads is not None else raw.get("threads"),
    )


def load_config(path, **overrides):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(raw, **overrides)
