"""Experiment configuration: TOML with ``instance``, ``instance.noise``,
``instance.inventory``, ``policy`` and ``run`` tables.

Every key is checked against a fixed schema so that a typo fails loudly rather
than silently falling back to a default.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .inventory import InventoryGenerator
from .market import ProblemInstance, validate_instance
from .noise import make_noise
from .policies import C20CB, ExploreThenCommit, OraclePolicy, UCBGrid, stage1_length
from .policies.schedule import ConstantSchedule

MIN_HORIZON = 64
POLICY_NAMES = ("c20cb", "etc", "ucb", "oracle")
TRACE_LEVELS = ("summary", "per-round")

_INSTANCE_KEYS = {"a", "b", "a_max", "b_min", "b_max", "c", "p_max", "gamma_min"}
_SCHEMA = {
    "instance": _INSTANCE_KEYS,
    "instance.noise": {"kind", "sigma"},
    "instance.inventory": {"kind", "lo", "hi", "level", "period", "epoch", "growth", "jitter", "path"},
    "policy": {"name", "delta", "eta", "L_F", "scale", "scale_n", "cb_variant", "gamma0_variant",
               "window", "arms", "bonus"},
    "run": {"T", "seeds", "seed_base", "seed_count", "out", "trace", "workers", "max_failed_fraction"},
}


class ConfigError(ValueError):
    """Malformed configuration: unknown key, missing field or out-of-range value."""


def _flatten(table: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in table.items():
        name = f"{prefix}.{key}" if prefix else key
        if isinstance(value, dict):
            out.update(_flatten(value, name))
        else:
            out[name] = value
    return out


def _check_keys(flat: dict) -> None:
    unknown = []
    for name in flat:
        section, _, key = name.rpartition(".")
        if key not in _SCHEMA.get(section, ()):
            unknown.append(name)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class PolicySpec:
    name: str = "c20cb"
    delta: float = 0.05
    eta: float | None = None
    L_F: float | None = None
    scale: float = 1.0
    scale_n: float = 1.0
    cb_variant: str = "appendix"
    gamma0_variant: bool = False
    window: int | None = None  # ETC; defaults to tau for the horizon
    arms: int | None = None  # UCB; defaults to ceil(T^(1/3))
    bonus: float = 1.0

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ConfigError(f"unknown policy {self.name!r}; expected one of {POLICY_NAMES}")


@dataclass(frozen=True)
class ExperimentConfig:
    instance: ProblemInstance
    policy: PolicySpec
    T: int
    seeds: tuple
    out: str | None = None
    trace: str = "summary"
    workers: int = 1
    max_failed_fraction: float = 0.1
    source: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if int(self.T) < MIN_HORIZON:
            raise ConfigError(f"run.T={self.T} is below the minimum horizon {MIN_HORIZON}")
        if not self.seeds:
            raise ConfigError("run.seeds is empty")
        if self.trace not in TRACE_LEVELS:
            raise ConfigError(f"run.trace must be one of {TRACE_LEVELS}")
        if self.workers < 1:
            raise ConfigError("run.workers must be >= 1")
        if not 0.0 <= self.max_failed_fraction <= 1.0:
            raise ConfigError("run.max_failed_fraction must lie in [0, 1]")

    def with_horizon(self, T: int) -> "ExperimentConfig":
        return replace(self, T=int(T))

    def with_seeds(self, seeds) -> "ExperimentConfig":
        return replace(self, seeds=tuple(int(s) for s in seeds))

    def with_policy(self, **changes) -> "ExperimentConfig":
        return replace(self, policy=replace(self.policy, **changes))

    def validation(self):
        return validate_instance(self.instance)

    def schedule(self) -> ConstantSchedule:
        p = self.policy
        return ConstantSchedule.build(self.instance.known_bounds(), self.T, delta=p.delta, eta=p.eta,
                                      L_F=p.L_F, scale=p.scale, scale_n=p.scale_n, cb_variant=p.cb_variant)

    def build_policy(self, seed: int):
        p, bounds = self.policy, self.instance.known_bounds()
        if p.name == "c20cb":
            return C20CB(bounds, self.T, seed, delta=p.delta, eta=p.eta, L_F=p.L_F, scale=p.scale,
                         scale_n=p.scale_n, cb_variant=p.cb_variant, gamma0_variant=p.gamma0_variant)
        if p.name == "etc":
            return ExploreThenCommit(bounds, p.window or stage1_length(self.T), seed)
        if p.name == "ucb":
            arms = p.arms or math.ceil(self.T ** (1 / 3))
            return UCBGrid(bounds, arms, p.bonus)
        return OraclePolicy(self.instance)


def _pop_section(flat: dict, section: str) -> dict:
    prefix = section + "."
    return {k[len(prefix):]: v for k, v in flat.items() if k.startswith(prefix) and "." not in k[len(prefix):]}


def _require(values: dict, keys, section: str) -> None:
    missing = sorted(set(keys) - set(values))
    if missing:
        raise ConfigError(f"missing keys in [{section}]: {', '.join(missing)}")


def config_from_dict(data: dict, base_dir: Path | str = ".") -> ExperimentConfig:
    flat = _flatten(data)
    _check_keys(flat)
    inst = _pop_section(flat, "instance")
    _require(inst, _INSTANCE_KEYS, "instance")
    inst = {k: float(v) for k, v in inst.items()}

    noise_opts = _pop_section(flat, "instance.noise")
    kind = noise_opts.pop("kind", "uniform")
    try:
        noise = make_noise(kind, inst["c"], **noise_opts)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"[instance.noise]: {exc}") from exc

    inv = _pop_section(flat, "instance.inventory")
    inv.setdefault("kind", "iid-uniform-in-band")
    if inv["kind"] != "replay-from-file":
        _require(inv, ("lo", "hi"), "instance.inventory")
    if "path" in inv:
        inv["path"] = str((Path(base_dir) / inv["path"]).resolve())
    inv.setdefault("lo", None)
    inv.setdefault("hi", None)
    try:
        inventory = InventoryGenerator(**inv)
        instance = ProblemInstance(**inst, noise=noise, inventory=inventory)
        policy = PolicySpec(**_pop_section(flat, "policy"))
    except (ValueError, TypeError, OSError) as exc:
        raise ConfigError(str(exc)) from exc

    run = _pop_section(flat, "run")
    _require(run, ("T",), "run")
    if "seeds" in run and ("seed_base" in run or "seed_count" in run):
        raise ConfigError("give either run.seeds or run.seed_base/seed_count, not both")
    if "seeds" in run:
        seeds = tuple(int(s) for s in run.pop("seeds"))
    else:
        base, count = int(run.pop("seed_base", 1)), int(run.pop("seed_count", 1))
        seeds = tuple(range(base, base + count))
    return ExperimentConfig(instance, policy, int(run.pop("T")), seeds, source=data, **run)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data, base_dir=path.parent)


def parse_seeds(text: str) -> tuple:
    """``"1..20"`` (inclusive) or ``"3,5,8"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split(".."))
        if hi < lo:
            raise ConfigError(f"empty seed range {text!r}")
        return tuple(range(lo, hi + 1))
    return tuple(int(x) for x in text.split(",") if x.strip())
