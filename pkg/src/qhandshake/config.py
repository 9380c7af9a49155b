"""Run configuration: a flat key = value file format with list support.

Every key has a documented default, so an empty file is a valid config.
Unknown keys are hard errors rather than silent typos. Error categories map
to distinct process exit codes: 2 generic config error (including an unknown
experiment name), 3 missing file, 4 unknown key, 5 out-of-range value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

__all__ = [
    "ConfigError",
    "MissingConfigFileError",
    "UnknownKeyError",
    "OutOfRangeError",
    "RunConfig",
    "parse_config",
    "EXPERIMENTS",
    "DEFAULT_TRIALS",
]

EXPERIMENTS = ("born", "sites", "zeno", "htheorem", "frontier")

DEFAULT_TRIALS = {
    "born": 100_000,
    "sites": 10_000,
    "zeno": 100_000,
    "htheorem": 20,
    "frontier": 20,
}


class ConfigError(Exception):
    exit_code = 2


class MissingConfigFileError(ConfigError):
    exit_code = 3


class UnknownKeyError(ConfigError):
    exit_code = 4


class OutOfRangeError(ConfigError):
    exit_code = 5


@dataclass
class RunConfig:
    """All experiment knobs. `trials` means events for born/sites, trials per
    N for zeno, and independent seeded runs for htheorem/frontier; "auto"
    picks the experiment's documented default."""

    experiment: str = "born"
    seed: int = 7
    trials: object = "auto"
    outdir: str = "out"

    # medium
    beta: float = 1.0
    omega: float = 0.0
    eta: float = 0.0
    eta_divergence: float = 0.5

    # handshake
    reinforce_r: float = 2.0
    epsilon: float = 1e-3

    # scenario geometry
    emitter_site: int = 0
    emitter_tick: int = 0
    amp_re: float = 1.0
    amp_im: float = 0.0
    offer_energy: int = 1
    offer_momentum: int = 0
    offer_spin: int = 0
    absorber_sites: list = field(default_factory=lambda: [1, -1])
    absorber_ticks: list = field(default_factory=lambda: [1, 1])
    absorber_efficiencies: list = field(default_factory=lambda: [0.25, 0.75])

    # gas
    gas_n: int = 1000
    gas_steps: int = 10_000

    # zeno
    zeno_theta_total: float = math.pi / 2.0
    zeno_n_list: list = field(default_factory=lambda: [1, 3, 64, 1024])

    # frontier
    frontier_sites: int = 64
    frontier_max_stack: int = 3

    # keys explicitly present in the parsed file or set by CLI flags
    provided: frozenset = frozenset()

    def resolved_trials(self) -> int:
        if self.trials == "auto":
            return DEFAULT_TRIALS[self.experiment]
        return int(self.trials)

    def was_provided(self, key: str) -> bool:
        return key in self.provided

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            if f.name == "provided":
                continue
            out[f.name] = getattr(self, f.name)
        return out

    def validate(self) -> None:
        def bad(key: str, why: str) -> OutOfRangeError:
            return OutOfRangeError(f"config key '{key}': {why}")

        if not isinstance(self.seed, int) or not (0 <= self.seed < (1 << 64)):
            raise bad("seed", f"{self.seed!r} is not an unsigned 64-bit integer")
        if self.trials != "auto":
            if not isinstance(self.trials, int) or self.trials < 1:
                raise bad("trials", f"{self.trials!r} must be 'auto' or an integer >= 1")
        if not (0.0 < self.beta <= 1.0):
            raise bad("beta", f"{self.beta} not in (0, 1]")
        if not math.isfinite(self.omega):
            raise bad("omega", "must be finite")
        if self.eta < 0.0:
            raise bad("eta", f"{self.eta} must be >= 0")
        if self.eta_divergence < 0.0:
            raise bad("eta_divergence", f"{self.eta_divergence} must be >= 0")
        if not self.reinforce_r > 1.0:
            raise bad("reinforce_r", f"{self.reinforce_r} must be > 1")
        if not (0.0 < self.epsilon < 1.0):
            raise bad("epsilon", f"{self.epsilon} not in (0, 1)")
        lengths = {
            len(self.absorber_sites),
            len(self.absorber_ticks),
            len(self.absorber_efficiencies),
        }
        if len(lengths) != 1:
            raise bad("absorber_sites", "absorber_* lists must have equal lengths")
        for eff in self.absorber_efficiencies:
            if not (0.0 <= eff <= 1.0):
                raise bad("absorber_efficiencies", f"{eff} not in [0, 1]")
        if self.gas_n < 100:
            raise bad("gas_n", f"{self.gas_n} must be >= 100")
        if self.gas_steps < 0:
            raise bad("gas_steps", "must be >= 0")
        if not (0.0 < self.zeno_theta_total and math.isfinite(self.zeno_theta_total)):
            raise bad("zeno_theta_total", "must be finite and > 0")
        if not self.zeno_n_list or any(
            (not isinstance(n, int)) or n < 1 for n in self.zeno_n_list
        ):
            raise bad("zeno_n_list", "must be a nonempty list of integers >= 1")
        n = self.frontier_sites
        if n < 8 or (n & (n - 1)) != 0:
            raise bad("frontier_sites", f"{n} must be a power of two >= 8")
        if not (0 <= self.frontier_max_stack <= (n - 6) // 2):
            raise bad("frontier_max_stack", f"{self.frontier_max_stack} out of range for the grid")


_INT_KEYS = {
    "seed",
    "emitter_site",
    "emitter_tick",
    "offer_energy",
    "offer_momentum",
    "offer_spin",
    "gas_n",
    "gas_steps",
    "frontier_sites",
    "frontier_max_stack",
}
_FLOAT_KEYS = {
    "beta",
    "omega",
    "eta",
    "eta_divergence",
    "reinforce_r",
    "epsilon",
    "amp_re",
    "amp_im",
    "zeno_theta_total",
}
_STR_KEYS = {"experiment", "outdir"}
_INT_LIST_KEYS = {"absorber_sites", "absorber_ticks", "zeno_n_list"}
_FLOAT_LIST_KEYS = {"absorber_efficiencies"}


def _parse_scalar(token: str, lineno: int):
    token = token.strip()
    if token.startswith(("'", '"')) and token.endswith(token[0]) and len(token) >= 2:
        return token[1:-1]
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        pass
    if token == "":
        raise ConfigError(f"line {lineno}: empty value")
    return token


def _parse_value(raw: str, lineno: int):
    raw = raw.strip()
    if raw.startswith("["):
        if not raw.endswith("]"):
            raise ConfigError(f"line {lineno}: unterminated list")
        inner = raw[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(tok, lineno) for tok in inner.split(",")]
    return _parse_scalar(raw, lineno)


def _coerce(key: str, value, lineno: int):
    def err(why: str) -> ConfigError:
        return ConfigError(f"line {lineno}: key '{key}' {why}")

    if key == "trials":
        if value == "auto" or (isinstance(value, int) and not isinstance(value, bool)):
            return value
        raise err(f"must be 'auto' or an integer, got {value!r}")
    if key in _INT_KEYS:
        if isinstance(value, int) and not isinstance(value, bool):
            return value
        raise err(f"must be an integer, got {value!r}")
    if key in _FLOAT_KEYS:
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return float(value)
        raise err(f"must be a number, got {value!r}")
    if key in _STR_KEYS:
        if isinstance(value, str):
            return value
        raise err(f"must be a string, got {value!r}")
    if key in _INT_LIST_KEYS:
        if isinstance(value, list) and all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        ):
            return value
        raise err(f"must be a list of integers, got {value!r}")
    if key in _FLOAT_LIST_KEYS:
        if isinstance(value, list) and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            return [float(v) for v in value]
        raise err(f"must be a list of numbers, got {value!r}")
    raise AssertionError(f"unhandled key {key}")


def parse_config(path: str) -> RunConfig:
    """Read and fully validate a config file; diagnostics name the offending
    key and line."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise MissingConfigFileError(f"config file not found: {path}") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None

    known = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _INT_LIST_KEYS | _FLOAT_LIST_KEYS | {"trials"}
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in known:
            raise UnknownKeyError(f"line {lineno}: unknown config key '{key}'")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        values[key] = _coerce(key, _parse_value(raw, lineno), lineno)

    cfg = RunConfig(**values, provided=frozenset(values))
    cfg.validate()
    return cfg
