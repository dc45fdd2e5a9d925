"""Experiment configuration: defaults, named profiles and the flat key = value file format.

Example file::

    # desk-scale Fig. 5 point
    M = 16
    N = 16
    kappa_u = 8
    kappa_v = 8
    snr_bbf_db = -27      # dB
    subcarrier_spacing_hz = 480e3
    codebook_seeds = 1, 2, 3, 4

Lines are ``key = value``; ``#`` starts a comment; lists are comma
separated.  Unknown keys are rejected.
"""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, fields

from beamalign.errors import ConfigurationError
from beamalign.measure import Numerology, PowerConfig, db_to_linear

ESTIMATORS = ("nnls", "omp")

# keys that do not change any simulated number
_NON_SEMANTIC = {"output", "format", "workers", "experiment"}


@dataclass(frozen=True)
class ExperimentConfig:
    # arrays and RF chains
    M: int = 16
    N: int = 16
    m: int = 3
    n: int = 2
    kappa_u: int = 4
    kappa_v: int = 4
    # OFDM numerology (Hz, counts)
    carrier_hz: float = 70e9
    bandwidth_hz: float = 1e9
    subcarrier_spacing_hz: float = 480e3
    symbols_per_slot: int = 14
    comb_size: int = 3
    cp_fraction: float = 0.25
    # power
    snr_bbf_db: float = -27.0
    noise_var: float = 1.0
    sigma2_scale: float = 1.0  # noise variance assumed by the estimator / true one
    # channel
    num_paths: int = 1
    path_gains: tuple[float, ...] = ()
    alpha: float = 0.0
    on_grid: bool = False
    # run
    t_max: int = 60
    trials: int = 100
    master_seed: int = 2024
    codebook_seed: int = 1
    codebook_seeds: tuple[int, ...] = (1, 2, 3, 4)
    common_channels: bool = True  # same channel draws for every codebook seed
    estimator: str = "nnls"
    omp_subcarriers: str = "all"
    omp_mode: str = "stacked"
    frame_ms: float = 1.0
    experiment: str = "run"
    output: str = ""
    format: str = "csv"
    workers: int = 1

    def __post_init__(self):
        for name in ("M", "N", "m", "n", "kappa_u", "kappa_v", "symbols_per_slot",
                     "comb_size", "num_paths", "t_max", "trials", "workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.kappa_u > self.M or self.kappa_v > self.N:
            raise ConfigurationError("spreading factors cannot exceed the array sizes")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigurationError("alpha must lie in [0, 1]")
        if self.noise_var <= 0 or self.sigma2_scale < 0:
            raise ConfigurationError("noise_var must be positive and sigma2_scale non-negative")
        if self.path_gains and len(self.path_gains) != self.num_paths:
            raise ConfigurationError("path_gains needs one entry per path")
        if any(g <= 0 for g in self.path_gains):
            raise ConfigurationError("path gains must be positive")
        if self.estimator not in ESTIMATORS:
            raise ConfigurationError(f"estimator must be one of {ESTIMATORS}")
        if self.omp_subcarriers not in ("all", "one"):
            raise ConfigurationError("omp_subcarriers must be 'all' or 'one'")
        if self.omp_mode not in ("stacked", "joint"):
            raise ConfigurationError("omp_mode must be 'stacked' or 'joint'")
        if self.format not in ("csv", "json"):
            raise ConfigurationError("format must be csv or json")
        self.numerology.check_streams(self.m)

    @property
    def numerology(self) -> Numerology:
        return Numerology(self.carrier_hz, self.bandwidth_hz, self.subcarrier_spacing_hz,
                          self.symbols_per_slot, self.comb_size, self.cp_fraction)

    @property
    def power(self) -> PowerConfig:
        return PowerConfig(snr_bbf=db_to_linear(self.snr_bbf_db), noise_var=self.noise_var)

    @property
    def p_dim(self) -> float:
        return self.power.p_dim(self.numerology, self.m)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def config_hash(self) -> str:
        d = {k: v for k, v in self.to_dict().items() if k not in _NON_SEMANTIC}
        blob = json.dumps(d, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


PROFILES = {
    "desk": {},
    "paper": dict(M=32, N=32, kappa_u=8, kappa_v=8, snr_bbf_db=-33.0, trials=200,
                  t_max=100),
}


def profile(name: str, **overrides) -> ExperimentConfig:
    if name not in PROFILES:
        raise ConfigurationError(f"unknown profile {name!r}; choose from {sorted(PROFILES)}")
    return ExperimentConfig(**{**PROFILES[name], **overrides})


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(name: str, kind, raw: str):
    raw = raw.strip()
    try:
        if kind in (bool, "bool"):
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(raw)
        if kind in (int, "int"):
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        if kind in (float, "float"):
            return float(raw)
        if kind in (str, "str"):
            return raw
        if str(kind).startswith("tuple[float"):
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if str(kind).startswith("tuple[int"):
            return tuple(int(x) for x in raw.split(",") if x.strip())
    except ValueError:
        raise ConfigurationError(f"bad value for {name}: {raw!r}") from None
    raise ConfigurationError(f"unsupported field type for {name}")


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), comment_prefixes=("#",),
                                       delimiters=("=",), interpolation=None)
    parser.optionxform = str  # keys are case sensitive (M vs m)
    try:
        parser.read_string("[experiment]\n" + text)
    except configparser.Error as e:
        raise ConfigurationError(f"malformed config: {e}") from None
    kinds = {f.name: f.type for f in fields(ExperimentConfig)}
    values = {}
    for key, raw in parser["experiment"].items():
        if key not in kinds:
            raise ConfigurationError(f"unknown config key {key!r}")
        values[key] = _convert(key, kinds[key], raw)
    base = base or ExperimentConfig()
    return base.replace(**values)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), base)


def dump_config_text(cfg: ExperimentConfig) -> str:
    lines = []
    for k, v in cfg.to_dict().items():
        if isinstance(v, list):
            v = ", ".join(repr(x) for x in v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"
