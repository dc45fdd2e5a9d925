"""Parameter sweeps and the named figure presets."""
from __future__ import annotations

import numpy as np

from beamalign import baselines
from beamalign.errors import ConfigurationError
from beamalign.harness.config import ExperimentConfig, profile
from beamalign.harness.results import CurveResult
from beamalign.harness.trials import detection_curve

AXES = ("codebook_seed", "kappa", "comb_size", "product", "n", "alpha", "K")


def _fmt(v) -> str:
    if isinstance(v, (tuple, list)):
        return "(" + ",".join(_fmt(x) for x in v) + ")"
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def _apply(cfg: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis == "codebook_seed":
        return cfg.replace(codebook_seed=int(value))
    if axis == "kappa":
        ku, kv = (value, value) if np.isscalar(value) else value
        return cfg.replace(kappa_u=int(ku), kappa_v=int(kv))
    if axis == "comb_size":
        return cfg.replace(comb_size=int(value))
    if axis == "product":
        m, n, ku, kv = value
        return cfg.replace(m=int(m), n=int(n), kappa_u=int(ku), kappa_v=int(kv))
    if axis == "n":
        return cfg.replace(n=int(value))
    if axis == "alpha":
        return cfg.replace(alpha=float(value))
    raise ConfigurationError(f"unknown sweep axis {axis!r}; choose from {AXES}")


def sweep(cfg: ExperimentConfig, axis: str, values, prefix: str = "") -> list[CurveResult]:
    """One detection curve per axis value, all driven by the same master seed.

    The ``alpha`` axis runs both the NNLS scheme and the OMP baseline.  The
    ``K`` axis returns the scalability comparison from one NNLS curve.
    """
    if axis == "K":
        return scalability(cfg, [int(k) for k in values], prefix)
    out = []
    for v in values:
        c = _apply(cfg, axis, v)
        estimators = ("nnls", "omp") if axis == "alpha" else (cfg.estimator,)
        for est in estimators:
            label = f"{prefix}{axis}={_fmt(v)}"
            if axis == "alpha":
                label += f"/{est}"
            out.append(detection_curve(c.replace(estimator=est), label))
    return out


def scalability(cfg: ExperimentConfig, users, prefix: str = "") -> list[CurveResult]:
    base = detection_curve(cfg.replace(estimator="nnls"))
    model = baselines.BisectionModel.for_arrays(cfg.M, cfg.N, cfg.m)
    T = base.T
    out = []
    for K in users:
        fr = baselines.scalability_curve(K, model, T, base.P_D)
        out.append(CurveResult(f"{prefix}K={K}/nnls", T, fr["nnls"].tolist(), list(base.stderr),
                               base.trials, base.config_hash, base.seed,
                               {**base.metadata, "users": K}))
        out.append(CurveResult(f"{prefix}K={K}/bisection", T, fr["bisection"].tolist(),
                               [0.0] * len(T), K, base.config_hash, base.seed,
                               {"users": K, "user_time_slots":
                                baselines.bisection_user_time(model)}))
    return out


# desk presets keep the full-scale ratios (beams per array size) where a literal copy is impossible at M = 16
FIGURES = {
    4: {"desk": ("codebook_seed", [1, 2, 3, 4]),
        "paper": ("codebook_seed", [1, 2, 3, 4])},
    5: {"desk": ("kappa", [2, 4, 8, 16]),
        "paper": ("kappa", [4, 8, 16, 25])},
    6: {"desk": ("comb_size", [1, 3, 10, 30]),
        "paper": ("comb_size", [1, 3, 10, 30])},
    7: {"desk": ("product", [(3, 2, 4, 4), (2, 2, 6, 4), (1, 1, 12, 8)]),
        "paper": ("product", [(3, 2, 8, 8), (2, 2, 12, 8), (1, 1, 24, 16)])},
    8: {"desk": ("n", [1, 2, 3, 4]),
        "paper": ("n", [1, 2, 3, 4])},
    9: {"desk": ("K", [10, 50]),
        "paper": ("K", [10, 50])},
    10: {"desk": ("alpha", [0.0, 0.5, 0.9, 1.0]),
         "paper": ("alpha", [0.0, 0.5, 0.9, 1.0])},
}

# Fig. 8 is drawn at two SNR levels; the second is 3 dB lower
FIG8_SNR_DB = {"desk": (-27.0, -30.0), "paper": (-33.0, -36.0)}


def figure_config(fig: int, prof: str = "desk", **overrides) -> ExperimentConfig:
    if fig not in FIGURES:
        raise ConfigurationError(f"no preset for figure {fig}; choose from {sorted(FIGURES)}")
    return profile(prof, **overrides)


def run_figure(fig: int, cfg: ExperimentConfig, prof: str = "desk") -> list[CurveResult]:
    """Curves of one figure preset; figure 4 takes its seeds from ``cfg.codebook_seeds``."""
    axis, values = FIGURES[fig][prof]
    if fig == 4:
        values = list(cfg.codebook_seeds)
    if fig == 8:
        out = []
        for snr in FIG8_SNR_DB[prof]:
            out += sweep(cfg.replace(snr_bbf_db=snr), axis, values, prefix=f"snr={_fmt(snr)},")
        return out
    return sweep(cfg, axis, values)
