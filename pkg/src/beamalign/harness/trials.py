"""Monte-Carlo trials, detection curves and parameter sweeps.

Seeding: trial ``t`` of an experiment uses the integer seed
``trial_seed(master_seed, t)``.  Inside a trial that seed is split by
``SeedSequence.spawn`` into independent streams for the path geometry, the
fading process, the receiver noise and the UE codebook.  The BS codebook
comes from ``codebook_seed`` and is shared by every trial.  Changing an
axis value therefore keeps the same geometry and, where array shapes allow,
the same fading and noise draws.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from beamalign import baselines, beamspace, channel, codebook, measure, nnls
from beamalign.harness.config import ExperimentConfig
from beamalign.harness.results import CurveResult


@dataclass
class TrialOutcome:
    success_at: np.ndarray  # bool, index T - 1
    first_success_T: int | None
    truth: int
    kkt_residual: float = 0.0
    margin: float = math.nan

    def __post_init__(self):
        self.success_at = np.asarray(self.success_at, dtype=bool)


@dataclass
class TrialData:
    """Everything a trial observes, kept for inspection and tests."""
    mpcs: channel.MpcSet
    bs_codebook: codebook.Codebook
    ue_codebook: codebook.Codebook
    B: np.ndarray
    q: np.ndarray  # (T m n,)
    observations: np.ndarray  # (T, m, n, F') symbol-averaged
    truth: int


def trial_seed(master_seed: int, index: int) -> int:
    child = np.random.SeedSequence(master_seed).spawn(index + 1)[index]
    return int(child.generate_state(1, dtype=np.uint64)[0])


def trial_seeds(master_seed, trials: int) -> list[int]:
    return [int(c.generate_state(1, dtype=np.uint64)[0])
            for c in np.random.SeedSequence(master_seed).spawn(trials)]


def bs_codebook_for(cfg: ExperimentConfig) -> codebook.Codebook:
    return codebook.generate_codebook(cfg.codebook_seed, cfg.t_max, cfg.m, cfg.M,
                                      cfg.kappa_u, side="BS")


def simulate_trial(cfg: ExperimentConfig, seed: int,
                   bs_cb: codebook.Codebook | None = None) -> TrialData:
    geo_ss, fade_ss, noise_ss, ue_ss = np.random.SeedSequence(seed).spawn(4)
    rng_geo = np.random.default_rng(geo_ss)
    rng_fade = np.random.default_rng(fade_ss)
    rng_noise = np.random.default_rng(noise_ss)
    num = cfg.numerology

    mpcs = channel.random_mpcs(rng_geo, cfg.num_paths, cfg.N, cfg.M,
                               powers=cfg.path_gains or None, on_grid=cfg.on_grid,
                               max_delay=num.cp_duration)
    row, col = mpcs.strongest_bin(cfg.N, cfg.M)
    truth = beamspace.flat_index(row, col, cfg.N)

    bs_cb = bs_cb or bs_codebook_for(cfg)
    ue_cb = codebook.generate_codebook(np.random.default_rng(ue_ss), cfg.t_max, cfg.n,
                                       cfg.N, cfg.kappa_v, side="UE")

    a = np.array([beamspace.beamspace_coeffs_sin(cfg.M, s) for s in mpcs.aod_sines])
    b = np.array([beamspace.beamspace_coeffs_sin(cfg.N, s) for s in mpcs.aoa_sines])
    combs = np.array([num.comb(i, cfg.m) for i in range(cfg.m)])  # (m, F')
    phases = channel.delay_phases(mpcs, combs, num.symbol_duration)  # (L, m, F')

    p_dim = cfg.p_dim
    powers = np.empty((cfg.t_max, cfg.m, cfg.n))
    obs = np.empty((cfg.t_max, cfg.m, cfg.n, cfg.comb_size), dtype=complex)
    state = channel.init_fading(mpcs, cfg.m, cfg.comb_size, rng_fade)
    gm = channel.GaussMarkovParams(cfg.alpha)
    for s in range(cfg.t_max):
        if s:
            state = channel.evolve(state, gm, rng_fade)
        g_bs = measure.beam_gains(a, bs_cb.supports[s], conj=True)
        g_ue = measure.beam_gains(b, ue_cb.supports[s], conj=False)
        prod = measure.noiseless_products(state.gains, phases, g_bs, g_ue)
        y = measure.slot_observations(prod, p_dim, cfg.n, cfg.noise_var,
                                      cfg.symbols_per_slot, rng_noise)
        powers[s] = measure.slot_powers(y)
        obs[s] = y.mean(axis=-1)
    B = codebook.assemble_B(bs_cb, ue_cb, cfg.t_max)
    q = measure.assemble_measurements(powers)
    return TrialData(mpcs, bs_cb, ue_cb, B, q, obs, truth)


def run_trial(cfg: ExperimentConfig, seed: int,
              bs_cb: codebook.Codebook | None = None) -> TrialOutcome:
    """Simulate one user over ``t_max`` slots and score the estimator at every T."""
    data = simulate_trial(cfg, seed, bs_cb)
    rows_per_slot = cfg.m * cfg.n
    success = np.zeros(cfg.t_max, dtype=bool)
    worst_kkt = 0.0
    det = None
    if cfg.estimator == "nnls":
        assumed = cfg.sigma2_scale * cfg.noise_var
        prev = None
        for T in range(1, cfg.t_max + 1):
            r = rows_per_slot * T
            sol = nnls.nnls_solve(data.B[:r], data.q[:r], assumed,
                                  init=None if prev is None else prev.gamma)
            prev = sol
            worst_kkt = max(worst_kkt, sol.kkt_residual)
            det = nnls.detect_strongest(sol)
            success[T - 1] = (not det.degenerate) and det.index == data.truth
    else:
        for T in range(1, cfg.t_max + 1):
            det = baselines.omp_beam_align(data.B, data.observations, T, cfg.num_paths,
                                           cfg.p_dim, cfg.n, cfg.kappa_u, cfg.kappa_v,
                                           subcarriers=cfg.omp_subcarriers,
                                           mode=cfg.omp_mode)
            success[T - 1] = det.index == data.truth
    hits = np.flatnonzero(success)
    first = int(hits[0]) + 1 if hits.size else None
    return TrialOutcome(success, first, data.truth, worst_kkt, det.margin)


def _run_one(args):
    cfg, seed, bs_cb = args
    return run_trial(cfg, seed, bs_cb)


def run_trials(cfg: ExperimentConfig) -> list[TrialOutcome]:
    """All trials of ``cfg``.

    Trial seeds come from the master seed alone, so curves that differ only
    in the BS codebook see the same channels, noise and UE codebooks.  With
    ``common_channels`` off the codebook seed is mixed in as well.
    """
    master = cfg.master_seed if cfg.common_channels else [cfg.master_seed, cfg.codebook_seed]
    seeds = trial_seeds(master, cfg.trials)
    bs_cb = bs_codebook_for(cfg)
    jobs = [(cfg, s, bs_cb) for s in seeds]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * cfg.workers))))
    return [_run_one(j) for j in jobs]


def summarize(outcomes: list[TrialOutcome], cfg: ExperimentConfig, axis: str) -> CurveResult:
    hits = np.array([o.success_at for o in outcomes])
    trials = len(outcomes)
    pd = hits.mean(axis=0)
    stderr = np.sqrt(pd * (1 - pd) / trials)
    firsts = [o.first_success_T for o in outcomes]
    censored = sum(f is None for f in firsts)
    mean_first = float(np.mean([cfg.t_max if f is None else f for f in firsts]))
    meta = {
        "estimator": cfg.estimator,
        "mean_first_success": mean_first,
        "censored_fraction": censored / trials,
        "frame_ms": cfg.frame_ms,
        "max_kkt_residual": float(max(o.kkt_residual for o in outcomes)),
    }
    return CurveResult(axis=axis, T=list(range(1, cfg.t_max + 1)), P_D=pd.tolist(),
                       stderr=stderr.tolist(), trials=trials,
                       config_hash=cfg.config_hash(), seed=cfg.master_seed, metadata=meta)


def detection_curve(cfg: ExperimentConfig, axis: str = "") -> CurveResult:
    return summarize(run_trials(cfg), cfg, axis or cfg.estimator)
