"""Monte-Carlo helpers shared by the measurement tests."""
from __future__ import annotations

import numpy as np

from beamalign import beamspace as bs
from beamalign import channel as ch
from beamalign import codebook as cb
from beamalign import measure as ms
from beamalign.harness.config import ExperimentConfig


def off_grid_path(M, N, numerology):
    """A fixed path between grid points on both arrays."""
    s_tx = bs.grid_sines(M)[5] + 0.37 * 2 / M
    s_rx = bs.grid_sines(N)[11] - 0.21 * 2 / N
    return ch.MpcSet((ch.Mpc(float(np.arcsin(s_tx)), float(np.arcsin(s_rx)),
                             0.3 * numerology.cp_duration, 1.0),))


def measurement_monte_carlo(cfg: ExperimentConfig, mpcs, slots, realizations, seed,
                            chunk=1000):
    """Sample mean and standard error of q over independent slot realizations.

    Every realization redraws all path gains and noise for ``slots`` slots of
    one fixed pair of codebooks.  Returns (mean, stderr, B, bs_cb, ue_cb).
    """
    num = cfg.numerology
    bs_cb = cb.generate_codebook(1, slots, cfg.m, cfg.M, cfg.kappa_u)
    ue_cb = cb.generate_codebook(2, slots, cfg.n, cfg.N, cfg.kappa_v, side="UE")
    B = cb.assemble_B(bs_cb, ue_cb, slots)
    a = np.array([bs.beamspace_coeffs_sin(cfg.M, s) for s in mpcs.aod_sines])
    b = np.array([bs.beamspace_coeffs_sin(cfg.N, s) for s in mpcs.aoa_sines])
    combs = np.array([num.comb(i, cfg.m) for i in range(cfg.m)])
    phases = ch.delay_phases(mpcs, combs, num.symbol_duration)
    g_bs = [ms.beam_gains(a, bs_cb.supports[s], conj=True) for s in range(slots)]
    g_ue = [ms.beam_gains(b, ue_cb.supports[s], conj=False) for s in range(slots)]
    rng = np.random.default_rng(seed)
    acc = np.zeros(B.shape[0])
    acc2 = np.zeros(B.shape[0])
    done = 0
    L, m, n, F, S = len(mpcs), cfg.m, cfg.n, cfg.comb_size, cfg.symbols_per_slot
    while done < realizations:
        R = min(chunk, realizations - done)
        q = np.empty((R, slots, m, n))
        for s in range(slots):
            std = np.sqrt(mpcs.powers / 2)[None, :, None, None]
            gains = std * (rng.standard_normal((R, L, m, F)) + 1j * rng.standard_normal((R, L, m, F)))
            prod = np.einsum("rlif,il,jl->rijf", gains * phases, g_bs[s], g_ue[s])
            y = ms.slot_observations(prod, cfg.p_dim, n, cfg.noise_var, S, rng)
            q[:, s] = ms.slot_powers(y)
        q = q.reshape(R, -1)
        acc += q.sum(axis=0)
        acc2 += (q * q).sum(axis=0)
        done += R
    mean = acc / realizations
    se = np.sqrt(np.maximum(acc2 / realizations - mean ** 2, 0) / realizations)
    return mean, se, B, bs_cb, ue_cb


def exact_expectation(cfg, mpcs, bs_cb, ue_cb, slots):
    a = np.array([bs.beamspace_coeffs_sin(cfg.M, s) for s in mpcs.aod_sines])
    b = np.array([bs.beamspace_coeffs_sin(cfg.N, s) for s in mpcs.aoa_sines])
    out = []
    for s in range(slots):
        for i in range(cfg.m):
            for j in range(cfg.n):
                out.append(ms.expected_power_exact(a, b, mpcs.powers, bs_cb.supports[s, i],
                                                   ue_cb.supports[s, j], cfg.p_dim, cfg.n,
                                                   cfg.noise_var))
    return np.array(out)
