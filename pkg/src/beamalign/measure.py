"""Beacon observations, averaged power measurements and SNR bookkeeping.

Everything is simulated directly in the frequency domain: one complex
observation per (slot, OFDM symbol, BS stream, UE chain, comb subcarrier).
Noise power per subcarrier is ``noise_var = subcarrier_spacing * N0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from beamalign.errors import ConfigurationError, InputError


@dataclass(frozen=True)
class Numerology:
    carrier_hz: float = 70e9
    bandwidth_hz: float = 1e9
    subcarrier_spacing_hz: float = 480e3
    symbols_per_slot: int = 14
    comb_size: int = 3
    cp_fraction: float = 0.25

    def __post_init__(self):
        if self.subcarrier_spacing_hz <= 0 or self.bandwidth_hz <= 0:
            raise ConfigurationError("bandwidth and subcarrier spacing must be positive")
        if self.symbols_per_slot < 1 or self.comb_size < 1:
            raise ConfigurationError("symbols_per_slot and comb_size must be >= 1")
        if self.cp_fraction < 0:
            raise ConfigurationError("cp_fraction must be non-negative")

    @property
    def num_subcarriers(self) -> int:
        return int(self.bandwidth_hz // self.subcarrier_spacing_hz)

    @property
    def symbol_duration(self) -> float:
        """OFDM symbol length t0 including the cyclic prefix."""
        return (1.0 + self.cp_fraction) / self.subcarrier_spacing_hz

    @property
    def cp_duration(self) -> float:
        return self.cp_fraction / self.subcarrier_spacing_hz

    def check_streams(self, streams: int) -> None:
        if streams * self.comb_size > self.num_subcarriers:
            raise ConfigurationError(
                f"{streams} combs of {self.comb_size} subcarriers do not fit in "
                f"{self.num_subcarriers} subcarriers")

    def comb(self, stream: int, streams: int) -> np.ndarray:
        """Absolute subcarrier indices of the comb carrying ``stream``.

        Combs are evenly interleaved: stream i uses i, i + D, i + 2D, ...
        with D = F // comb_size, so distinct streams never collide.
        """
        self.check_streams(streams)
        spacing = self.num_subcarriers // self.comb_size
        return stream + spacing * np.arange(self.comb_size)


@dataclass(frozen=True)
class PowerConfig:
    """Transmit power derived from a target SNR before beamforming."""
    snr_bbf: float  # linear
    noise_var: float = 1.0
    path_power_sum: float = 1.0

    def noise_psd(self, num: Numerology) -> float:
        return self.noise_var / num.subcarrier_spacing_hz

    def total_power(self, num: Numerology) -> float:
        return total_power_for_snr(self.snr_bbf, self.noise_psd(num), num.bandwidth_hz,
                                   self.path_power_sum)

    def p_dim(self, num: Numerology, streams: int) -> float:
        """Power per transmit signal dimension, P_tot / (m F')."""
        return self.total_power(num) / (streams * num.comb_size)


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def snr_bbf(total_power: float, path_power_sum: float, noise_psd: float,
            bandwidth: float) -> float:
    """SNR before beamforming, P_tot sum(gamma) / (N0 B)."""
    return total_power * path_power_sum / (noise_psd * bandwidth)


def total_power_for_snr(target: float, noise_psd: float, bandwidth: float,
                        path_power_sum: float = 1.0) -> float:
    return target * noise_psd * bandwidth / path_power_sum


def snr_ce_abf(snr_before: float, n_tx: int, n_rx: int, kappa_u: int, kappa_v: int,
               m: int, n: int, num: Numerology) -> float:
    """Best-case per-subcarrier SNR of a channel-estimation measurement."""
    spatial = n_tx * n_rx / (kappa_u * kappa_v * m * n)
    spectral = num.bandwidth_hz / (num.comb_size * num.subcarrier_spacing_hz)
    return spatial * spectral * snr_before


def snr_abf(total_power: float, powers, gains_ue, gains_bs, m: int, n: int,
            noise_psd: float, stream_bandwidth: float) -> float:
    """SNR after beamforming for one (stream, chain) pair under equal power split."""
    powers = np.asarray(powers, dtype=float)
    g = np.abs(np.asarray(gains_ue)) ** 2 * np.abs(np.asarray(gains_bs)) ** 2
    return float(total_power * np.sum(powers * g) / (m * n * noise_psd * stream_bandwidth))


def synth_beacon_observation(H, bs_coeff, ue_coeff, p_dim: float, n: int,
                             noise_var: float, rng: np.random.Generator | None = None) -> complex:
    """sqrt(p_dim / n) v^H H u + z with z ~ CN(0, noise_var)."""
    H = np.asarray(H)
    bs_coeff = np.asarray(bs_coeff)
    ue_coeff = np.asarray(ue_coeff)
    if H.shape != (ue_coeff.size, bs_coeff.size):
        raise InputError(f"channel {H.shape} does not match beams "
                         f"({ue_coeff.size}, {bs_coeff.size})")
    y = math.sqrt(p_dim / n) * (ue_coeff.conj() @ H @ bs_coeff)
    if noise_var > 0:
        if rng is None:
            raise InputError("a random generator is required when noise_var > 0")
        y = y + math.sqrt(noise_var / 2) * complex(rng.standard_normal(), rng.standard_normal())
    return complex(y)


def beam_gains(coeffs: np.ndarray, supports: np.ndarray, conj: bool) -> np.ndarray:
    """Beamforming gain of flat-top beams along each path.

    ``coeffs`` is (L, dim), the DFT coefficients of each path's array
    response; ``supports`` is (..., kappa).  Returns (..., L) holding
    sum_{k in support} coeff[k] / sqrt(kappa), conjugated for BS gains
    a^H u.
    """
    c = coeffs.conj() if conj else coeffs
    picked = c[:, supports]  # (L, ..., kappa)
    g = picked.sum(axis=-1) / math.sqrt(supports.shape[-1])
    return np.moveaxis(g, 0, -1)


def noiseless_products(gains: np.ndarray, phases: np.ndarray, g_bs: np.ndarray,
                       g_ue: np.ndarray) -> np.ndarray:
    """v^H H u for one slot.

    gains  : (L, m, F') path gains
    phases : (L, m, F') delay phases at the comb subcarriers
    g_bs   : (m, L), g_ue : (n, L)
    returns (m, n, F')
    """
    return np.einsum("lif,il,jl->ijf", gains * phases, g_bs, g_ue)


def slot_observations(products: np.ndarray, p_dim: float, n: int, noise_var: float,
                      symbols: int, rng: np.random.Generator) -> np.ndarray:
    """Noisy observations for every symbol of a slot, shape (m, n, F', S).

    The channel is held over the slot so only the noise changes per symbol.
    """
    shape = products.shape + (symbols,)
    noise = math.sqrt(noise_var / 2) * (rng.standard_normal(shape)
                                        + 1j * rng.standard_normal(shape))
    return math.sqrt(p_dim / n) * products[..., None] + noise


def slot_power_measurement(observations) -> float:
    """Mean |y|^2 over the symbols and comb subcarriers of one (slot, i, j)."""
    y = np.asarray(observations)
    if y.size == 0:
        raise InputError("need at least one observation")
    return float(np.mean(np.abs(y) ** 2))


def slot_powers(observations: np.ndarray) -> np.ndarray:
    """(m, n, F', S) observations -> (m, n) averaged powers."""
    return np.mean(np.abs(observations) ** 2, axis=(-2, -1))


def assemble_measurements(powers, slots: int | None = None) -> np.ndarray:
    """Flatten (T, m, n) powers to q ordered slot-major, then BS stream, then UE chain."""
    p = np.asarray(powers, dtype=float)
    if p.ndim != 3:
        raise InputError("powers must have shape (T, m, n)")
    if slots is not None:
        if p.shape[0] < slots:
            raise InputError(f"only {p.shape[0]} slots of powers, need {slots}")
        p = p[:slots]
    if np.any(p < 0):
        raise InputError("powers must be non-negative")
    return p.reshape(-1)


def gamma_vector(second_moment: np.ndarray, p_dim: float, n: int, kappa_u: int,
                 kappa_v: int) -> np.ndarray:
    """Unknown of the linear power model q = B gamma + sigma2 1 + w.

    ``second_moment`` is E|H_check[r, c]|^2 (N x M); the flat-top beams
    contribute 1 / (kappa_u kappa_v) of each probed bin, scaled by the
    received power per dimension p_dim / n.  Column-major flattening.
    """
    return (p_dim / (n * kappa_u * kappa_v)) * np.asarray(second_moment).reshape(-1, order="F")


def expected_power_exact(coeffs_bs: np.ndarray, coeffs_rx: np.ndarray, powers,
                         bs_support, ue_support, p_dim: float, n: int,
                         noise_var: float) -> float:
    """E[q] for one (slot, i, j) including inter-bin cross terms.

    Path gains are independent and zero-mean, so the expected power is
    sum_l gamma_l |g_ue|^2 |g_bs|^2 scaled by p_dim / n, plus noise.
    """
    g_bs = beam_gains(coeffs_bs, np.asarray(bs_support)[None, :], conj=True)[0]
    g_ue = beam_gains(coeffs_rx, np.asarray(ue_support)[None, :], conj=False)[0]
    sig = np.sum(np.asarray(powers) * np.abs(g_bs) ** 2 * np.abs(g_ue) ** 2)
    return float(p_dim / n * sig + noise_var)
