"""Sparse multipath channel with Gauss-Markov fading in time.

Each path gain is drawn per (path, probing stream, comb subcarrier) because
comb subcarriers are spaced wider than the coherence bandwidth.  Gains are
held for a whole beacon slot and evolve once per slot.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from beamalign import beamspace


@dataclass(frozen=True)
class Mpc:
    aod: float  # radians, BS side
    aoa: float  # radians, UE side
    delay: float  # seconds
    avg_power: float

    def __post_init__(self):
        if not self.avg_power > 0:
            raise ValueError("path power must be positive")
        if self.delay < 0:
            raise ValueError("path delay must be non-negative")
        for a in (self.aod, self.aoa):
            if not -np.pi / 2 <= a <= np.pi / 2:
                raise ValueError(f"angle {a} outside [-pi/2, pi/2]")


@dataclass(frozen=True)
class MpcSet:
    paths: tuple[Mpc, ...]

    def __post_init__(self):
        if len(self.paths) == 0:
            raise ValueError("an MpcSet needs at least one path")
        object.__setattr__(self, "paths", tuple(self.paths))

    def __len__(self):
        return len(self.paths)

    @property
    def powers(self) -> np.ndarray:
        return np.array([p.avg_power for p in self.paths])

    @property
    def aod_sines(self) -> np.ndarray:
        return np.sin([p.aod for p in self.paths])

    @property
    def aoa_sines(self) -> np.ndarray:
        return np.sin([p.aoa for p in self.paths])

    @property
    def delays(self) -> np.ndarray:
        return np.array([p.delay for p in self.paths])

    def strongest(self) -> int:
        return int(np.argmax(self.powers))

    def strongest_bin(self, n_rx: int, n_tx: int) -> tuple[int, int]:
        """(AoA row, AoD col) grid bin of the strongest path."""
        p = self.paths[self.strongest()]
        return (beamspace.nearest_grid_index(p.aoa, n_rx),
                beamspace.nearest_grid_index(p.aod, n_tx))


@dataclass(frozen=True)
class GaussMarkovParams:
    alpha: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass
class FadingState:
    """Current-slot path gains, shape (L, streams, comb_size)."""
    gains: np.ndarray
    powers: np.ndarray
    slot: int = 0


def _cn(rng: np.random.Generator, shape, var) -> np.ndarray:
    scale = np.sqrt(np.asarray(var) / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def init_fading(mpcs: MpcSet, streams: int, comb_size: int,
                rng: np.random.Generator) -> FadingState:
    if streams < 1 or comb_size < 1:
        raise ValueError("streams and comb_size must be >= 1")
    powers = mpcs.powers
    shape = (len(mpcs), streams, comb_size)
    gains = _cn(rng, shape, powers[:, None, None])
    return FadingState(gains=gains, powers=powers, slot=0)


def evolve(state: FadingState, params: GaussMarkovParams,
           rng: np.random.Generator) -> FadingState:
    """One Gauss-Markov step: rho <- alpha rho + sqrt(1 - alpha^2) nu."""
    a = params.alpha
    innovation = _cn(rng, state.gains.shape, state.powers[:, None, None])
    gains = a * state.gains + np.sqrt(1.0 - a * a) * innovation
    return FadingState(gains=gains, powers=state.powers, slot=state.slot + 1)


def delay_phases(mpcs: MpcSet, subcarriers: np.ndarray, symbol_duration: float) -> np.ndarray:
    """exp(-j 2 pi (omega / t0) tau_l) for every path and subcarrier index omega.

    Returns an array of shape ``(L,) + subcarriers.shape``.
    """
    freq = np.asarray(subcarriers, dtype=float) / symbol_duration
    return np.exp(-2j * np.pi * np.multiply.outer(mpcs.delays, freq))


def beamspace_channel(state: FadingState, mpcs: MpcSet, stream: int, comb_pos: int,
                      n_rx: int, n_tx: int, subcarrier: int = 0,
                      symbol_duration: float = 1.0) -> np.ndarray:
    """N x M beamspace channel at one comb subcarrier of one probing stream.

    ``comb_pos`` indexes the gain inside the comb; ``subcarrier`` is the
    absolute OFDM index used for the delay phase.
    """
    h = np.zeros((n_rx, n_tx), dtype=complex)
    phase = delay_phases(mpcs, np.array([subcarrier]), symbol_duration)[:, 0]
    for l, p in enumerate(mpcs.paths):
        a = beamspace.beamspace_coeffs(n_tx, p.aod)
        b = beamspace.beamspace_coeffs(n_rx, p.aoa)
        h += state.gains[l, stream, comb_pos] * phase[l] * np.outer(b, a.conj())
    return h


def element_channel(state: FadingState, mpcs: MpcSet, stream: int, comb_pos: int,
                    n_rx: int, n_tx: int, subcarrier: int = 0,
                    symbol_duration: float = 1.0) -> np.ndarray:
    """Antenna-domain channel sum_l rho e^{-j2pi f tau} b(phi) a(theta)^H."""
    h = np.zeros((n_rx, n_tx), dtype=complex)
    phase = delay_phases(mpcs, np.array([subcarrier]), symbol_duration)[:, 0]
    for l, p in enumerate(mpcs.paths):
        a = beamspace.array_response(n_tx, p.aod)
        b = beamspace.array_response(n_rx, p.aoa)
        h += state.gains[l, stream, comb_pos] * phase[l] * np.outer(b, a.conj())
    return h


def second_moment_matrix(mpcs: MpcSet, n_rx: int, n_tx: int) -> np.ndarray:
    """E|H_check[r, c]|^2 as an N x M matrix; total mass is M N sum(gamma)."""
    out = np.zeros((n_rx, n_tx))
    for p in mpcs.paths:
        a2 = np.abs(beamspace.beamspace_coeffs(n_tx, p.aod)) ** 2
        b2 = np.abs(beamspace.beamspace_coeffs(n_rx, p.aoa)) ** 2
        out += p.avg_power * np.outer(b2, a2)
    return out


def random_mpcs(rng: np.random.Generator, n_paths: int, n_rx: int, n_tx: int,
                powers=None, on_grid: bool = False, max_delay: float = 0.0,
                max_redraws: int = 1000) -> MpcSet:
    """Draw paths with angles uniform in the sine domain over [-1, 1).

    Powers default to i.i.d. exponential draws; either way they are
    normalised to sum to one.  Angles are redrawn until every path sits in
    its own grid bin so the strongest path has an unambiguous label.
    """
    if powers is None:
        powers = rng.exponential(size=n_paths)
    powers = np.asarray(powers, dtype=float)
    if powers.shape != (n_paths,) or np.any(powers <= 0):
        raise ValueError("need one positive power per path")
    top = np.sort(powers)[::-1]
    if n_paths > 1 and top[0] == top[1]:
        raise ValueError("the strongest path power must be unique")
    powers = powers / powers.sum()

    for _ in range(max_redraws):
        if on_grid:
            s_tx = beamspace.grid_sines(n_tx)[rng.integers(n_tx, size=n_paths)]
            s_rx = beamspace.grid_sines(n_rx)[rng.integers(n_rx, size=n_paths)]
        else:
            s_tx = rng.uniform(-1.0, 1.0, size=n_paths)
            s_rx = rng.uniform(-1.0, 1.0, size=n_paths)
        delays = rng.uniform(0.0, max_delay, size=n_paths)
        bins = {(beamspace.nearest_grid_index_sin(r, n_rx),
                 beamspace.nearest_grid_index_sin(t, n_tx)) for r, t in zip(s_rx, s_tx)}
        if len(bins) == n_paths:
            break
    else:
        raise ValueError("could not place paths in distinct grid bins")
    paths = tuple(Mpc(aod=float(np.arcsin(t)), aoa=float(np.arcsin(r)),
                      delay=float(d), avg_power=float(g))
                  for t, r, d, g in zip(s_tx, s_rx, delays, powers))
    return MpcSet(paths)
