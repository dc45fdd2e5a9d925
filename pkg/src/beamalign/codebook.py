"""Pseudo-random probing (BS) and sensing (UE) codebooks and the binary sensing matrix."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from beamalign.errors import ConfigurationError


@dataclass(frozen=True)
class Codebook:
    """Angular supports indexed by (slot, chain).

    ``supports`` has shape ``(slots, chains, spreading)`` and holds sorted,
    distinct 0-based beamspace indices in ``[0, dimension)``.
    """
    supports: np.ndarray
    dimension: int
    side: str = "BS"
    seed: int | None = None

    def __post_init__(self):
        s = np.asarray(self.supports)
        if s.ndim != 3:
            raise ConfigurationError("supports must have shape (slots, chains, spreading)")
        if s.size and (s.min() < 0 or s.max() >= self.dimension):
            raise ConfigurationError("support index out of range")
        srt = np.sort(s, axis=-1)
        if s.shape[-1] > 1 and np.any(np.diff(srt, axis=-1) == 0):
            raise ConfigurationError("support indices must be distinct")
        srt.setflags(write=False)
        object.__setattr__(self, "supports", srt)

    @property
    def slots(self) -> int:
        return self.supports.shape[0]

    @property
    def chains(self) -> int:
        return self.supports.shape[1]

    @property
    def spreading(self) -> int:
        return self.supports.shape[2]

    def indicators(self) -> np.ndarray:
        """0/1 array of shape (slots, chains, dimension)."""
        out = np.zeros((self.slots, self.chains, self.dimension))
        np.put_along_axis(out, self.supports, 1.0, axis=-1)
        return out

    def to_json(self) -> str:
        return json.dumps({
            "side": self.side,
            "dimension": int(self.dimension),
            "seed": self.seed,
            "supports": self.supports.tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "Codebook":
        d = json.loads(text)
        return cls(supports=np.asarray(d["supports"], dtype=int),
                   dimension=int(d["dimension"]), side=d.get("side", "BS"),
                   seed=d.get("seed"))


def generate_codebook(seed, slots: int, chains: int, dimension: int, spreading: int,
                      side: str = "BS") -> Codebook:
    """i.i.d. uniform ``spreading``-subsets of ``range(dimension)`` per (slot, chain)."""
    if not 1 <= spreading <= dimension:
        raise ConfigurationError(
            f"spreading factor {spreading} must lie in [1, {dimension}]")
    if slots < 1 or chains < 1:
        raise ConfigurationError("slots and chains must be >= 1")
    rng = np.random.default_rng(seed)
    keys = rng.random((slots, chains, dimension))
    supports = np.argsort(keys, axis=-1, kind="stable")[..., :spreading]
    return Codebook(supports=supports, dimension=dimension, side=side,
                    seed=seed if isinstance(seed, int) else None)


def beamforming_vector(support, dft: np.ndarray) -> np.ndarray:
    """Antenna weights F 1_support / sqrt(kappa); unit norm."""
    support = np.asarray(support)
    coeff = np.zeros(dft.shape[1])
    coeff[support] = 1.0 / np.sqrt(len(support))
    return dft @ coeff


def beamspace_weights(support, dimension: int) -> np.ndarray:
    coeff = np.zeros(dimension)
    coeff[np.asarray(support)] = 1.0 / np.sqrt(len(support))
    return coeff


def sensing_row(bs_support, ue_support, n_tx: int, n_rx: int) -> np.ndarray:
    """1_U kron 1_V: ones at flat index col * n_rx + row for col in U, row in V."""
    u = np.zeros(n_tx)
    u[np.asarray(bs_support)] = 1.0
    v = np.zeros(n_rx)
    v[np.asarray(ue_support)] = 1.0
    return np.kron(u, v)


def assemble_B(bs_cb: Codebook, ue_cb: Codebook, slots: int) -> np.ndarray:
    """Sensing matrix with m n T rows ordered (slot, BS chain, UE chain)."""
    if slots > bs_cb.slots or slots > ue_cb.slots:
        raise ConfigurationError(f"codebooks cover fewer than {slots} slots")
    u = bs_cb.indicators()[:slots]  # (T, m, M)
    v = ue_cb.indicators()[:slots]  # (T, n, N)
    rows = np.einsum("tic,tjr->tijcr", u, v)
    return rows.reshape(slots * bs_cb.chains * ue_cb.chains,
                        bs_cb.dimension * ue_cb.dimension)


def row_index(s: int, i: int, j: int, m: int, n: int) -> int:
    """Row of B (and entry of q) holding slot s, BS chain i, UE chain j."""
    return (s * m + i) * n + j
