"""Reference schemes: OMP on complex observations and an interactive-bisection overhead model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from beamalign.errors import ConfigurationError, InputError
from beamalign.nnls import DetectionResult


@dataclass
class OmpResult:
    support: list[int]
    coefficients: np.ndarray
    residual_norms: list[float]

    def strongest(self) -> int:
        return self.support[int(np.argmax(np.abs(self.coefficients)))]


def omp_estimate(A, y, sparsity: int, normalize: bool = False) -> OmpResult:
    """Orthogonal matching pursuit.

    Each step picks the column with the largest |a_k^H r| (divided by
    ||a_k|| when ``normalize``), then refits all picked columns by least
    squares.  ``residual_norms[0]`` is ||y||.
    """
    A = np.asarray(A)
    y = np.asarray(y)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise InputError(f"dictionary {A.shape} and observations {y.shape} do not match")
    if sparsity < 1:
        raise ConfigurationError("sparsity must be >= 1")
    if sparsity > A.shape[0]:
        raise ConfigurationError(
            f"sparsity {sparsity} exceeds the {A.shape[0]} available measurements")
    norms = np.linalg.norm(A, axis=0)
    live = norms > 0
    scale = np.where(live, norms, 1.0) if normalize else np.ones(A.shape[1])
    support: list[int] = []
    r = y.astype(complex)
    coef = np.zeros(0, dtype=complex)
    history = [float(np.linalg.norm(r))]
    for _ in range(sparsity):
        score = np.abs(A.conj().T @ r) / scale
        score[~live] = -np.inf
        score[support] = -np.inf
        k = int(np.argmax(score))
        if not np.isfinite(score[k]):
            break
        support.append(k)
        coef = np.linalg.lstsq(A[:, support], y, rcond=None)[0]
        r = y - A[:, support] @ coef
        history.append(float(np.linalg.norm(r)))
    return OmpResult(support=support, coefficients=coef, residual_norms=history)


@dataclass
class JointOmpResult:
    support: list[int]
    coefficients: np.ndarray  # (groups, len(support))
    residual_norms: list[float]

    def strongest(self) -> int:
        energy = np.sum(np.abs(self.coefficients) ** 2, axis=0)
        return self.support[int(np.argmax(energy))]


def omp_estimate_joint(dictionaries, observations, sparsity: int) -> JointOmpResult:
    """Simultaneous OMP: one unknown per group, all sharing a support.

    ``dictionaries[g]`` is (rows_g, cols) and ``observations[g]`` is
    (rows_g,).  The picked column maximises sum_g |A_g^H r_g|^2.
    """
    As = [np.asarray(A) for A in dictionaries]
    ys = [np.asarray(y).astype(complex) for y in observations]
    if not As or len(As) != len(ys):
        raise InputError("need one observation vector per dictionary")
    cols = As[0].shape[1]
    if any(A.shape[1] != cols or A.shape[0] != y.shape[0] for A, y in zip(As, ys)):
        raise InputError("dictionary and observation shapes do not match")
    if sparsity < 1:
        raise ConfigurationError("sparsity must be >= 1")
    if sparsity > min(A.shape[0] for A in As):
        raise ConfigurationError("sparsity exceeds the measurements of some group")
    live = np.zeros(cols, dtype=bool)
    for A in As:
        live |= np.any(A != 0, axis=0)
    res = [y.copy() for y in ys]
    support: list[int] = []
    coef = np.zeros((len(As), 0), dtype=complex)
    history = [float(np.sqrt(sum(np.vdot(r, r).real for r in res)))]
    for _ in range(sparsity):
        score = sum(np.abs(A.conj().T @ r) ** 2 for A, r in zip(As, res))
        score[~live] = -np.inf
        score[support] = -np.inf
        k = int(np.argmax(score))
        if not np.isfinite(score[k]):
            break
        support.append(k)
        coef = np.array([np.linalg.lstsq(A[:, support], y, rcond=None)[0]
                         for A, y in zip(As, ys)])
        res = [y - A[:, support] @ c for A, y, c in zip(As, ys, coef)]
        history.append(float(np.sqrt(sum(np.vdot(r, r).real for r in res))))
    return JointOmpResult(support=support, coefficients=coef, residual_norms=history)


def omp_dictionary(B_rows: np.ndarray, p_dim: float, n: int, kappa_u: int,
                   kappa_v: int) -> np.ndarray:
    """Rows sqrt(p_dim / n) g^H for flat-top beams.

    g = conj(u_check) kron v_check has 1/sqrt(kappa_u kappa_v) exactly on the
    probed bins, so it is a scaled copy of the binary sensing row.
    """
    return math.sqrt(p_dim / n) / math.sqrt(kappa_u * kappa_v) * np.asarray(B_rows, dtype=float)


def omp_beam_align(B: np.ndarray, observations: np.ndarray, slots: int, sparsity: int,
                   p_dim: float, n: int, kappa_u: int, kappa_v: int,
                   subcarriers: str = "all", mode: str = "stacked") -> DetectionResult:
    """Beam alignment by OMP with the channel assumed fixed over ``slots`` slots.

    ``B`` holds the sensing rows ordered (slot, i, j); ``observations`` has
    shape (T, m, n, F') with one symbol-averaged observation per comb
    subcarrier.  In ``stacked`` mode every observation of the first
    ``slots`` slots is fitted by a single beamspace channel.  In ``joint``
    mode each comb subcarrier keeps its own channel and only the support is
    shared (simultaneous OMP).
    """
    obs = np.asarray(observations)
    T, m, nn, F = obs.shape
    if slots > T:
        raise InputError(f"only {T} slots observed, asked for {slots}")
    if subcarriers == "one":
        obs = obs[..., :1]
    elif subcarriers != "all":
        raise ConfigurationError("subcarriers must be 'all' or 'one'")
    F = obs.shape[-1]
    D = omp_dictionary(B[: slots * m * nn], p_dim, n, kappa_u, kappa_v)
    if mode == "stacked":
        A = np.repeat(D, F, axis=0)
        y = obs[:slots].reshape(-1)
        res = omp_estimate(A, y, min(sparsity, A.shape[0]))
        mags = np.abs(res.coefficients)
    elif mode == "joint":
        D = D.reshape(slots, m, nn, -1)
        As, ys = [], []
        for i in range(m):
            Ai = D[:, i].reshape(slots * nn, -1)
            for f in range(F):
                As.append(Ai)
                ys.append(obs[:slots, i, :, f].reshape(-1))
        res = omp_estimate_joint(As, ys, min(sparsity, slots * nn))
        mags = np.sqrt(np.sum(np.abs(res.coefficients) ** 2, axis=0))
    else:
        raise ConfigurationError("mode must be 'stacked' or 'joint'")
    order = np.argsort(-mags, kind="stable")
    top = res.support[order[0]]
    second = mags[order[1]] if len(order) > 1 else 0.0
    margin = math.inf if second == 0 else float(mags[order[0]] / second)
    return DetectionResult(index=int(top), value=float(mags[order[0]]), margin=margin)


@dataclass(frozen=True)
class BisectionModel:
    """Per-user training cost of an interactive bisection search."""
    stages: int
    slots_per_stage: int = 1
    feedback_cost_slots: int = 0

    def __post_init__(self):
        if min(self.stages, self.slots_per_stage, self.feedback_cost_slots) < 0:
            raise ConfigurationError("bisection model fields must be non-negative")

    @classmethod
    def for_arrays(cls, n_tx: int, n_rx: int, m: int, feedback_cost_slots: int = 0):
        """ceil(log2 max(M, N)) halving stages; each probes 4 sub-sections with m beams per slot."""
        stages = math.ceil(math.log2(max(n_tx, n_rx))) if max(n_tx, n_rx) > 1 else 0
        return cls(stages=stages, slots_per_stage=math.ceil(4 / m),
                   feedback_cost_slots=feedback_cost_slots)


def bisection_user_time(model: BisectionModel) -> int:
    return model.stages * (model.slots_per_stage + model.feedback_cost_slots)


def bisection_fraction(users: int, model: BisectionModel, slots) -> np.ndarray:
    """Fraction of ``users`` aligned after each T when served one after another."""
    t = np.asarray(slots)
    per_user = bisection_user_time(model)
    if per_user == 0:
        return np.ones(t.shape)
    return np.minimum(1.0, np.floor(t / per_user) / users)


def scalability_curve(users: int, model: BisectionModel, slots, nnls_pd=None) -> dict:
    """K(T)/K for the interactive baseline and, if given, for the broadcast scheme.

    The broadcast scheme trains every user at once, so its fraction is the
    per-user detection probability regardless of ``users``.
    """
    if users < 1:
        raise ConfigurationError("need at least one user")
    out = {"bisection": bisection_fraction(users, model, slots)}
    if nnls_pd is not None:
        out["nnls"] = np.asarray(nnls_pd, dtype=float).copy()
    return out
