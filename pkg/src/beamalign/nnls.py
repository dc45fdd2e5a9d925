"""Non-negative least squares for  min_{g >= 0} || B g + sigma2 1 - q ||^2.

The reference solver is the Lawson-Hanson active-set method.  Problems with
more than ``PG_THRESHOLD`` unknowns go to an accelerated projected-gradient
solver with the same stopping rule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from beamalign.errors import InputError

PG_THRESHOLD = 4096


@dataclass
class NnlsSolution:
    gamma: np.ndarray
    iterations: int
    kkt_residual: float
    status: str  # "converged" or "iteration-capped"
    unused_columns: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))
    objective_history: list[float] | None = None

    @property
    def converged(self) -> bool:
        return self.status == "converged"


@dataclass
class DetectionResult:
    index: int  # flat beamspace index
    value: float
    margin: float
    degenerate: bool = False


def _check(B, q):
    B = np.asarray(B, dtype=float)
    q = np.asarray(q, dtype=float)
    if B.ndim != 2 or q.ndim != 1 or B.shape[0] != q.shape[0]:
        raise InputError(f"B {B.shape} and q {q.shape} do not match")
    return B, q


def kkt_residual(B, q, noise_var, gamma) -> float:
    """Largest violation of the NNLS optimality conditions at ``gamma``.

    With r = (q - sigma2) - B gamma and w = B^T r, this is the max of |w_i|
    over the positive coordinates and of max(0, w_i) over the zero ones.
    """
    B, q = _check(B, q)
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (B.shape[1],):
        raise InputError("gamma has the wrong length")
    if np.any(gamma < 0):
        return math.inf
    w = B.T @ (q - noise_var - B @ gamma)
    pos = gamma > 0
    a = np.abs(w[pos]).max(initial=0.0)
    b = np.maximum(w[~pos], 0.0).max(initial=0.0)
    return float(max(a, b))


def _objective(B, d, x):
    r = d - B @ x
    return float(r @ r)


def nnls_solve(B, q, noise_var: float = 0.0, tol: float | None = None,
               max_iter: int | None = None, method: str = "auto",
               track_objective: bool = False, init=None) -> NnlsSolution:
    """Solve the noise-shifted NNLS problem.

    Parameters
    ----------
    B : (rows, cols) array
    q : (rows,) array of measured powers
    noise_var : float
        sigma^2, subtracted from every measurement.
    tol : float, optional
        KKT tolerance; default ``1e-9 * ||B^T (q - sigma2)||_inf``.
    max_iter : int, optional
        Cap on outer iterations; hitting it sets ``status`` instead of raising.
    method : {"auto", "active-set", "projected-gradient"}
    init : array, optional
        Feasible starting point, e.g. the solution for a prefix of the rows.
        Only its support is used by the active-set method.
    """
    B, q = _check(B, q)
    if noise_var < 0:
        raise InputError("noise variance must be non-negative")
    d = q - noise_var
    if tol is None:
        scale = np.abs(B.T @ d).max(initial=0.0)
        tol = 1e-9 * scale if scale > 0 else 1e-300
    if method == "auto":
        method = "projected-gradient" if B.shape[1] > PG_THRESHOLD else "active-set"
    if method == "active-set":
        return _lawson_hanson(B, d, tol, max_iter, track_objective, init)
    if method == "projected-gradient":
        return _projected_gradient(B, d, tol, max_iter, track_objective, init)
    raise InputError(f"unknown method {method!r}")


def _lawson_hanson(B, d, tol, max_iter, track, init=None):
    rows, cols = B.shape
    usable = np.any(B != 0, axis=0)
    unused = np.flatnonzero(~usable)
    if max_iter is None:
        max_iter = 3 * cols + 10
    sub = _Subsolver(B, d)
    x = np.zeros(cols)
    passive = np.zeros(cols, dtype=bool)
    history = [_objective(B, d, x)] if track else None
    it = 0
    status = "converged"
    if init is not None:
        init = np.asarray(init, dtype=float)
        if init.shape != (cols,) or np.any(init < 0):
            raise InputError("init must be a non-negative vector of length cols")
        passive = (init > 0) & usable
        x = np.where(passive, init, 0.0)
        if track:
            history = [_objective(B, d, x)]
        if passive.any():
            x, passive = _feasible_ls(sub, x, passive)
            if track:
                history.append(_objective(B, d, x))
    w = sub.gradient(x)
    # columns whose entry was rejected at once; only possible through rounding
    blocked = np.zeros(cols, dtype=bool)
    while True:
        cand = np.where(~passive & usable & ~blocked, w, -np.inf)
        t = int(np.argmax(cand))
        if cand[t] <= tol:
            break
        if it >= max_iter:
            status = "iteration-capped"
            break
        it += 1
        passive[t] = True
        x, passive = _feasible_ls(sub, x, passive)
        if passive[t]:
            blocked[:] = False
        else:
            blocked[t] = True
        w = sub.gradient(x)
        if track:
            history.append(_objective(B, d, x))
    x = np.maximum(x, 0.0)
    res = _kkt(B, d, x)
    return NnlsSolution(gamma=x, iterations=it, kkt_residual=res, status=status,
                        unused_columns=unused, objective_history=history)


class _Subsolver:
    """Least squares on column subsets through the Gram matrix.

    Cholesky on the normal equations is far cheaper than an SVD per call;
    ill-conditioned subsets fall back to lstsq on the columns themselves.
    """

    def __init__(self, B, d):
        self.B = B
        self.d = d
        self.gram = B.T @ B
        self.corr = B.T @ d

    def solve(self, idx):
        g = self.gram[np.ix_(idx, idx)]
        try:
            c, low = linalg.cho_factor(g, check_finite=False)
            diag = np.abs(np.diag(c))
            if diag.min() > 1e-7 * diag.max():
                return linalg.cho_solve((c, low), self.corr[idx], check_finite=False)
        except linalg.LinAlgError:
            pass
        return np.linalg.lstsq(self.B[:, idx], self.d, rcond=None)[0]

    def gradient(self, x):
        """B^T (d - B x)."""
        return self.corr - self.gram @ x


def _feasible_ls(sub, x, passive):
    """Inner Lawson-Hanson loop: move from feasible ``x`` toward the LS
    solution on the passive set, dropping blocking coordinates, until that
    LS solution is strictly positive."""
    cols = x.shape[0]
    while passive.any():
        idx = np.flatnonzero(passive)
        z = np.zeros(cols)
        z[idx] = sub.solve(idx)
        if np.all(z[idx] > 0):
            return z, passive
        neg = idx[z[idx] <= 0]
        ratios = x[neg] / (x[neg] - z[neg])
        k = int(np.argmin(ratios))
        x = x + ratios[k] * (z - x)
        x[neg[k]] = 0.0
        passive = passive & (x > 0)
        x[~passive] = 0.0
    return x, passive


def _kkt(B, d, x):
    w = B.T @ (d - B @ x)
    pos = x > 0
    return float(max(np.abs(w[pos]).max(initial=0.0), np.maximum(w[~pos], 0.0).max(initial=0.0)))


def _projected_gradient(B, d, tol, max_iter, track, init=None):
    """FISTA with projection onto the non-negative orthant and restart on ascent."""
    rows, cols = B.shape
    usable = np.any(B != 0, axis=0)
    if max_iter is None:
        max_iter = 50000
    lip = np.linalg.norm(B, 2) ** 2
    if lip == 0:
        x = np.zeros(cols)
        return NnlsSolution(x, 0, _kkt(B, d, x), "converged", np.flatnonzero(~usable),
                            [_objective(B, d, x)] if track else None)
    x = np.zeros(cols) if init is None else np.maximum(np.asarray(init, dtype=float), 0.0)
    x[~usable] = 0.0
    y = x.copy()
    t = 1.0
    f_old = _objective(B, d, x)
    history = [f_old] if track else None
    status = "iteration-capped"
    it = 0
    for it in range(1, max_iter + 1):
        g = B.T @ (B @ y - d)
        x_new = np.maximum(y - g / lip, 0.0)
        x_new[~usable] = 0.0
        f_new = _objective(B, d, x_new)
        if f_new > f_old:
            # restart momentum; plain projected step from x is monotone
            y = x.copy()
            t = 1.0
            g = B.T @ (B @ x - d)
            x_new = np.maximum(x - g / lip, 0.0)
            x_new[~usable] = 0.0
            f_new = _objective(B, d, x_new)
        t_new = 0.5 * (1 + math.sqrt(1 + 4 * t * t))
        y = x_new + ((t - 1) / t_new) * (x_new - x)
        x, t, f_old = x_new, t_new, f_new
        if track:
            history.append(f_new)
        if _kkt(B, d, x) <= tol:
            status = "converged"
            break
    return NnlsSolution(gamma=x, iterations=it, kkt_residual=_kkt(B, d, x), status=status,
                        unused_columns=np.flatnonzero(~usable), objective_history=history)


def detect_strongest(solution) -> DetectionResult:
    """Argmax of gamma (smallest index on ties) with its dominance margin."""
    g = np.asarray(getattr(solution, "gamma", solution), dtype=float)
    if g.size == 0:
        raise InputError("empty gamma")
    k = int(np.argmax(g))
    top = g[k]
    if top <= 0:
        return DetectionResult(index=k, value=0.0, margin=math.inf, degenerate=True)
    second = np.max(np.delete(g, k), initial=0.0)
    margin = math.inf if second <= 0 else float(top) / float(second)
    return DetectionResult(index=k, value=float(top), margin=margin)


def threshold_support(solution, threshold: float) -> np.ndarray:
    """Flat indices whose gamma is at least ``threshold``."""
    g = np.asarray(getattr(solution, "gamma", solution), dtype=float)
    return np.flatnonzero(g >= threshold)
