"""Independent reference implementations used only by the tests."""
from __future__ import annotations

import itertools

import numpy as np


def nnls_subset_oracle(B, d, max_support=None, tol=1e-10):
    """Exhaustive active-set search for min ||B x - d||^2, x >= 0.

    Supports are visited by increasing size.  For each one the unconstrained
    least-squares problem restricted to the support is solved; the first
    strictly positive solution whose gradient is non-positive off the
    support is optimal (the KKT conditions are sufficient for this convex
    problem).  Returns (x, support) or (None, None) if nothing certifies.
    """
    B = np.asarray(B, dtype=float)
    d = np.asarray(d, dtype=float)
    rows, cols = B.shape
    w0 = B.T @ d
    if np.all(w0 <= tol * max(1.0, np.abs(w0).max())):
        return np.zeros(cols), ()
    top = min(rows, cols) if max_support is None else max_support
    G = B.T @ B
    scale = max(1.0, np.abs(w0).max())
    for size in range(1, top + 1):
        subsets = np.array(list(itertools.combinations(range(cols), size)))
        Gs = G[subsets[:, :, None], subsets[:, None, :]]
        rhs = w0[subsets]
        ok = np.abs(np.linalg.det(Gs)) > 1e-12
        if not ok.any():
            continue
        subsets, Gs, rhs = subsets[ok], Gs[ok], rhs[ok]
        xs = np.linalg.solve(Gs, rhs[..., None])[..., 0]
        for S, xs_S in zip(subsets[(xs > 0).all(axis=1)], xs[(xs > 0).all(axis=1)]):
            x = np.zeros(cols)
            x[S] = xs_S
            w = B.T @ (d - B @ x)
            if np.max(w) <= tol * scale and np.max(np.abs(w[S])) <= tol * scale:
                return x, tuple(int(s) for s in S)
    return None, None


def unique_nonnegative_solution(B, d, x, tol=1e-9):
    """True when ``x`` is the only non-negative solution of B x = d.

    Any other solution must put weight outside supp(x); an LP maximising
    that weight certifies it is zero, and full column rank on the support
    rules out a second solution inside it.
    """
    from scipy.optimize import linprog
    S = x > 0
    if np.linalg.matrix_rank(B[:, S]) < S.sum():
        return False
    if S.all():
        return True
    res = linprog(np.where(S, 0.0, -1.0), A_eq=B, b_eq=d, bounds=(0, None), method="highs")
    return res.status == 0 and -res.fun <= tol


def omp_exhaustive(A, y, k):
    """Best k-support least-squares fit by trying every support."""
    best, best_S = np.inf, None
    for S in itertools.combinations(range(A.shape[1]), k):
        sub = A[:, S]
        c, *_ = np.linalg.lstsq(sub, y, rcond=None)
        r = np.linalg.norm(y - sub @ c)
        if r < best:
            best, best_S = r, S
    return best_S, best


def dirichlet_magnitude(size, sin_angle):
    """|sum_n exp(-j 2 pi n psi_k)| / sqrt(size) evaluated by the sine ratio."""
    k = np.arange(size)
    psi = k / size - sin_angle / 2 - 0.5
    num = np.sin(np.pi * psi * size)
    den = np.sin(np.pi * psi)
    out = np.empty(size)
    small = np.abs(den) < 1e-12
    out[~small] = np.abs(num[~small] / den[~small]) / np.sqrt(size)
    out[small] = np.sqrt(size)
    return out
