"""Deterministic extremization over low-dimensional boxes.

A coarse uniform scan (cell centers) keeps the best handful of cells, then each
kept cell is refined by repeated subdivision: nine samples per axis, recenter
on the best, shrink the cell by a factor of four. No randomness anywhere, so
identical inputs give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = ["ExtremizeResult", "extremize"]


@dataclass
class ExtremizeResult:
    value: float
    point: np.ndarray
    tol: float  # final cell diameter times a local Lipschitz estimate
    n_evals: int


def extremize(
    objective,
    bounds,
    mode: str = "inf",
    grid_n=1024,
    refine_rounds: int = 6,
    keep_cells: int = 8,
    extra_points=None,
) -> ExtremizeResult:
    """Extremize a vectorized objective over a box.

    objective maps an (N, d) array of parameter points to (N,) values; bounds
    is a sequence of (lo, hi) pairs; grid_n is the coarse resolution per axis
    (int or per-axis tuple, at least 64). extra_points are exact parameter
    points injected into the coarse scan (e.g. polygon vertex angles).
    """
    if mode not in ("inf", "sup"):
        raise InputError(f"mode must be 'inf' or 'sup', got {mode!r}")
    bounds = [(float(lo), float(hi)) for lo, hi in bounds]
    d = len(bounds)
    if d < 1 or any(hi <= lo for lo, hi in bounds):
        raise InputError("bounds must be nonempty (lo, hi) pairs with lo < hi")
    ns = tuple(grid_n) if isinstance(grid_n, (tuple, list)) else (int(grid_n),) * d
    if len(ns) != d or any(int(n) < 64 for n in ns):
        raise InputError("grid_n must be at least 64 per dimension")
    if refine_rounds < 1:
        raise InputError("refine_rounds must be at least 1")
    sign = 1.0 if mode == "sup" else -1.0

    axes = [lo + (np.arange(n) + 0.5) * (hi - lo) / n for (lo, hi), n in zip(bounds, ns)]
    widths0 = np.array([(hi - lo) / n for (lo, hi), n in zip(bounds, ns)])
    mesh = np.meshgrid(*axes, indexing="ij")
    P = np.stack([m.ravel() for m in mesh], axis=-1)
    if extra_points is not None and len(extra_points) > 0:
        E = np.array(extra_points, dtype=float).reshape(-1, d)
        for k in range(d):
            E[:, k] = np.clip(E[:, k], bounds[k][0], bounds[k][1])
        P = np.concatenate([P, E], axis=0)

    vals = np.asarray(objective(P), dtype=float)
    if vals.shape != (len(P),):
        raise InputError("objective must return one value per point")
    n_evals = len(P)
    score = sign * vals
    k = min(int(keep_cells), len(P))
    top = np.argpartition(-score, k - 1)[:k]
    top = top[np.argsort(-score[top], kind="stable")]

    best_val = float(vals[top[0]])
    best_pt = P[top[0]].copy()
    best_tol = float("nan")
    for idx in top:
        center = P[idx].copy()
        width = widths0.copy()
        cand_val = float(vals[idx])
        cand_pt = P[idx].copy()
        lip = 0.0
        for r in range(refine_rounds):
            grids = [
                np.clip(center[a] + np.linspace(-0.5, 0.5, 9) * width[a], bounds[a][0], bounds[a][1])
                for a in range(d)
            ]
            mesh = np.meshgrid(*grids, indexing="ij")
            Q = np.stack([m.ravel() for m in mesh], axis=-1)
            qv = np.asarray(objective(Q), dtype=float)
            n_evals += len(Q)
            j = int(np.argmax(sign * qv))
            if sign * qv[j] >= sign * cand_val:
                cand_val = float(qv[j])
                cand_pt = Q[j].copy()
            center = Q[j].copy()
            if r == refine_rounds - 1:
                V = qv.reshape((9,) * d)
                for a in range(d):
                    step = width[a] / 8.0
                    if step > 0.0 and V.shape[a] > 1:
                        lip = max(lip, float(np.max(np.abs(np.diff(V, axis=a))) / step))
            width = width / 4.0
        tol = lip * float(np.sqrt(np.sum(width * width)))
        if (sign * cand_val > sign * best_val) or np.isnan(best_tol):
            best_val, best_pt, best_tol = cand_val, cand_pt, tol
    return ExtremizeResult(value=best_val, point=best_pt, tol=best_tol, n_evals=n_evals)
