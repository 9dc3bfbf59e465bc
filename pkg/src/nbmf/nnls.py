"""Nonnegativity-constrained regularized least squares for the W-update.

The update W := argmin_{X >= 0} 0.5 ||V - XH||_F^2 + 0.5 alpha ||X||_F^2
decomposes into one independent k-variable problem per row of V.  Each row
is solved by projected gradient with a backtracking (Armijo) line search
along the projection arc.  Because the objective is quadratic, the
sufficient-decrease test is evaluated exactly from the gradient and the
Gram matrix rather than by re-computing residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DimensionError, ValidationError, as_matrix, as_vector

_BACKTRACK_SHRINK = 0.5
_SUFFICIENT_DECREASE = 1e-4
_MAX_BACKTRACKS = 30


@dataclass(frozen=True)
class NnlsConfig:
    alpha: float = 0.0
    max_inner_iters: int = 300
    grad_tol: float = 1e-8

    def __post_init__(self):
        if self.alpha < 0:
            raise ValidationError("alpha must be >= 0")
        if self.grad_tol <= 0:
            raise ValidationError("grad_tol must be > 0")
        if self.max_inner_iters < 1:
            raise ValidationError("max_inner_iters must be >= 1")


def _projected_gradient(w, g):
    """Gradient with components zeroed where w sits on the boundary and the
    gradient pushes further out (w == 0 and g > 0)."""
    pg = g.copy()
    pg[(w == 0.0) & (g > 0.0)] = 0.0
    return pg


def projected_gradient_norm(v_row, H, w_row, alpha: float) -> float:
    """Norm of the projected gradient of the single-row objective."""
    v_row = as_vector(v_row, "v_row")
    w_row = as_vector(w_row, "w_row")
    H = as_matrix(H, "H")
    k, m = H.shape
    if v_row.shape[0] != m:
        raise DimensionError(f"v_row has length {v_row.shape[0]}, expected {m}")
    if w_row.shape[0] != k:
        raise DimensionError(f"w_row has length {w_row.shape[0]}, expected {k}")
    g = (w_row @ H - v_row) @ H.T + alpha * w_row
    return float(np.linalg.norm(_projected_gradient(w_row, g)))


def _solve_row(A, rhs, w0, cfg: NnlsConfig):
    """Minimize 0.5 w A w^T - rhs.w over w >= 0 by projected gradient."""
    w = np.maximum(w0, 0.0)
    g = w @ A - rhs
    tol = cfg.grad_tol * (1.0 + np.linalg.norm(_projected_gradient(w, g)))
    for _ in range(cfg.max_inner_iters):
        pg = _projected_gradient(w, g)
        if np.linalg.norm(pg) <= tol:
            break
        step = 1.0
        accepted = False
        for _ in range(_MAX_BACKTRACKS):
            w_new = np.maximum(w - step * g, 0.0)
            d = w_new - w
            gd = float(g @ d)
            # exact decrease for the quadratic: f(w+d) - f(w) = g.d + 0.5 d A d
            if (1.0 - _SUFFICIENT_DECREASE) * gd + 0.5 * float(d @ A @ d) <= 0.0:
                accepted = True
                break
            step *= _BACKTRACK_SHRINK
        if not accepted or not d.any():
            break
        w = w_new
        g = w @ A - rhs
    return w


def update_w(V, H, cfg: NnlsConfig, w_init=None) -> np.ndarray:
    """Row-wise constrained least squares fit of W given binary H.

    ``w_init`` warm-starts the solve (the previous W in an alternating
    scheme).  Feature rows of H that are entirely zero leave the matching
    column of W unconstrained at alpha = 0; those columns are set to 0,
    which is also the exact optimum whenever alpha > 0.
    """
    V = as_matrix(V, "V")
    Hm = as_matrix(H, "H")
    n, m = V.shape
    k = Hm.shape[0]
    if Hm.shape[1] != m:
        raise DimensionError(
            f"H has {Hm.shape[1]} columns, expected {m} to match V")
    active = Hm.any(axis=1)
    Ha = Hm[active]
    A = Ha @ Ha.T + cfg.alpha * np.eye(int(active.sum()))
    RHS = V @ Ha.T
    if w_init is not None:
        w_init = as_matrix(w_init, "w_init")
        if w_init.shape != (n, k):
            raise DimensionError(
                f"w_init has shape {w_init.shape}, expected ({n}, {k})")
        W0 = w_init[:, active]
    else:
        W0 = np.zeros((n, int(active.sum())))
    W = np.zeros((n, k))
    for r in range(n):
        W[r, active] = _solve_row(A, RHS[r], W0[r], cfg)
    return W
