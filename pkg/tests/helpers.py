"""Independent oracles shared by the test modules.

Everything here re-derives expected behavior from first principles
(table formulas, grid search, finite differences, bisection) without
touching the package's own minimization or derivative code paths, so a
bug cannot hide on both sides of an assertion.
"""

import math

import numpy as np


def zeta_reference(kind: str, t, **params):
    """Scalar penalty formulas, straight from the definitions."""
    t = np.abs(np.asarray(t, dtype=float))
    if kind == "log":
        lam, theta = params["lam"], params["theta"]
        return lam / math.log(theta + 1.0) * np.log(1.0 + theta * t)
    if kind == "log_eps":
        lam, eps = params["lam"], params["eps"]
        return lam * np.log(1.0 + t / eps)
    if kind == "scad":
        lam, theta = params["lam"], params["theta"]
        mid = -(t**2 - 2.0 * theta * lam * t + lam**2) / (2.0 * (theta - 1.0))
        return np.where(t <= lam, lam * t,
                        np.where(t <= theta * lam, mid, (theta + 1.0) * lam**2 / 2.0))
    if kind == "mcp":
        lam, gamma = params["lam"], params["gamma"]
        return np.where(t < lam * gamma, lam * (t - t**2 / (2.0 * lam * gamma)),
                        lam**2 * gamma / 2.0)
    if kind == "capped_l1":
        lam, theta = params["lam"], params["theta"]
        return lam * np.minimum(t, theta)
    raise ValueError(kind)


def prox_grid_oracle(kind: str, u: float, alpha: float, step: float = 1e-4,
                     margin: float = 1.0, **params) -> tuple[float, float]:
    """Brute-force scalar prox: grid minimum over [-|u|-margin, |u|+margin].

    Returns (argmin, min objective value).
    """
    hi = abs(u) + margin
    grid = np.arange(-hi, hi + step / 2, step)
    obj = (grid - u) ** 2 / (2.0 * alpha) + zeta_reference(kind, grid, **params)
    j = int(np.argmin(obj))
    return float(grid[j]), float(obj[j])


def fd_gradient(fun, w: np.ndarray) -> np.ndarray:
    """Central finite differences with h = 1e-5 * (1 + |w_i|)."""
    w = np.asarray(w, dtype=float)
    g = np.zeros_like(w)
    for i in range(w.size):
        h = 1e-5 * (1.0 + abs(w[i]))
        e = np.zeros_like(w)
        e[i] = h
        g[i] = (fun(w + e) - fun(w - e)) / (2.0 * h)
    return g


def soft_threshold_bisect(z: float, omega: float, mu: float, iters: int = 200) -> float:
    """Solve min_v mu/2 (v - z)^2 + omega |v| by bisecting the optimality
    condition; completely independent of any closed form.
    """
    if omega < 0 or mu <= 0:
        raise ValueError("need omega >= 0 and mu > 0")
    # 0 is optimal iff |mu * z| <= omega
    if abs(mu * z) <= omega:
        return 0.0
    s = 1.0 if z > 0 else -1.0

    def deriv(v):
        return mu * (v - z) + omega * s

    lo, hi = 0.0, abs(z)
    # derivative (along the sign branch) is increasing in |v|
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if deriv(s * mid) * s > 0:
            hi = mid
        else:
            lo = mid
    return s * 0.5 * (lo + hi)


def prox_gradient_reference(grad, lipschitz: float, l1: float, box, x0: np.ndarray,
                            tol: float = 1e-12, max_iter: int = 200_000) -> np.ndarray:
    """Plain proximal-gradient loop for min smooth + l1*|x|_1 + box indicator."""
    x = np.asarray(x0, dtype=float).copy()
    step = 1.0 / lipschitz
    for _ in range(max_iter):
        z = x - step * grad(x)
        x_new = np.sign(z) * np.maximum(np.abs(z) - l1 * step, 0.0)
        if box is not None:
            x_new = np.clip(x_new, box[0], box[1])
        if np.max(np.abs(x_new - x)) <= tol:
            return x_new
        x = x_new
    return x


def read_csv_columns(path):
    """Line-by-line CSV reader that shares nothing with the package."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = lines[0].split(",")
    rows = [ln.split(",") for ln in lines[1:] if ln]
    return header, rows
