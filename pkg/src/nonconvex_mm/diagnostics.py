"""Runtime checks for the convergence theory behind the MM solvers.

Everything here is a computable certificate:

* ``subgradient_residual`` builds the subdifferential member produced by
  one MM step and its Lipschitz bound (the iterate-gap lower bound on
  subgradients);
* ``kkt_residual`` measures the exact distance from 0 to the
  subdifferential of F, which vanishes precisely at critical points;
* ``finite_length`` sums step norms to evidence trajectory summability;
* ``rate_fit`` classifies the tail error decay of a converged run as
  finite / linear / sublinear, mirroring the KL-exponent regimes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ResidualReport",
    "RateFit",
    "subgradient_residual",
    "kkt_residual",
    "finite_length",
    "rate_fit",
    "FINITE",
    "LINEAR",
    "SUBLINEAR",
    "UNDETERMINED",
]

FINITE = "finite"
LINEAR = "linear"
SUBLINEAR = "sublinear"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class ResidualReport:
    """Subgradient certificate for one MM step.

    ``b_vector`` is the penalty-curvature correction (zero for scheme
    "a"), ``B_norm`` the norm of the certified subdifferential member,
    ``bound`` its theoretical Lipschitz bound, and ``kkt`` the exact
    subdifferential distance at the new iterate.
    """

    b_vector: np.ndarray
    B_norm: float
    bound: float
    kkt: float


def _signed_subdiff_bounds(w: np.ndarray, penalty) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise interval of the subdifferential of r at w."""
    t = np.abs(w)
    lo_t, hi_t = penalty.deriv_interval(t)
    lo_t = np.broadcast_to(np.asarray(lo_t, dtype=float), w.shape)
    hi_t = np.broadcast_to(np.asarray(hi_t, dtype=float), w.shape)
    lo = np.where(w > 0, lo_t, np.where(w < 0, -hi_t, -penalty.deriv(0.0)))
    hi = np.where(w > 0, hi_t, np.where(w < 0, -lo_t, penalty.deriv(0.0)))
    return lo, hi


def kkt_residual(w, prob) -> float:
    """Euclidean distance from 0 to the subdifferential of F at w.

    Componentwise: |g_i + sign(w_i) * zeta'(|w_i|)| off zero and
    max(0, |g_i| - zeta'(0)) at zero; the capped-l1 kink uses the
    two-sided interval hull.
    """
    w = np.asarray(w, dtype=float).ravel()
    g = prob.loss.gradient(w)
    lo, hi = _signed_subdiff_bounds(w, prob.penalty)
    dist = np.maximum(0.0, np.maximum(g + lo, -(g + hi)))
    return float(np.linalg.norm(dist))


def subgradient_residual(w_next, w, prob, mu: float, scheme: str) -> ResidualReport:
    """Certificate produced by one MM step from w to w_next.

    Scheme "a" returns A = grad f(w_next) - grad Q_f(w_next | w), a
    member of the subdifferential of F at w_next with
    ||A|| <= (mu + L_f) ||w_next - w||.

    Scheme "b" subtracts the correction
    b_i = sgn(w_next_i) * (zeta'(|w_i|) - zeta'(|w_next_i|)); at zero
    coordinates the free scalar sgn(0) in [-1, 1] is chosen to minimize
    the component, which both certifies membership (the derivative is
    nonincreasing, so the whole sweep stays inside the subdifferential)
    and makes the report the tightest available.  The bound gains the
    penalty curvature term:  ||B|| <= (mu + L_f + L_zeta) ||Delta||.
    """
    if scheme not in ("a", "b"):
        raise ValueError("scheme must be 'a' or 'b'")
    w_next = np.asarray(w_next, dtype=float).ravel()
    w = np.asarray(w, dtype=float).ravel()
    delta = w_next - w
    # grad Q_f(w_next | w) = grad f(w) + mu * (w_next - w)
    A = prob.loss.gradient(w_next) - prob.loss.gradient(w) - mu * delta
    lf = prob.loss.lipschitz
    step = float(np.linalg.norm(delta))

    if scheme == "a":
        b = np.zeros_like(A)
        B = A
        bound = (mu + lf) * step
    else:
        pen = prob.penalty
        if not pen.supports_linearization:
            raise ValueError(f"scheme 'b' residual undefined for {pen.kind} penalty")
        d = pen.deriv(np.abs(w)) - pen.deriv(np.abs(w_next))
        b = np.sign(w_next) * d
        zero = w_next == 0.0
        if np.any(zero):
            dz = d[zero]
            c = np.divide(A[zero], dz, out=np.zeros_like(dz), where=dz != 0.0)
            b[zero] = np.clip(c, -1.0, 1.0) * dz
        B = A - b
        bound = (mu + lf + pen.deriv_lipschitz()) * step

    return ResidualReport(
        b_vector=b,
        B_norm=float(np.linalg.norm(B)),
        bound=float(bound),
        kkt=kkt_residual(w_next, prob),
    )


def finite_length(trace) -> tuple[float, float]:
    """Total trajectory length and the length of its second half.

    A convergent run has a tail that is a vanishing fraction of the
    total, evidencing summability of the step norms.
    """
    if len(trace.iters) == 0:
        raise ValueError("trace is empty")
    steps = np.asarray(trace.step_norm[1:], dtype=float)
    total = float(steps.sum())
    k = len(steps)
    tail = float(steps[(k + 1) // 2:].sum()) if k else 0.0
    return total, tail


def _linfit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line fit returning (slope, intercept, R^2)."""
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot <= 0.0:
        return float(slope), float(intercept), 0.0
    return float(slope), float(intercept), 1.0 - ss_res / ss_tot


@dataclass(frozen=True)
class RateFit:
    """Empirical convergence-regime classification of a trace tail."""

    regime: str
    rate_constant: float
    fit_quality: float


def rate_fit(trace, min_points: int = 20, quality_threshold: float = 0.8) -> RateFit:
    """Classify the decay of e_k = ||w^(k) - w*|| on a converged trace.

    w* is the final iterate and the last 5 iterates are excluded to
    limit self-reference bias.  A geometric fit (log e vs k) and a
    polynomial fit (log e vs log k) compete on R^2; ``finite`` is
    reported when the error hits exactly zero, ``undetermined`` when
    neither model reaches ``quality_threshold`` or the tail is shorter
    than ``min_points``.
    """
    if trace.iterates is None:
        raise ValueError("trace has no recorded iterates; run with record_iterates=True")
    W = trace.iterates
    if len(W) < 2:
        return RateFit(UNDETERMINED, float("nan"), 0.0)
    wstar = W[-1]
    errs = np.array([float(np.linalg.norm(wk - wstar)) for wk in W[:-1]])
    usable = errs[: max(len(errs) - 5, 0)]
    if len(usable) < min_points:
        return RateFit(UNDETERMINED, float("nan"), 0.0)
    if np.any(usable == 0.0):
        return RateFit(FINITE, 0.0, 1.0)

    start = len(usable) // 2
    ks = np.arange(start, len(usable), dtype=float)
    tail = usable[start:]
    logs = np.log(tail)

    slope, _, r2_lin = _linfit(ks, logs)
    rho = float(np.exp(slope))
    mask = ks > 0
    slope_p, _, r2_sub = _linfit(np.log(ks[mask]), logs[mask])
    exponent = -float(slope_p)

    lin_ok = 0.0 < rho < 1.0 and r2_lin >= quality_threshold
    sub_ok = exponent > 0.0 and r2_sub >= quality_threshold
    if lin_ok and (r2_lin >= r2_sub or not sub_ok):
        return RateFit(LINEAR, rho, min(max(r2_lin, 0.0), 1.0))
    if sub_ok:
        return RateFit(SUBLINEAR, exponent, min(max(r2_sub, 0.0), 1.0))
    return RateFit(UNDETERMINED, float("nan"), max(r2_lin, r2_sub, 0.0))
