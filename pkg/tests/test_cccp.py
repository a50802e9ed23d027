import numpy as np
import pytest

from nonconvex_mm import (
    CappedL1Penalty,
    CccpConfig,
    Dataset,
    DcProblem,
    LeastSquaresLoss,
    McpPenalty,
    MmConfig,
    ProblemInstance,
    ScadPenalty,
    SyntheticSpec,
    UnsupportedPenaltyError,
    cccp_descent_check,
    cccp_step,
    dc_decompose,
    dc_problem_from_penalty,
    run_cccp,
    run_mm,
    synth_generate,
)

from helpers import prox_gradient_reference, zeta_reference


def full_rank_ls(seed=0, n=100, p=20):
    spec = SyntheticSpec(n=n, p=p, sparsity=5, noise_sd=0.3, seed=seed,
                         task="regression")
    data, _ = synth_generate(spec)
    return LeastSquaresLoss(data)


# ----------------------------------------------------------- decomposition
def test_mcp_decomposition_closed_form():
    kappa, h = dc_decompose(McpPenalty(lam=1.0, gamma=2.0))
    assert kappa == pytest.approx(1.0)
    for t in np.linspace(-1.9, 1.9, 41):
        assert h.value(t) == pytest.approx(t * t / 4.0, abs=1e-14)
    for t in (2.0, 3.5, -2.7):
        assert h.value(t) == pytest.approx(abs(t) - 1.0, abs=1e-14)
    assert h.value(0.0) == 0.0
    assert h.deriv(0.0) == 0.0


def test_scad_decomposition_beyond_flat_region():
    # lam=1, theta=3: kappa=1 and the flat value is (theta+1)*lam^2/2 = 2
    kappa, h = dc_decompose(ScadPenalty(lam=1.0, theta=3.0))
    assert kappa == pytest.approx(1.0)
    for t in (3.0, 4.0, 7.7):
        assert h.value(t) == pytest.approx(t - 2.0, rel=1e-14)


@pytest.mark.parametrize("kind,pen,params", [
    ("mcp", McpPenalty(lam=0.7, gamma=2.5), {"lam": 0.7, "gamma": 2.5}),
    ("scad", ScadPenalty(lam=0.7, theta=3.5), {"lam": 0.7, "theta": 3.5}),
    ("log", __import__("nonconvex_mm").LogPenalty(lam=0.7, theta=2.0),
     {"lam": 0.7, "theta": 2.0}),
])
def test_decomposition_exact_on_grid(kind, pen, params):
    kappa, h = dc_decompose(pen)
    t = np.linspace(-6.0, 6.0, 10_000)
    recon = kappa * np.abs(t) - h.value(t)
    np.testing.assert_allclose(recon, zeta_reference(kind, t, **params),
                               rtol=0, atol=1e-12)


def test_remainder_is_midpoint_convex():
    rng = np.random.default_rng(0)
    _, h = dc_decompose(ScadPenalty(lam=0.5, theta=4.0))
    for _ in range(500):
        t1, t2 = rng.uniform(-5, 5, size=2)
        mid = h.value(0.5 * (t1 + t2))
        assert mid <= 0.5 * h.value(t1) + 0.5 * h.value(t2) + 1e-12


def test_capped_l1_has_no_smooth_decomposition():
    with pytest.raises(UnsupportedPenaltyError):
        dc_decompose(CappedL1Penalty(lam=1.0, theta=1.0))


def test_gamma_zero_refused():
    loss = full_rank_ls()
    with pytest.raises(ValueError):
        DcProblem(loss=loss, l1_weight=0.5, remainder=None, gamma_u=0.0)


# -------------------------------------------------------------- inner solve
def test_convex_subproblem_orthonormal_design_is_soft_thresholding():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(30, 6)))
    X = q * np.sqrt(30)
    y = rng.normal(size=30) * 2
    loss = LeastSquaresLoss(Dataset(X=X, y=y, task="regression"))
    kappa = 0.4
    prob = DcProblem(loss=loss, l1_weight=kappa, remainder=None, gamma_u=1.0)
    cfg = CccpConfig(inner_tol=1e-12)
    out, info = cccp_step(np.zeros(6), prob, cfg)
    what = X.T @ y / 30
    expected = np.sign(what) * np.maximum(np.abs(what) - kappa, 0.0)
    np.testing.assert_allclose(out, expected, atol=1e-10)
    assert not info.inexact


def test_cccp_step_fixed_point():
    loss = full_rank_ls(seed=2)
    prob = dc_problem_from_penalty(loss, McpPenalty(lam=0.3, gamma=3.0))
    cfg = CccpConfig(tol=1e-12, inner_tol=1e-12, max_iter=300)
    trace = run_cccp(prob, cfg)
    assert trace.converged
    out, _ = cccp_step(trace.final_w, prob, cfg)
    assert np.max(np.abs(out - trace.final_w)) <= 1e-9


def test_cccp_step_1d_grid_oracle():
    loss = LeastSquaresLoss(Dataset(X=np.array([[1.3]]), y=np.array([1.8]),
                                    task="regression"))
    pen = McpPenalty(lam=0.5, gamma=2.0)
    prob = dc_problem_from_penalty(loss, pen)
    cfg = CccpConfig(inner_tol=1e-12)
    w = np.array([0.4])
    out, _ = cccp_step(w, prob, cfg)
    gv = prob.v_grad(w)[0]
    grid = np.arange(-5.0, 5.0001, 1e-4)
    objs = [loss.value([g]) + prob.l1_weight * abs(g) - gv * g for g in grid]
    assert abs(out[0] - grid[int(np.argmin(objs))]) <= 1e-3


# --------------------------------------------------------------- outer loop
def test_pure_convex_case_matches_reference_solver():
    loss = full_rank_ls(seed=3, n=60, p=10)
    kappa = 0.3
    prob = DcProblem(loss=loss, l1_weight=kappa, remainder=None, gamma_u=0.5)
    trace = run_cccp(prob, CccpConfig(tol=1e-12, inner_tol=1e-12, max_iter=50))
    ref = prox_gradient_reference(loss.gradient, loss.lipschitz, kappa, None,
                                  np.zeros(10))
    ref_obj = loss.value(ref) + kappa * np.sum(np.abs(ref))
    assert trace.final_objective == pytest.approx(ref_obj, abs=1e-6)
    # the descent inequality holds with gamma_u in the purely convex case too
    ok, worst = cccp_descent_check(trace)
    assert ok and worst >= -1e-9


def test_mcp_run_descends_and_reaches_small_residual():
    loss = full_rank_ls(seed=4)
    prob = dc_problem_from_penalty(loss, McpPenalty(lam=0.25, gamma=3.0))
    trace = run_cccp(prob, CccpConfig(tol=1e-10, inner_tol=1e-12, max_iter=300))
    assert trace.converged
    objs = trace.objective
    assert all(a >= b - 1e-10 for a, b in zip(objs, objs[1:]))
    assert trace.residual[-1] <= 1e-6
    ok, worst = cccp_descent_check(trace)
    assert ok and worst >= -1e-9


def test_start_at_critical_point_terminates_immediately():
    loss = full_rank_ls(seed=5)
    prob = dc_problem_from_penalty(loss, McpPenalty(lam=0.25, gamma=3.0))
    cfg = CccpConfig(tol=1e-10, inner_tol=1e-12, max_iter=300)
    first = run_cccp(prob, cfg)
    again = run_cccp(prob, cfg, w0=first.final_w)
    assert again.converged and again.num_steps() == 1
    assert again.step_norm[1] <= 1e-10


def test_residual_bound_holds_on_every_step():
    loss = full_rank_ls(seed=6)
    prob = dc_problem_from_penalty(loss, ScadPenalty(lam=0.3, theta=3.7))
    trace = run_cccp(prob, CccpConfig(tol=1e-10, inner_tol=1e-11, max_iter=300))
    lv = prob.v_lipschitz()
    for k in range(1, len(trace.iters)):
        assert trace.residual[k] <= lv * trace.step_norm[k] + 1e-10


def test_descent_check_vacuous_on_single_row():
    tr_loss = full_rank_ls(seed=7)
    prob = dc_problem_from_penalty(tr_loss, McpPenalty(lam=0.3, gamma=2.0))
    from nonconvex_mm import IterateTrace
    tr = IterateTrace()
    tr.append(0, prob.objective(np.zeros(prob.p)), 0.0, 0.0, 0.0)
    tr.meta = {"gamma_u": prob.gamma_u, "inner_tol": 1e-12}
    ok, worst = cccp_descent_check(tr)
    assert ok and worst == 0.0


def test_box_constraint_feasible_exactly():
    loss = full_rank_ls(seed=8)
    box = (-0.5, 0.5)
    prob = dc_problem_from_penalty(loss, McpPenalty(lam=0.2, gamma=3.0), box=box)
    trace = run_cccp(prob, CccpConfig(tol=1e-10, inner_tol=1e-12, max_iter=300))
    for w in trace.iterates:
        assert np.all(w >= -0.5) and np.all(w <= 0.5)
    assert np.max(np.abs(trace.final_w)) <= 0.5


def test_ridge_changes_objective_and_is_recorded():
    loss = full_rank_ls(seed=9)
    pen = McpPenalty(lam=0.3, gamma=3.0)
    plain = dc_problem_from_penalty(loss, pen)
    ridged = dc_problem_from_penalty(loss, pen, ridge=0.7)
    w = np.full(loss.data.p, 0.3)
    assert ridged.objective(w) == pytest.approx(
        plain.objective(w) + 0.35 * float(w @ w))
    assert ridged.gamma_u == pytest.approx(plain.gamma_u + 0.7)


def test_dc_objective_reconstructs_penalized_objective():
    loss = full_rank_ls(seed=10)
    pen = McpPenalty(lam=0.4, gamma=2.5)
    dc = dc_problem_from_penalty(loss, pen)
    mm = ProblemInstance(loss=loss, penalty=pen)
    rng = np.random.default_rng(11)
    for _ in range(20):
        w = rng.normal(size=loss.data.p)
        assert dc.objective(w) == pytest.approx(mm.objective(w), rel=1e-12)


def test_lla_correspondence_on_1d_toy():
    # quadratic f with curvature exactly L_f: the CCCP inner subproblem is
    # solved by a single prox step, so CCCP and MM scheme (b) coincide
    loss = LeastSquaresLoss(Dataset(X=np.array([[1.0]]), y=np.array([1.2]),
                                    task="regression"))
    pen = McpPenalty(lam=0.3, gamma=2.0)
    mm_prob = ProblemInstance(loss=loss, penalty=pen)
    dc_prob = dc_problem_from_penalty(loss, pen)
    with pytest.warns(UserWarning):
        mm_trace = run_mm(mm_prob, MmConfig(scheme="b", rho=1.0, max_iter=40,
                                            tol=0.0),
                          w0=np.array([0.05]))
    dc_trace = run_cccp(dc_prob, CccpConfig(tol=0.0, inner_tol=1e-15, max_iter=40),
                        w0=np.array([0.05]))
    for wa, wb in zip(mm_trace.iterates, dc_trace.iterates):
        assert abs(float(wa[0]) - float(wb[0])) <= 1e-8
