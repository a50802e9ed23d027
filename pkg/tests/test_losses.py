import math

import numpy as np
import pytest
import scipy.sparse as sp

from nonconvex_mm import (
    Dataset,
    LeastSquaresLoss,
    LogisticLoss,
    gram_max_eigenvalue,
    least_squares_strong_convexity,
    make_loss,
)

from helpers import fd_gradient


def regression(X, y):
    return Dataset(X=np.asarray(X, dtype=float), y=np.asarray(y, dtype=float),
                   task="regression")


def classification(X, y):
    return Dataset(X=np.asarray(X, dtype=float), y=np.asarray(y, dtype=float),
                   task="classification")


def random_classification(rng, n, p):
    X = rng.normal(size=(n, p))
    y = rng.choice([-1.0, 1.0], size=n)
    return classification(X, y)


# ----------------------------------------------------------- least squares
def test_ls_value_identity_cases():
    d = regression(np.eye(2), [1.0, 1.0])
    loss = LeastSquaresLoss(d)
    assert loss.value(np.zeros(2)) == pytest.approx(0.5)
    assert loss.value(np.ones(2)) == 0.0


def test_ls_value_hand_example():
    d = regression([[1.0, 2.0], [3.0, 4.0]], [1.0, 0.0])
    loss = LeastSquaresLoss(d)
    # residuals: (1+2-1, 3+4-0) = (2, 7); value = (4 + 49)/4
    expected = (2.0**2 + 7.0**2) / (2.0 * 2)
    assert expected == 13.25
    assert loss.value(np.array([1.0, 1.0])) == pytest.approx(13.25, rel=1e-15)


def test_ls_gradient_zero_residual():
    d = regression(np.eye(3), [0.3, -0.2, 0.9])
    np.testing.assert_allclose(LeastSquaresLoss(d).gradient(d.y), np.zeros(3), atol=1e-16)


def test_ls_gradient_at_origin():
    d = regression(np.eye(2), [1.0, 1.0])
    np.testing.assert_allclose(LeastSquaresLoss(d).gradient(np.zeros(2)), [-0.5, -0.5])


def test_ls_gradient_finite_differences():
    rng = np.random.default_rng(0)
    d = regression(rng.normal(size=(5, 3)), rng.normal(size=5))
    loss = LeastSquaresLoss(d)
    w = rng.normal(size=3)
    fd = fd_gradient(loss.value, w)
    np.testing.assert_allclose(loss.gradient(w), fd, rtol=1e-6, atol=1e-8)


def test_ls_lipschitz_identity_and_diag():
    for n in (2, 5):
        d = regression(np.eye(n), np.ones(n))
        assert LeastSquaresLoss(d).lipschitz == pytest.approx(1.0 / n, rel=1e-7)
    d = regression(np.diag([2.0, 1.0]), [0.0, 0.0])
    assert LeastSquaresLoss(d).lipschitz == pytest.approx(2.0, rel=1e-7)


def test_ls_lipschitz_against_dense_eigensolver():
    rng = np.random.default_rng(42)
    X = rng.normal(size=(10, 4))
    d = regression(X, rng.normal(size=10))
    lam_oracle = float(np.linalg.eigvalsh(X.T @ X / 10).max())
    assert LeastSquaresLoss(d).lipschitz == pytest.approx(lam_oracle, rel=1e-6)


def test_power_iteration_reports_convergence():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(30, 6))
    lam, converged = gram_max_eigenvalue(X)
    assert converged
    assert lam == pytest.approx(float(np.linalg.eigvalsh(X.T @ X / 30).max()), rel=1e-6)


def test_lipschitz_trace_fallback_when_power_iteration_stalls(monkeypatch):
    import nonconvex_mm.losses as losses_mod

    rng = np.random.default_rng(6)
    X = rng.normal(size=(12, 5))
    d = regression(X, rng.normal(size=12))
    lam, converged = gram_max_eigenvalue(X, max_steps=1)
    assert not converged
    monkeypatch.setattr(losses_mod, "gram_max_eigenvalue", lambda X: (0.0, False))
    loss = LeastSquaresLoss(d)
    trace_bound = float(np.sum(X**2)) / 12
    assert loss.lipschitz == pytest.approx(trace_bound)
    # the fallback really is an upper bound on the top eigenvalue
    assert trace_bound >= float(np.linalg.eigvalsh(X.T @ X / 12).max())


def test_zero_design_rejected():
    d = regression(np.zeros((3, 2)), np.ones(3))
    with pytest.raises(ValueError):
        LeastSquaresLoss(d).lipschitz
    dc = classification(np.zeros((3, 2)), [1.0, -1.0, 1.0])
    with pytest.raises(ValueError):
        LogisticLoss(dc).lipschitz


def test_strong_convexity_modulus_matches_eigensolver():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(40, 8))
    d = regression(X, rng.normal(size=40))
    lam_min = float(np.linalg.eigvalsh(X.T @ X / 40).min())
    assert least_squares_strong_convexity(d) == pytest.approx(lam_min, rel=1e-6)
    flat = regression(np.ones((5, 3)), np.ones(5))  # rank 1
    with pytest.raises(ValueError):
        least_squares_strong_convexity(flat)


# --------------------------------------------------------------- logistic
def test_logistic_value_at_origin_is_log2():
    rng = np.random.default_rng(1)
    d = random_classification(rng, 7, 3)
    assert LogisticLoss(d).value(np.zeros(3)) == pytest.approx(math.log(2.0), rel=1e-14)


def test_logistic_saturated_margin():
    d = classification([[10.0]], [1.0])
    assert LogisticLoss(d).value(np.array([10.0])) == pytest.approx(0.0, abs=1e-12)


def test_logistic_value_matches_naive_formula_at_moderate_margins():
    rng = np.random.default_rng(2)
    d = random_classification(rng, 4, 2)
    loss = LogisticLoss(d)
    w = rng.uniform(-2, 2, size=2)
    margins = d.y * (d.X @ w)
    assert np.all(np.abs(margins) <= 20)
    naive = float(np.mean(np.log(1.0 + np.exp(-margins))))
    assert loss.value(w) == pytest.approx(naive, abs=1e-12)


def test_logistic_gradient_at_origin():
    rng = np.random.default_rng(3)
    d = random_classification(rng, 6, 4)
    expected = -(d.y[:, None] * d.X).sum(axis=0) / (2.0 * 6)
    np.testing.assert_allclose(LogisticLoss(d).gradient(np.zeros(4)), expected, rtol=1e-14)


def test_logistic_gradient_mirrored_symmetry():
    X = np.array([[1.0, 2.0], [1.0, 2.0], [0.5, -3.0], [0.5, -3.0]])
    y = np.array([1.0, -1.0, 1.0, -1.0])
    d = classification(X, y)
    np.testing.assert_allclose(LogisticLoss(d).gradient(np.zeros(2)), np.zeros(2), atol=1e-16)


def test_logistic_gradient_finite_differences():
    rng = np.random.default_rng(5)
    d = random_classification(rng, 8, 3)
    loss = LogisticLoss(d)
    w = rng.normal(size=3)
    np.testing.assert_allclose(loss.gradient(w), fd_gradient(loss.value, w),
                               rtol=1e-6, atol=1e-8)


def test_logistic_lipschitz_values():
    X = np.full((6, 4), 1.0)  # each row has ||x||^2 = 4
    d = classification(X, np.resize([1.0, -1.0], 6))
    assert LogisticLoss(d).lipschitz == pytest.approx(1.0)
    d2 = classification([[3.0, 4.0]], [1.0])
    assert LogisticLoss(d2).lipschitz == pytest.approx(6.25)


def test_logistic_lipschitz_frobenius_identity():
    rng = np.random.default_rng(72)
    X = rng.normal(size=(72, 30))
    d = classification(X, rng.choice([-1.0, 1.0], size=72))
    acc = math.fsum(float(v) for v in (X * X).ravel())  # independent summation
    assert LogisticLoss(d).lipschitz == pytest.approx(acc / 288.0, rel=1e-13)


# ------------------------------------------------ invariants across losses
def _make_losses(rng):
    dr = regression(rng.normal(size=(20, 6)), rng.normal(size=20))
    dc = random_classification(rng, 20, 6)
    return [LeastSquaresLoss(dr), LogisticLoss(dc)]


def test_gradient_consistency_100_random_pairs():
    rng = np.random.default_rng(10)
    for loss in _make_losses(rng):
        for _ in range(100):
            w = rng.normal(size=6) * rng.uniform(0.2, 3.0)
            g = loss.gradient(w)
            fd = fd_gradient(loss.value, w)
            np.testing.assert_allclose(g, fd, rtol=1e-5, atol=1e-7)


def test_lipschitz_bound_and_descent_lemma():
    rng = np.random.default_rng(11)
    for loss in _make_losses(rng):
        L = loss.lipschitz
        for _ in range(100):
            u = rng.normal(size=6) * 2
            v = rng.normal(size=6) * 2
            gap = np.linalg.norm(loss.gradient(u) - loss.gradient(v))
            assert gap <= L * np.linalg.norm(u - v) + 1e-10
            quad = loss.value(v) + loss.gradient(v) @ (u - v) \
                + 0.5 * L * float((u - v) @ (u - v))
            assert loss.value(u) <= quad + 1e-10


def test_weighted_sum_lipschitz_additivity():
    # h = sum alpha_i f_i over single-sample logistic losses; the combined
    # constant sum |alpha_i| L_i must satisfy the gradient Lipschitz bound
    rng = np.random.default_rng(12)
    n, p = 10, 4
    X = rng.normal(size=(n, p))
    y = rng.choice([-1.0, 1.0], size=n)
    alphas = rng.uniform(-2.0, 2.0, size=n)
    parts = [LogisticLoss(classification(X[i:i + 1], y[i:i + 1])) for i in range(n)]
    L_total = sum(abs(a) * part.lipschitz for a, part in zip(alphas, parts))

    def grad(w):
        return sum(a * part.gradient(w) for a, part in zip(alphas, parts))

    for _ in range(100):
        u, v = rng.normal(size=p) * 2, rng.normal(size=p) * 2
        assert np.linalg.norm(grad(u) - grad(v)) <= L_total * np.linalg.norm(u - v) + 1e-10


# ----------------------------------------------------------------- dataset
def test_sparse_design_matches_dense():
    rng = np.random.default_rng(13)
    X = rng.normal(size=(15, 5))
    X[rng.random(X.shape) < 0.6] = 0.0
    y = rng.normal(size=15)
    dense = LeastSquaresLoss(regression(X, y))
    sparse = LeastSquaresLoss(Dataset(X=sp.csr_matrix(X), y=y, task="regression"))
    w = rng.normal(size=5)
    assert sparse.value(w) == pytest.approx(dense.value(w), rel=1e-14)
    np.testing.assert_allclose(sparse.gradient(w), dense.gradient(w), rtol=1e-14)
    assert sparse.lipschitz == pytest.approx(dense.lipschitz, rel=1e-6)


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(X=np.ones((2, 2)), y=np.array([1.0, 2.0]), task="classification")
    with pytest.raises(ValueError):
        Dataset(X=np.array([[np.inf, 0.0]]), y=np.array([1.0]), task="regression")
    with pytest.raises(ValueError):
        Dataset(X=np.ones((2, 2)), y=np.array([1.0]), task="regression")
    with pytest.raises(ValueError):
        Dataset(X=np.ones((2, 2)), y=np.array([1.0, -1.0]), task="ranking")
    with pytest.raises(ValueError):
        make_loss("hinge", regression(np.eye(2), np.ones(2)))
    with pytest.raises(ValueError):
        LogisticLoss(regression(np.eye(2), np.ones(2)))


def test_dimension_mismatch_rejected():
    d = regression(np.eye(3), np.ones(3))
    loss = LeastSquaresLoss(d)
    with pytest.raises(ValueError):
        loss.value(np.ones(4))
    with pytest.raises(ValueError):
        loss.gradient(np.ones(2))
