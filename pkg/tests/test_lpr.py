"""Local fit correctness: oracle equivalence, reproducing weights, truncation."""

import numpy as np
import pytest

from lpshift.kernels import CUBE, EPA, KernelSpec
from lpshift.lpr import (
    LprConfig,
    SingularSystemError,
    Truncation,
    WeightsUnavailableError,
    assemble_system,
    effective_weights,
    lpr_fit,
)
from lpshift.samples import SampleSet

from helpers import naive_lpr, random_polynomial


def _make_set(x, y, origin=None):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.asarray(y, dtype=float)
    if origin is None:
        origin = np.array(["Q"] * len(y))
    return SampleSet(x=x, y=y, origin=np.asarray(origin, dtype="U1"))


def _window_set(rng, n, dim, radius=0.8):
    """Points spread inside the kernel window around the origin."""
    x = rng.uniform(-radius, radius, size=(n, dim)) / np.sqrt(dim)
    return x


def test_empty_window_gives_zero_system():
    data = _make_set([[5.0, 5.0]], [1.0])
    cfg = LprConfig(h=0.1, degree=1)
    s_mat, s_vec, window = assemble_system(data, np.zeros(2), cfg)
    assert np.all(s_mat == 0) and np.all(s_vec == 0)
    assert window.indices.size == 0


def test_single_sample_degree0_system():
    data = _make_set([[0.4, 0.4]], [3.0])
    cfg = LprConfig(h=1.0, degree=0)
    s_mat, s_vec, _ = assemble_system(data, np.array([0.4, 0.4]), cfg)
    np.testing.assert_allclose(s_mat, [[0.5]])
    np.testing.assert_allclose(s_vec, [0.5 * 3.0])


def test_assembly_matches_naive_double_loop_1d():
    x = np.array([[-0.5], [0.0], [0.5]])
    y = np.array([1.0, 2.0, 3.0])
    data = _make_set(x, y)
    cfg = LprConfig(h=1.0, degree=1)
    s_mat, s_vec, _ = assemble_system(data, np.zeros(1), cfg)
    _, s_mat_naive, s_vec_naive = naive_lpr(x, y, np.zeros(1), 1.0, 1)
    np.testing.assert_allclose(s_mat, s_mat_naive, rtol=1e-12)
    np.testing.assert_allclose(s_vec, s_vec_naive, rtol=1e-12)


def test_constant_responses_reproduced():
    rng = np.random.default_rng(11)
    x = _window_set(rng, 40, 3)
    data = _make_set(x, np.full(40, 4.25))
    fit = lpr_fit(data, np.zeros(3), LprConfig(h=1.0, degree=2))
    assert fit.value == pytest.approx(4.25, abs=1e-9)


def test_noiseless_linear_exact():
    rng = np.random.default_rng(3)
    x = _window_set(rng, 60, 2)
    y = 1.5 + 2.0 * x[:, 0] - 0.7 * x[:, 1]
    data = _make_set(x, y)
    fit = lpr_fit(data, np.zeros(2), LprConfig(h=1.0, degree=1))
    assert fit.value == pytest.approx(1.5, abs=1e-9)


def test_degree0_box_is_window_mean():
    rng = np.random.default_rng(21)
    x = rng.uniform(-3, 3, size=(200, 1))
    y = rng.standard_normal(200)
    h = 0.9
    data = _make_set(x, y)
    fit = lpr_fit(data, np.zeros(1), LprConfig(h=h, degree=0))
    in_window = np.abs(x[:, 0]) <= h
    assert fit.value == pytest.approx(float(y[in_window].mean()), abs=1e-12)
    assert fit.active_count == int(in_window.sum())


@pytest.mark.parametrize("kernel", [KernelSpec(), KernelSpec(kind=EPA), KernelSpec(support=CUBE)])
def test_matches_dense_oracle_random_instances(kernel):
    rng = np.random.default_rng(17)
    for _ in range(30):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(0, 3))
        n = int(rng.integers(25, 50))
        x = _window_set(rng, n, dim)
        y = rng.standard_normal(n)
        data = _make_set(x, y)
        fit = lpr_fit(data, np.zeros(dim), LprConfig(h=1.0, degree=degree, kernel=kernel))
        expected, _, _ = naive_lpr(
            x, y, np.zeros(dim), 1.0, degree, kind=kernel.kind, support=kernel.support
        )
        assert fit.value == pytest.approx(expected, abs=1e-9, rel=1e-9)


def test_origin_tags_do_not_affect_fit():
    rng = np.random.default_rng(8)
    x = _window_set(rng, 30, 2)
    y = rng.standard_normal(30)
    tags = np.array(["P"] * 15 + ["Q"] * 15)
    fit_a = lpr_fit(_make_set(x, y, tags), np.zeros(2), LprConfig(h=1.0, degree=1))
    fit_b = lpr_fit(_make_set(x, y, tags[::-1]), np.zeros(2), LprConfig(h=1.0, degree=1))
    assert fit_a.value == fit_b.value  # bit-identical


def test_singular_system_raises_with_min_eigenvalue():
    data = _make_set([[0.1, 0.1], [0.2, 0.2]], [1.0, 2.0])
    with pytest.raises(SingularSystemError) as exc:
        lpr_fit(data, np.zeros(2), LprConfig(h=1.0, degree=2))
    # Rank-deficient system: the carried minimum eigenvalue is numerically zero.
    assert abs(exc.value.min_eigenvalue) < 1e-10


def test_empty_window_raises_without_truncation():
    data = _make_set([[5.0]], [1.0])
    with pytest.raises(SingularSystemError):
        lpr_fit(data, np.zeros(1), LprConfig(h=0.5, degree=0))


def test_truncation_zeroes_unstable_fit():
    data = _make_set([[0.1, 0.1], [0.2, 0.2]], [1.0, 2.0])
    cfg = LprConfig(h=1.0, degree=2, truncation=Truncation(tau=1.0, psi=1.0))
    fit = lpr_fit(data, np.zeros(2), cfg)
    assert fit.truncated and fit.value == 0.0
    with pytest.raises(WeightsUnavailableError):
        effective_weights(fit)


def test_truncation_keeps_stable_fit():
    rng = np.random.default_rng(31)
    x = _window_set(rng, 50, 2)
    data = _make_set(x, rng.standard_normal(50))
    # Tiny threshold: the healthy window must not be truncated.
    cfg = LprConfig(h=1.0, degree=1, truncation=Truncation(tau=1e-12, psi=1.0))
    fit = lpr_fit(data, np.zeros(2), cfg)
    assert not fit.truncated
    assert fit.min_eigenvalue > 0


def test_ridge_epsilon_stabilizes_duplicates():
    x = np.array([[0.1, 0.0]] * 30)  # all duplicated: rank-deficient for degree 1
    y = np.linspace(0, 1, 30)
    data = _make_set(x, y)
    with pytest.raises(SingularSystemError):
        lpr_fit(data, np.zeros(2), LprConfig(h=1.0, degree=1))
    fit = lpr_fit(data, np.zeros(2), LprConfig(h=1.0, degree=1, ridge_epsilon=1e-9))
    assert np.isfinite(fit.value)


def test_effective_weights_reproduce_value_and_moments():
    rng = np.random.default_rng(77)
    for trial in range(20):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(0, 4))
        n = int(rng.integers(40, 120))
        x_star = rng.uniform(-1, 1, size=dim)
        x = x_star + _window_set(rng, n, dim)
        y = rng.standard_normal(n)
        h = float(rng.uniform(0.5, 1.5))
        data = _make_set(x, y)
        fit = lpr_fit(data, x_star, LprConfig(h=h, degree=degree))
        w = effective_weights(fit)
        assert w @ y == pytest.approx(fit.value, abs=1e-9)
        assert w.sum() == pytest.approx(1.0, abs=1e-8)
        # Centered monomial moments up to the degree vanish.
        from lpshift.poly import build_basis

        basis = build_basis(dim, degree)
        for alpha in basis.indices()[1:]:
            moment_terms = w.copy()
            for j, aj in enumerate(alpha):
                moment_terms = moment_terms * (x[:, j] - x_star[j]) ** aj
            scale = max(1.0, float(np.abs(moment_terms).sum()))
            assert abs(moment_terms.sum()) <= 1e-7 * scale


def test_single_in_window_sample_weight_one():
    data = _make_set([[0.0], [9.0]], [2.0, 5.0])
    fit = lpr_fit(data, np.zeros(1), LprConfig(h=1.0, degree=0))
    w = effective_weights(fit)
    np.testing.assert_allclose(w, [1.0, 0.0])


def test_polynomial_exactness_random():
    rng = np.random.default_rng(4242)
    for _ in range(20):
        dim = int(rng.integers(1, 4))
        degree = int(rng.integers(0, 3))
        n = 30 * (degree + 1) + 10 * dim
        x_star = rng.uniform(-0.5, 0.5, size=dim)
        x = x_star + _window_set(rng, n, dim)
        poly = random_polynomial(rng, dim, degree, anchor=rng.uniform(-1, 1, size=dim))
        y = poly(x)
        data = _make_set(x, y)
        fit = lpr_fit(data, x_star, LprConfig(h=1.0, degree=degree))
        truth = float(poly(x_star[None, :])[0])
        assert abs(fit.value - truth) <= 1e-8 * (1 + abs(truth))


def test_config_validation():
    with pytest.raises(ValueError):
        LprConfig(h=0.0, degree=1)
    with pytest.raises(ValueError):
        LprConfig(h=1.0, degree=-1)
    with pytest.raises(ValueError):
        Truncation(tau=-1.0, psi=1.0)
    with pytest.raises(ValueError):
        Truncation(tau=1.0, psi=0.0)
