"""Compiled extension vs numpy fallback equivalence."""

import numpy as np
import pytest

from lpshift import _core
from lpshift._core import _fallback
from lpshift.poly import build_basis

try:
    from lpshift._core import _speedups
except ImportError:
    _speedups = None

needs_compiled = pytest.mark.skipif(_speedups is None, reason="compiled extension not built")


def _random_problem(rng, n=400, dim=3, degree=2):
    x = rng.uniform(-1.5, 1.5, size=(n, dim))
    y = rng.standard_normal(n)
    x_star = rng.uniform(-0.2, 0.2, size=dim)
    basis = build_basis(dim, degree)
    return x, y, x_star, basis


@needs_compiled
@pytest.mark.parametrize("kind_code,support_code", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_moment_system_backends_agree(kind_code, support_code):
    rng = np.random.default_rng(100 + kind_code * 2 + support_code)
    x, y, x_star, basis = _random_problem(rng)
    args = (x, y, x_star, 0.8, basis.exponents, basis.inv_factorial, kind_code, support_code, 0.05)
    s_c, v_c, idx_c = _speedups.moment_system(*args)
    s_p, v_p, idx_p = _fallback.moment_system(*args)
    np.testing.assert_array_equal(idx_c, idx_p)
    np.testing.assert_allclose(s_c, s_p, rtol=1e-12, atol=1e-14)
    np.testing.assert_allclose(v_c, v_p, rtol=1e-12, atol=1e-14)


@needs_compiled
def test_knn_radii_backends_agree():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((300, 4))
    r_hi_c, r_lo_c = _speedups.knn_radii_pair(x, 10, 5)
    r_hi_p, r_lo_p = _fallback.knn_radii_pair(x, 10, 5)
    np.testing.assert_allclose(r_hi_c, r_hi_p, rtol=1e-9)
    np.testing.assert_allclose(r_lo_c, r_lo_p, rtol=1e-9)


@needs_compiled
def test_knn_radii_validation_both_backends():
    x = np.zeros((5, 2))
    for impl in (_speedups, _fallback):
        with pytest.raises(ValueError):
            impl.knn_radii_pair(x, 5, 2)
        with pytest.raises(ValueError):
            impl.knn_radii_pair(x, 2, 0)


@needs_compiled
def test_knn_duplicates_and_extremes_agree():
    x = np.array([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [3.0, 4.0], [6.0, 8.0]])
    for impl in (_speedups, _fallback):
        r_hi, r_lo = impl.knn_radii_pair(x, 4, 2)
        # Point 0: duplicates at distance 0, then 5 and 10; k=4 is the max.
        assert r_lo[0] == 0.0
        assert r_hi[0] == pytest.approx(10.0)
        # Point 3 is equidistant (5) from every other point: a full tie.
        assert r_hi[3] == pytest.approx(5.0) and r_lo[3] == pytest.approx(5.0)
    a = _speedups.knn_radii_pair(x, 4, 2)
    b = _fallback.knn_radii_pair(x, 4, 2)
    np.testing.assert_allclose(a[0], b[0], rtol=1e-12)
    np.testing.assert_allclose(a[1], b[1], rtol=1e-12)


@needs_compiled
def test_moment_system_boundary_point_included():
    basis = build_basis(1, 0)
    x = np.array([[1.0], [1.0 + 1e-12]])
    y = np.array([2.0, 3.0])
    args = (x, y, np.zeros(1), 1.0, basis.exponents, basis.inv_factorial, 0, 0, 0.05)
    for impl in (_speedups, _fallback):
        s_mat, s_vec, idx = impl.moment_system(*args)
        # ||u|| == 1 exactly is inside the closed support; the nudged point is not.
        np.testing.assert_array_equal(idx, [0])
        np.testing.assert_allclose(s_mat, [[0.5]])
        np.testing.assert_allclose(s_vec, [1.0])


@needs_compiled
def test_moment_system_empty_window():
    basis = build_basis(2, 1)
    x = np.full((5, 2), 10.0)
    y = np.ones(5)
    args = (x, y, np.zeros(2), 0.5, basis.exponents, basis.inv_factorial, 0, 0, 0.05)
    for impl in (_speedups, _fallback):
        s_mat, s_vec, idx = impl.moment_system(*args)
        assert idx.size == 0
        assert np.all(s_mat == 0) and np.all(s_vec == 0)


def test_backend_selection_records_choice():
    assert _core.BACKEND in ("compiled", "python")
    assert _core.moment_system is not None


def test_env_override_forces_python_backend():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from lpshift import _core; print(_core.BACKEND)"],
        env={"LPSHIFT_BACKEND": "python", "PATH": "/usr/bin:/bin"},
        capture_output=True,
        text=True,
    )
    assert out.stdout.strip() == "python"
