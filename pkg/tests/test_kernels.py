import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from deltatest import _kernels, _pykernels

try:
    from deltatest import _ckernels
except ImportError:  # extension not built
    _ckernels = None

IMPLS = [pytest.param(_pykernels, id="python")]
if _ckernels is not None:
    IMPLS.append(pytest.param(_ckernels, id="cython"))


@pytest.mark.parametrize("impl", IMPLS)
class TestEachKernel:
    def test_subsample_sums_small(self, impl):
        values = np.array([1.0, 10.0, 100.0])
        u = np.array([[0.0, 0.0], [0.99, 0.99], [0.5, 0.2]])
        # row 1: slot 2 (100), then slot 2 again which now holds index 0 (1)
        assert impl.subsample_sums(values, u).tolist() == [11.0, 101.0, 11.0]

    def test_full_draw_sums_everything(self, impl):
        values = np.random.default_rng(0).normal(size=40)
        u = np.random.default_rng(1).random((20, 40))
        sums = impl.subsample_sums(values, u)
        assert np.allclose(sums, values.sum(), rtol=0, atol=1e-12)

    def test_too_many(self, impl):
        with pytest.raises(ValueError):
            impl.subsample_sums(np.ones(3), np.zeros((1, 4)))

    def test_ks_matches_scipy(self, impl):
        rng = np.random.default_rng(3)
        a = np.sort(rng.normal(size=3000))
        b = np.sort(rng.normal(0.1, 1.0, size=2000))
        assert impl.ks_two_sample(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-14)

    def test_ks_ties(self, impl):
        a = np.array([0.0, 0.0, 1.0, 1.0])
        b = np.array([0.0, 1.0, 1.0, 1.0])
        assert impl.ks_two_sample(a, b) == pytest.approx(0.25)


@pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
class TestBackendsAgree:
    def test_subsample_bit_identical(self):
        rng = np.random.default_rng(7)
        for n, k, reps in [(10, 3, 100), (2000, 150, 1500), (517, 516, 40)]:
            v = rng.normal(size=n) * 1e3
            u = rng.random((reps, k))
            assert np.array_equal(_ckernels.subsample_sums(v, u), _pykernels.subsample_sums(v, u))

    def test_ks_bit_identical(self):
        rng = np.random.default_rng(8)
        a = np.sort(np.round(rng.normal(size=5000), 2))
        b = np.sort(np.round(rng.normal(size=4000), 2))
        assert _ckernels.ks_two_sample(a, b) == _pykernels.ks_two_sample(a, b)


@pytest.mark.skipif(bool(os.environ.get("DELTATEST_PURE_PYTHON")), reason="fallback forced")
def test_dispatch_prefers_compiled():
    assert _kernels.BACKEND == ("cython" if _ckernels is not None else "python")


def test_env_forces_fallback():
    env = dict(os.environ, DELTATEST_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import deltatest; print(deltatest.KERNEL_BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
