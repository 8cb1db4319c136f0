import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qvar import _pykernels, kernels

EPS = np.finfo(float).eps
ck = pytest.importorskip("qvar._ckernels", reason="compiled kernels not built")


@settings(max_examples=300, deadline=None)
@given(a=st.floats(0.05, 200), b=st.floats(0.05, 200), x=st.floats(0.0, 1.0))
def test_reg_inc_beta_parity(a, b, x):
    # the two lgamma implementations differ by ulps of terms this size, and
    # the prefactor exponentiates that absolute error
    scale = (a * abs(math.log(x or 1.0)) + b * abs(math.log1p(-x) if x < 1 else 0.0)
             + abs(math.lgamma(a)) + abs(math.lgamma(b)) + abs(math.lgamma(a + b)))
    rel = 16 * EPS * (1.0 + scale)
    assert ck.reg_inc_beta(a, b, x) == pytest.approx(_pykernels.reg_inc_beta(a, b, x), rel=rel, abs=1e-300)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (3.0, 19.9), (20.0, 0.5), (1e6, 0.5), (0.5, 1e6),
                                 (150.0, 150.0), (1e12, 2.5)])
def test_log_beta_parity(a, b):
    assert ck.log_beta(a, b) == pytest.approx(_pykernels.log_beta(a, b), rel=1e-14, abs=1e-14)


@pytest.mark.parametrize("nu", [0.11, 1.0, 2.0, 4.5, 37.0, 2e3, 1e6])
def test_student_t_cdf_parity(nu):
    t = np.concatenate([np.linspace(-50, 50, 2001), [0.0, -1e-300, 1e300, -1e300]])
    c, p = ck.student_t_cdf(t, nu), _pykernels.student_t_cdf(t, nu)
    assert c.shape == p.shape == t.shape
    np.testing.assert_allclose(c, p, rtol=1e-13, atol=1e-300)


def test_student_t_cdf_keeps_shape():
    t = np.arange(6.0).reshape(2, 3) - 2.5
    assert ck.student_t_cdf(t, 3.0).shape == (2, 3)
    assert _pykernels.student_t_cdf(t, 3.0).shape == (2, 3)


@pytest.mark.parametrize("q", [1.0 + 1e-6, 1.05, 1.2, 1.5, 2.0, 2.9])
@pytest.mark.parametrize("sigma", [1e-3, 1.0, 7.0])
def test_loglik_parity(q, sigma):
    x = np.random.default_rng(5).standard_t(3, 5000) * sigma
    x2 = np.ascontiguousarray(x * x)
    c, p = ck.qgauss_loglik(x2, q, sigma), _pykernels.qgauss_loglik(x2, q, sigma)
    # summation order differs (sequential vs pairwise)
    assert c == pytest.approx(p, rel=1e-11)


def test_default_backend_is_compiled():
    if os.environ.get("QVAR_KERNELS", "").lower() == "python":
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"
    assert kernels.qgauss_loglik is ck.qgauss_loglik


_PROBE = """
import json, numpy as np
from qvar import kernels
from qvar.estimate import fit_mle
from qvar.qdist import QGaussianParams, sample
x = sample(3000, QGaussianParams(1.3, 1.0), seed=12)
f = fit_mle(x)
print(json.dumps({"backend": kernels.BACKEND, "q": f.q, "s": f.sigma_q}))
"""


def _probe(backend):
    env = dict(os.environ, QVAR_KERNELS=backend)
    out = subprocess.run([sys.executable, "-c", _PROBE], env=env, capture_output=True,
                         text=True, check=True)
    return json.loads(out.stdout)


def test_environment_selects_backend_and_fits_agree():
    py, cy = _probe("python"), _probe("cython")
    assert py["backend"] == "python" and cy["backend"] == "cython"
    assert py["q"] == pytest.approx(cy["q"], abs=1e-6)
    assert py["s"] == pytest.approx(cy["s"], rel=1e-6)
