"""Backend selection for the hot loops.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is imported.  Setting ``QVAR_KERNELS=python`` forces the fallback.
"""

from __future__ import annotations

import logging
import os

logger = logging.getLogger(__name__)

_forced = os.environ.get("QVAR_KERNELS", "").strip().lower()

if _forced == "python":
    from qvar import _pykernels as _impl

    BACKEND = "python"
else:
    try:
        from qvar import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise
        from qvar import _pykernels as _impl

        BACKEND = "python"
        logger.debug("compiled kernels unavailable; using numpy fallback")

log_beta = _impl.log_beta
reg_inc_beta = _impl.reg_inc_beta
student_t_cdf = _impl.student_t_cdf
qgauss_loglik = _impl.qgauss_loglik

__all__ = ["BACKEND", "log_beta", "reg_inc_beta", "student_t_cdf", "qgauss_loglik"]
