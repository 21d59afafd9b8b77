import os

# The LP kernels are many small-to-medium BLAS calls; multithreaded BLAS
# loses badly to spin-wait overhead at these sizes, so pin to one thread
# (set before numpy initializes, enforced again below for safety).
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import pytest
import threadpoolctl


@pytest.fixture(scope="session", autouse=True)
def _single_threaded_blas():
    with threadpoolctl.threadpool_limits(limits=1):
        yield
