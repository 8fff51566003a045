"""Frontend call overhead versus the in-core call it delegates to."""

import statistics
import time

import numpy as np

import pysparseops as pg
import sparseops as core
from pysparseops import bindings

DEV = pg.device("reference")


def test_suffixed_spmv_overhead_under_50us():
    rng = np.random.default_rng(71)
    a = core.csr_from_dense(DEV, rng.random((10, 10)))
    b = pg.as_tensor(rng.random(10), device=DEV)
    x = pg.as_tensor(np.zeros(10), device=DEV)

    bound = bindings.csr_spmv_double_i32
    direct = core.spmv_csr
    for _ in range(50):  # warm both paths
        bound(a, b, x)
        direct(a, b, x)

    diffs = []
    for _ in range(1000):
        t0 = time.perf_counter()
        bound(a, b, x)
        t1 = time.perf_counter()
        direct(a, b, x)
        t2 = time.perf_counter()
        diffs.append((t1 - t0) - (t2 - t1))
    median = statistics.median(diffs)
    assert median <= 50e-6, f"median binding overhead {median * 1e6:.2f}us exceeds 50us"
