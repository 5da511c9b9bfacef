import numpy as np
from scipy import stats

from strongmatch.rng import derive_seed, keyed_bits, keyed_uniform


def test_pure_function_of_keys():
    a = keyed_uniform(7, np.arange(5)[:, None], np.arange(4)[None, :])
    b = np.array([[float(keyed_uniform(7, t, e)) for e in range(4)] for t in range(5)])
    assert a.shape == (5, 4)
    assert np.array_equal(a, b)
    assert float(keyed_uniform(7, 1, 2)) != float(keyed_uniform(7, 2, 1))
    assert float(keyed_uniform(7, 1)) != float(keyed_uniform(8, 1))


def test_range_and_uniformity():
    u = keyed_uniform(123, np.arange(200_000))
    assert u.min() >= 0.0 and u.max() < 1.0
    assert stats.kstest(u, "uniform").pvalue > 1e-4
    pairs = keyed_uniform(5, np.arange(50_000), 0), keyed_uniform(5, np.arange(50_000), 1)
    assert abs(np.corrcoef(*pairs)[0, 1]) < 0.03


def test_derived_seeds():
    s = derive_seed(1, 200, 3)
    assert 0 <= s < 2 ** 63 and s == derive_seed(1, 200, 3)
    assert len({derive_seed(1, n, t) for n in range(50) for t in range(50)}) == 2500


def test_large_and_negative_keys():
    assert keyed_bits(2 ** 70, -1).dtype == np.uint64
    assert float(keyed_uniform(0, 2 ** 64 - 1)) == float(keyed_uniform(0, -1))
