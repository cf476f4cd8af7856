import math

import numpy as np
import pytest
from scipy import stats

from rchm.model import ModelParams
from rchm.sampler import NetworkInstance, RngStream, sample_network, sample_ppp


def test_zero_intensity_is_empty():
    assert len(sample_ppp(0.0, 1.0, np.random.default_rng(0))) == 0


def test_same_stream_same_output():
    p = ModelParams(0.7, 0.2, 1e-4, 500.0, 400.0, 1.0)
    a = sample_network(p, RngStream(11, 3))
    b = sample_network(p, RngStream(11, 3))
    assert np.array_equal(a.p.positions, b.p.positions)
    assert np.array_equal(a.p_prime.marks, b.p_prime.marks)


def test_streams_differ():
    p = ModelParams(0.7, 0.2, 1e-4, 500.0, 400.0, 1.0)
    a = sample_network(p, RngStream(11, 0))
    b = sample_network(p, RngStream(11, 1))
    assert not np.array_equal(a.p.positions[:10], b.p.positions[:10])
    # disjoint streams give uncorrelated positions
    n = min(len(a.p), len(b.p))
    r = np.corrcoef(a.p.positions[:n], b.p.positions[:n])[0, 1]
    assert abs(r) < 4 / math.sqrt(n)


def test_poisson_counts_concentrate():
    counts = [len(sample_ppp(1e5, 1.0, RngStream(2, k).generator())) for k in range(100)]
    inside = np.abs(np.array(counts) - 1e5) <= 3 * math.sqrt(1e5)
    assert inside.mean() >= 0.97
    # dispersion of a Poisson count: variance equals the mean
    chi2 = np.var(counts, ddof=1) * 99 / 1e5
    assert stats.chi2(99).ppf(0.001) < chi2 < stats.chi2(99).ppf(0.999)


def test_positions_and_marks_uniform():
    ps = sample_ppp(2e4, 3.0, np.random.default_rng(8))
    assert stats.kstest(ps.positions / 3.0, "uniform").pvalue > 1e-3
    assert stats.kstest(ps.marks, "uniform").pvalue > 1e-3
    assert ps.marks.min() > 0.0 and ps.marks.max() <= 1.0


def test_no_witnesses_without_p_prime():
    from rchm.bipartite import build_stratified
    from rchm.dowker import enumerate_simplices

    p = ModelParams(0.5, 0.5, 1e-2, 200.0, 0.0, 1.0)
    inst = sample_network(p, RngStream(4))
    assert len(inst.p_prime) == 0
    cx = enumerate_simplices(build_stratified(inst), 2)
    assert cx.total() == 0


def test_rejects_infinite_torus():
    with pytest.raises(ValueError):
        sample_network(ModelParams(0.5, 0.5, 1.0, 1.0, 1.0, math.inf), RngStream(0))


def test_instance_file_round_trip(tmp_path):
    p = ModelParams(0.6, 0.3, 1e-3, 50.0, 60.0, 2.0)
    inst = sample_network(p, RngStream(5))
    inst.write(tmp_path / "inst.csv")
    back = NetworkInstance.read(tmp_path / "inst.csv")
    assert back.params == p
    assert np.array_equal(back.p.positions, inst.p.positions)
    assert np.array_equal(back.p_prime.marks, inst.p_prime.marks)
    assert (tmp_path / "inst.csv").read_text().startswith("side,position,mark\n")
