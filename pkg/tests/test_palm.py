import math

import numpy as np
import pytest
from scipy import stats

from rchm.bipartite import build_naive
from rchm.dowker import enumerate_simplices
from rchm.model import ModelParams, connects, expected_typical_degree
from rchm.palm import (
    coverage,
    read_degree_samples,
    sample_palm_environment,
    sample_union,
    sample_witness_in_root_neighborhood,
    typical_degree_samples,
    write_degree_samples,
)
from rchm.stats import fit_power_law

LINE = ModelParams(0.7, 0.2, 0.01, 50.0, 80.0, math.inf)


def test_witness_marks_follow_density():
    rng = np.random.default_rng(1)
    marks = np.array([sample_witness_in_root_neighborhood(0.4, LINE, rng).mark for _ in range(20000)])
    assert stats.kstest(marks, lambda v: v ** (1 - LINE.gamma_prime)).pvalue > 1e-3


def test_environment_containment():
    rng = np.random.default_rng(2)
    for _ in range(30):
        env = sample_palm_environment(1, LINE, rng)
        for q in env.witnesses.points():
            assert connects(env.root, q, LINE)
        for a in env.coauthors.points():
            assert any(connects(a, q, LINE) for q in env.witnesses.points())


def test_no_witnesses_no_simplices():
    p = ModelParams(0.7, 0.2, 0.01, 50.0, 0.0, math.inf)
    env = sample_palm_environment(1, p, np.random.default_rng(0))
    assert env.degree == 0 and env.simplices_at_root == {}


def test_rejects_divergent_dimension():
    with pytest.raises(ValueError):
        sample_palm_environment(1, ModelParams(0.5, 0.6, 0.1, 1.0, 1.0), np.random.default_rng(0))


def _union_mean(y, v, params, reps, seed):
    gen = np.random.default_rng(seed)
    counts = np.array([sample_union(y, v, params, gen)[0].size for _ in range(reps)])
    return counts.mean(), counts.std(ddof=1) / math.sqrt(reps)


def test_union_intensity_disjoint():
    p = ModelParams(0.5, 0.2, 0.01, 200.0, 1.0, math.inf)
    y, v = np.array([0.0, 1e6]), np.array([0.3, 0.8])
    size = 2 * p.beta / (1 - p.gamma) * v ** -p.gamma_prime
    mean, se = _union_mean(y, v, p, 4000, 3)
    assert abs(mean - p.lam * size.sum()) < 4 * se


def test_union_intensity_identical_neighborhoods():
    # three copies of one neighborhood: the union is that neighborhood, not three of it
    p = ModelParams(0.5, 0.2, 0.01, 200.0, 1.0, math.inf)
    y, v = np.zeros(3), np.full(3, 0.5)
    size = 2 * p.beta / (1 - p.gamma) * 0.5 ** -p.gamma_prime
    mean, se = _union_mean(y, v, p, 4000, 4)
    assert abs(mean - p.lam * size) < 4 * se


def test_coverage_counts():
    p = ModelParams(0.5, 0.5, 1.0, 1.0, 1.0, math.inf)
    cov = coverage([0.0, 10.0], [1.0, 1.0], [0.5, -0.5, 20.0], [1.0, 1.0, 1.0], p)
    assert cov.tolist() == [2, 0]


def test_root_simplices_match_dowker_enumeration():
    rng = np.random.default_rng(6)
    for _ in range(20):
        env = sample_palm_environment(2, LINE, rng)
        inst = env.to_instance(LINE)
        cx = enumerate_simplices(build_naive(inst), 2, None)
        u = env.root.mark
        marks = inst.p.marks
        expected = {
            tuple(i - 1 for i in s if i != 0): c
            for s, c in cx
            if 0 in s and len(s) > 1 and all(marks[i] > u for i in s if i != 0)
        }
        assert env.simplices_at_root == expected


def test_typical_degree_mean():
    p = ModelParams(0.25, 0.1, 1.0, 1e4, 1e4).with_beta(3 * 0.75 * 0.9 / 2e4)
    d = typical_degree_samples(0, 10**4, p, np.random.default_rng(7))
    assert abs(d.mean() / expected_typical_degree(p) - 1) < 0.05


def test_dispersion_at_fixed_root_mark():
    p = ModelParams(0.7, 0.2, 1.0, 1e4, 1e4).with_beta(3 * 0.3 * 0.8 / 2e4)
    gen = np.random.default_rng(8)
    d = np.array([sample_palm_environment(0, p, gen, u=0.3).degree for _ in range(10**4)])
    assert 0.9 <= d.var(ddof=1) / d.mean() <= 1.1


def test_m0_tail_exponent():
    p = ModelParams(0.7, 0.2, 1.0, 1e4, 1e4).with_beta(3 * 0.3 * 0.8 / 2e4)
    d = typical_degree_samples(0, 10**5, p, np.random.default_rng(0))
    fit = fit_power_law(d, 20, discrete=True)
    assert abs(fit.exponent - (1 + 1 / 0.7)) < 3 * fit.standard_error


@pytest.mark.parametrize("selection", ["uniform", "pooled"])
def test_m1_samples(selection):
    p = ModelParams(0.7, 0.2, 1.0, 1e3, 1e3).with_beta(3 * 0.3 * 0.8 / 2e3)
    d = typical_degree_samples(1, 300, p, np.random.default_rng(9), selection=selection)
    assert d.size == 300 and d.min() >= 1


def test_degree_file_round_trip(tmp_path):
    write_degree_samples([3, 1, 4], tmp_path / "d.txt")
    assert (tmp_path / "d.txt").read_text() == "3\n1\n4\n"
    assert read_degree_samples(tmp_path / "d.txt").tolist() == [3, 1, 4]
