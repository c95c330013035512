import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from regimescope.complexity import (
    entropy_report,
    permutation_entropy_norm,
    sample_entropy,
    shannon_entropy_norm,
    tsallis_entropy_norm,
)
from regimescope.distribution import Pmf
from regimescope.errors import InvalidQ, NoMatches, TooShort

from .oracles import brute_sample_entropy_counts


def pmf_of(probs):
    probs = np.asarray(probs, dtype=float)
    return Pmf(np.arange(probs.size + 1, dtype=float), probs / probs.sum(), n=0, rule="manual")


prob_vectors = st.lists(st.floats(0, 1), min_size=1, max_size=40).filter(lambda v: sum(v) > 1e-6)


@pytest.mark.parametrize("k", [2, 3, 8, 1000])
def test_shannon_uniform(k):
    assert shannon_entropy_norm(pmf_of(np.ones(k))) == pytest.approx(1.0, abs=1e-12)


def test_shannon_point_mass():
    assert shannon_entropy_norm(pmf_of([0, 1, 0])) == 0.0


def test_shannon_worked_example():
    h = -(0.5 * math.log(0.5) + 2 * 0.25 * math.log(0.25))
    assert h == pytest.approx(1.0397, abs=1e-4)
    assert shannon_entropy_norm(pmf_of([0.5, 0.25, 0.25])) == pytest.approx(h / math.log(3), abs=1e-12)
    assert shannon_entropy_norm(pmf_of([0.5, 0.25, 0.25])) == pytest.approx(0.9464, abs=1e-4)


def test_shannon_ignores_empty_bins():
    assert shannon_entropy_norm(pmf_of([0.5, 0, 0, 0.5])) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q", [0.1, 0.5, 2.0, 3.7])
@pytest.mark.parametrize("k", [2, 5, 64])
def test_tsallis_uniform(q, k):
    assert tsallis_entropy_norm(pmf_of(np.ones(k)), q) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q", [0.1, 2.0])
def test_tsallis_point_mass(q):
    assert tsallis_entropy_norm(pmf_of([1.0]), q) == 0.0


def test_tsallis_worked_example():
    assert tsallis_entropy_norm(pmf_of([0.75, 0.25]), 2.0) == pytest.approx(0.75, abs=1e-12)


@pytest.mark.parametrize("q", [0.0, -1.0, 1.0])
def test_tsallis_invalid_q(q):
    with pytest.raises(InvalidQ):
        tsallis_entropy_norm(pmf_of([0.5, 0.5]), q)


@settings(max_examples=200, deadline=None)
@given(prob_vectors)
def test_tsallis_to_shannon_limit(probs):
    p = pmf_of(probs)
    assert abs(tsallis_entropy_norm(p, 1.0001) - shannon_entropy_norm(p)) <= 1e-3


@settings(max_examples=200, deadline=None)
@given(prob_vectors, st.sampled_from([0.1, 0.5, 2.0, 5.0]))
def test_normalized_entropies_in_unit_interval(probs, q):
    p = pmf_of(probs)
    assert 0.0 <= shannon_entropy_norm(p) <= 1.0
    assert 0.0 <= tsallis_entropy_norm(p, q) <= 1.0


def test_sample_entropy_constant():
    assert sample_entropy(np.full(200, 3.0)) == 0.0


def test_sample_entropy_period_two():
    x = np.tile([1.0, 2.0], 100)
    a, b = brute_sample_entropy_counts(x, 2, 0.5)
    assert a / b == 1.0
    assert sample_entropy(x, m=2, r=0.5) == 0.0


def test_sample_entropy_uniform_noise(rng):
    x = rng.random(1000)
    r = 0.2 * np.std(x)
    a, b = brute_sample_entropy_counts(x, 2, r)
    value = sample_entropy(x, m=2)
    assert value == pytest.approx(-math.log(a / b), abs=1e-12)
    assert value > 1.5


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 3), st.floats(0.05, 1.0))
def test_sample_entropy_matches_brute_force(seed, m, r):
    x = np.round(np.random.default_rng(seed).normal(size=120), 2)  # rounding creates exact ties
    a, b = brute_sample_entropy_counts(x, m, r)
    if a == 0 or b == 0:
        with pytest.raises(NoMatches):
            sample_entropy(x, m, r)
    else:
        assert sample_entropy(x, m, r) == pytest.approx(-math.log(a / b), abs=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_sample_entropy_non_increasing_in_r(seed):
    x = np.random.default_rng(seed).normal(size=1500)
    sd = np.std(x)
    values = [sample_entropy(x, 2, f * sd) for f in (0.1, 0.15, 0.2, 0.3, 0.5, 0.8, 1.2)]
    assert all(b <= a for a, b in zip(values, values[1:]))


def test_sample_entropy_no_matches():
    with pytest.raises(NoMatches):
        sample_entropy(np.arange(50.0), m=2, r=0.5)


def test_sample_entropy_too_short():
    with pytest.raises(TooShort):
        sample_entropy([1.0, 2.0, 3.0], m=2)


def test_permutation_increasing():
    assert permutation_entropy_norm(np.arange(100.0), order=4) == 0.0


def test_permutation_alternating():
    x = np.tile([1.0, 2.0], 500)
    assert permutation_entropy_norm(x, order=3) == pytest.approx(math.log(2) / math.log(6), abs=1e-12)
    assert permutation_entropy_norm(x, order=3) == pytest.approx(0.3869, abs=1e-4)


def test_permutation_noise(rng):
    assert permutation_entropy_norm(rng.random(10_000), order=3) >= 0.99


def test_permutation_ties_are_stable():
    # all ties: every window ranks as the identity pattern
    assert permutation_entropy_norm(np.zeros(50), order=3) == 0.0


def test_permutation_too_short():
    with pytest.raises(TooShort):
        permutation_entropy_norm([1.0, 2.0], order=3)


transforms = [np.exp, np.arctan, lambda v: v**3, lambda v: -2.0 * v + 7.0, lambda v: np.log1p(np.exp(v))]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4, 5]), st.integers(1, 3), st.sampled_from(range(4)))
def test_permutation_monotone_invariance(seed, order, delay, which):
    x = np.random.default_rng(seed).normal(size=400)
    f = transforms[which]
    assert permutation_entropy_norm(f(x), order, delay) == permutation_entropy_norm(x, order, delay)


def test_permutation_decreasing_transform_mirrors_patterns(rng):
    x = rng.normal(size=500)
    assert permutation_entropy_norm(-x, 4) == pytest.approx(permutation_entropy_norm(x, 4), abs=1e-12)


def test_entropy_report_records_params(rng):
    x = rng.normal(size=600)
    rep = entropy_report(x, tsallis_qs=(0.1, 2.0), m=2, order=4)
    assert set(rep.tsallis_norm) == {0.1, 2.0}
    assert rep.params["m"] == 2 and rep.params["order"] == 4
    assert rep.params["r"] == pytest.approx(0.2 * np.std(x))
    assert 0 <= rep.shannon_norm <= 1 and 0 <= rep.permutation_norm <= 1
    assert rep.sample_entropy >= 0


def test_entropy_report_undefined_sampen():
    rep = entropy_report(np.arange(60.0), r=0.1, order=3)
    assert rep.sample_entropy is None
