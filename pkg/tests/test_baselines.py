import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from singlequery.algebra import DigitString, GeneratorSet
from singlequery.algorithms import IndexedSearch, run_walsh_search
from singlequery.baselines import (
    classical_bisection,
    classical_huffman_search,
    classical_parity_readout,
    classical_random_code,
)
from singlequery.codes import SourceDistribution, build_huffman, collision_trials
from singlequery.costmodel import info_bound
from singlequery.oracle import Database


def test_bisection_examples():
    for i in range(2):
        t = classical_bisection(Database.of(DigitString.unit(2, i)), 2)
        assert t.oracle_calls == 1 and t.recovered == i
    rng = np.random.default_rng(0)
    for i in rng.integers(0, 1024, size=20):
        db = Database.of(DigitString.unit(1024, int(i)))
        t = classical_bisection(db, 1024)
        assert t.oracle_calls == 10 and t.recovered == i and t.success


@pytest.mark.parametrize("n", [2, 4, 8, 16, 32])
def test_bisection_agrees_with_walsh_search(n):
    for i in range(n):
        c = classical_bisection(Database.of(DigitString.unit(n, i)), n)
        q = run_walsh_search(n, Database.of(DigitString.unit(n, i)))
        assert c.recovered == q.recovered == i
        # equality in the information bound for n equally likely items
        assert c.oracle_calls == info_bound(math.log2(n), 2)
        assert q.oracle_calls == 1


def test_parity_readout_examples():
    assert classical_parity_readout(Database.of("1")).oracle_calls == 1
    t = classical_parity_readout(Database.of("10110001"))
    assert str(t.recovered) == "10110001" and t.oracle_calls == 8
    s = classical_parity_readout(Database.of("10110001", "spring_scale"))
    assert s.recovered == t.recovered


def test_huffman_baseline_examples():
    code = build_huffman(SourceDistribution((0.5, 0.25, 0.25)))
    t = classical_huffman_search(Database.of("100"), code)
    assert t.oracle_calls == 1 and t.recovered == 0
    for p in (1, 2, 3, 4):
        code = build_huffman(SourceDistribution.uniform(2**p))
        for i in range(2**p):
            t = classical_huffman_search(Database.of(DigitString.unit(2**p, i)), code)
            assert t.oracle_calls == p and t.success


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=2, max_size=30))
def test_huffman_baseline_reads_whole_codeword(weights):
    source = SourceDistribution.normalized(weights)
    code = build_huffman(source)
    for i in range(source.n):
        t = classical_huffman_search(Database.of(DigitString.unit(source.n, i)), code)
        assert t.success and t.recovered == i
        assert t.oracle_calls == code.lengths[i]
        assert t.oracle_calls >= 1


def test_huffman_baseline_mean_calls_monte_carlo():
    rng = np.random.default_rng(42)
    source = SourceDistribution.normalized(rng.dirichlet(np.ones(20)))
    code = build_huffman(source)
    draws = rng.choice(source.n, size=10_000, p=np.array(source.probabilities))
    calls = {i: classical_huffman_search(Database.of(DigitString.unit(20, i)), code).oracle_calls
             for i in set(draws.tolist())}
    observed = np.mean([calls[i] for i in draws])
    lengths = np.array(code.lengths)
    sd = math.sqrt(np.dot(source.probabilities, (lengths - code.mean_length()) ** 2) / 10_000)
    assert abs(observed - code.mean_length()) <= 3 * sd


def test_random_code_baseline_examples():
    y = DigitString.parse("(1,0,2)", 3)
    gens = GeneratorSet((DigitString.parse("(1,1,0)", 3),))
    t = classical_random_code(Database.of(y, "zA_dot", 3), gens, [y])
    assert t.success and t.oracle_calls == 1


def test_random_code_paired_with_quantum():
    trials = collision_trials(3, 8, 9, 0, 1000, seed=12)
    failures = 0
    for t in range(trials.trials):
        gens, cands, y = trials.trial(t)
        c = classical_random_code(Database.of(y, "zA_dot", 3), gens, cands)
        q = IndexedSearch("random_coding", gens, cands).run(Database.of(y, "zA_dot", 3))
        assert c.oracle_calls == gens.m and q.oracle_calls == 1
        assert c.success == q.success == (not trials.failed[t])
        if c.success:
            assert c.recovered == q.recovered == y
        failures += not c.success
    assert failures == int(trials.failed.sum())
