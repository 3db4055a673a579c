from collections import Counter

import numpy as np
import pytest

from hypersparse.errors import IncompatibleSketches
from hypersparse.l0sampler import (EMPTY, FAIL, FOUND, PRIME, L0Sampler, SeedMaterial,
                                   depth_for_support, merge)


def sampler(seed=0, depth=41, rep=0):
    return L0Sampler(SeedMaterial(seed, "test", 0, 0, rep), depth)


def test_empty_and_single():
    s = sampler()
    assert s.sample().status == EMPTY
    s.update(12345, 1)
    assert s.sample() == (FOUND, 12345, 1)
    s.update(12345, -1)
    assert s.sample().status == EMPTY
    assert s.to_bytes() == sampler().to_bytes()


def test_one_sparse_rows():
    s = sampler()
    s.update(77, 3)
    rows = [r for r in s.rows() if any(r)]
    assert rows[0][0] == 3 and rows[0][1] == 3 * 77
    assert all(r[2] == 3 * pow(s.params.z, 77, PRIME) % PRIME for r in rows)


def test_linearity_and_merge():
    rng = np.random.default_rng(0)
    a, b, ab = sampler(), sampler(), sampler()
    for _ in range(200):
        x, d = int(rng.integers(1, 2 ** 40)), int(rng.choice([-1, 1]))
        target = a if rng.random() < 0.5 else b
        target.update(x, d)
        ab.update(x, d)
    assert merge(a, b).to_bytes() == ab.to_bytes()
    assert merge(a, sampler()) == a
    c = sampler()
    c.update(9, 1)
    d = sampler()
    d.update(9, -1)
    assert merge(c, d).sample().status == EMPTY


def test_merge_needs_same_seed():
    with pytest.raises(IncompatibleSketches):
        merge(sampler(0), sampler(1))
    with pytest.raises(IncompatibleSketches):
        merge(sampler(0, rep=0), sampler(0, rep=1))


def test_serialization_round_trip():
    s = sampler(3)
    for x in (5, 2 ** 200 + 1, 99):
        s.update(x, 2)
    t = L0Sampler.from_bytes(s.to_bytes())
    assert t == s and t.sample() == s.sample()
    with pytest.raises(ValueError):
        L0Sampler.from_bytes(b"nope" + s.to_bytes()[4:])


def test_soundness_against_map():
    rng = np.random.default_rng(1)
    found = 0
    for trial in range(1000):
        s = sampler(trial)
        truth = Counter()
        for _ in range(int(rng.integers(1, 60))):
            x = int(rng.integers(1, 2 ** 62))
            if truth and rng.random() < 0.3:
                x = int(rng.choice(list(truth)))
            d = int(rng.choice([-2, -1, 1, 2]))
            s.update(x, d)
            truth[x] += d
        live = {x: c for x, c in truth.items() if c}
        res = s.sample()
        if not live:
            assert res.status == EMPTY
        elif res.status == FOUND:
            found += 1
            assert live.get(res.coordinate) == res.value
    assert found > 800


def test_completeness_large_support():
    rng = np.random.default_rng(2)
    support = {int(x) for x in rng.integers(1, 2 ** 40, size=100)}
    depth = depth_for_support(2 ** 40)
    hits = 0
    for seed in range(300):
        s = sampler(seed, depth)
        for x in support:
            s.update(x, 1)
        res = s.sample()
        assert res.status in (FOUND, FAIL)
        if res.status == FOUND:
            assert res.coordinate in support and res.value == 1
            hits += 1
    assert hits / 300 >= 0.9


def test_near_uniform():
    support = [11, 222, 3333, 44444, 555, 66, 7777, 88]
    counts = Counter()
    trials = 4000
    for seed in range(trials):
        s = sampler(seed, 8)
        for x in support:
            s.update(x, 1)
        res = s.sample()
        if res.status == FOUND:
            counts[res.coordinate] += 1
    for x in support:
        assert trials / 16 <= counts[x] <= trials / 4


def test_determinism():
    a, b = sampler(42), sampler(42)
    for x in range(1, 30):
        a.update(x * 7919, 1)
        b.update(x * 7919, 1)
    assert a.to_bytes() == b.to_bytes()
