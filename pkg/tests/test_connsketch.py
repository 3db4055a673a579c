from collections import Counter, defaultdict

import numpy as np
import pytest

from hypersparse import Partition, connected_components
from hypersparse.connsketch import ConnBank, conn_merge, conn_update, recover_components
from hypersparse.core import incidence_coordinate
from hypersparse.errors import IncompatibleSketches, RecoveryFailure
from hypersparse.l0sampler import PRIME

from conftest import random_edges


def bank_for(n, edges, seed=0, r=4, **kw):
    b = ConnBank(n, r, seed, **kw)
    for e in edges:
        conn_update(b, e, 1)
    return b


def test_no_edges_returns_base():
    b = ConnBank(6, 3, 0)
    assert recover_components(b).k == 6
    base = Partition.from_blocks([[0, 1], [2, 3], [4], [5]], 6)
    assert recover_components(b, base) == base


def test_single_spanning_edge():
    b = bank_for(5, [(0, 1, 2, 3, 4)], r=5)
    assert recover_components(b).k == 1


def test_insert_delete_cancels():
    rng = np.random.default_rng(0)
    edges = random_edges(rng, 10, 20, 4)
    b = bank_for(10, edges)
    snapshot = b.to_bytes()
    conn_update(b, (2, 5, 7), 1)
    conn_update(b, (2, 5, 7), -1)
    assert b.to_bytes() == snapshot
    for e in edges:
        conn_update(b, e, -1)
    assert b.to_bytes() == ConnBank(10, 4, 0).to_bytes()
    assert b.live_samplers == 0


def test_signed_incidence_matches_map_oracle():
    rng = np.random.default_rng(1)
    n = 9
    edges = random_edges(rng, n, 25, 4)
    b = bank_for(n, edges, reps=2)
    for a, c in [(0, 1), (1, 2), (5, 6)]:
        b.merge(a, c)
    owner = {v: b.supernode(v) for v in range(n)}
    vec = defaultdict(Counter)
    for e in edges:
        groups = Counter(owner[v] for v in e)
        for u in e:
            x = incidence_coordinate(e, u, n)
            for S, s in groups.items():
                val = (len(e) - s) if owner[u] == S else -s
                vec[S][x] += val
    for S in set(owner.values()):
        live = {x: c for x, c in vec[S].items() if c}
        sk = b.sketches.get(S)
        if not live:
            assert sk is None
            continue
        smp = sk.samplers[0]
        s0, s1, fz = smp.rows()[0]
        assert s0 == sum(live.values())
        assert s1 == sum(c * x for x, c in live.items())
        assert fz == sum(c * pow(smp.params.z, x, PRIME) for x, c in live.items()) % PRIME


def test_internal_edge_cancels():
    b = ConnBank(4, 2, 0)
    conn_update(b, (0, 1), 1)
    b.merge(0, 1)
    assert not b.sketches


def test_strict_subset_leaves_coordinates():
    b = ConnBank(5, 4, 0, reps=1)
    conn_update(b, (0, 1, 2, 3), 1)
    b.merge(0, 1)
    sk = b.sketches[b.supernode(0)]
    assert sk.samplers[0].sample().status != "empty"


def test_merge_examples():
    b = bank_for(4, [(0, 1)], r=2)
    s0, s1 = b.sketches[0], b.sketches[1]
    assert conn_merge(s0, s1).is_empty()
    empty = ConnBank(4, 2, 0).sketch_type(0)
    assert conn_merge(s0, empty) == s0
    other = bank_for(4, [(0, 1)], seed=9, r=2)
    with pytest.raises(IncompatibleSketches):
        conn_merge(s0, other.sketches[0])


def test_recovery_matches_union_find():
    rng = np.random.default_rng(2)
    exact = 0
    for seed in range(30):
        n = 32
        edges = random_edges(rng, n, int(rng.integers(8, 40)), 4)
        truth = connected_components(n, edges)
        got = recover_components(bank_for(n, edges, seed))
        assert got.refines(truth)
        exact += got == truth
    assert exact >= 29


def test_base_is_coarsened():
    rng = np.random.default_rng(3)
    n = 16
    edges = random_edges(rng, n, 10, 3)
    base = Partition.from_blocks([[0, 15], [3, 4, 5]] + [[v] for v in range(n)
                                                         if v not in (0, 15, 3, 4, 5)], n)
    got = recover_components(bank_for(n, edges, 4), base)
    truth = connected_components(n, edges + [(0, 15), (3, 4, 5)])
    assert base.refines(got) and got.refines(truth)


def test_too_few_reps_fails_loudly():
    n = 16
    edges = [(v, v + 1) for v in range(n - 1)]
    with pytest.raises(RecoveryFailure) as info:
        recover_components(bank_for(n, edges, 0, reps=1))
    assert info.value.phase == 1 and info.value.partial is not None
