import random

import pytest

from conftest import small_instance
from fpgmm.encoder import NoiseTensor, assign_points, encode_a_eval, encode_b_eval
from fpgmm.field import FieldModulus, spawn_rng
from fpgmm.instance import DesiredSet, SchemeParams
from fpgmm.privacy import (
    EnumerationBudgetExceeded,
    enumerate_distribution,
    privacy_check,
)


def plan_for(inst, seed=0):
    return assign_points(inst.params, inst.expanded, spawn_rng(seed, "plan"))


def test_minimal_instance_enumeration_uniform():
    # one library pair, one group, one noise symbol per side: 49 assignments,
    # every (a, b) evaluation pair appears exactly once
    inst = small_instance(q=7, l_a=1, l_b=1, pairs=[(1, 1)], n_workers=3)
    dist = enumerate_distribution(inst, plan_for(inst), colluders=[1])
    assert dist.z_dim == 2
    assert dist.total() == 49
    assert len(dist.histogram) == 49
    assert set(dist.histogram.values()) == {1}
    assert dist.is_uniform()


def test_zero_colluders_single_bin():
    inst = small_instance(q=7, l_a=1, l_b=1, pairs=[(1, 1)], n_workers=3)
    dist = enumerate_distribution(inst, plan_for(inst), colluders=[])
    assert dist.histogram == {(): 49}
    assert dist.is_uniform()


def test_counts_always_sum_to_full_enumeration():
    inst = small_instance(q=5, l_a=2, l_b=1, pairs=[(2, 1)], n_workers=2,
                          check_worker_count=False)
    dist = enumerate_distribution(inst, plan_for(inst), colluders=[2])
    assert dist.total() == 5 ** dist.z_dim


def test_budget_guard():
    inst = small_instance(q=11, l_a=2, l_b=2, pairs=[(1, 1)], n_workers=3,
                          check_worker_count=False)
    with pytest.raises(EnumerationBudgetExceeded):
        enumerate_distribution(inst, plan_for(inst), colluders=[1], budget=100)


def test_affine_enumeration_matches_direct_encoding():
    # cross-check the fast path against the scalar encoder on random
    # noise assignments
    inst = small_instance(q=11, l_a=2, l_b=1, pairs=[(1, 1)], n_workers=3)
    plan = plan_for(inst, seed=5)
    dist = enumerate_distribution(inst, plan, colluders=[2])
    p = inst.params
    rng = random.Random(6)
    for _ in range(30):
        z_vals = [rng.randrange(11) for _ in range(dist.z_dim)]
        noise = NoiseTensor.zeros(p)
        pos = 0
        for i in range(1, p.m * p.l_a + 1):
            for k in range(1, p.r + 1):
                for t in range(p.t):
                    noise.z_a[i - 1][k - 1][t] = p.modulus.element(z_vals[pos])
                    pos += 1
        for j in range(1, p.n * p.l_b + 1):
            for k in range(1, p.r + 1):
                for t in range(p.t):
                    noise.z_b[j - 1][k - 1][t] = p.modulus.element(z_vals[pos])
                    pos += 1
        x = plan.worker_points[2]
        visible = []
        for i in range(1, p.m * p.l_a + 1):
            for k in range(1, p.r + 1):
                visible.append(encode_a_eval(i, k, x, inst.grouping, plan, noise).value)
        for j in range(1, p.n * p.l_b + 1):
            for k in range(1, p.r + 1):
                visible.append(encode_b_eval(j, k, x, inst.grouping, plan, noise).value)
        assert tuple(visible) in dist.histogram


@pytest.mark.parametrize("colluder_count", [1, 2])
def test_uniformity_up_to_t_colluders(colluder_count):
    # T=2 instance; both single colluders and the full coalition see an
    # exactly uniform joint distribution for a fixed plan
    inst = small_instance(q=3, l_a=1, l_b=1, pairs=[(1, 1)], t=2, n_workers=2,
                          check_worker_count=False)
    plan = plan_for(inst, seed=7)
    colluders = list(range(1, colluder_count + 1))
    dist = enumerate_distribution(inst, plan, colluders=colluders)
    assert dist.z_dim == 4
    assert dist.is_uniform()


def test_privacy_check_element_hiding():
    params = SchemeParams(alpha=1, l_a=2, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=3, modulus=FieldModulus(11))
    verdict = privacy_check(params, DesiredSet.of([(1, 1)]), DesiredSet.of([(2, 1)]),
                            colluders=[1])
    assert verdict.passed
    assert verdict.bins == (11**3, 11**3)
    assert verdict.first_divergence is None


def test_privacy_check_identical_sets():
    params = SchemeParams(alpha=1, l_a=2, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=3, modulus=FieldModulus(7))
    s = DesiredSet.of([(1, 1)])
    assert privacy_check(params, s, s, colluders=[2]).passed


def test_privacy_check_cardinality_hiding():
    # requests of different sizes are indistinguishable: N >= R fails for
    # the larger set, which must not matter for query privacy
    params = SchemeParams(alpha=1, l_a=2, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=3, modulus=FieldModulus(11))
    verdict = privacy_check(params, DesiredSet.of([(1, 1)]),
                            DesiredSet.of([(1, 1), (2, 1)]), colluders=[1])
    assert verdict.passed


def test_zero_noise_control_fails():
    params = SchemeParams(alpha=1, l_a=2, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=3, modulus=FieldModulus(11))
    verdict = privacy_check(params, DesiredSet.of([(1, 1)]), DesiredSet.of([(2, 1)]),
                            colluders=[1], zero_noise=True)
    assert not verdict.passed
    assert verdict.first_divergence is not None


def test_beyond_contract_coalition_still_reports():
    # T+1 colluders: the comparison is reported, no privacy promise applies
    params = SchemeParams(alpha=1, l_a=1, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=4, modulus=FieldModulus(5))
    verdict = privacy_check(params, DesiredSet.of([(1, 1)]), DesiredSet.of([(1, 1)]),
                            colluders=[1, 2])
    assert verdict.colluders == (1, 2)
    assert isinstance(verdict.passed, bool)


def test_verdict_json_shape():
    params = SchemeParams(alpha=1, l_a=2, l_b=1, m=1, n=1, r=1, t=1,
                          n_workers=3, modulus=FieldModulus(7))
    verdict = privacy_check(params, DesiredSet.of([(1, 1)]), DesiredSet.of([(2, 1)]),
                            colluders=[1])
    obj = verdict.to_json_dict()
    assert set(obj) == {"pass", "bins", "z_dims", "q", "colluders", "s1", "s2"}
    assert obj["pass"] is True
    bad = privacy_check(params, DesiredSet.of([(1, 1)]), DesiredSet.of([(2, 1)]),
                        colluders=[1], zero_noise=True)
    assert "first_divergence" in bad.to_json_dict()


def test_unknown_colluder_rejected():
    inst = small_instance(q=7, l_a=1, l_b=1, pairs=[(1, 1)], n_workers=3)
    with pytest.raises(ValueError):
        enumerate_distribution(inst, plan_for(inst), colluders=[99])
