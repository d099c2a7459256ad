"""Shared builders and independent oracles for the test suite."""

import random

from fpgmm.blockmatrix import BlockMatrix
from fpgmm.encoder import NoiseTensor, assign_points, build_queries
from fpgmm.field import FieldModulus, spawn_rng
from fpgmm.instance import DesiredSet, SchemeParams, build_instance


def naive_matmul(a_rows, b_rows, q):
    """Triple-loop product over lists of lists of ints; independent of numpy."""
    rows, inner, cols = len(a_rows), len(b_rows), len(b_rows[0])
    assert len(a_rows[0]) == inner
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        for k in range(inner):
            aik = a_rows[i][k]
            for j in range(cols):
                out[i][j] = (out[i][j] + aik * b_rows[k][j]) % q
    return out


def as_lists(mat: BlockMatrix):
    arr = mat.as_array()
    return [[int(arr[i, j]) for j in range(mat.cols)] for i in range(mat.rows)]


def example_params(q=13):
    """The canonical worked example: two products of a 2x2 library pair,
    column-split in half, two groups, one colluder tolerated, 7 workers."""
    return SchemeParams(
        alpha=4, l_a=2, l_b=2, m=1, n=2, r=2, t=1, n_workers=7, modulus=FieldModulus(q)
    )


def example_instance(q=13):
    return build_instance(example_params(q), DesiredSet.of([(1, 1), (1, 2)]))


def full_setup(instance, seed=7, point_policy="random"):
    """Plan, noise, queries, and random libraries for an instance."""
    p = instance.params
    plan = assign_points(p, instance.expanded, spawn_rng(seed, "plan"), point_policy)
    noise = NoiseTensor.sample(p, spawn_rng(seed, "noise"))
    queries = build_queries(p, instance.grouping, plan, noise)
    rng = spawn_rng(seed, "libs")
    lib_a = [BlockMatrix.random(p.alpha, p.alpha, p.modulus, rng) for _ in range(p.l_a)]
    lib_b = [BlockMatrix.random(p.alpha, p.alpha, p.modulus, rng) for _ in range(p.l_b)]
    return plan, noise, queries, lib_a, lib_b


def small_instance(q, l_a, l_b, pairs, m=1, n=1, r=1, t=1, n_workers=None, alpha=None,
                   check_worker_count=True):
    from fpgmm.costmodel import fpgmm_metrics

    cost = fpgmm_metrics(m, n, r, t, len(pairs))
    params = SchemeParams(
        alpha=alpha or m * n,
        l_a=l_a,
        l_b=l_b,
        m=m,
        n=n,
        r=r,
        t=t,
        n_workers=n_workers or cost.recovery_threshold,
        modulus=FieldModulus(q),
    )
    return build_instance(params, DesiredSet.of(pairs), check_worker_count=check_worker_count)


def seeded(n=0):
    return random.Random(n)
