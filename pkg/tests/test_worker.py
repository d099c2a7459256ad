import random
from fractions import Fraction

import pytest

from conftest import as_lists, example_instance, full_setup, naive_matmul
from fpgmm.blockmatrix import BlockMatrix, matmul
from fpgmm.encoder import Query
from fpgmm.field import FieldModulus
from fpgmm.worker import WorkerOutput, encode_libraries, reindex_cols, reindex_rows, respond

GF13 = FieldModulus(13)


def make_query(worker, m, n, r, a_evals, b_evals):
    return Query(
        worker=worker, m=m, n=n, r=r,
        a_evals=tuple(tuple(row) for row in a_evals),
        b_evals=tuple(tuple(row) for row in b_evals),
    )


def rand_lib(count, alpha, rng):
    return [
        BlockMatrix.from_rows(
            [[rng.randrange(13) for _ in range(alpha)] for _ in range(alpha)], GF13
        )
        for _ in range(count)
    ]


def test_reindex_orders_blocks_row_major():
    rng = random.Random(0)
    lib = rand_lib(2, 4, rng)
    tilde = reindex_rows(lib, 2)
    assert len(tilde) == 4
    assert tilde[0] == lib[0].partition_rows(2)[0]
    assert tilde[1] == lib[0].partition_rows(2)[1]
    assert tilde[2] == lib[1].partition_rows(2)[0]
    cols = reindex_cols(lib, 4)
    assert len(cols) == 8
    assert cols[5] == lib[1].partition_cols(4)[1]


def test_zero_evaluations_give_zero_matrices():
    rng = random.Random(1)
    lib_a, lib_b = rand_lib(2, 4, rng), rand_lib(2, 4, rng)
    query = make_query(1, 1, 2, 2, [[0, 0]] * 2, [[0, 0]] * 4)
    hat_a, hat_b = encode_libraries(lib_a, lib_b, query)
    assert all(not mat.as_array().any() for mat in hat_a + hat_b)


def test_single_nonzero_evaluation_selects_basis_matrix():
    rng = random.Random(2)
    lib_a, lib_b = rand_lib(2, 4, rng), rand_lib(1, 4, rng)
    query = make_query(1, 2, 1, 1, [[5], [0], [0], [0]], [[0]])
    hat_a, _ = encode_libraries(lib_a, lib_b, query)
    assert hat_a[0] == reindex_rows(lib_a, 2)[0].scale(5)


def test_example_shape_no_a_split():
    # m=1: the encoded A-side combinations run over whole library matrices
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=3)
    hat_a, hat_b = encode_libraries(lib_a, lib_b, queries[0])
    assert len(hat_a) == 2 and len(hat_b) == 2
    assert hat_a[0].rows == 4 and hat_a[0].cols == 4
    assert hat_b[0].rows == 4 and hat_b[0].cols == 2
    k = 0
    expected = lib_a[0].scale(queries[0].a_evals[0][k]) + lib_a[1].scale(queries[0].a_evals[1][k])
    assert hat_a[k] == expected


def test_respond_sums_group_products():
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=4)
    out = respond(lib_a, lib_b, queries[2])
    hat_a, hat_b = encode_libraries(lib_a, lib_b, queries[2])
    assert out.u == matmul(hat_a[0], hat_b[0]) + matmul(hat_a[1], hat_b[1])
    assert out.worker == 3
    assert out.u.rows == 4 and out.u.cols == 2


def test_mul_count_naive_kernel():
    # r * (alpha/m) * alpha * (alpha/n) = 2*4*4*2
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=5)
    out = respond(lib_a, lib_b, queries[0])
    assert out.mul_count == 64


def test_ncc_realization_equals_closed_form():
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=6)
    out = respond(lib_a, lib_b, queries[0])
    p = inst.params
    s = len(inst.desired.pairs)
    assert Fraction(out.mul_count, s * p.alpha**3) == Fraction(p.r, s * p.m * p.n)


def test_worker_is_oblivious_to_query_provenance():
    # identical evaluations => identical response, whatever produced them
    rng = random.Random(7)
    lib_a, lib_b = rand_lib(2, 4, rng), rand_lib(2, 4, rng)
    evals_a = [[rng.randrange(13)] for _ in range(2)]
    evals_b = [[rng.randrange(13)] for _ in range(2)]
    q1 = make_query(1, 1, 1, 1, evals_a, evals_b)
    q2 = make_query(9, 1, 1, 1, evals_a, evals_b)
    assert respond(lib_a, lib_b, q1).u == respond(lib_a, lib_b, q2).u


def test_shape_errors():
    rng = random.Random(8)
    lib_a, lib_b = rand_lib(1, 4, rng), rand_lib(1, 4, rng)
    with pytest.raises(ValueError):
        respond(lib_a, lib_b, make_query(1, 3, 1, 1, [[1]] * 3, [[1]]))
    with pytest.raises(ValueError):
        respond(lib_a, lib_b, make_query(1, 1, 1, 1, [[1], [1]], [[1]]))
    with pytest.raises(ValueError):
        respond([], lib_b, make_query(1, 1, 1, 1, [], [[1]]))
    bad = [BlockMatrix.zeros(4, 2, GF13)]
    with pytest.raises(ValueError):
        respond(bad, lib_b, make_query(1, 1, 1, 1, [[1]], [[1]]))


def test_output_wire_format_round_trip():
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=9)
    out = respond(lib_a, lib_b, queries[0])
    obj = out.to_json_dict()
    assert set(obj) == {"worker", "rows", "cols", "entries", "mul_count"}
    back = WorkerOutput.from_json_dict(obj, GF13)
    assert back == out


def test_respond_matches_naive_reference():
    # recompute one response entirely with list arithmetic
    inst = example_instance()
    _, _, queries, lib_a, lib_b = full_setup(inst, seed=10)
    query = queries[1]
    tilde_a = [as_lists(m) for m in reindex_rows(lib_a, query.m)]
    tilde_b = [as_lists(m) for m in reindex_cols(lib_b, query.n)]
    expected = [[0] * 2 for _ in range(4)]
    for k in range(query.r):
        ha = [[0] * 4 for _ in range(4)]
        hb = [[0] * 2 for _ in range(4)]
        for i, mat in enumerate(tilde_a):
            c = query.a_evals[i][k]
            for rr in range(4):
                for cc in range(4):
                    ha[rr][cc] = (ha[rr][cc] + c * mat[rr][cc]) % 13
        for j, mat in enumerate(tilde_b):
            c = query.b_evals[j][k]
            for rr in range(4):
                for cc in range(2):
                    hb[rr][cc] = (hb[rr][cc] + c * mat[rr][cc]) % 13
        prod = naive_matmul(ha, hb, 13)
        for rr in range(4):
            for cc in range(2):
                expected[rr][cc] = (expected[rr][cc] + prod[rr][cc]) % 13
    assert as_lists(respond(lib_a, lib_b, query).u) == expected
