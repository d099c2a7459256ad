"""Worker-side computation: encode the shared libraries with the received
query, multiply group by group, and return one product-sum matrix.

Workers are pure functions of (libraries, query). The query's partition
parameters tell the worker how to split and re-index the libraries; the
worker never sees poles or its own evaluation point, so it cannot tell
which linear combinations it is computing.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blockmatrix import BlockMatrix, matmul
from .encoder import Query
from .field import FieldModulus


@dataclass(frozen=True)
class WorkerOutput:
    """One worker's response: the product-sum and its multiplication count.

    mul_count counts field multiplications of the naive product-sum kernel
    only (r * (alpha/m) * alpha * (alpha/n)); the library-encoding step is
    excluded since it is dominated for large matrices.
    """

    worker: int
    u: BlockMatrix
    mul_count: int

    def to_json_dict(self) -> dict:
        return {
            "worker": self.worker,
            "rows": self.u.rows,
            "cols": self.u.cols,
            "entries": [int(v) for v in self.u.as_array().ravel()],
            "mul_count": self.mul_count,
        }

    @classmethod
    def from_json_dict(cls, obj: dict, modulus: FieldModulus) -> "WorkerOutput":
        mat = BlockMatrix.from_json_dict(
            {"rows": obj["rows"], "cols": obj["cols"], "q": modulus.q, "entries": obj["entries"]}
        )
        return cls(worker=obj["worker"], u=mat, mul_count=obj["mul_count"])


def reindex_rows(lib_a: list[BlockMatrix], m: int) -> list[BlockMatrix]:
    """Row-partition every library-A matrix into m bands and flatten.

    Band a of source matrix i becomes entry m*(i-1)+a (1-based), matching
    the expanded index convention of the instance module.
    """
    out = []
    for mat in lib_a:
        out.extend(mat.partition_rows(m))
    return out


def reindex_cols(lib_b: list[BlockMatrix], n: int) -> list[BlockMatrix]:
    """Column-partition every library-B matrix into n bands and flatten."""
    out = []
    for mat in lib_b:
        out.extend(mat.partition_cols(n))
    return out


def encode_libraries(
    lib_a: list[BlockMatrix],
    lib_b: list[BlockMatrix],
    query: Query,
) -> tuple[list[BlockMatrix], list[BlockMatrix]]:
    """Per-group encoded matrices: linear combinations under the query's evaluations.

    Returns r matrices of shape (alpha/m) x alpha and r of shape
    alpha x (alpha/n).
    """
    _check_shapes(lib_a, lib_b, query)
    tilde_a = reindex_rows(lib_a, query.m)
    tilde_b = reindex_cols(lib_b, query.n)
    if len(query.a_evals) != len(tilde_a) or len(query.b_evals) != len(tilde_b):
        raise ValueError(
            f"query addresses {len(query.a_evals)}/{len(query.b_evals)} sub-matrices, "
            f"library provides {len(tilde_a)}/{len(tilde_b)}"
        )
    hat_a = []
    hat_b = []
    for k in range(query.r):
        acc_a = BlockMatrix.zeros(tilde_a[0].rows, tilde_a[0].cols, tilde_a[0].modulus)
        for i, mat in enumerate(tilde_a):
            c = query.a_evals[i][k]
            if c:
                acc_a = acc_a + mat.scale(c)
        hat_a.append(acc_a)
        acc_b = BlockMatrix.zeros(tilde_b[0].rows, tilde_b[0].cols, tilde_b[0].modulus)
        for j, mat in enumerate(tilde_b):
            c = query.b_evals[j][k]
            if c:
                acc_b = acc_b + mat.scale(c)
        hat_b.append(acc_b)
    return hat_a, hat_b


def respond(lib_a: list[BlockMatrix], lib_b: list[BlockMatrix], query: Query) -> WorkerOutput:
    """Sum of the r encoded products, plus the naive kernel's multiplication count."""
    hat_a, hat_b = encode_libraries(lib_a, lib_b, query)
    u = matmul(hat_a[0], hat_b[0])
    for k in range(1, query.r):
        u = u + matmul(hat_a[k], hat_b[k])
    mul_count = query.r * hat_a[0].rows * hat_a[0].cols * hat_b[0].cols
    return WorkerOutput(worker=query.worker, u=u, mul_count=mul_count)


def _check_shapes(lib_a, lib_b, query: Query):
    if not lib_a or not lib_b:
        raise ValueError("libraries must be non-empty")
    alpha = lib_a[0].rows
    for mat in (*lib_a, *lib_b):
        if mat.rows != alpha or mat.cols != alpha:
            raise ValueError("library matrices must all be alpha x alpha")
    if alpha % query.m != 0:
        raise ValueError(f"m={query.m} does not divide alpha={alpha}")
    if alpha % query.n != 0:
        raise ValueError(f"n={query.n} does not divide alpha={alpha}")
