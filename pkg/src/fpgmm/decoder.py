"""Reconstruction: interpolate the rational response function from R worker
outputs, strip the per-pole constants, and reassemble the requested products.

Every worker output is one evaluation of

    U(x) = sum over expanded pairs (i,j) of gamma_ij * P_ij / (x - f_ij)
           + (matrix polynomial of degree <= delta + 2T - 2)

entrywise in the unknown sub-products P_ij. With M = |expanded set| poles
and delta + 2T - 1 polynomial coefficients there are R unknowns per entry;
evaluations at R distinct non-pole points give a Cauchy-Vandermonde system,
which is invertible whenever poles and points are pairwise distinct. One
factorization is shared by all matrix entries: the right-hand side carries
every entry position as a separate column.
"""

from __future__ import annotations

import numpy as np

from dataclasses import dataclass, field

from .blockmatrix import BlockMatrix, assemble_grid
from .encoder import EvaluationPlan
from .field import FieldElement
from .instance import ExpandedSet, Grouping, Pair
from .worker import WorkerOutput


class InsufficientResponses(Exception):
    """Fewer worker outputs than the recovery threshold."""

    def __init__(self, required: int, got: int):
        super().__init__(f"need {required} worker outputs to decode, got {got}")
        self.required = required
        self.got = got


@dataclass(frozen=True)
class RationalBasisSpec:
    """The function family the decoder inverts.

    poles: one value per expanded pair, in canonical expanded order (that
    order fixes which recovered coefficient belongs to which sub-product).
    poly_degree_bound: highest power of the polynomial tail,
    delta + 2T - 2.
    """

    poles: tuple[FieldElement, ...]
    poly_degree_bound: int

    def __post_init__(self):
        vals = [p.value for p in self.poles]
        if len(set(vals)) != len(vals):
            raise ValueError("basis poles must be pairwise distinct")
        if self.poly_degree_bound < 0:
            raise ValueError("polynomial degree bound must be >= 0")

    @property
    def total_unknowns(self) -> int:
        return len(self.poles) + self.poly_degree_bound + 1

    @classmethod
    def for_instance(cls, expanded: ExpandedSet, grouping: Grouping, t: int, plan: EvaluationPlan) -> "RationalBasisSpec":
        poles = tuple(plan.poles[p] for p in expanded.pairs)
        return cls(poles=poles, poly_degree_bound=grouping.delta + 2 * t - 2)


@dataclass
class RecoveredProducts:
    """Sub-products keyed by expanded pair; assembled full products keyed by
    source pair once assemble() has run."""

    blocks: dict[Pair, BlockMatrix]
    assembled: dict[Pair, BlockMatrix] = field(default_factory=dict)


def gamma_constant(grouping: Grouping, plan: EvaluationPlan, target: Pair) -> FieldElement:
    """Residue weight of `target`: prod over its group's other poles of
    (f_target - f_other). Nonzero because poles are distinct."""
    k = grouping.group_index(target)
    f_t = plan.poles[target]
    acc = f_t.modulus.one()
    for pair in grouping.groups[k - 1]:
        if pair != target:
            acc = acc * (f_t - plan.poles[pair])
    return acc


def _batch_inv(values: list[int], q: int) -> list[int]:
    """Inverses of nonzero residues with a single exponentiation."""
    n = len(values)
    if n == 0:
        return []
    prefix = [1] * (n + 1)
    for i, v in enumerate(values):
        if v == 0:
            raise ZeroDivisionError("batch inversion hit zero")
        prefix[i + 1] = prefix[i] * v % q
    running = pow(prefix[n], q - 2, q)
    out = [0] * n
    for i in range(n - 1, -1, -1):
        out[i] = prefix[i] * running % q
        running = running * values[i] % q
    return out


def build_system(spec: RationalBasisSpec, points: list[FieldElement]) -> BlockMatrix:
    """Square collocation matrix: one row per point, columns are the basis
    functions 1/(x-f_1) ... 1/(x-f_M), 1, x, ..., x^bound."""
    if len(points) != spec.total_unknowns:
        raise ValueError(
            f"need exactly {spec.total_unknowns} points for a square system, got {len(points)}"
        )
    vals = [p.value for p in points]
    if len(set(vals)) != len(vals):
        raise ValueError("evaluation points must be pairwise distinct")
    if not points:
        raise ValueError("empty system")
    q = points[0].modulus.q
    pole_vals = [f.value for f in spec.poles]
    if set(vals) & set(pole_vals):
        raise ValueError("an evaluation point equals a pole")
    rows = []
    n_poly = spec.poly_degree_bound + 1
    for x in vals:
        diffs = [(x - f) % q for f in pole_vals]
        row = _batch_inv(diffs, q)
        p = 1
        for _ in range(n_poly):
            row.append(p)
            p = p * x % q
        rows.append(row)
    return BlockMatrix.from_rows(rows, points[0].modulus)


def _gaussian_solve(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Solve a X = b mod q for all columns of b at once (Gauss-Jordan).

    Raises AssertionError on a zero pivot column: with distinct poles and
    points the system is provably invertible, so singularity means a bug
    upstream, not a recoverable condition.
    """
    n = a.shape[0]
    aug = np.concatenate([a, b], axis=1)
    if aug.dtype != object:
        aug = aug.astype(np.int64, copy=True)
    else:
        aug = aug.copy()
    for col in range(n):
        piv = col
        while piv < n and aug[piv, col] == 0:
            piv += 1
        assert piv < n, "singular system despite distinct poles/points"
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        inv = pow(int(aug[col, col]), q - 2, q)
        aug[col, col:] = aug[col, col:] * inv % q
        factors = aug[col + 1:, col].copy()
        if factors.size:
            aug[col + 1:, col:] = (aug[col + 1:, col:] - factors[:, None] * aug[col, col:]) % q
    for col in range(n - 1, 0, -1):
        factors = aug[:col, col].copy()
        aug[:col, n:] = (aug[:col, n:] - factors[:, None] * aug[col, n:]) % q
        aug[:col, col] = 0
    return aug[:, n:]


def solve_and_extract(
    outputs: list[WorkerOutput],
    spec: RationalBasisSpec,
    plan: EvaluationPlan,
    grouping: Grouping,
) -> RecoveredProducts:
    """Decode the expanded sub-products from any >= R worker outputs.

    Deterministically uses the R outputs with the lowest worker ids; any
    valid R-subset yields the same result, so the choice only pins down
    reproducibility.
    """
    threshold = spec.total_unknowns
    ids = [o.worker for o in outputs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate worker ids among outputs")
    if len(outputs) < threshold:
        raise InsufficientResponses(threshold, len(outputs))
    chosen = sorted(outputs, key=lambda o: o.worker)[:threshold]
    points = [plan.worker_points[o.worker] for o in chosen]
    modulus = points[0].modulus
    q = modulus.q

    system = build_system(spec, points).as_array()
    shape = (chosen[0].u.rows, chosen[0].u.cols)
    rhs = np.stack([o.u.as_array().ravel() for o in chosen])
    coeffs = _gaussian_solve(system, rhs, q)

    pair_by_pole = {plan.poles[p].value: p for p in plan.poles}
    blocks: dict[Pair, BlockMatrix] = {}
    for idx, pole in enumerate(spec.poles):
        pair = pair_by_pole[pole.value]
        gamma = gamma_constant(grouping, plan, pair)
        scaled = coeffs[idx] * gamma.inv().value % q
        blocks[pair] = BlockMatrix(scaled.reshape(shape), modulus)
    return RecoveredProducts(blocks=blocks)


def assemble(recovered: RecoveredProducts, expanded: ExpandedSet) -> dict[Pair, BlockMatrix]:
    """Reassemble each requested product from its m x n grid of sub-products.

    Fills recovered.assembled and returns it.
    """
    grids: dict[Pair, dict[tuple[int, int], BlockMatrix]] = {}
    for exp_pair, (src, (a, b)) in expanded.back_map.items():
        if exp_pair not in recovered.blocks:
            raise ValueError(f"missing decoded block for expanded pair {exp_pair}")
        grids.setdefault(src, {})[(a, b)] = recovered.blocks[exp_pair]
    out: dict[Pair, BlockMatrix] = {}
    for src, cells in grids.items():
        m = max(a for a, _ in cells)
        n = max(b for _, b in cells)
        if len(cells) != m * n:
            raise ValueError(f"product {src} is missing blocks: have {len(cells)} of {m * n}")
        grid = [[cells[(a, b)] for b in range(1, n + 1)] for a in range(1, m + 1)]
        out[src] = assemble_grid(grid)
    recovered.assembled = out
    return out


def products_to_json(products: dict[Pair, BlockMatrix]) -> dict:
    """JSON map "i,j" -> matrix literal."""
    return {f"{i},{j}": mat.to_json_dict() for (i, j), mat in sorted(products.items())}


def products_from_json(obj: dict) -> dict[Pair, BlockMatrix]:
    out = {}
    for key, literal in obj.items():
        i, j = key.split(",")
        out[(int(i), int(j))] = BlockMatrix.from_json_dict(literal)
    return out
