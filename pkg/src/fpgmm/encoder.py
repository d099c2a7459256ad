"""Master-side encoding: pole and evaluation-point assignment, noise
sampling, the rational encoding functions, and per-worker query emission.

Each expanded sub-product (i, j) owns a distinct pole f_ij. The two encoding
function families are, for group k with annihilator w_k(x) = prod (x - f)
over the group's poles,

    a_{i,k}(x) = w_k(x) * (sum over group-k pairs with left index i of
                 1/(x - f) + noise_a(x))
    b_{j,k}(x) = sum over group-k pairs with right index j of
                 1/(x - f) + noise_b(x)

with noise polynomials of degree T-1 whose coefficients are uniform field
elements. Their product leaves each desired term as the unique residue at
its own pole while every cross term collapses into a bounded-degree
polynomial; the decoder inverts exactly that structure.

Queries carry only function evaluations and the public partition parameters.
Pole values and the per-worker evaluation point stay with the master: either
one would reveal how many products were requested.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .field import FieldElement, sample_distinct, sample_uniform
from .instance import ExpandedSet, Grouping, Pair, SchemeParams

POINT_POLICIES = ("random", "ascending")


@dataclass(frozen=True)
class EvaluationPlan:
    """Master-private map of poles and worker evaluation points.

    All poles are pairwise distinct, all worker points are pairwise
    distinct, and the two sets do not meet (enforced at construction).
    """

    poles: dict[Pair, FieldElement]
    worker_points: dict[int, FieldElement]

    def __post_init__(self):
        pole_vals = [e.value for e in self.poles.values()]
        point_vals = [e.value for e in self.worker_points.values()]
        if len(set(pole_vals)) != len(pole_vals):
            raise ValueError("poles are not pairwise distinct")
        if len(set(point_vals)) != len(point_vals):
            raise ValueError("worker points are not pairwise distinct")
        if set(pole_vals) & set(point_vals):
            raise ValueError("worker points collide with poles")

    def pole_values(self) -> set[int]:
        return {e.value for e in self.poles.values()}


class NoiseTensor:
    """Uniform noise coefficients z_a[i][k][t], z_b[j][k][t] (all 1-based ids).

    Indexed [i in mL_A][k in r][t in T] on the a side and
    [j in nL_B][k in r][t in T] on the b side, flattened into nested lists.
    """

    __slots__ = ("z_a", "z_b", "t")

    def __init__(self, z_a, z_b, t: int):
        self.z_a = z_a
        self.z_b = z_b
        self.t = t

    @classmethod
    def sample(cls, params: SchemeParams, rng: random.Random) -> "NoiseTensor":
        """Independently uniform coefficients, in canonical (i, k, t) order."""
        q = params.modulus

        def tensor(outer):
            return [
                [[sample_uniform(q, rng) for _ in range(params.t)] for _ in range(params.r)]
                for _ in range(outer)
            ]

        return cls(tensor(params.m * params.l_a), tensor(params.n * params.l_b), params.t)

    @classmethod
    def zeros(cls, params: SchemeParams) -> "NoiseTensor":
        """All-zero noise. Test-only: queries built from this leak the request."""
        q = params.modulus

        def tensor(outer):
            return [
                [[q.zero() for _ in range(params.t)] for _ in range(params.r)]
                for _ in range(outer)
            ]

        return cls(tensor(params.m * params.l_a), tensor(params.n * params.l_b), params.t)

    def a_poly_eval(self, i: int, k: int, x: FieldElement) -> FieldElement:
        """noise_a_{i,k}(x) = sum_t z_a[i][k][t] x^(t-1), Horner form."""
        acc = x.modulus.zero()
        for coeff in reversed(self.z_a[i - 1][k - 1]):
            acc = acc * x + coeff
        return acc

    def b_poly_eval(self, j: int, k: int, x: FieldElement) -> FieldElement:
        acc = x.modulus.zero()
        for coeff in reversed(self.z_b[j - 1][k - 1]):
            acc = acc * x + coeff
        return acc


@dataclass(frozen=True)
class Query:
    """What one worker receives: evaluations plus public partition parameters.

    a_evals[i-1][k-1] and b_evals[j-1][k-1] hold canonical residues of the
    encoding functions at this worker's (undisclosed) evaluation point.
    Deliberately absent: pole values, the evaluation point itself.
    """

    worker: int
    m: int
    n: int
    r: int
    a_evals: tuple[tuple[int, ...], ...]
    b_evals: tuple[tuple[int, ...], ...]

    def to_json_dict(self) -> dict:
        return {
            "worker": self.worker,
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "a_evals": [list(row) for row in self.a_evals],
            "b_evals": [list(row) for row in self.b_evals],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Query":
        return cls(
            worker=obj["worker"],
            m=obj["m"],
            n=obj["n"],
            r=obj["r"],
            a_evals=tuple(tuple(int(v) for v in row) for row in obj["a_evals"]),
            b_evals=tuple(tuple(int(v) for v in row) for row in obj["b_evals"]),
        )


def assign_points(
    params: SchemeParams,
    expanded: ExpandedSet,
    rng: random.Random,
    policy: str = "random",
) -> EvaluationPlan:
    """Pick |expanded| poles and N worker points, all distinct.

    random (default): drawn from the seeded generator, so privacy tests can
    fix or vary the plan independently of the noise. ascending: residues
    0, 1, 2, ... in canonical order, for reproducible fixtures.
    """
    needed = len(expanded.pairs) + params.n_workers
    if params.modulus.q < needed:
        raise ValueError(
            f"field too small: q={params.modulus.q} < |expanded|+N = {needed}"
        )
    if policy == "random":
        values = sample_distinct(params.modulus, needed, (), rng)
    elif policy == "ascending":
        values = [params.modulus.element(v) for v in range(needed)]
    else:
        raise ValueError(f"unknown point policy {policy!r}; expected one of {POINT_POLICIES}")
    poles = dict(zip(expanded.pairs, values[: len(expanded.pairs)]))
    points = {g: values[len(expanded.pairs) + g - 1] for g in range(1, params.n_workers + 1)}
    return EvaluationPlan(poles=poles, worker_points=points)


def omega_eval(grouping: Grouping, plan: EvaluationPlan, k: int, x: FieldElement) -> FieldElement:
    """Group annihilator at x: prod over (i,j) in group k of (x - f_ij)."""
    acc = x.modulus.one()
    for pair in grouping.groups[k - 1]:
        acc = acc * (x - plan.poles[pair])
    return acc


def _rational_sum(pairs, plan: EvaluationPlan, x: FieldElement) -> FieldElement:
    acc = x.modulus.zero()
    for pair in pairs:
        diff = x - plan.poles[pair]
        if diff.value == 0:
            raise ValueError(f"evaluation point {x} collides with pole of {pair}")
        acc = acc + diff.inv()
    return acc


def encode_a_eval(
    i: int,
    k: int,
    x: FieldElement,
    grouping: Grouping,
    plan: EvaluationPlan,
    noise: NoiseTensor,
) -> FieldElement:
    """a_{i,k}(x); x must avoid every pole of group k's rational terms."""
    rational = _rational_sum(grouping.left_slice(k, i), plan, x)
    return omega_eval(grouping, plan, k, x) * (rational + noise.a_poly_eval(i, k, x))


def encode_b_eval(
    j: int,
    k: int,
    x: FieldElement,
    grouping: Grouping,
    plan: EvaluationPlan,
    noise: NoiseTensor,
) -> FieldElement:
    """b_{j,k}(x); no annihilator prefactor on this side."""
    rational = _rational_sum(grouping.right_slice(k, j), plan, x)
    return rational + noise.b_poly_eval(j, k, x)


def build_queries(
    params: SchemeParams,
    grouping: Grouping,
    plan: EvaluationPlan,
    noise: NoiseTensor,
) -> list[Query]:
    """One query per worker: every encoding function evaluated at x_g.

    Payload size is r*(mL_A + nL_B) residues plus the three public integers.
    """
    queries = []
    m_la = params.m * params.l_a
    n_lb = params.n * params.l_b
    for g in range(1, params.n_workers + 1):
        x = plan.worker_points[g]
        # The annihilator and per-pole inverses are shared across i (resp. j)
        # for a fixed group, so evaluate group-by-group.
        a_rows = [[0] * params.r for _ in range(m_la)]
        b_rows = [[0] * params.r for _ in range(n_lb)]
        for k in range(1, params.r + 1):
            omega = omega_eval(grouping, plan, k, x)
            inv_by_pair = {
                pair: (x - plan.poles[pair]).inv() for pair in grouping.groups[k - 1]
            }
            rat_a = {}
            rat_b = {}
            for pair in grouping.groups[k - 1]:
                left, right = pair
                rat_a[left] = rat_a.get(left, x.modulus.zero()) + inv_by_pair[pair]
                rat_b[right] = rat_b.get(right, x.modulus.zero()) + inv_by_pair[pair]
            zero = x.modulus.zero()
            for i in range(1, m_la + 1):
                val = omega * (rat_a.get(i, zero) + noise.a_poly_eval(i, k, x))
                a_rows[i - 1][k - 1] = val.value
            for j in range(1, n_lb + 1):
                val = rat_b.get(j, zero) + noise.b_poly_eval(j, k, x)
                b_rows[j - 1][k - 1] = val.value
        queries.append(
            Query(
                worker=g,
                m=params.m,
                n=params.n,
                r=params.r,
                a_evals=tuple(tuple(row) for row in a_rows),
                b_evals=tuple(tuple(row) for row in b_rows),
            )
        )
    return queries
