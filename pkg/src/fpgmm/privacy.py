"""Executable privacy verification by exhaustive enumeration at tiny field size.

The claim under test: the joint distribution of everything a colluding set
of at most T workers receives (all encoding-function evaluations, given the
public partition parameters) is independent of the requested product set.
At enumeration scale this is checked in its strongest form: for any fixed
pole/point plan, enumerating every noise assignment must give an exactly
uniform histogram over the visible value tuples, and two different requests
with the same (m, n, r) must give bin-for-bin identical histograms.

Every evaluation is affine in the noise coefficients, so the enumeration
precomputes the noise-free part and the per-coefficient multipliers once
and walks the q^|Z| assignments with plain integer arithmetic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .encoder import EvaluationPlan, assign_points, omega_eval
from .field import spawn_rng
from .instance import (
    DesiredSet,
    ProblemInstance,
    SchemeParams,
    build_instance,
)

DEFAULT_BUDGET = 10_000_000


class EnumerationBudgetExceeded(Exception):
    """The exact enumeration would need more noise assignments than allowed."""

    def __init__(self, needed: int, budget: int):
        super().__init__(
            f"exhaustive enumeration needs {needed} noise assignments, budget is {budget}"
        )
        self.needed = needed
        self.budget = budget


@dataclass
class QueryDistribution:
    """Exact histogram of the colluders' visible evaluation tuples."""

    colluders: tuple[int, ...]
    q: int
    z_dim: int
    visible_len: int
    histogram: dict[tuple[int, ...], int]

    def total(self) -> int:
        return sum(self.histogram.values())

    def is_uniform(self) -> bool:
        """Exactly uniform over GF(q)^visible_len."""
        expected_bins = self.q ** self.visible_len
        if len(self.histogram) != expected_bins:
            return False
        expected_count = self.q ** (self.z_dim - self.visible_len)
        return all(c == expected_count for c in self.histogram.values())


@dataclass
class PrivacyVerdict:
    passed: bool
    bins: tuple[int, int]
    z_dims: int
    q: int
    colluders: tuple[int, ...]
    s1: tuple
    s2: tuple
    first_divergence: dict | None = None

    def to_json_dict(self) -> dict:
        obj = {
            "pass": self.passed,
            "bins": list(self.bins),
            "z_dims": self.z_dims,
            "q": self.q,
            "colluders": list(self.colluders),
            "s1": [list(p) for p in self.s1],
            "s2": [list(p) for p in self.s2],
        }
        if self.first_divergence is not None:
            obj["first_divergence"] = self.first_divergence
        return obj


def _affine_views(instance: ProblemInstance, plan: EvaluationPlan, colluders):
    """Per visible slot: (constant, coefficient row, noise-variable indices).

    Slot order matches the query layout per colluder: a-evaluations in
    (i, k) row-major order, then b-evaluations in (j, k) row-major order.
    Noise variables are numbered in canonical (i, k, t) order, a side first.
    """
    params = instance.params
    q = params.modulus.q
    m_la = params.m * params.l_a
    n_lb = params.n * params.l_b
    t = params.t
    a_vars = m_la * params.r * t

    views = []
    for g in sorted(colluders):
        x = plan.worker_points[g]
        x_pows = [pow(x.value, e, q) for e in range(t)]
        omega = {k: omega_eval(instance.grouping, plan, k, x) for k in range(1, params.r + 1)}
        inv_cache = {
            pair: (x - plan.poles[pair]).inv().value
            for grp in instance.grouping.groups
            for pair in grp
        }
        for i in range(1, m_la + 1):
            for k in range(1, params.r + 1):
                rat = sum(inv_cache[p] for p in instance.grouping.left_slice(k, i)) % q
                w = omega[k].value
                const = w * rat % q
                coeffs = [w * xp % q for xp in x_pows]
                idx = [((i - 1) * params.r + (k - 1)) * t + tt for tt in range(t)]
                views.append((const, coeffs, idx))
        for j in range(1, n_lb + 1):
            for k in range(1, params.r + 1):
                const = sum(inv_cache[p] for p in instance.grouping.right_slice(k, j)) % q
                idx = [a_vars + ((j - 1) * params.r + (k - 1)) * t + tt for tt in range(t)]
                views.append((const, list(x_pows), idx))
    return views


def enumerate_distribution(
    instance: ProblemInstance,
    plan: EvaluationPlan,
    colluders,
    budget: int = DEFAULT_BUDGET,
    zero_noise: bool = False,
) -> QueryDistribution:
    """Exact histogram over all q^|Z| noise assignments.

    zero_noise replaces the noise polynomials with zero (the deliberately
    broken encoder used as the negative control); the histogram then counts
    the single deterministic tuple q^|Z| times.
    """
    params = instance.params
    q = params.modulus.q
    z_dim = params.t * params.r * (params.m * params.l_a + params.n * params.l_b)
    needed = q ** z_dim
    if needed > budget:
        raise EnumerationBudgetExceeded(needed, budget)
    colluders = tuple(sorted(int(g) for g in colluders))
    for g in colluders:
        if g not in plan.worker_points:
            raise ValueError(f"colluder {g} has no evaluation point in the plan")

    views = _affine_views(instance, plan, colluders)
    histogram: dict[tuple[int, ...], int] = {}
    if zero_noise:
        key = tuple(const for const, _, _ in views)
        histogram[key] = needed
    else:
        for assignment in itertools.product(range(q), repeat=z_dim):
            key = tuple(
                (const + sum(c * assignment[ix] for c, ix in zip(coeffs, idx))) % q
                for const, coeffs, idx in views
            )
            histogram[key] = histogram.get(key, 0) + 1
    return QueryDistribution(
        colluders=colluders,
        q=q,
        z_dim=z_dim,
        visible_len=len(views),
        histogram=histogram,
    )


def privacy_check(
    params: SchemeParams,
    s1: DesiredSet,
    s2: DesiredSet,
    colluders,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    zero_noise: bool = False,
) -> PrivacyVerdict:
    """Compare the colluders' exact query distributions under two requests.

    PASS iff the histograms agree bin-for-bin. The worker-count bound N >= R
    is deliberately not enforced here: privacy of the queries does not
    require the pool to be large enough to decode. The plan for each request
    is drawn from the same seed (fixed-plan convention; per-plan uniformity
    is the stronger statement and implies the marginalised one).
    """
    histograms = []
    dists = []
    for tag, desired in (("s1", s1), ("s2", s2)):
        inst = build_instance(params, desired, check_worker_count=False)
        plan = assign_points(params, inst.expanded, spawn_rng(seed, f"privacy-plan-{tag}"))
        dist = enumerate_distribution(inst, plan, colluders, budget=budget, zero_noise=zero_noise)
        histograms.append(dist.histogram)
        dists.append(dist)

    h1, h2 = histograms
    divergence = None
    if h1 != h2:
        for key in sorted(set(h1) | set(h2)):
            c1, c2 = h1.get(key, 0), h2.get(key, 0)
            if c1 != c2:
                divergence = {"key": list(key), "count_s1": c1, "count_s2": c2}
                break
    return PrivacyVerdict(
        passed=divergence is None,
        bins=(len(h1), len(h2)),
        z_dims=dists[0].z_dim,
        q=params.modulus.q,
        colluders=dists[0].colluders,
        s1=s1.pairs,
        s2=s2.pairs,
        first_divergence=divergence,
    )
