"""Problem instances: libraries' shape parameters, the desired product set,
its re-indexed expansion, and the partition into groups.

Index conventions are 1-based at the protocol level (library indices, block
positions, expanded indices) and only drop to 0-based inside array code.
A desired pair (i, j) with partition counts (m, n) expands to the m*n pairs
(m(i-1)+a, n(j-1)+b); the canonical order of the expansion is lexicographic
by (rank of (i,j) in the sorted desired set, a, b), and that order fixes the
decoder's coefficient layout.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .costmodel import fpgmm_metrics
from .field import FieldModulus

Pair = tuple[int, int]

GROUPING_POLICIES = ("round_robin", "random")


class InvalidParameters(ValueError):
    """A named scheme constraint failed validation."""

    def __init__(self, constraint: str, message: str):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


@dataclass(frozen=True)
class SchemeParams:
    """All scalar parameters of one protocol instance."""

    alpha: int
    l_a: int
    l_b: int
    m: int
    n: int
    r: int
    t: int
    n_workers: int
    modulus: FieldModulus


@dataclass(frozen=True)
class DesiredSet:
    """Non-empty set of requested (i, j) library pairs, canonically sorted."""

    pairs: tuple[Pair, ...]

    @classmethod
    def of(cls, pairs) -> "DesiredSet":
        uniq = sorted({(int(i), int(j)) for i, j in pairs})
        return cls(tuple(uniq))

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class ExpandedSet:
    """Re-indexed sub-product set with the back-map to source blocks.

    back_map[(i', j')] = ((i, j), (a, b)): which desired product the pair
    came from and where its block sits in the m x n result grid.
    """

    pairs: tuple[Pair, ...]
    back_map: dict[Pair, tuple[Pair, Pair]] = field(compare=False)

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class Grouping:
    """Partition of the expanded set into r groups of equal size delta."""

    groups: tuple[tuple[Pair, ...], ...]
    delta: int

    def group_index(self, pair: Pair) -> int:
        """1-based index of the group containing `pair`."""
        for k, grp in enumerate(self.groups, start=1):
            if pair in grp:
                return k
        raise KeyError(f"{pair} is not in any group")

    def left_slice(self, k: int, i: int) -> tuple[Pair, ...]:
        """Members of group k whose left index is i."""
        return tuple(p for p in self.groups[k - 1] if p[0] == i)

    def right_slice(self, k: int, j: int) -> tuple[Pair, ...]:
        """Members of group k whose right index is j."""
        return tuple(p for p in self.groups[k - 1] if p[1] == j)


@dataclass(frozen=True)
class ProblemInstance:
    params: SchemeParams
    desired: DesiredSet
    expanded: ExpandedSet
    grouping: Grouping


def validate(params: SchemeParams, desired: DesiredSet, *, check_worker_count: bool = True) -> None:
    """Check every scheme constraint; raise InvalidParameters naming the first violation.

    `check_worker_count=False` skips the N >= R bound: query encoding and the
    privacy verifier are well-defined for under-provisioned worker pools,
    only reconstruction is not.
    """
    for name in ("alpha", "l_a", "l_b", "m", "n", "r", "t", "n_workers"):
        value = getattr(params, name)
        if not isinstance(value, int) or value < 1:
            raise InvalidParameters("positive_params", f"{name} must be a positive integer, got {value!r}")
    if params.alpha % params.m != 0:
        raise InvalidParameters("m_divides_alpha", f"m={params.m} does not divide alpha={params.alpha}")
    if params.alpha % params.n != 0:
        raise InvalidParameters("n_divides_alpha", f"n={params.n} does not divide alpha={params.alpha}")
    if (params.m * params.n) % params.r != 0:
        raise InvalidParameters("r_divides_mn", f"r={params.r} does not divide m*n={params.m * params.n}")
    if len(desired.pairs) == 0:
        raise InvalidParameters("empty_desired_set", "the desired set must be non-empty")
    for (i, j) in desired.pairs:
        if not (1 <= i <= params.l_a and 1 <= j <= params.l_b):
            raise InvalidParameters(
                "desired_index_range",
                f"pair ({i},{j}) outside [1,{params.l_a}] x [1,{params.l_b}]",
            )
    smn = len(desired.pairs) * params.m * params.n
    if params.modulus.q < smn + params.n_workers:
        raise InvalidParameters(
            "field_size",
            f"q={params.modulus.q} < |S|*m*n + N = {smn + params.n_workers}",
        )
    if check_worker_count:
        cost = fpgmm_metrics(params.m, params.n, params.r, params.t, len(desired.pairs))
        if params.n_workers < cost.recovery_threshold:
            raise InvalidParameters(
                "worker_count",
                f"N={params.n_workers} < recovery threshold R={cost.recovery_threshold}",
            )


def expand(desired: DesiredSet, m: int, n: int) -> ExpandedSet:
    """All m*n block pairs of each desired product, in canonical order."""
    pairs: list[Pair] = []
    back: dict[Pair, tuple[Pair, Pair]] = {}
    for (i, j) in desired.pairs:
        for a in range(1, m + 1):
            for b in range(1, n + 1):
                p = (m * (i - 1) + a, n * (j - 1) + b)
                pairs.append(p)
                back[p] = ((i, j), (a, b))
    return ExpandedSet(pairs=tuple(pairs), back_map=back)


def group(
    expanded: ExpandedSet,
    r: int,
    policy: str = "round_robin",
    rng: random.Random | None = None,
) -> Grouping:
    """Partition the expanded set into r groups of size |expanded|/r.

    round_robin (default): element t of the canonical order joins group
    t mod r, which is reproducible without a seed. random: a seeded shuffle
    followed by contiguous chunks, for testing grouping-independence.
    """
    total = len(expanded.pairs)
    if total % r != 0:
        raise ValueError(f"r={r} does not divide |expanded set|={total}")
    delta = total // r
    if policy == "round_robin":
        buckets = [[] for _ in range(r)]
        for t, p in enumerate(expanded.pairs):
            buckets[t % r].append(p)
    elif policy == "random":
        if rng is None:
            raise ValueError("random grouping policy needs an rng")
        order = list(expanded.pairs)
        rng.shuffle(order)
        buckets = [order[k * delta:(k + 1) * delta] for k in range(r)]
    else:
        raise ValueError(f"unknown grouping policy {policy!r}; expected one of {GROUPING_POLICIES}")
    return Grouping(groups=tuple(tuple(b) for b in buckets), delta=delta)


def build_instance(
    params: SchemeParams,
    desired: DesiredSet,
    grouping_policy: str = "round_robin",
    grouping_rng: random.Random | None = None,
    *,
    check_worker_count: bool = True,
) -> ProblemInstance:
    validate(params, desired, check_worker_count=check_worker_count)
    expanded = expand(desired, params.m, params.n)
    grouping = group(expanded, params.r, grouping_policy, grouping_rng)
    return ProblemInstance(params=params, desired=desired, expanded=expanded, grouping=grouping)


INSTANCE_CONFIG_KEYS = {
    "q": int,
    "alpha": int,
    "L_A": int,
    "L_B": int,
    "m": int,
    "n": int,
    "r": int,
    "T": int,
    "N": int,
    "S": list,
    "seed": int,
    "grouping_policy": str,
}
_OPTIONAL_INSTANCE_KEYS = {"seed", "grouping_policy"}


def params_from_config(cfg: dict) -> tuple[SchemeParams, DesiredSet, int, str]:
    """Parse the instance config mapping; returns (params, desired, seed, policy).

    Rejects unknown keys. Constraint checking is left to validate() so the
    caller controls which bounds apply.
    """
    unknown = set(cfg) - set(INSTANCE_CONFIG_KEYS)
    if unknown:
        raise InvalidParameters("unknown_config_key", f"unknown instance config keys: {sorted(unknown)}")
    missing = set(INSTANCE_CONFIG_KEYS) - _OPTIONAL_INSTANCE_KEYS - set(cfg)
    if missing:
        raise InvalidParameters("missing_config_key", f"missing instance config keys: {sorted(missing)}")
    for key, expected in INSTANCE_CONFIG_KEYS.items():
        if key in cfg and not isinstance(cfg[key], expected):
            raise InvalidParameters("config_type", f"{key} must be {expected.__name__}")
    try:
        modulus = FieldModulus(cfg["q"])
    except ValueError as exc:
        raise InvalidParameters("prime_modulus", str(exc)) from exc
    policy = cfg.get("grouping_policy", "round_robin")
    if policy not in GROUPING_POLICIES:
        raise InvalidParameters(
            "grouping_policy", f"{policy!r} is not one of {GROUPING_POLICIES}"
        )
    pairs = []
    for entry in cfg["S"]:
        if not (isinstance(entry, list) and len(entry) == 2):
            raise InvalidParameters("desired_set_shape", f"S entries must be [i, j], got {entry!r}")
        pairs.append((entry[0], entry[1]))
    if len(set(pairs)) != len(pairs):
        raise InvalidParameters("duplicate_pairs", "S contains duplicate pairs")
    params = SchemeParams(
        alpha=cfg["alpha"],
        l_a=cfg["L_A"],
        l_b=cfg["L_B"],
        m=cfg["m"],
        n=cfg["n"],
        r=cfg["r"],
        t=cfg["T"],
        n_workers=cfg["N"],
        modulus=modulus,
    )
    return params, DesiredSet.of(pairs), cfg.get("seed", 0), policy
