"""Full protocol runs with straggler injection and realized-cost measurement.

A run walks the three phases (encode queries, compute worker responses,
reconstruct), drops straggling workers before reconstruction, and reports
the realized recovery threshold, download cost, and computation cost next
to their closed-form values. At desk scale every run is audited against
direct matrix multiplication unless explicitly disabled for timing.
"""

from __future__ import annotations

import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .blockmatrix import BlockMatrix, matmul
from .costmodel import fpgmm_metrics
from .decoder import (
    InsufficientResponses,
    RationalBasisSpec,
    assemble,
    solve_and_extract,
)
from .encoder import NoiseTensor, assign_points, build_queries
from .field import FieldModulus, spawn_rng
from .instance import (
    DesiredSet,
    InvalidParameters,
    ProblemInstance,
    SchemeParams,
    build_instance,
    params_from_config,
)
from .worker import respond


@dataclass(frozen=True)
class StragglerModel:
    """Which workers fail to respond.

    mode "none": everyone answers. "fixed": exactly `count` workers drop,
    chosen by the run's straggler stream. "probability": each worker drops
    independently with probability p.
    """

    mode: str = "none"
    count: int = 0
    p: float = 0.0

    def __post_init__(self):
        if self.mode not in ("none", "fixed", "probability"):
            raise ValueError(f"unknown straggler mode {self.mode!r}")
        if self.mode == "fixed" and self.count < 0:
            raise ValueError("straggler count must be >= 0")
        if self.mode == "probability" and not 0.0 <= self.p <= 1.0:
            raise ValueError("straggler probability must be in [0, 1]")

    def pick_stragglers(self, n_workers: int, rng: random.Random) -> set[int]:
        if self.mode == "none":
            return set()
        if self.mode == "fixed":
            if self.count > n_workers:
                raise ValueError(f"cannot drop {self.count} of {n_workers} workers")
            return set(rng.sample(range(1, n_workers + 1), self.count))
        return {g for g in range(1, n_workers + 1) if rng.random() < self.p}


@dataclass
class RunReport:
    """Outcome and measurements of one protocol run."""

    success: bool
    failure_reason: str | None
    responders: tuple[int, ...]
    used: tuple[int, ...]
    theory_recovery_threshold: int
    theory_ndc: Fraction
    theory_ncc: Fraction
    realized_ndc: Fraction | None
    realized_ncc: Fraction | None
    audit_passed: bool | None
    seed: int
    m: int
    n: int
    r: int
    t: int
    s_size: int
    alpha: int
    n_workers: int
    q: int
    timings: dict[str, float] = field(default_factory=dict)

    def to_json_dict(self, include_timings: bool = False) -> dict:
        obj = {
            "success": self.success,
            "failure_reason": self.failure_reason,
            "responders": list(self.responders),
            "used": list(self.used),
            "R": self.theory_recovery_threshold,
            "theory_ndc": str(self.theory_ndc),
            "theory_ncc": str(self.theory_ncc),
            "ndc": None if self.realized_ndc is None else float(self.realized_ndc),
            "ncc": None if self.realized_ncc is None else float(self.realized_ncc),
            "ndc_exact": None if self.realized_ndc is None else str(self.realized_ndc),
            "ncc_exact": None if self.realized_ncc is None else str(self.realized_ncc),
            "audit_passed": self.audit_passed,
            "seed": self.seed,
            "m": self.m,
            "n": self.n,
            "r": self.r,
            "T": self.t,
            "S_size": self.s_size,
            "alpha": self.alpha,
            "N": self.n_workers,
            "q": self.q,
        }
        if include_timings:
            obj["timings"] = dict(self.timings)
        return obj

    def csv_row(self) -> str:
        ndc = "" if self.realized_ndc is None else f"{float(self.realized_ndc):.10g}"
        ncc = "" if self.realized_ncc is None else f"{float(self.realized_ncc):.10g}"
        return (
            f"{self.m},{self.n},{self.r},{self.t},{self.s_size},{self.n_workers},{self.q},"
            f"{self.theory_recovery_threshold},{ndc},{ncc},"
            f"{'true' if self.success else 'false'},{self.seed}"
        )


RUN_CSV_HEADER = "m,n,r,T,S_size,N,q,R,ndc,ncc,success,seed"


def generate_libraries(instance: ProblemInstance, rng: random.Random):
    """Uniform alpha x alpha library matrices, A side first."""
    p = instance.params
    lib_a = [BlockMatrix.random(p.alpha, p.alpha, p.modulus, rng) for _ in range(p.l_a)]
    lib_b = [BlockMatrix.random(p.alpha, p.alpha, p.modulus, rng) for _ in range(p.l_b)]
    return lib_a, lib_b


def run(
    instance: ProblemInstance,
    seed: int,
    straggler: StragglerModel | None = None,
    audit: bool = True,
    threads: int = 1,
) -> RunReport:
    """Execute encode -> query/compute -> reconstruct, minus stragglers.

    Failure (too few responders, or an audit mismatch) is a reported
    outcome, not an exception.
    """
    p = instance.params
    straggler = straggler or StragglerModel()
    cost = fpgmm_metrics(p.m, p.n, p.r, p.t, len(instance.desired.pairs))
    timings: dict[str, float] = {}

    lib_a, lib_b = generate_libraries(instance, spawn_rng(seed, "libraries"))

    t0 = time.perf_counter()
    plan = assign_points(p, instance.expanded, spawn_rng(seed, "plan"))
    noise = NoiseTensor.sample(p, spawn_rng(seed, "noise"))
    queries = build_queries(p, instance.grouping, plan, noise)
    timings["encode"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    stragglers = straggler.pick_stragglers(p.n_workers, spawn_rng(seed, "stragglers"))
    live = [qr for qr in queries if qr.worker not in stragglers]
    if threads > 1 and len(live) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outputs = list(pool.map(lambda qr: respond(lib_a, lib_b, qr), live))
    else:
        outputs = [respond(lib_a, lib_b, qr) for qr in live]
    timings["compute"] = time.perf_counter() - t0

    responders = tuple(o.worker for o in outputs)
    base = dict(
        responders=responders,
        theory_recovery_threshold=cost.recovery_threshold,
        theory_ndc=cost.ndc,
        theory_ncc=cost.ncc,
        seed=seed,
        m=p.m,
        n=p.n,
        r=p.r,
        t=p.t,
        s_size=len(instance.desired.pairs),
        alpha=p.alpha,
        n_workers=p.n_workers,
        q=p.modulus.q,
        timings=timings,
    )
    smn = len(instance.desired.pairs) * p.m * p.n
    realized_ncc = (
        Fraction(max(o.mul_count for o in outputs), len(instance.desired.pairs) * p.alpha**3)
        if outputs
        else None
    )

    t0 = time.perf_counter()
    spec = RationalBasisSpec.for_instance(instance.expanded, instance.grouping, p.t, plan)
    try:
        recovered = solve_and_extract(outputs, spec, plan, instance.grouping)
    except InsufficientResponses as exc:
        timings["decode"] = time.perf_counter() - t0
        return RunReport(
            success=False,
            failure_reason=f"insufficient_responses: {exc}",
            used=(),
            realized_ndc=None,
            realized_ncc=realized_ncc,
            audit_passed=None,
            **base,
        )
    products = assemble(recovered, instance.expanded)
    timings["decode"] = time.perf_counter() - t0

    used = tuple(sorted(responders)[: cost.recovery_threshold])
    # (len(used) * alpha^2/(mn)) symbols downloaded over |S| * alpha^2 wanted;
    # the alpha^2 factors cancel exactly.
    realized_ndc = Fraction(len(used), smn)

    audit_passed: bool | None = None
    if audit:
        t0 = time.perf_counter()
        audit_passed = all(
            products[(i, j)] == matmul(lib_a[i - 1], lib_b[j - 1])
            for (i, j) in instance.desired.pairs
        )
        timings["audit"] = time.perf_counter() - t0

    success = audit_passed is not False
    return RunReport(
        success=success,
        failure_reason=None if success else "audit_mismatch",
        used=used,
        realized_ndc=realized_ndc,
        realized_ncc=realized_ncc,
        audit_passed=audit_passed,
        **base,
    )


def run_from_config(cfg: dict, straggler: StragglerModel | None = None,
                    audit: bool = True, threads: int = 1, seed: int | None = None) -> RunReport:
    """Build the instance from a config mapping and run it."""
    params, desired, cfg_seed, policy = params_from_config(cfg)
    use_seed = cfg_seed if seed is None else seed
    rng = spawn_rng(use_seed, "grouping") if policy == "random" else None
    instance = build_instance(params, desired, policy, rng)
    return run(instance, use_seed, straggler=straggler, audit=audit, threads=threads)


def canonical_desired_set(l_a: int, l_b: int, s_size: int) -> DesiredSet:
    """First s_size pairs of [1..L_A] x [1..L_B] in lexicographic order."""
    if s_size > l_a * l_b:
        raise ValueError(f"s_size={s_size} exceeds L_A*L_B={l_a * l_b}")
    pairs = [(i, j) for i in range(1, l_a + 1) for j in range(1, l_b + 1)]
    return DesiredSet.of(pairs[:s_size])


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def sweep(cfg: dict, threads: int = 1, seed: int | None = None) -> list[dict]:
    """One run per grid point per trial; invalid points are collected, not fatal.

    Returns items {"point": {...}, "report": RunReport|None, "error": str|None}.
    Each point derives its own seed from the sweep seed and coordinates, so
    repeating the sweep reproduces every run bit-for-bit.
    """
    base_seed = cfg.get("seed", 0) if seed is None else seed
    straggler = StragglerModel(**cfg["straggler"]) if "straggler" in cfg else None
    audit = cfg.get("audit", True)
    trials = cfg.get("trials", 1)
    n_extra = cfg.get("n_extra", 0)
    grid = cfg["grid"]
    alphas = grid.get("alpha", [cfg.get("alpha")])
    modulus = FieldModulus(cfg["q"])

    items: list[dict] = []
    for m in grid["m"]:
        for n in grid["n"]:
            r_values = _divisors(m * n) if grid.get("r", "divisors") == "divisors" else grid["r"]
            for r in r_values:
                for t in grid["T"]:
                    for s_size in grid["s_size"]:
                        for alpha in alphas:
                            for trial in range(trials):
                                point = {
                                    "m": m, "n": n, "r": r, "T": t,
                                    "s_size": s_size, "alpha": alpha, "trial": trial,
                                }
                                label = f"{base_seed}:sweep:{m},{n},{r},{t},{s_size},{alpha},{trial}"
                                point_seed = random.Random(label).getrandbits(63)
                                try:
                                    desired = canonical_desired_set(cfg["L_A"], cfg["L_B"], s_size)
                                    cost = fpgmm_metrics(m, n, r, t, s_size)
                                    params = SchemeParams(
                                        alpha=alpha,
                                        l_a=cfg["L_A"],
                                        l_b=cfg["L_B"],
                                        m=m,
                                        n=n,
                                        r=r,
                                        t=t,
                                        n_workers=cost.recovery_threshold + n_extra,
                                        modulus=modulus,
                                    )
                                    instance = build_instance(params, desired)
                                    report = run(
                                        instance, point_seed, straggler=straggler,
                                        audit=audit, threads=threads,
                                    )
                                    items.append({"point": point, "report": report, "error": None})
                                except (InvalidParameters, ValueError) as exc:
                                    items.append({"point": point, "report": None, "error": str(exc)})
    return items


def write_jsonl(items: list[dict], path: str, include_timings: bool = False) -> None:
    import json

    with open(path, "w") as fh:
        for item in items:
            if item["report"] is not None:
                obj = item["report"].to_json_dict(include_timings=include_timings)
            else:
                obj = {"error": item["error"], "point": item["point"]}
            fh.write(json.dumps(obj, sort_keys=True) + "\n")


def reports_to_csv(items: list[dict]) -> str:
    lines = [RUN_CSV_HEADER]
    lines += [item["report"].csv_row() for item in items if item["report"] is not None]
    return "\n".join(lines) + "\n"
