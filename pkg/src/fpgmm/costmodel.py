"""Closed-form cost metrics and the NCC-bounded NDC minimisation sweep.

Two schemes are modelled: the grouped single-round scheme built by this
package (recovery threshold R = ((r+1)/r)|S|mn + 2T - 1) and a multi-round
baseline that computes one product per round and serves purely as a cost
comparator. All reported ratios are exact rationals; the optimizer compares
fractions by integer cross-multiplication, never through floats.

The multi-round baseline leaks the number of requested products; results
carry that caveat as an annotation so downstream reports can surface it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

MRFPMM_PRIVACY_CAVEAT = "multi-round baseline does not hide the request cardinality"


@dataclass(frozen=True)
class FpgmmCost:
    """Metrics of the grouped scheme at parameters (m, n, r, T, |S|)."""

    m: int
    n: int
    r: int
    t: int
    s_size: int
    recovery_threshold: int
    ndc: Fraction
    ncc: Fraction


@dataclass(frozen=True)
class MrFpmmCost:
    """Metrics of the multi-round baseline at parameters (m, n, p, T, |S|)."""

    m: int
    n: int
    p: int
    t: int
    s_size: int
    recovery_threshold: int
    ndc: Fraction
    ncc: Fraction
    caveat: str = MRFPMM_PRIVACY_CAVEAT


def fpgmm_metrics(m: int, n: int, r: int, t: int, s_size: int) -> FpgmmCost:
    """R = ((r+1)/r)|S|mn + 2T - 1, D = R/(|S|mn), C = r/(|S|mn).

    Requires r | mn so that the group size |S|mn/r is an integer.
    """
    _require_positive(m=m, n=n, r=r, t=t, s_size=s_size)
    if (m * n) % r != 0:
        raise ValueError(f"r={r} must divide m*n={m * n}")
    smn = s_size * m * n
    recovery = smn + smn // r + 2 * t - 1
    return FpgmmCost(
        m=m,
        n=n,
        r=r,
        t=t,
        s_size=s_size,
        recovery_threshold=recovery,
        ndc=Fraction(recovery, smn),
        ncc=Fraction(r, smn),
    )


def mrfpmm_metrics(m: int, n: int, p: int, t: int, s_size: int) -> MrFpmmCost:
    """Baseline threshold is the best of three partition layouts.

    R~ = min((m+1)(np+T)-1, (n+1)(mp+T)-1, 2mnp+2T-1); one product per
    round, so the |S| rounds cancel in both normalised metrics:
    D~ = R~/(mn), C~ = 1/(mnp).
    """
    _require_positive(m=m, n=n, p=p, t=t, s_size=s_size)
    recovery = min(
        (m + 1) * (n * p + t) - 1,
        (n + 1) * (m * p + t) - 1,
        2 * m * n * p + 2 * t - 1,
    )
    return MrFpmmCost(
        m=m,
        n=n,
        p=p,
        t=t,
        s_size=s_size,
        recovery_threshold=recovery,
        ndc=Fraction(recovery, m * n),
        ncc=Fraction(1, m * n * p),
    )


def _require_positive(**kwargs):
    for name, value in kwargs.items():
        if not isinstance(value, int) or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class SearchLimits:
    """Exhaustive-search box for the trade-off optimizer."""

    m_max: int = 64
    n_max: int = 64
    p_max: int = 64


@dataclass(frozen=True)
class TradeoffPoint:
    """Result of one NDC minimisation under an NCC bound and a worker cap.

    `params` is (m, n, r) for scheme "fpgmm" and (m, n, p) for "mrfpmm";
    None when infeasible.
    """

    scheme: str
    ncc_bound: Fraction
    worker_cap: int
    t: int
    s_size: int
    feasible: bool
    params: tuple[int, int, int] | None
    recovery_threshold: int | None
    ndc: Fraction | None
    ncc: Fraction | None
    annotations: tuple[str, ...] = field(default=())


def _divisors(n: int) -> list[int]:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def _fpgmm_candidates(t: int, s_size: int, limits: SearchLimits):
    """Yield (R, mn, r, (m, n, r)) over the search box, lexicographic."""
    for m in range(1, limits.m_max + 1):
        for n in range(1, limits.n_max + 1):
            mn = m * n
            smn = s_size * mn
            for r in _divisors(mn):
                recovery = smn + smn // r + 2 * t - 1
                yield recovery, smn, r, (m, n, r)


def _mrfpmm_candidates(t: int, s_size: int, limits: SearchLimits):
    """Yield (R~, mn, mnp, (m, n, p)) over the search box, lexicographic."""
    for m in range(1, limits.m_max + 1):
        for n in range(1, limits.n_max + 1):
            mn = m * n
            for p in range(1, limits.p_max + 1):
                recovery = min(
                    (m + 1) * (n * p + t) - 1,
                    (n + 1) * (m * p + t) - 1,
                    2 * mn * p + 2 * t - 1,
                )
                yield recovery, mn, mn * p, (m, n, p)


def optimize_tradeoff(
    scheme: str,
    ncc_bound: Fraction,
    worker_cap: int,
    t: int,
    s_size: int,
    limits: SearchLimits | None = None,
) -> TradeoffPoint:
    """Exhaustively minimise NDC subject to NCC <= ncc_bound and R <= worker_cap.

    The worker cap is the non-straggler reading: the recovery threshold may
    not exceed the workers available. Ties break toward smaller R, then
    lexicographically smaller parameters (the scan visits tuples in
    lexicographic order and keeps strict improvements only).
    """
    limits = limits or SearchLimits()
    bound = Fraction(ncc_bound)
    if bound <= 0 or worker_cap < 1:
        raise ValueError("ncc_bound and worker_cap must be positive")
    bn, bd = bound.numerator, bound.denominator

    if scheme == "fpgmm":
        candidates = _fpgmm_candidates(t, s_size, limits)
        annotations: tuple[str, ...] = ()
    elif scheme == "mrfpmm":
        candidates = _mrfpmm_candidates(t, s_size, limits)
        annotations = (MRFPMM_PRIVACY_CAVEAT,)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    best = None  # (R, ndc_num=R, ndc_den, ncc_num, ncc_den, params)
    for recovery, ndc_den, ncc_num, params in candidates:
        # NCC = ncc_num / ncc_den', with ncc_den' = smn (fpgmm) or mnp (mrfpmm).
        # fpgmm yields (R, smn, r, ...): ncc = r/smn. mrfpmm yields
        # (R, mn, mnp, ...): ncc = 1/mnp, ndc = R/mn.
        if recovery > worker_cap:
            continue
        if scheme == "fpgmm":
            num, den = ncc_num, ndc_den  # r / smn
        else:
            num, den = 1, ncc_num  # 1 / mnp
        if num * bd > bn * den:  # ncc > bound
            continue
        if best is None or _better(recovery, ndc_den, best):
            best = (recovery, ndc_den, num, den, params)

    if best is None:
        return TradeoffPoint(
            scheme=scheme,
            ncc_bound=bound,
            worker_cap=worker_cap,
            t=t,
            s_size=s_size,
            feasible=False,
            params=None,
            recovery_threshold=None,
            ndc=None,
            ncc=None,
            annotations=annotations,
        )
    recovery, ndc_den, num, den, params = best
    return TradeoffPoint(
        scheme=scheme,
        ncc_bound=bound,
        worker_cap=worker_cap,
        t=t,
        s_size=s_size,
        feasible=True,
        params=params,
        recovery_threshold=recovery,
        ndc=Fraction(recovery, ndc_den),
        ncc=Fraction(num, den),
        annotations=annotations,
    )


def _better(recovery: int, ndc_den: int, best) -> bool:
    """True if R/ndc_den strictly improves on the incumbent (NDC, then R)."""
    best_r, best_den = best[0], best[1]
    lhs = recovery * best_den
    rhs = best_r * ndc_den
    if lhs != rhs:
        return lhs < rhs
    return recovery < best_r


def certify_optimal(point: TradeoffPoint, limits: SearchLimits | None = None) -> bool:
    """Recount: re-scan the search space and confirm nothing beats `point`.

    Returns True when the point's feasibility flag and NDC survive an
    independent pass (plain Fraction comparisons, no shared state with the
    optimizer's integer-arithmetic scan).
    """
    limits = limits or SearchLimits()
    if point.scheme == "fpgmm":
        metrics = (
            fpgmm_metrics(m, n, r, point.t, point.s_size)
            for m in range(1, limits.m_max + 1)
            for n in range(1, limits.n_max + 1)
            for r in _divisors(m * n)
        )
    else:
        metrics = (
            mrfpmm_metrics(m, n, p, point.t, point.s_size)
            for m in range(1, limits.m_max + 1)
            for n in range(1, limits.n_max + 1)
            for p in range(1, limits.p_max + 1)
        )
    found_feasible = False
    best_ndc = None
    for cost in metrics:
        if cost.recovery_threshold > point.worker_cap or cost.ncc > point.ncc_bound:
            continue
        found_feasible = True
        if best_ndc is None or cost.ndc < best_ndc:
            best_ndc = cost.ndc
    if not point.feasible:
        return not found_feasible
    return found_feasible and best_ndc == point.ndc


TRADEOFF_CSV_HEADER = "scheme,ncc_bound,m,n,r_or_p,T,S_size,R,ndc,ncc,worker_cap,feasible"


def tradeoff_csv_rows(points) -> list[str]:
    """Rows for the trade-off CSV, one per point, header excluded."""
    rows = []
    for pt in points:
        if pt.feasible:
            m, n, rp = pt.params
            rows.append(
                f"{pt.scheme},{float(pt.ncc_bound):.10g},{m},{n},{rp},{pt.t},{pt.s_size},"
                f"{pt.recovery_threshold},{float(pt.ndc):.10g},{float(pt.ncc):.10g},"
                f"{pt.worker_cap},true"
            )
        else:
            rows.append(
                f"{pt.scheme},{float(pt.ncc_bound):.10g},,,,{pt.t},{pt.s_size},,,,"
                f"{pt.worker_cap},false"
            )
    return rows
