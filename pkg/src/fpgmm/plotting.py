"""Figure rendering for the report paths.

The CSV/JSON files stay the machine-readable contract; these renderers put
a quick-look PNG next to them. Headless backend, no interactive state.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_SCHEME_STYLE = {
    "fpgmm": {"color": "tab:blue", "marker": "o"},
    "mrfpmm": {"color": "tab:orange", "marker": "s"},
}


def save_tradeoff_figure(points, path: str) -> None:
    """Minimized download cost vs. computation bound, one curve per
    (scheme, worker cap); infeasible points are left out of their curve."""
    curves: dict[tuple[str, int], list] = {}
    for pt in points:
        curves.setdefault((pt.scheme, pt.worker_cap), []).append(pt)

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    caps = sorted({cap for _, cap in curves})
    for (scheme, cap), pts in sorted(curves.items()):
        pts = sorted(pts, key=lambda p: p.ncc_bound)
        xs = [float(p.ncc_bound) for p in pts if p.feasible]
        ys = [float(p.ndc) for p in pts if p.feasible]
        if not xs:
            continue
        style = _SCHEME_STYLE.get(scheme, {})
        ls = "-" if len(caps) < 2 or cap == caps[0] else "--"
        ax.plot(xs, ys, linestyle=ls, label=f"{scheme}, cap {cap}", **style)
    ax.set_xscale("log")
    ax.set_xlabel("computation bound (NCC)")
    ax.set_ylabel("minimized download cost (NDC)")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_sweep_figure(items, path: str) -> None:
    """Realized (NCC, NDC) of every successful run; failures marked on the side."""
    ok = [it["report"] for it in items if it["report"] is not None and it["report"].success]
    bad = [it for it in items if it["report"] is None or not it["report"].success]

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    if ok:
        xs = [float(rep.realized_ncc) for rep in ok]
        ys = [float(rep.realized_ndc) for rep in ok]
        sizes = [20 + 8 * rep.r for rep in ok]
        ax.scatter(xs, ys, s=sizes, c="tab:blue", alpha=0.6, label=f"success ({len(ok)})")
    ax.set_xlabel("realized NCC")
    ax.set_ylabel("realized NDC")
    title = "protocol sweep"
    if bad:
        title += f" ({len(bad)} failed/invalid points omitted)"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    if ok:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
