"""Figure rendering for experiment and bench reports.

Rendering is side-effect only: each function writes PNG files next to the
CSVs and returns the paths.  matplotlib is imported lazily with the Agg
backend so headless runs never touch a display.
"""
from __future__ import annotations

import os


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def render_experiment(report, outdir: str) -> list[str]:
    """Acceptance-rate bar chart with Wilson intervals, one bar per recipe."""
    plt = _pyplot()
    rows = report.summary_rows()
    recipes = [r[0] for r in rows]
    rates = [r[3] for r in rows]
    err_lo = [r[3] - r[4] for r in rows]
    err_hi = [r[5] - r[3] for r in rows]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(recipes)), 3.2),
                           constrained_layout=True)
    xs = range(len(recipes))
    ax.bar(xs, rates, color="#4878b0", width=0.6)
    ax.errorbar(xs, rates, yerr=[err_lo, err_hi], fmt="none",
                ecolor="black", capsize=3)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(recipes, rotation=20, ha="right", fontsize=8)
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("acceptance rate")
    ax.set_title(f"{report.suite} ({len(report.trials)} trials)")
    ax.grid(True, axis="y", alpha=0.3)
    path = os.path.join(outdir, f"{report.suite}-rates.png")
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return [path]


def _group(rows, protocol: str):
    return [r for r in rows if r.protocol == protocol]


def render_bench(report, outdir: str) -> list[str]:
    """Proof-size and prover-latency panels, one column per protocol."""
    plt = _pyplot()
    paths = []
    for stem, attr, ylabel in (("bench-sizes", "proof_bytes", "proof bytes"),
                               ("bench-latency", "prove_ms",
                                "prove time (ms)")):
        fig, axes = plt.subplots(1, 3, figsize=(11, 3.2),
                                 constrained_layout=True)
        nbdp = _group(report.rows, "nbdp")
        if nbdp:
            sides = [int(r.dims.split("x")[0]) for r in nbdp]
            axes[0].plot(sides, [getattr(r, attr) for r in nbdp], marker="o")
            axes[0].set_xscale("log", base=2)
            axes[0].set_xlabel("block side d (d x d)")
        axes[0].set_title("norm proof")
        mrdp = _group(report.rows, "mrdp")
        if mrdp:
            by_d: dict[int, list] = {}
            for r in mrdp:
                by_d.setdefault(int(r.dims.split("x")[0]), []).append(r)
            for d in sorted(by_d):
                group = sorted(by_d[d], key=lambda r: int(r.class_params[2:]))
                axes[1].plot([int(r.class_params[2:]) for r in group],
                             [getattr(r, attr) for r in group],
                             marker="o", label=f"d={d}")
            axes[1].set_xlabel("rank bound r")
            axes[1].legend(fontsize=8)
        axes[1].set_title("rank proof")
        sdip = _group(report.rows, "sdip-a")
        if sdip:
            by_k: dict[int, list] = {}
            for r in sdip:
                parts = dict(p.split("=") for p in r.class_params.split())
                by_k.setdefault(int(parts["k"]), []).append(
                    (int(parts["t"]), getattr(r, attr)))
            for k in sorted(by_k):
                pts = sorted(by_k[k])
                axes[2].plot([p[0] for p in pts], [p[1] for p in pts],
                             marker="o", label=f"k={k}")
            axes[2].set_xlabel("challenge count t")
            axes[2].legend(fontsize=8)
        axes[2].set_title("sparsity proof (public support)")
        for ax in axes:
            ax.set_ylabel(ylabel)
            ax.grid(True, alpha=0.3)
            ax.set_ylim(bottom=0)
        path = os.path.join(outdir, f"{stem}.png")
        fig.savefig(path, dpi=150)
        plt.close(fig)
        paths.append(path)
    return paths
