"""Summary figures for a sweep, written next to the JSON output."""

from __future__ import annotations

import os
from collections import Counter

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams.update({"font.size": 9, "axes.spines.top": False, "axes.spines.right": False, "figure.dpi": 120})


def _reports(records):
    for rec in records:
        if "report" in rec:
            yield rec["report"]
        if "minuscule_report" in rec:
            yield rec["minuscule_report"]


def delta_histogram(records, path: str) -> None:
    plus, minus = Counter(), Counter()
    for rep in _reports(records):
        d = rep["invariants"]["delta"]
        (plus if d % 2 == 0 else minus)[d] += 1
    fig, ax = plt.subplots(figsize=(4.5, 3))
    keys = sorted(set(plus) | set(minus))
    ax.bar(keys, [plus[k] for k in keys], color="tab:blue", label="even")
    ax.bar(keys, [minus[k] for k in keys], color="tab:orange", label="odd")
    ax.set_xlabel(r"$\delta$")
    ax.set_ylabel("reports")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def derivative_vs_closed(records, path: str) -> None:
    xs, ys = [], []
    for rep in _reports(records):
        if rep.get("minuscule_closed") is not None and rep["invariants"]["delta"] % 2:
            xs.append(rep["minuscule_closed"])
            ys.append(rep["afl_lhs"])
    fig, ax = plt.subplots(figsize=(3.5, 3.5))
    if xs:
        pts = Counter(zip(xs, ys))
        ax.scatter([a for a, _ in pts], [b for _, b in pts], s=[12 + 4 * c for c in pts.values()], alpha=0.7)
        hi = max(xs + ys) + 1
        ax.plot([0, hi], [0, hi], lw=0.8, color="grey")
    ax.set_xlabel("closed value")
    ax.set_ylabel(r"$\mathfrak{D}$ from lattice counts")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def check_tallies(summary, path: str) -> None:
    names = sorted(summary.tallies)
    fig, ax = plt.subplots(figsize=(6, 0.35 * max(len(names), 2) + 1))
    y = range(len(names))
    passed = [summary.tallies[k]["pass"] for k in names]
    failed = [summary.tallies[k]["fail"] for k in names]
    found = [summary.tallies[k]["finding"] for k in names]
    ax.barh(y, passed, color="tab:green", label="pass")
    ax.barh(y, failed, left=passed, color="tab:red", label="fail")
    ax.barh(y, found, left=[a + b for a, b in zip(passed, failed)], color="tab:purple", label="finding")
    ax.set_yticks(list(y))
    ax.set_yticklabels(names)
    ax.set_xlabel("pairs")
    ax.legend(frameon=False, fontsize=7, loc="upper left", bbox_to_anchor=(1.0, 1.0))
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def render_all(records, summary, outdir: str) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name, fn, arg in (
        ("delta_histogram.png", delta_histogram, records),
        ("derivative_vs_closed.png", derivative_vs_closed, records),
        ("check_tallies.png", check_tallies, summary),
    ):
        path = os.path.join(outdir, name)
        fn(arg, path)
        paths.append(path)
    return paths
