"""Report files for a query: answer text, trace table and a trace figure."""

from __future__ import annotations

import csv
from pathlib import Path

from .kb import QueryResult, serialize_result

TRACE_FIELDS = ("step", "variable", "with", "without", "produced", "subsumed")


def trace_rows(result: QueryResult) -> list[dict]:
    return [
        {"step": i, "variable": s.variable, "with": s.with_k, "without": s.without_k,
         "produced": s.produced, "subsumed": s.subsumed}
        for i, s in enumerate(result.trace, 1)
    ]


def plot_trace(result: QueryResult, path: Path):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = trace_rows(result)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(rows) + 2), 3.2))
    xs = [r["step"] for r in rows]
    for key, marker in (("with", "o"), ("produced", "s"), ("subsumed", "^")):
        ax.plot(xs, [r[key] for r in rows], marker=marker, lw=1, ms=3, label=key)
    ax.set_xlabel("deletion step")
    ax.set_ylabel("basic valuations")
    ax.set_title(f"query {result.target} ({result.rep}): {result.status}", fontsize=9)
    if len(rows) <= 20:
        ax.set_xticks(xs)
        ax.set_xticklabels([r["variable"] for r in rows], rotation=45, fontsize=7)
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report(result: QueryResult, out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    stem = f"query_{result.target}"
    answer = out / f"{stem}.txt"
    answer.write_text(serialize_result(result), encoding="utf-8")
    table = out / f"{stem}_trace.csv"
    with table.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=TRACE_FIELDS)
        w.writeheader()
        w.writerows(trace_rows(result))
    figure = out / f"{stem}_trace.png"
    plot_trace(result, figure)
    return [answer, table, figure]
