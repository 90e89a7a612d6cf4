"""Rendering: fixed-width tables at 2 decimals, CSV exports, figures.

CSV files carry full precision; on-screen tables round the way the
allocation tables are usually printed (2 dp).
"""

import csv

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def _fmt(v) -> str:
    return f"{float(v):.2f}"


def _table(headers, rows) -> str:
    cols = [headers] + [[str(c) for c in row] for row in rows]
    widths = [max(len(row[k]) for row in cols) for k in range(len(headers))]
    lines = []
    for row in cols:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines)


def format_fill(result, scenario) -> str:
    N = len(scenario.frameworks)
    out = ["Allocations x[framework][server]:"]
    headers = ["framework"] + [f"server {i+1}" for i in range(len(scenario.servers))] \
        + ["total"]
    rows = [[f"{n+1}"] + [str(v) for v in result.alloc[n]] + [str(sum(result.alloc[n]))]
            for n in range(N)]
    out.append(_table(headers, rows))
    out.append(f"total tasks: {result.total_tasks}")
    out.append("")
    out.append("Unused capacity [server][resource]:")
    headers = ["server"] + list(scenario.resources)
    rows = [[f"{i+1}"] + [_fmt(v) for v in row] for i, row in enumerate(result.unused)]
    out.append(_table(headers, rows))
    return "\n".join(out)


def format_summary(summary, scenario) -> str:
    from .trials import confidence_interval

    N, I = len(scenario.frameworks), len(scenario.servers)
    out = [f"Averaged over {summary.trials} trials",
           "Allocations x[framework][server] (mean, sd, 95% CI):"]
    headers = ["cell", "mean"] + (["sd", "ci_lo", "ci_hi"] if summary.sd_alloc else [])
    rows = []
    for n in range(N):
        for i in range(I):
            row = [f"({n+1},{i+1})", _fmt(summary.mean_alloc[n][i])]
            if summary.sd_alloc:
                sd = summary.sd_alloc[n][i]
                lo, hi = confidence_interval(summary.mean_alloc[n][i], sd,
                                             summary.trials)
                row += [_fmt(sd), _fmt(lo), _fmt(hi)]
            rows.append(row)
    out.append(_table(headers, rows))
    out.append(f"mean total tasks: {_fmt(summary.mean_total_tasks)}")
    out.append("")
    out.append("Unused capacity [server][resource] (mean, sd):")
    headers = ["cell", "mean"] + (["sd"] if summary.sd_unused else [])
    rows = []
    for i in range(I):
        for r, name in enumerate(scenario.resources):
            row = [f"({i+1},{name})", _fmt(summary.mean_unused[i][r])]
            if summary.sd_unused:
                row.append(_fmt(summary.sd_unused[i][r]))
            rows.append(row)
    out.append(_table(headers, rows))
    return "\n".join(out)


def write_fill_csv(result, scenario, path) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["role", "row", "col", "value"])
        for n, row in enumerate(result.alloc):
            for i, v in enumerate(row):
                w.writerow(["alloc", n, i, v])
        for i, row in enumerate(result.unused):
            for r, v in enumerate(row):
                w.writerow(["unused", i, r, float(v)])


def write_trace_csvs(trace, out_dir) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "utilization.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["time", "resource", "allocated_fraction"])
        for resource, series in trace.samples.items():
            for t, v in zip(trace.sample_times, series):
                w.writerow([t, resource, v])
    with open(out_dir / "completions.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["job_id", "role", "queue", "start", "end"])
        for rec in trace.job_completions:
            w.writerow([rec.job_id, rec.role, rec.queue, rec.start, rec.end])


def plot_utilization(trace, out_dir, title="") -> None:
    fig, ax = plt.subplots(figsize=(8, 4.5))
    for resource, series in trace.samples.items():
        ax.plot(trace.sample_times, [100 * v for v in series], label=resource)
    ax.set_xlabel("time")
    ax.set_ylabel("allocated (%)")
    ax.set_ylim(0, 105)
    if title:
        ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / "utilization.png", dpi=120)
    plt.close(fig)
