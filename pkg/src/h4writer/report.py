"""Session reports: summary tables, ANOVA lines, learning-curve fits and
plot files.

`build_report` computes everything into a plain dict; `write_report` renders
it as report.txt + report.json + summary CSVs and draws the per-device /
per-block figures with matplotlib.
"""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .experiment import (
    SUMMARY_METRICS,
    ExperimentError,
    SessionStore,
    condition_matrix,
    summarize,
)
from .stats import StatsError, fit_learning_curve, rm_anova

PROJECTION_BLOCKS = 5  # extra blocks projected beyond the observed range

_METRIC_LABELS = {
    "wpm": "Entry speed (wpm)",
    "kspc_empirical": "KSPC",
    "efficiency": "Efficiency (%)",
    "uncorrected_error_rate": "Uncorrected error rate (%)",
}


def reference_results() -> dict:
    raw = (resources.files("h4writer.data") / "reference_results.json").read_bytes()
    return json.loads(raw.decode())


def build_report(store: SessionStore) -> dict:
    if not store.records:
        raise ExperimentError("empty store")
    report: dict = {
        "trials": len(store.records),
        "by_device": summarize(store, "device"),
        "by_block": summarize(store, "block"),
        "by_device_block": summarize(store, "device,block"),
        "anova": {},
        "learning_curves": {},
        "reference": reference_results(),
    }

    blocks = sorted({r.block for r in store.records})
    devices = sorted({r.device for r in store.records})
    for metric in SUMMARY_METRICS:
        for factor in ("device", "block"):
            levels = devices if factor == "device" else blocks
            if len(levels) < 2 or len({r.participant for r in store.records}) < 2:
                continue
            matrix, _, _ = condition_matrix(store, factor, metric)
            try:
                res = rm_anova(matrix, effect=f"{metric} by {factor}")
            except StatsError:
                continue
            report["anova"][f"{metric}_by_{factor}"] = {
                "F": res.F,
                "df1": res.df1,
                "df2": res.df2,
                "p": res.p,
            }

    if len(blocks) >= 2:
        for device in devices:
            points = []
            for b in blocks:
                vals = [
                    r.metrics.wpm
                    for r in store.records
                    if r.device == device and r.block == b
                ]
                points.append((b, sum(vals) / len(vals)))
            curves = {}
            for model in ("power", "linear"):
                try:
                    fit = fit_learning_curve(points, model)
                except StatsError:
                    continue
                curves[model] = {
                    "coefficients": list(fit.coefficients),
                    "r_squared": fit.r_squared,
                    "projection": {
                        str(b): fit.predict(b)
                        for b in range(
                            max(blocks) + 1, max(blocks) + 1 + PROJECTION_BLOCKS
                        )
                    },
                }
            report["learning_curves"][device] = {
                "observed": {str(b): v for b, v in points},
                "fits": curves,
            }
    return report


def _fmt_table(rows: list[list[str]]) -> str:
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)) for row in rows
    )


def render_text(report: dict) -> str:
    lines = [f"Session report ({report['trials']} trials)", ""]
    ref = report["reference"]

    lines.append("Per device:")
    rows = [["device"] + [_METRIC_LABELS[m] for m in SUMMARY_METRICS]]
    for device, metrics in report["by_device"].items():
        rows.append(
            [device]
            + [
                f"{metrics[m]['mean']:.2f} (SD {metrics[m]['sd']:.2f})"
                for m in SUMMARY_METRICS
            ]
        )
    lines.append(_fmt_table(rows))
    lines.append("")

    lines.append("Per block:")
    rows = [["block"] + [_METRIC_LABELS[m] for m in SUMMARY_METRICS]]
    for block, metrics in report["by_block"].items():
        rows.append(
            [block]
            + [
                f"{metrics[m]['mean']:.2f} (SD {metrics[m]['sd']:.2f})"
                for m in SUMMARY_METRICS
            ]
        )
    lines.append(_fmt_table(rows))
    lines.append("")

    if report["anova"]:
        lines.append("Repeated-measures ANOVA:")
        for name, a in report["anova"].items():
            lines.append(
                f"  {name}: F({a['df1']},{a['df2']}) = {a['F']:.3g}, p = {a['p']:.3g}"
            )
        lines.append("")

    if report["learning_curves"]:
        lines.append(
            f"Entry-speed learning curves (projection: +{PROJECTION_BLOCKS} blocks):"
        )
        for device, lc in report["learning_curves"].items():
            for model, fit in lc["fits"].items():
                c0, c1 = fit["coefficients"]
                proj = ", ".join(
                    f"b{b}={v:.2f}" for b, v in fit["projection"].items()
                )
                lines.append(
                    f"  {device} [{model}]: ({c0:.3g}, {c1:.3g}), "
                    f"R^2 = {fit['r_squared']:.4f}; {proj}"
                )
        lines.append("")

    lines.append("Published reference values (human study; for comparison only):")
    for device, v in ref["entry_speed_wpm"].items():
        lines.append(f"  {device}: {v['mean']} wpm (SD = {v['sd']})")
    lines.append(
        f"  overall observed KSPC: {ref['kspc_overall']['results']} "
        f"(abstract: {ref['kspc_overall']['abstract']})"
    )
    for device, r2 in ref["speed_trend_r_squared"].items():
        lines.append(f"  speed trend R^2, {device}: {r2}")
    return "\n".join(lines) + "\n"


def _plot_by_device(report: dict, path: Path) -> None:
    devices = list(report["by_device"])
    means = [report["by_device"][d]["wpm"]["mean"] for d in devices]
    sds = [report["by_device"][d]["wpm"]["sd"] for d in devices]
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.bar(devices, means, yerr=sds, capsize=4, color="#4878a8")
    ax.set_ylabel("Entry speed (wpm)")
    ax.set_title("Entry speed vs. input device")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_metric_by_block(report: dict, metric: str, path: Path) -> None:
    per_db = report["by_device_block"]
    devices = sorted({k.split(",")[0] for k in per_db})
    blocks = sorted({int(k.split(",")[1]) for k in per_db})
    fig, ax = plt.subplots(figsize=(5, 4))
    for device in devices:
        ys = [per_db[f"{device},{b}"][metric]["mean"] for b in blocks]
        ax.plot(blocks, ys, marker="o", label=device)
    ax.set_xlabel("Block")
    ax.set_ylabel(_METRIC_LABELS[metric])
    ax.set_title(f"{_METRIC_LABELS[metric]} vs. block")
    ax.set_xticks(blocks)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _plot_learning_curves(report: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for device, lc in report["learning_curves"].items():
        obs = {int(b): v for b, v in lc["observed"].items()}
        xs = sorted(obs)
        line = ax.plot(xs, [obs[x] for x in xs], marker="o", label=device)[0]
        fit = lc["fits"].get("power")
        if fit:
            proj_x = xs + [int(b) for b in fit["projection"]]
            c0, c1 = fit["coefficients"]
            ax.plot(
                proj_x,
                [c0 * x**c1 for x in proj_x],
                linestyle="--",
                color=line.get_color(),
                alpha=0.6,
                label=f"{device} trend (R^2={fit['r_squared']:.3f})",
            )
    ax.set_xlabel("Block")
    ax.set_ylabel("Entry speed (wpm)")
    ax.set_title(f"Learning curve with +{PROJECTION_BLOCKS} block projection")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _write_summary_csv(report: dict, key: str, label: str, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow([label] + [f"{m}_{s}" for m in SUMMARY_METRICS for s in ("mean", "sd", "n")])
        for group, metrics in report[key].items():
            row = [group]
            for m in SUMMARY_METRICS:
                row += [metrics[m]["mean"], metrics[m]["sd"], metrics[m]["n"]]
            w.writerow(row)


def write_report(store: SessionStore, out_dir) -> dict:
    """Render the full report bundle into out_dir; returns the report dict."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = build_report(store)

    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    (out / "report.txt").write_text(render_text(report), encoding="utf-8")
    _write_summary_csv(report, "by_device", "device", out / "summary_by_device.csv")
    _write_summary_csv(report, "by_block", "block", out / "summary_by_block.csv")
    _write_summary_csv(
        report, "by_device_block", "device_block", out / "summary_by_device_block.csv"
    )

    figures = out / "figures"
    figures.mkdir(exist_ok=True)
    _plot_by_device(report, figures / "entry_speed_by_device.png")
    for metric in SUMMARY_METRICS:
        _plot_metric_by_block(report, metric, figures / f"{metric}_by_block.png")
    if report["learning_curves"]:
        _plot_learning_curves(report, figures / "learning_curves.png")
    return report
