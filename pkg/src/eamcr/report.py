"""CSV, JSON and SVG emission for tables, runs and comparisons.

All writers are pure functions of their inputs. Numbers are rounded to six
decimals, dictionaries keep insertion order and the SVG markup carries no
timestamps or random ids, so repeated runs produce identical bytes.
"""

from __future__ import annotations

import csv
import io
import json
import math
from html import escape

from .sim import ComparisonReport, EamcrPolicy, SimResult

DECIMALS = 6

DLEI_HEADER = ["model", "accelerator", "accuracy", "mean_energy_mwh", "dlei"]
SERIES_HEADER = ["timestamp_s", "remaining_mah", "active_model"]
SUMMARY_HEADER = ["policy", "operating_time_s", "inference_count", "utility", "mean_dlei"]


def fmt(x) -> str:
    """Plain decimal text: at most six decimals, no exponent, no padding."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            return ""
        s = f"{x:.{DECIMALS}f}".rstrip("0").rstrip(".")
        return "0" if s in ("-0", "") else s
    return str(x)


def _round(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return None
        r = round(obj, DECIMALS)
        return 0.0 if r == 0 else r
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def to_json(obj) -> str:
    return json.dumps(_round(obj), indent=2, allow_nan=False) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


# --- dict views -------------------------------------------------------------


def dlei_rows(table) -> list:
    return [[r.model_name, r.accelerator.value, r.accuracy, r.mean_energy_mwh, r.dlei] for r in table]


def policy_to_dict(policy) -> dict:
    if isinstance(policy, EamcrPolicy):
        c = policy.config
        return {
            "kind": "EAMCR",
            "engine": {
                "threshold_mah": c.threshold_mah,
                "accuracy_region": list(c.accuracy_region),
                "planned_hours": c.planned_hours,
                "feedback_alpha": c.feedback_alpha,
                "accelerator": c.accelerator.value,
                "user_model_choice": c.user_model_choice,
                "active_only_discharge": c.active_only_discharge,
            },
        }
    return {"kind": "FIXED", "model": policy.model_name}


def decision_to_dict(d) -> dict:
    return {
        "timestamp_s": d.timestamp_s,
        "model": d.model_name,
        "accelerator": d.accelerator.value,
        "mode": d.mode.value,
        "rationale": d.rationale.value,
        "estimated_usage_h": d.estimated_usage_h,
    }


def result_to_dict(r: SimResult) -> dict:
    return {
        "policy": r.policy.label,
        "policy_detail": policy_to_dict(r.policy),
        "accelerator": r.accelerator.value,
        "operating_time_s": r.operating_time_s,
        "operating_time_h": r.operating_time_s / 3600.0,
        "exhausted": r.exhausted,
        "inference_count": r.inference_count,
        "utility": r.utility,
        "mean_dlei": r.mean_dlei,
        "initial_mah": r.initial_mah,
        "final_mah": r.final_mah,
        "inference_drain_mah": math.fsum(r.drains_mah),
        "idle_drain_mah": r.idle_drain_mah,
        "terminal_drain_mah": r.terminal_drain_mah,
        "model_changes": r.model_changes,
        "mode_transitions": r.mode_transitions,
        "energy_series_points": len(r.energy_series),
        "decision_log": [decision_to_dict(d) for d in r.decision_log],
    }


def report_to_dict(rep: ComparisonReport) -> dict:
    return {
        "scenario_id": rep.scenario_id,
        "seed": rep.seed,
        "initial_mah": rep.initial_mah,
        "fixed_mean_operating_time_s": rep.fixed_mean_operating_time_s,
        "summary": rep.summary,
        "results": [result_to_dict(r) for r in rep.results],
    }


def series_rows(r: SimResult) -> list:
    return [list(p) for p in r.energy_series]


def summary_rows(rep: ComparisonReport) -> list:
    rows = []
    for label, s in rep.summary.items():
        rows.append([label, s["operating_time_s"], s["inference_count"], s["utility"], s["mean_dlei"]])
    if rep.fixed_mean_operating_time_s is not None:
        rows.append(["MEAN(FIXED)", rep.fixed_mean_operating_time_s, "", "", ""])
    return rows


# --- SVG --------------------------------------------------------------------

PALETTE = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666"]
MAX_POINTS = 1500


def _downsample(points):
    if len(points) <= MAX_POINTS:
        return points
    step = math.ceil(len(points) / MAX_POINTS)
    out = points[::step]
    if out[-1] is not points[-1]:
        out.append(points[-1])
    return out


def energy_chart(curves, title, mean_time_s=None, width=820, height=480) -> str:
    """Remaining charge against time for each ``(label, series)`` curve.

    ``mean_time_s`` adds a dashed vertical reference at that time.
    """
    left, right, top, bottom = 70, 200, 40, 50
    pw, ph = width - left - right, height - top - bottom
    t_max = max((p[0] for _, s in curves for p in s), default=1.0) or 1.0
    if mean_time_s:
        t_max = max(t_max, mean_time_s)
    q_max = max((p[1] for _, s in curves for p in s), default=1.0) or 1.0
    h_max = t_max / 3600.0

    def x(t):
        return left + pw * (t / t_max)

    def y(q):
        return top + ph * (1.0 - q / q_max)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="{top - 15}" font-size="14">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(6):
        hx = h_max * i / 5
        px = x(hx * 3600.0)
        out.append(f'<line x1="{px:.2f}" y1="{top + ph}" x2="{px:.2f}" y2="{top + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{top + ph + 18}" text-anchor="middle">{hx:.1f}</text>')
        qy = q_max * i / 5
        py = y(qy)
        out.append(f'<line x1="{left - 5}" y1="{py:.2f}" x2="{left}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{py + 4:.2f}" text-anchor="end">{qy:.0f}</text>')
    out.append(f'<text x="{left + pw / 2:.2f}" y="{height - 10}" text-anchor="middle">operating time (h)</text>')
    out.append(
        f'<text x="15" y="{top + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {top + ph / 2:.2f})">remaining capacity (mAh)</text>'
    )
    for i, (label, series) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{x(p[0]):.2f},{y(p[1]):.2f}" for p in _downsample(list(series)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = top + 14 + 18 * i
        out.append(f'<line x1="{left + pw + 15}" y1="{ly - 4}" x2="{left + pw + 35}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 40}" y="{ly}">{escape(label)}</text>')
    if mean_time_s:
        mx = x(mean_time_s)
        out.append(
            f'<line x1="{mx:.2f}" y1="{top}" x2="{mx:.2f}" y2="{top + ph}" '
            f'stroke="black" stroke-dasharray="6,4"/>'
        )
        ly = top + 14 + 18 * len(curves)
        out.append(
            f'<line x1="{left + pw + 15}" y1="{ly - 4}" x2="{left + pw + 35}" y2="{ly - 4}" '
            f'stroke="black" stroke-dasharray="6,4"/>'
        )
        out.append(f'<text x="{left + pw + 40}" y="{ly}">mean of FIXED</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
