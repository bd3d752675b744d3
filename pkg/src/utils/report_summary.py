"""
Report rendering for WaveGuard runs.

Renders detection, timing, sweep and adaptive-attack results as grid tables
and saves them alongside their JSON form.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from tabulate import tabulate


def _fmt(value: Optional[float], digits: int = 2) -> str:
    if value is None:
        return "-"
    return f"{value:.{digits}f}"


def _pct(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value * 100:.1f}%"


def render_detection_table(reports: Sequence[Any]) -> str:
    """One row per EvaluationReport: transform, threshold, AUC, accuracy, TPR at low FPR."""
    table_data = []
    for report in reports:
        table_data.append([
            report.transform_label,
            _fmt(report.threshold),
            report.threshold_source,
            _fmt(report.auc),
            _pct(report.accuracy),
            _pct(report.tpr_at_fpr.get("0.00")),
            _pct(report.tpr_at_fpr.get("0.05")),
            len(report.rows),
            len(report.failures),
        ])
    headers = ['Defense', 'Threshold', 'Source', 'AUC', 'Acc.', 'TPR\n(FPR=0)', 'TPR\n(FPR≤5%)',
               'Rows', 'Failed']
    return tabulate(table_data, headers=headers, tablefmt='grid')


def render_mean_cer_table(report: Any) -> str:
    """Mean CER(orig, g(orig)), CER(adv, g(adv)) and CER(orig, g(adv)) per attack label."""
    table_data = []
    for label, values in report.mean_cer.items():
        table_data.append([
            label,
            _fmt(values["cer_orig_gorig"]),
            _fmt(values["cer_adv_gadv"]),
            _fmt(values["cer_orig_gadv"]),
        ])
    headers = ['Attack', 'CER(orig, g(orig))', 'CER(adv, g(adv))', 'CER(orig, g(adv))']
    return tabulate(table_data, headers=headers, tablefmt='grid')


def render_timing_table(results: Sequence[Any]) -> str:
    table_data = [[r.label, f"{r.mean_seconds:.4f}", r.n_clips, _fmt(r.mean_clip_seconds)] for r in results]
    headers = ['Transformation', 'Avg. Wall-Clock (s)', 'Clips', 'Avg. Clip (s)']
    return tabulate(table_data, headers=headers, tablefmt='grid')


def render_sweep_table(points: Sequence[Any]) -> str:
    table_data = [[p.parameter, p.value, _fmt(p.auc), _pct(p.accuracy), _fmt(p.threshold), p.failures]
                  for p in points]
    headers = ['Parameter', 'Value', 'AUC', 'Acc.', 'Threshold', 'Failed']
    return tabulate(table_data, headers=headers, tablefmt='grid')


def render_robustness_table(report: Any) -> str:
    """Adaptive-attack rows: distortion, attack performance and detection scores."""
    table_data = []
    for row in report.rows:
        table_data.append([
            report.transform_label,
            _fmt(row.epsilon, 0),
            _fmt(row.mean_linf, 0),
            _fmt(row.mean_db, 1),
            _pct(row.sr_x_adv),
            _pct(row.sr_g_x_adv),
            _fmt(row.cer_x_adv_target),
            _fmt(row.cer_g_x_adv_target),
            _fmt(row.auc),
            _pct(row.accuracy),
        ])
    headers = ['Defense', 'ε∞', '|δ|∞', 'dB_x(δ)', 'SR\n(x_adv)', 'SR\n(g(x_adv))',
               'CER\n(x_adv, τ)', 'CER\n(g(x_adv), τ)', 'AUC', 'Acc.']
    return tabulate(table_data, headers=headers, tablefmt='grid')


class ReportWriter:
    """Saves JSON payloads and rendered tables under one output directory."""

    def __init__(self, output_dir: str = "outputs"):
        """
        Args:
            output_dir: Directory to save report files
        """
        self.output_dir = Path(output_dir)
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self.saved: List[str] = []

    def save_json(self, name: str, payload: Dict[str, Any]) -> str:
        filepath = self.output_dir / f"{name}.json"
        with open(filepath, 'w') as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")
        self.saved.append(str(filepath))
        return str(filepath)

    def save_table(self, name: str, table: str) -> str:
        filepath = self.output_dir / f"{name}.txt"
        with open(filepath, 'w') as f:
            f.write(table + "\n")
        self.saved.append(str(filepath))
        return str(filepath)
