"""Utility modules for the WaveGuard tool."""

from .report_summary import (
    ReportWriter,
    render_detection_table,
    render_mean_cer_table,
    render_robustness_table,
    render_sweep_table,
    render_timing_table,
)

__all__ = [
    'ReportWriter',
    'render_detection_table',
    'render_mean_cer_table',
    'render_robustness_table',
    'render_sweep_table',
    'render_timing_table',
]
