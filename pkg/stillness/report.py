from typing import Any, Iterable, Optional

from prettytable import ALL, SINGLE_BORDER, PrettyTable

from stillness.normality import AnovaOutcome, AnovaRefusal, GroupSummary
from stillness.run_record import RunRecord
from stillness.signal_stats import Histogram, PerRunStats
from stillness.utils import format_fixed, format_optional, format_scientific


def make_table(field_names: list[str]) -> PrettyTable:
    table = PrettyTable(field_names, hrules=ALL)
    table.set_style(SINGLE_BORDER)
    return table


def clean_table_row(row: list[Any]) -> list[Any]:
    for i, value in enumerate(row):
        if value is None:
            row[i] = "(none)"
    return row


def render_header(run: RunRecord) -> str:
    parts = []
    if run.subject is not None:
        parts.append(f"SUBJECT {run.subject}")
    if run.run_index is not None:
        parts.append(f"RUN {run.run_index:02d}")
    parts.append(f"CONDITION {run.condition}")
    return " - ".join(parts)


def render_report(
    stats: PerRunStats, run: Optional[RunRecord] = None, source: Optional[str] = None
) -> str:
    """
    The per-run statistics block. Field order, labels
    and unit suffixes are fixed; the spacing is the one canonical variant.
    """

    lines = []
    if run is not None:
        lines.append(render_header(run))
    if source is not None:
        lines.append(source)
    if lines:
        lines.append("")

    lines.extend(
        [
            f"z_min : {format_fixed(stats.z_min_mm, 2)} mm",
            f"z_max : {format_fixed(stats.z_max_mm, 2)} mm",
            f"z_travel_amplitude : {format_fixed(stats.z_travel_amplitude_mm, 2)} mm",
            f"avg_abs_z_travel : {format_fixed(stats.avg_abs_z_travel_mm_s, 2)} mm/s",
            f"z_jarque-bera_jb : {format_optional(stats.jb_stat, 2)}",
            f"z_jarque-bera_p : {format_optional(stats.jb_p, 2, scientific=True)}",
            f"z_lin_mod_est_slope: {format_fixed(stats.lin_slope_mm_s, 2)} mm/s",
            f"z_lin_mod_adj_R² : {format_fixed(stats.lin_adj_r2_pct, 0)} %",
            f"z_poly40_mod_adj_R²: {format_fixed(stats.poly40_adj_r2_pct, 0)} %",
            f"z_dft_ampl_thresh : {format_fixed(stats.dft_ampl_thresh_mm, 3)} mm",
            f">=threshold_maxfreq: {format_fixed(stats.threshold_maxfreq_Hz, 2)} Hz",
        ]
    )
    return "\n".join(lines) + "\n"


def render_run_table(rows: Iterable[tuple[str, RunRecord, PerRunStats]]) -> PrettyTable:
    table = make_table(
        [
            "File",
            "Condition",
            "Travel (mm)",
            "Avg |travel| (mm/s)",
            "JB p",
            ">= thresh max freq (Hz)",
            "Clamped samples",
        ]
    )
    for name, run, stats in rows:
        table.add_row(
            clean_table_row(
                [
                    name,
                    str(run.condition),
                    format_fixed(stats.z_travel_amplitude_mm, 2),
                    format_fixed(stats.avg_abs_z_travel_mm_s, 2),
                    None if stats.jb_p is None else format_scientific(stats.jb_p),
                    format_fixed(stats.threshold_maxfreq_Hz, 2),
                    run.clamped_samples,
                ]
            )
        )
    return table


def render_summary_table(summaries: dict[str, GroupSummary]) -> PrettyTable:
    table = make_table(["Condition", "Min (mm)", "Max (mm)", "Mean (mm)", "Std (mm)"])
    for name, summary in summaries.items():
        table.add_row(
            [
                name,
                format_fixed(summary.min, 2),
                format_fixed(summary.max, 2),
                format_fixed(summary.mean, 3),
                format_fixed(summary.std, 3),
            ]
        )
    return table


def render_anova_outcome(outcome: AnovaOutcome, alpha: float) -> str:
    if isinstance(outcome, AnovaRefusal):
        offenders = ", ".join(
            f"{name} (p = {format_fixed(p, 3)})" for name, p in outcome.failing_groups
        )
        return (
            f"ANOVA refused: Shapiro-Wilk p < {alpha} for "
            f"{len(outcome.failing_groups)} groups: {offenders}"
        )
    return (
        f"ANOVA: F({outcome.df_between}, {outcome.df_within}) = "
        f"{format_fixed(outcome.f_stat, 3)}, p = {format_fixed(outcome.p, 3)}"
    )


def render_histogram_table(histogram: Histogram) -> PrettyTable:
    table = make_table(["Bin (mm)", "Count", "Bar"])
    edges = histogram.edges_mm
    for i, count in enumerate(histogram.counts):
        table.add_row(
            [
                f"[{format_fixed(edges[i], 2)}, {format_fixed(edges[i + 1], 2)})",
                int(count),
                "#" * int(count),
            ]
        )
    return table
