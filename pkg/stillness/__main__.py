import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import click
import tqdm

from stillness import constants
from stillness.condition import ConditionId
from stillness.exceptions import StillnessError
from stillness.normality import anova_gate, group_summary, shapiro_wilk
from stillness.report import (
    render_anova_outcome,
    render_histogram_table,
    render_report,
    render_run_table,
    render_summary_table,
)
from stillness.run_record import RunRecord
from stillness.signal_stats import (
    PerRunStats,
    amplitude_histogram,
    densest_window,
    per_run_stats,
)
from stillness.simulation import SimConfig, simulate_run
from stillness.spectral import (
    OneOverFModel,
    average_spectra,
    dft_pp,
    fit_one_over_f,
    max_amplitude_above,
)
from stillness.table_io import read_amplitude_table
from stillness.utils import format_fixed, parse_band


@click.group()
def cli() -> None:
    """
    Fingertip stillness movement

    Simulates 4-second "hold still" runs of a fingertip under the twelve
    haptic x musical conditions, and analyzes runs and travel-amplitude
    tables the way the per-run report pages and the cross-condition tests do.

    \b
    Conditions are written "n,m": n is the haptic condition
    (0 zero force, 1 positive force, 2 negative force, 3 viscosity,
    4 anti-viscosity, 5 positional markers) and m the musical condition
    (0 no musical control, 1 musical control).
    """

    pass


def _parse_condition(
    ctx: click.Context, param: click.Parameter, value: str
) -> ConditionId:
    try:
        return ConditionId.parse(value)
    except StillnessError as e:
        raise click.BadParameter(str(e)) from None


@click.command()
@click.option(
    "--condition",
    required=True,
    callback=_parse_condition,
    help='The condition to simulate, as "n,m"',
)
@click.option("--seed", type=click.INT, required=True, help="Seed of the first run")
@click.option(
    "--runs",
    type=click.IntRange(min=1),
    default=1,
    show_default=True,
    help="Number of runs; run i uses seed + i",
)
@click.option(
    "--out",
    "out_dir",
    type=click.Path(path_type=Path, file_okay=False),
    required=True,
    help="Directory for the run CSV files",
)
def simulate(condition: ConditionId, seed: int, runs: int, out_dir: Path) -> None:
    """
    Simulates stillness-movement runs and writes them as run CSV files.

    Each file holds 4 s of z position, z speed and target force at 4000 Hz,
    preceded by "# condition=", "# subject=", "# run=", "# seed=" and
    "# clamped_samples=" comment lines.
    """

    out_dir.mkdir(parents=True, exist_ok=True)

    for i in tqdm.tqdm(range(runs), unit="run", disable=runs == 1):
        run_seed = seed + i
        cfg = SimConfig(condition=condition, seed=run_seed, run_index=i + 1)
        run = simulate_run(cfg)
        file = out_dir / f"run_{condition.n}{condition.m}_seed{run_seed}.csv"
        run.to_file(file)
        tqdm.tqdm.write(f"Wrote {file}")


def _analyze_file(file: Path) -> tuple[RunRecord, PerRunStats]:
    run = RunRecord.from_file(file)
    return run, per_run_stats(run)


def _analyze_files(files: tuple[Path, ...]) -> list[tuple[RunRecord, PerRunStats]]:
    workers = max(1, min(len(files), os.cpu_count() or 1))
    with ThreadPoolExecutor(max_workers=workers) as executor:
        # map keeps input order
        return list(executor.map(_analyze_file, files))


@click.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option(
    "--report",
    type=click.BOOL,
    is_flag=True,
    default=False,
    show_default=True,
    help="Print the full per-run statistics block for each file",
)
@click.option(
    "--spectrum-csv",
    type=click.BOOL,
    is_flag=True,
    default=False,
    show_default=True,
    help="Write <name>.spectrum.csv (freq_hz,pp_mm, up to 50 Hz) next to each file",
)
def analyze(files: tuple[Path, ...], report: bool, spectrum_csv: bool) -> None:
    """
    Computes the per-run statistics of run CSV files.

    Without --report, prints one summary row per file.
    """

    results = _analyze_files(files)

    if report:
        blocks = [
            render_report(stats, run, source=file.name)
            for file, (run, stats) in zip(files, results)
        ]
        click.echo("\n".join(blocks), nl=False)
    else:
        click.echo(
            render_run_table(
                (file.name, run, stats) for file, (run, stats) in zip(files, results)
            )
        )

    if spectrum_csv:
        for file, (_, stats) in zip(files, results):
            spectrum_file = file.with_name(file.stem + ".spectrum.csv")
            stats.spectrum.to_csv(
                spectrum_file, max_freq_Hz=constants.REPORT_MAX_FREQ_HZ
            )
            click.echo(f"Wrote {spectrum_file}")


@click.command()
@click.argument("table_file", metavar="TABLE", type=click.Path(path_type=Path))
@click.option(
    "--musical",
    type=click.Choice(["0", "1"]),
    default=None,
    help="Compare only the conditions with this musical index (default: both, in turn)",
)
def compare(table_file: Path, musical: Optional[str]) -> None:
    """
    Summarizes travel amplitudes per haptic condition and runs the ANOVA
    gate: the one-way ANOVA is only run if every group passes the
    Shapiro-Wilk normality test.
    """

    table = read_amplitude_table(table_file)
    musical_indexes = [0, 1] if musical is None else [int(musical)]

    for m in musical_indexes:
        groups = table.musical_subset(m)
        label = ConditionId(0, m).musical.value
        click.echo(f"Travel amplitude (mm) across haptic conditions, {label}:")
        summaries = {name: group_summary(values) for name, values in groups.items()}
        click.echo(render_summary_table(summaries))
        outcome = anova_gate(groups, alpha=constants.ANOVA_ALPHA)
        click.echo(render_anova_outcome(outcome, constants.ANOVA_ALPHA))
        if m != musical_indexes[-1]:
            click.echo()


@click.command()
@click.argument("table_file", metavar="TABLE", type=click.Path(path_type=Path))
def swtest(table_file: Path) -> None:
    """
    Prints the Shapiro-Wilk W and p of every condition column, one
    "name W p" line per condition.
    """

    table = read_amplitude_table(table_file)
    for name in table.names:
        result = shapiro_wilk(table[name])
        click.echo(f"{name} {format_fixed(result.w, 3)} {format_fixed(result.p, 3)}")


@click.command(name="fit-spectrum")
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option(
    "--band",
    default="{}:{}".format(*constants.ONE_OVER_F_BAND_HZ),
    show_default=True,
    help="Fit band LO:HI in Hz (inclusive)",
)
def fit_spectrum(files: tuple[Path, ...], band: str) -> None:
    """
    Averages the DFT spectra of run CSV files and fits a c / f model of
    peak-to-peak amplitude over the band.
    """

    lo, hi = parse_band(band)
    spectra = [dft_pp(RunRecord.from_file(file).z_mm) for file in files]
    average = average_spectra(spectra)
    c = fit_one_over_f(average, (lo, hi))

    click.echo(
        f"1/f coefficient: {format_fixed(c, 4)} mm*Hz over "
        f"{format_fixed(lo, 2)}-{format_fixed(hi, 2)} Hz ({len(spectra)} runs)"
    )
    click.echo(f"reference 3/17: {format_fixed(constants.ONE_OVER_F_COEFF_MM_HZ, 4)} mm*Hz")
    click.echo(
        f"max pp above {format_fixed(hi, 2)} Hz: "
        f"{format_fixed(max_amplitude_above(average, hi), 4)} mm "
        f"(floor {format_fixed(OneOverFModel().hf_floor_mm, 3)} mm)"
    )


@click.command()
@click.argument("table_file", metavar="TABLE", type=click.Path(path_type=Path))
@click.option(
    "--conditions",
    default="00,01",
    show_default=True,
    help="Comma-separated conditions to pool, e.g. 00,01",
)
@click.option(
    "--bin",
    "bin_mm",
    type=click.FLOAT,
    default=constants.HISTOGRAM_BIN_MM,
    show_default=True,
    help="Bin width (mm)",
)
def hist(table_file: Path, conditions: str, bin_mm: float) -> None:
    """
    Prints the histogram of the pooled travel amplitudes of some conditions
    (by default the 48 zero-force runs).
    """

    table = read_amplitude_table(table_file)
    names = [ConditionId.parse(text).name for text in conditions.split(",") if text.strip()]
    values = table.pooled(names)

    click.echo(render_histogram_table(amplitude_histogram(values, bin_mm)))
    click.echo(
        f"range: {format_fixed(values.min(), 2)} - {format_fixed(values.max(), 2)} mm "
        f"({len(values)} runs)"
    )
    lo, hi, count = densest_window(values, width_mm=1.0, step_mm=bin_mm)
    click.echo(
        f"densest 1.00 mm window: [{format_fixed(lo, 2)}, {format_fixed(hi, 2)}] mm "
        f"({count} runs)"
    )


cli.add_command(simulate)
cli.add_command(analyze)
cli.add_command(compare)
cli.add_command(swtest)
cli.add_command(fit_spectrum)
cli.add_command(hist)


def main(argv: Optional[list[str]] = None) -> int:
    """Runs the command line and returns the exit status."""

    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cli.main(args=argv, prog_name="stillness", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted.", err=True)
        return 1
    except (StillnessError, OSError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
