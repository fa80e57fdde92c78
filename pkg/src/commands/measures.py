"""Measures command: M1, M2 and M3 of alpha(t) curves."""

import math
from typing import Optional

import typer
from typing_extensions import Annotated

from ..config import ExperimentConfig
from ..core import LoadingSpinner, print_measure_table, print_success, print_warning
from ..core.ensembles import sample_gue_spectrum
from ..core.measures import MeasureReport, evaluate_measures, table_one
from ..core.records import CurveRecord, read_curve, write_record
from ..core.spectral import AlphaCurve, alpha_curve, alpha_per_spectrum
from .options import (
    ConfigOpt,
    DimOpt,
    FormatOpt,
    ModelOpt,
    OutOpt,
    SeedOpt,
    TEndOpt,
    TStartOpt,
    TStepOpt,
    WorkersOpt,
    guarded,
    load,
    new_record,
)

MEASURE_COLUMNS = [
    "model", "N", "M1", "M2", "M3", "horizon", "tail_bound", "m1_tail", "m2_tail", "segments",
]


def curve_for(config: ExperimentConfig) -> AlphaCurve:
    """The alpha(t) curve a non-table measures run evaluates."""
    if config.input_path:
        times, values = read_curve(config.input_path)
        return AlphaCurve(times, values, "input")
    if config.model == "monte-carlo":
        spec = sample_gue_spectrum(int(config.N), config.seed)
        return alpha_per_spectrum(spec, config.times())
    return alpha_curve(config.model, config.N, config.times())


def report_rows(config: ExperimentConfig, reports: list[MeasureReport]) -> CurveRecord:
    record = new_record(config, MEASURE_COLUMNS)
    for report in reports:
        N = report.N
        record.add(
            model=report.model,
            N="inf" if N is not None and math.isinf(N) else N,
            M1=report.m1,
            M2=report.m2,
            M3=report.m3,
            horizon=report.horizon,
            tail_bound=report.tail_bound,
            m1_tail=report.m1_tail,
            m2_tail=report.m2_tail,
            segments=report.segment_count,
        )
    return record


def measures_cmd(
    model: ModelOpt = None,
    dim: DimOpt = None,
    t_start: TStartOpt = None,
    t_end: TEndOpt = None,
    t_step: TStepOpt = None,
    seed: SeedOpt = None,
    out: OutOpt = None,
    fmt: FormatOpt = None,
    config_path: ConfigOpt = None,
    workers: WorkersOpt = None,
    table: Annotated[
        bool,
        typer.Option("--table", "-t", help="Evaluate GUE and Poisson at N = 4, 8 and infinity")
    ] = False,
    input_path: Annotated[
        Optional[str],
        typer.Option("--input", "-i", help="CSV file with a t,value curve to evaluate")
    ] = None,
    floor: Annotated[
        Optional[float],
        typer.Option("--floor", help="alpha below which M1 is reported divergent")
    ] = None,
):
    """
    Compute the non-Markovianity measures M1, M2, M3.

    --t-end is the integration horizon (default 500, env RMCHANNEL_HORIZON).

    Examples:
        rmchannel measures --table
        rmchannel measures --model poisson-infinite
        rmchannel measures --input curve.csv
    """
    with guarded():
        config = load(
            "measures", config_path, model=model, dim=dim, t_start=t_start, t_end=t_end,
            t_step=t_step, seed=seed, out=out, format=fmt, workers=workers,
            table=table or None, input=input_path, floor=floor,
        )
        with LoadingSpinner("Integrating measures..."):
            if config.table:
                reports = table_one(config.horizon, config.t_step, config.floor)
            else:
                reports = [evaluate_measures(curve_for(config), config.floor)]

        print_measure_table(reports)
        if not config.table and math.isinf(reports[0].m1):
            print_warning(
                f"M1 diverges: alpha(t) rises from below the floor {config.floor:g}"
            )
        record = report_rows(config, reports)
        path = write_record(record, config.out, config.format)
        if path:
            print_success(f"Wrote {len(record.rows)} rows to {path}")
