"""Fluctuations command: variances of the channel matrix elements."""

from typing import Optional

import numpy as np
import typer
from typing_extensions import Annotated

from ..config import ExperimentConfig
from ..core import LoadingSpinner, print_info, print_success
from ..core.ensembles import Spectrum, sample_gue_spectrum, sample_poisson_spectrum
from ..core.fluctuations import (
    monte_carlo_fluctuations,
    sigma2_curves,
    spectral_ensemble_sigma2,
)
from ..core.records import CurveRecord, write_record
from .options import (
    ConfigOpt,
    DimOpt,
    EnvOpt,
    FormatOpt,
    ModelOpt,
    OutOpt,
    SamplesOpt,
    SeedOpt,
    TEndOpt,
    TStartOpt,
    TStepOpt,
    WorkersOpt,
    guarded,
    load,
    new_record,
)


def spectrum_for(config: ExperimentConfig, index: int = 0) -> Spectrum:
    """One spectrum of the configured model; GUE stands in for gue-infinite at finite N."""
    if config.model == "poisson":
        return sample_poisson_spectrum(int(config.N), config.seed, index)
    return sample_gue_spectrum(int(config.N), config.seed, index)


def build_fluctuation_record(config: ExperimentConfig) -> CurveRecord:
    """Exact and leading-order curves, plus Monte Carlo and spectral-average columns."""
    times = config.times()
    spec = spectrum_for(config)
    curves = sigma2_curves(spec, times, config.model)

    columns = ["t", "kind", "sigma2_exact", "sigma2_leading"]
    mc = None
    if config.n_samples > 0:
        mc = monte_carlo_fluctuations(
            spec, config.environment(), times, config.n_samples, config.seed, config.workers
        )
        columns += ["sigma2_mc", "mc_stderr"]

    spectral = {}
    if config.spectral_average > 0:
        spectra = [spectrum_for(config, k) for k in range(config.spectral_average)]
        spectral = {
            kind: np.atleast_1d(spectral_ensemble_sigma2(kind, spectra, times))
            for kind in config.kinds
        }
        columns.append("sigma2_spectral")

    record = new_record(config, columns)
    for i, t in enumerate(times):
        for kind in config.kinds:
            exact, leading = curves[kind]
            row = {"t": t, "kind": kind, "sigma2_exact": exact[i], "sigma2_leading": leading[i]}
            if mc is not None:
                row["sigma2_mc"] = mc.variance[kind][i]
                row["mc_stderr"] = mc.variance_stderr[kind][i]
            if spectral:
                row["sigma2_spectral"] = spectral[kind][i]
            record.add(**row)
    return record


def fluctuations_cmd(
    model: ModelOpt = None,
    dim: DimOpt = None,
    t_start: TStartOpt = None,
    t_end: TEndOpt = None,
    t_step: TStepOpt = None,
    seed: SeedOpt = None,
    samples: SamplesOpt = None,
    env: EnvOpt = None,
    out: OutOpt = None,
    fmt: FormatOpt = None,
    config_path: ConfigOpt = None,
    workers: WorkersOpt = None,
    kinds: Annotated[
        Optional[str],
        typer.Option("--kinds", "-k", help="Comma-separated: diagonal,column3,offdiagonal")
    ] = None,
    spectral_average: Annotated[
        Optional[int],
        typer.Option(
            "--spectral-average", help="Also average the exact variance over this many spectra"
        )
    ] = None,
):
    """
    Write variance curves of the channel matrix elements for one sampled spectrum.

    The leading-order column uses the ensemble mean of f(t) for --model;
    gue-infinite takes the Bessel mean at the finite --dim.

    Examples:
        rmchannel fluctuations --dim 4 --t-end 20
        rmchannel fluctuations --dim 8 --samples 2000 --t-end 5 --t-step 0.25
        rmchannel fluctuations --model poisson --dim 16 --kinds diagonal
        rmchannel fluctuations --model gue-infinite --dim 64 --spectral-average 50
    """
    with guarded():
        config = load(
            "fluctuations", config_path, model=model, dim=dim, t_start=t_start, t_end=t_end,
            t_step=t_step, seed=seed, samples=samples, env=env, out=out, format=fmt,
            workers=workers, kinds=kinds, spectral_average=spectral_average,
        )
        if config.n_samples:
            print_info(f"Monte Carlo over {config.n_samples} Haar draws at N={int(config.N)}")
        with LoadingSpinner("Computing fluctuations..."):
            record = build_fluctuation_record(config)

        path = write_record(record, config.out, config.format)
        if path:
            print_success(f"Wrote {len(record.rows)} rows to {path}")
