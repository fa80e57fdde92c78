"""Alpha command: the Bloch radius alpha(t) of one model."""

from typing import Optional

import numpy as np

from ..config import ExperimentConfig
from ..core import LoadingSpinner, print_info, print_success
from ..core.channel import alpha_values, haar_sample_ptms, ptm_curve
from ..core.ensembles import eigen_decompose, sample_gue
from ..core.records import CurveRecord, write_record
from ..core.spectral import alpha_curve
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

PTM_COLUMNS = [f"L{j}{k}" for j in range(4) for k in range(4)]


def simulate_channel(config: ExperimentConfig) -> CurveRecord:
    """PTM of a GUE-coupled qubit, from one instance or averaged over Haar eigenvectors.

    ``value`` is the mean of the three diagonal entries; ``alpha_spectrum`` is the
    Haar average predicted from the instance's spectrum alone.
    """
    times = config.times()
    N = int(config.N)
    spec, W = eigen_decompose(sample_gue(N, config.seed))
    env = config.environment()

    stderr: Optional[np.ndarray] = None
    if config.n_samples == 0:
        ptms = ptm_curve(W, spec, env, times)
    else:
        samples = haar_sample_ptms(spec, env, times, config.n_samples, config.seed, config.workers)
        ptms = samples.mean(axis=0)
        diagonal = np.trace(samples[:, :, :3, :3], axis1=2, axis2=3) / 3
        stderr = diagonal.std(axis=0, ddof=1) / np.sqrt(config.n_samples)

    value = np.trace(ptms[:, :3, :3], axis1=1, axis2=2) / 3
    predicted = alpha_values(spec, times)

    columns = ["t", "value"] + (["stderr"] if stderr is not None else [])
    record = new_record(config, columns + ["alpha_spectrum"] + PTM_COLUMNS)
    for i, t in enumerate(times):
        row = {"t": t, "value": value[i], "alpha_spectrum": predicted[i]}
        if stderr is not None:
            row["stderr"] = stderr[i]
        row.update({name: ptms[i].flat[n] for n, name in enumerate(PTM_COLUMNS)})
        record.add(**row)
    return record


def build_alpha_record(config: ExperimentConfig) -> CurveRecord:
    if config.model == "monte-carlo":
        return simulate_channel(config)

    curve = alpha_curve(config.model, config.N, config.times())
    record = new_record(config, ["t", "value"])
    for t, value in zip(curve.times, curve.values):
        record.add(t=t, value=value)
    return record


def alpha_cmd(
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
):
    """
    Write alpha(t) for an analytic model or a simulated channel.

    Examples:
        rmchannel alpha --model poisson --dim 4
        rmchannel alpha --model gue-exact --dim 8 --t-end 40 -o gue8.csv
        rmchannel alpha --model monte-carlo --dim 1024 --t-end 6 --t-step 0.05
    """
    with guarded():
        config = load(
            "alpha", config_path, model=model, dim=dim, t_start=t_start, t_end=t_end,
            t_step=t_step, seed=seed, samples=samples, env=env, out=out, format=fmt,
            workers=workers,
        )
        print_info(f"alpha: {config.model}, N={config.echo()['N']}, {config.times().size} points")
        with LoadingSpinner("Computing alpha(t)..."):
            record = build_alpha_record(config)

        path = write_record(record, config.out, config.format)
        if path:
            print_success(f"Wrote {len(record.rows)} rows to {path}")
