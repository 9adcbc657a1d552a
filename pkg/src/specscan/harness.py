# coding: utf-8
"""
Experiment harness: instance generation, seeded trials, benchmark loops and
the machine-readable result files.

`run` executes the mode of an `ExperimentConfig` and writes, below
``run.output``:

``trials.jsonl``
    one JSON record per trial, sorted by trial index
``summary.csv``
    error and wall-time statistics per ``(n, R, sigma, algo)`` group
``trials.h5``
    the full trials (truth, measurement, report) when ``run.archive`` is set
"""
from collections import namedtuple
from concurrent.futures import ThreadPoolExecutor
import csv
import json
from logging import getLogger
from math import ceil, isnan, pi, sqrt
import os
from time import perf_counter

import numpy as np
from scipy import linalg

from .archive import Trial, write_archive
from .clustered import detect_centers, scan_music_c
from .config import (
    ConfigError, cluster_model, music_config, scan_config,
)
from .diagnostics import (
    music_cost, run_checks, sampling_bound, scan_cost,
)
from .model import (
    DiscreteSpectrum, EstimateReport, density, dump_measurement,
    dump_spectrum, load_spectrum, synthesize,
)
from .scan import AUTO, auto_subsample_factor, downsample_tau, scan_music
from .subspace import music

log = getLogger(__name__)

THREADS_ENV = "SPECSCAN_THREADS"
TRIALS_FILE = "trials.jsonl"
SUMMARY_FILE = "summary.csv"
ARCHIVE_FILE = "trials.h5"
SCALING_FILE = "scaling.json"
SUMMARY_FIELDS = [
    "n", "R", "sigma", "algo", "mean_err", "median_err", "max_err", "missed",
    "spurious", "mean_wall_s",
]

NYQUIST = (
    "Nyquist constraint violated: step {step} exceeds pi / R = {limit} for "
    "support radius {radius}."
)
SAMPLING = (
    "Sampling bound violated: K={n_half} is below {bound} for n={n} and "
    "density {rho}."
)
BAD_SEPARATIONS = "min_separation {low} exceeds max_separation {high}."
NEEDS_CLUSTERS = "Mode {mode} needs spectrum.source = clustered."
NEEDS_POSITIONS = "spectrum.source = inline needs spectrum.positions."
BAD_THREADS = "{} must be a nonnegative integer, got {!r}."
TOO_FEW_POINTS = "Need at least 3 timings to fit a slope, got {}."
NOT_INCREASING = "Source counts must be strictly increasing."
NONPOSITIVE_TIME = "Timings must be positive, got {}."
TRIAL_FAILED = "Trial %s (%s) failed: %s"
TRIAL_DONE = "Trial %s %s: n=%s matched %s missed %s spurious %s in %.3fs."
SCALING_FIT = "Wall time grows like n**%.3f over %s cluster counts."
CHECK_ROW = "{status:4}  {name:32} {value:>12.4g} <= {threshold:.4g}"


class InfeasibleGeometryError(ValueError):
    """
    A generated instance violates the Nyquist or the sampling constraint.
    """
    pass


Instance = namedtuple("Instance", [
    "index", "seed", "spectrum", "measurement", "halfwidth", "centers",
    "half_length", "gap",
])


def trial_seed(config, index):
    """
    Seed of trial `index`: ``run.seed + index``.
    """
    return config["run.seed"] + index


def random_spectrum(rng, radius, min_separation, max_separation):
    """
    Unit spectra in ``[-radius, radius)`` with consecutive separations drawn
    uniformly from ``[min_separation, max_separation]``.
    """
    if min_separation > max_separation:
        raise ConfigError(BAD_SEPARATIONS.format(
            low=min_separation, high=max_separation
        ), "spectrum.min_separation")
    positions = []
    position = -radius + rng.uniform(0, max_separation)
    while position < radius:
        positions.append(position)
        position += rng.uniform(min_separation, max_separation)
    if not positions:
        positions.append(0.0)
    return DiscreteSpectrum(positions, np.ones(len(positions)))


def clustered_spectrum(clusters, cluster_size, gap, intra_separation):
    """
    `clusters` groups of `cluster_size` unit spectra, `intra_separation`
    apart, placed symmetrically about the origin with cluster intervals
    `gap` apart.

    Returns
    -------
    (DiscreteSpectrum, ndarray, float)
        the spectrum, the cluster centers and the cluster half-length
    """
    half_length = intra_separation * (cluster_size - 1) / 2
    spacing = gap + 2 * half_length
    centers = spacing * (np.arange(clusters) - (clusters - 1) / 2)
    offsets = intra_separation * (
        np.arange(cluster_size) - (cluster_size - 1) / 2
    )
    positions = (centers[:, None] + offsets[None, :]).reshape(-1)
    return (
        DiscreteSpectrum(positions, np.ones(positions.size)), centers,
        half_length,
    )


def resolve_step(config, halfwidth):
    """
    Sampling step of ``measurement.step``; ``auto`` picks the largest step
    below ``bench.step_scale / halfwidth`` dividing the cutoff.
    """
    omega = config["measurement.omega"]
    step = config["measurement.step"]
    if step != AUTO:
        return step
    target = config["bench.step_scale"] / halfwidth
    return omega / int(ceil(omega / target - 1e-9))


def check_feasibility(spectrum, omega, step, halfwidth, tau=1.0):
    """
    Reject geometries violating the Nyquist criterion or the sampling bound
    with `InfeasibleGeometryError`.
    """
    radius = spectrum.support_radius
    if radius > 0 and step > pi / radius * (1 + 1e-12):
        raise InfeasibleGeometryError(NYQUIST.format(
            step=step, limit=pi / radius, radius=radius
        ))
    n_half = int(round(omega / step))
    rho = density(spectrum, halfwidth, omega)
    bound = sampling_bound(spectrum.n, rho, tau)
    available = n_half if tau == 1 else int(tau * n_half + 1e-9)
    if available < bound:
        raise InfeasibleGeometryError(SAMPLING.format(
            n_half=available, bound=bound, n=spectrum.n, rho=rho
        ))


def _ground_truth(config, rng):
    source = config["spectrum.source"]
    if source == "random":
        radius = config["spectrum.radius"]
        spectrum = random_spectrum(
            rng, radius, config["spectrum.min_separation"],
            config["spectrum.max_separation"],
        )
        return spectrum, radius, None, None, None
    if source == "clustered":
        spectrum, centers, half_length = clustered_spectrum(
            config["spectrum.clusters"], config["spectrum.cluster_size"],
            config["spectrum.cluster_gap"],
            config["spectrum.intra_separation"],
        )
        spacing = (
            float(np.min(np.diff(centers))) if centers.size > 1
            else config["spectrum.cluster_gap"] + 2 * half_length
        )
        halfwidth = float(np.max(np.abs(centers))) + spacing / 2
        return (
            spectrum, halfwidth, centers, half_length,
            spacing - 2 * half_length,
        )
    key = "spectrum.file" if source == "file" else "spectrum.positions"
    try:
        if source == "file":
            spectrum = load_spectrum(config[key])
        else:
            positions = config["spectrum.positions"]
            if not positions:
                raise ConfigError(NEEDS_POSITIONS, key)
            amplitudes = config["spectrum.amplitudes"] or (
                [1.0] * len(positions)
            )
            spectrum = DiscreteSpectrum(positions, amplitudes)
    except (OSError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        # pylint: disable=raise-missing-from
        raise ConfigError(str(exc), key)
    halfwidth = spectrum.support_radius + pi / config["measurement.omega"]
    return spectrum, halfwidth, None, None, None


def generate_instance(config, index):
    """
    Ground truth and noisy measurement of trial `index`, checked against the
    Nyquist and sampling constraints before anything runs.
    """
    seed = trial_seed(config, index)
    rng = np.random.Generator(np.random.PCG64(seed).jumped())
    spectrum, halfwidth, centers, half_length, gap = _ground_truth(
        config, rng
    )
    omega = config["measurement.omega"]
    step = resolve_step(config, halfwidth)
    check_feasibility(
        spectrum, omega, step, halfwidth, config["measurement.tau"]
    )
    try:
        measurement = synthesize(
            spectrum, omega, step, config["measurement.sigma"], seed,
            config["measurement.noise"],
        )
    except ValueError as exc:
        # pylint: disable=raise-missing-from
        raise ConfigError(str(exc), "measurement.step")
    return Instance(
        index, seed, spectrum, measurement, halfwidth, centers, half_length,
        gap,
    )


def _prepared(config, instance):
    measurement = instance.measurement
    if config["measurement.tau"] < 1:
        measurement = downsample_tau(measurement, config["measurement.tau"])
    return measurement


def _sweep(instance):
    return (-instance.halfwidth, instance.halfwidth)


def run_music(config, instance):
    """
    Plain MUSIC on the whole measurement, searching the instance support.

    Unless ``music.source_count`` is set, the baseline is told the true
    number of spectra; it falls back to rank estimation capped at that number
    when the Hankel matrix is too small to hold it.
    """
    measurement = _prepared(config, instance)
    samples = measurement.samples
    rows = samples.size // 2 + 1
    settings = music_config(config)
    settings = settings._replace(
        search_interval=settings.search_interval or _sweep(instance),
        noise_floor=sqrt(rows * (samples.size + 1 - rows)) *
        measurement.noise_level,
    )
    if settings.source_count is None:
        count = instance.spectrum.n
        if count < rows:
            settings = settings._replace(source_count=count)
        else:
            settings = settings._replace(max_sources=count)
    start = perf_counter()
    result = music(samples, measurement.step, settings)
    return EstimateReport(
        result.estimates, timings={"music": perf_counter() - start}
    )


def run_scan(config, instance):
    """
    SCAN-MUSIC over the instance support.
    """
    return scan_music(
        _prepared(config, instance), scan_config(config, _sweep(instance))
    )


def _clusters(config, instance, measurement, settings):
    if instance.centers is None:
        raise ConfigError(
            NEEDS_CLUSTERS.format(mode=config.mode), "spectrum.source"
        )
    size = config["spectrum.cluster_size"]
    if config["clusters.detect"]:
        centers = detect_centers(measurement, settings)
        counts = None
    else:
        centers = instance.centers
        counts = [size] * len(centers)
    return cluster_model(
        config, centers, instance.half_length, counts=counts,
        gap=(
            0.0 if config["clusters.detect"]
            else max(instance.gap - 1e-9, 0.0)
        ),
    )


def run_scanc(config, instance):
    """
    SCAN-MUSIC(C) with the generated (or detected) cluster centers.
    """
    measurement = _prepared(config, instance)
    settings = scan_config(config, _sweep(instance))
    clusters = _clusters(config, instance, measurement, settings)
    return scan_music_c(measurement, settings, clusters)


def run_detect(config, instance):
    """
    Cluster-center detection; the report holds the detected centers.
    """
    if instance.centers is None:
        raise ConfigError(
            NEEDS_CLUSTERS.format(mode=config.mode), "spectrum.source"
        )
    measurement = _prepared(config, instance)
    start = perf_counter()
    centers = detect_centers(
        measurement, scan_config(config, _sweep(instance))
    )
    return EstimateReport(
        centers, timings={"detect": perf_counter() - start}
    )


ALGORITHMS = {
    "music": run_music,
    "scan": run_scan,
    "scanc": run_scanc,
    "detect": run_detect,
}


def _truth(instance, algo):
    if algo == "detect":
        return DiscreteSpectrum(
            instance.centers, np.ones(len(instance.centers))
        )
    return instance.spectrum


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (float, np.floating)):
        return None if isnan(value) else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def _echo(config):
    return {key: config[key] for key in sorted(config)}


def run_trial(config, instance, algo, extra=None):
    """
    Run `algo` on `instance` and return ``(record, report)``; failures are
    logged and recorded instead of raised.
    """
    record = {
        "trial": instance.index,
        "seed": instance.seed,
        "algo": algo,
        "n": instance.spectrum.n,
        "R": instance.halfwidth,
        "sigma": instance.measurement.noise_level,
        "error": None,
    }
    record.update(extra or {})
    report = EstimateReport(())
    start = perf_counter()
    try:
        if algo != "synth":
            report = ALGORITHMS[algo](config, instance).scored(
                _truth(instance, algo), omega=config["measurement.omega"]
            )
    except ConfigError:
        raise
    except (ValueError, ArithmeticError, linalg.LinAlgError) as exc:
        log.error(TRIAL_FAILED, instance.index, algo, exc)
        record["error"] = str(exc)
    wall = perf_counter() - start
    record.update({
        "estimates": report.estimates,
        "matched_error": report.matched_error,
        "rms_error": report.rms_error,
        "missed": report.missed,
        "spurious": report.spurious,
        "timings": report.timings,
        "wall_s": wall,
        "parameters": _echo(config),
    })
    if record["error"] is None and algo != "synth":
        log.info(
            TRIAL_DONE, instance.index, algo, instance.spectrum.n,
            report.matched_count, report.missed, report.spurious, wall,
        )
    return _jsonable(record), report


def fit_scaling(timings):
    """
    Least-squares slope of ``log(seconds)`` against ``log(n)``.

    Parameters
    ----------
    timings : sequence of (int, float)
        source counts, strictly increasing, with their wall times
    """
    timings = list(timings)
    if len(timings) < 3:
        raise ValueError(TOO_FEW_POINTS.format(len(timings)))
    counts = np.array([n for n, _ in timings], dtype=float)
    seconds = np.array([t for _, t in timings], dtype=float)
    if np.any(np.diff(counts) <= 0):
        raise ValueError(NOT_INCREASING)
    if np.any(seconds <= 0):
        raise ValueError(NONPOSITIVE_TIME.format(
            seconds[seconds <= 0].tolist()
        ))
    slope, _ = np.polyfit(np.log(counts), np.log(seconds), 1)
    return float(slope)


def thread_count():
    """
    Trial concurrency from ``SPECSCAN_THREADS``; 0 (the default) runs trials
    sequentially.
    """
    text = os.environ.get(THREADS_ENV, "0")
    try:
        count = int(text)
    except ValueError:
        count = -1
    if count < 0:
        raise ConfigError(BAD_THREADS.format(THREADS_ENV, text), THREADS_ENV)
    return count


def _execute(tasks):
    threads = thread_count()
    if threads == 0:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(task) for task in tasks]
        return [future.result() for future in futures]


def _trial_tasks(config, algo, indices, extra=None):
    instances = [generate_instance(config, index) for index in indices]
    return [
        (lambda inst=inst: run_trial(config, inst, algo, extra) + (inst,))
        for inst in instances
    ]


def _bench_tasks(config):
    kind = config["bench.kind"]
    reps = config["run.repetitions"]
    tasks = []
    index = 0
    if kind == "range":
        for radius in config["bench.radii"]:
            variant = config.replace(
                spectrum__source="random", spectrum__radius=radius
            )
            for _ in range(reps):
                instance = generate_instance(variant, index)
                measurement = _prepared(variant, instance)
                settings = scan_config(variant, _sweep(instance))
                plan = settings.plan(measurement)
                k_half = measurement.n_half
                win_length = 2 * (k_half - plan.truncation) + 1
                factor = settings.subsample_factor
                if factor == AUTO:
                    factor = min(auto_subsample_factor(
                        win_length, plan.r_ess, settings.density_prior,
                        measurement.step,
                    ), win_length // 3)
                ratio = music_cost(
                    k_half, 2 * radius * config["music.grid_density"]
                ) / scan_cost(
                    k_half, 2 * radius, plan.r_tru, win_length, factor,
                    config["music.grid_density"],
                )
                for algo in ("music", "scan"):
                    tasks.append(
                        lambda v=variant, inst=instance, a=algo, r=ratio:
                        run_trial(v, inst, a, {"predicted_ratio": r}) +
                        (inst,)
                    )
                index += 1
    elif kind == "noise":
        for sigma in config["bench.sigmas"]:
            variant = config.replace(
                measurement__sigma=sigma, scan__gamma=min(sigma, 0.5)
            )
            tasks.extend(_trial_tasks(
                variant, "scan", range(index, index + reps)
            ))
            index += reps
    else:
        for count in config["bench.counts"]:
            size = config["spectrum.cluster_size"]
            variant = config.replace(
                spectrum__source="clustered",
                spectrum__clusters=max(1, count // size),
            )
            tasks.extend(_trial_tasks(
                variant, "scanc", range(index, index + reps)
            ))
            index += reps
    return tasks


def _write_records(output, records):
    with open(os.path.join(output, TRIALS_FILE), "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, allow_nan=False))
            f.write("\n")


def summarize(records):
    """
    One summary row per ``(n, R, sigma, algo)`` group of trial records.
    """
    groups = {}
    for record in records:
        key = (record["n"], record["R"], record["sigma"], record["algo"])
        groups.setdefault(key, []).append(record)
    rows = []
    for (n, radius, sigma, algo), members in groups.items():
        errors = [
            error for record in members if record["error"] is None
            for error in record["matched_error"] if error is not None
        ]

        def stat(func, values=errors):
            return float(func(values)) if values else float("nan")

        rows.append({
            "n": n, "R": radius, "sigma": sigma, "algo": algo,
            "mean_err": stat(np.mean), "median_err": stat(np.median),
            "max_err": stat(np.max),
            "missed": sum(record["missed"] for record in members),
            "spurious": sum(record["spurious"] for record in members),
            "mean_wall_s": float(np.mean([
                record["wall_s"] for record in members
            ])),
        })
    return rows


def _write_summary(output, records):
    path = os.path.join(output, SUMMARY_FILE)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_FIELDS)
        writer.writeheader()
        for row in summarize(records):
            writer.writerow(row)


def _write_scaling(output, records):
    walls = {}
    for record in records:
        if record["error"] is None:
            walls.setdefault(record["n"], []).append(record["wall_s"])
    points = sorted((n, float(np.mean(w))) for n, w in walls.items())
    if len(points) < 3:
        return None
    slope = fit_scaling(points)
    log.info(SCALING_FIT, slope, len(points))
    with open(os.path.join(output, SCALING_FILE), "w", encoding="utf-8") as f:
        json.dump({"slope": slope, "points": points}, f, sort_keys=True)
    return slope


def _run_checks(output):
    checks = run_checks()
    records = []
    for check in checks:
        status = "ok" if check.passed else "FAIL"
        print(CHECK_ROW.format(
            status=status, name=check.name, value=check.value,
            threshold=check.threshold,
        ))
        records.append(_jsonable(check._asdict()))
    with open(os.path.join(output, TRIALS_FILE), "w", encoding="utf-8") as f:
        for record in records:
            f.write(json.dumps(record, sort_keys=True, allow_nan=False))
            f.write("\n")
    return 0 if all(check.passed for check in checks) else 1


def _write_synth(output, outcomes):
    for _, _, instance in outcomes:
        dump_measurement(instance.measurement, os.path.join(
            output, "measurement_{:04d}.json".format(instance.index)
        ))
        dump_spectrum(instance.spectrum, os.path.join(
            output, "spectrum_{:04d}.txt".format(instance.index)
        ))


def run(config):
    """
    Execute the mode of `config` and write the result files.

    Returns
    -------
    int
        0 on success, 1 if any trial errored (or any check failed)
    """
    output = config["run.output"]
    os.makedirs(output, exist_ok=True)
    mode = config.mode
    if mode == "check":
        return _run_checks(output)
    if mode == "bench":
        tasks = _bench_tasks(config)
    else:
        tasks = _trial_tasks(
            config, mode, range(config["run.repetitions"])
        )
    outcomes = _execute(tasks)
    outcomes.sort(key=lambda outcome: outcome[0]["trial"])
    records = [record for record, _, _ in outcomes]
    _write_records(output, records)
    _write_summary(output, records)
    if mode == "synth":
        _write_synth(output, outcomes)
    if mode == "bench" and config["bench.kind"] == "clusters":
        _write_scaling(output, records)
    if config["run.archive"]:
        write_archive(os.path.join(output, ARCHIVE_FILE), [
            Trial(
                position, instance.spectrum, instance.measurement, report,
                {"trial": record["trial"], "algo": record["algo"]},
            )
            for position, (record, report, instance) in enumerate(outcomes)
        ])
    return 1 if any(record["error"] for record in records) else 0


__all__ = [
    "InfeasibleGeometryError", "Instance", "generate_instance",
    "random_spectrum", "clustered_spectrum", "check_feasibility",
    "run_music", "run_trial", "fit_scaling", "summarize", "run",
]
