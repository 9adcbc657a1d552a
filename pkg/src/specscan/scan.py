# coding: utf-8
"""
SCAN-MUSIC: sweep a window center over the spectral interval, window and
subsample the data around each center, and run MUSIC on the short windowed
sequence.
"""
from collections import namedtuple
from logging import getLogger
from math import ceil, floor, pi, sqrt
from warnings import warn

import numpy as np

from ._utils import require_positive, SpecScanWarning, stage_timer
from .model import EstimateReport
from .subspace import MusicConfig, music
from .windowing import DEFAULT_FFT_THRESHOLD, cgm, make_plan

log = getLogger(__name__)

AUTO = "auto"

BAD_SWEEP = "Sweep interval {} must satisfy R1 < R2."
BAD_FACTOR = "Subsample factor must be a positive integer or 'auto', got {}."
TOO_FEW_SURVIVORS = (
    "Subsampling {count} samples by {factor} leaves {left}, fewer than 3."
)
BAD_TAU = "tau must lie in (0, 1], got {}."
TAU_TOO_SMALL = "tau={tau} keeps {count} samples, fewer than 3."
NARROW_SWEEP = (
    "Sweep interval {sweep} is narrower than one trust cell of width "
    "{width}; using a single center at {center}."
)
WINDOW_DONE = "Window at %s kept %s of %s estimates (%s)."
MERGED = "Merged %s estimates into %s."


class ScanConfig(namedtuple("ScanConfig", [
    "lam", "gamma", "trust_level", "essential_level", "sweep_interval",
    "subsample_factor", "density_prior", "music", "merge_radius",
    "detection_lam", "fft_threshold",
])):
    """
    Options of `scan_music`.

    Parameters
    ----------
    lam : float
        Gaussian window parameter
    gamma : float
        truncation level of the window
    trust_level, essential_level : float
        damping levels bounding the trust and essential regions
    sweep_interval : (float, float) or None
        interval ``[R1, R2)`` reconstructed; the unaliased band by default
    subsample_factor : int or "auto"
    density_prior : float or None
        expected number of spectra per Rayleigh length
    music : MusicConfig
    merge_radius : float or None
        estimates from different windows closer than this are merged;
        ``pi / (8 omega)`` by default
    detection_lam : float or None
        window parameter used for cluster-center detection, `lam` by default
    fft_threshold : int
    """
    __slots__ = ()

    def __new__(
        cls, lam, gamma=1e-3, trust_level=0.95, essential_level=1e-3,
        sweep_interval=None, subsample_factor=AUTO, density_prior=None,
        music=None, merge_radius=None, detection_lam=None,
        fft_threshold=DEFAULT_FFT_THRESHOLD
    ):
        # pylint: disable=redefined-outer-name
        require_positive("lam", lam)
        if sweep_interval is not None:
            sweep_interval = tuple(float(x) for x in sweep_interval)
            if not sweep_interval[0] < sweep_interval[1]:
                raise ValueError(BAD_SWEEP.format(sweep_interval))
        if subsample_factor != AUTO and (
            int(subsample_factor) != subsample_factor or subsample_factor < 1
        ):
            raise ValueError(BAD_FACTOR.format(subsample_factor))
        return super().__new__(
            cls, float(lam), gamma, trust_level, essential_level,
            sweep_interval, subsample_factor, density_prior,
            music or MusicConfig(), merge_radius, detection_lam,
            fft_threshold,
        )

    def plan(self, measurement, lam=None, tv_norm=None):
        """
        `WindowPlan` for `measurement`, centered at zero.
        """
        return make_plan(
            self.lam if lam is None else lam, measurement.step,
            gamma=self.gamma, trust_level=self.trust_level,
            essential_level=self.essential_level, omega=measurement.omega,
            tv_norm=tv_norm, sigma=measurement.noise_level,
        )


def sub1(samples, step, factor):
    """
    Keep every `factor`-th sample starting with the first, ``m // factor``
    samples in total.

    Returns
    -------
    (ndarray, float)
        the kept samples and the new step
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError(BAD_FACTOR.format(factor))
    samples = np.asarray(samples)
    count = samples.size // factor
    if count < 3:
        raise ValueError(TOO_FEW_SURVIVORS.format(
            count=samples.size, factor=factor, left=count
        ))
    return samples[::factor][:count], step * factor


def auto_subsample_factor(win_length, r_ess, rho, step):
    """
    ``max(1, floor(min(win_length / (4 r_ess rho), pi / (r_ess step))))``.

    Without a density prior (`rho` is None) only the aliasing limit
    ``pi / (r_ess step)`` applies.
    """
    require_positive("r_ess", r_ess)
    require_positive("step", step)
    limit = pi / (r_ess * step)
    if rho is not None:
        require_positive("rho", rho)
        limit = min(limit, win_length / (4 * r_ess * rho))
    return max(1, int(floor(limit)))


def center_grid(sweep_interval, r_tru):
    """
    Window centers ``R1 + R_tru + 2 R_tru m`` whose half-open trust cells
    tile the sweep interval.
    """
    low, high = sweep_interval
    width = 2 * r_tru
    if high - low < width:
        center = (low + high) / 2
        warn(NARROW_SWEEP.format(
            sweep=sweep_interval, width=width, center=center
        ), SpecScanWarning)
        return np.array([center])
    count = int(ceil((high - low) / width - 1e-12))
    return low + r_tru + width * np.arange(count)


def merge_estimates(positions, windows, radius):
    """
    Collapse neighbouring estimates closer than `radius` that come from
    different windows into their mean.

    Parameters
    ----------
    positions : array_like of float
    windows : array_like of int
        index of the window which produced each estimate
    radius : float
    """
    positions = np.asarray(positions, dtype=float)
    windows = np.asarray(windows)
    order = np.argsort(positions, kind="stable")
    positions, windows = positions[order], windows[order]
    merged = []
    index = 0
    while index < positions.size:
        if (
            index + 1 < positions.size and
            windows[index] != windows[index + 1] and
            positions[index + 1] - positions[index] < radius
        ):
            merged.append((positions[index] + positions[index + 1]) / 2)
            index += 2
        else:
            merged.append(positions[index])
            index += 1
    log.debug(MERGED, positions.size, len(merged))
    return np.unique(np.asarray(merged, dtype=float))


def windowed_noise_floor(measurement, plan, rows, columns, gain=1.0):
    """
    Spectral-norm bound for the Hankel matrix of windowed (and filtered)
    noise: ``sqrt(rows * columns) * sigma * mass * gain``.
    """
    return (
        sqrt(rows * columns) * measurement.noise_level * plan.mass * gain
    )


def resolve_sweep(config, measurement):
    """
    Sweep interval of `config`, the unaliased band when unset.
    """
    if config.sweep_interval is not None:
        return config.sweep_interval
    return (-pi / measurement.step, pi / measurement.step)


def scan_music(measurement, config):
    """
    Reconstruct the spectra in the sweep interval with SCAN-MUSIC.

    Every window searches its trust region and keeps the estimates in its own
    half-open trust cell, so each spectrum is reported by one window.

    Parameters
    ----------
    measurement : SampledMeasurement
    config : ScanConfig

    Returns
    -------
    EstimateReport
        estimates with per-stage timings, not yet scored
    """
    timings = {}
    plan = config.plan(measurement)
    sweep = resolve_sweep(config, measurement)
    centers = center_grid(sweep, plan.r_tru)
    merge_radius = config.merge_radius
    if merge_radius is None:
        merge_radius = pi / (8 * measurement.omega)

    positions, windows = [], []
    for window, mu in enumerate(centers):
        with stage_timer(timings, "cgm"):
            windowed = cgm(
                measurement, plan.centered(mu), config.fft_threshold
            )
        with stage_timer(timings, "subsample"):
            factor = config.subsample_factor
            if factor == AUTO:
                factor = auto_subsample_factor(
                    windowed.samples.size, plan.r_ess, config.density_prior,
                    measurement.step,
                )
                factor = min(factor, windowed.samples.size // 3)
            samples, step = sub1(windowed.samples, measurement.step, factor)
        with stage_timer(timings, "music"):
            rows = samples.size // 2 + 1
            music_config = config.music._replace(
                search_interval=(-plan.r_tru, plan.r_tru),
                noise_floor=windowed_noise_floor(
                    measurement, plan, rows, samples.size + 1 - rows
                ),
            )
            if config.density_prior is not None and (
                music_config.source_count is None
            ):
                music_config = music_config._replace(
                    max_sources=int(ceil(
                        2 * plan.r_ess * config.density_prior
                    )) + 2
                )
            result = music(samples, step, music_config)
        local = result.estimates + mu
        cell_low = max(mu - plan.r_tru, sweep[0])
        cell_high = min(mu + plan.r_tru, sweep[1])
        keep = local[(local >= cell_low) & (local < cell_high)]
        log.debug(WINDOW_DONE, mu, keep.size, local.size, result.status)
        positions.extend(keep)
        windows.extend([window] * keep.size)

    with stage_timer(timings, "merge"):
        estimates = merge_estimates(positions, windows, merge_radius)
    return EstimateReport(estimates, timings=timings)


def downsample_tau(measurement, tau):
    """
    Restrict `measurement` to the sub-band ``|w| <= tau * omega``.
    """
    if not 0 < tau <= 1:
        raise ValueError(BAD_TAU.format(tau))
    n_half = int(floor(tau * measurement.n_half + 1e-9))
    if n_half < 1:
        raise ValueError(TAU_TOO_SMALL.format(tau=tau, count=2 * n_half + 1))
    middle = measurement.n_half
    return measurement.with_samples(
        measurement.samples[middle - n_half:middle + n_half + 1],
        omega=n_half * measurement.step,
    )


__all__ = [
    "ScanConfig", "AUTO", "sub1", "auto_subsample_factor", "center_grid",
    "merge_estimates", "scan_music", "downsample_tau",
]
