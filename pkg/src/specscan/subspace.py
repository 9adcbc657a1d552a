# coding: utf-8
"""
MUSIC on uniformly sampled exponential sums.

The samples are arranged in a Hankel matrix whose left singular vectors split
into a signal and a noise subspace; spectra sit where the steering vector is
(nearly) orthogonal to the noise subspace.
"""
from collections import namedtuple
from logging import getLogger
from math import ceil

import numpy as np
from scipy import linalg, signal

from ._utils import frozen_array, require_positive

log = getLogger(__name__)

SINGULAR_FLOOR = 1e-14
GRID_CHUNK = 4096
REFINEMENT_STEPS = 3

STATUS_OK = "ok"
STATUS_NO_SIGNAL = "no signal"
STATUS_NO_RANK = "rank zero"

TOO_FEW_SAMPLES = "Need at least 3 samples to build a Hankel matrix, got {}."
DEGENERATE_SUBSPACE = (
    "Source count {count} leaves no noise subspace for a Hankel matrix with "
    "{rows} rows."
)
BAD_GRID_DENSITY = "grid_density must be at least 1, got {}."
BAD_PEAK_FLOOR = "peak_floor must lie in (0, 1), got {}."
BAD_INTERVAL = "Search interval {} is empty."
RANK_ESTIMATED = "Estimated %s sources from %s singular values."


class MusicConfig(namedtuple("MusicConfig", [
    "source_count", "sv_ratio_threshold", "grid_density", "search_interval",
    "peak_floor", "max_sources", "noise_floor",
])):
    """
    Options of `music`.

    Parameters
    ----------
    source_count : int or None
        number of spectra when known; the rank rule is used otherwise
    sv_ratio_threshold : float or None
        singular values at least this fraction of the largest count as signal;
        ``None`` selects a threshold from the noise floor of the spectrum
    grid_density : int
        test points per unit interval
    search_interval : (float, float) or None
        half-open interval searched for spectra, the unaliased band
        ``[-pi / step, pi / step)`` by default
    peak_floor : float
        local maxima below the largest one raised to this power are
        discarded; the functional is at least 1 and unbounded on noiseless
        data, so the floor is taken on a logarithmic scale
    max_sources : int or None
        cap on the estimated rank
    noise_floor : float
        singular values at or below this absolute level never count as signal
    """
    __slots__ = ()

    def __new__(
        cls, source_count=None, sv_ratio_threshold=None, grid_density=100,
        search_interval=None, peak_floor=0.5, max_sources=None,
        noise_floor=0.0
    ):
        if grid_density < 1:
            raise ValueError(BAD_GRID_DENSITY.format(grid_density))
        if not 0 < peak_floor < 1:
            raise ValueError(BAD_PEAK_FLOOR.format(peak_floor))
        if search_interval is not None:
            search_interval = tuple(float(x) for x in search_interval)
            if not search_interval[0] < search_interval[1]:
                raise ValueError(BAD_INTERVAL.format(search_interval))
        return super().__new__(
            cls, source_count, sv_ratio_threshold, grid_density,
            search_interval, peak_floor, max_sources, noise_floor,
        )


MusicResult = namedtuple("MusicResult", [
    "estimates", "singular_values", "functional", "grid", "status",
])


def hankel(samples):
    """
    Hankel matrix ``H[r, c] = samples[r + c]`` with ``ceil((m + 1) / 2)``
    rows.
    """
    samples = np.asarray(samples)
    if samples.size < 3:
        raise ValueError(TOO_FEW_SAMPLES.format(samples.size))
    rows = samples.size // 2 + 1
    return linalg.hankel(samples[:rows], samples[rows - 1:])


def estimate_rank(singular_values, ratio):
    """
    Number of singular values at least `ratio` times the largest one.
    """
    singular_values = np.asarray(singular_values, dtype=float)
    if singular_values.size == 0 or singular_values[0] <= 0:
        return 0
    return int(np.count_nonzero(
        singular_values >= ratio * singular_values[0]
    ))


def default_ratio(singular_values):
    """
    ``max(10 * noise / s_1, 1e-6)`` with the noise estimated as the median
    of the trailing half of the singular values.
    """
    trailing = singular_values[singular_values.size // 2:]
    noise = float(np.median(trailing)) if trailing.size else 0.0
    return max(10 * noise / singular_values[0], 1e-6)


def _signal_rank(singular_values, rows, config):
    if config.source_count is not None:
        if config.source_count >= rows:
            raise ValueError(DEGENERATE_SUBSPACE.format(
                count=config.source_count, rows=rows
            ))
        return config.source_count
    ratio = config.sv_ratio_threshold
    if ratio is None:
        ratio = default_ratio(singular_values)
    if ratio >= 1:
        rank = 0
    else:
        rank = estimate_rank(singular_values, ratio)
    rank = min(
        rank, int(np.count_nonzero(singular_values > config.noise_floor))
    )
    if config.max_sources is not None:
        rank = min(rank, config.max_sources)
    rank = min(rank, rows - 1)
    log.debug(RANK_ESTIMATED, rank, singular_values.size)
    return rank


def imaging_functional(basis, rank, step, positions):
    """
    ``J(x) = |phi(x)| / |(I - P) phi(x)|`` for the steering vectors
    ``phi(x)_r = exp(i x r step)``, where `basis` holds the left singular
    vectors and its first `rank` columns span the signal subspace.
    """
    rows = basis.shape[0]
    use_signal = rank <= rows - rank
    subspace = basis[:, :rank] if use_signal else basis[:, rank:]
    exponents = step * np.arange(rows)
    values = np.empty(positions.size)
    for start in range(0, positions.size, GRID_CHUNK):
        chunk = positions[start:start + GRID_CHUNK]
        steering = np.exp(1j * np.outer(exponents, chunk))
        energy = np.sum(
            np.abs(subspace.conj().T @ steering) ** 2, axis=0
        )
        residual = rows - energy if use_signal else energy
        values[start:start + GRID_CHUNK] = np.sqrt(
            rows / np.maximum(residual, np.finfo(float).tiny)
        )
    return values


def _refine(basis, rank, step, position, spacing):
    delta = spacing
    value = None
    for _ in range(REFINEMENT_STEPS):
        delta /= 3
        candidates = position + delta * np.array([-1.0, 0.0, 1.0])
        values = imaging_functional(basis, rank, step, candidates)
        best = int(np.argmax(values))
        position, value = candidates[best], values[best]
    return position, value


def music(samples, step, config=None):
    """
    Estimate spectrum positions from uniform samples with MUSIC.

    Parameters
    ----------
    samples : array_like of complex
    step : float
        spacing of the samples
    config : MusicConfig

    Returns
    -------
    MusicResult
    """
    require_positive("step", step)
    if config is None:
        config = MusicConfig()
    matrix = hankel(samples)
    rows = matrix.shape[0]
    basis, singular_values, _ = linalg.svd(matrix, full_matrices=True)
    singular_values = frozen_array(singular_values, float)
    empty = frozen_array([], float)
    if singular_values[0] < SINGULAR_FLOOR:
        return MusicResult(empty, singular_values, empty, empty,
                           STATUS_NO_SIGNAL)
    rank = _signal_rank(singular_values, rows, config)
    if rank == 0:
        return MusicResult(empty, singular_values, empty, empty,
                           STATUS_NO_RANK)

    low, high = config.search_interval or (-np.pi / step, np.pi / step)
    spacing = 1 / config.grid_density
    count = int(ceil((high - low) / spacing))
    grid = low + spacing * np.arange(-1, count + 1)
    functional = imaging_functional(basis, rank, step, grid)

    peaks, _ = signal.find_peaks(functional)
    refined = [_refine(basis, rank, step, grid[i], spacing) for i in peaks]
    refined = [(x, value) for x, value in refined if low <= x < high]
    if refined:
        floor = max(value for _, value in refined) ** config.peak_floor
        refined = [(x, value) for x, value in refined if value >= floor]
        refined.sort(key=lambda pair: pair[1], reverse=True)
        refined = refined[:rank]
    estimates = frozen_array(sorted(x for x, _ in refined), float)
    return MusicResult(
        estimates, singular_values, frozen_array(functional, float),
        frozen_array(grid, float), STATUS_OK,
    )


__all__ = [
    "MusicConfig", "MusicResult", "hankel", "estimate_rank", "music",
    "imaging_functional",
]
