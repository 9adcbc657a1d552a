# coding: utf-8
"""
Ground-truth spectra, synthesis of band-limited noisy Fourier samples and
scoring of position estimates.
"""
from collections import namedtuple
import json
from logging import getLogger
from math import pi

import numpy as np
from scipy import linalg

from ._utils import (
    array_tuple_eq, frozen_array, require_positive,
)

log = getLogger(__name__)

NOISE_KINDS = ("disk", "clipped-gaussian")

NOT_INCREASING = "Spectrum positions must be strictly increasing."
ZERO_AMPLITUDE = "Spectrum amplitudes must all be nonzero."
EMPTY_SPECTRUM = "A spectrum needs at least one component."
LENGTH_MISMATCH = "Got {} positions but {} amplitudes."
NYQUIST_VIOLATION = (
    "Sampling step {step} violates the Nyquist criterion for support radius "
    "{radius}; the maximum admissible step is {max_step}."
)
NOT_INTEGER_RATIO = "Cutoff {omega} is not an integer multiple of step {step}."
BAD_SAMPLE_COUNT = "Expected {expected} samples for K={n_half}, got {got}."
UNKNOWN_NOISE = "Unknown noise kind {}, expected one of {}."
SUPPORT_TOO_SMALL = (
    "Support half-width {halfwidth} does not cover the spectrum radius "
    "{radius}."
)
SYNTHESIZED = "Synthesized %s samples of %s spectra with noise level %s."


class DiscreteSpectrum(namedtuple("DiscreteSpectrum", "positions amplitudes")):
    """
    Discrete measure given by point positions and complex amplitudes.

    Parameters
    ----------
    positions : array_like of float
        strictly increasing positions in the spectral domain
    amplitudes : array_like of complex
        nonzero amplitudes, one per position
    """
    __slots__ = ()

    def __new__(cls, positions, amplitudes):
        positions = frozen_array(positions, float)
        amplitudes = frozen_array(amplitudes, complex)
        if positions.size != amplitudes.size:
            raise ValueError(LENGTH_MISMATCH.format(
                positions.size, amplitudes.size
            ))
        if positions.size == 0:
            raise ValueError(EMPTY_SPECTRUM)
        if np.any(np.diff(positions) <= 0):
            raise ValueError(NOT_INCREASING)
        if np.any(amplitudes == 0):
            raise ValueError(ZERO_AMPLITUDE)
        return super().__new__(cls, positions, amplitudes)

    __eq__ = array_tuple_eq
    __hash__ = None

    @property
    def n(self):
        """int: number of spectra"""
        return self.positions.size

    @property
    def m_min(self):
        """float: smallest amplitude magnitude"""
        return float(np.min(np.abs(self.amplitudes)))

    @property
    def d_min(self):
        """float: minimum separation, infinite for a single spectrum"""
        if self.n == 1:
            return float("inf")
        return float(np.min(np.diff(self.positions)))

    @property
    def tv_norm(self):
        """float: total variation norm, the sum of amplitude magnitudes"""
        return float(np.sum(np.abs(self.amplitudes)))

    @property
    def support_radius(self):
        """float: largest distance of a spectrum from the origin"""
        return float(np.max(np.abs(self.positions)))

    def shifted(self, offset):
        """
        Return the spectrum translated by `offset`.
        """
        return DiscreteSpectrum(self.positions + offset, self.amplitudes)

    def superpose(self, other):
        """
        Return the sum of two measures, merging coincident positions and
        dropping components which cancel.
        """
        positions = np.concatenate([self.positions, other.positions])
        amplitudes = np.concatenate([self.amplitudes, other.amplitudes])
        unique, inverse = np.unique(positions, return_inverse=True)
        summed = np.zeros(unique.size, dtype=complex)
        np.add.at(summed, inverse, amplitudes)
        keep = summed != 0
        return DiscreteSpectrum(unique[keep], summed[keep])


class SampledMeasurement(namedtuple("SampledMeasurement", [
    "samples", "omega", "step", "noise_level", "seed",
])):
    """
    Uniform Fourier samples on [-omega, omega] with spacing `step`.

    Sample ``k`` holds the value at frequency ``(k - K) * step`` where
    ``K = round(omega / step)``.
    """
    __slots__ = ()

    def __new__(cls, samples, omega, step, noise_level=0.0, seed=0):
        require_positive("omega", omega)
        require_positive("step", step)
        samples = frozen_array(samples, complex)
        n_half = half_count(omega, step)
        if samples.size != 2 * n_half + 1:
            raise ValueError(BAD_SAMPLE_COUNT.format(
                expected=2 * n_half + 1, n_half=n_half, got=samples.size
            ))
        return super().__new__(
            cls, samples, float(omega), float(step), float(noise_level),
            int(seed)
        )

    __eq__ = array_tuple_eq
    __hash__ = None

    @property
    def n_half(self):
        """int: K, the number of samples on each side of zero frequency"""
        return (self.samples.size - 1) // 2

    @property
    def frequencies(self):
        """ndarray: the frequencies at which the samples were taken"""
        return sample_frequencies(self.step, self.n_half)

    def with_samples(self, samples, omega=None):
        """
        Return a copy carrying different samples (and optionally a different
        cutoff).
        """
        return SampledMeasurement(
            samples, self.omega if omega is None else omega, self.step,
            self.noise_level, self.seed,
        )


class EstimateReport(namedtuple("EstimateReport", [
    "estimates", "matched_error", "rms_error", "missed", "spurious",
    "timings",
])):
    """
    Position estimates together with their quality against a ground truth.

    ``matched_error`` holds one entry per true spectrum, NaN where the
    spectrum was missed. Reports fresh from an estimator have not been
    scored yet and carry an empty ``matched_error``.
    """
    __slots__ = ()

    def __new__(
        cls, estimates, matched_error=(), rms_error=float("nan"), missed=0,
        spurious=0, timings=None
    ):
        return super().__new__(
            cls, frozen_array(estimates, float),
            frozen_array(matched_error, float), float(rms_error), int(missed),
            int(spurious), dict(timings or {}),
        )

    __eq__ = array_tuple_eq
    __hash__ = None

    @property
    def matched_count(self):
        """int: number of true spectra with a matching estimate"""
        return int(np.count_nonzero(~np.isnan(self.matched_error)))

    @property
    def max_error(self):
        """float: largest matched error, NaN if nothing matched"""
        if self.matched_count == 0:
            return float("nan")
        return float(np.nanmax(self.matched_error))

    @property
    def median_error(self):
        """float: median matched error, NaN if nothing matched"""
        if self.matched_count == 0:
            return float("nan")
        return float(np.nanmedian(self.matched_error))

    def scored(self, truth, omega=1.0, radius=None):
        """
        Return this report scored against `truth`, keeping the timings.
        """
        return match_and_score(
            truth, self.estimates, omega=omega, radius=radius,
            timings=self.timings,
        )


def half_count(omega, step):
    """
    Return K = omega / step, rejecting ratios which are not integers.
    """
    ratio = omega / step
    n_half = int(round(ratio))
    if n_half < 1 or abs(ratio - n_half) > 1e-6 * max(1.0, ratio):
        raise ValueError(NOT_INTEGER_RATIO.format(omega=omega, step=step))
    return n_half


def sample_frequencies(step, n_half):
    """
    Return the frequencies ``k * step`` for ``k = -n_half .. n_half``.
    """
    return step * np.arange(-n_half, n_half + 1, dtype=float)


def exponential_sum(spectrum, frequencies):
    """
    Evaluate ``sum_j a_j exp(i y_j w)`` at each frequency ``w``.
    """
    frequencies = np.asarray(frequencies, dtype=float)
    return np.exp(
        1j * np.outer(frequencies, spectrum.positions)
    ) @ spectrum.amplitudes


def draw_noise(size, noise_level, seed, kind="disk"):
    """
    Draw bounded complex noise with magnitude strictly below `noise_level`.

    The generator is PCG64 seeded with `seed`, so the draw is identical on
    every platform.

    Parameters
    ----------
    size : int
        number of noise values
    noise_level : float
        strict upper bound on the magnitude
    seed : int
        seed of the generator
    kind : str
        ``"disk"`` draws the radius uniformly in ``[0, noise_level)`` and the
        phase uniformly; ``"clipped-gaussian"`` draws a complex normal with
        scale ``noise_level / 3`` and clips its magnitude below the bound.
    """
    if kind not in NOISE_KINDS:
        raise ValueError(UNKNOWN_NOISE.format(kind, NOISE_KINDS))
    rng = np.random.Generator(np.random.PCG64(seed))
    if kind == "disk":
        radius = noise_level * rng.random(size)
        angle = 2 * pi * rng.random(size)
        noise = radius * np.exp(1j * angle)
    else:
        noise = (noise_level / 3) * (
            rng.standard_normal(size) + 1j * rng.standard_normal(size)
        ) / np.sqrt(2)
        magnitude = np.abs(noise)
        ceiling = np.nextafter(noise_level, 0)
        clip = magnitude >= noise_level
        noise[clip] *= ceiling / magnitude[clip]
    if noise_level == 0:
        return np.zeros(size, dtype=complex)
    return noise


def synthesize(
    spectrum, omega, step, noise_level=0.0, seed=0, noise="disk"
):
    """
    Sample the Fourier transform of `spectrum` on [-omega, omega].

    Parameters
    ----------
    spectrum : DiscreteSpectrum
    omega : float
        cutoff frequency
    step : float
        sampling step, at most ``pi / R`` for support radius ``R``
    noise_level : float
        strict bound on the magnitude of the additive noise
    seed : int
        seed of the noise generator
    noise : str
        noise kind, see `draw_noise`

    Returns
    -------
    SampledMeasurement
    """
    require_positive("omega", omega)
    require_positive("step", step)
    if noise_level < 0:
        raise ValueError("noise_level must be nonnegative.")
    radius = spectrum.support_radius
    if radius > 0 and step > pi / radius * (1 + 1e-12):
        raise ValueError(NYQUIST_VIOLATION.format(
            step=step, radius=radius, max_step=pi / radius
        ))
    n_half = half_count(omega, step)
    clean = exponential_sum(spectrum, sample_frequencies(step, n_half))
    samples = clean + draw_noise(clean.size, noise_level, seed, noise)
    log.debug(SYNTHESIZED, clean.size, spectrum.n, noise_level)
    return SampledMeasurement(samples, omega, step, noise_level, seed)


def density(spectrum, support_halfwidth, omega):
    """
    Return the average number of spectra per Rayleigh length,
    ``n / (2 R) * pi / omega``.
    """
    require_positive("support_halfwidth", support_halfwidth)
    require_positive("omega", omega)
    if support_halfwidth < spectrum.support_radius:
        raise ValueError(SUPPORT_TOO_SMALL.format(
            halfwidth=support_halfwidth, radius=spectrum.support_radius
        ))
    return spectrum.n / (2 * support_halfwidth) * pi / omega


def match_and_score(truth, estimates, omega=1.0, radius=None, timings=None):
    """
    Match estimates to true positions and compute the reconstruction error.

    Each true position, in increasing order, takes the nearest estimate not
    yet used; the pair counts as matched when closer than `radius`, which
    defaults to ``pi / (2 omega)``.

    Returns
    -------
    EstimateReport
    """
    if radius is None:
        radius = pi / (2 * omega)
    estimates = np.unique(np.asarray(estimates, dtype=float))
    used = np.zeros(estimates.size, dtype=bool)
    errors = np.full(truth.n, np.nan)
    for index, position in enumerate(truth.positions):
        distance = np.where(used, np.inf, np.abs(estimates - position))
        if distance.size == 0:
            break
        nearest = int(np.argmin(distance))
        if distance[nearest] < radius:
            used[nearest] = True
            errors[index] = distance[nearest]
    matched = ~np.isnan(errors)
    if matched.any():
        rms_error = float(np.sqrt(np.mean(errors[matched] ** 2)))
    else:
        rms_error = float("nan")
    return EstimateReport(
        estimates, errors, rms_error,
        missed=int(truth.n - np.count_nonzero(matched)),
        spurious=int(estimates.size - np.count_nonzero(matched)),
        timings=timings,
    )


def estimate_amplitudes(measurement, positions):
    """
    Least-squares amplitudes for the given positions.
    """
    positions = np.asarray(positions, dtype=float)
    if positions.size == 0:
        return np.zeros(0, dtype=complex)
    design = np.exp(1j * np.outer(measurement.frequencies, positions))
    amplitudes, _, _, _ = linalg.lstsq(design, measurement.samples)
    return amplitudes


def load_spectrum(path):
    """
    Read a spectrum from a text file of ``y re(a) im(a)`` lines, ignoring
    ``#`` comments.
    """
    table = np.loadtxt(path, comments="#", ndmin=2)
    if table.shape[1] != 3:
        raise ValueError(
            "Spectrum file {} must have three columns, found {}.".format(
                path, table.shape[1]
            )
        )
    order = np.argsort(table[:, 0])
    table = table[order]
    return DiscreteSpectrum(table[:, 0], table[:, 1] + 1j * table[:, 2])


def dump_spectrum(spectrum, path):
    """
    Write `spectrum` in the format read by `load_spectrum`.
    """
    table = np.column_stack([
        spectrum.positions, spectrum.amplitudes.real, spectrum.amplitudes.imag
    ])
    np.savetxt(path, table, fmt="%.17g", header="y re(a) im(a)")


def dump_measurement(measurement, path):
    """
    Write `measurement` as JSON with samples stored as ``[re, im]`` pairs.
    """
    record = {
        "omega": measurement.omega,
        "step": measurement.step,
        "sigma": measurement.noise_level,
        "seed": measurement.seed,
        "samples": [[value.real, value.imag] for value in (
            complex(sample) for sample in measurement.samples
        )],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(record, f, sort_keys=True)


def load_measurement(path):
    """
    Read a measurement written by `dump_measurement`.
    """
    with open(path, encoding="utf-8") as f:
        record = json.load(f)
    pairs = np.asarray(record["samples"], dtype=float).reshape(-1, 2)
    return SampledMeasurement(
        pairs[:, 0] + 1j * pairs[:, 1], record["omega"], record["step"],
        record["sigma"], record["seed"],
    )


__all__ = [
    "DiscreteSpectrum", "SampledMeasurement", "EstimateReport",
    "synthesize", "density", "match_and_score",
    "estimate_amplitudes", "load_spectrum", "dump_spectrum",
    "dump_measurement", "load_measurement", "exponential_sum",
]
