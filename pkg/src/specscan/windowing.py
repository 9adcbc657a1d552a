# coding: utf-8
"""
Centralization and Gaussian windowing of Fourier samples.

Windowing a centralized measurement with the normalized Gaussian of parameter
``lam`` damps a spectrum at distance ``d`` from the center by
``exp(-d**2 / (4 * lam))``, which localizes the estimation problem around
the center. This module computes the truncated discrete window, the trust and
essential regions derived from the damping profile, and the effective cutoff
frequency below which the band-limitation error stays under the noise level.
"""
from collections import namedtuple
from logging import getLogger
from math import ceil, exp, log as ln, pi, sqrt
from warnings import warn

import numpy as np
from scipy import optimize, signal

from ._utils import (
    frozen_array, require_positive, require_same_step, require_unit_interval,
    SpecScanWarning,
)

log = getLogger(__name__)

DEFAULT_FFT_THRESHOLD = 4096

WINDOW_TOO_WIDE = (
    "Truncation index {truncation} exceeds K={n_half}; the window is wider "
    "than the data."
)
BAD_LEVELS = (
    "Levels must satisfy 0 < essential_level < trust_level <= 1, got "
    "trust_level={trust} and essential_level={essential}."
)
BAD_LEVEL = "Level must lie in (0, 1], got {}."
NO_WINDOWING_LOSS = (
    "Noise level {sigma} is above the band-limitation error for every "
    "epsilon; the effective cutoff equals the full cutoff {omega}."
)
WINDOW_USELESS = (
    "Noise level {sigma} is below the band-limitation error for every "
    "epsilon; the effective cutoff is zero."
)
WINDOWED = "Windowed %s samples at center %s into %s samples."


def gaussian_window(lam, omega):
    """
    Normalized Gaussian ``sqrt(lam / pi) * exp(-lam * omega**2)``.
    """
    require_positive("lam", lam)
    return sqrt(lam / pi) * np.exp(-lam * np.square(omega))


def truncation_index(lam, gamma, step):
    """
    Smallest integer ``s`` with ``exp(-lam * (s * step)**2) <= gamma``.
    """
    require_positive("lam", lam)
    require_positive("step", step)
    require_unit_interval("gamma", gamma)
    index = int(ceil(sqrt(ln(1 / gamma) / lam) / step))
    while index > 0 and exp(-lam * ((index - 1) * step) ** 2) <= gamma:
        index -= 1
    while exp(-lam * (index * step) ** 2) > gamma:
        index += 1
    return index


def region_radius(lam, level):
    """
    Half-width ``sqrt(4 lam ln(1 / level))`` of the super-level set of the
    damping profile ``exp(-x**2 / (4 lam))``.
    """
    require_positive("lam", lam)
    if not 0 < level <= 1:
        raise ValueError(BAD_LEVEL.format(level))
    return sqrt(4 * lam * ln(1 / level))


def regions(lam, trust_level, essential_level):
    """
    Return the trust and essential radii ``(r_tru, r_ess)``.
    """
    if not 0 < essential_level < trust_level <= 1:
        raise ValueError(BAD_LEVELS.format(
            trust=trust_level, essential=essential_level
        ))
    return (
        region_radius(lam, trust_level), region_radius(lam, essential_level)
    )


class WindowPlan(namedtuple("WindowPlan", [
    "lam", "mu", "gamma", "trust_level", "essential_level", "step",
    "truncation", "r_tru", "r_ess", "omega_win",
])):
    """
    Parameters and derived quantities of one centralization and windowing
    pass. Build with `make_plan`.
    """
    __slots__ = ()

    def centered(self, mu):
        """
        Return the same plan centered at `mu`.
        """
        return self._replace(mu=float(mu))

    @property
    def weights(self):
        """ndarray: the truncated window ``h * G(j h)``, ``|j| <= Gamma``"""
        offsets = self.step * np.arange(
            -self.truncation, self.truncation + 1, dtype=float
        )
        return self.step * gaussian_window(self.lam, offsets)

    @property
    def mass(self):
        """float: window mass ``h * sum_j G(j h)``"""
        return float(np.sum(self.weights))


def make_plan(
    lam, step, gamma=1e-3, trust_level=0.95, essential_level=1e-3, mu=0.0,
    omega=None, tv_norm=None, sigma=None
):
    """
    Build a `WindowPlan`.

    The effective cutoff is computed when `omega`, `tv_norm` and a positive
    `sigma` are all given; otherwise it is `omega` itself (no windowing loss
    is accounted for).
    """
    require_positive("lam", lam)
    r_tru, r_ess = regions(lam, trust_level, essential_level)
    if omega is not None and tv_norm and sigma:
        omega_win = effective_cutoff(lam, omega, tv_norm, sigma)
    else:
        omega_win = omega
    return WindowPlan(
        lam=float(lam), mu=float(mu), gamma=float(gamma),
        trust_level=float(trust_level),
        essential_level=float(essential_level), step=float(step),
        truncation=truncation_index(lam, gamma, step), r_tru=r_tru,
        r_ess=r_ess, omega_win=omega_win,
    )


class WindowedMeasurement(namedtuple("WindowedMeasurement", [
    "samples", "step", "plan",
])):
    """
    Output of `cgm`: the interior part of the windowed samples.
    """
    __slots__ = ()

    @property
    def mass(self):
        """float: mass of the window which produced the samples"""
        return self.plan.mass

    @property
    def frequencies(self):
        """ndarray: frequencies of the windowed samples"""
        half = (self.samples.size - 1) / 2
        return self.step * (np.arange(self.samples.size) - half)


def cgm(measurement, plan, fft_threshold=DEFAULT_FFT_THRESHOLD):
    """
    Centralize `measurement` at ``plan.mu`` and convolve it with the
    truncated Gaussian window, keeping the ``2K - 2 Gamma + 1`` samples not
    touched by the boundary.

    Parameters
    ----------
    measurement : SampledMeasurement
    plan : WindowPlan
    fft_threshold : int
        measurements with more samples than this are convolved through the
        FFT, shorter ones directly

    Returns
    -------
    WindowedMeasurement
    """
    require_same_step(measurement.step, plan.step)
    if plan.truncation > measurement.n_half:
        raise ValueError(WINDOW_TOO_WIDE.format(
            truncation=plan.truncation, n_half=measurement.n_half
        ))
    centered = measurement.samples * np.exp(
        -1j * plan.mu * measurement.frequencies
    )
    weights = plan.weights
    if centered.size > fft_threshold:
        windowed = signal.fftconvolve(centered, weights, mode="valid")
    else:
        windowed = np.convolve(centered, weights, mode="valid")
    log.debug(WINDOWED, centered.size, plan.mu, windowed.size)
    return WindowedMeasurement(
        frozen_array(windowed, complex), measurement.step, plan
    )


def cutoff_profile(lam, omega, epsilon):
    """
    ``H(eps) = Phi(-sqrt(lam) eps omega) + Phi(sqrt(lam) (eps - 2) omega)``,
    the band-limitation error profile, decreasing in `epsilon`.
    """
    # pylint: disable=import-outside-toplevel
    from .diagnostics import phi
    root = sqrt(lam) * omega
    epsilon = np.asarray(epsilon, dtype=float)
    return phi(-root * epsilon) + phi(root * (epsilon - 2))


def effective_cutoff(lam, omega, tv_norm, sigma):
    """
    Effective cutoff frequency after windowing.

    Returns ``omega * (1 - eps)`` for the smallest ``eps`` at which the
    band-limitation error profile drops below ``sqrt(pi) sigma / tv_norm``.
    Unreachable thresholds are reported through `SpecScanWarning`: the full
    cutoff is returned when there is no loss, and zero when the window
    leaves nothing usable.
    """
    require_positive("lam", lam)
    require_positive("omega", omega)
    require_positive("tv_norm", tv_norm)
    require_positive("sigma", sigma)
    threshold = sqrt(pi) * sigma / tv_norm
    if threshold >= float(cutoff_profile(lam, omega, 0.0)):
        warn(NO_WINDOWING_LOSS.format(sigma=sigma, omega=omega),
             SpecScanWarning)
        return float(omega)
    if threshold <= float(cutoff_profile(lam, omega, 1.0)):
        warn(WINDOW_USELESS.format(sigma=sigma), SpecScanWarning)
        return 0.0
    root = optimize.bisect(
        lambda eps: float(cutoff_profile(lam, omega, eps)) - threshold,
        0.0, 1.0, xtol=1e-10,
    )
    epsilon = min(root + 2e-10, 1.0)
    return float(omega * (1 - epsilon))


def approximate_cutoff(lam, omega, tv_norm, sigma):
    """
    Rough effective cutoff from the Gaussian tail inequality.

    Solves ``exp(-x**2) / x = sqrt(pi) sigma / (2 tv_norm)`` with
    ``x = sqrt(lam) eps omega``; the result never exceeds
    `effective_cutoff`.
    """
    require_positive("lam", lam)
    require_positive("omega", omega)
    require_positive("tv_norm", tv_norm)
    require_positive("sigma", sigma)
    target = sqrt(pi) * sigma / (2 * tv_norm)

    def excess(x):
        return -x * x - ln(x) - ln(target)

    upper = 1.0
    while excess(upper) > 0:
        upper *= 2
    x = optimize.brentq(excess, 1e-300, upper, xtol=1e-12)
    epsilon = x / (sqrt(lam) * omega)
    return float(max(omega * (1 - epsilon), 0.0))


def model_error_bound(lam, omega, epsilon, tv_norm):
    """
    Bound on the band-limitation error for ``|w| <= (1 - epsilon) omega``:
    ``tv_norm / sqrt(pi) * H(epsilon)``.
    """
    require_unit_interval("epsilon", epsilon)
    return tv_norm / sqrt(pi) * float(cutoff_profile(lam, omega, epsilon))


__all__ = [
    "gaussian_window", "truncation_index", "region_radius", "regions",
    "WindowPlan", "make_plan", "WindowedMeasurement", "cgm",
    "cutoff_profile", "effective_cutoff", "approximate_cutoff",
    "model_error_bound",
]
