# coding: utf-8
"""
Numerical evaluators for the error bounds behind SCAN-MUSIC.

Everything here measures a quantity directly (by quadrature or by summing the
defining series) and compares it with the closed-form bound, so the bounds can
be checked at desk scale with the ``check`` subcommand.
"""
from collections import namedtuple
from logging import getLogger
from math import ceil, exp, floor, log as ln, log10, pi, sqrt

import numpy as np
from scipy import integrate, optimize, signal, special

from ._utils import require_positive, require_unit_interval
from .annihilator import afsr, build_filter, compose
from .model import DiscreteSpectrum, exponential_sum, synthesize
from .windowing import (
    cgm, cutoff_profile, effective_cutoff, gaussian_window, make_plan,
    model_error_bound,
)

log = getLogger(__name__)

GAUSSIAN_CUTOFF = 1e-18

GAMMA_HYPOTHESIS = (
    "gamma={gamma} violates gamma / sqrt(-ln gamma) <= sqrt(pi) sigma / tv "
    "= {limit}; choose gamma in (0, {gamma_max}]."
)
NEEDS_NOISE = "Error measurement needs a positive noise level, got {}."
CHECK_RESULT = "%s: %s (value %s, threshold %s)"


def phi(x):
    """
    ``Phi(x) = integral of exp(-t**2) from -inf to x``, computed as
    ``sqrt(pi) / 2 * erfc(-x)``.
    """
    return sqrt(pi) / 2 * special.erfc(-np.asarray(x, dtype=float))


class ErrorBreakdown(namedtuple("ErrorBreakdown", [
    "e1", "e2", "e3", "e4", "bound_rhs",
])):
    """
    Measured windowing errors and their theoretical bound.

    ``e1`` is the discretization error of the Gaussian convolution, ``e2``
    the tail-truncation error of the sampled band, ``e3`` the window
    truncation error and ``e4`` the noise convolved with the window.
    """
    __slots__ = ()

    @property
    def total(self):
        """float: sum of the four measured errors"""
        return self.e1 + self.e2 + self.e3 + self.e4


def gaussian_convolution(xi, lam, omega):
    """
    ``(exp(i xi .) * G)(omega)`` by adaptive quadrature over the part of the
    line where the Gaussian exceeds `GAUSSIAN_CUTOFF`.
    """
    half = sqrt(ln(sqrt(lam / pi) / GAUSSIAN_CUTOFF) / lam)

    def kernel(zeta):
        return float(gaussian_window(lam, omega - zeta))

    low, high = omega - half, omega + half
    if xi == 0:
        real, _ = integrate.quad(kernel, low, high, epsabs=1e-14, limit=200)
        return complex(real, 0.0)
    real, _ = integrate.quad(
        kernel, low, high, weight="cos", wvar=xi, epsabs=1e-14, limit=200
    )
    imag, _ = integrate.quad(
        kernel, low, high, weight="sin", wvar=xi, epsabs=1e-14, limit=200
    )
    return complex(real, imag)


def discretization_bound_log10(lam, C, step, tv_norm):
    """
    ``log10(2 exp(lam C**2) tv / (exp(2 pi C / h) - 1))``, finite even when
    the exponent overflows.
    """
    require_positive("C", C)
    exponent = 2 * pi * C / step
    natural = (
        ln(2) + lam * C * C + ln(tv_norm) - exponent -
        np.log1p(-exp(-exponent))
    )
    return natural / ln(10)


def max_admissible_gamma(tv_norm, sigma):
    """
    Largest gamma with ``gamma / sqrt(-ln gamma) <= sqrt(pi) sigma / tv``.
    """
    limit = sqrt(pi) * sigma / tv_norm

    def excess(gamma):
        return gamma / sqrt(-ln(gamma)) - limit

    if excess(1 - 1e-12) <= 0:
        return 1.0
    return optimize.brentq(excess, 1e-300, 1 - 1e-12, xtol=1e-15)


def _centered_values(spectrum, mu, frequencies):
    return exponential_sum(spectrum.shifted(-mu), frequencies)


def _tail_count(lam, step):
    return int(ceil(sqrt(ln(sqrt(lam / pi) / GAUSSIAN_CUTOFF) / lam) / step))


def _discretization_error(spectrum, plan, omega_win, C, tv_norm):
    step, lam = plan.step, plan.lam
    reach = _tail_count(lam, step)
    shifted = spectrum.shifted(-plan.mu)
    worst = 0.0
    for omega in (0.0, omega_win / 2, -omega_win / 2, omega_win, -omega_win):
        base = int(round(omega / step))
        k = np.arange(base - reach, base + reach + 1)
        riemann = step * np.sum(
            exponential_sum(shifted, k * step) *
            gaussian_window(lam, omega - k * step)
        )
        continuous = sum(
            a * gaussian_convolution(y, lam, omega)
            for y, a in zip(shifted.positions, shifted.amplitudes)
        )
        worst = max(worst, abs(continuous - riemann))
    tail = tv_norm / sqrt(pi) * 2 * float(phi(-sqrt(lam) * reach * step))
    return worst + tail + 10 ** discretization_bound_log10(
        lam, C, step, tv_norm
    )


def _band_tail_error(spectrum, plan, n_half, omega_win):
    step, lam = plan.step, plan.lam
    reach = _tail_count(lam, step)
    limit = int(floor(omega_win / step + 1e-9))
    b = np.arange(-limit, limit + 1)
    worst = 0.0
    for side in (1, -1):
        k = side * np.arange(n_half + 1, n_half + 1 + reach + limit)
        values = _centered_values(spectrum, plan.mu, k * step)
        weights = step * gaussian_window(
            lam, step * (b[:, None] - k[None, :])
        )
        worst = max(worst, float(np.max(np.abs(weights @ values))))
    return worst


def _truncation_error(spectrum, plan, n_half):
    step, lam, truncation = plan.step, plan.lam, plan.truncation
    reach = max(_tail_count(lam, step), truncation + 1)
    offsets = np.arange(-reach, reach + 1)
    tail_weights = step * gaussian_window(lam, offsets * step)
    tail_weights[np.abs(offsets) <= truncation] = 0.0
    k = np.arange(-n_half - reach, n_half + reach + 1)
    values = _centered_values(spectrum, plan.mu, k * step)
    convolved = signal.fftconvolve(values, tail_weights, mode="valid")
    interior = convolved[truncation:convolved.size - truncation]
    return float(np.max(np.abs(interior)))


def measure_errors(spectrum, plan, measurement, C):
    """
    Measure the four windowing errors of `measurement` for `plan`.

    Parameters
    ----------
    spectrum : DiscreteSpectrum
        ground truth of `measurement`
    plan : WindowPlan
    measurement : SampledMeasurement
    C : float
        strip half-width of the discretization bound

    Returns
    -------
    ErrorBreakdown
    """
    require_positive("C", C)
    sigma = measurement.noise_level
    if not sigma > 0:
        raise ValueError(NEEDS_NOISE.format(sigma))
    tv_norm = spectrum.tv_norm
    limit = sqrt(pi) * sigma / tv_norm
    if plan.gamma / sqrt(-ln(plan.gamma)) > limit:
        raise ValueError(GAMMA_HYPOTHESIS.format(
            gamma=plan.gamma, limit=limit,
            gamma_max=max_admissible_gamma(tv_norm, sigma),
        ))
    omega_win = effective_cutoff(plan.lam, measurement.omega, tv_norm, sigma)
    n_half = measurement.n_half

    e1 = _discretization_error(spectrum, plan, omega_win, C, tv_norm)
    e2 = _band_tail_error(spectrum, plan, n_half, omega_win)
    e3 = _truncation_error(spectrum, plan, n_half)
    noise = measurement.samples - exponential_sum(
        spectrum, measurement.frequencies
    )
    e4 = float(np.max(np.abs(
        cgm(measurement.with_samples(noise), plan).samples
    )))
    bound = 10 ** discretization_bound_log10(
        plan.lam, C, plan.step, tv_norm
    ) + 3 * sigma
    return ErrorBreakdown(e1, e2, e3, e4, bound)


def windowing_deviation(spectrum, plan, measurement, omega_win=None):
    """
    Largest deviation of the mass-normalized windowed samples from the ideal
    damped exponential sum at frequencies ``|w| <= omega_win``.
    """
    if omega_win is None:
        omega_win = plan.omega_win
    windowed = cgm(measurement, plan)
    frequencies = windowed.frequencies
    shifted = spectrum.shifted(-plan.mu)
    ideal = exponential_sum(DiscreteSpectrum(
        shifted.positions,
        shifted.amplitudes * np.exp(-shifted.positions ** 2 / (4 * plan.lam)),
    ), frequencies)
    inside = np.abs(frequencies) <= omega_win
    return float(np.max(np.abs(
        windowed.samples[inside] / windowed.mass - ideal[inside]
    )))


def band_limitation_error(spectrum, lam, omega, mu, frequency):
    """
    Error of windowing band-limited data at `frequency`: the Gaussian
    convolution of the centralized signal restricted to ``|w| > omega``,
    by quadrature.
    """
    shifted = spectrum.shifted(-mu)
    total = 0j
    half = sqrt(ln(sqrt(lam / pi) / GAUSSIAN_CUTOFF) / lam)
    for y, a in zip(shifted.positions, shifted.amplitudes):
        for low, high in ((omega, frequency + half), (-frequency - half,
                                                      -omega)):
            if high <= low:
                continue
            real, _ = integrate.quad(
                lambda z: float(gaussian_window(lam, frequency - z)),
                low, high, weight="cos", wvar=y, epsabs=1e-16,
            )
            imag, _ = integrate.quad(
                lambda z: float(gaussian_window(lam, frequency - z)),
                low, high, weight="sin", wvar=y, epsabs=1e-16,
            )
            total += a * complex(real, imag)
    return abs(total)


def filtered_cluster_profile(spectrum, center, order, step, omega, x):
    """
    Magnitude at `x` of the band-limited image of a cluster after its
    annihilating filter, ``1 / (2 pi) * integral over [-omega, omega]`` of the
    filtered cluster signal times ``exp(-i x w)``, by quadrature.
    """
    total = 0j
    for y, a in zip(spectrum.positions, spectrum.amplitudes):
        gain = (1 - np.exp(1j * step * (center - y))) ** order
        real, _ = integrate.quad(
            lambda w: 1.0, 0.0, omega, weight="cos", wvar=y - x
        )
        total += a * gain * 2 * real
    return abs(total) / (2 * pi)


def sampling_bound(n, rho, tau=1.0):
    """
    Minimum K: ``max(n, ceil(n / (2 rho)))`` on the full band, and
    ``max(2 n, ceil(tau n / rho) + 1)`` after downsampling to ``tau``.
    """
    require_positive("n", n)
    require_positive("rho", rho)
    if not 0 < tau <= 1:
        raise ValueError("tau must lie in (0, 1], got {}.".format(tau))
    if tau == 1:
        return max(int(n), int(ceil(n / (2 * rho) - 1e-9)))
    return max(2 * int(n), int(ceil(tau * n / rho - 1e-9)) + 1)


def resolution_limit(omega_eff, snr, n):
    """
    Order-of-magnitude computational resolution limit
    ``pi / omega_eff * snr**(-1 / (2 n - 1))``.
    """
    require_positive("omega_eff", omega_eff)
    require_positive("snr", snr)
    require_positive("n", n)
    return pi / omega_eff * snr ** (-1 / (2 * n - 1))


def music_cost(n_half, grid_points):
    """
    Operation count of plain MUSIC: SVD plus imaging on the grid.
    """
    return float(n_half) ** 3 + grid_points * float(n_half) ** 2


def scan_cost(n_half, support, r_tru, win_length, factor, grid_density):
    """
    Operation count of SCAN-MUSIC: one windowing, SVD and local imaging per
    window.
    """
    windows = support / r_tru
    local = win_length / factor
    return windows * (
        local ** 3 + r_tru * grid_density * local ** 2 +
        n_half * log10(max(n_half, 2))
    )


def clustered_cost(n_half, clusters, max_count, r_tru, grid_density):
    """
    Operation count of SCAN-MUSIC(C).
    """
    return clusters * (
        n_half * log10(max(n_half, 2)) + max_count ** 3 +
        r_tru * grid_density * max_count ** 2
    )


Check = namedtuple("Check", "name passed value threshold")


def _check(name, value, threshold, passed=None):
    if passed is None:
        passed = bool(value <= threshold)
    log.debug(CHECK_RESULT, name, passed, value, threshold)
    return Check(name, bool(passed), float(value), float(threshold))


def standard_instance(sigma=1e-3, seed=0):
    """
    Spectrum, measurement and plan used by the bound checks: one unit spectrum
    at the origin, ``lam = 100``, ``h = 1e-3``, ``omega = 1``.
    """
    spectrum = DiscreteSpectrum([0.0], [1.0])
    measurement = synthesize(spectrum, 1.0, 1e-3, sigma, seed)
    plan = make_plan(
        100.0, 1e-3, gamma=1e-3, omega=1.0, tv_norm=spectrum.tv_norm,
        sigma=sigma,
    )
    return spectrum, measurement, plan


def run_checks():
    """
    Evaluate every bound check and return a list of `Check` records.
    """
    checks = []
    checks.append(_check(
        "phi total mass", abs(float(phi(10.0)) - sqrt(pi)), 1e-14
    ))

    worst = 0.0
    for xi in (0.0, 2.0, -3.5):
        for lam in (1.0, 10.0):
            for omega in (0.0, 0.7, -1.3):
                measured = gaussian_convolution(xi, lam, omega)
                ideal = exp(-xi * xi / (4 * lam)) * np.exp(1j * xi * omega)
                worst = max(worst, abs(measured - ideal))
    checks.append(_check("gaussian convolution identity", worst, 1e-10))

    margin = min(
        exp(-x * x) / (2 * x) - float(phi(-x))
        for x in (0.1, 0.5, 1.0, 2.0, 5.0)
    )
    checks.append(_check(
        "gaussian tail inequality", margin, 0.0, passed=margin > 0
    ))

    profile = cutoff_profile(170.0, 1.0, np.linspace(0.01, 0.99, 99))
    steps = np.diff(profile)
    checks.append(_check(
        "cutoff profile decreasing", float(np.max(steps)), 0.0,
        passed=bool(np.all(steps < 0)),
    ))

    spectrum, measurement, plan = standard_instance()
    epsilon = 0.3
    bound = model_error_bound(
        plan.lam, measurement.omega, epsilon, spectrum.tv_norm
    )
    grid = np.linspace(-(1 - epsilon), 1 - epsilon, 21) * measurement.omega
    measured = max(
        band_limitation_error(spectrum, plan.lam, measurement.omega, 0.0, w)
        for w in grid
    )
    checks.append(_check(
        "model error dominance", measured, bound * (1 + 1e-6)
    ))

    sigma = measurement.noise_level
    errors = measure_errors(spectrum, plan, measurement, 0.1)
    checks.append(_check("band tail error", errors.e2, sigma))
    checks.append(_check("window truncation error", errors.e3, sigma))
    checks.append(_check("noise convolution error", errors.e4, sigma))
    checks.append(_check(
        "discretization bound (log10)",
        discretization_bound_log10(plan.lam, 0.1, plan.step, 1.0), -270.0,
    ))
    checks.append(_check(
        "windowing deviation",
        windowing_deviation(spectrum, plan, measurement), 5 * sigma,
    ))

    tone = exponential_sum(
        DiscreteSpectrum([5.0], [1.0]), 0.01 * np.arange(64)
    )
    residual = np.max(np.abs(afsr(tone, 0.01, [5.0], [2])))
    checks.append(_check("tone annihilation", residual, 1e-12))
    composite = compose([
        build_filter(1.0, 2, 0.01), build_filter(-3.0, 3, 0.01)
    ])
    checks.append(_check(
        "filter l1 growth",
        float(np.sum(np.abs(composite.coefficients))), 2.0 ** 5 * (1 + 1e-12),
    ))

    formulas = (
        sampling_bound(100, 0.5) == 100 and
        sampling_bound(10, 0.1) == 50 and
        sampling_bound(10, 0.01, 0.05) == 51
    )
    checks.append(_check(
        "sampling bound formulas", 0.0 if formulas else 1.0, 0.0,
        passed=formulas,
    ))
    limit = resolution_limit(1.0, 100.0, 1)
    checks.append(_check(
        "resolution limit formula", abs(limit - pi / 100), 1e-15
    ))
    return checks


__all__ = [
    "phi", "ErrorBreakdown", "gaussian_convolution", "measure_errors",
    "windowing_deviation", "band_limitation_error",
    "filtered_cluster_profile", "sampling_bound", "resolution_limit",
    "discretization_bound_log10", "max_admissible_gamma", "music_cost",
    "scan_cost", "clustered_cost", "Check", "run_checks",
    "standard_instance",
]
