import pytest

from math import pi, sqrt

import numpy as np

from specscan import (
    DiscreteSpectrum, EstimateReport, SampledMeasurement, density,
    match_and_score, synthesize,
)
from specscan.model import (
    NYQUIST_VIOLATION, draw_noise, dump_measurement, dump_spectrum,
    estimate_amplitudes, exponential_sum, half_count, load_measurement,
    load_spectrum,
)


class TestDiscreteSpectrum(object):
    def test_summaries(self, mixed_spectrum):
        assert mixed_spectrum.n == 3
        assert mixed_spectrum.m_min == 0.5
        assert mixed_spectrum.d_min == 1.5
        assert mixed_spectrum.tv_norm == pytest.approx(3.5)
        assert mixed_spectrum.support_radius == 3.0

    def test_single_separation_is_infinite(self, unit_spectrum):
        assert unit_spectrum.d_min == float("inf")

    def test_length_mismatch(self):
        with pytest.raises(ValueError) as excinfo:
            DiscreteSpectrum([0.0, 1.0], [1.0])
        assert "Got 2 positions but 1 amplitudes." == str(excinfo.value)

    def test_not_increasing(self):
        with pytest.raises(ValueError) as excinfo:
            DiscreteSpectrum([1.0, 1.0], [1.0, 1.0])
        assert (
            "Spectrum positions must be strictly increasing." ==
            str(excinfo.value)
        )

    def test_zero_amplitude(self):
        with pytest.raises(ValueError) as excinfo:
            DiscreteSpectrum([0.0, 1.0], [1.0, 0.0])
        assert (
            "Spectrum amplitudes must all be nonzero." == str(excinfo.value)
        )

    def test_empty(self):
        with pytest.raises(ValueError) as excinfo:
            DiscreteSpectrum([], [])
        assert (
            "A spectrum needs at least one component." == str(excinfo.value)
        )

    def test_immutable(self, triple_spectrum):
        with pytest.raises(ValueError):
            triple_spectrum.positions[0] = 5.0

    def test_shifted(self, triple_spectrum):
        shifted = triple_spectrum.shifted(10.0)
        assert np.allclose(shifted.positions, [8.5, 10.0, 12.0])
        assert np.array_equal(shifted.amplitudes, triple_spectrum.amplitudes)

    def test_superpose_cancels(self):
        first = DiscreteSpectrum([0.0, 1.0], [1.0, 1.0])
        second = DiscreteSpectrum([1.0, 2.0], [-1.0, 3.0])
        assert first.superpose(second) == DiscreteSpectrum(
            [0.0, 2.0], [1.0, 3.0]
        )

    def test_equality(self, triple_spectrum):
        assert triple_spectrum == DiscreteSpectrum(
            [-1.5, 0.0, 2.0], [1.0, 1.0, 1.0]
        )
        assert not triple_spectrum == DiscreteSpectrum(
            [-1.5, 0.0, 2.0], [1.0, 1.0, 2.0]
        )


class TestSynthesize(object):
    def test_sample_count(self, unit_spectrum):
        measurement = synthesize(unit_spectrum, 1.0, 0.1)
        assert measurement.n_half == 10
        assert measurement.samples.size == 21
        assert np.allclose(measurement.frequencies, np.linspace(-1, 1, 21))

    def test_noiseless_tone(self):
        spectrum = DiscreteSpectrum([3.0], [2.0 - 1.0j])
        measurement = synthesize(spectrum, 1.0, 0.1)
        expected = (2.0 - 1.0j) * np.exp(3j * measurement.frequencies)
        assert np.allclose(measurement.samples, expected, atol=1e-14)

    def test_matches_exponential_sum(self, mixed_spectrum):
        measurement = synthesize(mixed_spectrum, 2.0, 0.25)
        assert np.allclose(
            measurement.samples,
            exponential_sum(mixed_spectrum, measurement.frequencies),
        )

    def test_linear_in_spectrum(self, mixed_spectrum, triple_spectrum):
        both = synthesize(mixed_spectrum.superpose(triple_spectrum), 1.0, 0.01)
        first = synthesize(mixed_spectrum, 1.0, 0.01)
        second = synthesize(triple_spectrum, 1.0, 0.01)
        assert np.max(np.abs(
            both.samples - first.samples - second.samples
        )) < 1e-12

    def test_shift_modulates_samples(self, mixed_spectrum):
        base = synthesize(mixed_spectrum, 1.0, 0.01)
        moved = synthesize(mixed_spectrum.shifted(5.0), 1.0, 0.01)
        modulated = base.samples * np.exp(5j * base.frequencies)
        assert np.max(np.abs(moved.samples - modulated)) < 1e-12

    def test_noise_strictly_bounded(self, unit_spectrum):
        measurement = synthesize(unit_spectrum, 1.0, 1e-3, 0.1, seed=4)
        clean = synthesize(unit_spectrum, 1.0, 1e-3)
        assert np.max(np.abs(measurement.samples - clean.samples)) < 0.1

    def test_same_seed_same_samples(self, triple_spectrum):
        first = synthesize(triple_spectrum, 1.0, 0.01, 1e-2, seed=7)
        second = synthesize(triple_spectrum, 1.0, 0.01, 1e-2, seed=7)
        third = synthesize(triple_spectrum, 1.0, 0.01, 1e-2, seed=8)
        assert first == second
        assert not first == third

    def test_nyquist(self):
        spectrum = DiscreteSpectrum([-10.0, 10.0], [1.0, 1.0])
        with pytest.raises(ValueError) as excinfo:
            synthesize(spectrum, 1.0, 0.5)
        assert NYQUIST_VIOLATION.format(
            step=0.5, radius=10.0, max_step=pi / 10.0
        ) == str(excinfo.value)

    def test_nyquist_boundary_is_admissible(self):
        spectrum = DiscreteSpectrum([pi], [1.0])
        measurement = synthesize(spectrum, 10.0, 1.0)
        assert measurement.n_half == 10

    def test_not_integer_ratio(self, unit_spectrum):
        with pytest.raises(ValueError) as excinfo:
            synthesize(unit_spectrum, 1.0, 0.3)
        assert (
            "Cutoff 1.0 is not an integer multiple of step 0.3." ==
            str(excinfo.value)
        )

    def test_negative_noise(self, unit_spectrum):
        with pytest.raises(ValueError):
            synthesize(unit_spectrum, 1.0, 0.1, -1.0)


class TestNoise(object):
    @pytest.mark.parametrize("kind", ["disk", "clipped-gaussian"])
    def test_bounded(self, kind):
        noise = draw_noise(10000, 1e-2, 3, kind)
        assert np.all(np.abs(noise) < 1e-2)

    @pytest.mark.parametrize("kind", ["disk", "clipped-gaussian"])
    def test_reproducible(self, kind):
        assert np.array_equal(
            draw_noise(100, 1.0, 11, kind), draw_noise(100, 1.0, 11, kind)
        )

    def test_zero_level(self):
        assert np.array_equal(draw_noise(5, 0.0, 0), np.zeros(5))

    def test_unknown_kind(self):
        with pytest.raises(ValueError) as excinfo:
            draw_noise(5, 1.0, 0, "pink")
        assert (
            "Unknown noise kind pink, expected one of ('disk', "
            "'clipped-gaussian')." == str(excinfo.value)
        )


class TestSampledMeasurement(object):
    def test_bad_sample_count(self):
        with pytest.raises(ValueError) as excinfo:
            SampledMeasurement(np.ones(3), 1.0, 0.1)
        assert (
            "Expected 21 samples for K=10, got 3." == str(excinfo.value)
        )

    def test_with_samples(self, clean_triple):
        zeros = clean_triple.with_samples(np.zeros(201))
        assert zeros.step == clean_triple.step
        assert zeros.seed == clean_triple.seed
        assert not np.any(zeros.samples)

    def test_half_count(self):
        assert half_count(1.0, 1e-3) == 1000
        assert half_count(2.0, 0.25) == 8


def test_density():
    spectrum = DiscreteSpectrum(np.arange(10.0), np.ones(10))
    assert density(spectrum, 100.0, 1.0) == pytest.approx(pi / 20)


def test_density_support_too_small(triple_spectrum):
    with pytest.raises(ValueError) as excinfo:
        density(triple_spectrum, 1.0, 1.0)
    assert (
        "Support half-width 1.0 does not cover the spectrum radius 2.0." ==
        str(excinfo.value)
    )


class TestMatchAndScore(object):
    def test_matched_and_spurious(self):
        truth = DiscreteSpectrum([0.0, 10.0], [1.0, 1.0])
        report = match_and_score(truth, [0.1, 10.05, 30.0])
        assert np.allclose(report.matched_error, [0.1, 0.05])
        assert report.rms_error == pytest.approx(sqrt((0.01 + 0.0025) / 2))
        assert report.missed == 0
        assert report.spurious == 1
        assert report.matched_count == 2
        assert report.max_error == pytest.approx(0.1)

    def test_nothing_matched(self):
        truth = DiscreteSpectrum([0.0, 10.0], [1.0, 1.0])
        report = match_and_score(truth, [5.0])
        assert np.all(np.isnan(report.matched_error))
        assert np.isnan(report.rms_error)
        assert np.isnan(report.max_error)
        assert report.missed == 2
        assert report.spurious == 1

    def test_no_estimates(self, triple_spectrum):
        report = match_and_score(triple_spectrum, [])
        assert report.missed == 3
        assert report.spurious == 0

    def test_greedy_in_position_order(self):
        truth = DiscreteSpectrum([0.0, 0.5], [1.0, 1.0])
        report = match_and_score(truth, [0.3])
        assert report.matched_error[0] == pytest.approx(0.3)
        assert np.isnan(report.matched_error[1])
        assert report.missed == 1
        assert report.spurious == 0

    def test_radius_scales_with_cutoff(self, unit_spectrum):
        assert match_and_score(unit_spectrum, [1.0], omega=1.0).missed == 0
        assert match_and_score(unit_spectrum, [1.0], omega=2.0).missed == 1

    def test_scored_keeps_timings(self, triple_spectrum):
        report = EstimateReport([-1.5, 0.0, 2.0], timings={"music": 0.5})
        scored = report.scored(triple_spectrum)
        assert scored.timings == {"music": 0.5}
        assert scored.missed == 0
        assert scored.rms_error == 0.0


def test_estimate_amplitudes(mixed_spectrum):
    measurement = synthesize(mixed_spectrum, 2.0, 0.25)
    amplitudes = estimate_amplitudes(measurement, mixed_spectrum.positions)
    assert np.allclose(amplitudes, mixed_spectrum.amplitudes)


def test_spectrum_file(tmpdir, mixed_spectrum):
    path = str(tmpdir.join("spectrum.txt"))
    dump_spectrum(mixed_spectrum, path)
    assert load_spectrum(path) == mixed_spectrum


def test_spectrum_file_sorts_positions(tmpdir):
    path = tmpdir.join("spectrum.txt")
    path.write("# y re im\n2.0 1.0 0.0\n-1.0 0.0 1.0\n")
    spectrum = load_spectrum(str(path))
    assert np.array_equal(spectrum.positions, [-1.0, 2.0])
    assert np.array_equal(spectrum.amplitudes, [1j, 1.0])


def test_measurement_file(tmpdir, triple_spectrum):
    measurement = synthesize(triple_spectrum, 1.0, 0.01, 1e-2, seed=3)
    path = str(tmpdir.join("measurement.json"))
    dump_measurement(measurement, path)
    assert load_measurement(path) == measurement
