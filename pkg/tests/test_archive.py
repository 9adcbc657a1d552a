import pytest

import numpy as np

from specscan import DiscreteSpectrum, EstimateReport, synthesize
from specscan.archive import (
    Trial, read_archive, trial_registry, write_archive,
)


class Point(object):
    def __init__(self, x):
        self.x = x


def point_registry(registry):
    @registry.dumper(Point, "point", version=1)
    def _point_dumper_v1(point):
        return {"x": point.x}

    @registry.dumper(Point, "point", version=2)
    def _point_dumper_v2(point):
        return {"coordinates": np.array([point.x])}

    @registry.loader("point", version=1)
    def _point_loader_v1(members):
        return Point(float(members["x"]))

    @registry.loader("point", version=2)
    def _point_loader_v2(members):
        return Point(float(members["coordinates"][0]))

    return registry


class TestRegistry(object):
    def test_name(self, empty_registry):
        assert empty_registry.name == "empty registry"

    def test_frozen_dumper(self, frozen_empty_registry):
        with pytest.raises(RuntimeError) as excinfo:
            frozen_empty_registry.dumper(Point, "point", version=1)
        assert "Registry empty registry is frozen." == str(excinfo.value)

    def test_frozen_loader(self, frozen_empty_registry):
        with pytest.raises(RuntimeError) as excinfo:
            frozen_empty_registry.loader("point", version=1)
        assert "Registry empty registry is frozen." == str(excinfo.value)

    def test_not_dumpable(self, empty_registry, h5py_file):
        with pytest.raises(TypeError) as excinfo:
            empty_registry.dump(h5py_file, "point", Point(1.0))
        assert str(excinfo.value).endswith(
            "is not something that can be archived."
        )

    def test_newest_version(self, empty_registry, h5py_file):
        registry = point_registry(empty_registry)
        group = registry.dump(h5py_file, "point", Point(2.5))
        assert group.attrs["_specscan_version"] == 2
        assert "coordinates" in group
        assert registry.load(group).x == 2.5

    def test_old_version(self, empty_registry, h5py_file):
        registry = point_registry(empty_registry)
        group = registry.dump(h5py_file, "point", Point(2.5), version=1)
        assert "x" in group
        assert registry.load(group).x == 2.5

    def test_missing_version(self, empty_registry, h5py_file):
        registry = point_registry(empty_registry)
        with pytest.raises(RuntimeError) as excinfo:
            registry.dump(h5py_file, "point", Point(2.5), version=3)
        assert str(excinfo.value).endswith("does not have version 3.")

    def test_unknown_label(self, empty_registry, h5py_file):
        group = h5py_file.create_group("point")
        group.attrs["_specscan_label"] = "point"
        group.attrs["_specscan_version"] = 1
        with pytest.raises(RuntimeError) as excinfo:
            empty_registry.load(group)
        assert "Unknown archive label point." == str(excinfo.value)

    def test_no_suitable_loader(self, empty_registry, h5py_file):
        registry = point_registry(empty_registry)
        group = registry.dump(h5py_file, "point", Point(2.5))
        group.attrs["_specscan_version"] = 7
        with pytest.raises(RuntimeError) as excinfo:
            registry.load(group)
        assert (
            "No loader for label point with version 7." == str(excinfo.value)
        )

    def test_not_loadable(self, empty_registry, h5py_file):
        group = h5py_file.create_group("plain")
        with pytest.raises(TypeError) as excinfo:
            empty_registry.load(group)
        assert "/plain carries no archive label." == str(excinfo.value)

    def test_unsupported_member(self, empty_registry, h5py_file):
        @empty_registry.dumper(Point, "point", version=1)
        def _point_dumper(point):
            return {"x": [point.x]}

        with pytest.raises(TypeError) as excinfo:
            empty_registry.dump(h5py_file, "point", Point(1.0))
        assert (
            "Member x of type <class 'list'> cannot be written." ==
            str(excinfo.value)
        )


class TestTrialArchive(object):
    def test_roundtrip(self, tmpdir, mixed_spectrum):
        measurement = synthesize(mixed_spectrum, 1.0, 0.05, 1e-2, seed=4)
        report = EstimateReport(
            [-1.01, 0.5, 3.02], timings={"music": 0.25}
        ).scored(mixed_spectrum)
        trials = [
            Trial(1, mixed_spectrum, measurement, report,
                  {"algo": "music", "sweep": [-5.0, 5.0]}),
            Trial(0, mixed_spectrum, measurement, EstimateReport(()), {}),
        ]
        path = str(tmpdir.join("trials.h5"))
        write_archive(path, trials)
        first, second = read_archive(path)
        assert first.index == 0
        assert first.parameters == {}
        assert first.report.estimates.size == 0
        assert second.truth == mixed_spectrum
        assert second.measurement == measurement
        assert second.report == report
        assert second.parameters == {"algo": "music", "sweep": [-5.0, 5.0]}

    def test_registry_is_frozen(self):
        with pytest.raises(RuntimeError):
            trial_registry.loader("spectrum", version=2)

    def test_spectrum_only(self, h5py_file):
        spectrum = DiscreteSpectrum([1.0, 2.0], [1.0, 1j])
        group = trial_registry.dump(h5py_file, "truth", spectrum)
        assert group.attrs["_specscan_label"] == "spectrum"
        assert trial_registry.load(group) == spectrum
