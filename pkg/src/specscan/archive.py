# coding: utf-8
"""
HDF5 archives of benchmark trials.

Every archived object becomes an HDF5 group tagged with a label and a version;
a `Registry` maps Python types to versioned dumpers and labels to loaders, so
files written by older releases stay readable while the layout evolves.
"""
from collections import defaultdict, namedtuple
import json
from logging import getLogger

import h5py
import numpy as np

from ._utils import (
    DumperMap, SPECSCAN_ATTR_LABEL, SPECSCAN_ATTR_VERSION,
)
from .model import DiscreteSpectrum, EstimateReport, SampledMeasurement

log = getLogger(__name__)

FORMAT_VERSION = 1

NOT_DUMPABLE = "{} is not something that can be archived."
NO_VERSION = "{} does not have version {}."
FROZEN = "Registry {} is frozen."
UNKNOWN_LABEL = "Unknown archive label {}."
NO_SUITABLE_LOADER = "No loader for label {} with version {}."
NOT_LOADABLE = "{} carries no archive label."
UNSUPPORTED_MEMBER = "Member {} of type {} cannot be written."
TRIALS_WRITTEN = "Wrote %s trials to %s."

Trial = namedtuple("Trial", "index truth measurement report parameters")


class Registry:
    """
    Versioned dumpers and loaders for the archive.

    Parameters
    ----------
    name : string
        name of registry for identification purposes
    """
    def __init__(self, name):
        self._name = name
        self._frozen = False
        self.dumpers = defaultdict(dict)
        self.loaders = defaultdict(dict)

    @property
    def name(self):
        """str: name of the registry"""
        return self._name

    def freeze(self):
        """
        Freeze the registry, preventing further changes to the registry.
        """
        self._frozen = True

    def _check_frozen(self):
        if self._frozen:
            raise RuntimeError(FROZEN.format(self._name))

    def dumper(self, cls, label, version):
        """
        Decorator registering a dumper for `cls`.

        The dumper returns a dict of members: arrays and scalars become
        datasets, dicts become attributes of a plain subgroup and registered
        objects become tagged subgroups.
        """
        self._check_frozen()

        def add_dumper(new_dumper):
            # pylint: disable=missing-docstring
            self.dumpers[cls][version] = DumperMap(
                label=label, func=new_dumper
            )
            return new_dumper
        return add_dumper

    def loader(self, label, version):
        """
        Decorator registering a loader for `label` at `version`; the loader
        receives the dict of loaded members.
        """
        self._check_frozen()

        def add_loader(new_loader):
            # pylint: disable=missing-docstring
            self.loaders[label][version] = new_loader
            return new_loader
        return add_loader

    def dump(self, h5py_group, key, obj, version=None):
        """
        Write `obj` as the tagged subgroup `key` of `h5py_group`, using the
        newest dumper unless `version` is given.
        """
        dumpers = self.dumpers.get(type(obj))
        if not dumpers:
            raise TypeError(NOT_DUMPABLE.format(type(obj)))
        if version is None:
            version = max(dumpers)
        try:
            label, func = dumpers[version]
        except KeyError:
            # pylint: disable=raise-missing-from
            raise RuntimeError(NO_VERSION.format(type(obj), version))
        group = h5py_group.create_group(key)
        group.attrs[SPECSCAN_ATTR_LABEL] = label
        group.attrs[SPECSCAN_ATTR_VERSION] = version
        for name, member in func(obj).items():
            self._write_member(group, name, member)
        return group

    def _write_member(self, group, name, member):
        if member is None:
            return
        if type(member) in self.dumpers:
            self.dump(group, name, member)
        elif isinstance(member, dict):
            sub = group.create_group(name)
            for attr, value in member.items():
                sub.attrs[attr] = value
        elif isinstance(member, (np.ndarray, np.number, int, float, complex)):
            group[name] = member
        else:
            raise TypeError(UNSUPPORTED_MEMBER.format(name, type(member)))

    def load(self, h5py_obj):
        """
        Rebuild the object stored in the tagged group `h5py_obj`.
        """
        label = h5py_obj.attrs.get(SPECSCAN_ATTR_LABEL)
        if label is None:
            raise TypeError(NOT_LOADABLE.format(h5py_obj.name))
        if isinstance(label, bytes):
            label = label.decode("utf-8")
        version = int(h5py_obj.attrs[SPECSCAN_ATTR_VERSION])
        if label not in self.loaders:
            raise RuntimeError(UNKNOWN_LABEL.format(label))
        loaders = self.loaders[label]
        if version not in loaders:
            raise RuntimeError(NO_SUITABLE_LOADER.format(label, version))
        members = {}
        for name, item in h5py_obj.items():
            if isinstance(item, h5py.Dataset):
                members[name] = item[()]
            elif SPECSCAN_ATTR_LABEL in item.attrs:
                members[name] = self.load(item)
            else:
                members[name] = dict(item.attrs)
        return loaders[version](members)


trial_registry = Registry("specscan: trials")


@trial_registry.dumper(DiscreteSpectrum, "spectrum", version=1)
def _spectrum_dumper(spectrum):
    # pylint: disable=missing-docstring
    return {
        "positions": np.asarray(spectrum.positions),
        "amplitudes": np.asarray(spectrum.amplitudes),
    }


@trial_registry.loader("spectrum", version=1)
def _spectrum_loader(members):
    # pylint: disable=missing-docstring
    return DiscreteSpectrum(members["positions"], members["amplitudes"])


@trial_registry.dumper(SampledMeasurement, "measurement", version=1)
def _measurement_dumper(measurement):
    # pylint: disable=missing-docstring
    return {
        "samples": np.asarray(measurement.samples),
        "omega": measurement.omega,
        "step": measurement.step,
        "noise_level": measurement.noise_level,
        "seed": measurement.seed,
    }


@trial_registry.loader("measurement", version=1)
def _measurement_loader(members):
    # pylint: disable=missing-docstring
    return SampledMeasurement(
        members["samples"], float(members["omega"]), float(members["step"]),
        float(members["noise_level"]), int(members["seed"]),
    )


@trial_registry.dumper(EstimateReport, "report", version=1)
def _report_dumper(report):
    # pylint: disable=missing-docstring
    return {
        "estimates": np.asarray(report.estimates),
        "matched_error": np.asarray(report.matched_error),
        "rms_error": report.rms_error,
        "missed": report.missed,
        "spurious": report.spurious,
        "timings": dict(report.timings),
    }


@trial_registry.loader("report", version=1)
def _report_loader(members):
    # pylint: disable=missing-docstring
    return EstimateReport(
        members["estimates"], members["matched_error"],
        float(members["rms_error"]), int(members["missed"]),
        int(members["spurious"]),
        {key: float(value) for key, value in members["timings"].items()},
    )


@trial_registry.dumper(Trial, "trial", version=1)
def _trial_dumper(trial):
    # pylint: disable=missing-docstring
    return {
        "index": trial.index,
        "truth": trial.truth,
        "measurement": trial.measurement,
        "report": trial.report,
        "parameters": {
            key: json.dumps(value, sort_keys=True)
            for key, value in trial.parameters.items()
        },
    }


@trial_registry.loader("trial", version=1)
def _trial_loader(members):
    # pylint: disable=missing-docstring
    return Trial(
        int(members["index"]), members.get("truth"),
        members.get("measurement"), members.get("report"),
        {
            key: json.loads(value)
            for key, value in members.get("parameters", {}).items()
        },
    )


trial_registry.freeze()


def write_archive(path, trials, registry=trial_registry):
    """
    Write `trials` to the HDF5 file at `path`, one group per trial.
    """
    trials = sorted(trials, key=lambda trial: trial.index)
    with h5py.File(path, "w") as h5py_file:
        h5py_file.attrs["format_version"] = FORMAT_VERSION
        for trial in trials:
            registry.dump(h5py_file, "trial_{:06d}".format(trial.index), trial)
    log.debug(TRIALS_WRITTEN, len(trials), path)


def read_archive(path, registry=trial_registry):
    """
    Read every trial of the archive at `path`, ordered by index.
    """
    with h5py.File(path, "r") as h5py_file:
        trials = [registry.load(h5py_file[key]) for key in h5py_file]
    return sorted(trials, key=lambda trial: trial.index)


__all__ = [
    "Registry", "Trial", "trial_registry", "write_archive", "read_archive",
]
