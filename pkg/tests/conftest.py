# coding: utf-8
import pytest

import numpy as np
import h5py

from specscan import DiscreteSpectrum, synthesize
from specscan.archive import Registry
from specscan.config import ExperimentConfig
from specscan.windowing import make_plan


### Spectra ###
@pytest.fixture
def unit_spectrum():
    return DiscreteSpectrum([0.0], [1.0])


@pytest.fixture
def triple_spectrum():
    return DiscreteSpectrum([-1.5, 0.0, 2.0], [1.0, 1.0, 1.0])


@pytest.fixture
def wide_spectrum():
    return DiscreteSpectrum([-12.0, -11.0, 3.0, 4.0], np.ones(4))


@pytest.fixture
def mixed_spectrum():
    return DiscreteSpectrum([-1.0, 0.5, 3.0], [2.0, -1j, 0.5])


### Measurements ###
@pytest.fixture
def clean_triple(triple_spectrum):
    return synthesize(triple_spectrum, 1.0, 0.01)


@pytest.fixture
def noisy_wide(wide_spectrum):
    return synthesize(wide_spectrum, 1.0, 1e-3, noise_level=1e-3, seed=1)


@pytest.fixture
def standard_plan():
    return make_plan(
        100.0, 1e-3, gamma=1e-3, omega=1.0, tv_norm=1.0, sigma=1e-3
    )


### Archives ###
@pytest.fixture
def h5py_file(tmpdir):
    f = h5py.File(str(tmpdir.join("test.h5")), "w")
    yield f
    f.close()


@pytest.fixture
def empty_registry():
    return Registry("empty registry")


@pytest.fixture
def frozen_empty_registry(empty_registry):
    registry = empty_registry
    registry.freeze()
    return registry


### Configurations ###
@pytest.fixture
def quick_config(tmpdir):
    """
    Small random instances which run in well under a second.
    """
    return ExperimentConfig({
        "run.output": str(tmpdir.join("out")),
        "spectrum.radius": 30.0,
        "spectrum.min_separation": 5.0,
        "spectrum.max_separation": 8.0,
        "measurement.sigma": 1e-3,
        "measurement.step": 1e-2,
    })


@pytest.fixture
def cluster_config(tmpdir):
    return ExperimentConfig({
        "run.output": str(tmpdir.join("out")),
        "run.mode": "scanc",
        "spectrum.source": "clustered",
        "spectrum.clusters": 3,
        "spectrum.cluster_size": 2,
        "spectrum.intra_separation": 1.0,
        "measurement.sigma": 1e-3,
        "measurement.step": 1e-3,
        "scan.lambda": 70.0,
        "scan.trust_level": 0.9,
        "scan.subsample_factor": 60,
        "scan.sweep": "-40, 40",
    })
