# coding: utf-8
"""
specscan reconstructs line spectra from band-limited noisy Fourier samples
with SCAN-MUSIC: Gaussian windowing localizes the problem around a sweep of
centers so that MUSIC only ever sees short sequences.

:license: 3-clause BSD
"""
from logging import getLogger

from ._utils import SpecScanWarning
from .model import (
    DiscreteSpectrum, SampledMeasurement, EstimateReport, synthesize,
    density, match_and_score,
)
from .windowing import WindowPlan, make_plan, cgm, effective_cutoff
from .subspace import MusicConfig, music
from .scan import ScanConfig, scan_music, downsample_tau
from .annihilator import build_filter, afsr
from .clustered import ClusterModel, scan_music_c, detect_centers

__all__ = [
    "SpecScanWarning", "DiscreteSpectrum", "SampledMeasurement",
    "EstimateReport", "synthesize", "density", "match_and_score",
    "WindowPlan", "make_plan", "cgm", "effective_cutoff", "MusicConfig",
    "music", "ScanConfig", "scan_music", "downsample_tau", "build_filter",
    "afsr", "ClusterModel", "scan_music_c", "detect_centers",
]

__version__ = "0.1.0"

log = getLogger(__name__)
