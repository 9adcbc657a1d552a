# coding: utf-8
"""
Internal utilities for specscan

:license: 3-clause BSD
"""
from collections import namedtuple
from contextlib import contextmanager
from math import isclose
from time import perf_counter

import numpy as np

SPECSCAN_ATTR_LABEL = "_specscan_label"
SPECSCAN_ATTR_VERSION = "_specscan_version"

NOT_POSITIVE = "{name} must be positive, got {value}."
NOT_IN_OPEN_UNIT = "{name} must lie in (0, 1), got {value}."
STEP_MISMATCH = "Sampling steps {} and {} do not agree."

DumperMap = namedtuple("DumperMap", "label func")


class SpecScanWarning(Warning):
    """
    Warning class for specscan
    """
    pass


def require_positive(name, value):
    """
    Raise ValueError unless `value` is strictly positive.
    """
    if not value > 0:
        raise ValueError(NOT_POSITIVE.format(name=name, value=value))
    return value


def require_unit_interval(name, value):
    """
    Raise ValueError unless `value` lies in the open interval (0, 1).
    """
    if not 0 < value < 1:
        raise ValueError(NOT_IN_OPEN_UNIT.format(name=name, value=value))
    return value


def require_same_step(first, second):
    """
    Raise ValueError if two sampling steps differ beyond rounding.
    """
    if not isclose(first, second, rel_tol=1e-9, abs_tol=0.0):
        raise ValueError(STEP_MISMATCH.format(first, second))


def frozen_array(values, dtype):
    """
    Return a read-only one dimensional copy of `values`.
    """
    arr = np.array(values, dtype=dtype, copy=True).reshape(-1)
    arr.setflags(write=False)
    return arr


def array_tuple_eq(self, other):
    """
    Equality for namedtuples which hold numpy arrays.
    """
    if not isinstance(other, self.__class__):
        return False
    if len(self) != len(other):
        return False
    for mine, theirs in zip(self, other):
        if isinstance(mine, np.ndarray) or isinstance(theirs, np.ndarray):
            mine = np.asarray(mine)
            theirs = np.asarray(theirs)
            if mine.shape != theirs.shape:
                return False
            if not np.array_equal(mine, theirs, equal_nan=(
                mine.dtype.kind in "fc" and theirs.dtype.kind in "fc"
            )):
                return False
        elif mine != theirs:
            return False
    return True


@contextmanager
def stage_timer(timings, stage):
    """
    Accumulate the wall time spent inside the block into ``timings[stage]``.
    """
    start = perf_counter()
    try:
        yield
    finally:
        timings[stage] = timings.get(stage, 0.0) + perf_counter() - start
