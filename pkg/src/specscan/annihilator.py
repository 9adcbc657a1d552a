# coding: utf-8
"""
Annihilating filters for clustered spectra.

The filter of order ``M`` at center ``c`` is the convolution power
``[1, -exp(i c h)] ** M``; it maps samples of ``(i w)**r exp(i c w)`` to zero
for every ``r < M`` and therefore suppresses a whole cluster around ``c``.
"""
from collections import namedtuple
from functools import reduce
from logging import getLogger
from math import ceil, exp, pi

import numpy as np
from scipy import special

from ._utils import (
    frozen_array, require_positive, require_same_step,
)

log = getLogger(__name__)

BAD_ORDER = "Filter order must be a positive integer, got {}."
NO_FILTERS = "Cannot compose an empty list of filters."
ORDER_COUNT_MISMATCH = "Got {} centers but {} orders."
BAD_REGIONS = "Trust radius {r_tru} must be below essential radius {r_ess}."
TOO_FEW_FOR_FILTER = (
    "Subsampling {count} samples by {factor} leaves {left}, but "
    "{needed} are needed for {max_count} sources and orders {orders}."
)
FILTER_OUTPUT_TOO_SHORT = (
    "Filtering {count} samples with a filter of length {length} leaves "
    "{left} samples, fewer than 3."
)
FILTERED = "Filtered %s samples with %s centers into %s samples."


class AnnihilatingFilter(namedtuple("AnnihilatingFilter", [
    "centers", "orders", "step", "coefficients",
])):
    """
    Filter coefficients together with the centers and orders they annihilate.
    """
    __slots__ = ()

    @property
    def center(self):
        """float: the center of a single-center filter"""
        if len(self.centers) != 1:
            raise AttributeError("Composite filters have no single center.")
        return self.centers[0]

    @property
    def order(self):
        """int: total order, one less than the filter length"""
        return int(sum(self.orders))

    @property
    def length(self):
        """int: number of coefficients"""
        return self.coefficients.size

    def apply(self, samples):
        """
        Full discrete convolution of `samples` with the filter.
        """
        return np.convolve(np.asarray(samples), self.coefficients)


def build_filter(center, order, step):
    """
    Order-`order` annihilating filter at `center` for sampling step `step`.

    The coefficients are ``C(M, l) * (-exp(i center step))**l``.
    """
    if int(order) != order or order < 1:
        raise ValueError(BAD_ORDER.format(order))
    require_positive("step", step)
    order = int(order)
    powers = np.arange(order + 1)
    coefficients = special.comb(order, powers, exact=False) * np.exp(
        1j * powers * (center * step + pi)
    )
    return AnnihilatingFilter(
        (float(center),), (order,), float(step),
        frozen_array(coefficients, complex),
    )


def compose(filters):
    """
    Convolve several filters built for the same step into one.
    """
    filters = list(filters)
    if not filters:
        raise ValueError(NO_FILTERS)
    for other in filters[1:]:
        require_same_step(filters[0].step, other.step)
    if len(filters) == 1:
        return filters[0]
    coefficients = reduce(
        np.convolve, (flt.coefficients for flt in filters)
    )
    return AnnihilatingFilter(
        sum((flt.centers for flt in filters), ()),
        sum((flt.orders for flt in filters), ()),
        filters[0].step, frozen_array(coefficients, complex),
    )


def select_targets(all_centers, mu, r_tru, r_ess):
    """
    Centers whose offset from `mu` lies in the annulus
    ``R_tru < |offset| <= R_ess``.
    """
    if not r_tru < r_ess:
        raise ValueError(BAD_REGIONS.format(r_tru=r_tru, r_ess=r_ess))
    centers = np.asarray(all_centers, dtype=float)
    offsets = np.abs(centers - mu)
    return [float(c) for c in centers[(offsets > r_tru) & (offsets <= r_ess)]]


def survivors_needed(orders, max_count):
    """
    Samples `sub2` must keep: ``max(2 N0, 3)`` left for MUSIC after the
    ``sum(orders) + 1`` consumed by the composite filter.
    """
    return max(2 * max_count, 3) + int(sum(orders)) + 1


def sub2(samples, step, orders, max_count, factor=None):
    """
    Subsample by ``ceil(m / survivors_needed(orders, N0))`` so that just
    enough samples survive for filtering and MUSIC. A fixed `factor` replaces
    the automatic one; the survivors are checked either way.

    Returns
    -------
    (ndarray, float)
        the kept samples and the new step
    """
    samples = np.asarray(samples)
    needed = survivors_needed(orders, max_count)
    if factor is None:
        factor = max(1, int(ceil(samples.size / needed)))
    factor = int(factor)
    kept = samples[::factor]
    if kept.size < needed:
        raise ValueError(TOO_FEW_FOR_FILTER.format(
            count=samples.size, factor=factor, left=kept.size, needed=needed,
            max_count=max_count, orders=list(orders),
        ))
    return kept, step * factor


def afsr(samples, step, centers, orders):
    """
    Apply the composite annihilating filter for `centers` and keep the
    ``m - |Q|`` interior samples. Without centers the samples are returned
    unchanged.
    """
    samples = np.asarray(samples)
    if len(centers) != len(orders):
        raise ValueError(ORDER_COUNT_MISMATCH.format(
            len(centers), len(orders)
        ))
    if len(centers) == 0:
        return samples
    composite = compose(
        build_filter(c, m, step) for c, m in zip(centers, orders)
    )
    length = composite.length
    filtered = composite.apply(samples)[length:samples.size]
    if filtered.size < 3:
        raise ValueError(FILTER_OUTPUT_TOO_SHORT.format(
            count=samples.size, length=length, left=filtered.size
        ))
    log.debug(FILTERED, samples.size, len(centers), filtered.size)
    return filtered


def filter_gain(centers, orders, step):
    """
    l1 norm of the composite filter coefficients, the worst-case growth of
    bounded noise; 1 without centers.
    """
    if len(centers) == 0:
        return 1.0
    composite = compose(
        build_filter(c, m, step) for c, m in zip(centers, orders)
    )
    return float(np.sum(np.abs(composite.coefficients)))


def decay_bound(tv_norm_cluster, step, half_length, order, distance):
    """
    Bound on the filtered image of a cluster at `distance` from its center:
    ``tv / pi * (h D)**M * exp(h D) / distance``.
    """
    require_positive("distance", distance)
    scale = step * half_length
    return tv_norm_cluster / pi * scale ** order * exp(scale) / distance


__all__ = [
    "AnnihilatingFilter", "build_filter", "compose", "select_targets",
    "survivors_needed", "sub2", "afsr", "filter_gain", "decay_bound",
]
