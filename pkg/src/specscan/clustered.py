# coding: utf-8
"""
SCAN-MUSIC for clustered spectra and reconstruction of cluster centers.
"""
from collections import namedtuple
from logging import getLogger
from math import pi

import numpy as np
from scipy.cluster import hierarchy

from ._utils import frozen_array, require_positive, stage_timer
from .annihilator import afsr, filter_gain, select_targets, sub2
from .model import EstimateReport
from .subspace import music
from .scan import (
    AUTO, merge_estimates, scan_music, windowed_noise_floor,
)
from .windowing import cgm

log = getLogger(__name__)

NOT_INCREASING = "Cluster centers must be strictly increasing."
BAD_HALF_LENGTHS = "Expected {} nonnegative half-lengths, got {}."
OVERLAPPING = "Cluster intervals around {} and {} overlap."
GAP_TOO_SMALL = (
    "Cluster centers {left} and {right} are {gap} apart, below "
    "L + 2D = {needed}."
)
BAD_PER_CLUSTER = "Expected one {name} per cluster ({count}), got {got}."
CLUSTER_TOO_WIDE = (
    "Cluster at {center} has half-length {half_length} exceeding the trust "
    "radius {r_tru}; raise the trust level or lower lambda."
)
CLUSTER_DONE = "Cluster at %s filtered %s targets, kept %s estimates."
CENTERS_DETECTED = "Detected %s cluster centers from %s estimates."


class ClusterModel(namedtuple("ClusterModel", [
    "centers", "half_lengths", "max_count", "cluster_gap", "order_policy",
    "orders", "counts",
])):
    """
    Geometry of clustered spectra.

    Parameters
    ----------
    centers : array_like of float
        strictly increasing cluster centers
    half_lengths : float or array_like of float
        half-length of each cluster interval
    max_count : int
        maximum number of spectra in one cluster
    cluster_gap : float
        minimum separation L between cluster intervals
    order_policy : (int, int) or None
        filter orders for the nearest and for the other interfering clusters;
        ``(3, 2)`` for clusters of at most two spectra and ``(5, 3)`` otherwise
    orders : sequence of int or None
        fixed filter order per cluster, overriding the policy
    counts : sequence of int or None
        number of spectra per cluster when known
    """
    __slots__ = ()

    def __new__(
        cls, centers, half_lengths, max_count, cluster_gap=0.0,
        order_policy=None, orders=None, counts=None
    ):
        centers = frozen_array(centers, float)
        if np.any(np.diff(centers) <= 0):
            raise ValueError(NOT_INCREASING)
        half_lengths = np.broadcast_to(
            np.asarray(half_lengths, dtype=float), centers.shape
        ).copy()
        if half_lengths.size != centers.size or np.any(half_lengths < 0):
            raise ValueError(BAD_HALF_LENGTHS.format(
                centers.size, half_lengths.size
            ))
        half_lengths.setflags(write=False)
        require_positive("max_count", max_count)
        widest = float(np.max(half_lengths)) if half_lengths.size else 0.0
        for index in range(centers.size - 1):
            left, right = centers[index], centers[index + 1]
            if left + half_lengths[index] >= right - half_lengths[index + 1]:
                raise ValueError(OVERLAPPING.format(left, right))
            if right - left < cluster_gap + 2 * widest:
                raise ValueError(GAP_TOO_SMALL.format(
                    left=left, right=right, gap=right - left,
                    needed=cluster_gap + 2 * widest,
                ))
        if order_policy is None:
            order_policy = (3, 2) if max_count <= 2 else (5, 3)
        for name, values in (("order", orders), ("count", counts)):
            if values is not None and len(values) != centers.size:
                raise ValueError(BAD_PER_CLUSTER.format(
                    name=name, count=centers.size, got=len(values)
                ))
        return super().__new__(
            cls, centers, half_lengths, int(max_count), float(cluster_gap),
            tuple(int(m) for m in order_policy),
            None if orders is None else tuple(int(m) for m in orders),
            None if counts is None else tuple(int(n) for n in counts),
        )

    def __eq__(self, other):
        return (
            isinstance(other, ClusterModel) and
            np.array_equal(self.centers, other.centers) and
            np.array_equal(self.half_lengths, other.half_lengths) and
            tuple(self[2:]) == tuple(other[2:])
        )

    __hash__ = None

    def target_orders(self, targets, mu):
        """
        Filter orders for the target centers of a window at `mu`: the nearest
        target (ties toward the earlier one) gets the higher policy order.
        """
        if len(targets) == 0:
            return []
        targets = np.asarray(targets, dtype=float)
        near, far = self.order_policy
        nearest = int(np.argmin(np.abs(targets - mu)))
        orders = []
        for position, target in enumerate(targets):
            if self.orders is not None:
                index = int(np.argmin(np.abs(self.centers - target)))
                orders.append(self.orders[index])
            else:
                orders.append(near if position == nearest else far)
        return orders


def link_estimates(estimates, radius):
    """
    Single-linkage clustering of estimates with threshold `radius`; returns
    the sorted cluster means.
    """
    estimates = np.sort(np.asarray(estimates, dtype=float))
    if estimates.size == 0:
        return []
    if estimates.size == 1:
        return [float(estimates[0])]
    tree = hierarchy.linkage(estimates.reshape(-1, 1), method="single")
    labels = hierarchy.fcluster(tree, t=radius, criterion="distance")
    return sorted(
        float(np.mean(estimates[labels == label]))
        for label in np.unique(labels)
    )


def detect_centers(measurement, config, merge_radius=None):
    """
    Estimate cluster centers as the means of linked SCAN-MUSIC estimates.

    Parameters
    ----------
    measurement : SampledMeasurement
    config : ScanConfig
        ``config.detection_lam`` replaces the window parameter when set
    merge_radius : float or None
        linkage threshold, one Rayleigh length ``pi / omega`` by default
    """
    if merge_radius is None:
        merge_radius = pi / measurement.omega
    require_positive("merge_radius", merge_radius)
    if config.detection_lam is not None:
        config = config._replace(lam=config.detection_lam)
    report = scan_music(measurement, config)
    centers = link_estimates(report.estimates, merge_radius)
    log.debug(CENTERS_DETECTED, len(centers), report.estimates.size)
    return centers


def scan_music_c(measurement, config, clusters):
    """
    Reconstruct clustered spectra with SCAN-MUSIC(C).

    Each cluster is windowed at its center, the interfering clusters in the
    essential annulus are removed with annihilating filters and MUSIC runs on
    the short filtered sequence.

    Parameters
    ----------
    measurement : SampledMeasurement
    config : ScanConfig
    clusters : ClusterModel

    Returns
    -------
    EstimateReport
        estimates with per-stage timings, not yet scored
    """
    timings = {}
    plan = config.plan(measurement)
    for center, half_length in zip(clusters.centers, clusters.half_lengths):
        if half_length > plan.r_tru:
            raise ValueError(CLUSTER_TOO_WIDE.format(
                center=center, half_length=half_length, r_tru=plan.r_tru
            ))
    merge_radius = config.merge_radius
    if merge_radius is None:
        merge_radius = pi / (8 * measurement.omega)

    positions, windows = [], []
    for index, mu in enumerate(clusters.centers):
        with stage_timer(timings, "cgm"):
            windowed = cgm(
                measurement, plan.centered(mu), config.fft_threshold
            )
        with stage_timer(timings, "filter"):
            targets = select_targets(
                clusters.centers, mu, plan.r_tru, plan.r_ess
            )
            orders = clusters.target_orders(targets, mu)
            samples, step = sub2(
                windowed.samples, measurement.step, orders,
                clusters.max_count, factor=(
                    None if config.subsample_factor == AUTO
                    else config.subsample_factor
                ),
            )
            # the windowed samples see every cluster at its offset from mu
            offsets = [target - mu for target in targets]
            filtered = afsr(samples, step, offsets, orders)
        with stage_timer(timings, "music"):
            rows = filtered.size // 2 + 1
            music_config = config.music._replace(
                search_interval=(-plan.r_tru, plan.r_tru),
                max_sources=clusters.max_count,
                noise_floor=windowed_noise_floor(
                    measurement, plan, rows, filtered.size + 1 - rows,
                    gain=filter_gain(offsets, orders, step),
                ),
            )
            if clusters.counts is not None and (
                clusters.counts[index] < rows
            ):
                music_config = music_config._replace(
                    source_count=clusters.counts[index]
                )
            result = music(filtered, step, music_config)
        local = result.estimates + mu
        keep = local[(local >= mu - plan.r_tru) & (local < mu + plan.r_tru)]
        log.debug(CLUSTER_DONE, mu, len(targets), keep.size)
        positions.extend(keep)
        windows.extend([index] * keep.size)

    with stage_timer(timings, "merge"):
        estimates = merge_estimates(positions, windows, merge_radius)
    return EstimateReport(estimates, timings=timings)


__all__ = [
    "ClusterModel", "link_estimates", "detect_centers", "scan_music_c",
]
