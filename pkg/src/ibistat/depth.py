"""Exact Tukey (halfspace) depth in the plane.

Depth of a point q against a cloud is the minimum, over all closed
halfplanes whose boundary passes through q, of the fraction of cloud
points inside.  The minimum over the continuum of directions is attained
on one of the open angular arcs delimited by the directions
perpendicular to the cloud points as seen from q, so an angular sweep
over those O(n) critical directions is exact in O(n log n).
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["tukey_depth", "tukey_depths"]

_TWO_PI = 2.0 * math.pi


def tukey_depth(point, cloud) -> float:
    """Exact halfspace depth of ``point`` in [0, 1] against ``cloud`` (n x 2).

    Cloud points exactly coincident with ``point`` lie in every closed
    halfplane and always count.
    """
    point = np.asarray(point, dtype=float)
    cloud = np.asarray(cloud, dtype=float)
    if cloud.ndim != 2 or cloud.shape[1] != 2:
        raise ValueError(f"cloud must be n x 2, got shape {cloud.shape}")
    if cloud.shape[0] == 0:
        raise ValueError("cloud must be nonempty")
    v = cloud - point
    coincident = (v[:, 0] == 0.0) & (v[:, 1] == 0.0)
    n = cloud.shape[0]
    n_coincident = int(np.count_nonzero(coincident))
    w = v[~coincident]
    if w.shape[0] == 0:
        return 1.0
    angles = np.sort(np.arctan2(w[:, 1], w[:, 0]) % _TWO_PI)
    # critical normal directions: each data angle +/- pi/2
    crit = np.unique(np.concatenate([(angles + 0.5 * math.pi) % _TWO_PI,
                                     (angles - 0.5 * math.pi) % _TWO_PI]))
    # evaluate on the open arcs between consecutive critical directions,
    # where no data point sits exactly on the halfplane boundary
    nxt = np.roll(crit, -1).copy()
    nxt[-1] += _TWO_PI
    mids = ((crit + nxt) / 2.0) % _TWO_PI
    lo = (mids - 0.5 * math.pi) % _TWO_PI
    doubled = np.concatenate([angles, angles + _TWO_PI])
    counts = (np.searchsorted(doubled, lo + math.pi, side="right")
              - np.searchsorted(doubled, lo, side="left"))
    return (n_coincident + int(counts.min())) / n


def tukey_depths(points, cloud) -> np.ndarray:
    """Depth of each row of ``points`` against the same cloud."""
    points = np.asarray(points, dtype=float)
    return np.array([tukey_depth(q, cloud) for q in points])
