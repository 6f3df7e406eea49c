"""Random generation of configurations and grouped datasets.

Every stochastic routine in the package draws from a counter-based
generator (Philox) keyed by a user seed plus a stream id, so each
bootstrap replicate, permutation, or simulation run owns an independent
stream and results never depend on execution order or thread count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .shape import (
    Configuration,
    ShapePoint,
    configuration_from_sides,
    sides_from_shape,
)

__all__ = [
    "SeededRng",
    "GroupSpec",
    "stream_generator",
    "sample_null_configuration",
    "sample_null_shapes",
    "mean_configuration_from_shape",
    "sample_grouped_dataset",
]

# Stream-id domains keep the streams of unrelated subsystems disjoint
# even when they share a user seed.
DOMAIN_BOOTSTRAP = 0
DOMAIN_PERMUTATION = 1
DOMAIN_SIMULATION = 2
DOMAIN_NULL = 3


def stream_generator(seed: int, *stream_id: int) -> np.random.Generator:
    """Independent generator for (seed, stream-id).

    Identical arguments reproduce identical draws bit for bit on every
    platform (Philox is counter based; the seed-sequence expansion is
    part of numpy's stability contract).
    """
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(s) for s in stream_id))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class SeededRng:
    """A (seed, stream-id) pair; ``generator()`` yields the stream."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        return stream_generator(self.seed, self.stream_id)


@dataclass(frozen=True)
class GroupSpec:
    """Sampling plan for three isotropic normal groups of common size."""

    means: np.ndarray  # (3, p) rows A, B, C
    sigma2: float
    n: int

    def __post_init__(self):
        means = np.asarray(self.means, dtype=float)
        if means.ndim != 2 or means.shape[0] != 3:
            raise ValueError(f"means must be 3 x p, got shape {means.shape}")
        if not np.all(np.isfinite(means)):
            raise ValueError("group means must be finite")
        if not (math.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need n >= 2 per group, got {self.n}")
        means = means.copy()
        means.setflags(write=False)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "sigma2", float(self.sigma2))
        object.__setattr__(self, "n", int(self.n))

    @property
    def p(self) -> int:
        return self.means.shape[1]


def sample_null_configuration(p: int, rng: np.random.Generator) -> Configuration:
    """Three landmarks iid standard normal in p dimensions."""
    if p < 2:
        raise ValueError("null sampling needs p >= 2")
    return Configuration(rng.normal(size=(3, p)))


def sample_null_shapes(p: int, n: int, rng: np.random.Generator) -> dict:
    """Vectorized null sample of n triangle shapes.

    Returns arrays ``r``, ``phi``, ``tau``, ``u``, ``v`` computed through
    the side-length route; intended for Monte-Carlo validation of the
    closed-form null densities.
    """
    if p < 2:
        raise ValueError("null sampling needs p >= 2")
    x = rng.normal(size=(n, 3, p))
    xa, xb, xc = x[:, 0], x[:, 1], x[:, 2]
    a2 = np.sum((xb - xc) ** 2, axis=1)
    b2 = np.sum((xa - xc) ** 2, axis=1)
    c2 = np.sum((xa - xb) ** 2, axis=1)
    total = a2 + b2 + c2
    a2, b2, c2 = a2 / total, b2 / total, c2 / total
    u = 1.0 - 3.0 * a2
    v = math.sqrt(3.0) * (b2 - c2)
    r = np.hypot(u, v)
    phi = np.arctan2(v, u) % (2.0 * math.pi)
    tau = 3.0 * b2 - 1.0
    return {"r": r, "phi": phi, "tau": tau, "u": u, "v": v}


def mean_configuration_from_shape(r: float, phi: float, p: int = 2) -> Configuration:
    """A centered, unit-centroid-size configuration with shape (r, phi).

    Centroid size is the Frobenius norm of the centered landmark matrix.
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"radius must lie in [0, 1], got {r}")
    sides = sides_from_shape(ShapePoint(r=r, phi=phi))
    lm = configuration_from_sides(sides, p=p).landmarks
    lm = lm - lm.mean(axis=0)
    norm = np.linalg.norm(lm)
    if norm == 0.0:
        raise ValueError("cannot scale a fully coincident configuration")
    return Configuration(lm / norm)


def sample_grouped_dataset(spec: GroupSpec, rng: np.random.Generator):
    """Draw n observations per group, normal around each group mean.

    Returns a :class:`~ibistat.inference.GroupedDataset`; draw order is
    fixed (group A, then B, then C) so a given generator state always
    yields the same dataset.
    """
    from .inference import GroupedDataset  # local import to avoid a cycle

    sd = math.sqrt(spec.sigma2)
    blocks = [spec.means[g] + sd * rng.normal(size=(spec.n, spec.p)) for g in range(3)]
    features = np.vstack(blocks)
    labels = np.repeat(np.array(["A", "B", "C"]), spec.n)
    return GroupedDataset(features=features, labels=labels)
