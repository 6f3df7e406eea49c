"""Statistical inference for in-betweenness.

Pipeline: standardize features, form the centroid triangle, then
quantify uncertainty by resampling within groups (stratified bootstrap),
permutation testing of the no-structure null, and Tukey-depth confidence
regions in shape space.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .depth import tukey_depth, tukey_depths
from .errors import (
    InsufficientDataError,
    InsufficientReplicatesError,
    SingularCovarianceError,
)
from .metrics import IbiPair, cosine_ibi, ibi_pair, tau_ibi
from .sampling import (
    DOMAIN_BOOTSTRAP,
    DOMAIN_PERMUTATION,
    DOMAIN_SIMULATION,
    GroupSpec,
    mean_configuration_from_shape,
    sample_grouped_dataset,
    stream_generator,
)
from .shape import (
    Configuration,
    ShapePoint,
    SideLengths,
    shape_point,
    side_lengths,
    sides_from_shape,
)

__all__ = [
    "GROUPS",
    "GroupedDataset",
    "BootstrapEnsemble",
    "ConfidenceRegion",
    "RegionPoint",
    "RegionSummary",
    "standardize",
    "centroid_configuration",
    "observed_ibi",
    "stratified_bootstrap",
    "percentile_ci",
    "confidence_region",
    "region_summary",
    "permutation_test",
    "coverage_simulation",
]

GROUPS = ("A", "B", "C")

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class GroupedDataset:
    """Observations with group labels A/B/C and named features."""

    features: np.ndarray  # (N, p)
    labels: np.ndarray  # (N,) of "A" | "B" | "C"
    feature_names: tuple = ()

    def __post_init__(self):
        x = np.asarray(self.features, dtype=float)
        labels = np.asarray(self.labels, dtype=object)
        if x.ndim != 2 or x.shape[1] < 1:
            raise ValueError(f"features must be N x p, got shape {x.shape}")
        if labels.shape != (x.shape[0],):
            raise ValueError("labels must align with feature rows")
        if not np.all(np.isfinite(x)):
            raise ValueError("feature values must be finite")
        bad = sorted(set(labels) - set(GROUPS))
        if bad:
            raise ValueError(f"labels must be in {GROUPS}, got {bad}")
        for g in GROUPS:
            if int(np.count_nonzero(labels == g)) < 2:
                raise ValueError(f"group {g} needs at least 2 observations")
        names = tuple(self.feature_names) or tuple(f"f{i}" for i in range(x.shape[1]))
        if len(names) != x.shape[1]:
            raise ValueError("feature_names must match the number of features")
        x = x.copy()
        x.setflags(write=False)
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "feature_names", names)

    @classmethod
    def from_observations(cls, observations, feature_names=()) -> "GroupedDataset":
        obs = list(observations)
        labels = np.array([o[0] for o in obs], dtype=object)
        features = np.array([np.asarray(o[1], dtype=float) for o in obs])
        return cls(features=features, labels=labels, feature_names=feature_names)

    @property
    def p(self) -> int:
        return self.features.shape[1]

    @property
    def n(self) -> int:
        return self.features.shape[0]

    def group_indices(self, label: str) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    def group_features(self, label: str) -> np.ndarray:
        return self.features[self.group_indices(label)]

    def n_per_group(self) -> dict:
        return {g: int(np.count_nonzero(self.labels == g)) for g in GROUPS}


def standardize(ds: GroupedDataset, mode: str = "feature") -> GroupedDataset:
    """Rescale features: "none", "feature" (overall unit variance), or
    "whiten" (pooled within-group covariance mapped to identity).

    Whitening uses the symmetric inverse square root of the pooled
    within-group covariance and fails on rank-deficient or severely
    ill-conditioned data (condition number >= 1e12).
    """
    if mode == "none":
        return ds
    x = ds.features
    if mode == "feature":
        sd = x.std(axis=0, ddof=1)
        if np.any(sd == 0.0) or not np.all(np.isfinite(sd)):
            bad = [ds.feature_names[i] for i in np.flatnonzero(sd == 0.0)]
            raise SingularCovarianceError(f"features with zero variance: {bad}")
        z = (x - x.mean(axis=0)) / sd
    elif mode == "whiten":
        resid = np.concatenate(
            [ds.group_features(g) - ds.group_features(g).mean(axis=0) for g in GROUPS]
        )
        cov = resid.T @ resid / (ds.n - 3)
        eigval, eigvec = np.linalg.eigh(cov)
        if eigval[0] <= 0.0 or eigval[-1] / eigval[0] >= 1e12:
            raise SingularCovarianceError(
                "pooled within-group covariance is singular or ill-conditioned"
            )
        w = eigvec @ np.diag(eigval ** -0.5) @ eigvec.T
        z = (x - x.mean(axis=0)) @ w
    else:
        raise ValueError(f"unknown standardization mode {mode!r}")
    return GroupedDataset(features=z, labels=ds.labels, feature_names=ds.feature_names)


def centroid_configuration(ds: GroupedDataset) -> Configuration:
    """Triangle of the three group means (rows A, B, C)."""
    return Configuration(np.array([ds.group_features(g).mean(axis=0) for g in GROUPS]))


def observed_ibi(ds: GroupedDataset, mode: str = "feature") -> IbiPair:
    """Both indices of the centroid triangle after standardization."""
    cfg = centroid_configuration(standardize(ds, mode))
    sides = side_lengths(cfg)
    return IbiPair(gamma=cosine_ibi(sides), tau=tau_ibi(shape_point(cfg)))


# ---------------------------------------------------------------------------
# stratified bootstrap


@dataclass(frozen=True)
class BootstrapEnsemble:
    """Per-replicate shape statistics; degenerate replicates hold NaN.

    gamma is additionally NaN for replicates where a side adjacent to B
    vanishes (the cosine index is undefined there).
    """

    tau: np.ndarray
    gamma: np.ndarray
    u: np.ndarray
    v: np.ndarray
    a2: np.ndarray
    b2: np.ndarray
    c2: np.ndarray
    seed: int
    k: int
    n_degenerate: int = 0
    n_gamma_undefined: int = 0

    def valid_mask(self) -> np.ndarray:
        return np.isfinite(self.tau)


def _centroid_shape_stats(xa: np.ndarray, xb: np.ndarray, xc: np.ndarray) -> dict:
    """Vectorized shape statistics for K centroid triangles ((K, p) each)."""
    a2 = np.sum((xb - xc) ** 2, axis=1)
    b2 = np.sum((xa - xc) ** 2, axis=1)
    c2 = np.sum((xa - xb) ** 2, axis=1)
    total = a2 + b2 + c2
    scale = 1.0 + np.max(np.abs(np.stack([xa, xb, xc])), axis=(0, 2))
    # coincident-centroid rule matching Configuration.is_degenerate:
    # centered Frobenius norm (= sqrt(total/3)) below 1e-12 * scale
    degenerate = np.sqrt(np.maximum(total, 0.0) / 3.0) < 1e-12 * scale
    with np.errstate(invalid="ignore", divide="ignore"):
        safe_total = np.where(degenerate, 1.0, total)
        a2n, b2n, c2n = a2 / safe_total, b2 / safe_total, c2 / safe_total
        u = 1.0 - 3.0 * a2n
        v = _SQRT3 * (b2n - c2n)
        tau = np.clip(3.0 * b2n - 1.0, -1.0, 1.0)
        gamma_undefined = (a2 == 0.0) | (c2 == 0.0)
        gamma = np.clip(
            (2.0 * b2n - 1.0)
            / (2.0 * np.sqrt(np.where(gamma_undefined, 1.0, a2n * c2n))),
            -1.0,
            1.0,
        )
    gamma = np.where(gamma_undefined, np.nan, gamma)
    for arr in (a2n, b2n, c2n, u, v, tau, gamma):
        arr[degenerate] = np.nan
    return {
        "tau": tau, "gamma": gamma, "u": u, "v": v,
        "a2": a2n, "b2": b2n, "c2": c2n,
        "degenerate": degenerate,
        "gamma_undefined": gamma_undefined & ~degenerate,
    }


def _bootstrap_indices(seed: int, k0: int, k1: int, sizes) -> list:
    """Resampling index blocks for replicates k0..k1-1, one stream each."""
    out = []
    for k in range(k0, k1):
        rng = stream_generator(seed, DOMAIN_BOOTSTRAP, k)
        out.append([rng.integers(0, n, size=n) for n in sizes])
    return out


def stratified_bootstrap(
    ds: GroupedDataset,
    k: int,
    seed: int,
    threads: int = 1,
    resample: bool = True,
) -> BootstrapEnsemble:
    """Resample within each group, recompute the centroid triangle K times.

    Replicate j draws its indices from the stream (seed, j), so ensembles
    are bit-identical regardless of thread count.  ``resample=False`` is
    a test hook that emits identity replicates (no resampling).

    Degenerate replicates (coincident centroids) are recorded as NaN and
    counted in ``n_degenerate`` rather than failing the run.
    """
    if k < 1:
        raise ValueError("need at least one bootstrap replicate")
    group_feats = [ds.group_features(g) for g in GROUPS]
    sizes = [f.shape[0] for f in group_feats]

    if resample:
        threads = max(1, int(threads))
        if threads == 1:
            blocks = _bootstrap_indices(seed, 0, k, sizes)
        else:
            bounds = np.linspace(0, k, threads + 1, dtype=int)
            with ThreadPoolExecutor(max_workers=threads) as pool:
                futures = [
                    pool.submit(_bootstrap_indices, seed, int(lo), int(hi), sizes)
                    for lo, hi in zip(bounds[:-1], bounds[1:])
                ]
                blocks = [b for f in futures for b in f.result()]
        means = []
        for g in range(3):
            idx = np.array([blk[g] for blk in blocks])
            means.append(group_feats[g][idx].mean(axis=1))
        xa, xb, xc = means
    else:
        lm = np.array([f.mean(axis=0) for f in group_feats])
        xa, xb, xc = (np.tile(lm[g], (k, 1)) for g in range(3))

    stats = _centroid_shape_stats(xa, xb, xc)
    return BootstrapEnsemble(
        tau=stats["tau"], gamma=stats["gamma"], u=stats["u"], v=stats["v"],
        a2=stats["a2"], b2=stats["b2"], c2=stats["c2"],
        seed=int(seed), k=int(k),
        n_degenerate=int(np.count_nonzero(stats["degenerate"])),
        n_gamma_undefined=int(np.count_nonzero(stats["gamma_undefined"])),
    )


def percentile_ci(values, level: float) -> tuple:
    """Equal-tail percentile interval via linear interpolation of order
    statistics (the numpy default quantile rule)."""
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    vals = np.asarray(values, dtype=float)
    vals = vals[np.isfinite(vals)]
    if vals.size < 2:
        raise InsufficientDataError(
            f"need at least 2 finite values, got {vals.size}"
        )
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(vals, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


# ---------------------------------------------------------------------------
# confidence regions


@dataclass(frozen=True)
class ConfidenceRegion:
    """Deepest-replicate region of shape space at a target coverage level."""

    level: float
    depth_threshold: float
    member_indices: np.ndarray  # replicate indices into the ensemble
    member_points: np.ndarray  # (m, 2) of (u, v)
    member_taus: np.ndarray
    member_depths: np.ndarray
    hull: np.ndarray  # (h, 2) polygon vertices
    area: float


def _hull_and_area(points: np.ndarray) -> tuple:
    """Convex hull vertices and area, degenerating gracefully."""
    uniq = np.unique(points, axis=0)
    if uniq.shape[0] < 3:
        return uniq, 0.0
    try:
        from scipy.spatial import ConvexHull, QhullError

        hull = ConvexHull(points)
        return points[hull.vertices], float(hull.volume)
    except QhullError:  # collinear cloud
        return uniq, 0.0


def confidence_region(ens: BootstrapEnsemble, level: float) -> ConfidenceRegion:
    """Region of the deepest bootstrap shape points holding >= level mass.

    The depth threshold is the largest depth value whose upper level set
    contains at least ``level`` of the valid replicates, i.e. the
    smallest achievable covering fraction at or above the target.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    valid = np.flatnonzero(ens.valid_mask())
    if valid.size < 3:
        raise InsufficientReplicatesError(
            f"need at least 3 valid replicates, got {valid.size}"
        )
    if valid.size < 100:
        warnings.warn(
            f"only {valid.size} valid replicates; the confidence region is coarse",
            stacklevel=2,
        )
    points = np.column_stack([ens.u[valid], ens.v[valid]])
    depths = tukey_depths(points, points)
    ascending = np.sort(depths)
    candidates = np.unique(depths)[::-1]
    counts = depths.size - np.searchsorted(ascending, candidates, side="left")
    need = level * valid.size
    threshold = float(candidates[np.argmax(counts >= need)])
    member = depths >= threshold
    hull, area = _hull_and_area(points[member])
    return ConfidenceRegion(
        level=float(level),
        depth_threshold=threshold,
        member_indices=valid[member],
        member_points=points[member],
        member_taus=ens.tau[valid[member]],
        member_depths=depths[member],
        hull=hull,
        area=area,
    )


@dataclass(frozen=True)
class RegionPoint:
    """One distinguished shape inside a confidence region."""

    point: ShapePoint
    sides: SideLengths
    tau: float
    replicate: int


@dataclass(frozen=True)
class RegionSummary:
    """Median (deepest) and extreme-tau members of a confidence region."""

    median: RegionPoint
    max_tau: RegionPoint
    min_tau: RegionPoint


def _region_point(cr: ConfidenceRegion, pos: int) -> RegionPoint:
    u, v = cr.member_points[pos]
    sp = ShapePoint.from_rect(float(u), float(v))
    return RegionPoint(
        point=sp,
        sides=sides_from_shape(sp),
        tau=float(cr.member_taus[pos]),
        replicate=int(cr.member_indices[pos]),
    )


def region_summary(cr: ConfidenceRegion) -> RegionSummary:
    """Deepest member plus the members with extreme tau (ties: smallest
    replicate index, which is the first occurrence)."""
    if cr.member_points.shape[0] == 0:
        raise InsufficientReplicatesError("empty confidence region")
    return RegionSummary(
        median=_region_point(cr, int(np.argmax(cr.member_depths))),
        max_tau=_region_point(cr, int(np.argmax(cr.member_taus))),
        min_tau=_region_point(cr, int(np.argmin(cr.member_taus))),
    )


# ---------------------------------------------------------------------------
# permutation test


def permutation_test(ds: GroupedDataset, k: int, seed: int) -> dict:
    """Label-shuffling test of the fully exchangeable null.

    Returns two-sided p-values ``{"p_tau": ..., "p_gamma": ...}`` with
    p = (1 + #{|stat_perm| >= |stat_obs|}) / (K + 1); permutations where
    a statistic is undefined count as exceeding.
    """
    if k < 1:
        raise ValueError("need at least one permutation")
    cfg = centroid_configuration(ds)
    obs = ibi_pair(side_lengths(cfg))
    sizes = [len(ds.group_indices(g)) for g in GROUPS]
    ends = np.cumsum(sizes)

    perm_means = np.empty((k, 3, ds.p))
    for j in range(k):
        rng = stream_generator(seed, DOMAIN_PERMUTATION, j)
        order = rng.permutation(ds.n)
        start = 0
        for g, end in enumerate(ends):
            perm_means[j, g] = ds.features[order[start:end]].mean(axis=0)
            start = end
    stats = _centroid_shape_stats(perm_means[:, 0], perm_means[:, 1], perm_means[:, 2])

    def pvalue(perm_vals: np.ndarray, observed: float) -> float:
        exceed = ~np.isfinite(perm_vals)  # undefined counts as extreme
        if math.isfinite(observed):
            exceed |= np.abs(perm_vals) >= abs(observed)
            return (1.0 + np.count_nonzero(exceed)) / (k + 1.0)
        return 1.0

    return {
        "p_tau": pvalue(stats["tau"], obs.tau),
        "p_gamma": pvalue(stats["gamma"], obs.gamma),
    }


# ---------------------------------------------------------------------------
# coverage simulation


def coverage_simulation(
    r: float,
    phi: float,
    p: int,
    n_per_group: int,
    sigma2: float,
    n_sims: int,
    k: int,
    seed: int,
    level: float = 0.95,
) -> dict:
    """Monte-Carlo check of CI/region coverage around a known mean shape.

    Each simulated dataset draws ``n_per_group`` observations per group
    around a mean configuration with shape (r, phi), scaled so the RMS
    landmark distance from the centroid is 1 (Frobenius size sqrt(3)).
    Reports the fraction of tau intervals containing the true tau, the
    mean interval length, the fraction of shape-space regions whose depth
    threshold the true (u, v) attains, and the mean region area.
    """
    if min(n_per_group, n_sims, k) < 1 or sigma2 <= 0 or p < 2:
        raise ValueError("all simulation parameters must be positive (p >= 2)")
    mean_cfg = mean_configuration_from_shape(r, phi, p=p)
    spec = GroupSpec(means=mean_cfg.landmarks * _SQRT3, sigma2=sigma2, n=n_per_group)
    tau_true = r * math.cos(phi - math.pi / 3.0)
    uv_true = np.array([r * math.cos(phi), r * math.sin(phi)])

    ci_hits = 0
    cr_hits = 0
    lengths = np.empty(n_sims)
    areas = np.empty(n_sims)
    for s in range(n_sims):
        data = sample_grouped_dataset(spec, stream_generator(seed, DOMAIN_SIMULATION, s))
        boot_seed = int(
            np.random.SeedSequence(
                entropy=int(seed), spawn_key=(DOMAIN_SIMULATION, s, 1)
            ).generate_state(1, np.uint64)[0]
        )
        ens = stratified_bootstrap(data, k=k, seed=boot_seed)
        lo, hi = percentile_ci(ens.tau, level)
        ci_hits += lo <= tau_true <= hi
        lengths[s] = hi - lo
        cr = confidence_region(ens, level)
        valid = ens.valid_mask()
        cloud = np.column_stack([ens.u[valid], ens.v[valid]])
        cr_hits += tukey_depth(uv_true, cloud) >= cr.depth_threshold
        areas[s] = cr.area
    return {
        "ci_coverage": ci_hits / n_sims,
        "ci_length": float(lengths.mean()),
        "cr_coverage": cr_hits / n_sims,
        "cr_area": float(areas.mean()),
    }
