import numpy as np
import pytest

from ibistat import tukey_depth, tukey_depths
from _oracles import halfspace_depth_enumeration


def test_point_far_outside_has_zero_depth():
    cloud = np.random.default_rng(0).normal(size=(40, 2))
    assert tukey_depth([100.0, 100.0], cloud) == 0.0


def test_center_of_symmetric_cross():
    cloud = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    assert tukey_depth([0.0, 0.0], cloud) == 0.5


def test_cloud_member_depth_at_least_one_over_n():
    rng = np.random.default_rng(1)
    cloud = rng.normal(size=(25, 2))
    depths = tukey_depths(cloud, cloud)
    assert np.all(depths >= 1.0 / len(cloud))


def test_matches_enumeration_on_random_clouds():
    rng = np.random.default_rng(2)
    for _ in range(120):
        n = int(rng.integers(1, 51))
        cloud = rng.normal(size=(n, 2))
        q = rng.normal(size=2) * rng.choice([0.3, 1.0, 3.0])
        assert tukey_depth(q, cloud) == halfspace_depth_enumeration(q, cloud)


def test_matches_enumeration_with_duplicates_and_ties():
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.integers(4, 40))
        base = rng.integers(-3, 4, size=(n, 2)).astype(float)
        cloud = base[rng.integers(0, n, size=n)]  # duplicates guaranteed
        q = base[int(rng.integers(0, n))]
        assert tukey_depth(q, cloud) == halfspace_depth_enumeration(q, cloud)


def test_depth_of_query_coincident_with_whole_cloud():
    cloud = np.zeros((5, 2))
    assert tukey_depth([0.0, 0.0], cloud) == 1.0


def test_invalid_cloud():
    with pytest.raises(ValueError):
        tukey_depth([0.0, 0.0], np.zeros((0, 2)))
    with pytest.raises(ValueError):
        tukey_depth([0.0, 0.0], np.zeros((3, 3)))
