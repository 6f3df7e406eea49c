import numpy as np
import pytest

from ibistat.datasets import iris_csv_path
from ibistat.report import AnalysisConfig, load_csv

IRIS_FEATURES = ("sepal_length", "sepal_width", "petal_length", "petal_width")
IRIS_GROUPS = {"A": "setosa", "B": "versicolor", "C": "virginica"}


def iris_config(features=(), **overrides) -> AnalysisConfig:
    defaults = dict(
        input_path=iris_csv_path(),
        group_column="species",
        group_order=dict(IRIS_GROUPS),
        feature_columns=tuple(features),
        standardize_mode="feature",
        boot_k=200,
        levels=(0.8, 0.95),
        seed=0,
    )
    defaults.update(overrides)
    return AnalysisConfig(**defaults)


@pytest.fixture(scope="session")
def iris_ds():
    return load_csv(iris_csv_path(), iris_config())


@pytest.fixture(scope="session")
def iris_sepal_ds():
    cfg = iris_config(features=("sepal_length", "sepal_width"))
    return load_csv(iris_csv_path(), cfg)


def random_configuration(rng: np.random.Generator, p: int = 2, scale: float = 1.0):
    from ibistat import Configuration

    return Configuration(scale * rng.normal(size=(3, p)))
