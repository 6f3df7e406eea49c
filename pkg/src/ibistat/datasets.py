"""Bundled example data."""

from importlib import resources


def iris_csv_path() -> str:
    """Filesystem path of the bundled iris measurements CSV.

    Columns: sepal_length, sepal_width, petal_length, petal_width,
    species (setosa / versicolor / virginica), 50 rows per species.
    """
    return str(resources.files("ibistat").joinpath("data/iris.csv"))
