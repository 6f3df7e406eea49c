import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from ibistat import (
    CsvParseError,
    FewerThanThreeGroupsError,
    UnknownGroupLabelError,
)
from ibistat.cli import main
from ibistat.datasets import iris_csv_path
from ibistat.report import dumps_report, load_csv, run_analysis
from ibistat.svgplot import glyph_count, is_well_formed_xml
from conftest import iris_config


def write_csv(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# CSV loading


def test_load_iris_counts(iris_ds):
    assert iris_ds.n == 150
    assert iris_ds.n_per_group() == {"A": 50, "B": 50, "C": 50}
    assert iris_ds.feature_names == (
        "sepal_length", "sepal_width", "petal_length", "petal_width",
    )


def test_load_csv_two_groups(tmp_path):
    path = write_csv(
        tmp_path / "two.csv",
        "x,grp\n1.0,setosa\n2.0,setosa\n3.0,versicolor\n4.0,versicolor\n",
    )
    cfg = iris_config(input_path=path, group_column="grp")
    with pytest.raises(FewerThanThreeGroupsError):
        load_csv(path, cfg)


def test_load_csv_bad_cell_names_row(tmp_path):
    path = write_csv(
        tmp_path / "bad.csv",
        "x,grp\n1.0,setosa\n2.0,setosa\nNA,versicolor\n4.0,versicolor\n"
        "5.0,virginica\n6.0,virginica\n",
    )
    cfg = iris_config(input_path=path, group_column="grp")
    with pytest.raises(CsvParseError) as err:
        load_csv(path, cfg)
    assert err.value.line == 4
    assert err.value.column == "x"


def test_load_csv_unknown_label(tmp_path):
    path = write_csv(
        tmp_path / "unknown.csv",
        "x,grp\n1.0,setosa\n2.0,weird\n",
    )
    cfg = iris_config(input_path=path, group_column="grp")
    with pytest.raises(UnknownGroupLabelError):
        load_csv(path, cfg)


def test_load_csv_missing_file():
    with pytest.raises(FileNotFoundError):
        load_csv("/nonexistent/nope.csv", iris_config())


# ---------------------------------------------------------------------------
# analyze command


def run_analyze(tmp_path, name, *extra):
    report = tmp_path / f"{name}.json"
    args = [
        "analyze",
        "--input", iris_csv_path(),
        "--group-col", "species",
        "--groups", "A=setosa,B=versicolor,C=virginica",
        "--boot", "400",
        "--seed", "7",
        "--report", str(report),
        *extra,
    ]
    assert main(args) == 0
    return report.read_bytes()


def test_analyze_report_consistency(tmp_path, iris_ds):
    raw = run_analyze(tmp_path, "report")
    report = json.loads(raw)
    obs = report["observed"]
    # internal consistency of the observed block
    assert abs(obs["tau"] - (3 * obs["b2"] - 1)) <= 1e-9
    assert abs(obs["u"] - obs["r"] * math.cos(obs["phi"])) <= 1e-12
    assert abs(obs["u"] ** 2 + obs["v"] ** 2 - obs["r"] ** 2) <= 1e-12
    # observed values match direct library calls
    from ibistat import observed_ibi

    pair = observed_ibi(iris_ds, mode="feature")
    assert abs(obs["tau"] - pair.tau) <= 1e-12
    assert abs(obs["gamma"] - pair.gamma) <= 1e-12
    # every CI brackets the bootstrap median
    from ibistat import standardize, stratified_bootstrap

    ens = stratified_bootstrap(standardize(iris_ds, "feature"), k=400, seed=7)
    med_tau = float(np.median(ens.tau))
    med_gamma = float(np.median(ens.gamma[np.isfinite(ens.gamma)]))
    for level, (lo, hi) in report["confidence_intervals"]["tau"].items():
        assert lo <= med_tau <= hi
    for level, (lo, hi) in report["confidence_intervals"]["gamma"].items():
        assert lo <= med_gamma <= hi
    assert report["diagnostics"]["degenerate_replicates"] == 0


def test_analyze_byte_identical_reruns(tmp_path):
    a = run_analyze(tmp_path, "a")
    b = run_analyze(tmp_path, "b")
    assert a == b


def test_analyze_thread_count_invariance(tmp_path):
    a = run_analyze(tmp_path, "t1", "--threads", "1")
    b = run_analyze(tmp_path, "t8", "--threads", "8")
    assert a == b


def test_analyze_feature_subset_and_modes(tmp_path):
    raw = run_analyze(
        tmp_path, "subset", "--features", "sepal_length,sepal_width",
        "--standardize", "none",
    )
    report = json.loads(raw)
    assert report["config"]["feature_columns"] == ["sepal_length", "sepal_width"]
    assert abs(report["observed"]["tau"] - 0.817) <= 0.002
    assert abs(report["observed"]["r"] - 0.877) <= 0.002


def test_analyze_observed_goldens(tmp_path):
    # all four features, no scaling: the tau reference value
    raw = run_analyze(tmp_path, "g1", "--standardize", "none", "--boot", "50")
    assert abs(json.loads(raw)["observed"]["tau"] - 0.909) <= 0.002
    # sepal pair, unit-variance scaling: the gamma reference value
    raw = run_analyze(
        tmp_path, "g2", "--features", "sepal_length,sepal_width", "--boot", "50"
    )
    assert abs(json.loads(raw)["observed"]["gamma"] - 0.103) <= 0.002


def test_analyze_env_var_thread_default(tmp_path, monkeypatch):
    monkeypatch.setenv("IBISTAT_THREADS", "4")
    a = run_analyze(tmp_path, "env4")
    monkeypatch.setenv("IBISTAT_THREADS", "1")
    b = run_analyze(tmp_path, "env1")
    assert a == b  # thread count must never change the bytes


def test_analyze_whiten_mode(tmp_path):
    raw = run_analyze(tmp_path, "whiten", "--standardize", "whiten", "--boot", "150")
    report = json.loads(raw)
    assert report["config"]["standardize"] == "whiten"
    obs = report["observed"]
    assert -1.0 <= obs["tau"] <= 1.0
    assert abs(obs["u"] ** 2 + obs["v"] ** 2 - obs["r"] ** 2) <= 1e-12


def test_analyze_permutation_block(tmp_path):
    raw = run_analyze(tmp_path, "perm", "--perm", "99")
    report = json.loads(raw)
    assert report["permutation"]["k"] == 99
    assert 0.0 < report["permutation"]["p_tau"] <= 1.0
    assert 0.0 < report["permutation"]["p_gamma"] <= 1.0
    # p-values are multiples of 1/(K+1) under the +1 convention
    assert round(report["permutation"]["p_tau"] * 100) == pytest.approx(
        report["permutation"]["p_tau"] * 100
    )


def test_analyze_svg_output(tmp_path):
    plot = tmp_path / "plot.svg"
    run_analyze(tmp_path, "withplot", "--plot", str(plot))
    svg = plot.read_text()
    assert is_well_formed_xml(svg)
    assert glyph_count(svg) == 4  # observed, median, max tau, min tau
    assert "stroke-dasharray" in svg  # the half-radius guide circle
    assert svg.count("<circle") > 400  # region member points drawn


def test_svg_without_regions_draws_disk_and_observed():
    from ibistat.svgplot import render_shape_space_svg

    svg = render_shape_space_svg(
        {"u": 0.3, "v": 0.4, "a2": 0.3, "b2": 0.4, "c2": 0.3}, regions=None
    )
    assert is_well_formed_xml(svg)
    assert 'id="marker-observed"' in svg
    assert glyph_count(svg) == 1  # only the observed triangle glyph
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


def test_analyze_missing_file_exit_code(tmp_path, capsys):
    code = main([
        "analyze", "--input", "/nope.csv", "--group-col", "species",
        "--groups", "A=a,B=b,C=c",
    ])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_analyze_rejects_bad_groups():
    with pytest.raises(SystemExit):
        main([
            "analyze", "--input", iris_csv_path(), "--group-col", "species",
            "--groups", "A=setosa,B=versicolor",
        ])


# ---------------------------------------------------------------------------
# simulate command


def test_simulate_single_run(tmp_path, capsys):
    out = tmp_path / "row.csv"
    code = main([
        "simulate", "--r", "0.5", "--phi", str(math.pi / 3), "--p", "2",
        "--n", "20", "--sigma2", "1.0", "--sims", "1", "--boot", "80",
        "--seed", "3", "--out", str(out),
    ])
    assert code == 0
    row = json.loads(capsys.readouterr().out)
    assert row["ci_coverage"] in (0.0, 1.0)
    assert row["n"] == 20
    lines = out.read_text().splitlines()
    assert lines[0] == "n,sigma2,ci_coverage,ci_length,cr_coverage,cr_area"
    assert len(lines) == 2


def test_simulate_deterministic(capsys):
    args = [
        "simulate", "--r", "0.4", "--phi", "1.0", "--p", "3",
        "--n", "15", "--sigma2", "0.5", "--sims", "2", "--boot", "60",
        "--seed", "11",
    ]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first


# ---------------------------------------------------------------------------
# report serialization


def test_report_floats_roundtrip_exactly():
    payload = {
        "a": 1.0 / 3.0,
        "b": [math.pi, 2.5e-17, 1e300],
        "c": {"nested": 0.1},
        "d": None,
        "e": True,
        "f": 42,
        "g": 'quote"and\\slash',
    }
    text = dumps_report(payload)
    parsed = json.loads(text)
    assert parsed["a"] == payload["a"]
    assert parsed["b"] == payload["b"]
    assert parsed["c"]["nested"] == payload["c"]["nested"]
    assert parsed["g"] == payload["g"]


def test_report_rejects_nan():
    with pytest.raises(ValueError):
        dumps_report({"bad": math.nan})


def test_run_analysis_regions_match_report(iris_ds):
    cfg = iris_config(boot_k=300, seed=2)
    report, ens, regions = run_analysis(cfg, iris_ds)
    for key, blk in report["regions"].items():
        assert blk["member_count"] == regions[key].member_points.shape[0]
        assert blk["area"] == regions[key].area
