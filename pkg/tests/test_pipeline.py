"""Ingestion, orchestration, emission, and the command line."""

import json
import math
from pathlib import Path

import numpy as np
import pytest

from evicrit import cli, errors
from evicrit.core import CATALOG_IDS
from evicrit.datasets import (
    example_input_text,
    export_example_inputs,
    reference_fusion,
    reference_ratings,
    reference_weights,
)
from evicrit.entropy import EntropyTable
from evicrit.pipeline import (
    PipelineConfig,
    ingest_matrices,
    ingest_priors,
    ingest_scores,
    load_bpa_fixtures,
    load_ri_table,
    run_pipeline,
    windows,
)
from evicrit.selftest import random_reciprocal


@pytest.fixture()
def inputs(tmp_path):
    return export_example_inputs(tmp_path / "inputs")


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


# --- windows -----------------------------------------------------------------

def test_windows_cover_fourteen_ids():
    ids = [f"B{i}" for i in range(1, 15)]
    got = windows(ids, 4, 2)
    assert len(got) == 6
    assert got[0] == ("B1", "B2", "B3", "B4")
    assert got[-1] == ("B11", "B12", "B13", "B14")


def test_windows_edges():
    ids = ["a", "b", "c"]
    assert windows(ids, 3, 1) == (("a", "b", "c"),)
    assert windows(ids, 2, 5) == (("a", "b"),)
    assert windows(ids, 1, 1) == (("a",), ("b",), ("c",))
    with pytest.raises(errors.ConfigError):
        windows(ids, 4, 1)
    with pytest.raises(errors.ConfigError):
        windows(ids, 2, 0)


# --- ingestion ---------------------------------------------------------------

def test_ingest_scores_happy_path(inputs):
    means = ingest_scores(inputs["scores.csv"])
    assert tuple(means) == CATALOG_IDS
    assert means["B1"] == 5.0
    assert means["B2"] == 10.0
    assert means["B10"] == 0.0


def test_ingest_scores_rejects_bad_header(tmp_path):
    p = write(tmp_path / "s.csv", "expert,indicator,score\ne1,B1,5\n")
    with pytest.raises(errors.ParseError):
        ingest_scores(p)


def test_ingest_scores_out_of_range_names_line(tmp_path):
    rows = ["expert_id,indicator,score"]
    rows += [f"e1,{i},5" for i in CATALOG_IDS]
    rows[3] = "e1,B3,11"
    p = write(tmp_path / "s.csv", "\n".join(rows) + "\n")
    with pytest.raises(errors.ScoreOutOfRange) as exc:
        ingest_scores(p)
    assert ":4:" in str(exc.value)


def test_ingest_scores_unknown_indicator(tmp_path):
    p = write(tmp_path / "s.csv", "expert_id,indicator,score\ne1,B99,5\n")
    with pytest.raises(errors.UnknownIndicator):
        ingest_scores(p)


def test_ingest_scores_missing_indicator(tmp_path):
    rows = ["expert_id,indicator,score"]
    rows += [f"e1,{i},5" for i in CATALOG_IDS if i != "B14"]
    p = write(tmp_path / "s.csv", "\n".join(rows) + "\n")
    with pytest.raises(errors.MissingIndicator) as exc:
        ingest_scores(p)
    assert "B14" in str(exc.value)


def test_ingest_scores_non_numeric(tmp_path):
    p = write(tmp_path / "s.csv", "expert_id,indicator,score\ne1,B1,five\n")
    with pytest.raises(errors.ParseError):
        ingest_scores(p)


def test_ingest_matrices_happy_path(inputs):
    ids, experts = ingest_matrices(inputs["matrices.json"])
    assert ids == CATALOG_IDS
    assert len(experts) == 3
    assert experts[0][1].order == 14


def test_ingest_matrices_reciprocity_violation(tmp_path):
    doc = {"indicators": ["a", "b"],
           "experts": [{"id": "e1", "matrix": [[1.0, 2.0], [0.4, 1.0]]}]}
    p = write(tmp_path / "m.json", json.dumps(doc))
    with pytest.raises(errors.InvalidMatrix) as exc:
        ingest_matrices(p)
    msg = str(exc.value)
    assert "e1" in msg and "(1,2)" in msg and "(2,1)" in msg


def test_ingest_matrices_structure_errors(tmp_path):
    with pytest.raises(errors.ParseError):
        ingest_matrices(write(tmp_path / "a.json", "[1, 2]"))
    with pytest.raises(errors.ParseError):
        ingest_matrices(write(tmp_path / "b.json",
                              json.dumps({"indicators": ["a", "b"], "experts": []})))
    ragged = {"indicators": ["a", "b"],
              "experts": [{"id": "e1", "matrix": [[1.0, 2.0], [0.5]]}]}
    with pytest.raises(errors.ParseError):
        ingest_matrices(write(tmp_path / "c.json", json.dumps(ragged)))
    wrong_shape = {"indicators": ["a", "b", "c"],
                   "experts": [{"id": "e1", "matrix": [[1.0, 2.0], [0.5, 1.0]]}]}
    with pytest.raises(errors.OrderMismatch):
        ingest_matrices(write(tmp_path / "d.json", json.dumps(wrong_shape)))


def test_ingest_priors(tmp_path, inputs):
    priors = ingest_priors(inputs["priors.csv"])
    assert len(priors) == 14
    assert priors["B7"] == 0.4
    dup = write(tmp_path / "p.csv", "indicator,lambda\nB1,0.5\nB1,0.6\n")
    with pytest.raises(errors.ParseError):
        ingest_priors(dup)


def test_load_ri_table(inputs, tmp_path):
    table = load_ri_table(inputs["ri.json"])
    assert table[14] == 1.57
    with pytest.raises(errors.ParseError):
        load_ri_table(write(tmp_path / "ri.json", '{"three": 0.58}'))
    with pytest.raises(errors.ParseError):
        load_ri_table(write(tmp_path / "ri2.json", '{"3": -1.0}'))


def test_load_bpa_fixtures(tmp_path):
    doc = {i: {"frame": ["VL", "L", "M", "H", "VH"],
               "masses": [{"subset": ["H"], "mass": 1.0}]} for i in CATALOG_IDS}
    fixtures = load_bpa_fixtures(write(tmp_path / "f.json", json.dumps(doc)))
    assert set(fixtures) == set(CATALOG_IDS)
    del doc["B14"]
    with pytest.raises(errors.MissingIndicator):
        load_bpa_fixtures(write(tmp_path / "g.json", json.dumps(doc)))


def test_missing_file_is_io_error():
    with pytest.raises(errors.IoError):
        ingest_scores("/nonexistent/scores.csv")


# --- orchestration -----------------------------------------------------------

def run_example(inputs, **overrides):
    kwargs = dict(scores=inputs["scores.csv"], matrices=inputs["matrices.json"],
                  priors=inputs["priors.csv"], ri_table=inputs["ri.json"])
    kwargs.update(overrides)
    return run_pipeline(PipelineConfig(**kwargs))


def test_run_pipeline_reference_verdicts(inputs):
    manifest = run_example(inputs)
    assert manifest.consistency_report.acceptable
    assert manifest.rankings["weight"].top == "B8"
    assert manifest.rankings["adjusted_weight"].bottom == "B6"
    assert len(manifest.window_ids) == 6
    assert manifest.config["score_aggregation"] == "mean"
    assert manifest.config["bpa_source"] == "scores"
    assert set(manifest.timings) >= {"ingest", "aggregate", "consistency",
                                     "weighting", "fuzzify", "fuse", "rank"}


def test_run_pipeline_matches_reference_tables(inputs):
    manifest = run_example(inputs)
    ref = reference_weights()
    assert manifest.entropy_table.ids == ref.ids
    for got, want in zip(manifest.entropy_table.entropy, ref.entropy):
        assert got == pytest.approx(want, abs=5e-4)
    by_id = {r.indicator: r.rating.name for r in reference_ratings()}
    for indicator_id, _, label in manifest.ratings:
        assert label == by_id[indicator_id]


def test_run_pipeline_is_deterministic(inputs):
    a = run_example(inputs).to_dict()
    b = run_example(inputs).to_dict()
    a.pop("timings")
    b.pop("timings")
    assert a == b


def test_run_pipeline_inconsistent_gate(tmp_path, inputs):
    rng = np.random.default_rng(33)
    wild = random_reciprocal(rng, 14)
    doc = {"indicators": list(CATALOG_IDS),
           "experts": [{"id": "e1", "matrix": wild.values.tolist()}]}
    bad = write(tmp_path / "wild.json", json.dumps(doc))
    with pytest.raises(errors.InconsistentMatrix) as exc:
        run_example(inputs, matrices=bad)
    assert exc.value.report is not None
    assert exc.value.report.cr >= 0.1
    assert exc.value.stage == "consistency"
    forced = run_example(inputs, matrices=bad, force=True)
    assert not forced.consistency_report.acceptable


def test_run_pipeline_stage_annotation(inputs, tmp_path):
    missing = tmp_path / "nope.csv"
    with pytest.raises(errors.IoError) as exc:
        run_example(inputs, scores=missing)
    assert exc.value.stage == "ingest"


def test_run_pipeline_bpa_fixtures_override_scores(inputs, tmp_path):
    doc = {i: {"frame": ["VL", "L", "M", "H", "VH"],
               "masses": [{"subset": ["M", "H"], "mass": 0.5},
                          {"subset": ["VL", "L", "M", "H", "VH"], "mass": 0.5}]}
           for i in CATALOG_IDS}
    fixtures = write(tmp_path / "f.json", json.dumps(doc))
    manifest = run_example(inputs, bpa_fixtures=fixtures)
    assert manifest.config["bpa_source"] == "fixtures"
    # identical inputs in every window: no conflict anywhere
    assert all(r.conflict_k == 0.0 for r in manifest.window_results)


def test_run_pipeline_rejects_bad_config(inputs):
    with pytest.raises(errors.ConfigError):
        run_example(inputs, alpha=1.5)
    with pytest.raises(errors.ConfigError):
        run_example(inputs, overlap_mode="sometimes")
    with pytest.raises(errors.ConfigError):
        run_example(inputs, fmt="yaml")
    with pytest.raises(errors.ConfigError):
        run_example(inputs, window=0)


# --- emission ----------------------------------------------------------------

def test_emitted_files_and_round_trips(inputs, tmp_path):
    out = tmp_path / "out"
    manifest = run_example(inputs, out_dir=out, fmt="csv",
                           chart=tmp_path / "fig.svg")
    table = EntropyTable.from_csv((out / "entropy_table.csv").read_text())
    assert table == manifest.entropy_table
    ratings = (out / "ratings.csv").read_text().splitlines()
    assert ratings[0] == "indicator,score,label"
    assert len(ratings) == 15
    fusion = (out / "fusion.csv").read_text().splitlines()
    assert len(fusion) == 8  # header, six windows, average
    assert fusion[-1].startswith("Average,")
    parsed = json.loads((out / "manifest.json").read_text())
    assert parsed["version"] == manifest.version
    svg = (tmp_path / "fig.svg").read_text()
    assert svg.count('class="bar"') == 70


def test_chart_bytes_are_deterministic(inputs, tmp_path):
    run_example(inputs, chart=tmp_path / "a.svg")
    run_example(inputs, chart=tmp_path / "b.svg")
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_text_report_written(inputs, tmp_path):
    out = tmp_path / "out"
    run_example(inputs, out_dir=out, fmt="text")
    text = (out / "report.txt").read_text()
    for heading in ("Consistency", "Weighting", "Ratings", "Fusion", "Ranking"):
        assert heading in text
    assert "Average" in text


# --- bundled reference data ---------------------------------------------------

def test_reference_weights_fixture():
    ref = reference_weights()
    assert len(ref.ids) == 14
    assert math.fsum(ref.priors) == pytest.approx(2.7833, abs=1e-9)


def test_reference_ratings_fixture():
    ratings = reference_ratings()
    assert len(ratings) == 14
    assert ratings[7].indicator == "B8"
    assert ratings[7].rating.name == "H"


def test_reference_fusion_fixture():
    ref = reference_fusion()
    assert len(ref.windows) == 6
    assert ref.windows[0][0] == ("B1", "B2", "B3", "B4")
    total = math.fsum(m for _, m in ref.average.items())
    assert total == 1.0


def test_example_input_text_unknown_name():
    with pytest.raises(KeyError):
        example_input_text("bogus.csv")


# --- command line --------------------------------------------------------------

def cli_inputs(paths):
    return ["--scores", str(paths["scores.csv"]),
            "--matrices", str(paths["matrices.json"]),
            "--priors", str(paths["priors.csv"]),
            "--ri-table", str(paths["ri.json"])]


def test_cli_evaluate_success(inputs, tmp_path, capsys):
    code = cli.run(["evaluate", *cli_inputs(inputs),
                    "--out-dir", str(tmp_path / "out")])
    captured = capsys.readouterr()
    assert code == 0
    assert "top=B8" in captured.out
    assert (tmp_path / "out" / "manifest.json").exists()


def test_cli_evaluate_missing_file_exits_3(inputs, capsys):
    args = cli_inputs(inputs)
    args[1] = "/nonexistent/scores.csv"
    code = cli.run(["evaluate", *args])
    captured = capsys.readouterr()
    assert code == 3
    assert "ingest" in captured.err


def test_cli_evaluate_bad_flag_exits_1(inputs, capsys):
    code = cli.run(["evaluate", *cli_inputs(inputs), "--alpha", "2.0"])
    capsys.readouterr()
    assert code == 1


def test_cli_usage_error_exits_1(capsys):
    # argparse-level failures leave through SystemExit, remapped from 2 to 1
    with pytest.raises(SystemExit) as exc:
        cli.run(["evaluate"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        cli.run(["no-such-command"])
    assert exc.value.code == 1
    capsys.readouterr()


def test_cli_consistency_gate_exit_code(inputs, tmp_path, capsys):
    rng = np.random.default_rng(33)
    doc = {"indicators": list(CATALOG_IDS),
           "experts": [{"id": "e1",
                        "matrix": random_reciprocal(rng, 14).values.tolist()}]}
    bad = write(tmp_path / "wild.json", json.dumps(doc))
    code = cli.run(["consistency", "--matrices", str(bad),
                    "--ri-table", str(inputs["ri.json"])])
    captured = capsys.readouterr()
    assert code == 2
    assert '"acceptable": false' in captured.out


def test_cli_consistency_without_ri_for_order_14_exits_1(tmp_path, capsys):
    # the built-in random-index table stops at order 10
    rng = np.random.default_rng(33)
    doc = {"indicators": list(CATALOG_IDS),
           "experts": [{"id": "e1",
                        "matrix": random_reciprocal(rng, 14).values.tolist()}]}
    bad = write(tmp_path / "wild.json", json.dumps(doc))
    assert cli.run(["consistency", "--matrices", str(bad)]) == 1
    capsys.readouterr()


def test_cli_evaluate_inconsistent_exits_2(inputs, tmp_path, capsys):
    rng = np.random.default_rng(33)
    doc = {"indicators": list(CATALOG_IDS),
           "experts": [{"id": "e1",
                        "matrix": random_reciprocal(rng, 14).values.tolist()}]}
    bad = write(tmp_path / "wild.json", json.dumps(doc))
    args = cli_inputs(inputs)
    args[3] = str(bad)
    code = cli.run(["evaluate", *args])
    captured = capsys.readouterr()
    assert code == 2
    assert "--force" in captured.err


def test_cli_weights_subcommand(inputs, capsys):
    code = cli.run(["weights", "--matrices", str(inputs["matrices.json"]),
                    "--priors", str(inputs["priors.csv"])])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out.startswith("indicator,E,d,W,lambda,W_adj")


def test_cli_fuse_subcommand(tmp_path, capsys):
    doc = {"bpas": [
        {"frame": ["VL", "L", "M", "H", "VH"],
         "masses": [{"subset": ["H"], "mass": 0.6},
                    {"subset": ["VL", "L", "M", "H", "VH"], "mass": 0.4}]},
        {"frame": ["VL", "L", "M", "H", "VH"],
         "masses": [{"subset": ["H"], "mass": 0.6},
                    {"subset": ["VL", "L", "M", "H", "VH"], "mass": 0.4}]},
    ]}
    p = write(tmp_path / "bpas.json", json.dumps(doc))
    code = cli.run(["fuse", "--bpas", str(p)])
    captured = capsys.readouterr()
    assert code == 0
    payload = json.loads(captured.out)
    assert payload["conflict_k"] == 0.0
    assert payload["betp"]["H"] == pytest.approx(0.872, abs=1e-12)


def test_cli_version(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.run(["--version"])
    assert exc.value.code == 0
    assert "evicrit" in capsys.readouterr().out
