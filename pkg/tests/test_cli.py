import os
import shutil
import subprocess

import pytest

from scribedist.cli import main
from scribedist.features import read_matrix_csv
from scribedist.forest import read_model, write_labels_csv
from scribedist.alignment import read_table_tsv


@pytest.fixture(scope="module")
def ws(fixtures_dir, tmp_path_factory):
    """A workspace with the fixture corpus aligned and vectorized once."""
    root = tmp_path_factory.mktemp("cli")
    for name in ("ms_A.txt", "ms_B.txt", "run.toml"):
        shutil.copy(os.path.join(fixtures_dir, name), root / name)
    cwd = os.getcwd()
    os.chdir(root)
    try:
        assert main(["align", "--manifest", "run.toml", "--out", "table.tsv"]) == 0
        assert main([
            "features", "--table", "table.tsv", "--kind", "words",
            "--top", "30", "--mode", "counts", "--per-siglum",
            "--out", "words.csv",
        ]) == 0
        assert main([
            "features", "--table", "table.tsv", "--kind", "ngrams",
            "--lengths", "3,4", "--top", "120", "--out", "ngrams.csv",
        ]) == 0
        assert main([
            "features", "--table", "table.tsv", "--kind", "ngrams",
            "--lengths", "3,4", "--top", "120", "--per-siglum",
            "--out", "ngrams.csv",
        ]) == 0
        combined = read_matrix_csv("ngrams.csv")
        write_labels_csv(
            [(sid, sid.split("-")[0]) for sid in combined.sample_ids],
            "labels.csv",
        )
    finally:
        os.chdir(cwd)
    return root


def run_in(ws, argv):
    cwd = os.getcwd()
    os.chdir(ws)
    try:
        return main(argv)
    finally:
        os.chdir(cwd)


# ------------------------------------------------------------- happy path

def test_align_wrote_a_readable_table(ws):
    table, meta = read_table_tsv(str(ws / "table.tsv"))
    assert len(table) > 1000
    assert meta["samples"] == 8


def test_features_wrote_both_sides(ws):
    ma = read_matrix_csv(str(ws / "words_A.csv"))
    mb = read_matrix_csv(str(ws / "words_B.csv"))
    assert ma.vocabulary.features == mb.vocabulary.features
    assert ma.n_samples == mb.n_samples == 8
    assert [s.split("-")[0] for s in ma.sample_ids] == ["A"] * 8


def test_zeta_command(ws):
    rc = run_in(ws, [
        "zeta", "--a", "words_A.csv", "--b", "words_B.csv",
        "--top", "5", "--out", "zeta.csv", "--svg", "zeta.svg",
    ])
    assert rc == 0
    assert (ws / "zeta.csv").exists()
    assert (ws / "zeta.svg").exists()


def test_forest_command(ws):
    rc = run_in(ws, [
        "--seed", "3",
        "forest", "--matrix", "ngrams.csv", "--labels", "labels.csv",
        "--trees", "12", "--out", "model.rf",
        "--importances", "mdi.csv", "--svg", "mdi.svg",
    ])
    assert rc == 0
    model = read_model(str(ws / "model.rf"))
    assert model.params.n_trees == 12
    assert model.params.seed == 3
    assert (ws / "mdi.csv").exists()
    assert (ws / "mdi.svg").exists()


def test_drift_command_with_boundaries(ws):
    (ws / "bounds.csv").write_text("pair,label\n4,second habit\n",
                                   encoding="utf-8")
    rc = run_in(ws, [
        "--seed", "7",
        "drift", "--a", "ngrams_A.csv", "--b", "ngrams_B.csv",
        "--subsets", "12", "--size", "40",
        "--boundaries", "bounds.csv",
        "--out", "drift.csv", "--svg", "drift.svg",
    ])
    assert rc == 0
    assert (ws / "drift.csv").exists()
    assert "second habit" in (ws / "drift.svg").read_text(encoding="utf-8")


def test_plot_regenerates_svgs(ws):
    assert run_in(ws, ["plot", "--kind", "zeta", "--data", "zeta.csv",
                       "--out", "zeta2.svg"]) == 0
    assert run_in(ws, ["plot", "--kind", "mdi", "--data", "mdi.csv",
                       "--out", "mdi2.svg"]) == 0
    assert run_in(ws, ["plot", "--kind", "drift", "--data", "drift.csv",
                       "--out", "drift2.svg"]) == 0
    for name in ("zeta2.svg", "mdi2.svg", "drift2.svg"):
        assert (ws / name).exists()


def test_run_command(ws):
    rc = run_in(ws, ["run", "--manifest", "run.toml", "--out-dir", "full"])
    assert rc == 0
    assert (ws / "full" / "report.json").exists()
    assert (ws / "full" / "drift.svg").exists()


# ------------------------------------------------------------- exit codes

def test_version_flag():
    with pytest.raises(SystemExit) as e:
        main(["--version"])
    assert e.value.code == 0


def test_bad_usage_exits_1():
    with pytest.raises(SystemExit) as e:
        main(["--bogus-flag", "run"])
    assert e.value.code == 1


def test_missing_subcommand_exits_1():
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == 1


def test_threads_must_be_positive(ws):
    assert run_in(ws, ["--threads", "0", "run", "--manifest", "run.toml"]) == 1


def test_missing_input_file_is_validation_error(ws):
    rc = run_in(ws, ["zeta", "--a", "absent.csv", "--b", "words_B.csv",
                     "--out", "z.csv"])
    assert rc == 1


def test_broken_manifest_is_validation_error(ws, tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("output_dir = \"out\"\n", encoding="utf-8")
    assert main(["run", "--manifest", str(bad)]) == 1


def test_semantic_misuse_is_runtime_error(ws):
    # ngrams without --lengths
    rc = run_in(ws, ["features", "--table", "table.tsv", "--kind", "ngrams",
                     "--top", "10", "--out", "x.csv"])
    assert rc == 2


def test_zeta_on_relative_matrices_is_runtime_error(ws):
    rc = run_in(ws, ["zeta", "--a", "ngrams_A.csv", "--b", "ngrams_B.csv",
                     "--out", "z.csv"])
    assert rc == 2


def test_drift_subset_larger_than_vocabulary_is_runtime_error(ws):
    rc = run_in(ws, ["drift", "--a", "ngrams_A.csv", "--b", "ngrams_B.csv",
                     "--subsets", "2", "--size", "100000", "--out", "d.csv"])
    assert rc == 2


def test_table_without_sample_count_needs_samples_flag(ws, tmp_path):
    from scribedist.alignment import write_table_tsv
    table, _ = read_table_tsv(str(ws / "table.tsv"))
    bare = tmp_path / "bare.tsv"
    write_table_tsv(table, str(bare))
    rc = main(["features", "--table", str(bare), "--kind", "words",
               "--top", "5", "--out", str(tmp_path / "w.csv")])
    assert rc == 2
    rc = main(["features", "--table", str(bare), "--kind", "words",
               "--top", "5", "--samples", "4", "--out", str(tmp_path / "w.csv")])
    assert rc == 0


# ------------------------------------------------------------- entrypoint

def test_installed_console_script_runs():
    exe = shutil.which("scribedist")
    assert exe, "console script not on PATH"
    out = subprocess.run([exe, "--version"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "scribedist" in out.stdout
