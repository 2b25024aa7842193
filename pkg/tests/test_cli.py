import pytest
from typer.testing import CliRunner

from relnet.cli import app
from relnet.config import ExperimentConfig
from relnet.network.model_io import load_model

runner = CliRunner()


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch):
    for name in ExperimentConfig.model_fields:
        monkeypatch.delenv(f"RELNET_{name.upper()}", raising=False)


def dataset_args(paths):
    return ["--types", str(paths["types"]), "--facts", str(paths["facts"]), "--pos", str(paths["positives"])]


def invoke(*args):
    return runner.invoke(app, [str(a) for a in args])


class TestCommands:
    def test_synth(self, tmp_path):
        result = invoke("synth", "--out", tmp_path / "d", "--persons", 6, "--movies", 6, "--genres", 2,
                        "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        for name in ("types.txt", "facts.txt", "pos.txt", "truth_walks.txt"):
            assert (tmp_path / "d" / name).exists()

    def test_walks(self, synthetic_files, tmp_path):
        out = tmp_path / "walks_out"
        result = invoke("walks", "--types", synthetic_files["types"], "--target", "workedunder",
                        "--num-walks", 4, "--seed", 1, "--out", out, "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        lines = (out / "walks.txt").read_text(encoding="utf-8").splitlines()
        assert 1 <= len(lines) <= 4
        assert lines[0].startswith("1: ")

    def test_ground_dump(self, movie_files):
        (movie_files / "rules.txt").write_text(
            "1: actedin ; directed^-1\n2: sameperson ; actedin ; directed^-1\n", encoding="utf-8")
        result = invoke("ground", "--example", "workedunder(leo,marty)", "--types", movie_files / "types.txt",
                        "--facts", movie_files / "facts.txt", "--walks", movie_files / "rules.txt",
                        "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        assert "1 | leo,marty | leo;The Aviator;marty" in result.stdout
        assert "1 | leo,marty | leo;The Departed;marty" in result.stdout
        assert "2 | leo,marty | leo;leonardo;The Departed;marty" in result.stdout

    def test_train_predict_eval(self, synthetic_files, tmp_path):
        model_dir = tmp_path / "model"
        result = invoke("train", *dataset_args(synthetic_files), "--num-walks", 5, "--max-len", 4,
                        "--combiner", "noisyor", "--out", model_dir, "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        saved = load_model(model_dir / "model.txt")
        assert saved.combiner.value == "noisyor"
        assert (model_dir / "rules.tsv").exists() and (model_dir / "train_log.csv").exists()

        scored_dir = tmp_path / "scored"
        result = invoke("predict", "--model", model_dir / "model.txt", *dataset_args(synthetic_files),
                        "--out", scored_dir, "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        scores_path = scored_dir / "scores.csv"
        assert scores_path.exists()

        # positives only: AUC-ROC is undefined for a single file
        result = invoke("eval", scores_path, "--log-level", "WARNING")
        assert result.exit_code == 4

    def test_cv(self, synthetic_files, tmp_path):
        out = tmp_path / "cv"
        result = invoke("cv", *dataset_args(synthetic_files), "--num-walks", 4, "--max-len", 4, "--k", 2,
                        "--out", out, "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        assert (out / "results.csv").exists()
        assert (out / "manifest.txt").read_text(encoding="utf-8").startswith("# relnet experiment manifest")

    def test_eval_two_class_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "scores.csv").write_text("example_id,score,label\na,0.9,1\nb,0.1,0\nc,0.4,1\n", encoding="utf-8")
        result = invoke("eval", "scores.csv", "--log-level", "WARNING")
        assert result.exit_code == 0, result.output
        assert "1.000000" in result.stdout


class TestExitCodes:
    def test_missing_facts_file_is_a_config_error(self, synthetic_files, tmp_path):
        out = tmp_path / "cv"
        result = invoke("cv", "--types", synthetic_files["types"], "--facts", tmp_path / "absent.txt",
                        "--pos", synthetic_files["positives"], "--out", out, "--log-level", "ERROR")
        assert result.exit_code == 2
        assert not out.exists()

    def test_missing_required_setting(self, tmp_path):
        result = invoke("cv", "--out", tmp_path / "cv", "--log-level", "ERROR")
        assert result.exit_code == 2

    def test_invalid_setting(self, synthetic_files, tmp_path):
        result = invoke("cv", *dataset_args(synthetic_files), "--k", 1, "--out", tmp_path / "cv")
        assert result.exit_code == 2

    def test_malformed_facts_is_a_parse_error(self, movie_files, tmp_path):
        (movie_files / "facts.txt").write_text("actedin(leo,\n", encoding="utf-8")
        result = invoke("cv", "--types", movie_files / "types.txt", "--facts", movie_files / "facts.txt",
                        "--pos", movie_files / "pos.txt", "--out", tmp_path / "cv", "--log-level", "ERROR")
        assert result.exit_code == 3

    def test_undeclared_predicate_is_a_schema_error(self, movie_files, tmp_path):
        (movie_files / "facts.txt").write_text("produced(marty,m1).\n", encoding="utf-8")
        result = invoke("cv", "--types", movie_files / "types.txt", "--facts", movie_files / "facts.txt",
                        "--pos", movie_files / "pos.txt", "--out", tmp_path / "cv", "--log-level", "ERROR")
        assert result.exit_code == 3

    def test_bad_sweep_values(self, synthetic_files, tmp_path):
        result = invoke("sweep", "--values", "5,x", *dataset_args(synthetic_files), "--out", tmp_path / "s")
        assert result.exit_code == 2

    def test_missing_scores_file(self, tmp_path):
        result = invoke("eval", tmp_path / "absent.csv")
        assert result.exit_code == 2
