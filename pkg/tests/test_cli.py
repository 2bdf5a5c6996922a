import pytest

from valirank.cli import main
from valirank.dataio import (
    load_report,
    write_estimates,
    write_labels,
    write_scores,
)

from instances import make_estimates, make_instance


@pytest.fixture
def dataset(tmp_path):
    scores, gold = make_instance(200, 30, 3)
    est = make_estimates(scores, gold, 200)
    paths = {
        "scores": tmp_path / "scores.tsv",
        "gold": tmp_path / "gold.tsv",
        "estimates": tmp_path / "estimates.tsv",
        "cv_scores": tmp_path / "cv_scores.tsv",
        "train_labels": tmp_path / "train_labels.tsv",
    }
    write_scores(scores, paths["scores"])
    write_labels(gold, paths["gold"])
    write_estimates(est, paths["estimates"])
    cv_scores, cv_labels = make_instance(201, 60, 3)
    write_scores(cv_scores, paths["cv_scores"])
    write_labels(cv_labels, paths["train_labels"])
    return paths


def utheoretic_args(paths, *extra):
    return [
        "--scores", str(paths["scores"]),
        "--estimates", str(paths["estimates"]),
        "--train-size", "60",
        "--method", "utheoretic",
        "--sigma", "1.0",
        *extra,
    ]


class TestExitCodes:
    def test_success_is_zero(self, dataset, tmp_path):
        out = tmp_path / "ranking.tsv"
        assert main(["rank", *utheoretic_args(dataset, "--out", str(out))]) == 0
        assert out.is_file()

    def test_usage_error_is_one(self, capsys):
        assert main(["rank"]) == 1  # missing --scores
        assert "usage error" in capsys.readouterr().err
        assert main(["no-such-command"]) == 1

    def test_configuration_error_is_one(self, dataset, capsys):
        code = main([
            "rank", "--scores", str(dataset["scores"]),
            "--estimates", str(dataset["estimates"]),  # no --train-size
            "--sigma", "1.0",
        ])
        assert code == 1
        assert "configuration error" in capsys.readouterr().err

    def test_data_error_is_two(self, tmp_path, capsys):
        bad = tmp_path / "scores.tsv"
        bad.write_text("not a header\n")
        code = main(["rank", "--scores", str(bad), "--sigma", "1.0", "--method", "baseline"])
        assert code == 2
        assert "data error" in capsys.readouterr().err


class TestCalibrate:
    def test_prints_fitted_sigma(self, dataset, capsys):
        code = main([
            "calibrate",
            "--cv-scores", str(dataset["cv_scores"]),
            "--train-labels", str(dataset["train_labels"]),
            "--grid", "1e-2:1e2:10",
        ])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("sigma: ") and "averaging: macro" in out
        float(out.splitlines()[0].split(": ")[1])  # parseable

    def test_bad_grid_spec(self, dataset, capsys):
        code = main([
            "calibrate",
            "--cv-scores", str(dataset["cv_scores"]),
            "--train-labels", str(dataset["train_labels"]),
            "--grid", "oops",
        ])
        assert code == 1


class TestRank:
    def test_byte_identical_reruns(self, dataset, tmp_path):
        out1, out2 = tmp_path / "r1.tsv", tmp_path / "r2.tsv"
        assert main(["rank", *utheoretic_args(dataset, "--out", str(out1))]) == 0
        assert main(["rank", *utheoretic_args(dataset, "--out", str(out2))]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_default_out_dir_from_environment(self, dataset, tmp_path, monkeypatch):
        target = tmp_path / "outputs"
        monkeypatch.setenv("VALIRANK_OUT", str(target))
        assert main(["rank", *utheoretic_args(dataset)]) == 0
        assert (target / "ranking.tsv").is_file()

    def test_cv_calibration_path(self, dataset, tmp_path):
        out = tmp_path / "ranking.tsv"
        code = main([
            "rank",
            "--scores", str(dataset["scores"]),
            "--cv-scores", str(dataset["cv_scores"]),
            "--train-labels", str(dataset["train_labels"]),
            "--grid", "1e-2:1e2:8",
            "--out", str(out),
        ])
        assert code == 0 and out.is_file()


class TestSimulate:
    def test_writes_curves_and_report(self, dataset, tmp_path):
        out = tmp_path / "sim"
        code = main([
            "simulate", *utheoretic_args(dataset),
            "--gold", str(dataset["gold"]),
            "--strategy", "dynamic",
            "--xi", "0.2", "--xi", "0.5",
            "--out", str(out),
        ])
        assert code == 0
        for name in ("er_macro.csv", "ner_macro.csv", "er_micro.csv", "ner_micro.csv"):
            assert (out / name).is_file()
        report = load_report(out / "report.yaml")
        assert report["configuration"]["strategy"] == "dynamic"
        assert report["configuration"]["sigma"] == 1.0
        assert len(report["visit_order"]) == 30
        assert set(report["averaging"]) == {"macro", "micro"}
        assert "0.2" in report["averaging"]["micro"]["ener"]
        assert {"rank", "sweep"} <= set(report["timings_seconds"])

    def test_plot_flag_renders_figure(self, dataset, tmp_path):
        out = tmp_path / "sim"
        code = main([
            "simulate", *utheoretic_args(dataset),
            "--gold", str(dataset["gold"]),
            "--xi", "0.2",
            "--out", str(out), "--plot",
        ])
        assert code == 0
        png = (out / "curves.png").read_bytes()
        assert png[:8] == b"\x89PNG\r\n\x1a\n"

    def test_requires_gold(self, dataset, capsys):
        assert main(["simulate", *utheoretic_args(dataset)]) == 1
        assert "gold" in capsys.readouterr().err

    def test_deterministic_report(self, dataset, tmp_path):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main([
                "simulate", *utheoretic_args(dataset),
                "--gold", str(dataset["gold"]), "--xi", "0.2", "--out", str(out),
            ]) == 0
            text = (out / "report.yaml").read_text()
            # wall-clock timings legitimately differ between runs
            outs.append("\n".join(l for l in text.splitlines() if "timings" not in l
                                  and not l.startswith("  rank:") and not l.startswith("  sweep:")))
        assert outs[0] == outs[1]


class TestRandomBaseline:
    def test_writes_mean_curve_and_ener(self, dataset, tmp_path):
        out = tmp_path / "rand"
        code = main([
            "random-baseline",
            "--scores", str(dataset["scores"]),
            "--gold", str(dataset["gold"]),
            "--trials", "10", "--seed", "3", "--xi", "0.2",
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "er_random_micro.csv").is_file()
        report = load_report(out / "report.yaml")
        assert report["configuration"]["trials"] == 10
        assert "0.2" in report["ener"]


class TestSplitSimulate:
    def test_writes_averaged_curves(self, dataset, tmp_path):
        out = tmp_path / "split"
        code = main([
            "split-simulate", *utheoretic_args(dataset),
            "--gold", str(dataset["gold"]),
            "--parts", "3", "--xi", "0.2",
            "--out", str(out),
        ])
        assert code == 0
        assert (out / "er_macro.csv").is_file() and (out / "er_micro.csv").is_file()
        report = load_report(out / "report.yaml")
        assert report["configuration"]["parts"] == 3
        assert report["skipped_parts"] == []
