import json
import threading

import numpy as np
import pytest

from attentiv.cli import main
from attentiv.stream import SessionEngine
from attentiv.stream.server import SessionServer
from tests.conftest import labeled_csv, raw_wave, write_csv


@pytest.fixture
def dataset_csv(tmp_path):
    return labeled_csv(tmp_path / "data.csv")


def write_raw_csv(path, samples):
    return write_csv(path, ("timestamp", "channel", "value"),
                     [list(row) for row in samples])


@pytest.fixture
def live_server(band_model):
    model, scaler = band_model
    engine = SessionEngine()
    engine.register_model("default", model, scaler)
    server = SessionServer(("127.0.0.1", 0), engine)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield server
    server.shutdown()
    server.server_close()


class TestTrain:
    def test_writes_versioned_model_file(self, tmp_path):
        data = labeled_csv(tmp_path / "six.csv", n_per_class=3)
        out = tmp_path / "model.attentiv"
        code = main(["train", "--dataset", str(data), "--algorithm", "nb",
                     "--seed", "7", "--model-out", str(out)])
        assert code == 0
        assert out.read_text().startswith("attentiv-model v1\n")

    def test_missing_dataset_maps_to_exit_code(self, tmp_path, capsys):
        code = main(["train", "--dataset", str(tmp_path / "nope.csv"),
                     "--algorithm", "nb", "--seed", "1",
                     "--model-out", str(tmp_path / "m")])
        assert code != 0
        assert "Error" in capsys.readouterr().err


class TestEvaluate:
    def test_saved_model_on_its_own_data_is_perfect(self, tmp_path,
                                                    dataset_csv, capsys):
        model_path = tmp_path / "svm.model"
        assert main(["train", "--dataset", str(dataset_csv),
                     "--algorithm", "svm", "--seed", "3",
                     "--model-out", str(model_path)]) == 0
        out_dir = tmp_path / "reports"
        code = main(["evaluate", "--dataset", str(dataset_csv),
                     "--model", str(model_path),
                     "--out-dir", str(out_dir)])
        assert code == 0
        payload = json.loads((out_dir / "metrics.json").read_text())
        assert payload["accuracy"] == 1.0
        for cls in ("0", "1"):
            for metric in ("precision", "recall", "f1"):
                assert payload["per_class"][cls][metric] == 1.0
        assert (out_dir / "metrics.txt").exists()
        assert (out_dir / "metrics_confusion.png").exists()
        assert (out_dir / "correlation.csv").exists()
        assert (out_dir / "correlation.png").exists()

    def test_split_mode_trains_fresh(self, tmp_path, dataset_csv):
        out_dir = tmp_path / "r"
        code = main(["evaluate", "--dataset", str(dataset_csv),
                     "--algorithm", "nb", "--seed", "5",
                     "--split", "0.25", "--out-dir", str(out_dir),
                     "--no-figures"])
        assert code == 0
        assert (out_dir / "metrics.json").exists()
        assert not (out_dir / "metrics_confusion.png").exists()

    def test_by_subject_split(self, tmp_path, dataset_csv):
        out_dir = tmp_path / "r"
        code = main(["evaluate", "--dataset", str(dataset_csv),
                     "--algorithm", "nb", "--seed", "5", "--by-subject",
                     "--out-dir", str(out_dir), "--no-figures"])
        assert code == 0


class TestCrossval:
    def test_writes_fold_and_summary_files(self, tmp_path, dataset_csv):
        out_dir = tmp_path / "cv"
        code = main(["crossval", "--dataset", str(dataset_csv),
                     "--algorithm", "nb", "--k", "5", "--seed", "2",
                     "--out-dir", str(out_dir)])
        assert code == 0
        payload = json.loads((out_dir / "crossval.json").read_text())
        assert len(payload["fold_accuracies"]) == 5
        assert 0 <= payload["mean_accuracy"] <= 1
        lines = (out_dir / "crossval.csv").read_text().splitlines()
        assert lines[0] == "fold,accuracy"
        assert lines[-2].startswith("mean,")
        assert lines[-1].startswith("std,")
        assert (out_dir / "crossval.png").exists()

    def test_seed_is_mandatory(self, dataset_csv, capsys):
        with pytest.raises(SystemExit):
            main(["crossval", "--dataset", str(dataset_csv),
                  "--algorithm", "nb", "--k", "5"])


class TestRoc:
    def test_csv_with_auc_footer(self, tmp_path, dataset_csv):
        out_dir = tmp_path / "roc"
        code = main(["roc", "--dataset", str(dataset_csv),
                     "--algorithm", "nb", "--seed", "4",
                     "--out-dir", str(out_dir)])
        assert code == 0
        lines = (out_dir / "roc.csv").read_text().splitlines()
        assert lines[0] == "fpr,tpr,threshold"
        assert lines[-1].startswith("# auc=")
        auc = float(lines[-1].split("=")[1])
        assert 0.9 <= auc <= 1.0
        assert (out_dir / "roc.png").exists()


class TestExtract:
    def test_window_count_and_figure(self, tmp_path):
        raw = write_raw_csv(tmp_path / "raw.csv", raw_wave(2, seed=1))
        out = tmp_path / "features.csv"
        code = main(["extract", "--input", str(raw), "--output", str(out)])
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0].startswith("window_start,channel,e_delta")
        assert len(lines) == 3  # header + 2 windows
        assert (tmp_path / "features_bands.png").exists()


class TestReplay:
    def test_two_second_file_reports_two_windows(self, tmp_path,
                                                 live_server, capsys):
        raw = write_raw_csv(tmp_path / "raw.csv", raw_wave(2, seed=2))
        code = main(["replay", "--input", str(raw),
                     "--port", str(live_server.port),
                     "--rate", "1000", "--model-id", "default"])
        assert code == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["total_windows"] == 2
        assert summary["included_windows"] == 2

    def test_replay_matches_batch_extract_pipeline(self, tmp_path,
                                                   live_server, band_model,
                                                   capsys):
        import attentiv.dsp as dsp
        from attentiv.classifiers import predict
        from attentiv.features import FeatureMatrix, apply_scaler

        samples = raw_wave(4, seed=9)
        raw_path = write_raw_csv(tmp_path / "raw.csv", samples)
        preds_path = tmp_path / "preds.csv"
        code = main(["replay", "--input", str(raw_path),
                     "--port", str(live_server.port), "--rate", "0",
                     "--predictions-out", str(preds_path)])
        assert code == 0

        model, scaler = band_model
        raw = [dsp.RawSample(t, v, c) for t, c, v in samples]
        rows = dsp.extract_feature_rows(raw)
        vectors = np.array([[getattr(be, n) for n in model.feature_names]
                            for _, be in rows])
        batch = predict(model, apply_scaler(
            FeatureMatrix(vectors, model.feature_names), scaler))

        lines = preds_path.read_text().splitlines()[1:]
        assert len(lines) == len(batch)
        for line, want in zip(lines, batch):
            _, label, score = line.split(",")[:3]
            assert int(label) == want.label
            assert float(score) == want.score

    def test_closed_port_maps_to_network_exit_code(self, tmp_path, capsys):
        raw = write_raw_csv(tmp_path / "raw.csv", raw_wave(1))
        code = main(["replay", "--input", str(raw), "--port", "1",
                     "--rate", "0"])
        assert code == 16
        assert "NetworkError" in capsys.readouterr().err


class TestReproducibility:
    def test_reports_byte_identical_across_runs(self, tmp_path, dataset_csv,
                                                monkeypatch):
        monkeypatch.setenv("ATTENTIV_CLOCK", "1700000000")
        dirs = [tmp_path / "run1", tmp_path / "run2"]
        for out_dir in dirs:
            code = main(["crossval", "--dataset", str(dataset_csv),
                         "--algorithm", "nb", "--k", "4", "--seed", "11",
                         "--out-dir", str(out_dir)])
            assert code == 0
        for name in ("crossval.json", "crossval.csv", "crossval.png"):
            assert ((dirs[0] / name).read_bytes()
                    == (dirs[1] / name).read_bytes())

    def test_model_files_byte_identical(self, tmp_path, dataset_csv,
                                        monkeypatch):
        monkeypatch.setenv("ATTENTIV_CLOCK", "1700000000")
        paths = [tmp_path / "a.model", tmp_path / "b.model"]
        for path in paths:
            assert main(["train", "--dataset", str(dataset_csv),
                         "--algorithm", "rf", "--trees", "10",
                         "--seed", "21", "--model-out", str(path)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()


class TestServeValidation:
    def test_serve_without_models_fails(self, capsys):
        code = main(["serve", "--port", "0"])
        assert code == 2
        assert "ParameterError" in capsys.readouterr().err
