import json
import re

import numpy as np
import pytest
import yaml

from simhaystack.cli import main
from simhaystack.imageops import save_png
from simhaystack.synthcorpus import generate_corpus_dir, generate_image


@pytest.fixture()
def scene_png(tmp_path):
    path = tmp_path / "scene.png"
    save_png(generate_image(31337, 96, 72), path)
    return path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestHashCommand:
    def test_dhash_line_format(self, scene_png, capsys):
        code, out, _ = run(capsys, "hash", "--algo", "dhash", "--bits", "64", scene_png)
        assert code == 0
        assert re.fullmatch(r"dhash/64:[0-9a-f]{16}\n", out)

    def test_crop_resistant_prints_segments(self, scene_png, capsys):
        code, out, _ = run(capsys, "hash", "--algo", "crop_resistant", scene_png)
        assert code == 0
        assert out.startswith("crop_resistant/64:")

    def test_unknown_flag_usage_error(self, scene_png, capsys):
        code, _, _ = run(capsys, "hash", "--frobnicate", scene_png)
        assert code == 1


class TestPerturbCommand:
    def test_full_suite_writes_58_and_manifest(self, scene_png, tmp_path, capsys):
        out_dir = tmp_path / "att"
        code, out, _ = run(capsys, "perturb", scene_png, "--out", out_dir, "--seed", 5)
        assert code == 0
        files = list(out_dir.glob("scene__*.png"))
        assert len(files) == 58
        manifest = json.loads((out_dir / "scene__manifest.json").read_text())
        assert len(manifest) == 58
        assert json.loads(out)["written"] == 58

    def test_single_family(self, scene_png, tmp_path, capsys):
        out_dir = tmp_path / "one"
        code, _, _ = run(
            capsys, "perturb", scene_png, "--out", out_dir, "--family", "jpeg", "--parameter", 50
        )
        assert code == 0
        assert len(list(out_dir.glob("*.png"))) == 1


class TestDbAndMatch:
    def test_build_db_then_match(self, tmp_path, capsys):
        corpus = generate_corpus_dir(tmp_path / "corpus", count=6, width=64, height=48, seed=2)
        db_path = tmp_path / "db.json"
        code, out, _ = run(capsys, "build-db", "--backend", "dhash/64", "--images", corpus, "--out", db_path)
        assert code == 0
        assert json.loads(out)["entries"] == 6
        query = corpus / "img00003.png"
        code, out, _ = run(capsys, "match", "--database", db_path, "--threshold", "0.05", query)
        assert code == 0
        doc = json.loads(out)
        assert doc["match"] == "img00003.png"
        assert doc["distance"] == 0.0

    def test_match_below_threshold_is_null(self, tmp_path, capsys):
        corpus = generate_corpus_dir(tmp_path / "corpus", count=4, width=64, height=48, seed=2)
        db_path = tmp_path / "db.json"
        run(capsys, "build-db", "--backend", "dhash/64", "--images", corpus, "--out", db_path)
        foreign = tmp_path / "foreign.png"
        save_png(generate_image(999999, 64, 48), foreign)
        code, out, _ = run(capsys, "match", "--database", db_path, "--threshold", "0.0", foreign)
        assert code == 0
        assert json.loads(out)["match"] is None


class TestBenchCommands:
    def write_config(self, tmp_path, corpus, **over):
        doc = {
            "dataset": {"path": str(corpus)},
            "backends": ["dhash/64"],
            "sample_count": 2,
            "seed": 9,
            "suite": "none",
            "jobs": 1,
            "output": str(tmp_path / "out"),
        }
        doc.update(over)
        path = tmp_path / "exp.yaml"
        path.write_text(yaml.safe_dump(doc))
        return path

    def test_bench_synthetic_writes_result_and_prints_auc(self, tmp_path, capsys):
        corpus = generate_corpus_dir(tmp_path / "corpus", count=10, width=64, height=48, seed=4)
        cfg = self.write_config(tmp_path, corpus)
        result_path = tmp_path / "results.json"
        code, out, err = run(capsys, "bench-synthetic", "--config", cfg, "--result", result_path)
        assert code == 0
        assert "AUC" in out and "dhash/64" in out
        doc = json.loads(result_path.read_text())
        assert doc["result_version"] == 1
        code, out, _ = run(capsys, "verify", result_path)
        assert code == 0
        assert out.strip() == "ok"

    def test_seed_flag_overrides_config(self, tmp_path, capsys):
        corpus = generate_corpus_dir(tmp_path / "corpus", count=10, width=64, height=48, seed=4)
        cfg = self.write_config(tmp_path, corpus)
        r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
        run(capsys, "bench-synthetic", "--config", cfg, "--result", r1, "--seed", 123)
        run(capsys, "bench-synthetic", "--config", cfg, "--result", r2, "--seed", 321)
        d1 = json.loads(r1.read_text())
        d2 = json.loads(r2.read_text())
        assert d1["config"]["seed"] == 123 and d2["config"]["seed"] == 321
        assert d1["split"] != d2["split"]

    def test_missing_dataset_is_data_error(self, tmp_path, capsys):
        cfg = self.write_config(tmp_path, tmp_path / "nowhere")
        code, _, err = run(capsys, "bench-synthetic", "--config", cfg)
        assert code == 2
        assert "dataset" in err

    def test_verify_rejects_corrupted(self, tmp_path, capsys):
        corpus = generate_corpus_dir(tmp_path / "corpus", count=10, width=64, height=48, seed=4)
        cfg = self.write_config(tmp_path, corpus)
        result_path = tmp_path / "results.json"
        run(capsys, "bench-synthetic", "--config", cfg, "--result", result_path)
        doc = json.loads(result_path.read_text())
        key = next(iter(doc["backends"]))
        doc["backends"][key]["overall"]["auc"] = 0.0001
        result_path.write_text(json.dumps(doc))
        code, out, _ = run(capsys, "verify", result_path)
        assert code == 2
        assert "FAIL" in out


def test_export_plots_cli(tmp_path, capsys):
    corpus = generate_corpus_dir(tmp_path / "corpus", count=10, width=64, height=48, seed=4)
    cfg_doc = {
        "dataset": {"path": str(corpus)},
        "backends": ["ahash/16"],
        "sample_count": 2,
        "seed": 9,
        "suite": "none",
        "jobs": 1,
        "output": str(tmp_path / "out"),
    }
    cfg = tmp_path / "c.yaml"
    cfg.write_text(yaml.safe_dump(cfg_doc))
    result_path = tmp_path / "results.json"
    run(capsys, "bench-synthetic", "--config", cfg, "--result", result_path)
    code, out, _ = run(capsys, "export-plots", result_path, "--out", tmp_path / "plots", "--svg")
    assert code == 0
    written = json.loads(out)["written"]
    assert any(p.endswith(".csv") for p in written)
    assert any(p.endswith(".svg") for p in written)


def test_match_missing_embedding_is_data_error(tmp_path, capsys):
    from simhaystack.embeddist import write_embeddings
    from simhaystack.matching import Database, EmbeddingLookupEncoder, save_database
    import numpy as np

    emb_path = tmp_path / "v.emb1"
    write_embeddings(emb_path, "net", {"known.png": np.ones(4, dtype=np.float32)})
    enc = EmbeddingLookupEncoder("net", "js", source=emb_path)
    db = Database(enc, {"known.png": enc.fingerprint(None, "known.png")})
    db_path = tmp_path / "db.json"
    save_database(db, db_path)
    stranger = tmp_path / "stranger.png"
    save_png(generate_image(5, 32, 32), stranger)
    code, _, err = run(capsys, "match", "--database", db_path, "--threshold", "0.5",
                       "--embeddings", emb_path, stranger)
    assert code == 2
    assert "no embedding" in err


def test_bench_templates_cli(tmp_path, capsys):
    import numpy as np
    import yaml as _yaml

    rng = np.random.default_rng(6)
    root = tmp_path / "memes"
    root.mkdir()
    rows = ["image_file,template_label"]
    for label in ("A", "B", "C", "D"):
        img = rng.integers(0, 256, (40, 50, 3), dtype=np.uint8)
        save_png(img, root / f"{label}0.png")
        rows.append(f"{label}0.png,{label}")
        for v in (1, 2):
            save_png(img, root / f"{label}{v}.png")
            rows.append(f"{label}{v}.png,{label}")
    meta = tmp_path / "meta.csv"
    meta.write_text("\n".join(rows) + "\n")
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text(_yaml.safe_dump({"backends": ["dhash/64"], "seed": 1, "output": str(tmp_path / "out")}))
    result = tmp_path / "r.json"
    code, out, _ = run(capsys, "bench-templates", "--config", cfg, "--images", root,
                       "--metadata", meta, "--result", result)
    assert code == 0
    assert "dhash/64" in out
    doc = json.loads(result.read_text())
    assert doc["kind"] == "templates"
    code, out, _ = run(capsys, "verify", result)
    assert code == 0
