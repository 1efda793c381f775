"""End-to-end: dataset built by the primary CLI, separator trained and
exported, outputs adopted and scored by the primary pipeline.

The only coupling exercised here is the file contract: the manifest
JSONL plus the ``<id>_mix.wav`` / ``<id>_gt.wav`` / ``<id>_proc_nn.wav``
naming scheme.
"""

import filecmp

import numpy as np
import pytest

hushsep = pytest.importorskip("hushsep")
torch = pytest.importorskip("torch")
hushlab = pytest.importorskip("hushlab")

import yaml

from hushlab.audio import read_wav
from hushlab.cli import main as hushlab_main

from hushsep import (
    CausalSeparator,
    ModelConfig,
    TrainConfig,
    export_processed,
    load_pairs,
    read_wav_f32,
    train,
)


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    """Corpus + 10-stimulus transient test set rendered by the primary CLI."""
    tmp_path = tmp_path_factory.mktemp("nn_e2e")
    doc = {
        "corpus": {
            "dir": "corpus",
            "synthetic": {"clips_per_kind": 3, "clip_duration_s": 4.0},
        },
        "dataset": {"kind": "testset3"},
        "output": {"dir": "out"},
    }
    cfg = tmp_path / "run.yaml"
    cfg.write_text(yaml.safe_dump(doc))
    assert hushlab_main(["--config", str(cfg), "synth-corpus"]) == 0
    assert hushlab_main(["--config", str(cfg), "build-dataset"]) == 0
    return tmp_path, str(cfg)


def test_export_feeds_primary_pipeline(pipeline, capsys):
    tmp_path, cfg = pipeline
    out = tmp_path / "out"
    manifest = out / "manifest.jsonl"

    pairs = load_pairs(manifest, split="test")
    assert len(pairs) == 10
    assert all(mix.shape[0] == 5 * rate for _, mix, _, rate in pairs)

    torch.manual_seed(0)
    model = CausalSeparator(ModelConfig(enc_channels=16, latent_dim=64))
    config = TrainConfig(epochs=2, batch_size=4, chunk_samples=8192, seed=0)
    ckpt, losses = train(model, pairs, config, tmp_path / "run")
    assert len(losses) == 2

    nn_dir = tmp_path / "nn_out"
    written = export_processed(ckpt, manifest, out_dir=nn_dir)
    assert len(written) == 10
    for path in written:
        assert path.name.endswith("_proc_nn.wav")
        buffer = read_wav(path)  # the primary reader accepts the export
        assert buffer.sample_rate_hz == pairs[0][3]
        assert buffer.duration_s == pytest.approx(5.0)
        ours, _ = read_wav_f32(path)
        assert np.array_equal(buffer.samples, ours)

    rerun = export_processed(ckpt, manifest, out_dir=tmp_path / "nn_rerun")
    for pa, pb in zip(written, rerun):
        assert filecmp.cmp(pa, pb, shallow=False)

    assert (
        hushlab_main(
            ["--config", cfg, "process", "--algorithm", "nn",
             "--nn-dir", str(nn_dir)]
        )
        == 0
    )
    adopted = sorted(out.glob("*_proc_nn.wav"))
    assert len(adopted) == 10

    assert (
        hushlab_main(["--config", cfg, "evaluate", "--algorithms", "nn"]) == 0
    )
    assert "nn" in capsys.readouterr().out
    records = (out / "eval_records.csv").read_text()
    assert "nn" in records
    assert (out / "delta_sisnr_distribution.csv").exists()
