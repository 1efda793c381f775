"""Training loop: descent, reproducibility, checkpoints, and the
eight-mixture overfit check with its CPU time budget."""

import csv
import time

import pytest

hushsep = pytest.importorskip("hushsep")
torch = pytest.importorskip("torch")

from hushsep import (
    CausalSeparator,
    ModelConfig,
    TrainConfig,
    evaluate_loss,
    load_checkpoint,
    save_checkpoint,
    train,
)

TOY = ModelConfig(enc_channels=24, latent_dim=96)


def toy_model(seed=0):
    torch.manual_seed(seed)
    return CausalSeparator(TOY)


def toy_train_config(**overrides):
    base = dict(epochs=3, batch_size=8, chunk_samples=2048, seed=0)
    base.update(overrides)
    return TrainConfig(**base)


class TestTrainConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(epochs=0),
            dict(learning_rate=0.0),
            dict(learning_rate=-1e-4),
            dict(batch_size=0),
            dict(chunk_samples=0),
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            TrainConfig(**kwargs)

    def test_defaults(self):
        cfg = TrainConfig()
        assert cfg.learning_rate == pytest.approx(5e-4)
        assert cfg.seed == 0
        assert cfg.stop_at_loss is None


class TestTrainLoop:
    def test_loss_curve_csv(self, toy_pairs, tmp_path):
        _, losses = train(toy_model(), toy_pairs, toy_train_config(), tmp_path)
        assert len(losses) == 3
        with open(tmp_path / "loss_curve.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert [int(r["epoch"]) for r in rows] == [0, 1, 2]
        assert [float(r["train_loss"]) for r in rows] == pytest.approx(
            losses, abs=1e-5
        )

    def test_val_column_tracks_evaluate_loss(self, toy_pairs, tmp_path):
        model = toy_model()
        train_pairs, val_pairs = toy_pairs[:6], toy_pairs[6:]
        _, _ = train(
            model, train_pairs, toy_train_config(epochs=2), tmp_path, val_pairs
        )
        with open(tmp_path / "loss_curve.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert "val_loss" in rows[0]
        # the last recorded val loss is the final model's val loss
        assert float(rows[-1]["val_loss"]) == pytest.approx(
            evaluate_loss(model, val_pairs), abs=1e-5
        )

    def test_three_epoch_descent(self, toy_pairs, tmp_path):
        _, losses = train(toy_model(seed=1), toy_pairs, toy_train_config(), tmp_path)
        assert losses[-1] < losses[0]

    def test_reproducible_per_seed(self, toy_pairs, tmp_path):
        _, first = train(
            toy_model(seed=2), toy_pairs, toy_train_config(), tmp_path / "a"
        )
        _, second = train(
            toy_model(seed=2), toy_pairs, toy_train_config(), tmp_path / "b"
        )
        _, other = train(
            toy_model(seed=2),
            toy_pairs,
            toy_train_config(seed=9),
            tmp_path / "c",
        )
        assert first == second
        assert first != other

    def test_stop_at_loss_cuts_the_run_short(self, toy_pairs, tmp_path):
        _, losses = train(
            toy_model(),
            toy_pairs,
            toy_train_config(epochs=10, stop_at_loss=1e9),
            tmp_path,
        )
        assert len(losses) == 1

    def test_empty_pairs_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="no training pairs"):
            train(toy_model(), [], toy_train_config(), tmp_path)

    def test_chunk_below_receptive_field_rejected(self, toy_pairs, tmp_path):
        with pytest.raises(ValueError, match="receptive"):
            train(
                toy_model(),
                toy_pairs,
                toy_train_config(chunk_samples=1024),
                tmp_path,
            )


class TestCheckpoint:
    def test_roundtrip_preserves_val_loss(self, toy_pairs, tmp_path):
        model = toy_model(seed=3)
        ckpt_path, _ = train(
            model, toy_pairs, toy_train_config(epochs=2), tmp_path
        )
        loaded, payload = load_checkpoint(ckpt_path)
        assert payload["sample_rate_hz"] == 16000
        direct = evaluate_loss(model, toy_pairs)
        restored = evaluate_loss(loaded, toy_pairs)
        assert abs(direct - restored) < 1e-12

    def test_payload_records_configs_and_history(self, toy_pairs, tmp_path):
        ckpt_path, losses = train(
            toy_model(), toy_pairs, toy_train_config(), tmp_path
        )
        loaded, payload = load_checkpoint(ckpt_path)
        assert loaded.config == TOY
        assert payload["loss_history"] == losses
        assert payload["train_config"]["epochs"] == 3

    def test_save_without_training(self, tmp_path):
        model = toy_model(seed=4)
        path = save_checkpoint(model, tmp_path / "init.pt", sample_rate_hz=32000)
        loaded, payload = load_checkpoint(path)
        assert payload["sample_rate_hz"] == 32000
        assert payload["train_config"] is None
        for pa, pb in zip(model.state_dict().values(), loaded.state_dict().values()):
            assert torch.equal(pa, pb)

    def test_missing_checkpoint_rejected(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "none.pt")


class TestEvaluateLoss:
    def test_empty_pairs_rejected(self):
        with pytest.raises(ValueError, match="no evaluation pairs"):
            evaluate_loss(toy_model(), [])

    def test_full_clip_mean(self, toy_pairs):
        value = evaluate_loss(toy_model(seed=5), toy_pairs)
        assert isinstance(value, float)
        assert value == evaluate_loss(toy_model(seed=5), toy_pairs)


class TestOverfit:
    def test_eight_mixture_overfit_reaches_minus_five_db(self, toy_pairs, tmp_path):
        """Memorising 8 fixed mixtures must cross -5 dB within 500 steps."""
        t0 = time.perf_counter()
        model = toy_model(seed=7)
        config = toy_train_config(
            epochs=500, seed=7, stop_at_loss=-6.0  # one step per epoch at batch 8
        )
        _, losses = train(model, toy_pairs, config, tmp_path)
        elapsed = time.perf_counter() - t0
        print(
            f"overfit: {len(losses)} steps, final {losses[-1]:.2f} dB, "
            f"{elapsed:.1f}s"
        )
        assert min(losses) <= -5.0
        assert elapsed < 600.0
