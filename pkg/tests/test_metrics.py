"""SI-SNR, ΔSI-SNR, bootstrap CI, Welch t-test, BH correction, records."""

import numpy as np
import pytest
from scipy import stats

from helpers import sine
from hushlab.metrics import (
    SI_SNR_CLAMP_DB,
    EvalRecord,
    bh_adjust,
    bootstrap_ci,
    delta_si_snr,
    read_eval_csv,
    si_snr,
    welch_t_test,
    write_eval_csv,
    write_eval_jsonl,
)


class TestSiSnr:
    def test_perfect_reconstruction_clamps(self):
        ref = sine(440.0, 0.1)
        assert si_snr(ref, ref) == SI_SNR_CLAMP_DB

    def test_scale_invariance_exact_clamp(self):
        ref = sine(440.0, 0.1)
        assert si_snr(3.0 * ref, ref) == SI_SNR_CLAMP_DB

    def test_hand_case_zero_db(self):
        ref = np.array([1.0, -1.0, 1.0, -1.0])
        est = np.array([2.0, 0.0, 0.0, -2.0])
        assert si_snr(est, ref) == pytest.approx(0.0, abs=1e-12)

    def test_scale_invariance_general(self):
        rng = np.random.default_rng(0)
        ref = rng.standard_normal(1000)
        est = ref + 0.3 * rng.standard_normal(1000)
        base = si_snr(est, ref)
        for alpha in (0.01, 0.5, 7.0, -2.0):
            assert si_snr(alpha * est, ref) == pytest.approx(base, abs=1e-6)

    def test_ref_scale_invariance(self):
        rng = np.random.default_rng(1)
        ref = rng.standard_normal(500)
        est = ref + 0.5 * rng.standard_normal(500)
        base = si_snr(est, ref)
        for alpha in (0.1, 4.0):
            assert si_snr(est, alpha * ref) == pytest.approx(base, abs=1e-6)

    def test_mean_subtraction(self):
        rng = np.random.default_rng(2)
        ref = rng.standard_normal(500)
        est = ref + 0.2 * rng.standard_normal(500)
        assert si_snr(est + 5.0, ref - 3.0) == pytest.approx(
            si_snr(est, ref), abs=1e-6
        )

    def test_orthogonal_estimate_floors(self):
        # zero projection is the -100 dB floor, even though the residual
        # equals the (nonzero) estimate
        ref = np.array([1.0, -1.0, 1.0, -1.0])
        est = np.array([1.0, 1.0, -1.0, -1.0])
        assert si_snr(est, ref) == -SI_SNR_CLAMP_DB

    def test_constant_estimate_floors(self):
        ref = sine(100.0, 0.01)
        est = np.full(len(ref), 0.7)
        assert si_snr(est, ref) == -SI_SNR_CLAMP_DB

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            si_snr(np.zeros(10), np.zeros(11))

    def test_zero_reference(self):
        with pytest.raises(ValueError):
            si_snr(np.ones(10), np.zeros(10))

    def test_known_snr(self):
        rng = np.random.default_rng(3)
        ref = rng.standard_normal(200000)
        noise = rng.standard_normal(200000)
        noise -= noise @ ref / (ref @ ref) * ref  # orthogonalize
        for target_db in (-10.0, 0.0, 10.0):
            scale = np.sqrt((ref @ ref) / (noise @ noise)) * 10 ** (-target_db / 20)
            assert si_snr(ref + scale * noise, ref) == pytest.approx(
                target_db, abs=0.01
            )


class TestDeltaSiSnr:
    def test_processed_equals_mixture_is_zero(self):
        rng = np.random.default_rng(4)
        ref = rng.standard_normal(1000)
        mix = ref + rng.standard_normal(1000)
        assert delta_si_snr(mix, mix, ref) == pytest.approx(0.0, abs=1e-9)

    def test_perfect_processing_positive(self):
        rng = np.random.default_rng(5)
        ref = rng.standard_normal(1000)
        mix = ref + rng.standard_normal(1000)
        assert delta_si_snr(ref, mix, ref) > 0.0

    def test_halved_error(self):
        rng = np.random.default_rng(6)
        ref = rng.standard_normal(500000)
        noise = rng.standard_normal(500000)
        noise -= noise @ ref / (ref @ ref) * ref
        noise *= np.sqrt((ref @ ref) / (noise @ noise))  # now 0 dB SI-SNR
        d = delta_si_snr(ref + noise / 2, ref + noise, ref)
        assert d == pytest.approx(6.02, abs=0.1)


class TestBootstrapCi:
    def test_constant_values(self):
        assert bootstrap_ci([5.0] * 20, seed=0) == (5.0, 5.0)

    def test_single_value(self):
        assert bootstrap_ci([3.25], seed=0) == (3.25, 3.25)

    def test_deterministic(self):
        vals = list(np.random.default_rng(7).standard_normal(50))
        assert bootstrap_ci(vals, seed=11) == bootstrap_ci(vals, seed=11)
        assert bootstrap_ci(vals, seed=11) != bootstrap_ci(vals, seed=12)

    def test_contains_sample_mean(self):
        vals = list(np.random.default_rng(8).standard_normal(100))
        lo, hi = bootstrap_ci(vals, seed=0)
        assert lo <= np.mean(vals) <= hi

    def test_clt_width(self):
        n = 10000
        vals = np.random.default_rng(9).standard_normal(n)
        lo, hi = bootstrap_ci(list(vals), n_boot=2000, level=0.95, seed=0)
        assert lo < 0.0 < hi
        expected = 2 * 1.96 / np.sqrt(n)
        assert (hi - lo) == pytest.approx(expected, rel=0.2)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            bootstrap_ci([], seed=0)

    def test_low_n_boot_rejected(self):
        with pytest.raises(ValueError):
            bootstrap_ci([1.0, 2.0], n_boot=50, seed=0)


class TestWelchTTest:
    def test_identical_samples(self):
        a = [1.0, 2.0, 3.0]
        assert welch_t_test(a, a) == pytest.approx(1.0, abs=1e-9)

    def test_two_point_identical(self):
        assert welch_t_test([1.0, 2.0], [1.0, 2.0]) == pytest.approx(1.0, abs=1e-9)

    def test_strong_effect(self):
        rng = np.random.default_rng(10)
        a = rng.normal(1.0, 1.0, 1000)
        b = rng.normal(0.0, 1.0, 1000)
        assert welch_t_test(list(a), list(b), alternative="greater") < 1e-10

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_scipy(self, seed):
        rng = np.random.default_rng(20 + seed)
        a = rng.normal(0.0, 1.0, int(rng.integers(3, 40)))
        b = rng.normal(0.3, 2.0, int(rng.integers(3, 40)))
        for alt in ("two_sided", "greater"):
            scipy_alt = "two-sided" if alt == "two_sided" else "greater"
            expected = stats.ttest_ind(a, b, equal_var=False,
                                       alternative=scipy_alt).pvalue
            assert welch_t_test(list(a), list(b), alt) == pytest.approx(
                expected, abs=1e-12
            )

    def test_degenerate_variance(self):
        assert welch_t_test([2.0, 2.0], [2.0, 2.0]) == 1.0
        assert welch_t_test([3.0, 3.0], [2.0, 2.0]) == 0.0

    def test_small_samples_rejected(self):
        with pytest.raises(ValueError):
            welch_t_test([1.0], [1.0, 2.0])

    def test_bad_alternative_rejected(self):
        with pytest.raises(ValueError):
            welch_t_test([1.0, 2.0], [3.0, 4.0], alternative="less")


def bh_oracle(p):
    """Literal step-up rule: q_(i) = min_{j >= i} p_(j) * m / j."""
    p = np.asarray(p, dtype=float)
    m = len(p)
    order = np.argsort(p, kind="stable")
    q = np.empty(m)
    best = 1.0
    for rank in range(m, 0, -1):
        i = order[rank - 1]
        best = min(best, p[i] * m / rank)
        q[i] = best
    return q.tolist()


class TestBhAdjust:
    def test_hand_case(self):
        got = bh_adjust([0.005, 0.01, 0.03, 0.04])
        assert got == pytest.approx([0.02, 0.02, 0.04, 0.04], abs=1e-12)

    def test_single(self):
        assert bh_adjust([0.37]) == [0.37]

    def test_all_ones(self):
        assert bh_adjust([1.0, 1.0, 1.0]) == [1.0, 1.0, 1.0]

    def test_pointwise_at_least_input(self):
        rng = np.random.default_rng(30)
        p = list(rng.uniform(0, 1, 25))
        q = bh_adjust(p)
        assert all(qi >= pi - 1e-15 for qi, pi in zip(q, p))

    def test_monotone_in_sorted_order(self):
        rng = np.random.default_rng(31)
        p = rng.uniform(0, 1, 25)
        q = np.asarray(bh_adjust(list(p)))
        order = np.argsort(p, kind="stable")
        assert np.all(np.diff(q[order]) >= -1e-15)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_bruteforce_oracle(self, seed):
        rng = np.random.default_rng(40 + seed)
        for _ in range(30):
            m = int(rng.integers(1, 20))
            p = list(rng.uniform(0, 1, m))
            assert bh_adjust(p) == pytest.approx(bh_oracle(p), abs=1e-12)

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            bh_adjust([0.5, 1.5])
        with pytest.raises(ValueError):
            bh_adjust([-0.1])


class TestEvalRecords:
    def _records(self):
        return [
            EvalRecord("ts3-test-0000", "drc", 4.25, 14.25),
            EvalRecord("ts3-test-0001", "lpf", -12.5, -2.5),
        ]

    def test_csv_roundtrip(self, tmp_path):
        path = tmp_path / "eval.csv"
        write_eval_csv(self._records(), path)
        back = read_eval_csv(path)
        assert back == self._records()

    def test_jsonl(self, tmp_path):
        import json

        path = tmp_path / "eval.jsonl"
        write_eval_jsonl(self._records(), path)
        lines = path.read_text().strip().split("\n")
        assert len(lines) == 2
        row = json.loads(lines[0])
        assert row["stimulus_id"] == "ts3-test-0000"
        assert row["delta_si_snr_db"] == 14.25
