"""Objective separation metrics and subjective-rating statistics.

SI-SNR / ΔSI-SNR for separation quality, plus the three procedures used
to analyze listener ratings: percentile-bootstrap confidence intervals,
Welch's unequal-variance t-test, and Benjamini-Hochberg correction.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import stdtr

SI_SNR_CLAMP_DB = 100.0


def _as_samples(x) -> np.ndarray:
    samples = getattr(x, "samples", x)
    return np.asarray(samples, dtype=np.float64)


@dataclass(frozen=True)
class EvalRecord:
    """Per-stimulus evaluation result for one algorithm."""

    stimulus_id: str
    algorithm: str
    si_snr_db: float
    delta_si_snr_db: float


def si_snr(est, ref) -> float:
    """Scale-invariant signal-to-noise ratio in dB.

    Both signals are mean-subtracted; the estimate is projected onto the
    reference and the ratio of projection energy to residual energy is
    returned in dB, clamped to [-100, +100].

    Parameters
    ----------
    est, ref : AudioBuffer or array_like
        Equal-length signals of at least 2 samples; ``ref`` must carry
        nonzero energy after mean subtraction.

    Returns
    -------
    float
        SI-SNR in dB.  A zero-energy projection (estimate orthogonal to
        or independent of the reference) returns the -100 dB floor; a
        zero residual returns the +100 dB ceiling.
    """
    e = _as_samples(est)
    r = _as_samples(ref)
    if e.shape != r.shape or e.ndim != 1:
        raise ValueError(f"length mismatch: est {e.shape} vs ref {r.shape}")
    if len(e) < 2:
        raise ValueError(f"need at least 2 samples, got {len(e)}")
    e = e - e.mean()
    r = r - r.mean()
    ref_energy = float(np.dot(r, r))
    if ref_energy == 0.0:
        raise ValueError("reference is silent (zero energy after mean subtraction)")
    s_t = (float(np.dot(e, r)) / ref_energy) * r
    resid = e - s_t
    target_energy = float(np.dot(s_t, s_t))
    resid_energy = float(np.dot(resid, resid))
    # order matters: a zero projection floors even when the residual is zero too
    if target_energy == 0.0:
        return -SI_SNR_CLAMP_DB
    if resid_energy == 0.0:
        return SI_SNR_CLAMP_DB
    value = 10.0 * np.log10(target_energy / resid_energy)
    return float(np.clip(value, -SI_SNR_CLAMP_DB, SI_SNR_CLAMP_DB))


def delta_si_snr(processed, mixture, ref) -> float:
    """SI-SNR improvement of ``processed`` over ``mixture`` against ``ref``.

    Positive values indicate enhancement, negative degradation.
    """
    return si_snr(processed, ref) - si_snr(mixture, ref)


def bootstrap_ci(values, n_boot: int = 2000, level: float = 0.95,
                 seed: int = 0) -> tuple:
    """Percentile bootstrap confidence interval for the mean.

    Parameters
    ----------
    values : array_like
        Non-empty sample.
    n_boot : int
        Number of bootstrap resamples, at least 100.
    level : float
        Confidence level in (0, 1).
    seed : int
        Resampling is deterministic for a fixed seed.

    Returns
    -------
    (lo, hi) : tuple of float
    """
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or len(v) == 0:
        raise ValueError("values must be a non-empty 1-D sample")
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(v), size=(n_boot, len(v)))
    means = v[idx].mean(axis=1)
    alpha = 1.0 - level
    lo, hi = np.percentile(means, [100.0 * alpha / 2.0, 100.0 * (1.0 - alpha / 2.0)])
    return float(lo), float(hi)


def welch_t_test(a, b, alternative: str = "two_sided") -> float:
    """Welch's unequal-variance t-test.

    Parameters
    ----------
    a, b : array_like
        Samples of size >= 2 each.
    alternative : {"two_sided", "greater"}
        "greater" tests mean(a) > mean(b).

    Returns
    -------
    float
        p-value.  Both samples constant with equal means gives p = 1;
        constant with unequal means gives p = 0.
    """
    if alternative not in ("two_sided", "greater"):
        raise ValueError(f"alternative must be 'two_sided' or 'greater', got {alternative!r}")
    xa = np.asarray(a, dtype=np.float64)
    xb = np.asarray(b, dtype=np.float64)
    if len(xa) < 2 or len(xb) < 2:
        raise ValueError("each sample needs at least 2 observations")
    na, nb = len(xa), len(xb)
    va = float(np.var(xa, ddof=1))
    vb = float(np.var(xb, ddof=1))
    diff = float(xa.mean() - xb.mean())
    se2 = va / na + vb / nb
    if se2 == 0.0:
        if diff == 0.0:
            return 1.0
        return 0.0
    t = diff / np.sqrt(se2)
    df = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    if alternative == "greater":
        return float(stdtr(df, -t))
    return float(2.0 * stdtr(df, -abs(t)))


def bh_adjust(p_values) -> list:
    """Benjamini-Hochberg step-up adjusted p-values, in input order.

    Sorted ascending, q_(i) = min over j >= i of p_(j)·m/j, capped at 1.
    """
    p = np.asarray(p_values, dtype=np.float64)
    if p.ndim != 1 or len(p) == 0:
        raise ValueError("p_values must be a non-empty 1-D list")
    if np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("p-values must lie in [0, 1]")
    m = len(p)
    order = np.argsort(p, kind="stable")
    ranked = p[order] * m / np.arange(1, m + 1)
    q_sorted = np.minimum.accumulate(ranked[::-1])[::-1]
    q_sorted = np.minimum(q_sorted, 1.0)
    q = np.empty(m)
    q[order] = q_sorted
    return [float(x) for x in q]


def write_eval_csv(records, path) -> None:
    """Write EvalRecords as CSV with a fixed header."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["stimulus_id", "algorithm", "si_snr_db", "delta_si_snr_db"])
        for rec in records:
            writer.writerow([rec.stimulus_id, rec.algorithm,
                             f"{rec.si_snr_db:.6f}", f"{rec.delta_si_snr_db:.6f}"])


def write_eval_jsonl(records, path) -> None:
    """Write EvalRecords as JSON-lines, one record per line."""
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(asdict(rec)) + "\n")


def read_eval_csv(path) -> list:
    """Read EvalRecords back from ``write_eval_csv`` output."""
    records = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            records.append(EvalRecord(
                stimulus_id=row["stimulus_id"],
                algorithm=row["algorithm"],
                si_snr_db=float(row["si_snr_db"]),
                delta_si_snr_db=float(row["delta_si_snr_db"]),
            ))
    return records
