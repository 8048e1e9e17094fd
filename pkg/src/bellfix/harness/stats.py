"""Goodness of fit and empirical CHSH estimates for sampled runs."""
from __future__ import annotations

import math
from collections.abc import Iterable

import numpy as np

from ..fixed_povm import EffectLabel, JointDistribution, UndefinedConditionalError
from ..lhv_models import TrialRecord, TrialRecords
from ..measurements import CHSH_SIGNS

# 99.9th percentile of chi-square with 15 degrees of freedom
CHI2_15_999 = 37.70
CHI2_DOF = 15


class ModelViolationError(RuntimeError):
    """An outcome with zero model probability was observed."""


def observed_counts(expected: JointDistribution, records: Iterable[TrialRecord]) -> np.ndarray:
    if isinstance(records, TrialRecords):
        if (records.labels1, records.labels2) != (expected.labels1, expected.labels2):
            raise ValueError("records and expected table use different labels")
        return records.counts().astype(float)
    counts = np.zeros((4, 4))
    for r in records:
        try:
            counts[expected.labels1.index(r.out1), expected.labels2.index(r.out2)] += 1
        except ValueError:
            raise ModelViolationError(f"observed label pair ({r.out1}, {r.out2}) is not in the model") from None
    return counts


def chi_square(expected: JointDistribution, records: Iterable[TrialRecord]) -> float:
    """Pearson statistic over the cells with positive expected probability."""
    obs = observed_counts(expected, records)
    n = obs.sum()
    if n < 1:
        raise ValueError("chi-square needs at least one record")
    p = expected.probs
    impossible = (p == 0) & (obs > 0)
    if impossible.any():
        i, j = np.argwhere(impossible)[0]
        raise ModelViolationError(
            f"{int(obs[i, j])} trial(s) landed in zero-probability cell "
            f"({expected.labels1[i]}, {expected.labels2[j]})"
        )
    live = p > 0
    e = n * p[live]
    return float(np.sum((obs[live] - e) ** 2 / e))


def empirical_chsh(d: JointDistribution, n: int) -> tuple[float, float]:
    """CHSH from the conditional correlators of an empirical table, with its standard error.

    The error treats each tag block as an independent binomial sample of the
    product r1 * r2: var(E) ~ (1 - E^2) / n_block.
    """
    total = 0.0
    var = 0.0
    for (t1, t2), sign in CHSH_SIGNS.items():
        mass = 0.0
        signed = 0.0
        for r1 in (1, -1):
            for r2 in (1, -1):
                p = d[EffectLabel(t1, r1), EffectLabel(t2, r2)]
                mass += p
                signed += r1 * r2 * p
        n_block = round(mass * n)
        if n_block == 0:
            raise UndefinedConditionalError(f"no sampled trials in block ({t1}, {t2})")
        e = signed / mass
        total += sign * e
        var += max(1 - e * e, 0.0) / n_block
    return total, math.sqrt(var)
