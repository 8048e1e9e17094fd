"""Local models that reproduce the quantum statistics.

Instruction-set model
    At production the source draws a pair of instructions (one outcome
    label per particle) from a 16-cell table. Each particle carries its own
    instruction to its detector, and the detector outputs that label. Both
    stations act on local data only. If the table equals the quantum
    fixed-POVM distribution, the model reproduces it exactly, including the
    apparent violation of AB - Ab - aB - ab <= 2.

Advance-announcement model
    The setting pair is known at the source before the particles leave, so
    the source can draw the outcome pair from the quantum law for those
    settings and give each particle its half. This model makes no claim to
    be local when settings are chosen per trial. It shows that statistics
    from announced settings cannot separate quantum theory from a local
    theory.

Sampling
    Generator: numpy ``PCG64`` seeded with the integer seed. Draws are
    ``Generator.random`` doubles mapped to cells by inverse-CDF lookup over
    the 16 cells in row-major label order. With ``workers > 1`` the run is
    split into contiguous chunks, and chunk ``k`` uses child ``k`` of
    ``SeedSequence(seed).spawn(workers)``.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .fixed_povm import (
    LABELS_1,
    LABELS_2,
    NORM_TOL,
    EffectLabel,
    JointDistribution,
)
from .measurements import TAG_PAIRS, DensityOperator, SettingsQuartet, chsh_combination, outcome_table

WEIGHT_TOL = 1e-12
GENERATOR_ID = "numpy.random.PCG64/inverse-cdf-16"
RESULT_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


class InstructionPair(NamedTuple):
    out1: EffectLabel
    out2: EffectLabel


class TrialRecord(NamedTuple):
    trial_index: int
    out1: EffectLabel
    out2: EffectLabel
    hidden_seed_id: int


@dataclass(frozen=True, eq=False)
class InstructionModel:
    """Distribution over the 16 instruction pairs, same layout as a joint table."""

    weights: np.ndarray
    labels1: tuple[EffectLabel, ...] = LABELS_1
    labels2: tuple[EffectLabel, ...] = LABELS_2

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.shape != (4, 4):
            raise ValueError(f"instruction weights must be 4x4, got {w.shape}")
        if w.min() < 0:
            raise ValueError("instruction weights must be nonnegative")
        if abs(w.sum() - 1) > WEIGHT_TOL:
            raise ValueError(f"instruction weights sum to {w.sum()}, not 1")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def pairs(self) -> list[InstructionPair]:
        return [InstructionPair(l1, l2) for l1 in self.labels1 for l2 in self.labels2]


def instruction_model_from(d: JointDistribution) -> InstructionModel:
    if abs(d.probs.sum() - 1) > NORM_TOL:
        raise ValueError("joint distribution is not normalized")
    return InstructionModel(d.probs.copy(), d.labels1, d.labels2)


def predicted_distribution(m: InstructionModel) -> JointDistribution:
    return JointDistribution(m.weights.copy(), m.labels1, m.labels2)


# Detector rules: each one sees only the instruction its own particle carries.
def station1_response(instruction: EffectLabel) -> EffectLabel:
    return EffectLabel(instruction.tag, instruction.result)


def station2_response(instruction: EffectLabel) -> EffectLabel:
    return EffectLabel(instruction.tag, instruction.result)


def run_trial(pair: InstructionPair) -> tuple[EffectLabel, EffectLabel]:
    """Send each instruction to its own station and collect both outcomes."""
    return station1_response(pair.out1), station2_response(pair.out2)


def factorized_distribution(m: InstructionModel) -> JointDistribution:
    """Outcome table obtained by pushing every instruction pair through :func:`run_trial`."""
    probs = np.zeros((4, 4))
    for pair, w in zip(m.pairs, m.weights.reshape(-1)):
        o1, o2 = run_trial(pair)
        probs[m.labels1.index(o1), m.labels2.index(o2)] += w
    return JointDistribution(probs, m.labels1, m.labels2)


class TrialRecords(Sequence):
    """Compact run of trials: one flat cell index per trial.

    Behaves as a sequence of :class:`TrialRecord`; ``cells`` and ``streams``
    expose the raw arrays for bulk statistics.
    """

    def __init__(self, cells, streams, labels1=LABELS_1, labels2=LABELS_2):
        self.cells = np.asarray(cells, dtype=np.int64)
        self.streams = np.asarray(streams, dtype=np.int64)
        if self.cells.shape != self.streams.shape or self.cells.ndim != 1:
            raise ValueError("cells and streams must be 1-d arrays of equal length")
        self.labels1 = tuple(labels1)
        self.labels2 = tuple(labels2)

    def __len__(self):
        return len(self.cells)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return TrialRecords(self.cells[i], self.streams[i], self.labels1, self.labels2)
        n = len(self)
        if i < 0:
            i += n
        if not 0 <= i < n:
            raise IndexError(i)
        c = int(self.cells[i])
        return TrialRecord(i, self.labels1[c // 4], self.labels2[c % 4], int(self.streams[i]))

    def counts(self) -> np.ndarray:
        return np.bincount(self.cells, minlength=16).reshape(4, 4)

    def __add__(self, other: "TrialRecords") -> "TrialRecords":
        if (self.labels1, self.labels2) != (other.labels1, other.labels2):
            raise ValueError("cannot concatenate runs with different label sets")
        return TrialRecords(
            np.concatenate([self.cells, other.cells]),
            np.concatenate([self.streams, other.streams]),
            self.labels1,
            self.labels2,
        )


def _draw_cells(rng: np.random.Generator, cdf: np.ndarray, last: int, n: int) -> np.ndarray:
    u = rng.random(n)
    cells = np.searchsorted(cdf, u, side="right")
    return np.minimum(cells, last)


def sample_table(probs: np.ndarray, n: int, seed: int, workers: int = 1,
                 labels1=LABELS_1, labels2=LABELS_2) -> TrialRecords:
    """Draw ``n`` independent cells from a 4 x 4 probability table."""
    if n < 1:
        raise ValueError(f"need at least one trial, got {n}")
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    flat = np.asarray(probs, dtype=float).reshape(-1)
    cdf = np.cumsum(flat)
    cdf = cdf / cdf[-1]
    cdf[-1] = 1.0
    last = int(np.flatnonzero(flat > 0)[-1])
    if workers == 1:
        rng = np.random.Generator(np.random.PCG64(seed))
        cells = _draw_cells(rng, cdf, last, n)
        streams = np.zeros(n, dtype=np.int64)
    else:
        children = np.random.SeedSequence(seed).spawn(workers)
        sizes = [len(c) for c in np.array_split(np.arange(n), workers)]
        cells = np.concatenate([
            _draw_cells(np.random.Generator(np.random.PCG64(ss)), cdf, last, k)
            for ss, k in zip(children, sizes)
        ])
        streams = np.repeat(np.arange(workers), sizes)
    return TrialRecords(cells, streams, labels1, labels2)


def sample_instructions(m: InstructionModel, n: int, seed: int, workers: int = 1) -> TrialRecords:
    """``n`` trials of the instruction model; bit-identical for equal (m, n, seed, workers)."""
    return sample_table(m.weights, n, seed, workers, m.labels1, m.labels2)


def empirical_distribution(records: Iterable[TrialRecord]) -> JointDistribution:
    if isinstance(records, TrialRecords):
        if len(records) == 0:
            raise ValueError("cannot build a distribution from zero records")
        counts = records.counts()
        return JointDistribution(counts / counts.sum(), records.labels1, records.labels2)
    records = list(records)
    if not records:
        raise ValueError("cannot build a distribution from zero records")
    labels1 = tuple(sorted({r.out1 for r in records} | set(LABELS_1), key=_label_key))
    labels2 = tuple(sorted({r.out2 for r in records} | set(LABELS_2), key=_label_key))
    counts = np.zeros((len(labels1), len(labels2)))
    for r in records:
        counts[labels1.index(r.out1), labels2.index(r.out2)] += 1
    return JointDistribution(counts / counts.sum(), labels1, labels2)


def _label_key(label: EffectLabel):
    return (label.tag.lower(), label.tag.islower(), -label.result)


def tv_distance(p: JointDistribution, q: JointDistribution) -> float:
    if (p.labels1, p.labels2) != (q.labels1, q.labels2):
        raise ValueError("tables are indexed by different labels")
    return 0.5 * float(np.abs(p.probs - q.probs).sum())


@dataclass(frozen=True)
class AdvanceModel:
    """Per announced setting pair, a table {(r1, r2): p} the source samples from."""

    per_setting_tables: dict

    def __post_init__(self):
        if set(self.per_setting_tables) != set(TAG_PAIRS):
            raise ValueError("advance model needs one table per setting pair")
        for pair, table in self.per_setting_tables.items():
            if set(table) != set(RESULT_PAIRS):
                raise ValueError(f"table {pair} must cover all four result pairs")
            if min(table.values()) < 0:
                raise ValueError(f"table {pair} has negative entries")
            if abs(sum(table.values()) - 1) > WEIGHT_TOL:
                raise ValueError(f"table {pair} is not normalized")

    def correlator(self, tag1: str, tag2: str) -> float:
        return sum(r1 * r2 * p for (r1, r2), p in self.per_setting_tables[tag1, tag2].items())

    def correlators(self) -> dict:
        return {pair: self.correlator(*pair) for pair in TAG_PAIRS}

    def chsh(self) -> float:
        return chsh_combination(self.correlators())

    def joint_table(self, w1: float = 0.5, w2: float = 0.5) -> JointDistribution:
        """16-cell table of (tag, result) pairs when the announced pair is drawn
        with probabilities w1 / 1 - w1 (station 1) and w2 / 1 - w2 (station 2)."""
        choice1 = {"A": w1, "a": 1 - w1}
        choice2 = {"B": w2, "b": 1 - w2}
        probs = np.array([
            [choice1[l1.tag] * choice2[l2.tag] * self.per_setting_tables[l1.tag, l2.tag][l1.result, l2.result]
             for l2 in LABELS_2]
            for l1 in LABELS_1
        ])
        return JointDistribution(probs)

    def emit_pair(self, tag1: str, tag2: str, rng: np.random.Generator) -> tuple[int, int]:
        """Source step for one trial: draw the outcome pair for the announced settings.

        The first element travels with particle 1 and the second with particle 2.
        """
        table = self.per_setting_tables[tag1, tag2]
        k = rng.choice(4, p=[table[rp] for rp in RESULT_PAIRS])
        return RESULT_PAIRS[k]


def advance_model_from(rho: DensityOperator, q: SettingsQuartet) -> AdvanceModel:
    return AdvanceModel({(t1, t2): outcome_table(rho, q[t1], q[t2]) for t1, t2 in TAG_PAIRS})
