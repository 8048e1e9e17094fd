"""One fixed four-outcome POVM per particle, and its 16-outcome statistics.

Each station's POVM is a weighted mixture of its two projective spin
measurements, so an outcome label says both which setting it stands for
and the +/-1 result. Conditioning the joint table on a pair of setting tags
recovers the projective correlators, and from them AB - Ab - aB - ab,
without any per-trial choice of setting.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .measurements import (
    STATION_OF,
    TAG_PAIRS,
    MeasurementSetting,
    SettingsQuartet,
    chsh_combination,
    projectors,
)
from .quantum_core import I2, PSD_TOL, DensityOperator, born_probability, is_psd, kron

COMPLETENESS_TOL = 1e-12
CLAMP_TOL = 1e-12
NORM_TOL = 1e-10


class UndefinedConditionalError(ZeroDivisionError):
    """A label-conditioned correlator was requested on a zero-mass block."""


class EffectLabel(NamedTuple):
    tag: str
    result: int

    def __str__(self):
        return f"{self.tag}{'+' if self.result > 0 else '-'}"


def labels_for(station: int) -> tuple[EffectLabel, ...]:
    """The fixed label order of a station: primary+, primary-, alternate+, alternate-."""
    tags = ("A", "a") if station == 1 else ("B", "b")
    return tuple(EffectLabel(t, r) for t in tags for r in (1, -1))


LABELS_1 = labels_for(1)
LABELS_2 = labels_for(2)


@dataclass(frozen=True, eq=False)
class Povm:
    station: int
    effects: tuple[tuple[EffectLabel, np.ndarray], ...]

    def __post_init__(self):
        if self.station not in (1, 2):
            raise ValueError(f"station must be 1 or 2, got {self.station!r}")
        labels = [lab for lab, _ in self.effects]
        if sorted(labels) != sorted(labels_for(self.station)):
            raise ValueError(f"station {self.station} POVM needs one effect per label, got {labels}")
        total = np.zeros((2, 2), dtype=complex)
        for lab, e in self.effects:
            if e.shape != (2, 2):
                raise ValueError(f"effect {lab} is not 2x2")
            if not is_psd(e, PSD_TOL):
                raise ValueError(f"effect {lab} is not positive semidefinite")
            total = total + e
        if np.max(np.abs(total - I2)) > COMPLETENESS_TOL:
            raise ValueError("effects do not sum to the identity")

    @property
    def labels(self) -> tuple[EffectLabel, ...]:
        return tuple(lab for lab, _ in self.effects)

    def effect(self, label: EffectLabel) -> np.ndarray:
        for lab, e in self.effects:
            if lab == label:
                return e
        raise KeyError(label)


def mixed_povm(s_primary: MeasurementSetting, s_alternate: MeasurementSetting, weight: float = 0.5) -> Povm:
    """Run the primary measurement with probability ``weight``, else the alternate.

    Effects are ``weight * P_primary(+/-)`` and ``(1 - weight) * P_alternate(+/-)``.
    """
    if s_primary.station != s_alternate.station:
        raise ValueError(
            f"settings {s_primary.label!r} and {s_alternate.label!r} belong to different stations"
        )
    if s_primary.label == s_alternate.label:
        raise ValueError("primary and alternate settings need distinct tags")
    if not 0 < weight < 1:
        raise ValueError(f"weight must lie in (0, 1), got {weight!r}")
    effects = []
    for s, w in ((s_primary, weight), (s_alternate, 1 - weight)):
        p_plus, p_minus = projectors(s)
        effects.append((EffectLabel(s.label, 1), w * p_plus))
        effects.append((EffectLabel(s.label, -1), w * p_minus))
    povm = Povm(s_primary.station, tuple(effects))
    # keep the canonical label order regardless of which tag was primary
    order = labels_for(povm.station)
    return Povm(povm.station, tuple((lab, povm.effect(lab)) for lab in order))


def povms_for(q: SettingsQuartet, w1: float = 0.5, w2: float = 0.5) -> tuple[Povm, Povm]:
    return mixed_povm(q.A, q.a, w1), mixed_povm(q.B, q.b, w2)


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Probabilities over (station-1 label, station-2 label), 4 x 4."""

    probs: np.ndarray
    labels1: tuple[EffectLabel, ...] = LABELS_1
    labels2: tuple[EffectLabel, ...] = LABELS_2

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.shape != (4, 4):
            raise ValueError(f"joint table must be 4x4, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ValueError("joint table has non-finite entries")
        if p.min() < -CLAMP_TOL or p.max() > 1 + CLAMP_TOL:
            raise ValueError(f"joint table entries outside [0, 1]: min {p.min()}, max {p.max()}")
        p = np.clip(p, 0.0, 1.0)
        if abs(p.sum() - 1) > NORM_TOL:
            raise ValueError(f"joint table sums to {p.sum()}, not 1")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    @property
    def cells(self) -> list[tuple[EffectLabel, EffectLabel]]:
        """Flat cell order used for sampling and serialization (row-major)."""
        return [(l1, l2) for l1 in self.labels1 for l2 in self.labels2]

    def __getitem__(self, key: tuple[EffectLabel, EffectLabel]) -> float:
        l1, l2 = key
        return float(self.probs[self.labels1.index(l1), self.labels2.index(l2)])

    def marginal1(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal2(self) -> np.ndarray:
        return self.probs.sum(axis=0)

    def block_mass(self, tag1: str, tag2: str) -> float:
        return sum(self[EffectLabel(tag1, r1), EffectLabel(tag2, r2)] for r1 in (1, -1) for r2 in (1, -1))

    def as_dict(self) -> dict[str, float]:
        return {f"{l1},{l2}": float(self.probs[i, j])
                for i, l1 in enumerate(self.labels1) for j, l2 in enumerate(self.labels2)}


def joint_distribution(rho: DensityOperator, p1: Povm, p2: Povm) -> JointDistribution:
    if p1.station != 1 or p2.station != 2:
        raise ValueError("joint_distribution needs a station-1 and a station-2 POVM")
    probs = np.array([[born_probability(rho, kron(e, f)) for _, f in p2.effects] for _, e in p1.effects])
    return JointDistribution(probs, p1.labels, p2.labels)


def conditional_correlator(d: JointDistribution, tag1: str, tag2: str) -> float:
    """Correlator of the +/-1 results within the (tag1, tag2) block of ``d``."""
    if STATION_OF.get(tag1) != 1 or STATION_OF.get(tag2) != 2:
        raise ValueError(f"need a station-1 tag and a station-2 tag, got {tag1!r}, {tag2!r}")
    mass = 0.0
    signed = 0.0
    for r1 in (1, -1):
        for r2 in (1, -1):
            p = d[EffectLabel(tag1, r1), EffectLabel(tag2, r2)]
            mass += p
            signed += r1 * r2 * p
    if mass <= 0:
        raise UndefinedConditionalError(f"block ({tag1}, {tag2}) has zero probability")
    return signed / mass


def conditional_correlators(d: JointDistribution) -> dict:
    return {pair: conditional_correlator(d, *pair) for pair in TAG_PAIRS}


def chsh_from_fixed(d: JointDistribution) -> float:
    """AB - Ab - aB - ab from the four label-conditioned correlators."""
    return chsh_combination(conditional_correlators(d))
