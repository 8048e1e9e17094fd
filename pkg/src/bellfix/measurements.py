"""Projective spin measurements and the CHSH functional AB - Ab - aB - ab.

The sign pattern (one plus, three minus) is kept as written; it is not the
textbook +,+,+,- arrangement, so the optimal angles differ from the usual
ones.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .quantum_core import (
    I2,
    PAULIS,
    DensityOperator,
    born_probability,
    kron,
)

STATION_OF = {"A": 1, "a": 1, "B": 2, "b": 2}
CHSH_SIGNS = {("A", "B"): 1, ("A", "b"): -1, ("a", "B"): -1, ("a", "b"): -1}
TAG_PAIRS = tuple(CHSH_SIGNS)
LOCAL_BOUND = 2
TSIRELSON = 2 * math.sqrt(2)
UNIT_TOL = 1e-12
CORRELATOR_TOL = 1e-10


@dataclass(frozen=True)
class MeasurementSetting:
    """A +/-1 spin measurement along a unit Bloch vector."""

    label: str
    direction: tuple[float, float, float]

    def __post_init__(self):
        if self.label not in STATION_OF:
            raise ValueError(f"label must be one of A, a, B, b; got {self.label!r}")
        d = tuple(float(x) for x in self.direction)
        if len(d) != 3 or not all(math.isfinite(x) for x in d):
            raise ValueError(f"direction must be a finite 3-vector, got {self.direction!r}")
        if abs(math.sqrt(sum(x * x for x in d)) - 1) > UNIT_TOL:
            raise ValueError(f"direction {d} is not a unit vector")
        object.__setattr__(self, "direction", d)

    @property
    def station(self) -> int:
        return STATION_OF[self.label]

    @classmethod
    def normalized(cls, label: str, vector) -> "MeasurementSetting":
        v = np.asarray(vector, dtype=float)
        n = float(np.linalg.norm(v))
        if not math.isfinite(n) or n == 0:
            raise ValueError("cannot normalize a zero or non-finite direction")
        return cls(label, tuple(v / n))

    @classmethod
    def from_angle(cls, label: str, degrees: float) -> "MeasurementSetting":
        """Direction in the x-z plane, ``degrees`` measured from +z toward +x."""
        if not math.isfinite(degrees):
            raise ValueError(f"angle must be finite, got {degrees!r}")
        t = math.radians(degrees)
        return cls(label, (math.sin(t), 0.0, math.cos(t)))

    def observable(self) -> np.ndarray:
        return sum(c * s for c, s in zip(self.direction, PAULIS))


@dataclass(frozen=True)
class SettingsQuartet:
    A: MeasurementSetting
    a: MeasurementSetting
    B: MeasurementSetting
    b: MeasurementSetting

    def __post_init__(self):
        for name in ("A", "a", "B", "b"):
            if getattr(self, name).label != name:
                raise ValueError(f"field {name} holds a setting labelled {getattr(self, name).label!r}")

    @classmethod
    def from_angles(cls, A: float, a: float, B: float, b: float) -> "SettingsQuartet":
        f = MeasurementSetting.from_angle
        return cls(f("A", A), f("a", a), f("B", B), f("b", b))

    def __getitem__(self, tag: str) -> MeasurementSetting:
        if tag not in STATION_OF:
            raise KeyError(tag)
        return getattr(self, tag)

    def rotated(self, degrees: float) -> "SettingsQuartet":
        """Rotate every direction about the y axis (in the x-z plane)."""
        t = math.radians(degrees)
        c, s = math.cos(t), math.sin(t)

        def rot(m: MeasurementSetting) -> MeasurementSetting:
            x, y, z = m.direction
            return MeasurementSetting.normalized(m.label, (c * x + s * z, y, -s * x + c * z))

        return SettingsQuartet(rot(self.A), rot(self.a), rot(self.B), rot(self.b))


def projectors(setting: MeasurementSetting) -> tuple[np.ndarray, np.ndarray]:
    """(P+, P-) = ((I +/- n.sigma) / 2)."""
    obs = setting.observable()
    return (I2 + obs) / 2, (I2 - obs) / 2


def _check_stations(s1: MeasurementSetting, s2: MeasurementSetting) -> None:
    if s1.station != 1 or s2.station != 2:
        raise ValueError(
            f"correlator needs a station-1 then a station-2 setting, got {s1.label!r}, {s2.label!r}"
        )


def outcome_table(rho: DensityOperator, s1: MeasurementSetting, s2: MeasurementSetting) -> dict:
    """Joint outcome probabilities {(r1, r2): p} for projective measurements."""
    _check_stations(s1, s2)
    p1, p2 = dict(zip((1, -1), projectors(s1))), dict(zip((1, -1), projectors(s2)))
    return {
        (r1, r2): born_probability(rho, kron(p1[r1], p2[r2]))
        for r1 in (1, -1)
        for r2 in (1, -1)
    }


def correlator(rho: DensityOperator, s1: MeasurementSetting, s2: MeasurementSetting) -> float:
    """Expectation of the product of the two +/-1 results, via Born-rule sums."""
    table = outcome_table(rho, s1, s2)
    value = sum(r1 * r2 * p for (r1, r2), p in table.items())
    if abs(value) > 1 + CORRELATOR_TOL:
        raise ValueError(f"correlator {value} outside [-1, 1]")
    return value


def correlator_observable(rho: DensityOperator, s1: MeasurementSetting, s2: MeasurementSetting) -> float:
    """Same quantity as :func:`correlator`, as Tr(rho (n1.sigma x n2.sigma))."""
    _check_stations(s1, s2)
    t = np.trace(rho.matrix @ kron(s1.observable(), s2.observable()))
    return float(t.real)


def chsh_combination(values: dict) -> float:
    """AB - Ab - aB - ab from a {(tag1, tag2): correlator} mapping."""
    return sum(sign * values[pair] for pair, sign in CHSH_SIGNS.items())


def chsh_value(rho: DensityOperator, q: SettingsQuartet) -> float:
    """Signed AB - Ab - aB - ab; compare ``abs()`` of it with the bound 2."""
    return chsh_combination({(t1, t2): correlator(rho, q[t1], q[t2]) for t1, t2 in TAG_PAIRS})


def optimal_quartet() -> SettingsQuartet:
    """Coplanar settings reaching |AB - Ab - aB - ab| = 2 sqrt 2 on the singlet.

    A = 0, a = 90, B = 135, b = 45 degrees from +z in the x-z plane.
    :func:`grid_search_chsh` finds this optimum independently.
    """
    return SettingsQuartet.from_angles(0.0, 90.0, 135.0, 45.0)


OPTIMAL_ANGLES = (0.0, 90.0, 135.0, 45.0)


def grid_search_chsh(rho: DensityOperator, step_degrees: int = 1):
    """Exhaustive search of coplanar quartets on a regular angle grid.

    Correlators for every pair of grid angles are computed by Born-rule
    sums. The objective separates into a B-part and a b-part once A and a
    are fixed, so the search over all four angles reduces to a max over
    (A, a) of two independent maxima.

    Returns ``(best_abs_value, (A, a, B, b))`` in degrees.
    """
    if 360 % step_degrees:
        raise ValueError("step must divide 360")
    angles = np.arange(0, 360, step_degrees, dtype=float)
    n = len(angles)
    proj = {}
    for t in angles:
        p_plus, p_minus = projectors(MeasurementSetting.from_angle("A", t))
        proj[t] = (p_plus, p_minus)
    # E[i, j] = sum r1 r2 Tr(rho P1_r1 x P2_r2); vectorized Born rule
    plus = np.stack([proj[t][0] for t in angles])
    minus = np.stack([proj[t][1] for t in angles])
    signed = {1: plus, -1: minus}
    rho4 = rho.matrix.reshape(2, 2, 2, 2)
    corr = np.zeros((n, n))
    for r1 in (1, -1):
        for r2 in (1, -1):
            # Tr(rho (P x Q)) = sum rho[i k, j l] P[j, i] Q[l, k]
            p = np.einsum("ikjl,aji,blk->ab", rho4, signed[r1], signed[r2]).real
            corr += r1 * r2 * p

    best = -1.0
    best_angles = None
    for sign in (1, -1):
        for iA in range(n):
            # sign * (E[A,B] - E[a,B] - E[A,b] - E[a,b]), rows indexed by a
            g = sign * (corr[iA][None, :] - corr)
            h = -sign * (corr[iA][None, :] + corr)
            gB = g.argmax(axis=1)
            hb = h.argmax(axis=1)
            rows = np.arange(n)
            total = g[rows, gB] + h[rows, hb]
            ia = int(total.argmax())
            if total[ia] > best:
                best = float(total[ia])
                best_angles = (angles[iA], angles[ia], angles[gB[ia]], angles[hb[ia]])
    return best, tuple(float(x) for x in best_angles)


def deterministic_chsh_values() -> dict:
    """AB - Ab - aB - ab for each of the 16 deterministic +/-1 assignments."""
    return {
        (vA, va, vB, vb): vA * vB - vA * vb - va * vB - va * vb
        for vA, va, vB, vb in itertools.product((1, -1), repeat=4)
    }


def local_deterministic_bound() -> int:
    return max(abs(v) for v in deterministic_chsh_values().values())
