import cmath
import math

import numpy as np
import pytest

from bellfix.measurements import MeasurementSetting, SettingsQuartet


@pytest.fixture
def rng():
    return np.random.default_rng(20021024)


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_quartet(rng):
    return SettingsQuartet(*(MeasurementSetting.normalized(t, random_unit(rng)) for t in ("A", "a", "B", "b")))


def spinor(direction, result):
    """Eigenvector of n.sigma with eigenvalue ``result``, from polar angles.

    Independent of the projector construction in the library.
    """
    x, y, z = direction
    theta = math.acos(max(-1.0, min(1.0, z)))
    phi = math.atan2(y, x)
    up = np.array([math.cos(theta / 2), cmath.exp(1j * phi) * math.sin(theta / 2)])
    down = np.array([-math.sin(theta / 2), cmath.exp(1j * phi) * math.cos(theta / 2)])
    return up if result == 1 else down


SINGLET_VEC = np.array([0, 1, -1, 0]) / math.sqrt(2)


def amplitude_probability(psi, n1, r1, n2, r2):
    """|<u1 (x) u2 | psi>|^2 for a pure two-qubit state."""
    u = np.kron(spinor(n1, r1), spinor(n2, r2))
    return abs(np.vdot(u, psi)) ** 2
