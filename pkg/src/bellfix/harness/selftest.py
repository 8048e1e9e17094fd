"""Fast invariant checks behind ``bellfix self-test``."""
from __future__ import annotations

import math

import numpy as np

from .. import fixed_povm as fp
from .. import lhv_models as lhv
from ..measurements import (
    TAG_PAIRS,
    TSIRELSON,
    MeasurementSetting,
    SettingsQuartet,
    chsh_value,
    correlator,
    correlator_observable,
    local_deterministic_bound,
    optimal_quartet,
)
from ..quantum_core import random_density, singlet


def _random_quartet(rng):
    return SettingsQuartet(*(MeasurementSetting.normalized(t, rng.normal(size=3)) for t in ("A", "a", "B", "b")))


def checks(n_random: int = 20, seed: int = 2024):
    """Yield ``(name, passed, detail)`` for each check."""
    yield "local deterministic bound is 2", local_deterministic_bound() == 2, str(local_deterministic_bound())

    v = chsh_value(singlet(), optimal_quartet())
    yield "singlet CHSH at optimal quartet is 2*sqrt(2)", abs(abs(v) - TSIRELSON) < 1e-9, repr(v)

    rng = np.random.default_rng(seed)
    worst_corr = worst_two_paths = worst_chsh = 0.0
    for _ in range(n_random):
        rho, q = random_density(rng), _random_quartet(rng)
        d = fp.joint_distribution(rho, *fp.povms_for(q))
        for t1, t2 in TAG_PAIRS:
            e = correlator(rho, q[t1], q[t2])
            worst_corr = max(worst_corr, abs(fp.conditional_correlator(d, t1, t2) - e))
            worst_two_paths = max(worst_two_paths, abs(correlator_observable(rho, q[t1], q[t2]) - e))
        worst_chsh = max(worst_chsh, abs(fp.chsh_from_fixed(d) - chsh_value(rho, q)))
    yield "fixed-POVM conditional correlators match projective", worst_corr <= 1e-12, f"{worst_corr:.2e}"
    yield "Born-sum and observable correlators agree", worst_two_paths <= 1e-12, f"{worst_two_paths:.2e}"
    yield "fixed-POVM CHSH matches projective CHSH", worst_chsh <= 1e-10, f"{worst_chsh:.2e}"

    d = fp.joint_distribution(singlet(), *fp.povms_for(optimal_quartet()))
    m = lhv.instruction_model_from(d)
    tv = lhv.tv_distance(lhv.factorized_distribution(m), d)
    yield "instruction model reproduces the quantum table exactly", tv == 0.0, repr(tv)

    adv = lhv.advance_model_from(singlet(), optimal_quartet())
    yield "advance model CHSH is 2*sqrt(2)", math.isclose(abs(adv.chsh()), TSIRELSON, abs_tol=1e-9), repr(adv.chsh())


def run_self_test(out) -> bool:
    ok = True
    for name, passed, detail in checks():
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  ({detail})", file=out)
    return ok
