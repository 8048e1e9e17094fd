import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bellfix.fixed_povm import (
    LABELS_1,
    LABELS_2,
    EffectLabel,
    JointDistribution,
    chsh_from_fixed,
    joint_distribution,
    povms_for,
)
from bellfix.lhv_models import (
    AdvanceModel,
    InstructionModel,
    InstructionPair,
    TrialRecord,
    TrialRecords,
    advance_model_from,
    empirical_distribution,
    factorized_distribution,
    instruction_model_from,
    predicted_distribution,
    sample_instructions,
    sample_table,
    station1_response,
    station2_response,
    tv_distance,
)
from bellfix.measurements import TAG_PAIRS, SettingsQuartet, correlator, optimal_quartet
from bellfix.quantum_core import born_probability, kron, random_density, singlet
from bellfix.measurements import projectors
from conftest import random_quartet

UNIFORM = JointDistribution(np.full((4, 4), 1 / 16))


def singlet_table():
    return joint_distribution(singlet(), *povms_for(optimal_quartet()))


def delta_table(i=0, j=0):
    p = np.zeros((4, 4))
    p[i, j] = 1
    return JointDistribution(p)


tables = arrays(float, (4, 4), elements=st.floats(0, 1, allow_nan=False)).filter(lambda a: a.sum() > 1e-3)


def test_instruction_model_examples():
    np.testing.assert_array_equal(instruction_model_from(UNIFORM).weights, UNIFORM.probs)
    d = singlet_table()
    m = instruction_model_from(d)
    np.testing.assert_array_equal(m.weights, d.probs)
    assert tv_distance(predicted_distribution(m), d) == 0.0
    m = instruction_model_from(delta_table(2, 3))
    assert m.weights[2, 3] == 1 and m.weights.sum() == 1


@settings(max_examples=100, deadline=None)
@given(tables)
def test_round_trip_is_exact(raw):
    d = JointDistribution(raw / raw.sum())
    back = predicted_distribution(instruction_model_from(d))
    np.testing.assert_array_equal(back.probs, d.probs)
    m = instruction_model_from(d)
    assert m.weights.min() >= 0
    assert abs(m.weights.sum() - 1) <= 1e-12


def test_instruction_model_validation():
    with pytest.raises(ValueError):
        InstructionModel(np.full((4, 4), 0.1))
    w = np.full((4, 4), 1 / 16)
    w[0, 1] += 1 / 16 + 0.01
    w[0, 0] = -0.01
    with pytest.raises(ValueError):
        InstructionModel(w)


def test_local_model_violates_without_choices():
    m = instruction_model_from(singlet_table())
    assert abs(chsh_from_fixed(predicted_distribution(m)) - 2 * math.sqrt(2)) <= 1e-9
    assert abs(chsh_from_fixed(factorized_distribution(m)) - 2 * math.sqrt(2)) <= 1e-9


class ExplodingLabel:
    """Stand-in for a far-away instruction; any read of it is a locality breach."""

    def __getattr__(self, name):
        raise AssertionError(f"station read the other particle's instruction ({name})")


def test_station_responses_are_local(monkeypatch):
    import bellfix.lhv_models as lhv

    seen = {1: [], 2: []}

    def spy(station, rule):
        def wrapped(*args):
            seen[station].append(args)
            return rule(*args)
        return wrapped

    monkeypatch.setattr(lhv, "station1_response", spy(1, lhv.station1_response))
    monkeypatch.setattr(lhv, "station2_response", spy(2, lhv.station2_response))
    m = instruction_model_from(singlet_table())
    factorized_distribution(m)
    assert len(seen[1]) == len(seen[2]) == 16
    for (arg1,), (arg2,), pair in zip(seen[1], seen[2], m.pairs):
        assert arg1 is pair.out1
        assert arg2 is pair.out2


def test_station_rule_ignores_far_instruction():
    own = EffectLabel("a", -1)
    assert station1_response(InstructionPair(own, ExplodingLabel()).out1) == own
    assert station2_response(InstructionPair(ExplodingLabel(), EffectLabel("b", 1)).out2) == EffectLabel("b", 1)


def test_factorized_path_matches_table():
    m = instruction_model_from(singlet_table())
    np.testing.assert_array_equal(factorized_distribution(m).probs, m.weights)


def test_sample_deterministic_model():
    recs = sample_instructions(instruction_model_from(delta_table(1, 2)), 1000, seed=5)
    assert len(recs) == 1000
    assert {(r.out1, r.out2) for r in recs} == {(LABELS_1[1], LABELS_2[2])}


def test_sample_same_seed_identical():
    m = instruction_model_from(singlet_table())
    a = sample_instructions(m, 10_000, seed=11)
    b = sample_instructions(m, 10_000, seed=11)
    c = sample_instructions(m, 10_000, seed=12)
    np.testing.assert_array_equal(a.cells, b.cells)
    assert list(a[:50]) == list(b[:50])
    assert not np.array_equal(a.cells, c.cells)


def test_sample_workers_deterministic_and_contiguous():
    m = instruction_model_from(singlet_table())
    a = sample_instructions(m, 10_001, seed=3, workers=4)
    b = sample_instructions(m, 10_001, seed=3, workers=4)
    np.testing.assert_array_equal(a.cells, b.cells)
    assert [r.trial_index for r in a] == list(range(10_001))
    assert sorted(set(a.streams.tolist())) == [0, 1, 2, 3]
    assert np.all(np.diff(a.streams) >= 0)


def test_sample_never_hits_zero_cells():
    p = np.zeros((4, 4))
    p[0, 1] = 0.3
    p[3, 2] = 0.7
    recs = sample_table(p, 100_000, seed=1)
    assert set(np.unique(recs.cells).tolist()) == {1, 14}


def test_sample_rejects_empty_run():
    with pytest.raises(ValueError):
        sample_instructions(instruction_model_from(UNIFORM), 0, seed=1)


def test_uniform_frequencies_within_5_sigma():
    n = 10**6
    counts = sample_instructions(instruction_model_from(UNIFORM), n, seed=99).counts()
    sigma = math.sqrt((1 / 16) * (15 / 16) / n)
    assert np.max(np.abs(counts / n - 1 / 16)) <= 5 * sigma


def test_record_fields():
    recs = sample_instructions(instruction_model_from(UNIFORM), 5, seed=0)
    r = recs[-1]
    assert isinstance(r, TrialRecord)
    assert r.trial_index == 4 and r.hidden_seed_id == 0
    assert r.out1 in LABELS_1 and r.out2 in LABELS_2
    with pytest.raises(IndexError):
        recs[5]


def test_empirical_single_record():
    rec = [TrialRecord(0, EffectLabel("a", 1), EffectLabel("B", -1), 0)]
    d = empirical_distribution(rec)
    assert d[EffectLabel("a", 1), EffectLabel("B", -1)] == 1
    assert d.probs.sum() == 1


def test_empirical_rejects_empty():
    with pytest.raises(ValueError):
        empirical_distribution([])
    with pytest.raises(ValueError):
        empirical_distribution(TrialRecords([], []))


def test_empirical_generic_path_matches_fast_path():
    recs = sample_instructions(instruction_model_from(singlet_table()), 2000, seed=4)
    np.testing.assert_array_equal(empirical_distribution(list(recs)).probs, empirical_distribution(recs).probs)


def test_empirical_concatenation_is_count_weighted():
    m = instruction_model_from(singlet_table())
    a = sample_instructions(m, 3000, seed=1)
    b = sample_instructions(m, 7000, seed=2)
    joined = empirical_distribution(a + b)
    expect = (3000 * empirical_distribution(a).probs + 7000 * empirical_distribution(b).probs) / 10_000
    np.testing.assert_allclose(joined.probs, expect, atol=1e-15)


def test_empirical_tv_at_one_million():
    d = singlet_table()
    recs = sample_instructions(instruction_model_from(d), 10**6, seed=2002)
    assert tv_distance(empirical_distribution(recs), d) < 0.005


def test_empirical_tv_shrinks_with_n():
    d = singlet_table()
    m = instruction_model_from(d)

    def median_tv(n):
        return np.median([tv_distance(empirical_distribution(sample_instructions(m, n, s)), d) for s in range(20)])

    assert median_tv(10**4) > median_tv(10**6)


def test_tv_examples(rng):
    assert tv_distance(UNIFORM, UNIFORM) == 0
    assert tv_distance(delta_table(), UNIFORM) == pytest.approx(1 - 1 / 16, abs=1e-15)
    for _ in range(50):
        p, q = rng.dirichlet(np.ones(16)).reshape(4, 4), rng.dirichlet(np.ones(16)).reshape(4, 4)
        p, q = JointDistribution(p), JointDistribution(q)
        assert tv_distance(p, q) == tv_distance(q, p)


def test_advance_singlet_joint_law(rng):
    for _ in range(50):
        q = random_quartet(rng)
        adv = advance_model_from(singlet(), q)
        for t1, t2 in TAG_PAIRS:
            e = correlator(singlet(), q[t1], q[t2])
            p1 = dict(zip((1, -1), projectors(q[t1])))
            p2 = dict(zip((1, -1), projectors(q[t2])))
            for (r1, r2), p in adv.per_setting_tables[t1, t2].items():
                assert p == pytest.approx((1 + r1 * r2 * e) / 4, abs=1e-12)
                assert p == pytest.approx(born_probability(singlet(), kron(p1[r1], p2[r2])), abs=1e-15)


def test_advance_all_z():
    adv = advance_model_from(singlet(), SettingsQuartet.from_angles(0, 0, 0, 0))
    for table in adv.per_setting_tables.values():
        assert table[1, -1] == pytest.approx(0.5, abs=1e-15)
        assert table[-1, 1] == pytest.approx(0.5, abs=1e-15)
        assert table[1, 1] == pytest.approx(0, abs=1e-15)
        assert table[-1, -1] == pytest.approx(0, abs=1e-15)


def test_advance_optimal_chsh():
    adv = advance_model_from(singlet(), optimal_quartet())
    assert abs(adv.chsh() - 2 * math.sqrt(2)) <= 1e-9


def test_advance_reproduces_correlators_random(rng):
    for _ in range(100):
        rho, q = random_density(rng), random_quartet(rng)
        adv = advance_model_from(rho, q)
        for t1, t2 in TAG_PAIRS:
            assert abs(adv.correlator(t1, t2) - correlator(rho, q[t1], q[t2])) <= 1e-12


def test_advance_joint_table_matches_fixed_povm(rng):
    # pre-announced pairs drawn with the mixing weights give the fixed-POVM table
    for _ in range(20):
        rho, q = random_density(rng), random_quartet(rng)
        adv = advance_model_from(rho, q).joint_table(0.5, 0.5)
        fixed = joint_distribution(rho, *povms_for(q))
        np.testing.assert_allclose(adv.probs, fixed.probs, atol=1e-12)


def test_advance_emit_pair_follows_table():
    adv = advance_model_from(singlet(), SettingsQuartet.from_angles(0, 0, 0, 0))
    g = np.random.default_rng(0)
    pairs = {adv.emit_pair("A", "B", g) for _ in range(200)}
    assert pairs == {(1, -1), (-1, 1)}


def test_advance_model_validation():
    good = advance_model_from(singlet(), optimal_quartet()).per_setting_tables
    with pytest.raises(ValueError):
        AdvanceModel({k: v for k, v in good.items() if k != ("a", "b")})
    bad = dict(good)
    bad["A", "B"] = {(1, 1): 0.5, (1, -1): 0.5, (-1, 1): 0.5, (-1, -1): -0.5}
    with pytest.raises(ValueError):
        AdvanceModel(bad)
