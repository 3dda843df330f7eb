import json
import math

import numpy as np
import pytest

from softq.analysis import (
    BipartiteState, MeasurementDirection, build_cq_state, deferred_equivalence_check, discord,
    discord_report, negativity, partial_transpose, random_deferred_inputs, random_local_unitary,
)
from softq.qcore import I2, KET0, X, EulerUnitary, pure_state, random_density_matrix, ry, tensor

from oracles import brute_force_discord


def plus_state():
    return pure_state([1, 1])


def bell():
    return pure_state(np.array([1, 0, 0, 1]) / math.sqrt(2))


class TestCqState:
    def test_pure_first_branch_is_product(self):
        rho2 = random_density_matrix(2, np.random.default_rng(0))
        st = build_cq_state(1.0, rho2, EulerUnitary(1.0, 0.2, 0.3))
        assert np.allclose(st.rho, tensor(KET0, rho2))

    def test_identity_gate_gives_product(self):
        rho2 = random_density_matrix(2, np.random.default_rng(1))
        st = build_cq_state(0.3, rho2, I2)
        assert np.allclose(st.rho, tensor(np.diag([0.3, 0.7]), rho2))

    def test_reference_state(self):
        st = build_cq_state(0.5, KET0, ry(math.pi / 2))
        assert np.allclose(st.reduced(1), I2 / 2)
        assert np.allclose(st.reduced(2), np.array([[0.75, 0.25], [0.25, 0.25]]), atol=1e-15)

    def test_bad_probability(self):
        with pytest.raises(ValueError):
            build_cq_state(1.2, KET0, I2)


class TestDiscord:
    def test_reference_state_sides(self):
        st = build_cq_state(0.5, KET0, ry(math.pi / 2))
        assert discord(st, 1) <= 1e-6
        d2 = discord(st, 2)
        assert d2 > 1e-3
        assert abs(d2 - brute_force_discord(st.rho, 2)) <= 1e-5

    def test_matches_brute_force_on_random_states(self):
        rng = np.random.default_rng(2)
        for _ in range(4):
            st = BipartiteState(random_density_matrix(4, rng, rank=2))
            for side in (1, 2):
                assert abs(discord(st, side) - brute_force_discord(st.rho, side)) <= 1e-5

    def test_matches_brute_force_on_cq_states(self):
        rng = np.random.default_rng(3)
        for _ in range(3):
            rho2 = random_density_matrix(2, rng)
            st = build_cq_state(float(rng.uniform()), rho2, EulerUnitary(*rng.uniform(-3, 3, 3)))
            assert abs(discord(st, 2) - brute_force_discord(st.rho, 2)) <= 1e-5

    def test_product_states_have_none(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            st = BipartiteState(tensor(random_density_matrix(2, rng), random_density_matrix(2, rng)))
            assert discord(st, 1) <= 1e-6 and discord(st, 2) <= 1e-6

    def test_classically_correlated_states_have_none(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            st = BipartiteState(np.diag(rng.dirichlet(np.ones(4))).astype(complex))
            assert discord(st, 1) <= 1e-6 and discord(st, 2) <= 1e-6

    def test_cq_states_measured_on_first_have_none(self):
        rng = np.random.default_rng(6)
        for _ in range(30):
            st = build_cq_state(float(rng.uniform()), random_density_matrix(2, rng),
                                EulerUnitary(*rng.uniform(-math.pi, math.pi, 3)))
            assert discord(st, 1) <= 1e-6

    def test_commuting_branches_have_none(self):
        # diagonal rho2 with a diagonal (phase) or flip gate keeps both branches diagonal
        for w in (EulerUnitary(0.0, 0.7, -0.4), X):
            st = build_cq_state(0.4, np.diag([0.8, 0.2]), w)
            assert discord(st, 2) <= 1e-6
        st = build_cq_state(0.5, KET0, X)
        assert discord(st, 2) <= 1e-6

    def test_nonorthogonal_branches_are_positive(self):
        rng = np.random.default_rng(7)
        for theta in (0.3, 1.0, 2.0):
            st = build_cq_state(float(rng.uniform(0.2, 0.8)), KET0, ry(theta))
            assert discord(st, 2) > 1e-3

    def test_local_unitary_invariance(self):
        rng = np.random.default_rng(8)
        for _ in range(6):
            st = BipartiteState(random_density_matrix(4, rng))
            moved = random_local_unitary(st, rng)
            for side in (1, 2):
                assert abs(discord(st, side) - discord(moved, side)) <= 1e-6

    def test_bell_state_has_one_bit(self):
        assert discord(bell(), 1) == pytest.approx(1.0, abs=1e-6)

    def test_direction_returned(self):
        d, n = discord(build_cq_state(0.5, KET0, ry(math.pi / 2)), 1, return_direction=True)
        assert isinstance(n, MeasurementDirection)
        p_plus, p_minus = n.projectors()
        assert np.allclose(p_plus + p_minus, I2)
        assert abs(abs(n.vector()[2]) - 1) < 1e-4     # measure along z on the classical side

    def test_bad_side(self):
        with pytest.raises(ValueError):
            discord(bell(), 3)


class TestNegativity:
    def test_product_state(self):
        assert negativity(tensor(KET0, plus_state())) == pytest.approx(0, abs=1e-12)

    def test_bell_state(self):
        assert negativity(bell()) == pytest.approx(0.5, abs=1e-10)

    def test_cq_states_are_separable(self):
        rng = np.random.default_rng(9)
        for _ in range(200):
            st = build_cq_state(float(rng.uniform()), random_density_matrix(2, rng),
                                EulerUnitary(*rng.uniform(-math.pi, math.pi, 3)))
            assert negativity(st) <= 1e-12

    def test_partial_transpose_is_involution(self):
        rho = random_density_matrix(4, np.random.default_rng(10))
        for side in (1, 2):
            assert np.allclose(partial_transpose(partial_transpose(rho, side), side), rho)
        assert np.allclose(np.trace(partial_transpose(rho)), 1)


class TestDeferredMeasurement:
    def test_random_cases_agree(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            rep = deferred_equivalence_check(*random_deferred_inputs(rng))
            assert rep.max_difference <= 1e-12
            assert rep.measured_first.sum() == pytest.approx(1.0, abs=1e-12)

    def test_bell_pair_before_measurement(self):
        rep = deferred_equivalence_check(plus_state(), X, I2, I2, I2)
        assert rep.negativity_12 == pytest.approx(0.5, abs=1e-10)
        assert rep.max_difference <= 1e-12
        assert rep.measured_last[0, 0, 0] == pytest.approx(0.5)
        assert rep.measured_last[1, 1, 0] == pytest.approx(0.5)

    def test_diagonal_source_does_not_entangle(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            rho1 = np.diag(rng.dirichlet([1, 1])).astype(complex)
            gates = [EulerUnitary(*rng.uniform(-3, 3, 3)) for _ in range(4)]
            rep = deferred_equivalence_check(rho1, *gates)
            assert rep.negativity_12 <= 1e-12

    def test_report_is_json(self):
        rep = deferred_equivalence_check(*random_deferred_inputs(np.random.default_rng(13)))
        doc = json.loads(json.dumps(rep.to_dict()))
        assert np.array(doc["measured_first"]).shape == (2, 2, 2)

    def test_discord_report(self):
        st = build_cq_state(0.5, KET0, ry(math.pi / 2))
        doc = json.loads(json.dumps(discord_report(st, {"p1": 0.5})))
        assert doc["discord"]["measured_1"] <= 1e-6
        assert doc["discord"]["measured_2"] > 1e-3
        assert doc["negativity"] <= 1e-12
        assert doc["state"]["p1"] == 0.5
