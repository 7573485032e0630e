import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import oracles
from qct.errors import ZeroVector
from qct.statevec import BELL_ORDER, BellOutcome, make_rng
from qct.teleport import (
    MessageQubitSpec,
    PauliCorrection,
    apply_correction,
    correction_for,
    reconstruct,
    teleport_batch,
    teleport_one,
)
from test_oracles import HAAR_WRONG_CORRECTION

OPERATORS = {
    PauliCorrection.IDENTITY: oracles.OP_I,
    PauliCorrection.U1_X: oracles.OP_U1,
    PauliCorrection.U2_Z: oracles.OP_U2,
    PauliCorrection.U3: oracles.OP_U3,
}


class TestSpec:
    def test_normalizes(self):
        s = MessageQubitSpec(3, 4j)
        assert s.alpha == pytest.approx(0.6)
        assert s.beta == pytest.approx(0.8j)

    def test_zero(self):
        with pytest.raises(ZeroVector):
            MessageQubitSpec(0, 0)

    def test_haar_deterministic(self):
        a = [MessageQubitSpec.haar_random(make_rng(3)) for _ in range(2)]
        assert a[0] == a[1]


class TestCorrections:
    @pytest.mark.parametrize("kind", list(PauliCorrection))
    def test_gate_matches_ket_bra_definition(self, kind):
        assert np.array_equal(kind.gate.matrix, OPERATORS[kind])

    @pytest.mark.parametrize("outcome", BELL_ORDER)
    def test_mapping_undoes_branch(self, outcome):
        # correction applied to the oracle branch state restores the message
        alpha, beta = 0.36 + 0.48j, 0.8
        branch = oracles.bell_branch_state(alpha, beta, outcome.value)
        fixed = OPERATORS[correction_for(outcome)] @ branch
        msg = np.array([alpha, beta]) / np.linalg.norm([alpha, beta])
        assert abs(np.vdot(msg, fixed)) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_group_closure_up_to_phase(self):
        ops = list(OPERATORS.values())
        for a, b in itertools.product(ops, repeat=2):
            prod = a @ b
            assert any(
                np.allclose(prod, ph * c) for c in ops for ph in (1, -1, 1j, -1j)
            )

    def test_mapping_is_bijective(self):
        assert {correction_for(o) for o in BELL_ORDER} == set(PauliCorrection)


class TestTeleportOne:
    def test_round_trip_200_haar(self):
        rng = make_rng(2024)
        for _ in range(200):
            rec = teleport_one(MessageQubitSpec.haar_random(rng), rng)
            assert reconstruct(rec, correction_for(rec.outcome)) == pytest.approx(1.0, abs=1e-9)

    @given(
        st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
        st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
        st.integers(0, 2**32),
    )
    def test_round_trip_property(self, a, b, seed):
        if abs(a) < 1e-3 and abs(b) < 1e-3:
            a = 1.0
        rec = teleport_one(MessageQubitSpec(a, b), make_rng(seed))
        assert reconstruct(rec, correction_for(rec.outcome)) == pytest.approx(1.0, abs=1e-9)

    def test_pre_correction_state_matches_oracle(self):
        rng = make_rng(8)
        spec = MessageQubitSpec(0.6, 0.8j)
        for _ in range(40):
            rec = teleport_one(spec, rng)
            want = oracles.bell_branch_state(spec.alpha, spec.beta, rec.outcome.value)
            got = rec.bob_state_pre_correction.amplitudes
            assert abs(np.vdot(want, got)) ** 2 == pytest.approx(1.0, abs=1e-12)

    def test_wrong_correction_haar_average(self):
        rng = make_rng(77)
        n = 10_000
        total = 0.0
        count = 0
        for _ in range(-(-n // 64)):
            specs = [MessageQubitSpec.haar_random(rng) for _ in range(64)]
            for rec in teleport_batch(specs, rng):
                wrong = correction_for(BELL_ORDER[(BELL_ORDER.index(rec.outcome) + 1) % 4])
                total += reconstruct(rec, wrong)
                count += 1
        assert count >= n
        assert abs(total / count - HAAR_WRONG_CORRECTION) <= 0.03


class TestOutcomeStatistics:
    def test_uniform_single_qubit(self):
        rng = make_rng(4)
        counts = np.zeros(4)
        for _ in range(160):
            specs = [MessageQubitSpec.haar_random(rng) for _ in range(64)]
            for rec in teleport_batch(specs, rng):
                counts[BELL_ORDER.index(rec.outcome)] += 1
        freq = counts / counts.sum()
        assert np.all(np.abs(freq - 0.25) <= 0.02)

    def test_two_qubit_joint_uniform(self):
        rng = make_rng(5)
        counts = np.zeros(16)
        for _ in range(4000):
            specs = [MessageQubitSpec.haar_random(rng) for _ in range(2)]
            a, b = teleport_batch(specs, rng)
            counts[4 * BELL_ORDER.index(a.outcome) + BELL_ORDER.index(b.outcome)] += 1
        assert stats.chisquare(counts).pvalue > 0.001


class TestBatch:
    def test_engines_equal(self):
        specs = [MessageQubitSpec.haar_random(make_rng(i)) for i in range(64)]
        a = teleport_batch(specs, make_rng(9), engine="kernel")
        b = teleport_batch(specs, make_rng(9), engine="statevec")
        for x, y in zip(a, b):
            assert x.outcome is y.outcome
            assert np.allclose(
                x.bob_state_pre_correction.amplitudes, y.bob_state_pre_correction.amplitudes, atol=1e-14
            )

    def test_size_limits(self):
        spec = MessageQubitSpec(1, 0)
        with pytest.raises(ValueError):
            teleport_batch([], make_rng(0))
        with pytest.raises(ValueError):
            teleport_batch([spec] * 65, make_rng(0))
        assert len(teleport_batch([spec] * 64, make_rng(0))) == 64

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            teleport_batch([MessageQubitSpec(1, 0)], make_rng(0), engine="gpu")

    def test_basis_message_identity_branch(self):
        rng = make_rng(1)
        for rec in teleport_batch([MessageQubitSpec(1, 0)] * 64, rng):
            if rec.outcome is BellOutcome.PHI_PLUS:
                out = apply_correction(rec, PauliCorrection.IDENTITY)
                assert np.allclose(out.amplitudes, [1, 0])
