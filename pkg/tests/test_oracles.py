"""Freeze the reference values the rest of the suite asserts against."""
import math

import pytest

import oracles

HAAR_WRONG_CORRECTION = 1.0 / 3.0
CHSH_IDEAL = -2.0 * math.sqrt(2.0)
SIFT_YIELD = 2.0 / 9.0
E91_IR_QBER = 0.25                       # Eve over {0, pi/4, pi/2, 3pi/4}
E91_IR_EVE_MATCH = 0.8017766952966369    # same basis set
E91_IR_QBER_ALICE_SET = 5.0 / 24.0       # Eve over Alice's angles only
E91_IR_EVE_MATCH_ALICE_SET = 0.8434433619633034
QSDC_IR_ERROR = 0.25

ALICE = (0.0, math.pi / 4, math.pi / 2)
AGENT = (math.pi / 4, math.pi / 2, 3 * math.pi / 4)
SIFT = ((math.pi / 4, math.pi / 4), (math.pi / 2, math.pi / 2))


@pytest.mark.parametrize("op", [oracles.OP_U1, oracles.OP_U2, oracles.OP_U3])
def test_haar_average_of_non_identity_correction(op):
    assert oracles.haar_pauli_fidelity(op) == pytest.approx(HAAR_WRONG_CORRECTION, abs=1e-9)


def test_haar_identity_is_one():
    assert oracles.haar_pauli_fidelity(oracles.OP_I) == pytest.approx(1.0, abs=1e-9)


def test_singlet_chsh_value():
    psi = oracles.BELL["psi-"]
    e = lambda a, b: oracles.correlation(psi, a, b)  # noqa: E731
    s = e(ALICE[0], AGENT[0]) - e(ALICE[0], AGENT[2]) + e(ALICE[2], AGENT[0]) + e(ALICE[2], AGENT[2])
    assert s == pytest.approx(CHSH_IDEAL, abs=1e-12)


def test_singlet_correlation_is_minus_cosine():
    psi = oracles.BELL["psi-"]
    for a in (0.0, 0.3, 1.1, 2.5):
        for b in (0.0, 0.7, 1.9, 3.0):
            assert oracles.correlation(psi, a, b) == pytest.approx(-math.cos(a - b), abs=1e-12)


def test_sift_yield_by_counting():
    matches = sum(1 for a in ALICE for b in AGENT if a == b)
    assert matches / 9 == pytest.approx(SIFT_YIELD)


def test_intercept_resend_union_set():
    qber, match = oracles.intercept_resend_stats(SIFT, ALICE + (3 * math.pi / 4,))
    assert qber == pytest.approx(E91_IR_QBER, abs=1e-12)
    assert match == pytest.approx(E91_IR_EVE_MATCH, abs=1e-12)


def test_intercept_resend_alice_set():
    qber, match = oracles.intercept_resend_stats(SIFT, ALICE)
    assert qber == pytest.approx(E91_IR_QBER_ALICE_SET, abs=1e-12)
    assert match == pytest.approx(E91_IR_EVE_MATCH_ALICE_SET, abs=1e-12)


def test_qsdc_intercept_error():
    assert oracles.qsdc_intercept_error() == pytest.approx(QSDC_IR_ERROR, abs=1e-12)


@pytest.mark.parametrize("alpha,beta", [(1, 0), (0, 1), (0.6, 0.8j), (1, 1), (0.3 - 0.2j, 0.9)])
def test_bell_branches_are_uniform(alpha, beta):
    probs = oracles.bell_branch_probabilities(alpha, beta)
    assert all(p == pytest.approx(0.25, abs=1e-12) for p in probs.values())


def test_u3_undoes_psi_minus_branch():
    alpha, beta = 0.6, 0.8j
    branch = alpha * oracles.KET1 - beta * oracles.KET0
    assert oracles.OP_U3 @ branch == pytest.approx(alpha * oracles.KET0 + beta * oracles.KET1)
