"""Built-in invariant checks behind ``qct selftest``."""
from __future__ import annotations

import math

import numpy as np

from qct import ekert91, kernels, qsdc
from qct.announce import AgentKey, Announcement, decrypt, encode, encrypt, parse_code
from qct.eve import EveModel
from qct.statevec import BellOutcome, analyzer, bell_probabilities, make_bell_pair, make_rng, tensor
from qct.teleport import MessageQubitSpec, correction_for, reconstruct, teleport_one

ADDITION_RULES = (
    "'00'+'0'='00'", "'01'+'0'='01'", "'10'+'0'='10'", "'11'+'0'='11'",
    "'00'+'1'='01'", "'01'+'1'='10'", "'10'+'1'='11'", "'11'+'1'='00'",
)


def check_encoding():
    table = {
        BellOutcome.PHI_PLUS: "00",
        BellOutcome.PHI_MINUS: "01",
        BellOutcome.PSI_PLUS: "10",
        BellOutcome.PSI_MINUS: "11",
    }
    return all(format(encode(k), "02b") == v for k, v in table.items())


def check_addition_rules():
    for rule in ADDITION_RULES:
        lhs, rhs = rule.split("=")
        code, bit = lhs.split("+")
        got = encrypt(Announcement((parse_code(code),)), [AgentKey("k", (int(bit.strip("'")),))])
        if got.codes != (parse_code(rhs),):
            return False
    return True


def check_round_trip(n=200, seed=2024):
    rng = make_rng(seed)
    for _ in range(n):
        rec = teleport_one(MessageQubitSpec.haar_random(rng), rng)
        if abs(reconstruct(rec, correction_for(rec.outcome)) - 1.0) > 1e-9:
            return False
    return True


def check_bell_law(seed=7):
    rng = make_rng(seed)
    for _ in range(20):
        spec = MessageQubitSpec.haar_random(rng)
        joint = tensor(spec.state(), make_bell_pair(BellOutcome.PHI_PLUS))
        probs = bell_probabilities(joint, 0, 1)
        if any(abs(p - 0.25) > 1e-12 for p in probs.values()):
            return False
    return True


def singlet_correlation(a: float, b: float) -> float:
    """Exact <sigma_a x sigma_b> on psi- from the state vector."""
    def sigma(theta):
        c, s = analyzer(theta)
        e0 = np.array([c, s])
        e1 = np.array([-s, c])
        return np.outer(e0, e0) - np.outer(e1, e1)

    psi = make_bell_pair(BellOutcome.PSI_MINUS).amplitudes
    return float(np.real(np.vdot(psi, np.kron(sigma(a), sigma(b)) @ psi)))


def check_chsh_ideal():
    s = sum(
        sign * singlet_correlation(ekert91.ALICE_ANGLES[a], ekert91.AGENT_ANGLES[b])
        for a, b, sign in ekert91.CHSH_TERMS
    )
    return abs(s + 2 * math.sqrt(2)) < 1e-12


def check_anticorrelation(seed=11):
    session = ekert91.run_session(5000, rng=make_rng(seed))
    return session.agreement == 1.0 and abs(session.chsh_s + 2 * math.sqrt(2)) < 0.3


def check_qsdc(seed=13):
    rng = make_rng(seed)
    for msg in ((0,), (1,), (1, 0, 1, 1, 0, 0, 1, 0)):
        s = qsdc.run_session(msg, 512, 0.25, rng=rng)
        if s.decoded_bits != msg or s.qber_forward != 0.0 or s.qber_backward != 0.0:
            return False
    return True


def check_worked_example():
    true = Announcement((2, 1, 3))
    charlie, dick = AgentKey("Charlie", (1,)), AgentKey("Dick", (0,))
    once = encrypt(true, [charlie])
    twice = encrypt(once, [dick])
    return (
        true.rendered() == ["10", "01", "11"]
        and once.rendered() == ["11", "10", "00"]
        and twice == once
        and decrypt(twice, [charlie, dick]) == true
    )


def check_backends(seed=5):
    if len(kernels.available()) < 2:
        return True
    outs = []
    for name in kernels.available():
        s = ekert91.run_session(2000, EveModel.intercept_resend(0.5), make_rng(seed),
                                backend=kernels.get(name))
        outs.append((s.alice_bits.tobytes(), s.agent_bits.tobytes(), s.eve_bits.tobytes()))
    return all(o == outs[0] for o in outs)


CHECKS = (
    ("outcome encoding table", check_encoding),
    ("mod-4 addition rules", check_addition_rules),
    ("worked announcement example", check_worked_example),
    ("teleport round-trip identity", check_round_trip),
    ("Bell outcome probabilities 1/4", check_bell_law),
    ("CHSH ideal value -2*sqrt(2)", check_chsh_ideal),
    ("Ekert91 anticorrelation", check_anticorrelation),
    ("QSDC exact delivery", check_qsdc),
    ("kernel backends agree", check_backends),
)


def run(out):
    ok = True
    for name, fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # noqa: BLE001
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}", file=out)
    return ok


__all__ = ["ADDITION_RULES", "CHECKS", "run", "singlet_correlation"]
