"""Ekert91 key distribution between Alice and one agent over psi- pairs.

Alice measures at 0, pi/4 or pi/2 and the agent at pi/4, pi/2 or 3pi/4,
each uniformly at random.  The two equal-angle combinations give
anticorrelated key bits; four of the mismatched combinations give the
CHSH quantity, which reaches -2*sqrt(2) for untouched pairs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qct import kernels
from qct.errors import InsufficientSamples, RetriesExhausted
from qct.eve import NO_EVE, EveModel
from qct.statevec import BellOutcome, analyzer, make_bell_pair, measure_angle

PI = math.pi
ALICE_ANGLES = (0.0, PI / 4, PI / 2)
AGENT_ANGLES = (PI / 4, PI / 2, 3 * PI / 4)
# Eve guesses among every analyzer angle in use by either party.
DEFAULT_EVE_ANGLES = (0.0, PI / 4, PI / 2, 3 * PI / 4)

# (alice index, agent index) for the key-bearing equal-angle combinations
SIFT_COMBOS = ((1, 0), (2, 1))
# (alice index, agent index, sign) making up S
CHSH_TERMS = ((0, 0, +1), (0, 2, -1), (2, 0, +1), (2, 2, +1))

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)


@dataclass(frozen=True)
class EkertConfig:
    pairs: int = 2000
    chsh_threshold: float = 2.3
    retries: int = 3

    def __post_init__(self):
        if self.pairs < 1:
            raise ValueError("pairs must be >= 1")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


@dataclass(frozen=True)
class PairRecord:
    alice_angle: float
    agent_angle: float
    alice_bit: int
    agent_bit: int
    eve_touched: bool


@dataclass(frozen=True)
class SiftResult:
    key: np.ndarray
    agent_key: np.ndarray
    agreement: float | None

    @property
    def qber(self) -> float | None:
        return None if self.agreement is None else 1.0 - self.agreement


@dataclass(eq=False)
class E91Session:
    """Raw per-pair data, held column-wise; see :attr:`records` for row form."""

    alice_idx: np.ndarray
    agent_idx: np.ndarray
    alice_bits: np.ndarray
    agent_bits: np.ndarray
    eve_touched: np.ndarray
    eve_bits: np.ndarray
    chsh_threshold: float = 2.3
    sifted: SiftResult = field(init=False)
    chsh_s: float | None = field(init=False)

    def __post_init__(self):
        self.sifted = sift(self)
        try:
            self.chsh_s = chsh(self)
        except InsufficientSamples:
            self.chsh_s = None

    @property
    def num_pairs(self) -> int:
        return int(self.alice_bits.shape[0])

    @property
    def sifted_key(self) -> np.ndarray:
        return self.sifted.key

    @property
    def agreement(self) -> float | None:
        return self.sifted.agreement

    @property
    def qber(self) -> float | None:
        return self.sifted.qber

    @property
    def compromised(self) -> bool:
        # A session that cannot evaluate S cannot vouch for itself either.
        return self.chsh_s is None or abs(self.chsh_s) < self.chsh_threshold

    @property
    def counts(self) -> np.ndarray:
        """3x3 table of record counts, indexed [alice angle, agent angle]."""
        c = np.zeros((3, 3), dtype=int)
        np.add.at(c, (self.alice_idx, self.agent_idx), 1)
        return c

    @property
    def records(self) -> list[PairRecord]:
        return [
            PairRecord(ALICE_ANGLES[a], AGENT_ANGLES[b], int(x), int(y), bool(t))
            for a, b, x, y, t in zip(
                self.alice_idx, self.agent_idx, self.alice_bits, self.agent_bits, self.eve_touched
            )
        ]

    def sift_mask(self) -> np.ndarray:
        mask = np.zeros(self.num_pairs, dtype=bool)
        for a, b in SIFT_COMBOS:
            mask |= (self.alice_idx == a) & (self.agent_idx == b)
        return mask

    def eve_guess_rate(self) -> float | None:
        """How often Eve's inferred bit equals Alice's sifted bit, over touched sifted pairs."""
        sel = self.sift_mask() & self.eve_touched
        if not sel.any():
            return None
        # Eve holds the agent's half; the singlet puts Alice on the opposite bit.
        return float(np.mean((1 - self.eve_bits[sel]) == self.alice_bits[sel]))

    def summary(self) -> dict:
        return {
            "pairs": self.num_pairs,
            "sifted_len": int(self.sifted.key.shape[0]),
            "agreement": self.agreement,
            "qber": self.qber,
            "S": self.chsh_s,
            "compromised": self.compromised,
        }


def sift(session: E91Session) -> SiftResult:
    mask = session.sift_mask()
    key = session.alice_bits[mask].astype(np.int8)
    agent_key = (1 - session.agent_bits[mask]).astype(np.int8)
    agreement = float(np.mean(key == agent_key)) if key.size else None
    return SiftResult(key, agent_key, agreement)


def correlation(session: E91Session, alice_index: int, agent_index: int) -> float:
    sel = (session.alice_idx == alice_index) & (session.agent_idx == agent_index)
    n = int(sel.sum())
    if n == 0:
        raise InsufficientSamples(
            f"no records at angles ({ALICE_ANGLES[alice_index]:.4f}, {AGENT_ANGLES[agent_index]:.4f})"
        )
    same = np.sum(session.alice_bits[sel] == session.agent_bits[sel])
    return float((2 * same - n) / n)


def chsh(session: E91Session) -> float:
    return sum(sign * correlation(session, a, b) for a, b, sign in CHSH_TERMS)


class _Replay:
    def __init__(self, value):
        self.value = float(value)

    def random(self):
        return self.value


def _pairs_statevec(alice_angles, agent_angles, touched, eve_angles, u):
    """Reference path: one psi- register per pair through the generic simulator."""
    n = len(alice_angles)
    alice_bits = np.empty(n, dtype=np.int8)
    agent_bits = np.empty(n, dtype=np.int8)
    eve_bits = np.zeros(n, dtype=np.int8)
    singlet = make_bell_pair(BellOutcome.PSI_MINUS)
    for i in range(n):
        state = singlet
        if touched[i]:
            eve_bits[i], state = measure_angle(state, 1, eve_angles[i], _Replay(u[i, 0]))
        alice_bits[i], state = measure_angle(state, 0, alice_angles[i], _Replay(u[i, 1]))
        agent_bits[i], state = measure_angle(state, 1, agent_angles[i], _Replay(u[i, 2]))
    return alice_bits, agent_bits, eve_bits


def _trig(table, idx):
    cs = np.array([analyzer(a) for a in table])
    return np.ascontiguousarray(cs[idx, 0]), np.ascontiguousarray(cs[idx, 1])


def run_session(
    num_pairs: int,
    eve: EveModel = NO_EVE,
    rng=None,
    chsh_threshold: float = 2.3,
    engine: str = "kernel",
    backend=None,
) -> E91Session:
    """Distribute ``num_pairs`` singlets and measure them.

    Randomness is drawn in a fixed layout regardless of ``eve`` so that runs
    with equal seeds but different adversaries see the same basis choices.
    """
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    eve_table = eve.angles(DEFAULT_EVE_ANGLES)
    alice_idx = rng.integers(0, 3, num_pairs).astype(np.int8)
    agent_idx = rng.integers(0, 3, num_pairs).astype(np.int8)
    eve_roll = rng.random(num_pairs)
    eve_idx = rng.integers(0, len(eve_table), num_pairs)
    u = rng.random((num_pairs, 3))
    touched = eve_roll < eve.intercept_probability if eve.active else np.zeros(num_pairs, dtype=bool)

    if engine == "statevec":
        alice_bits, agent_bits, eve_bits = _pairs_statevec(
            [ALICE_ANGLES[i] for i in alice_idx],
            [AGENT_ANGLES[i] for i in agent_idx],
            touched,
            [eve_table[i] for i in eve_idx],
            u,
        )
    elif engine == "kernel":
        impl = backend or kernels.impl
        ac, as_ = _trig(ALICE_ANGLES, alice_idx)
        bc, bs = _trig(AGENT_ANGLES, agent_idx)
        ec, es = _trig(eve_table, eve_idx)
        alice_bits, agent_bits, eve_bits = impl.singlet_pairs(
            ac, as_, bc, bs, touched.astype(np.int8), ec, es, u
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")

    return E91Session(
        alice_idx=alice_idx,
        agent_idx=agent_idx,
        alice_bits=np.asarray(alice_bits, dtype=np.int8),
        agent_bits=np.asarray(agent_bits, dtype=np.int8),
        eve_touched=touched,
        eve_bits=np.asarray(eve_bits, dtype=np.int8),
        chsh_threshold=chsh_threshold,
    )


@dataclass
class EkertKey:
    alice_bits: tuple[int, ...]
    agent_bits: tuple[int, ...]
    sessions: list[E91Session]


def establish_key(length: int, config: EkertConfig, eve: EveModel, rng) -> EkertKey:
    """Run sessions until one passes the CHSH check and yields ``length`` sifted bits.

    The control key is the first ``length`` sifted bits.  Compromised or
    short sessions are discarded and rerun with fresh pairs.
    """
    sessions = []
    for _ in range(config.retries + 1):
        session = run_session(config.pairs, eve, rng, config.chsh_threshold)
        sessions.append(session)
        if session.compromised or session.sifted.key.shape[0] < length:
            continue
        return EkertKey(
            tuple(int(b) for b in session.sifted.key[:length]),
            tuple(int(b) for b in session.sifted.agent_key[:length]),
            sessions,
        )
    raise RetriesExhausted(
        f"Ekert91: all {len(sessions)} sessions compromised or short of {length} key bits",
        sessions,
    )
