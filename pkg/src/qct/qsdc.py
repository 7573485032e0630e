"""Single-photon secure direct communication from an agent to Alice.

Two-leg batch scheme: Alice sends photons prepared in random Z/X
eigenstates, a forward sample is checked by the agent, the agent encodes
the rest with Pass (bit 0) or the u3 flip (bit 1) and returns them, and
Alice reads each flip off in her preparation basis.  A sample of
random known bits on the return leg forms the backward check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qct import kernels
from qct.errors import BatchTooSmall, RetriesExhausted
from qct.eve import NO_EVE, EveModel
from qct.statevec import StateVector, analyzer, apply_gate, measure_angle
from qct.teleport import PauliCorrection

Z, X = 0, 1
# Analyzer angle per basis: 0 reads |0>/|1>, pi/2 reads |+>/|->.
BASIS_ANGLES = (0.0, math.pi / 2)
DEFAULT_EVE_ANGLES = BASIS_ANGLES


@dataclass(frozen=True)
class QsdcConfig:
    batch: int = 512
    check_fraction: float = 0.25
    qber_threshold: float = 0.05
    retries: int = 3

    def __post_init__(self):
        if not 0.0 < self.check_fraction < 1.0:
            raise ValueError("check_fraction must be in (0, 1)")
        if self.retries < 0:
            raise ValueError("retries must be >= 0")


@dataclass(eq=False)
class QsdcSession:
    batch_size: int
    check_fraction: float
    qber_forward: float | None
    qber_backward: float | None
    decoded_bits: tuple[int, ...]
    compromised: bool
    forward_conclusive: int
    backward_checked: int
    encoded: np.ndarray
    carrier: np.ndarray
    eve_touched: np.ndarray
    eve_bits: np.ndarray

    def eve_guess_rate(self) -> float | None:
        """Eve guessing each encoded bit from her forward-leg measurement alone."""
        sel = self.carrier & self.eve_touched
        if not sel.any():
            return None
        return float(np.mean(self.eve_bits[sel] == self.encoded[sel]))

    def summary(self) -> dict:
        return {
            "batch": self.batch_size,
            "qber_forward": self.qber_forward,
            "qber_backward": self.qber_backward,
            "compromised": self.compromised,
        }


def _prep_state(basis: int, bit: int) -> StateVector:
    c, s = analyzer(BASIS_ANGLES[basis])
    amps = [-s, c] if bit else [c, s]
    return StateVector(1, np.array(amps, dtype=complex))


class _Replay:
    def __init__(self, value):
        self.value = float(value)

    def random(self):
        return self.value


def _trips_statevec(prep_basis, prep_bit, touched, eve_angles, flip, meas_angles, u):
    n = len(prep_basis)
    eve_bits = np.zeros(n, dtype=np.int8)
    out_bits = np.empty(n, dtype=np.int8)
    u3 = PauliCorrection.U3.gate
    for i in range(n):
        state = _prep_state(int(prep_basis[i]), int(prep_bit[i]))
        if touched[i]:
            eve_bits[i], collapsed = measure_angle(state, 0, eve_angles[i], _Replay(u[i, 0]))
            # resend the eigenstate she observed
            c, s = analyzer(eve_angles[i])
            state = StateVector(1, np.array([-s, c] if eve_bits[i] else [c, s], dtype=complex))
        if flip[i]:
            state = apply_gate(state, u3, 0)
        out_bits[i], _ = measure_angle(state, 0, meas_angles[i], _Replay(u[i, 1]))
    return eve_bits, out_bits


def _cs(table, idx):
    cs = np.array([analyzer(a) for a in table])
    return np.ascontiguousarray(cs[idx, 0]), np.ascontiguousarray(cs[idx, 1])


def run_session(
    message_bits,
    batch_size: int = 512,
    check_fraction: float = 0.25,
    eve: EveModel = NO_EVE,
    rng=None,
    qber_threshold: float = 0.05,
    engine: str = "kernel",
    backend=None,
) -> QsdcSession:
    message = np.array([int(b) for b in message_bits], dtype=np.int8)
    if np.any((message != 0) & (message != 1)):
        raise ValueError("message bits must be 0 or 1")
    k = message.shape[0]
    n_check = int(round(check_fraction * batch_size))
    if n_check < 1 or batch_size - n_check < k + n_check:
        raise BatchTooSmall(
            f"batch {batch_size} cannot hold {n_check} forward checks, "
            f"{k} message photons and {n_check} backward checks"
        )
    B = batch_size
    eve_table = eve.angles(DEFAULT_EVE_ANGLES)
    prep_basis = rng.integers(0, 2, B).astype(np.int8)
    prep_bit = rng.integers(0, 2, B).astype(np.int8)
    eve_roll = rng.random(B)
    eve_idx = rng.integers(0, len(eve_table), B)
    perm = rng.permutation(B)
    check_basis = rng.integers(0, 2, B).astype(np.int8)
    pad = rng.integers(0, 2, B).astype(np.int8)
    u = rng.random((B, 2))
    touched = eve_roll < eve.intercept_probability if eve.active else np.zeros(B, dtype=bool)

    fwd = perm[:n_check]
    msg = perm[n_check:n_check + k]
    bwd = perm[n_check + k:n_check + k + n_check]
    is_fwd = np.zeros(B, dtype=bool)
    is_fwd[fwd] = True

    encoded = pad.copy()
    encoded[msg] = message
    flip = np.where(is_fwd, 0, encoded).astype(np.int8)
    meas_basis = np.where(is_fwd, check_basis, prep_basis)

    if engine == "statevec":
        eve_angles = [eve_table[i] for i in eve_idx]
        meas_angles = [BASIS_ANGLES[b] for b in meas_basis]
        eve_bits, out_bits = _trips_statevec(prep_basis, prep_bit, touched, eve_angles, flip, meas_angles, u)
    elif engine == "kernel":
        impl = backend or kernels.impl
        pc, ps = _cs(BASIS_ANGLES, prep_basis)
        ec, es = _cs(eve_table, eve_idx)
        mc, ms = _cs(BASIS_ANGLES, meas_basis)
        eve_bits, out_bits = impl.photon_trips(
            pc, ps, prep_bit, touched.astype(np.int8), ec, es, flip, mc, ms, u
        )
    else:
        raise ValueError(f"unknown engine {engine!r}")
    eve_bits = np.asarray(eve_bits, dtype=np.int8)
    out_bits = np.asarray(out_bits, dtype=np.int8)

    conclusive = fwd[check_basis[fwd] == prep_basis[fwd]]
    qber_fwd = (
        float(np.mean(out_bits[conclusive] != prep_bit[conclusive])) if conclusive.size else None
    )
    decoded = out_bits ^ prep_bit
    qber_bwd = float(np.mean(decoded[bwd] != encoded[bwd]))
    compromised = qber_fwd is None or qber_fwd > qber_threshold or qber_bwd > qber_threshold

    carrier = ~is_fwd
    carrier[perm[n_check + k + n_check:]] = False
    return QsdcSession(
        batch_size=B,
        check_fraction=check_fraction,
        qber_forward=qber_fwd,
        qber_backward=qber_bwd,
        decoded_bits=tuple(int(b) for b in decoded[msg]),
        compromised=compromised,
        forward_conclusive=int(conclusive.size),
        backward_checked=int(bwd.size),
        encoded=encoded,
        carrier=carrier,
        eve_touched=touched,
        eve_bits=eve_bits,
    )


@dataclass
class QsdcDelivery:
    delivered: tuple[int, ...]
    sent: tuple[int, ...]
    sessions: list[QsdcSession]

    @property
    def compromised(self) -> bool:
        """True if any attempt tripped a check before the accepted one."""
        return any(s.compromised for s in self.sessions)


def control_bit_via_qsdc(bits, config: QsdcConfig, eve: EveModel, rng) -> QsdcDelivery:
    """Send the agent's control bit(s) to Alice, retrying compromised batches."""
    sent = (int(bits),) if np.ndim(bits) == 0 else tuple(int(b) for b in bits)
    sessions = []
    for _ in range(config.retries + 1):
        session = run_session(
            sent, config.batch, config.check_fraction, eve, rng, config.qber_threshold
        )
        sessions.append(session)
        if not session.compromised:
            return QsdcDelivery(session.decoded_bits, sent, sessions)
    raise RetriesExhausted(f"QSDC: all {len(sessions)} batches compromised", sessions)
