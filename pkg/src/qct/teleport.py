"""Single-qubit teleportation through a phi+ pair, one message qubit at a time.

Each message qubit gets its own Bell pair, so the m-qubit input factorizes
and a 3-qubit register per qubit reproduces the joint statistics exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qct import kernels
from qct.errors import ZeroVector
from qct.statevec import (
    BELL_ORDER,
    BellOutcome,
    Gate,
    StateVector,
    bell_measure,
    fidelity,
    make_bell_pair,
    tensor,
)

MAX_MESSAGE_QUBITS = 64


@dataclass(frozen=True)
class MessageQubitSpec:
    """alpha|0> + beta|1>, normalized on construction."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if norm == 0.0:
            raise ZeroVector("alpha and beta are both zero")
        object.__setattr__(self, "alpha", a / norm)
        object.__setattr__(self, "beta", b / norm)

    @classmethod
    def haar_random(cls, rng) -> "MessageQubitSpec":
        g = rng.standard_normal(4)
        return cls(complex(g[0], g[1]), complex(g[2], g[3]))

    def state(self) -> StateVector:
        return StateVector(1, np.array([self.alpha, self.beta]))


class PauliCorrection(Enum):
    IDENTITY = "I"
    U1_X = "u1"
    U2_Z = "u2"
    U3 = "u3"

    @property
    def gate(self) -> Gate:
        return _GATES[self]


_GATES = {
    PauliCorrection.IDENTITY: Gate([[1, 0], [0, 1]], "I"),
    PauliCorrection.U1_X: Gate([[0, 1], [1, 0]], "u1"),
    PauliCorrection.U2_Z: Gate([[1, 0], [0, -1]], "u2"),
    # |0><1| - |1><0|
    PauliCorrection.U3: Gate([[0, 1], [-1, 0]], "u3"),
}

# Forced by the branch structure: each correction undoes its branch's operator.
_CORRECTION = {
    BellOutcome.PHI_PLUS: PauliCorrection.IDENTITY,
    BellOutcome.PSI_PLUS: PauliCorrection.U1_X,
    BellOutcome.PHI_MINUS: PauliCorrection.U2_Z,
    BellOutcome.PSI_MINUS: PauliCorrection.U3,
}


def correction_for(outcome: BellOutcome) -> PauliCorrection:
    return _CORRECTION[outcome]


@dataclass(frozen=True, eq=False)
class TeleportRecord:
    outcome: BellOutcome
    bob_state_pre_correction: StateVector
    reference: MessageQubitSpec


def teleport_one(spec: MessageQubitSpec, rng) -> TeleportRecord:
    """Teleport one qubit: register is (message, Alice's half, Bob's half)."""
    joint = tensor(spec.state(), make_bell_pair(BellOutcome.PHI_PLUS))
    outcome, bob = bell_measure(joint, 0, 1, rng)
    return TeleportRecord(outcome, bob, spec)


def apply_correction(record: TeleportRecord, correction: PauliCorrection) -> StateVector:
    amps = correction.gate.matrix @ record.bob_state_pre_correction.amplitudes
    return StateVector(1, amps)


def teleport_batch(specs, rng, max_qubits: int = MAX_MESSAGE_QUBITS, engine: str = "kernel"):
    """Teleport each spec through its own Bell pair.

    ``engine="kernel"`` runs the batched compiled/numpy kernel;
    ``engine="statevec"`` loops :func:`teleport_one`.  Both draw one uniform
    per qubit in order, so equal seeds give equal records.
    """
    specs = list(specs)
    if not 1 <= len(specs) <= max_qubits:
        raise ValueError(f"need 1..{max_qubits} message qubits, got {len(specs)}")
    if engine == "statevec":
        return [teleport_one(s, rng) for s in specs]
    if engine != "kernel":
        raise ValueError(f"unknown engine {engine!r}")
    return teleport_arrays_to_records(specs, *teleport_arrays(specs, rng))


def teleport_arrays(specs, rng, backend=None):
    """Kernel path returning raw arrays (outcome indices, Bob amplitudes)."""
    impl = backend or kernels.impl
    alpha = np.array([s.alpha for s in specs], dtype=complex)
    beta = np.array([s.beta for s in specs], dtype=complex)
    u = rng.random(len(specs))
    return impl.bell_teleport(
        np.ascontiguousarray(alpha.real),
        np.ascontiguousarray(alpha.imag),
        np.ascontiguousarray(beta.real),
        np.ascontiguousarray(beta.imag),
        u,
    )


def teleport_arrays_to_records(specs, outcomes, bob_re, bob_im):
    return [
        TeleportRecord(
            BELL_ORDER[int(k)],
            StateVector(1, np.array([complex(bob_re[i, 0], bob_im[i, 0]), complex(bob_re[i, 1], bob_im[i, 1])])),
            spec,
        )
        for i, (spec, k) in enumerate(zip(specs, outcomes))
    ]


def reconstruct(record: TeleportRecord, correction: PauliCorrection) -> float:
    """Fidelity of Bob's corrected qubit against the message."""
    return fidelity(apply_correction(record, correction), record.reference.state())
