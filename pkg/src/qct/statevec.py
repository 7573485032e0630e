"""Dense state-vector simulation core.

Qubit 0 is the most significant bit of the amplitude index, so the
amplitude of ``|q0 q1 ... q(n-1)>`` sits at ``int("q0q1...", 2)``.

Single-qubit measurements use the analyzer convention

    bit 0:  cos(theta/2)|0> + sin(theta/2)|1>
    bit 1: -sin(theta/2)|0> + cos(theta/2)|1>

under which the singlet correlation is ``E(a, b) = -cos(a - b)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from qct.errors import (
    CapacityExceeded,
    DegenerateState,
    DimensionMismatch,
    IndexOutOfRange,
    NotUnitary,
    ZeroVector,
)

MAX_QUBITS = 12
NORM_TOL = 1e-9
MASS_TOL = 1e-12

Rng = np.random.Generator

_SQRT1_2 = 1.0 / math.sqrt(2.0)


def make_rng(seed: int) -> Rng:
    """PCG64 generator from a 64-bit seed."""
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must fit in 64 unsigned bits, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


class BellOutcome(Enum):
    PHI_PLUS = "phi+"
    PHI_MINUS = "phi-"
    PSI_PLUS = "psi+"
    PSI_MINUS = "psi-"

    @property
    def vector(self) -> np.ndarray:
        return _BELL_VECTORS[self]


# Sampling walks the outcomes in this order; the compiled kernels do the same.
BELL_ORDER = (
    BellOutcome.PHI_PLUS,
    BellOutcome.PHI_MINUS,
    BellOutcome.PSI_PLUS,
    BellOutcome.PSI_MINUS,
)

_BELL_VECTORS = {
    BellOutcome.PHI_PLUS: np.array([1, 0, 0, 1], dtype=complex) * _SQRT1_2,
    BellOutcome.PHI_MINUS: np.array([1, 0, 0, -1], dtype=complex) * _SQRT1_2,
    BellOutcome.PSI_PLUS: np.array([0, 1, 1, 0], dtype=complex) * _SQRT1_2,
    BellOutcome.PSI_MINUS: np.array([0, 1, -1, 0], dtype=complex) * _SQRT1_2,
}
for _v in _BELL_VECTORS.values():
    _v.setflags(write=False)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``num_qubits`` qubits."""

    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2**self.num_qubits:
            raise DimensionMismatch(
                f"{amps.size} amplitudes for {self.num_qubits} qubits"
            )
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state not normalized (squared norm {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(amps.size))) if amps.size else -1
        if n < 0 or 2**n != amps.size:
            raise DimensionMismatch(f"length {amps.size} is not a power of two")
        if normalize:
            norm = math.sqrt(float(np.vdot(amps, amps).real))
            if norm == 0.0:
                raise ZeroVector("cannot normalize the zero vector")
            amps = amps / norm
        return cls(n, amps)

    @classmethod
    def scalar(cls) -> "StateVector":
        """The 0-qubit unit state, identity for :func:`tensor`."""
        return cls(0, np.ones(1, dtype=complex))

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self):
        return f"StateVector({self.num_qubits}, {np.array2string(self.amplitudes, precision=4)})"


def basis_state(bits: str) -> StateVector:
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[int(bits, 2) if bits else 0] = 1.0
    return StateVector(len(bits), amps)


def make_message_qubit(alpha: complex, beta: complex) -> StateVector:
    alpha, beta = complex(alpha), complex(beta)
    if alpha == 0 and beta == 0:
        raise ZeroVector("alpha and beta are both zero")
    return StateVector.from_amplitudes([alpha, beta], normalize=True)


def make_bell_pair(kind: BellOutcome) -> StateVector:
    return StateVector(2, kind.vector)


def tensor(a: StateVector, b: StateVector, max_qubits: int = MAX_QUBITS) -> StateVector:
    n = a.num_qubits + b.num_qubits
    if n > max_qubits:
        raise CapacityExceeded(f"{n} qubits exceeds the limit of {max_qubits}")
    return StateVector(n, np.kron(a.amplitudes, b.amplitudes))


@dataclass(frozen=True, eq=False)
class Gate:
    """A 2x2 unitary."""

    matrix: np.ndarray
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (2, 2):
            raise DimensionMismatch(f"gate must be 2x2, got {m.shape}")
        if not np.allclose(m.conj().T @ m, np.eye(2), atol=NORM_TOL, rtol=0):
            raise NotUnitary(f"gate {self.name or m!r} is not unitary")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __matmul__(self, other: "Gate") -> "Gate":
        return Gate(self.matrix @ other.matrix, f"{self.name}*{other.name}")


def _check_index(state: StateVector, *targets: int):
    for t in targets:
        if not 0 <= t < state.num_qubits:
            raise IndexOutOfRange(f"qubit {t} not in a {state.num_qubits}-qubit register")


def _as_tensor(state: StateVector) -> np.ndarray:
    return state.amplitudes.reshape([2] * state.num_qubits)


def apply_gate(state: StateVector, gate: Gate, target: int) -> StateVector:
    _check_index(state, target)
    psi = np.moveaxis(_as_tensor(state), target, 0)
    out = np.tensordot(gate.matrix, psi, axes=([1], [0]))
    out = np.moveaxis(out, 0, target)
    return StateVector(state.num_qubits, out.reshape(-1))


def analyzer(theta: float) -> tuple[float, float]:
    """(cos, sin) of the half angle; the bit-0 eigenvector of the analyzer."""
    return math.cos(theta / 2.0), math.sin(theta / 2.0)


def measure_angle(state: StateVector, target: int, theta: float, rng) -> tuple[int, StateVector]:
    """Projective measurement of one qubit along the analyzer at ``theta``.

    ``rng`` only needs a ``random()`` method returning a float in [0, 1).
    The measured qubit stays in the register, collapsed onto the eigenvector.
    """
    _check_index(state, target)
    if not math.isfinite(theta):
        raise ValueError("theta must be finite")
    c, s = analyzer(theta)
    psi = np.moveaxis(_as_tensor(state), target, 0)
    branch0 = c * psi[0] + s * psi[1]
    branch1 = -s * psi[0] + c * psi[1]
    p0 = float(np.sum(branch0.real**2 + branch0.imag**2))
    p1 = float(np.sum(branch1.real**2 + branch1.imag**2))
    u = rng.random()
    if u * (p0 + p1) < p0:
        bit, rest, p, eig = 0, branch0, p0, (c, s)
    else:
        bit, rest, p, eig = 1, branch1, p1, (-s, c)
    if p < MASS_TOL:
        raise DegenerateState(f"measured branch has mass {p!r}")
    rest = rest / math.sqrt(p)
    out = np.stack([eig[0] * rest, eig[1] * rest])
    out = np.moveaxis(out, 0, target)
    return bit, StateVector(state.num_qubits, out.reshape(-1))


def _pair_first(state: StateVector, q1: int, q2: int) -> np.ndarray:
    """Reshape to (4, rest) with (q1, q2) as the leading index pair."""
    psi = np.moveaxis(_as_tensor(state), (q1, q2), (0, 1))
    return psi.reshape(4, -1)


def bell_probabilities(state: StateVector, q1: int, q2: int) -> dict[BellOutcome, float]:
    _check_bell_args(state, q1, q2)
    m = _pair_first(state, q1, q2)
    out = {}
    for kind in BELL_ORDER:
        r = kind.vector.conj() @ m
        out[kind] = float(np.sum(r.real**2 + r.imag**2))
    return out


def _check_bell_args(state: StateVector, q1: int, q2: int):
    if state.num_qubits < 2:
        raise IndexOutOfRange("Bell measurement needs at least two qubits")
    _check_index(state, q1, q2)
    if q1 == q2:
        raise IndexOutOfRange("Bell measurement needs two distinct qubits")


def bell_measure(
    state: StateVector, q1: int, q2: int, rng, keep_pair: bool = False
) -> tuple[BellOutcome, StateVector]:
    """Measure qubits (q1, q2) in the Bell basis.

    By default the measured pair is removed and the remaining
    ``num_qubits - 2`` qubits are returned.  ``keep_pair=True`` leaves the
    register intact with the pair collapsed onto the observed Bell state.
    """
    _check_bell_args(state, q1, q2)
    m = _pair_first(state, q1, q2)
    residuals = [kind.vector.conj() @ m for kind in BELL_ORDER]
    probs = [float(np.sum(r.real**2 + r.imag**2)) for r in residuals]
    total = sum(probs)
    if total < MASS_TOL:
        raise DegenerateState(f"Bell projector mass {total!r}")
    u = rng.random() * total
    acc = 0.0
    pick = max(k for k in range(4) if probs[k] > 0.0)
    for k in range(4):
        acc += probs[k]
        if u < acc:
            pick = k
            break
    kind = BELL_ORDER[pick]
    rest = residuals[pick] / math.sqrt(probs[pick])
    if not keep_pair:
        return kind, StateVector(state.num_qubits - 2, rest)
    full = np.outer(kind.vector, rest).reshape([2, 2] + [2] * (state.num_qubits - 2))
    full = np.moveaxis(full, (0, 1), (q1, q2))
    return kind, StateVector(state.num_qubits, full.reshape(-1))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise DimensionMismatch(f"{a.num_qubits} vs {b.num_qubits} qubits")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(1.0, max(0.0, f)))
