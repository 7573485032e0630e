"""Classical side of the protocol: 2-bit outcome codes and mod-4 key shifts.

Every agent key adds its bit to each 2-bit code modulo 4.  A single-bit
key shifts all positions uniformly; a per-qubit key (length m) shifts
position j by its j-th bit.
"""
from __future__ import annotations

from dataclasses import dataclass

from qct.errors import KeyLengthMismatch
from qct.statevec import BellOutcome
from qct.teleport import PauliCorrection, correction_for

_CODE = {
    BellOutcome.PHI_PLUS: 0,
    BellOutcome.PHI_MINUS: 1,
    BellOutcome.PSI_PLUS: 2,
    BellOutcome.PSI_MINUS: 3,
}
_OUTCOME = {v: k for k, v in _CODE.items()}


def render(code: int) -> str:
    return format(code, "02b")


def parse_code(text: str) -> int:
    text = text.strip().strip("'\"")
    if len(text) != 2 or set(text) - {"0", "1"}:
        raise ValueError(f"not a 2-bit code: {text!r}")
    return int(text, 2)


@dataclass(frozen=True)
class Announcement:
    codes: tuple[int, ...]

    def __post_init__(self):
        codes = tuple(int(c) for c in self.codes)
        if any(not 0 <= c < 4 for c in codes):
            raise ValueError(f"codes must be in 0..3: {codes}")
        object.__setattr__(self, "codes", codes)

    @classmethod
    def parse(cls, text) -> "Announcement":
        if isinstance(text, str):
            text = text.replace(",", " ").split()
        return cls(tuple(parse_code(t) for t in text))

    def rendered(self) -> list[str]:
        return [render(c) for c in self.codes]

    def __len__(self):
        return len(self.codes)

    def __str__(self):
        return "(" + ",".join(self.rendered()) + ")"


@dataclass(frozen=True)
class AgentKey:
    agent_id: str
    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits or any(b not in (0, 1) for b in bits):
            raise ValueError(f"key bits must be a non-empty 0/1 string: {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def single(cls, agent_id: str, bit: int) -> "AgentKey":
        return cls(agent_id, (bit,))

    def bit_at(self, j: int) -> int:
        return self.bits[0] if len(self.bits) == 1 else self.bits[j]


def encode(outcome: BellOutcome) -> int:
    return _CODE[outcome]


def decode(code: int) -> BellOutcome:
    return _OUTCOME[code]


def key_shifts(keys, m: int) -> list[int]:
    """Per-position shift (sum of key bits mod 4) for an m-code announcement."""
    shifts = [0] * m
    for key in keys:
        if len(key.bits) not in (1, m):
            raise KeyLengthMismatch(
                f"key of {key.agent_id!r} has {len(key.bits)} bits, need 1 or {m}"
            )
        for j in range(m):
            shifts[j] += key.bit_at(j)
    return [s % 4 for s in shifts]


def encrypt(codes: Announcement, keys) -> Announcement:
    shifts = key_shifts(keys, len(codes))
    return Announcement(tuple((c + s) % 4 for c, s in zip(codes.codes, shifts)))


def decrypt(codes: Announcement, known_keys) -> Announcement:
    """Undo the shift of the keys Bob knows; unknown keys count as zero."""
    shifts = key_shifts(known_keys, len(codes))
    return Announcement(tuple((c - s) % 4 for c, s in zip(codes.codes, shifts)))


def residual_shifts(all_keys, revealed_keys, m: int) -> list[int]:
    """Offset left in Bob's decoded codes, per position."""
    full = key_shifts(all_keys, m)
    known = key_shifts(revealed_keys, m)
    return [(f - k) % 4 for f, k in zip(full, known)]


def corrections_from(codes: Announcement) -> list[PauliCorrection]:
    return [correction_for(decode(c)) for c in codes.codes]
