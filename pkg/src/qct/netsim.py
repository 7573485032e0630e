"""End-to-end trials: key establishment, teleportation, encrypted announcement, reconstruction.

Seeds
-----
Trial ``t`` of a scenario runs on ``mix_seed(master_seed, t)``, where
``mix_seed(s, i)`` is output ``i + 1`` of a SplitMix64 stream seeded with
``s``: the state ``s + (i + 1) * 0x9E3779B97F4A7C15 (mod 2**64)`` passed
through the SplitMix64 finalizer.  Inside a trial, sub-stream 0 drives the
message inputs and Bell measurements and sub-stream 1 drives key
establishment (one child seed per agent, drawn up front).
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from qct import ekert91, qsdc
from qct.announce import (
    AgentKey,
    Announcement,
    corrections_from,
    decrypt,
    encode,
    encrypt,
    key_shifts,
    residual_shifts,
)
from qct.errors import ValidationError
from qct.eve import NO_EVE, EveModel
from qct.statevec import make_rng
from qct.teleport import MAX_MESSAGE_QUBITS, MessageQubitSpec, reconstruct, teleport_batch

EKERT91 = "ekert91"
QSDC = "qsdc"
PROTOCOLS = (EKERT91, QSDC)
KEY_MODES = ("single_bit", "per_qubit")
EXACT_TOL = 1e-9

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64_finalize(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(seed: int, index: int) -> int:
    return splitmix64_finalize(seed + (index + 1) * _GOLDEN)


@dataclass(frozen=True)
class AgentSpec:
    id: str
    protocol: str = EKERT91


@dataclass(frozen=True)
class EveConfig:
    ekert_forward: EveModel = NO_EVE
    qsdc_forward: EveModel = NO_EVE
    # passive reader of the public classical channel
    classical: bool = False


@dataclass(frozen=True)
class ScenarioConfig:
    m: int = 1
    agents: tuple[AgentSpec, ...] = ()
    collaborators: tuple[str, ...] | None = None
    eve: EveConfig = EveConfig()
    key_mode: str = "single_bit"
    trials: int = 1
    master_seed: int = 0
    input_mode: str | tuple[MessageQubitSpec, ...] = "haar_random"
    ekert: ekert91.EkertConfig = ekert91.EkertConfig()
    qsdc: qsdc.QsdcConfig = qsdc.QsdcConfig()

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not isinstance(self.m, int) or not 1 <= self.m <= MAX_MESSAGE_QUBITS:
            raise ValidationError("m", f"must be an integer in 1..{MAX_MESSAGE_QUBITS}")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise ValidationError("agents", "agent ids must be unique")
        for a in self.agents:
            if a.protocol not in PROTOCOLS:
                raise ValidationError("agents", f"unknown protocol {a.protocol!r} for {a.id!r}")
        if self.collaborators is None:
            object.__setattr__(self, "collaborators", tuple(ids))
        else:
            object.__setattr__(self, "collaborators", tuple(self.collaborators))
        unknown = [c for c in self.collaborators if c not in ids]
        if unknown:
            raise ValidationError("collaborators", f"unknown agent ids {unknown}")
        if self.key_mode not in KEY_MODES:
            raise ValidationError("key_mode", f"must be one of {KEY_MODES}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ValidationError("trials", "must be an integer >= 1")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed <= _MASK64:
            raise ValidationError("master_seed", "must be an integer in [0, 2**64)")
        if isinstance(self.input_mode, str):
            if self.input_mode != "haar_random":
                raise ValidationError("input_mode", "must be 'haar_random' or a fixed list")
        else:
            object.__setattr__(self, "input_mode", tuple(self.input_mode))
            if len(self.input_mode) != self.m:
                raise ValidationError("input_mode", f"fixed list has {len(self.input_mode)} specs, m is {self.m}")

    def key_length(self) -> int:
        return 1 if self.key_mode == "single_bit" else self.m

    def to_dict(self) -> dict:
        if isinstance(self.input_mode, str):
            inputs = self.input_mode
        else:
            inputs = {
                "fixed": [
                    [s.alpha.real, s.alpha.imag, s.beta.real, s.beta.imag] for s in self.input_mode
                ]
            }
        return {
            "m": self.m,
            "agents": [{"id": a.id, "protocol": a.protocol} for a in self.agents],
            "collaborators": list(self.collaborators),
            "key_mode": self.key_mode,
            "trials": self.trials,
            "master_seed": self.master_seed,
            "input_mode": inputs,
            "eve": {
                "ekert_forward": self.eve.ekert_forward.to_dict(),
                "qsdc_forward": self.eve.qsdc_forward.to_dict(),
                "classical": self.eve.classical,
            },
            "ekert": {
                "pairs": self.ekert.pairs,
                "chsh_threshold": self.ekert.chsh_threshold,
                "retries": self.ekert.retries,
            },
            "qsdc": {
                "batch": self.qsdc.batch,
                "check_fraction": self.qsdc.check_fraction,
                "qber_threshold": self.qsdc.qber_threshold,
                "retries": self.qsdc.retries,
            },
        }


@dataclass(frozen=True)
class Message:
    sender: str
    topic: str
    payload: tuple


class ClassicalChannel:
    """Authenticated public broadcast: everyone may read, nobody may alter."""

    def __init__(self):
        self._log: list[Message] = []
        self._listeners = []

    def subscribe(self, listener):
        self._listeners.append(listener)

    def publish(self, sender: str, topic: str, payload) -> Message:
        msg = Message(sender, topic, tuple(payload))
        self._log.append(msg)
        for listener in self._listeners:
            listener(msg)
        return msg

    @property
    def log(self) -> tuple[Message, ...]:
        return tuple(self._log)


class PassiveEavesdropper:
    def __init__(self):
        self.transcript: list[Message] = []

    def __call__(self, msg: Message):
        self.transcript.append(msg)


@dataclass
class KeyEstablishment:
    agent_id: str
    protocol: str
    alice_bits: tuple[int, ...]
    agent_bits: tuple[int, ...]
    sessions: list[dict]

    @property
    def compromised_sessions(self) -> int:
        return sum(1 for s in self.sessions if s["compromised"])

    def to_dict(self) -> dict:
        return {
            "agent": self.agent_id,
            "protocol": self.protocol,
            "alice_bits": "".join(map(str, self.alice_bits)),
            "agent_bits": "".join(map(str, self.agent_bits)),
            "attempts": len(self.sessions),
            "compromised_sessions": self.compromised_sessions,
            "sessions": self.sessions,
        }


def establish_keys(config: ScenarioConfig, rng) -> dict[str, KeyEstablishment]:
    """Give every agent a control key shared with Alice, by its own protocol."""
    length = config.key_length()
    seeds = rng.integers(0, 2**63, size=len(config.agents))
    out = {}
    for agent, seed in zip(config.agents, seeds):
        sub = make_rng(int(seed))
        if agent.protocol == EKERT91:
            key = ekert91.establish_key(length, config.ekert, config.eve.ekert_forward, sub)
            out[agent.id] = KeyEstablishment(
                agent.id, agent.protocol, key.alice_bits, key.agent_bits,
                [s.summary() for s in key.sessions],
            )
        else:
            bits = tuple(int(b) for b in sub.integers(0, 2, length))
            delivery = qsdc.control_bit_via_qsdc(bits, config.qsdc, config.eve.qsdc_forward, sub)
            out[agent.id] = KeyEstablishment(
                agent.id, agent.protocol, delivery.delivered, delivery.sent,
                [s.summary() for s in delivery.sessions],
            )
    return out


def _uniform_or_list(values):
    return values[0] if len(set(values)) == 1 else list(values)


@dataclass
class TrialReport:
    trial: int
    seed: int
    fidelities: list[float]
    true_codes: Announcement
    announced_codes: Announcement
    decoded_codes: Announcement
    revealed_shift: list[int]
    residual_shift: list[int]
    keys: dict[str, KeyEstablishment] = field(default_factory=dict)

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def exact(self) -> bool:
        return all(f >= 1.0 - EXACT_TOL for f in self.fidelities)

    @property
    def compromised_count(self) -> int:
        return sum(k.compromised_sessions for k in self.keys.values())

    def chsh_values(self) -> list[float]:
        return [
            s["S"] for k in self.keys.values() if k.protocol == EKERT91
            for s in k.sessions if s["S"] is not None
        ]

    def qber_values(self) -> list[float]:
        out = []
        for k in self.keys.values():
            for s in k.sessions:
                if k.protocol == EKERT91:
                    vals = [s["qber"]]
                else:
                    vals = [s["qber_forward"], s["qber_backward"]]
                vals = [v for v in vals if v is not None]
                if vals:
                    out.append(max(vals))
        return out

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "fidelities": list(self.fidelities),
            "mean_fidelity": self.mean_fidelity,
            "true_codes": self.true_codes.rendered(),
            "announced_codes": self.announced_codes.rendered(),
            "decoded_codes": self.decoded_codes.rendered(),
            "revealed_shift": _uniform_or_list(self.revealed_shift),
            "residual_shift": _uniform_or_list(self.residual_shift),
            "compromised_count": self.compromised_count,
            "keys": [k.to_dict() for k in self.keys.values()],
        }


def run_trial(config: ScenarioConfig, trial_index: int, channel: ClassicalChannel | None = None) -> TrialReport:
    seed = mix_seed(config.master_seed, trial_index)
    tele_rng = make_rng(mix_seed(seed, 0))
    key_rng = make_rng(mix_seed(seed, 1))

    keys = establish_keys(config, key_rng)
    if isinstance(config.input_mode, str):
        specs = [MessageQubitSpec.haar_random(tele_rng) for _ in range(config.m)]
    else:
        specs = list(config.input_mode)
    records = teleport_batch(specs, tele_rng)

    true = Announcement(tuple(encode(r.outcome) for r in records))
    alice_keys = [AgentKey(k.agent_id, k.alice_bits) for k in keys.values()]
    announced = encrypt(true, alice_keys)

    channel = channel or ClassicalChannel()
    if config.eve.classical:
        channel.subscribe(PassiveEavesdropper())
    channel.publish("Alice", "announcement", announced.rendered())

    # Collaborators hand Bob the bit as they hold it, privately.
    revealed = [
        AgentKey(keys[a].agent_id, keys[a].agent_bits) for a in config.collaborators
    ]
    decoded = decrypt(announced, revealed)
    corrections = corrections_from(decoded)
    fidelities = [reconstruct(rec, c) for rec, c in zip(records, corrections)]

    return TrialReport(
        trial=trial_index,
        seed=seed,
        fidelities=fidelities,
        true_codes=true,
        announced_codes=announced,
        decoded_codes=decoded,
        revealed_shift=key_shifts(revealed, config.m),
        residual_shift=residual_shifts(alice_keys, revealed, config.m),
        keys=keys,
    )


def _stats(values) -> dict:
    if not values:
        return {"count": 0, "mean": None, "std": None, "min": None, "max": None}
    arr = np.asarray(values, dtype=float)
    return {
        "count": int(arr.size),
        "mean": float(arr.mean()),
        "std": float(arr.std()),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


def aggregate(trials: list[TrialReport]) -> dict:
    """Summary statistics; inputs are taken in trial order, so the result is schedule-independent."""
    trials = sorted(trials, key=lambda t: t.trial)
    fids = [f for t in trials for f in t.fidelities]
    return {
        "trials": len(trials),
        "qubits": len(fids),
        "fidelity": _stats(fids),
        "exact_trials": sum(t.exact for t in trials),
        "nonzero_residual_trials": sum(any(t.residual_shift) for t in trials),
        "chsh": _stats([s for t in trials for s in t.chsh_values()]),
        "qber": _stats([q for t in trials for q in t.qber_values()]),
        "key_sessions": sum(len(k.sessions) for t in trials for k in t.keys.values()),
        "compromised_sessions": sum(t.compromised_count for t in trials),
    }


@dataclass
class RunResult:
    config: ScenarioConfig
    trials: list[TrialReport]
    aggregate: dict


def _run_one(args):
    config, index = args
    return run_trial(config, index)


def run_trials(config: ScenarioConfig, workers: int = 1) -> RunResult:
    indices = range(config.trials)
    if workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials = list(pool.map(_run_one, [(config, i) for i in indices]))
    else:
        trials = [run_trial(config, i) for i in indices]
    return RunResult(config, trials, aggregate(trials))


__all__ = [
    "AgentSpec",
    "ClassicalChannel",
    "EveConfig",
    "KeyEstablishment",
    "PassiveEavesdropper",
    "RunResult",
    "ScenarioConfig",
    "TrialReport",
    "aggregate",
    "establish_keys",
    "mix_seed",
    "run_trial",
    "run_trials",
]
