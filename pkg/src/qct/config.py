"""JSON scenario files -> :class:`~qct.netsim.ScenarioConfig`.

Unspecified fields take the dataclass defaults; the fully defaulted
scenario is echoed into every report.
"""
from __future__ import annotations

import json

from qct.ekert91 import EkertConfig
from qct.errors import ParseError, ValidationError
from qct.eve import EveModel, EveStrategy
from qct.netsim import AgentSpec, EveConfig, ScenarioConfig
from qct.qsdc import QsdcConfig
from qct.teleport import MessageQubitSpec

_TOP_KEYS = {
    "m", "agents", "collaborators", "key_mode", "trials", "master_seed",
    "input_mode", "eve", "ekert", "qsdc",
}


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _int(section: dict, key: str, default, where: str):
    v = section.get(key, default)
    if not _is_int(v):
        raise ValidationError(f"{where}{key}", f"expected an integer, got {v!r}")
    return v


def _num(section: dict, key: str, default, where: str):
    v = section.get(key, default)
    if not _is_num(v):
        raise ValidationError(f"{where}{key}", f"expected a number, got {v!r}")
    return float(v)


def _object(v, where: str) -> dict:
    if not isinstance(v, dict):
        raise ValidationError(where, "expected an object")
    return v


def _no_extra(section: dict, allowed, where: str):
    extra = sorted(set(section) - set(allowed))
    if extra:
        raise ValidationError(f"{where}{extra[0]}", "unknown field")


def _eve_model(v, where: str) -> EveModel:
    v = _object(v, where)
    _no_extra(v, {"strategy", "intercept_probability", "basis_set"}, where + ".")
    try:
        strategy = EveStrategy(v.get("strategy", "intercept_resend"))
    except ValueError:
        raise ValidationError(f"{where}.strategy", f"unknown strategy {v.get('strategy')!r}") from None
    p = _num(v, "intercept_probability", 1.0, where + ".")
    basis = v.get("basis_set")
    if basis is not None:
        if not isinstance(basis, list) or not basis or not all(_is_num(a) for a in basis):
            raise ValidationError(f"{where}.basis_set", "expected a non-empty list of angles")
    try:
        return EveModel(strategy, tuple(basis) if basis else None, p)
    except ValueError as exc:
        raise ValidationError(where, str(exc)) from None


def _inputs(v):
    if v == "haar_random":
        return v
    if not isinstance(v, dict) or set(v) != {"fixed"} or not isinstance(v["fixed"], list):
        raise ValidationError("input_mode", "expected \"haar_random\" or {\"fixed\": [[re, im, re, im], ...]}")
    specs = []
    for i, row in enumerate(v["fixed"]):
        if not isinstance(row, list) or len(row) != 4 or not all(_is_num(x) for x in row):
            raise ValidationError(f"input_mode.fixed[{i}]", "expected [re, im, re, im]")
        try:
            specs.append(MessageQubitSpec(complex(row[0], row[1]), complex(row[2], row[3])))
        except ValueError as exc:
            raise ValidationError(f"input_mode.fixed[{i}]", str(exc)) from None
    return tuple(specs)


def parse_config(text: str) -> ScenarioConfig:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return config_from_dict(doc)


def config_from_dict(doc) -> ScenarioConfig:
    doc = _object(doc, "<root>")
    _no_extra(doc, _TOP_KEYS, "")
    if "m" not in doc:
        raise ValidationError("m", "required field missing")

    agents_raw = doc.get("agents", [])
    if not isinstance(agents_raw, list):
        raise ValidationError("agents", "expected a list")
    agents = []
    for i, a in enumerate(agents_raw):
        a = _object(a, f"agents[{i}]")
        _no_extra(a, {"id", "protocol"}, f"agents[{i}].")
        if not isinstance(a.get("id"), str) or not a["id"]:
            raise ValidationError(f"agents[{i}].id", "expected a non-empty string")
        agents.append(AgentSpec(a["id"], a.get("protocol", "ekert91")))

    collaborators = doc.get("collaborators")
    if collaborators is not None and (
        not isinstance(collaborators, list) or not all(isinstance(c, str) for c in collaborators)
    ):
        raise ValidationError("collaborators", "expected a list of agent ids")

    eve_raw = _object(doc.get("eve", {}), "eve")
    _no_extra(eve_raw, {"ekert_forward", "qsdc_forward", "classical"}, "eve.")
    classical = eve_raw.get("classical", False)
    if not isinstance(classical, bool):
        raise ValidationError("eve.classical", "expected true or false")
    eve = EveConfig(
        ekert_forward=_eve_model(eve_raw["ekert_forward"], "eve.ekert_forward")
        if "ekert_forward" in eve_raw else EveModel(),
        qsdc_forward=_eve_model(eve_raw["qsdc_forward"], "eve.qsdc_forward")
        if "qsdc_forward" in eve_raw else EveModel(),
        classical=classical,
    )

    ek = _object(doc.get("ekert", {}), "ekert")
    _no_extra(ek, {"pairs", "chsh_threshold", "retries"}, "ekert.")
    qs = _object(doc.get("qsdc", {}), "qsdc")
    _no_extra(qs, {"batch", "check_fraction", "qber_threshold", "retries"}, "qsdc.")
    ed, qd = EkertConfig(), QsdcConfig()
    ek_args = (
        _int(ek, "pairs", ed.pairs, "ekert."),
        _num(ek, "chsh_threshold", ed.chsh_threshold, "ekert."),
        _int(ek, "retries", ed.retries, "ekert."),
    )
    qs_args = (
        _int(qs, "batch", qd.batch, "qsdc."),
        _num(qs, "check_fraction", qd.check_fraction, "qsdc."),
        _num(qs, "qber_threshold", qd.qber_threshold, "qsdc."),
        _int(qs, "retries", qd.retries, "qsdc."),
    )
    try:
        ekert = EkertConfig(*ek_args)
    except ValueError as exc:
        raise ValidationError("ekert", str(exc)) from None
    try:
        qsdc = QsdcConfig(*qs_args)
    except ValueError as exc:
        raise ValidationError("qsdc", str(exc)) from None

    key_mode = doc.get("key_mode", "single_bit")
    if not isinstance(key_mode, str):
        raise ValidationError("key_mode", "expected a string")

    return ScenarioConfig(
        m=_int(doc, "m", None, ""),
        agents=tuple(agents),
        collaborators=tuple(collaborators) if collaborators is not None else None,
        eve=eve,
        key_mode=key_mode,
        trials=_int(doc, "trials", 1, ""),
        master_seed=_int(doc, "master_seed", 0, ""),
        input_mode=_inputs(doc.get("input_mode", "haar_random")),
        ekert=ekert,
        qsdc=qsdc,
    )
