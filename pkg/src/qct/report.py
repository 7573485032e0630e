"""Report documents in json, csv and text form.

Floats are rounded to 12 significant digits before serialization so
reruns with the same seed are byte-identical.
"""
from __future__ import annotations

import csv
import io
import json
import math
from importlib import resources

from qct.netsim import RunResult

SCHEMA_VERSION = "1.0"
CSV_COLUMNS = ("trial", "mean_fidelity", "residual_shift", "chsh_min", "qber_max", "compromised_count")


def _round(x: float) -> float:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value in report: {x!r}")
    return float(format(x, ".12g"))


def normalize(obj):
    """Round floats recursively; tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return _round(obj)
    if isinstance(obj, dict):
        return {k: normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return normalize(obj.item())
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def build_document(result: RunResult, include_trials: bool = True) -> dict:
    return normalize({
        "schema_version": SCHEMA_VERSION,
        "scenario": result.config.to_dict(),
        "aggregate": result.aggregate,
        "trials": [t.to_dict() for t in result.trials] if include_trials else [],
    })


def load_schema() -> dict:
    return json.loads(resources.files("qct").joinpath("report_schema.json").read_text())


def to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".12g")
    if isinstance(x, list):
        return "-".join(str(v) for v in x)
    return str(x)


def to_csv(result: RunResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for t in result.trials:
        d = t.to_dict()
        chsh = [abs(s) for s in t.chsh_values()]
        qber = t.qber_values()
        writer.writerow([
            _fmt(t.trial),
            _fmt(t.mean_fidelity),
            _fmt(d["residual_shift"]),
            _fmt(min(chsh) if chsh else None),
            _fmt(max(qber) if qber else None),
            _fmt(t.compromised_count),
        ])
    return buf.getvalue()


def _stat_line(name: str, s: dict) -> str:
    if not s["count"]:
        return f"  {name:<22} n/a"
    return (
        f"  {name:<22} mean {s['mean']:.6f}  std {s['std']:.6f}  "
        f"min {s['min']:.6f}  max {s['max']:.6f}  (n={s['count']})"
    )


def to_text(result: RunResult) -> str:
    cfg = result.config
    agg = result.aggregate
    agents = ", ".join(f"{a.id}:{a.protocol}" for a in cfg.agents) or "none"
    lines = [
        f"scenario: m={cfg.m} agents=[{agents}] collaborators=[{', '.join(cfg.collaborators)}]",
        f"          key_mode={cfg.key_mode} trials={cfg.trials} master_seed={cfg.master_seed}",
        "aggregate:",
        _stat_line("fidelity", agg["fidelity"]),
        _stat_line("CHSH S", agg["chsh"]),
        _stat_line("QBER", agg["qber"]),
        f"  exact trials           {agg['exact_trials']}/{agg['trials']}",
        f"  nonzero residual shift {agg['nonzero_residual_trials']}/{agg['trials']}",
        f"  compromised sessions   {agg['compromised_sessions']}/{agg['key_sessions']}",
    ]
    return "\n".join(lines) + "\n"
