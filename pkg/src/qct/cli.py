"""``qct`` command line: run scenarios, replay the worked example, self-test.

Exit codes: 0 success, 1 internal invariant failure, 2 configuration
error, 3 key establishment exhausted its retries.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys

from qct import selftest
from qct.announce import AgentKey, Announcement, corrections_from, decrypt, encode, encrypt
from qct.config import parse_config
from qct.errors import ConfigError, QctError, RetriesExhausted, ValidationError
from qct.netsim import AgentSpec, ScenarioConfig, run_trials
from qct.report import build_document, to_csv, to_json, to_text
from qct.statevec import BellOutcome

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_RETRIES = 0, 1, 2, 3

_SYMBOL = {
    BellOutcome.PHI_PLUS: "phi+",
    BellOutcome.PHI_MINUS: "phi-",
    BellOutcome.PSI_PLUS: "psi+",
    BellOutcome.PSI_MINUS: "psi-",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qct", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario file")
    run.add_argument("--config", required=True, help="scenario JSON file")
    run.add_argument("--seed", type=int, help="override master_seed")
    run.add_argument("--trials", type=int, help="override trials")
    run.add_argument("--format", choices=("json", "csv", "text"), default="json")
    run.add_argument("--out", help="write the report here instead of stdout")
    run.add_argument("--workers", type=int, default=1, help="worker processes for trials")

    sub.add_parser("demo", help="replay the two-agent announcement example")
    sub.add_parser("selftest", help="run the built-in invariant checks")
    return parser


def load_scenario(path: str, seed=None, trials=None) -> ScenarioConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError("--config", f"cannot read {path}: {exc.strerror}") from None
    config = parse_config(text)
    changes = {}
    if seed is not None:
        changes["master_seed"] = seed
    if trials is not None:
        changes["trials"] = trials
    return dataclasses.replace(config, **changes) if changes else config


def cmd_run(args, out, err) -> int:
    try:
        config = load_scenario(args.config, args.seed, args.trials)
    except ConfigError as exc:
        print(f"qct: config error: {exc}", file=err)
        return EXIT_CONFIG
    try:
        result = run_trials(config, workers=max(1, args.workers))
    except RetriesExhausted as exc:
        print(f"qct: {exc}", file=err)
        return EXIT_RETRIES

    if args.format == "json":
        text = to_json(build_document(result))
    elif args.format == "csv":
        text = to_csv(result)
    else:
        text = to_text(result)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def demo_lines() -> tuple[list[str], bool]:
    """Two agents: Charlie holds key '1', Dick key '0'."""
    outcomes = [BellOutcome.PSI_PLUS, BellOutcome.PHI_MINUS, BellOutcome.PSI_MINUS]
    charlie, dick = AgentKey("Charlie", (1,)), AgentKey("Dick", (0,))
    true = Announcement(tuple(encode(o) for o in outcomes))
    after_charlie = encrypt(true, [charlie])
    announced = encrypt(after_charlie, [dick])
    both = decrypt(announced, [charlie, dick])
    dick_only = decrypt(announced, [dick])
    lines = [
        "Alice's Bell outcomes      " + " ".join(_SYMBOL[o] for o in outcomes),
        f"encoded                    {true}",
        f"after Charlie's key '1'    {after_charlie}",
        f"after Dick's key '0'       {announced}   (announced)",
        f"Bob, both keys revealed    {both}   corrections "
        + " ".join(c.value for c in corrections_from(both)),
        f"Bob, Charlie withholds     {dick_only}   corrections "
        + " ".join(c.value for c in corrections_from(dick_only)),
    ]
    expected = (
        true.rendered() == ["10", "01", "11"]
        and after_charlie.rendered() == ["11", "10", "00"]
        and announced == after_charlie
        and both == true
    )
    lines.append("worked example reproduced: " + ("yes" if expected else "NO"))
    return lines, expected


def cmd_demo(out) -> int:
    lines, ok = demo_lines()
    for line in lines:
        print(line, file=out)

    base = ScenarioConfig(
        m=3,
        agents=(AgentSpec("Charlie", "ekert91"), AgentSpec("Dick", "qsdc")),
        trials=20,
        master_seed=1,
    )
    print("", file=out)
    print("simulated, 20 trials x 3 Haar-random qubits:", file=out)
    for label, collab in (("Charlie and Dick collaborate", ("Charlie", "Dick")), ("Charlie withholds", ("Dick",))):
        agg = run_trials(dataclasses.replace(base, collaborators=collab)).aggregate
        print(
            f"  {label:<30} mean fidelity {agg['fidelity']['mean']:.4f}  "
            f"exact trials {agg['exact_trials']}/{agg['trials']}",
            file=out,
        )
    return EXIT_OK if ok else EXIT_INTERNAL


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args, out, err)
        if args.command == "demo":
            return cmd_demo(out)
        return EXIT_OK if selftest.run(out) else EXIT_INTERNAL
    except (AssertionError, QctError) as exc:
        print(f"qct: invariant violated: {type(exc).__name__}: {exc}", file=err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
