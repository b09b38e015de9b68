"""Command-line front end.

Every subcommand prints one report, either as JSON::

    {"command": ..., "status": "ok" | "violation" | "error", "result": ...}

or as plain text.  Exit codes: 0 ok, 1 violation (a check answered
"no"), 2 unparseable input, 3 failed precondition, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path
from typing import Callable

from . import __version__
from .congruence import (
    coarsest_state_congruence,
    compose_congruences,
    is_congruence,
    is_friendly,
    kernel_congruence,
)
from .core import format_fraction, validate_automaton
from .errors import (
    InternalConsistencyFailure,
    MalformedInput,
    NotACongruence,
    NotAMorphism,
    PreconditionViolated,
    StageDecompositionFailed,
)
from .factor import (
    IO_FIRST,
    STATES_FIRST,
    FactorResult,
    em_factorization,
    factor_automaton,
    refactor_isomorphism,
    stepwise_reduction,
)
from .randomization import is_random_friend
from .serialize import (
    automaton_from_obj,
    automaton_to_obj,
    distribution_to_obj,
    dumps,
    format_word,
    friendship_to_obj,
    label_key,
    load_json,
    morphism_from_obj,
    morphism_to_obj,
    parse_automaton,
    parse_distribution,
    parse_partition,
    parse_relation,
    parse_triple,
    parse_word,
    parse_word_set,
    partition_to_obj,
    spaces_of,
    stream_from_obj,
    tree_from_obj,
    triple_from_obj,
    triple_to_obj,
    write_atomic,
)
from .streams import check_power_friendship, cylinder_probability, decorate_tree, extend_word, leaf_output, word_behavior

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_PRECONDITION, EXIT_INTERNAL = 0, 1, 2, 3, 4


class Outcome:
    def __init__(self, result, ok: bool = True):
        self.result = result
        self.ok = ok


def _json_arg(text: str, where: str):
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    stripped = text.lstrip()
    if stripped.startswith(("{", "[")):
        try:
            return json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{where}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return load_json(text)


def _friendship(report) -> Outcome:
    return Outcome(friendship_to_obj(report), report.friendly)


def _factor_obj(fr: FactorResult) -> dict:
    return automaton_to_obj(fr.factor, fr.classes())


# -- subcommands ----------------------------------------------------------------


def cmd_validate(args) -> Outcome:
    a = automaton_from_obj(load_json(args.automaton), strict=False, where=args.automaton)
    problems = validate_automaton(a)
    return Outcome(
        {
            "valid": not problems,
            "fully_probabilistic": not problems and a.fully_probabilistic,
            "violations": [str(v) for v in problems],
        },
        not problems,
    )


def _relation_partition(path, F, H, space):
    return parse_partition(path, {"domain": F, "codomain": H}, space)


def cmd_check_friendly(args) -> Outcome:
    rows, F, H = parse_relation(args.relation)
    xi = _relation_partition(args.xi, F, H, "domain")
    theta = _relation_partition(args.theta, F, H, "codomain")
    return _friendship(is_friendly(rows, xi, theta))


def cmd_random_friend(args) -> Outcome:
    rows, F, H = parse_relation(args.relation)
    xi = _relation_partition(args.xi, F, H, "domain")
    zeta = _relation_partition(args.zeta, F, H, "codomain")
    report = is_random_friend(rows, xi, zeta)
    witness = None
    if report.witness is not None:
        witness = [distribution_to_obj(d) for d in report.witness]
    return Outcome({"friendly": report.friendly, "witness": witness}, report.friendly)


def cmd_check_congruence(args) -> Outcome:
    a = parse_automaton(args.automaton)
    return _friendship(is_congruence(a, parse_triple(args.triple, a)))


def cmd_coarsest(args) -> Outcome:
    a = parse_automaton(args.automaton)
    sp = spaces_of(a)
    alpha = parse_partition(args.alpha, sp, "inputs") if args.alpha else None
    beta = parse_partition(args.beta, sp, "outputs") if args.beta else None
    seed = parse_partition(args.seed_partition, sp, "states") if args.seed_partition else None
    gamma = coarsest_state_congruence(a, alpha, beta, seed)
    return Outcome({"gamma": partition_to_obj(gamma)})


def cmd_factor(args) -> Outcome:
    a = parse_automaton(args.automaton)
    return Outcome(_factor_obj(factor_automaton(a, parse_triple(args.triple, a))))


def cmd_stepwise(args) -> Outcome:
    a = parse_automaton(args.automaton)
    fr = stepwise_reduction(a, parse_triple(args.triple, a), args.order)
    obj = _factor_obj(fr)
    obj["stages"] = [triple_to_obj(s) for s in fr.stages]
    return Outcome({"order": args.order, "factor": obj})


def cmd_refactor_check(args) -> Outcome:
    a = parse_automaton(args.automaton)
    c = parse_triple(args.triple, a)
    first = factor_automaton(a, c)
    c_prime = triple_from_obj(load_json(args.second), first.factor, args.second)
    forward, backward = refactor_isomorphism(a, c, c_prime)
    return Outcome(
        {
            "composite": triple_to_obj(compose_congruences(a, c, c_prime)),
            "one_step": automaton_to_obj(forward.source),
            "two_step": automaton_to_obj(forward.target),
            "forward": morphism_to_obj(forward),
            "backward": morphism_to_obj(backward),
        }
    )


def _morphism(args):
    src, tgt = parse_automaton(args.source), parse_automaton(args.target)
    return morphism_from_obj(load_json(args.maps), src, tgt, args.maps)


def cmd_kernel(args) -> Outcome:
    return Outcome(triple_to_obj(kernel_congruence(_morphism(args))))


def cmd_em_factor(args) -> Outcome:
    canonical, mono = em_factorization(_morphism(args))
    fr = FactorResult(canonical.target, canonical)
    return Outcome({"kernel_factor": _factor_obj(fr), "canonical": morphism_to_obj(canonical), "mono": morphism_to_obj(mono)})


def cmd_run_word(args) -> Outcome:
    a = parse_automaton(args.automaton)
    if args.state not in a.states:
        raise MalformedInput(f"--state: unknown-label {args.state!r}")
    wd = extend_word(a, parse_word(args.word, a.inputs, "--word"), args.state)
    support = [{"state": z, "word": format_word(w), "p": format_fraction(p)} for (z, w), p in wd.dist.items()]
    return Outcome({"length": wd.length, "mass": format_fraction(wd.mass), "support": support})


def _mu(args, a):
    return parse_distribution(args.mu, a.states)


def cmd_blackbox(args) -> Outcome:
    a = parse_automaton(args.automaton)
    d = word_behavior(a, _mu(args, a), parse_word(args.word, a.inputs, "--word"))
    return Outcome({"distribution": distribution_to_obj(d), "mass": format_fraction(d.mass)})


def cmd_cylinder(args) -> Outcome:
    a = parse_automaton(args.automaton)
    tau = stream_from_obj(_json_arg(args.stream, "--stream"), a.inputs, "--stream")
    words = parse_word_set(_json_arg(args.set, "--set"), a.outputs, args.depth, "--set")
    return Outcome({"probability": format_fraction(cylinder_probability(a, _mu(args, a), tau, args.depth, words))})


def cmd_tree(args) -> Outcome:
    a = parse_automaton(args.automaton)
    mu = _mu(args, a)
    tree = tree_from_obj(_json_arg(args.tree, "--tree"), a.inputs, "--tree")
    v = parse_word(args.word, a.inputs, "--word")
    result = {"distribution": distribution_to_obj(decorate_tree(a, mu, tree, v))}
    if args.leaf_set is not None:
        last = parse_word(args.leaf_set, a.outputs, "--leaf-set")
        result["leaf_probability"] = format_fraction(leaf_output(a, mu, tree, v, last))
    return Outcome(result)


def cmd_power_friendship(args) -> Outcome:
    a = parse_automaton(args.automaton)
    c = parse_triple(args.triple, a)
    mu = _mu(args, a) if args.mu else None
    return _friendship(check_power_friendship(a, c, args.n, mu))


def cmd_selftest(args) -> Outcome:
    from .generate import planted_automaton, stacked_instance, morphism_instance

    rng = random.Random(args.seed)
    checks = {name: 0 for name in ("congruence", "coarsest", "factor", "refactor", "stepwise", "kernel", "power")}
    for _ in range(args.rounds):
        a, fine, coarse = planted_automaton(rng, 3, 3, 4)
        for c in (fine, coarse):
            if not is_congruence(a, c):
                raise InternalConsistencyFailure("planted triple is not a congruence")
        checks["congruence"] += 1
        gamma = coarsest_state_congruence(a, fine.alpha, fine.beta)
        if not fine.gamma.refines(gamma):
            raise InternalConsistencyFailure("coarsest congruence is finer than a planted one")
        checks["coarsest"] += 1
        factor_automaton(a, coarse)
        checks["factor"] += 1
        base, c, c_prime = stacked_instance(rng, 3, 3, 4)
        refactor_isomorphism(base, c, c_prime)
        checks["refactor"] += 1
        for order in (STATES_FIRST, IO_FIRST):
            stepwise_reduction(a, fine, order)
        checks["stepwise"] += 1
        kernel_congruence(morphism_instance(rng, 3, 3, 4))
        checks["kernel"] += 1
        if not check_power_friendship(a, fine, 2):
            raise InternalConsistencyFailure("power friendship failed for a congruence")
        checks["power"] += 1
    return Outcome({"seed": args.seed, "rounds": args.rounds, "passed": checks})


# -- rendering ----------------------------------------------------------------------


def _table(records: list[dict], indent: int) -> list[str]:
    keys = list(records[0])
    cells = [keys] + [[_inline(r[k]) for k in keys] for r in records]
    widths = [max(len(row[i]) for row in cells) for i in range(len(keys))]
    pad = "  " * indent
    return [pad + "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip() for row in cells]


def _is_table(v) -> bool:
    return (
        isinstance(v, list)
        and bool(v)
        and all(isinstance(r, dict) and list(r) == list(v[0]) for r in v)
        and all(not isinstance(e, (dict, list)) for r in v for e in r.values())
    )


def _flatten_law(law: list) -> list[dict]:
    return [{"input": r["input"], "state": r["state"], **m} for r in law for m in r["moves"]]


def _text_lines(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if k == "law" and isinstance(v, list):
                v = _flatten_law(v)
            if _is_table(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_table(v, indent + 1))
            elif isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.extend(_text_lines(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(value)}")
    return lines


def _flat(v) -> bool:
    if isinstance(v, dict):
        return all(not isinstance(e, (dict, list)) for e in v.values())
    return all(not isinstance(e, dict) and (not isinstance(e, list) or _flat(e)) for e in v)


def _inline(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_inline(e)}" for k, e in v.items()) + "}" if v else "{}"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(e) for e in v) + "]"
    return str(v)


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    lines = [f"{report['command']}: {report['status']}"]
    if "error" in report:
        err = report["error"]
        lines.append(f"{err['code']}: {err['message']}")
        if err.get("witness") is not None:
            lines.append("witness:")
            lines.extend(_text_lines(err["witness"], 1))
    else:
        lines.extend(_text_lines(report["result"]))
    return "\n".join(lines) + "\n"


# -- entry point --------------------------------------------------------------------

COMMANDS: dict[str, Callable] = {}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a value given before the subcommand from being reset by the subparser
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS, help="report format (default json)")
    common.add_argument("--output", default=argparse.SUPPRESS, help="write the report to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="stocon", description="Congruences of finite stochastic automata.", parents=[common])
    parser.add_argument("--version", action="version", version=f"stocon {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        COMMANDS[name] = func
        return p

    p = add("validate", cmd_validate, "check an automaton file against every invariant")
    p.add_argument("automaton")

    for name, func, third in (
        ("check-friendly", cmd_check_friendly, "theta"),
        ("random-friend", cmd_random_friend, "zeta"),
    ):
        p = add(name, func, f"decide whether xi is {'friendly' if third == 'theta' else 'a random friend'} to {third}")
        p.add_argument("relation", help='relation file {"domain", "codomain", "rows"}')
        p.add_argument("xi", help="partition of the domain")
        p.add_argument(third, help="partition of the codomain")

    p = add("check-congruence", cmd_check_congruence, "decide whether a triple is a congruence")
    p.add_argument("automaton")
    p.add_argument("triple")

    p = add("coarsest", cmd_coarsest, "coarsest state partition completing (alpha, beta) to a congruence")
    p.add_argument("automaton")
    p.add_argument("--alpha", help="input partition (default discrete)")
    p.add_argument("--beta", help="output partition (default discrete)")
    p.add_argument("--seed-partition", help="state partition to refine (default one block)")

    p = add("factor", cmd_factor, "factor automaton of a congruence")
    p.add_argument("automaton")
    p.add_argument("triple")

    p = add("stepwise", cmd_stepwise, "factor in two stages")
    p.add_argument("automaton")
    p.add_argument("triple")
    p.add_argument("--order", choices=(STATES_FIRST, IO_FIRST), default=STATES_FIRST)

    p = add("refactor-check", cmd_refactor_check, "compare factoring once by c*c' with factoring by c then c'")
    p.add_argument("automaton")
    p.add_argument("triple", help="congruence on the automaton")
    p.add_argument("second", help="congruence on the factor automaton (class labels)")

    for name, func, text in (
        ("kernel", cmd_kernel, "kernel congruence of a morphism"),
        ("em-factor", cmd_em_factor, "split a morphism into a projection and an injective part"),
    ):
        p = add(name, func, text)
        p.add_argument("source")
        p.add_argument("target")
        p.add_argument("maps", help='morphism file {"f", "g", "h"}')

    p = add("run-word", cmd_run_word, "joint law of final state and output word")
    p.add_argument("automaton")
    p.add_argument("--state", required=True)
    p.add_argument("--word", required=True)

    p = add("blackbox", cmd_blackbox, "output word distribution with hidden states")
    p.add_argument("automaton")
    p.add_argument("--mu", required=True, help="initial distribution file")
    p.add_argument("--word", required=True)

    p = add("cylinder", cmd_cylinder, "stream-semantics probability of a cylinder")
    p.add_argument("automaton")
    p.add_argument("--mu", required=True)
    p.add_argument("--stream", required=True, help="stream file or inline JSON")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--set", required=True, help="output words of length depth (JSON array or file)")

    p = add("tree", cmd_tree, "output distribution at a node of a prefix-free tree")
    p.add_argument("automaton")
    p.add_argument("--mu", required=True)
    p.add_argument("--tree", required=True, help="tree file or inline JSON")
    p.add_argument("--word", required=True)
    p.add_argument("--leaf-set", help="output labels allowed as the last letter")

    p = add("power-friendship", cmd_power_friendship, "check a congruence on words of length n")
    p.add_argument("automaton")
    p.add_argument("triple")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", help="initial distribution for the black-box check (default uniform)")

    p = add("selftest", cmd_selftest, "run the library checks on seeded random instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=5)
    return parser


def _error(command: str, code: str, message: str, witness=None) -> dict:
    err = {"code": code, "message": message}
    if witness is not None:
        err["witness"] = witness
    return {"command": command, "status": "error", "error": err}


def run(argv: list[str] | None = None) -> tuple[dict, int, str, str | None]:
    """Parse arguments and execute; returns ``(report, exit code, format, output path)``."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code == 0:
            raise
        return _error("stocon", "usage", "invalid arguments"), EXIT_PARSE, "text", None
    fmt = os.environ.get("STOCON_OUTPUT") or getattr(args, "format", None) or "json"
    if fmt not in ("json", "text"):
        return _error(args.command, "usage", f"STOCON_OUTPUT must be json or text, not {fmt!r}"), EXIT_PARSE, "json", None
    report, code = _execute(args)
    return report, code, fmt, getattr(args, "output", None)


def _execute(args) -> tuple[dict, int]:
    if args.command == "power-friendship" and args.n < 1:
        return _error(args.command, "usage", "--n must be at least 1"), EXIT_PARSE
    try:
        outcome = args.func(args)
    except MalformedInput as exc:
        return _error(args.command, exc.code, str(exc)), EXIT_PARSE
    except NotACongruence as exc:
        witness = friendship_to_obj(exc.report)["witness"] if exc.report is not None else None
        return _error(args.command, exc.code, str(exc).split(":")[0], witness), EXIT_PRECONDITION
    except StageDecompositionFailed as exc:
        witness = {"stage": exc.stage}
        if exc.report is not None:
            witness["friendship"] = friendship_to_obj(exc.report)["witness"]
        return _error(args.command, exc.code, str(exc), witness), EXIT_PRECONDITION
    except NotAMorphism as exc:
        witness = None
        if exc.counterexample is not None:
            x, z, cell, expected, image = exc.counterexample
            witness = {
                "input": x,
                "state": z,
                "cell": [label_key(e) for e in cell],
                "target_mass": format_fraction(expected),
                "image_mass": format_fraction(image),
            }
        return _error(args.command, exc.code, "diagram does not commute", witness), EXIT_PRECONDITION
    except PreconditionViolated as exc:
        return _error(args.command, exc.code, str(exc)), EXIT_PRECONDITION
    except InternalConsistencyFailure as exc:
        return _error(args.command, exc.code, str(exc)), EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        return _error(args.command, "internal-error", f"{type(exc).__name__}: {exc}"), EXIT_INTERNAL
    report = {"command": args.command, "status": "ok" if outcome.ok else "violation", "result": outcome.result}
    return report, EXIT_OK if outcome.ok else EXIT_VIOLATION


def main(argv: list[str] | None = None) -> int:
    report, code, fmt, output = run(argv)
    text = render(report, fmt)
    # errors go to stderr and never touch --output
    if code in (EXIT_OK, EXIT_VIOLATION):
        if output:
            write_atomic(Path(output), text)
        else:
            sys.stdout.write(text)
    else:
        sys.stderr.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
