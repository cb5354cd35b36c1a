"""Command-line front door: validate, compile, playout, concepts, reward,
eval, serve.

Exit codes: 0 success, 1 input/data error, 2 usage error (argparse),
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .dataset import DatasetError, load_instances, load_predictions
from .engine import CompileError, check_functionality, compile_game, random_playout
from .grammar import Grammar, GrammarError, default_grammar, grammar_reward
from .grammar import load_grammar_path, recognize
from .metrics import evaluate_corpus
from .rewards import GroundTruthError, RewardConfig, score_candidates, text_seed
from .concepts import extract_concepts, run_playouts

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class InputError(Exception):
    pass


def _read_text(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"no such file: {path}")
    return p.read_text(encoding="utf-8")


def _load_grammar(args) -> Grammar:
    if args.grammar:
        try:
            return load_grammar_path(args.grammar)
        except FileNotFoundError:
            raise InputError(f"no such grammar file: {args.grammar}")
        except GrammarError as e:
            raise InputError(f"bad grammar file: {e}")
    return default_grammar()


def _config_from_args(args) -> RewardConfig:
    overrides = {}
    for name in (
        "sigma",
        "lambda_c",
        "playouts_gt",
        "playouts_pred",
        "max_turns",
        "budget_secs",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    try:
        return RewardConfig().with_overrides(overrides)
    except ValueError as e:
        raise InputError(str(e))


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--sigma", type=float, help="Gaussian penalty width (default 0.3)")
    parser.add_argument("--lambda-c", dest="lambda_c", type=float,
                        help="concept reward scale (default 1.0)")
    parser.add_argument("--playouts-gt", dest="playouts_gt", type=int,
                        help="reference playouts (default 50)")
    parser.add_argument("--playouts-pred", dest="playouts_pred", type=int,
                        help="candidate playouts (default 10)")
    parser.add_argument("--max-turns", dest="max_turns", type=int,
                        help="playout turn cap (default 250)")
    parser.add_argument("--budget-secs", dest="budget_secs", type=float,
                        help="playout batch budget in seconds (default 180)")


def cmd_validate(args) -> int:
    grammar = _load_grammar(args)
    text = _read_text(args.file)
    result = recognize(grammar, text)
    reward = grammar_reward(grammar, text)
    print(f"grammar reward: {reward:.6g}")
    print(f"consumed {result.consumed_chars} of {result.total_chars} characters; "
          f"accepted: {result.accepted}")
    if result.failure_token is not None:
        print(f"first failure at offset {result.failure_token.offset}: "
              f"{result.failure_token.text!r}")
    return EXIT_OK


def cmd_compile(args) -> int:
    text = _read_text(args.file)
    try:
        spec = compile_game(text)
    except CompileError as e:
        print(f"compile error: {e}")
        return EXIT_INPUT
    print(f"compiled: {spec.name!r}, {spec.num_players} player(s), "
          f"{spec.rows}x{spec.cols} board, {len(spec.end_rules)} end rule(s)")
    base = args.seed if args.seed is not None else 0
    functional, reason = check_functionality(
        spec, [base + i for i in range(10)], args.max_turns or 250
    )
    if functional:
        print("functional: yes")
        return EXIT_OK
    print(f"functional: no ({reason})")
    return EXIT_OK


def cmd_playout(args) -> int:
    text = _read_text(args.file)
    try:
        spec = compile_game(text)
    except CompileError as e:
        print(f"compile error: {e}")
        return EXIT_INPUT
    base = args.seed if args.seed is not None else 0
    max_turns = args.max_turns or 250
    for i in range(args.n):
        trace = random_playout(spec, base + i, max_turns)
        if trace.outcome.kind == "win":
            outcome = f"win by player {trace.outcome.winner}"
        else:
            outcome = trace.outcome.kind
        print(f"seed {base + i}: {len(trace.moves)} moves, {outcome}, "
              f"touched {trace.final_touched}/{spec.num_sites}")
        if args.verbose:
            print(f"  moves: {list(trace.moves)}")
    return EXIT_OK


def cmd_concepts(args) -> int:
    text = _read_text(args.file)
    cfg = _config_from_args(args)
    try:
        spec = compile_game(text)
    except CompileError as e:
        print(f"compile error: {e}")
        return EXIT_INPUT
    base = args.seed if args.seed is not None else text_seed(text)
    probes = [base + i for i in range(cfg.probe_seeds)]
    functional, reason = check_functionality(spec, probes, cfg.max_turns)
    if not functional:
        print(f"not functional ({reason}); concepts undefined")
        return EXIT_INPUT
    n = args.n if args.n is not None else cfg.playouts_pred
    stats = run_playouts(spec, n, base, cfg.max_turns, cfg.budget_secs)
    concepts = extract_concepts(stats, spec, cfg.max_turns)
    print(json.dumps(concepts.to_dict(), indent=2))
    return EXIT_OK


def cmd_reward(args) -> int:
    grammar = _load_grammar(args)
    cfg = _config_from_args(args)
    reference = _read_text(args.reference)
    candidates = [_read_text(path) for path in args.candidates]
    try:
        result = score_candidates(reference, candidates, grammar, cfg, salt=args.seed)
    except GroundTruthError as e:
        print(f"reference error: {e}")
        return EXIT_INPUT
    if args.json:
        print(json.dumps(
            {
                "breakdowns": [b.to_dict() for b in result.breakdowns],
                "advantages": list(result.advantages),
                "reference_concepts": result.reference_concepts.to_dict(),
            },
            indent=2,
        ))
        return EXIT_OK
    print(f"{'candidate':<28} {'r_g':>8} {'r_c':>8} {'r':>8}  flags")
    for path, b, adv in zip(args.candidates, result.breakdowns, result.advantages):
        flags = []
        flags.append("compilable" if b.compilable else "not-compilable")
        flags.append("functional" if b.functional else "not-functional")
        if b.failure_reason:
            flags.append(b.failure_reason)
        name = Path(path).name
        print(f"{name:<28} {b.r_g:>8.4f} {b.r_c:>8.4f} {b.r:>8.4f}  {', '.join(flags)}")
    print("advantages:", " ".join(f"{a:+.4f}" for a in result.advantages))
    return EXIT_OK


def cmd_eval(args) -> int:
    grammar = _load_grammar(args)
    cfg = _config_from_args(args)
    try:
        instances = load_instances(args.instances)
        predictions = load_predictions(args.predictions)
    except (DatasetError, FileNotFoundError) as e:
        print(f"input error: {e}")
        return EXIT_INPUT
    try:
        report = evaluate_corpus(instances, predictions, grammar, cfg, salt=args.seed)
    except (KeyError, ValueError, GroundTruthError) as e:
        print(f"input error: {e.args[0] if e.args else e}")
        return EXIT_INPUT
    header = f"{'':<18}{'Compilability':>15} {'Functionality':>15} {'ROUGE-L':>12} {'NCD':>12}"
    print(header)

    def line(name: str, rep) -> str:
        return (f"{name:<18}"
                f"{rep.compilability.mean:>9.1f}±{rep.compilability.stderr:<5.1f}"
                f"{rep.functionality.mean:>10.1f}±{rep.functionality.stderr:<5.1f}"
                f"{rep.rouge_l.mean:>7.1f}±{rep.rouge_l.stderr:<4.1f}"
                f"{rep.ncd.mean:>8.2f}±{rep.ncd.stderr:<4.2f}")

    print(line("all", report))
    for name, sub in sorted(report.categories.items()):
        print(line(name, sub))
    if args.out:
        Path(args.out).write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        print(f"report written to {args.out}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    cfg = _config_from_args(args)
    serve(host=args.host, port=args.port, grammar_path=args.grammar, config=cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ludilite",
        description="Grammar and gameplay rewards for game description generation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="grammar reward and valid-prefix diagnostics")
    p.add_argument("file", help="game description file")
    p.add_argument("--grammar", help="grammar file (defaults to the shipped one)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile a description and probe functionality")
    p.add_argument("file")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-turns", dest="max_turns", type=int)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("playout", help="run seeded random playouts")
    p.add_argument("file")
    p.add_argument("-n", type=int, default=5, help="number of playouts (default 5)")
    p.add_argument("--seed", type=int)
    p.add_argument("--max-turns", dest="max_turns", type=int)
    p.add_argument("-v", "--verbose", action="store_true", help="print move lists")
    p.set_defaults(func=cmd_playout)

    p = sub.add_parser("concepts", help="concept vector for a description")
    p.add_argument("file")
    p.add_argument("-n", type=int, help="playouts (default: playouts-pred)")
    p.add_argument("--seed", type=int)
    _add_config_flags(p)
    p.set_defaults(func=cmd_concepts)

    p = sub.add_parser("reward", help="score candidates against a reference")
    p.add_argument("reference", help="reference description file")
    p.add_argument("candidates", nargs="+", help="candidate description files")
    p.add_argument("--grammar")
    p.add_argument("--seed", type=int)
    p.add_argument("--json", action="store_true")
    _add_config_flags(p)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("eval", help="evaluate a prediction file against instances")
    p.add_argument("--instances", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--out", help="write the structured report here")
    p.add_argument("--grammar")
    p.add_argument("--seed", type=int)
    _add_config_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the HTTP reward service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--grammar")
    _add_config_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
