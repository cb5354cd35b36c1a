#!/usr/bin/env python3
"""Playout throughput probe across the shipped corpus.

Reports playouts per second and the concept vector per game, which makes
it easy to judge whether a playout budget is generous or tight for a
given board size before pointing a training loop at the service.
"""

import argparse
import sys
import time

from ludilite import compile_game, default_corpus, extract_concepts, run_playouts


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-n", type=int, default=2000, help="playouts per game")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    for inst in default_corpus():
        spec = compile_game(inst.description)
        start = time.monotonic()
        stats = run_playouts(spec, args.n, args.seed, budget_secs=600)
        elapsed = time.monotonic() - start
        concepts = extract_concepts(stats, spec)
        rate = stats.completed_playouts / elapsed if elapsed else float("inf")
        print(
            f"{inst.id:<22} {spec.rows}x{spec.cols} {spec.num_players}p "
            f"{rate:>9.0f} playouts/s  "
            f"c=({concepts.decision_moves:.3f}, {concepts.coverage:.3f}, "
            f"{concepts.timeout_rate:.3f}, {concepts.balance}, {concepts.completion})"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
