#!/usr/bin/env python3
"""Self-evaluation experiment: score the shipped corpus against itself.

Predictions equal to the ground truths should achieve 100% compilability
and functionality, ROUGE-L 100, and near-zero concept distance; the
residual NCD measures pure playout sampling noise (10 candidate playouts
against 50 reference playouts). Useful as an end-to-end sanity run and as
a noise floor when reading real evaluation numbers.
"""

import argparse
import json
import sys
from pathlib import Path

from ludilite import (
    Prediction,
    RewardConfig,
    default_corpus,
    default_grammar,
    evaluate_corpus,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=3, help="seed groups (default 3)")
    parser.add_argument("--out", type=Path, help="write the JSON report here")
    args = parser.parse_args()

    corpus = default_corpus()
    grammar = default_grammar()
    cfg = RewardConfig()
    predictions = [
        Prediction(inst.id, str(seed), inst.description)
        for inst in corpus
        for seed in range(args.seeds)
    ]
    report = evaluate_corpus(corpus, predictions, grammar, cfg)
    print(f"{len(corpus)} games x {args.seeds} seed groups")
    print(f"compilability: {report.compilability.mean:.1f} ± {report.compilability.stderr:.1f}")
    print(f"functionality: {report.functionality.mean:.1f} ± {report.functionality.stderr:.1f}")
    print(f"rouge-l:       {report.rouge_l.mean:.1f} ± {report.rouge_l.stderr:.1f}")
    print(f"ncd:           {report.ncd.mean:.4f} ± {report.ncd.stderr:.4f}")
    for name, sub in sorted(report.categories.items()):
        print(f"  {name}: ncd {sub.ncd.mean:.4f}")
    if args.out:
        args.out.write_text(json.dumps(report.to_dict(), indent=2), encoding="utf-8")
        print(f"report written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
