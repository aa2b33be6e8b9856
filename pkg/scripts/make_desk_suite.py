"""Write the desk-scale CSV suite and a matching benchmark config.

    python scripts/make_desk_suite.py --out runs/desk
    fsdem benchmark --config runs/desk/benchmark.json
"""
import argparse
import json
from pathlib import Path

from fsdem.suites import desk_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="runs/desk")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeats", type=int, default=10)
    args = ap.parse_args()

    out = Path(args.out)
    tables = desk_suite(out / "data", seed=args.seed)
    config = {
        "datasets": [{"id": name, "path": str(path)} for name, path in tables] + [{"id": "wealth", "path": "wealth"}],
        "selectors": [{"selector_id": s} for s in ("random", "info_gain", "chi2", "forest")],
        "evaluators": [{"measure_id": "accuracy"}, {"measure_id": "clacc"}],
        "stride": 1,
        "repeats": args.repeats,
        "noise": {"level": 0.1, "seed": 0},
        "output_dir": str(out / "results"),
        "master_seed": args.seed,
    }
    path = out / "benchmark.json"
    path.write_text(json.dumps(config, indent=2) + "\n")
    print(path)


if __name__ == "__main__":
    main()
