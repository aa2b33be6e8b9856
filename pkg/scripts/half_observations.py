"""Absolute FSDEM / stability error when only every other k is observed."""
import argparse
import statistics
import tempfile
from dataclasses import replace

from fsdem.evaluators import EvaluatorConfig
from fsdem.harness import BenchmarkConfig, DatasetSource, run_benchmark
from fsdem.selectors import SelectorConfig
from fsdem.suites import desk_suite


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--measure", default="accuracy", choices=("accuracy", "clacc"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        tables = desk_suite(f"{tmp}/data", seed=args.seed)
        cfg = BenchmarkConfig(
            datasets=tuple(DatasetSource(n, str(p)) for n, p in tables),
            selectors=tuple(SelectorConfig(s) for s in ("random", "info_gain", "chi2", "forest")),
            evaluators=(EvaluatorConfig(args.measure),),
            master_seed=args.seed,
            workers=args.workers,
        )
        full, _ = run_benchmark(cfg, write=False)
        half, _ = run_benchmark(replace(cfg, stride=2), write=False)

    ref = {r.name: r for r in full}
    print(f"{'dataset':>18} {'selector':>10} {'|dFSDEM|':>9} {'|dStab|':>9}")
    df, ds = [], []
    for h in half:
        f = ref[h.name]
        df.append(abs(f.fsdem - h.fsdem))
        ds.append(abs(f.stability - h.stability))
        print(f"{h.dataset_id:>18} {h.selector_id:>10} {df[-1]:9.4f} {ds[-1]:9.4f}")
    print(f"median |dFSDEM|={statistics.median(df):.4f}  median |dStab|={statistics.median(ds):.4f}")


if __name__ == "__main__":
    main()
