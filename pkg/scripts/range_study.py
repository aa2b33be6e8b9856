"""Which of two selectors wins depends on the target feature range.

Sweeps info_gain and chi2 once over the full k grid, then scores sliding
windows of width --width and prints the winner per window.
"""
import argparse

from fsdem.data import load_csv
from fsdem.evaluators import EvaluatorConfig, measure_curve
from fsdem.metrics import MetricRange, fsdem_score
from fsdem.selectors import SelectorConfig, rank
from fsdem.suites import bundled


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--data", default="breast_cancer", help="CSV path or a bundled table name")
    ap.add_argument("--measure", default="accuracy", choices=("accuracy", "clacc"))
    ap.add_argument("--width", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    data = bundled(args.data) if args.data in ("iris", "wine", "breast_cancer") else load_csv(args.data)
    cfg = EvaluatorConfig(args.measure, seed=args.seed)
    curves = {}
    for sid in ("info_gain", "chi2"):
        curves[sid] = measure_curve(data, rank(data, SelectorConfig(sid, seed=args.seed)), cfg, range(1, data.d + 1))

    print(f"{'range':>10}  {'info_gain':>9}  {'chi2':>9}  winner")
    for a in range(1, data.d - args.width + 1, args.width):
        r = MetricRange(a, a + args.width)
        scores = {sid: fsdem_score(c, r) for sid, c in curves.items()}
        winner = max(scores, key=scores.get) if scores["info_gain"] != scores["chi2"] else "tie"
        print(f"[{r.a:>3},{r.b:>3}]  {scores['info_gain']:9.4f}  {scores['chi2']:9.4f}  {winner}")


if __name__ == "__main__":
    main()
