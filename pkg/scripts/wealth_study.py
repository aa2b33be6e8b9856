"""Two rankings that pick different but equally informative features.

Set-overlap stability calls them unstable; the FSDEM stability of the
accuracy curves does not.
"""
import argparse

import numpy as np

from fsdem.data import generate_wealth_dummy
from fsdem.evaluators import EvaluatorConfig, measure_curve
from fsdem.metrics import MetricRange, fsdem_score, kuncheva_stability, nogueira_stability, stability_score

SCENARIOS = (
    ("salary_eur", "residence_size", "distance_km", "age", "salary_usd", "distance_miles"),
    ("salary_usd", "residence_size", "distance_miles", "age", "salary_eur", "distance_km"),
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--k", type=int, default=3)
    args = ap.parse_args()

    data = generate_wealth_dummy(args.n, args.seed)
    names = list(data.feature_names)
    orders = [[names.index(f) for f in s] for s in SCENARIOS]

    z = np.zeros((2, data.d), dtype=int)
    for i, o in enumerate(orders):
        z[i, o[: args.k]] = 1
    print(f"Phi-hat (k={args.k}):     {nogueira_stability(z):.4f}")
    print(f"Kuncheva I_S (k={args.k}): {kuncheva_stability(orders, args.k, data.d):.4f}")

    r = MetricRange(1, data.d)
    stabs = []
    for i, o in enumerate(orders, 1):
        curve = measure_curve(data, o, EvaluatorConfig("accuracy", seed=args.seed), r.grid())
        s = stability_score(curve, r)
        stabs.append(s)
        print(f"scenario {i}: FSDEM={fsdem_score(curve, r):.4f} stability={s:.4f} curve={[round(v, 3) for v in curve.values]}")
    print(f"mean FSDEM stability: {np.mean(stabs):.4f}")


if __name__ == "__main__":
    main()
