"""Rewrite a monthly CSV so observed_rate has a chosen sample correlation with
the model rates in a compare run's rates.csv.

    python tools/make_correlated_fixture.py rates.csv 0.575 out.csv

The residual direction comes from the input's own observed_rate column, so
the output keeps its level and spread; only the correlation is pinned.
"""

import argparse
import csv

import numpy as np


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("rates_csv")
    ap.add_argument("target_r", type=float)
    ap.add_argument("out_csv")
    args = ap.parse_args()

    with open(args.rates_csv, newline="") as f:
        rows = [r for r in csv.DictReader(f) if r["status"] == "ok"]
    model = np.array([float(r["model_rate"]) for r in rows])
    observed = np.array([float(r["observed_rate"]) for r in rows])

    zm = (model - model.mean()) / model.std()
    resid = observed - observed.mean()
    resid -= (resid @ zm) / (zm @ zm) * zm
    zr = resid / resid.std()
    rho = args.target_r
    pinned = observed.mean() + observed.std() * (rho * zm + np.sqrt(1.0 - rho * rho) * zr)

    with open(args.out_csv, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["month", "risk_free", "volatility", "observed_rate"])
        for r, obs in zip(rows, pinned):
            w.writerow([r["month"], r["risk_free"], r["volatility"], f"{obs:.10g}"])
    print(f"wrote {args.out_csv}: r = {np.corrcoef(model, pinned)[0, 1]:.10f}")


if __name__ == "__main__":
    main()
