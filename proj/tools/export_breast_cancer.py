#!/usr/bin/env python3
"""Write scikit-learn's bundled Wisconsin diagnostic breast cancer data in the
cancer CSV schema (30 feature columns + diagnosis in {M, B})."""

import argparse
import csv

from sklearn.datasets import load_breast_cancer


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/breast_cancer.csv")
    args = parser.parse_args()

    bunch = load_breast_cancer()
    # sklearn encodes malignant as 0 and benign as 1.
    names = [n.replace(" ", "_") for n in bunch.feature_names]
    with open(args.out, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(names + ["diagnosis"])
        for row, target in zip(bunch.data, bunch.target):
            writer.writerow([repr(float(v)) for v in row] + ["M" if target == 0 else "B"])


if __name__ == "__main__":
    main()
