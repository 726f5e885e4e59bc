#!/usr/bin/env python3
"""List the ODDS benchmark datasets, convert .mat files to CSV, check shapes.

    odds_datasets.py list
    odds_datasets.py convert wine.mat wine.csv
    odds_datasets.py check wine.csv --name wine

ODDS files are not redistributed here; fetch them from
https://odds.cs.stonybrook.edu/ and convert them locally.
"""

import argparse
import csv
import sys

# name: (rows, columns, outliers, note)
DATASETS = {
    "arrhythmia": (452, 274, 66, ""),
    "breastw": (683, 9, 239, ""),
    "cardio": (1831, 21, 176, ""),
    "glass": (214, 9, 9, ""),
    "ionosphere": (351, 33, 126, ""),
    "mammography": (11183, 6, 260, ""),
    "mnist": (7603, 100, 700, ""),
    "optdigits": (5216, 64, 150, ""),
    "pendigits": (6870, 16, 156, ""),
    "pima": (768, 8, 268, ""),
    "satellite": (6435, 36, 2036, ""),
    "satimage-2": (5803, 36, 71, ""),
    "shuttle": (4909, 9, 351, "10% random sample of the 49097-row ODDS file"),
    "speech": (3686, 400, 61, ""),
    "vertebral": (240, 6, 30, ""),
    "vowels": (1456, 12, 50, ""),
    "wine": (129, 13, 10, ""),
}


def load_mat(path):
    try:
        from scipy.io import loadmat

        mat = loadmat(path)
        return mat["X"], mat["y"].ravel()
    except NotImplementedError:
        # MATLAB v7.3 files are HDF5.
        import h5py
        import numpy as np

        with h5py.File(path, "r") as f:
            return np.array(f["X"]).T, np.array(f["y"]).ravel()


def convert(args):
    x, y = load_mat(args.mat)
    if len(x) != len(y):
        sys.exit(f"{args.mat}: X has {len(x)} rows but y has {len(y)}")
    with open(args.csv, "w", newline="") as out:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(x.shape[1])] + ["label"])
        for row, label in zip(x, y):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])
    print(f"{args.csv}: {x.shape[0]} rows, {x.shape[1]} columns, {int(sum(y))} outliers")


def check(args):
    with open(args.csv, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        rows = [r for r in reader if r]
    if "label" not in header:
        sys.exit(f"{args.csv}: no 'label' column")
    label = header.index("label")
    got = (len(rows), len(header) - 1, sum(int(float(r[label])) for r in rows))
    want = DATASETS[args.name][:3]
    print(f"{args.name}: got {got[0]}x{got[1]}, {got[2]} outliers; expected {want[0]}x{want[1]}, {want[2]} outliers")
    if got != want:
        sys.exit(1)


def list_datasets(_args):
    print(f"{'name':<12} {'rows':>6} {'cols':>5} {'outliers':>8}  note")
    for name, (n, d, k, note) in DATASETS.items():
        print(f"{name:<12} {n:>6} {d:>5} {k:>8}  {note}")


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(required=True)
    sub.add_parser("list").set_defaults(func=list_datasets)
    p = sub.add_parser("convert")
    p.add_argument("mat")
    p.add_argument("csv")
    p.set_defaults(func=convert)
    p = sub.add_parser("check")
    p.add_argument("csv")
    p.add_argument("--name", required=True, choices=sorted(DATASETS))
    p.set_defaults(func=check)
    args = parser.parse_args()
    args.func(args)


if __name__ == "__main__":
    main()
