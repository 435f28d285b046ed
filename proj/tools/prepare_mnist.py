#!/usr/bin/env python3
"""Write MNIST as CVDS-real directories (mnist_train/, mnist_test/).

Sources, in order of preference:
  --idx DIR   the four official IDX files (train-images-idx3-ubyte[.gz], ...)
  --csv FILE  a CSV (optionally gzipped) with 784 pixel columns then a label
  default     the 5000-sample MNIST subset bundled with mlxtend, if installed

Pixels are scaled to [0, 1]. With the CSV sources the rows are interleaved
by class and split into --train (default 2000) and the remaining test rows.
"""

import argparse
import gzip
import json
import os
import struct
import sys

import numpy as np


def open_maybe_gz(path):
    return gzip.open(path, "rb") if path.endswith(".gz") else open(path, "rb")


def read_idx(path):
    with open_maybe_gz(path) as f:
        data = f.read()
    magic, = struct.unpack(">I", data[:4])
    ndim = magic & 0xFF
    dims = struct.unpack(">" + "I" * ndim, data[4:4 + 4 * ndim])
    return np.frombuffer(data, dtype=np.uint8, offset=4 + 4 * ndim).reshape(dims)


def find_idx(directory, stem):
    for name in (stem, stem + ".gz"):
        path = os.path.join(directory, name)
        if os.path.exists(path):
            return path
    sys.exit(f"missing {stem}[.gz] in {directory}")


def load_idx(directory):
    xtr = read_idx(find_idx(directory, "train-images-idx3-ubyte")).reshape(-1, 784)
    ytr = read_idx(find_idx(directory, "train-labels-idx1-ubyte"))
    xte = read_idx(find_idx(directory, "t10k-images-idx3-ubyte")).reshape(-1, 784)
    yte = read_idx(find_idx(directory, "t10k-labels-idx1-ubyte"))
    return (xtr, ytr), (xte, yte), "MNIST IDX files from " + os.path.abspath(directory)


def default_csv():
    try:
        import mlxtend
    except ImportError:
        sys.exit("no MNIST source: pass --idx or --csv, or `pip install mlxtend`")
    return os.path.join(os.path.dirname(mlxtend.__file__), "data", "data", "mnist_5k.csv.gz")


def interleave_by_class(labels):
    """Row order cycling through the classes: one sample of 0, of 1, ..."""
    buckets = [list(np.flatnonzero(labels == c)) for c in range(10)]
    order = []
    while any(buckets):
        for b in buckets:
            if b:
                order.append(b.pop(0))
    return np.array(order)


def load_csv(path, n_train):
    with open_maybe_gz(path) as f:
        table = np.loadtxt(f, delimiter=",", dtype=np.float64)
    x, y = table[:, :784], table[:, 784].astype(np.uint32)
    order = interleave_by_class(y)
    x, y = x[order], y[order]
    if not 0 < n_train < len(y):
        sys.exit(f"--train must be between 1 and {len(y) - 1}")
    source = f"MNIST CSV {os.path.basename(path)}"
    return (x[:n_train], y[:n_train]), (x[n_train:], y[n_train:]), source


def write_cvds(directory, x, y, provenance):
    os.makedirs(directory, exist_ok=True)
    x = np.ascontiguousarray(x, dtype="<f8") / 255.0
    meta = {
        "M": int(x.shape[0]),
        "dN": int(x.shape[1]),
        "k": 10,
        "task": "classification",
        "dtype": "f64",
        "endianness": "little",
        "form": "real",
        "provenance": provenance,
    }
    with open(os.path.join(directory, "meta.json"), "w") as f:
        json.dump(meta, f, indent=2)
        f.write("\n")
    x.astype("<f8").tofile(os.path.join(directory, "features_re.bin"))
    np.asarray(y, dtype="<u4").tofile(os.path.join(directory, "labels.bin"))
    stale = os.path.join(directory, "features_im.bin")
    if os.path.exists(stale):
        os.remove(stale)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="directory to receive mnist_train/ and mnist_test/")
    parser.add_argument("--idx", help="directory with the official IDX files")
    parser.add_argument("--csv", help="CSV or CSV.gz with 784 pixels then the label per row")
    parser.add_argument("--train", type=int, default=2000, help="training rows taken from a CSV source")
    args = parser.parse_args()

    if args.idx:
        train, test, source = load_idx(args.idx)
    else:
        train, test, source = load_csv(args.csv or default_csv(), args.train)

    write_cvds(os.path.join(args.out, "mnist_train"), *train, source + " (train split)")
    write_cvds(os.path.join(args.out, "mnist_test"), *test, source + " (test split)")
    print(f"wrote {len(train[1])} train / {len(test[1])} test rows to {args.out}")


if __name__ == "__main__":
    main()
