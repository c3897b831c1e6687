#!/usr/bin/env python3
"""Regenerates the KEEL-format fixtures in this directory.

Each file mirrors the shape of a well-known imbalanced benchmark (row count,
feature count, class balance, and the id it is named after) but every value
is drawn from seeded Gaussian mixtures here; nothing is copied from the real
datasets. The class structure lives in the first three features (two majority
clusters, two minority clusters placed close enough to overlap); remaining
features are low-variance noise. Re-running the script reproduces the
committed files byte for byte.
"""

import pathlib

import numpy as np

# name, seed, n_majority, n_minority, features, minority radius, minority spread
SPECS = [
    ("ecoli-0_vs_1", 101, 143, 77, 7, 2.3, 0.60),
    ("ecoli3", 102, 301, 35, 7, 1.9, 0.55),
    ("yeast-2_vs_4", 103, 463, 51, 8, 1.9, 0.50),
    ("vowel0", 104, 898, 90, 13, 2.0, 0.50),
    ("glass2", 105, 197, 17, 9, 1.7, 0.60),
    ("ecoli4", 106, 316, 20, 7, 1.9, 0.50),
    ("glass5", 107, 205, 9, 9, 1.9, 0.60),
    ("yeast4", 108, 1433, 51, 8, 1.8, 0.50),
    ("abalone19", 109, 4142, 32, 8, 1.4, 0.50),
]

SIGNAL = 3  # features carrying the cluster structure


def make(seed, n_maj, n_min, dim, radius, spread):
    rng = np.random.default_rng(seed)

    def cluster(n, center, scale):
        x = rng.normal(0.0, 0.3, size=(n, dim))
        x[:, :SIGNAL] = center + rng.normal(0.0, scale, size=(n, SIGNAL))
        return x

    def direction():
        v = rng.normal(size=SIGNAL)
        return v / np.linalg.norm(v)

    maj_b = int(0.35 * n_maj)
    majority = np.vstack(
        [
            cluster(n_maj - maj_b, np.zeros(SIGNAL), 1.0),
            cluster(maj_b, 2.0 * direction(), 0.85),
        ]
    )
    min_b = int(0.4 * n_min)
    minority = np.vstack(
        [
            cluster(n_min - min_b, radius * direction(), spread),
            cluster(min_b, 1.15 * radius * direction(), spread),
        ]
    )

    x = np.vstack([majority, minority])
    y = np.array([0] * n_maj + [1] * n_min)
    order = rng.permutation(len(y))
    return x[order], y[order]


def write_keel(path, name, x, y):
    dim = x.shape[1]
    lo, hi = x.min(axis=0), x.max(axis=0)
    lines = [f"@relation {name}"]
    for j in range(dim):
        lines.append(f"@attribute a{j + 1} real [{lo[j]:.6f}, {hi[j]:.6f}]")
    lines.append("@attribute Class {negative, positive}")
    lines.append("@inputs " + ", ".join(f"a{j + 1}" for j in range(dim)))
    lines.append("@outputs Class")
    lines.append("@data")
    for row, label in zip(x, y):
        values = ", ".join(f"{v:.6f}" for v in row)
        lines.append(f"{values}, {'positive' if label else 'negative'}")
    path.write_text("\n".join(lines) + "\n")


def main():
    outdir = pathlib.Path(__file__).resolve().parent
    for name, seed, n_maj, n_min, dim, radius, spread in SPECS:
        x, y = make(seed, n_maj, n_min, dim, radius, spread)
        write_keel(outdir / f"{name}.dat", name, x, y)
        print(f"{name}.dat: {len(y)} rows, {dim} features, "
              f"{n_maj}/{n_min} (IR {n_maj / n_min:.2f})")


if __name__ == "__main__":
    main()
