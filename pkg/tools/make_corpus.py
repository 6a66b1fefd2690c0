"""Regenerate the instance files in corpus/ (deterministic)."""

import argparse
import json
from pathlib import Path

import numpy as np


def unit_diagonal(rng, n):
    A = rng.uniform(-1, 1, (n, n))
    np.fill_diagonal(A, 1.0)
    return A


def matrix(A, m, w):
    return {"kind": "matrix", "A": np.asarray(A, float).tolist(),
            "m": np.asarray(m, float).tolist(), "w": np.asarray(w, float).tolist()}


def geometry(p, dim, planes, mapping=None):
    out = {"kind": "geometry", "body": {"type": "lp", "p": p, "dim": dim}}
    if mapping is not None:
        out["map"] = np.asarray(mapping, float).tolist()
    out["hyperplanes"] = [{"normal": list(map(float, a)), "offset": float(b)} for a, b in planes]
    return out


def build():
    rng = np.random.default_rng(2024)
    files = {
        "identity2": matrix(np.eye(2), [0, 0], [0.5, 0.5]),
        "nonsymmetric2": matrix([[1, 1], [0.5, 1]], [0, 0], [0.5, 0.5]),
        "far_midpoints": matrix(np.eye(3), [10, -10, 0.25], [1 / 3] * 3),
        "single": matrix([[1]], [0.2], [0.5]),
        "unequal_diag": matrix(np.eye(2), [0, 0], [0.6, 0.3]),
        "cube_one_line": geometry("inf", 2, [([1, 0], 0)]),
        "interval": geometry("inf", 1, [([1], 1 / 3), ([1], -1 / 3)]),
    }
    for n in (4, 8, 16, 32):
        files[f"equal_n{n}"] = matrix(unit_diagonal(rng, n), rng.uniform(-2, 2, n), [1 / n] * n)
    for n in (3, 5, 8):
        w = rng.uniform(1, 2, n)
        files[f"general_n{n}"] = matrix(unit_diagonal(rng, n), rng.uniform(-1, 1, n),
                                        0.9 * w / w.sum())
    for n in (3, 5):
        files[f"sharpness_n{n}"] = geometry(
            "inf", 2, [([1, 0], -1 + 2 * k / (n + 1)) for k in range(1, n + 1)])
    for p, d, n in (("inf", 2, 3), (2, 2, 4), (1, 3, 5), (3, 4, 6), (1.5, 8, 10)):
        planes = [(rng.standard_normal(d), rng.uniform(-0.8, 0.8)) for _ in range(n)]
        files[f"lp{p}_d{d}_n{n}"] = geometry(p, d, planes)
    M = [[1.5, 0.5], [-0.3, 0.9]]
    planes = [(rng.standard_normal(2), rng.uniform(-0.5, 0.5)) for _ in range(3)]
    files["image_disc"] = geometry(2, 2, planes, M)
    return files


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=Path(__file__).resolve().parent.parent / "corpus",
                        type=Path)
    args = parser.parse_args()
    args.out.mkdir(exist_ok=True)
    for name, data in build().items():
        (args.out / f"{name}.json").write_text(json.dumps(data, indent=2) + "\n")
    print(f"wrote {len(build())} instances to {args.out}")


if __name__ == "__main__":
    main()
