"""Regenerate the synthetic datasets bundled in src/ucurve/data.

The original corpora are not redistributable; these stand-ins copy their
shapes (feature count, class count, value type) and plant a few informative
features and interactions so that feature selection has something to find.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parent.parent / "src" / "ucurve" / "data"


def write(name: str, header: str, x: np.ndarray, labels: list[str], fmt: str = "{:g}") -> None:
    lines = [f"# {header}"]
    for row, lab in zip(x.tolist(), labels):
        lines.append(",".join(fmt.format(v) for v in row) + "," + lab)
    (OUT / name).write_text("\n".join(lines) + "\n")


def votes(rng: np.random.Generator) -> None:
    t, n = 435, 16
    y = (rng.random(t) < 0.39).astype(int)
    strength = np.array([0.9, 0.8, 0.7, 0.6, 0.55, 0.5] + [0.0] * 10)
    rng.shuffle(strength)
    p_yes = 0.5 + np.where(y[:, None] == 1, 1, -1) * strength[None, :] * 0.45
    x = np.where(rng.random((t, n)) < p_yes, 1, -1)
    x[rng.random((t, n)) < 0.05] = 0
    write("votes16.csv", "votes-style: 435 samples, 16 ternary features (-1/0/1), 2 classes",
          x, ["republican" if v else "democrat" for v in y], "{:d}")


def pendigits(rng: np.random.Generator) -> None:
    t, n, k = 1000, 16, 10
    templates = rng.integers(0, 101, size=(k, n))
    y = rng.integers(0, k, size=t)
    x = np.clip(templates[y] + rng.normal(0, 25, size=(t, n)), 0, 100).round().astype(int)
    write("pendigits16.csv", "pendigits-style: 1000 samples, 16 features in 0..100, 10 classes",
          x, [str(v) for v in y], "{:d}")


def woperator(rng: np.random.Generator, name: str) -> None:
    t, n = 2000, 16
    x = (rng.random((t, n)) < 0.5).astype(int)
    a, b, c, d = rng.choice(n, size=4, replace=False)
    # window operator: a majority of three pixels, flipped by a fourth
    y = ((x[:, a] + x[:, b] + x[:, c] >= 2) ^ (x[:, d] & x[:, a])).astype(int)
    noise = rng.random(t) < 0.08
    y = np.where(noise, 1 - y, y)
    write(name, "w-operator-style: 2000 samples, 16 binary features, 2 classes",
          x, [str(v) for v in y], "{:d}")


def biological(rng: np.random.Generator) -> None:
    t, n = 15, 27
    x = rng.normal(size=(t, n))
    drivers = rng.choice(n, size=2, replace=False)
    score = x[:, drivers[0]] - 0.8 * x[:, drivers[1]] + rng.normal(0, 0.3, size=t)
    y = np.digitize(score, np.quantile(score, [1 / 3, 2 / 3]))
    write("biological27.csv", "microarray-style: 15 samples, 27 continuous genes, 3 target levels",
          x, [["low", "mid", "high"][v] for v in y], "{:.4f}")


def ionosphere(rng: np.random.Generator) -> None:
    t, n = 351, 34
    y = (rng.random(t) < 0.64).astype(int)
    x = rng.normal(size=(t, n))
    informative = rng.choice(n, size=6, replace=False)
    x[:, informative[:3]] += (y[:, None] * 1.2)
    # two features informative only jointly
    i, j = informative[3], informative[4]
    s = np.sign(x[:, i]) * np.sign(x[:, j])
    x[:, j] = np.abs(x[:, j]) * np.where(y == 1, s, -s) * np.sign(x[:, i])
    write("ionosphere34.csv", "ionosphere-style: 351 samples, 34 continuous features, 2 classes",
          x, ["g" if v else "b" for v in y], "{:.4f}")


def dorothea(rng: np.random.Generator) -> None:
    t, n = 800, 60
    density = np.where(np.arange(n) < 38, rng.uniform(0.14, 0.4, n), rng.uniform(0.005, 0.1, n))
    rng.shuffle(density)
    x = (rng.random((t, n)) < density).astype(int)
    dense = np.flatnonzero(x.sum(axis=0) >= 100)
    a, b, c = rng.choice(dense, size=3, replace=False)
    y = ((x[:, a] | (x[:, b] & x[:, c])) ^ (rng.random(t) < 0.1)).astype(int)
    write("dorothea60.csv", "dorothea-style: 800 samples, 60 sparse binary features, 2 classes",
          x, ["+1" if v else "-1" for v in y], "{:d}")


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(20240607)
    votes(rng)
    pendigits(rng)
    for tag in "abc":
        woperator(rng, f"woperator16_{tag}.csv")
    biological(rng)
    ionosphere(rng)
    dorothea(rng)


if __name__ == "__main__":
    main()
