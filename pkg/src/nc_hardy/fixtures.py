"""Matrix fixture files: an algebra plus one operator, as JSON.

Fields: ``n`` (int), ``weights`` (n floats), ``blocks`` (block sizes) and
``entries`` (row-major list of ``[re, im]`` pairs).  Floats are written with
Python's shortest round-trip repr, so write-then-read is exact.
"""

import json

import numpy as np

from .algebra import TracialAlgebra

FIELDS = ("n", "weights", "blocks", "entries")


def to_fixture(alg, x):
    x = alg.check(x)
    return {
        "n": alg.n,
        "weights": [float(w) for w in alg.weights],
        "blocks": [int(b) for b in alg.blocks],
        "entries": [[float(z.real), float(z.imag)] for z in x.ravel()],
    }


def from_fixture(doc):
    missing = [k for k in FIELDS if k not in doc]
    if missing:
        raise ValueError(f"fixture is missing fields {missing}")
    n = int(doc["n"])
    alg = TracialAlgebra(tuple(doc["weights"]), tuple(doc["blocks"]))
    if alg.n != n:
        raise ValueError(f"fixture declares n={n} but has {alg.n} weights")
    entries = np.asarray(doc["entries"], dtype=float)
    if entries.shape != (n * n, 2):
        raise ValueError(f"fixture needs {n * n} [re, im] entries")
    x = (entries[:, 0] + 1j * entries[:, 1]).reshape(n, n)
    return alg, x


def write_fixture(path, alg, x):
    with open(path, "w") as fh:
        json.dump(to_fixture(alg, x), fh, indent=2)
        fh.write("\n")


def read_fixture(path):
    with open(path) as fh:
        return from_fixture(json.load(fh))
