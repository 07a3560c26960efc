"""JSON encoding of groups, crossed elements and torus elements.

Floats go through ``repr`` in the json module, so round trips are exact.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from .crossed import CrossedElement
from .groups import GroupSpec
from .torus import NCTorusElement


def group_to_json(G: GroupSpec) -> dict:
    d = {"kind": G.kind, "L": G.L}
    if G.shifts:
        d["shifts"] = list(G.shifts)
    if G.kind == "cyclic":
        d["order"] = G.order
    if G.labels:
        d["labels"] = list(G.labels)
    return d


def group_from_json(d: dict) -> GroupSpec:
    try:
        return GroupSpec(d["kind"], L=float(d.get("L", 2 * np.pi)),
                         shifts=tuple(float(s) for s in d.get("shifts", ())),
                         order=int(d.get("order", 0)), labels=tuple(d.get("labels", ())))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad group description: {exc}") from exc


def _pairs(c: np.ndarray):
    return [[float(z.real), float(z.imag)] for z in c]


def _complex(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]


def element_to_json(a: CrossedElement) -> dict:
    support = []
    for g, v in a.items():
        if a.rank == 1:
            coeffs = _pairs(v[0, 0])
        else:
            coeffs = [[_pairs(v[i, j]) for j in range(a.rank)] for i in range(a.rank)]
        support.append([list(g), coeffs])
    return {"group": group_to_json(a.group), "L": a.L, "N": a.N, "rank": a.rank, "support": support}


def element_from_json(d: dict) -> CrossedElement:
    G = group_from_json(d["group"])
    if float(d.get("L", G.L)) != G.L:
        raise ConfigError("element circumference disagrees with its group")
    N = int(d["N"])
    rank = int(d.get("rank", 1))
    data = {}
    for g, coeffs in d["support"]:
        c = _complex(coeffs)
        if rank == 1:
            c = c.reshape(1, 1, -1)
        if c.shape != (rank, rank, 2 * N + 1):
            raise ConfigError(f"component {g} has shape {c.shape}")
        data[tuple(g)] = c
    return CrossedElement(G, N, data, rank=rank)


def torus_to_json(a: NCTorusElement) -> dict:
    return {"theta": a.theta, "N": a.N, "coeffs": [_pairs(row) for row in a.a]}


def torus_from_json(d: dict) -> NCTorusElement:
    return NCTorusElement(float(d["theta"]), _complex(d["coeffs"]))
