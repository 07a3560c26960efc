"""JSON encoding of operators: ``{"group", "order", "N", "terms": [[g, l, coeffs, sheet?], ...]}``.

``coeffs`` is the centered Fourier vector as ``[re, im]`` pairs; the
optional fourth entry is ``"+"`` or ``"-"`` for a half-line projection.
"""

from __future__ import annotations

from ..algebra.functions import PeriodicFunction
from ..algebra.io import _complex, _pairs, group_from_json, group_to_json
from ..errors import ConfigError, NCIndexError
from .operators import NCOperatorSpec, Term


def operator_to_json(op: NCOperatorSpec) -> dict:
    terms = []
    for t in op.terms:
        row = [list(t.g), t.l, _pairs(t.coeff.coeffs)]
        if t.sheet is not None:
            row.append(t.sheet)
        terms.append(row)
    return {"group": group_to_json(op.group), "order": op.order, "N": op.N, "terms": terms}


def operator_from_json(d: dict) -> NCOperatorSpec:
    G = group_from_json(d["group"])
    try:
        terms = []
        for row in d["terms"]:
            g, l, coeffs = row[:3]
            sheet = row[3] if len(row) > 3 else None
            terms.append(Term(G.canonical(g), int(l), PeriodicFunction(G.L, _complex(coeffs)), sheet))
        return NCOperatorSpec(G, int(d["order"]), terms, N=d.get("N"))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"bad operator description: {exc}") from exc
    except NCIndexError as exc:
        raise ConfigError(f"bad operator description: {exc}") from exc
