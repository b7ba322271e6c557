"""JSON encoding of operator specs.

Operators are objects with a ``type`` discriminator; sequence laws are
nested objects with a ``kind`` field; complex scalars are ``[re, im]``
(plain JSON numbers are accepted on input).  Example::

    {"type": "weighted_shift", "weights": {"kind": "geometric", "beta": [0.5, 0]}}
"""

from __future__ import annotations

import json
from pathlib import Path

from . import laws as L
from . import operators as O


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    raise ValueError(f"cannot read a complex number from {v!r}")


def law_to_dict(law: L.SequenceLaw) -> dict:
    if isinstance(law, L.MonomialAtK):
        return {"kind": "monomial_at_k", "k": law.k}
    if isinstance(law, L.Alternating):
        return {"kind": "alternating", "a": law.a, "b": law.b}
    if isinstance(law, L.Geometric):
        return {"kind": "geometric", "beta": encode_complex(law.beta)}
    if isinstance(law, L.PowersOfI):
        return {"kind": "powers_of_i"}
    if isinstance(law, L.ExplicitList):
        return {"kind": "explicit", "values": [encode_complex(v) for v in law.items]}
    if isinstance(law, L.Combination):
        return {
            "kind": "combination",
            "terms": [{"coef": encode_complex(c), "law": law_to_dict(x)} for c, x in law.terms],
            "const": encode_complex(law.const),
        }
    raise TypeError(f"cannot encode law {law!r}")


def law_from_dict(d: dict) -> L.SequenceLaw:
    kind = d.get("kind")
    if kind == "monomial_at_k":
        return L.MonomialAtK(int(d["k"]))
    if kind == "alternating":
        return L.Alternating(float(d["a"]), float(d["b"]))
    if kind == "geometric":
        return L.Geometric(decode_complex(d["beta"]))
    if kind == "powers_of_i":
        return L.PowersOfI()
    if kind == "explicit":
        return L.ExplicitList(tuple(decode_complex(v) for v in d["values"]))
    if kind == "combination":
        terms = tuple((decode_complex(t["coef"]), law_from_dict(t["law"])) for t in d["terms"])
        return L.Combination(terms, decode_complex(d.get("const", 0)))
    raise ValueError(f"unknown sequence law kind {kind!r}")


def _coeff_list(values) -> list:
    return [encode_complex(v) for v in values]


def to_dict(op: O.OperatorSpec) -> dict:
    t = op.type_name
    if isinstance(op, O.RankOneMonomial):
        return {"type": t, "n": op.n, "m": op.m}
    if isinstance(op, O.FiniteRank):
        return {"type": t, "terms": [{"g": _coeff_list(g), "h": _coeff_list(h)} for g, h in op.terms]}
    if isinstance(op, O.DiagonalModSquared):
        return {"type": t, "weights": law_to_dict(op.weights)}
    if isinstance(op, O.DiagonalGeneral):
        return {"type": t, "alpha": law_to_dict(op.alpha)}
    if isinstance(op, O.MultPoly):
        return {"type": t, "coeffs": _coeff_list(op.coeffs)}
    if isinstance(op, O.ToeplitzTwoCos):
        return {"type": t}
    if isinstance(op, O.WeightedShift):
        return {"type": t, "weights": law_to_dict(op.weights)}
    if isinstance(op, O.Banded):
        return {"type": t, "k": op.k, "bands": [law_to_dict(b) for b in op.bands]}
    if isinstance(op, O.CompositionLinear):
        return {"type": t, "xi": encode_complex(op.xi)}
    if isinstance(op, O.CompositionMobius):
        return {"type": t, "alpha": encode_complex(op.alpha)}
    if isinstance(op, O.Affine):
        return {"type": t, "a": encode_complex(op.a), "b": encode_complex(op.b), "op": to_dict(op.op)}
    if isinstance(op, O.UnitaryConjugate):
        return {"type": t, "xi": encode_complex(op.xi), "op": to_dict(op.op)}
    raise TypeError(f"cannot encode operator {op!r}")


def from_dict(d: dict) -> O.OperatorSpec:
    if not isinstance(d, dict) or "type" not in d:
        raise ValueError("operator spec must be an object with a 'type' field")
    t = d["type"]
    if t == "rank_one_monomial":
        return O.RankOneMonomial(int(d["n"]), int(d["m"]))
    if t == "finite_rank":
        terms = [
            (tuple(decode_complex(v) for v in term["g"]), tuple(decode_complex(v) for v in term["h"]))
            for term in d["terms"]
        ]
        return O.FiniteRank(tuple(terms))
    if t == "diagonal_mod_squared":
        return O.DiagonalModSquared(law_from_dict(d["weights"]))
    if t == "diagonal_general":
        return O.DiagonalGeneral(law_from_dict(d["alpha"]))
    if t == "mult_poly":
        return O.MultPoly(tuple(decode_complex(v) for v in d["coeffs"]))
    if t == "toeplitz_two_cos":
        return O.ToeplitzTwoCos()
    if t == "weighted_shift":
        return O.WeightedShift(law_from_dict(d["weights"]))
    if t == "banded":
        op = O.Banded(tuple(law_from_dict(b) for b in d["bands"]))
        if "k" in d and int(d["k"]) != op.k:
            raise ValueError(f"banded spec says k = {d['k']} but lists {len(op.bands)} bands")
        return op
    if t == "composition_linear":
        return O.CompositionLinear(decode_complex(d["xi"]))
    if t == "composition_mobius":
        return O.CompositionMobius(decode_complex(d["alpha"]))
    if t == "affine":
        return O.Affine(from_dict(d["op"]), decode_complex(d.get("a", 1)), decode_complex(d.get("b", 0)))
    if t == "unitary_conjugate":
        return O.UnitaryConjugate(from_dict(d["op"]), decode_complex(d["xi"]))
    raise ValueError(f"unknown operator type {t!r}")


def dumps(op: O.OperatorSpec) -> str:
    return json.dumps(to_dict(op), sort_keys=True)


def loads(text: str) -> O.OperatorSpec:
    return from_dict(json.loads(text))


def load(path) -> O.OperatorSpec:
    return loads(Path(path).read_text())


def describe(op: O.OperatorSpec) -> str:
    """Short human-readable label used in titles and reports."""
    d = to_dict(op)
    params = {k: v for k, v in d.items() if k != "type"}
    return f"{d['type']} {json.dumps(params, sort_keys=True)}" if params else d["type"]
