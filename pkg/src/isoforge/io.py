"""Canonical JSON encodings for spaces, groups, gadgets, molecules and certificates.

Rationals are lowest-terms strings. ``dumps`` output is compact with a fixed
key order, so equal values always serialize to identical bytes.
"""

import json
from fractions import Fraction
from pathlib import Path

from .errors import InputError, ParseError
from .freespace import Molecule, TransportCertificate
from .groups import PermutationGroup
from .metric import format_rational, parse_rational, validate


def dumps(obj):
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False) + "\n"


def loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None


def load_file(path):
    try:
        return loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def space_to_json(space):
    return {
        "points": list(space.points),
        "dist": space.map_entries(lambda v: format_rational(Fraction(v, space.den))),
    }


def space_from_json(obj):
    if not isinstance(obj, dict) or "points" not in obj or "dist" not in obj:
        raise ParseError("space JSON needs 'points' and 'dist'")
    return validate(obj["points"], obj["dist"])


def group_to_json(g, generators=True):
    out = {"degree": g.degree, "elements": [list(u) for u in g.elements]}
    if generators:
        out["generators"] = [list(u) for u in g.generators]
    return out


def group_from_json(obj):
    """Parse a group; the element list must itself be a group."""
    if not isinstance(obj, dict) or "degree" not in obj or "elements" not in obj:
        raise ParseError("group JSON needs 'degree' and 'elements'")
    try:
        degree = int(obj["degree"])
        elements = [tuple(int(x) for x in u) for u in obj["elements"]]
    except (TypeError, ValueError):
        raise ParseError("group elements must be integer image arrays") from None
    return PermutationGroup.from_elements(degree, elements)


def block_to_json(block):
    X = block.base.points
    labels = []
    for lab in block.labels:
        if lab.kind == "base":
            labels.append({"kind": "base", "x": X[lab.x], "j": lab.j})
        elif lab.kind == "tuple":
            labels.append({"kind": "tuple", "xs": [X[i] for i in lab.xs]})
        else:
            labels.append({"kind": "tag"})
    params = {"n": block.params.get("n", 0)}
    if "c" in block.params:
        params["c"] = [format_rational(v) for v in block.params["c"]]
    params["r"] = format_rational(block.params.get("r", Fraction(1)))
    if "mode" in block.params:
        params["mode"] = block.params["mode"]
    if "z" in block.params:
        params["z"] = [X[i] for i in block.params["z"]]
    out = space_to_json(block.space)
    out["labels"] = labels
    out["params"] = params
    return out


def embedding_to_json(emb):
    return {
        "source": group_to_json(emb.source),
        "image": group_to_json(emb.image),
        "map": [{"u": list(u), "hat": list(h)} for u, h in emb.pairs],
    }


def molecule_to_json(m, inline_space=True):
    out = {}
    if inline_space:
        out["space"] = space_to_json(m.base)
    out["coeffs"] = {p: format_rational(c) for p, c in zip(m.base.points, m.coeffs) if c}
    return out


def molecule_from_json(obj, space=None, base_dir=None):
    """Parse a molecule. ``space`` (already parsed) wins over an embedded one."""
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ParseError("molecule JSON needs 'coeffs'")
    embedded = obj.get("space")
    if isinstance(embedded, str):
        path = Path(embedded)
        if base_dir is not None and not path.is_absolute():
            path = Path(base_dir) / path
        embedded = load_file(path)
    if embedded is not None:
        inner = space_from_json(embedded)
        if space is not None and inner != space:
            raise InputError("molecule's embedded space differs from the given space")
        space = space or inner
    if space is None:
        raise ParseError("molecule needs a space")
    coeffs = obj["coeffs"]
    if not isinstance(coeffs, dict):
        raise ParseError("'coeffs' must map point labels to rationals")
    unknown = [k for k in coeffs if k not in space.points]
    if unknown:
        raise ParseError(f"unknown points in molecule: {unknown}")
    return Molecule.from_labels(space, coeffs)


def certificate_to_json(cert, space):
    P = space.points
    return {
        "value": format_rational(cert.value),
        "plan": [{"from": P[p], "to": P[q], "amt": format_rational(f)} for p, q, f in cert.plan],
        "potential": {p: format_rational(v) for p, v in zip(P, cert.potential)},
    }


def certificate_from_json(obj, space):
    idx = space.index
    plan = tuple(
        sorted((idx(e["from"]), idx(e["to"]), parse_rational(e["amt"])) for e in obj["plan"])
    )
    potential = tuple(parse_rational(obj["potential"][p]) for p in space.points)
    return TransportCertificate(plan, potential, parse_rational(obj["value"]))


def symmetry_to_json(sym):
    return {
        "vertex_perm": list(sym.vertex_perm),
        "matrix": [[format_rational(v) for v in row] for row in sym.matrix],
    }
