"""Built-in example generators and JSON bundle serialization.

The JSON schema (version 1):

    {"version": 1,
     "spaces": {id: {"dim": n, "grading": [..]?}},
     "braiding": {"kind": "flip"} | {"kind": "phase", "modulus": m}
                 | {"kind": "explicit", "pairs": [{"first": id, "second": id,
                                                   "matrix": [[[re, im], ..], ..]}]},
     "operators": {name: {"domain": [ids], "codomain": [ids], "matrix": ...}},
     "groups": {name: {"order": n, "identity": i, "table": [[..], ..]}}}

Matrices are row-major with the first leg most significant; floats are
emitted with 17 significant digits so serialization is canonical.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .braiding import (BraidingProvider, ExplicitBraiding, FlipBraiding, PhaseBraiding)
from .groups import FiniteGroup, GroupTableError
from .multunitary import MultUnitary
from .tensor import LegOperator, LegSignature, Space
from .yd import YDModule

__all__ = [
    "SchemaError", "Bundle", "kac_takesaki", "graded_category", "group_yd_module",
    "identity_control", "bundle_to_json", "bundle_from_json", "save_bundle", "load_bundle",
]

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """Raised with a JSON-pointer-style path to the offending node."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


@dataclass
class Bundle:
    """An in-memory collection of spaces, a braiding, named operators, and groups."""

    spaces: dict[str, Space] = field(default_factory=dict)
    braiding_kind: str = "flip"
    braiding_modulus: int | None = None
    braiding_pairs: list[LegOperator] = field(default_factory=list)
    operators: dict[str, LegOperator] = field(default_factory=dict)
    groups: dict[str, FiniteGroup] = field(default_factory=dict)

    def provider(self) -> BraidingProvider:
        if self.braiding_kind == "flip":
            return FlipBraiding()
        if self.braiding_kind == "phase":
            return PhaseBraiding(self.braiding_modulus or 1)
        if self.braiding_kind == "explicit":
            table = ExplicitBraiding()
            for op in self.braiding_pairs:
                table.register(op)
            return table
        raise SchemaError("/braiding/kind", f"unknown kind {self.braiding_kind!r}")

    def mult_unitary(self, name: str) -> MultUnitary:
        op = self.operators[name]
        if len(op.domain) != 2 or op.domain[0] != op.domain[1]:
            raise SchemaError(f"/operators/{name}", "not a two-leg endomorphism of L (x) L")
        return MultUnitary(op.domain[0], op, self.provider())


# ---------------------------------------------------------------------------
# generators


def kac_takesaki(group: FiniteGroup, space_id: str = "L") -> MultUnitary:
    """W(d_g (x) d_h) = d_g (x) d_{gh} on C[G] (x) C[G], with the flip braiding."""
    n = group.order
    space = Space(space_id, n)
    w = np.zeros((n * n, n * n), dtype=complex)
    for g in range(n):
        for h in range(n):
            w[g * n + group.mul(g, h), g * n + h] = 1.0
    sig = LegSignature((space, space), (space, space))
    return MultUnitary(space, LegOperator(sig, w), FlipBraiding())


def graded_category(modulus: int, dims_gradings: dict[str, tuple[int, tuple[int, ...]]]
                    ) -> tuple[dict[str, Space], PhaseBraiding]:
    """Spaces with declared gradings plus the phase braiding q = exp(2 pi i / m)."""
    spaces = {sid: Space(sid, dim, tuple(grading))
              for sid, (dim, grading) in dims_gradings.items()}
    return spaces, PhaseBraiding(modulus)


def group_yd_module(group: FiniteGroup, grading: list[int], action: list[np.ndarray],
                    mu: MultUnitary | None = None, space_id: str = "H",
                    tol: float = 1e-12) -> tuple[YDModule, MultUnitary]:
    """Module over the Kac-Takesaki unitary of the group.

    ``grading`` assigns a group element to each basis vector of H; ``action``
    lists one unitary per group element.  The corep moves the group leg by
    the degree, the rep acts by the group element; compatibility requires
    each pi(g) to map degree h vectors into degree g h g^{-1} vectors and pi
    to be a homomorphism.  Violations are reported with the offending pair.
    """
    if mu is None:
        mu = kac_takesaki(group)
    n = group.order
    d = len(grading)
    if len(action) != n:
        raise ValueError(f"need one action matrix per group element, got {len(action)}")
    mats = [np.asarray(m, dtype=complex) for m in action]
    for g, m in enumerate(mats):
        if m.shape != (d, d):
            raise ValueError(f"action matrix for element {g} has shape {m.shape}")
        if np.linalg.norm(m @ m.conj().T - np.eye(d)) > tol * 10:
            raise ValueError(f"action of element {g} is not unitary")
    for g in range(n):
        for h in range(n):
            target = group.mul(group.mul(g, h), group.inv(g))
            for j in range(d):
                if grading[j] != h:
                    continue
                for i in range(d):
                    if abs(mats[g][i, j]) > tol and grading[i] != target:
                        raise GroupTableError(
                            f"action violates the compatibility g H_h <= H_(ghg^-1) "
                            f"at (g={g}, h={h})")
            prod = mats[g] @ mats[h]
            if np.linalg.norm(prod - mats[group.mul(g, h)]) > tol * 10:
                raise GroupTableError(f"action is not a homomorphism at (g={g}, h={h})")
    hspace = Space(space_id, d, tuple(grading))
    lspace = mu.space
    u = np.zeros((d * n, d * n), dtype=complex)
    for i in range(d):
        for h in range(n):
            u[i * n + group.mul(grading[i], h), i * n + h] = 1.0
    v = np.zeros((n * d, n * d), dtype=complex)
    for g in range(n):
        v[g * d:(g + 1) * d, g * d:(g + 1) * d] = mats[g]
    corep = LegOperator(LegSignature((hspace, lspace), (hspace, lspace)), u)
    rep = LegOperator(LegSignature((lspace, hspace), (lspace, hspace)), v)
    return YDModule(hspace, corep, rep), mu


def identity_control(dim: int, space_id: str = "L") -> MultUnitary:
    """The identity operator with the degenerate identity braiding table.

    A non-braiding control input: its Pentagon residual vanishes while every
    regularity-flavoured quantity collapses, which exercises the failure
    paths of the certificates.
    """
    space = Space(space_id, dim)
    eye = np.eye(dim * dim, dtype=complex)
    sig = LegSignature((space, space), (space, space))
    table = ExplicitBraiding()
    table.register(LegOperator(LegSignature((space, space), (space, space)), eye))
    return MultUnitary(space, LegOperator(sig, eye), table)


# ---------------------------------------------------------------------------
# canonical JSON


def _fmt_float(x: float) -> str:
    if np.isnan(x):
        return "NaN"
    if np.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _emit(node, out: list[str]) -> None:
    if isinstance(node, dict):
        out.append("{")
        for i, key in enumerate(node):
            if i:
                out.append(",")
            _emit(str(key), out)
            out.append(":")
            _emit(node[key], out)
        out.append("}")
    elif isinstance(node, (list, tuple)):
        out.append("[")
        for i, item in enumerate(node):
            if i:
                out.append(",")
            _emit(item, out)
        out.append("]")
    elif isinstance(node, str):
        out.append('"' + node.replace("\\", "\\\\").replace('"', '\\"') + '"')
    elif isinstance(node, (bool, np.bool_)):
        out.append("true" if node else "false")
    elif isinstance(node, (int, np.integer)):
        out.append(str(int(node)))
    elif isinstance(node, (float, np.floating)):
        out.append(_fmt_float(float(node)))
    elif node is None:
        out.append("null")
    else:
        raise TypeError(f"cannot serialize {type(node)}")


def _canonical_json(tree) -> str:
    out: list[str] = []
    _emit(tree, out)
    return "".join(out)


def _matrix_tree(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _matrix_from_tree(tree, path: str) -> np.ndarray:
    try:
        rows = [[complex(entry[0], entry[1]) for entry in row] for row in tree]
    except (TypeError, IndexError):
        raise SchemaError(path, "matrix entries must be [re, im] pairs") from None
    m = np.array(rows, dtype=complex)
    if m.ndim != 2:
        raise SchemaError(path, "matrix must be two-dimensional")
    return m


def bundle_to_json(bundle: Bundle) -> str:
    spaces_tree = {}
    for sid in sorted(bundle.spaces):
        s = bundle.spaces[sid]
        entry: dict = {"dim": s.dim}
        if s.grading is not None:
            entry["grading"] = list(s.grading)
        spaces_tree[sid] = entry
    braiding_tree: dict = {"kind": bundle.braiding_kind}
    if bundle.braiding_kind == "phase":
        braiding_tree["modulus"] = bundle.braiding_modulus
    if bundle.braiding_kind == "explicit":
        braiding_tree["pairs"] = [
            {"first": op.domain[0].id, "second": op.domain[1].id,
             "matrix": _matrix_tree(op.matrix)}
            for op in bundle.braiding_pairs]
    ops_tree = {}
    for name in sorted(bundle.operators):
        op = bundle.operators[name]
        ops_tree[name] = {"domain": [s.id for s in op.domain],
                          "codomain": [s.id for s in op.codomain],
                          "matrix": _matrix_tree(op.matrix)}
    groups_tree = {}
    for name in sorted(bundle.groups):
        g = bundle.groups[name]
        groups_tree[name] = {"order": g.order, "identity": g.identity,
                             "table": [list(row) for row in g.table]}
    tree = {"version": SCHEMA_VERSION, "spaces": spaces_tree, "braiding": braiding_tree,
            "operators": ops_tree, "groups": groups_tree}
    return _canonical_json(tree) + "\n"


def bundle_from_json(text: str) -> Bundle:
    import json

    try:
        tree = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("/", f"not valid JSON: {exc}") from None
    if not isinstance(tree, dict):
        raise SchemaError("/", "top level must be an object")
    version = tree.get("version")
    if version != SCHEMA_VERSION:
        raise SchemaError("/version", f"unsupported version {version!r}, "
                                      f"expected {SCHEMA_VERSION}")
    bundle = Bundle()
    for sid, entry in tree.get("spaces", {}).items():
        path = f"/spaces/{sid}"
        if not isinstance(entry, dict) or "dim" not in entry:
            raise SchemaError(path, "expected an object with a 'dim' field")
        grading = entry.get("grading")
        try:
            bundle.spaces[sid] = Space(sid, int(entry["dim"]),
                                       tuple(grading) if grading is not None else None)
        except ValueError as exc:
            raise SchemaError(path, str(exc)) from None
    braiding = tree.get("braiding", {"kind": "flip"})
    kind = braiding.get("kind")
    if kind not in ("flip", "phase", "explicit"):
        raise SchemaError("/braiding/kind", f"unknown braiding kind {kind!r}")
    bundle.braiding_kind = kind
    if kind == "phase":
        if "modulus" not in braiding:
            raise SchemaError("/braiding/modulus", "phase braiding needs a modulus")
        bundle.braiding_modulus = int(braiding["modulus"])
    if kind == "explicit":
        for idx, pair in enumerate(braiding.get("pairs", [])):
            path = f"/braiding/pairs/{idx}"
            try:
                first = bundle.spaces[pair["first"]]
                second = bundle.spaces[pair["second"]]
            except KeyError as exc:
                raise SchemaError(path, f"unknown space {exc}") from None
            m = _matrix_from_tree(pair["matrix"], path + "/matrix")
            sig = LegSignature((first, second), (second, first))
            try:
                bundle.braiding_pairs.append(LegOperator(sig, m))
            except ValueError as exc:
                raise SchemaError(path, str(exc)) from None
    for name, entry in tree.get("operators", {}).items():
        path = f"/operators/{name}"
        try:
            domain = tuple(bundle.spaces[s] for s in entry["domain"])
            codomain = tuple(bundle.spaces[s] for s in entry["codomain"])
        except KeyError as exc:
            raise SchemaError(path, f"unknown space {exc}") from None
        m = _matrix_from_tree(entry["matrix"], path + "/matrix")
        try:
            bundle.operators[name] = LegOperator(LegSignature(domain, codomain), m)
        except ValueError as exc:
            raise SchemaError(path, str(exc)) from None
    for name, entry in tree.get("groups", {}).items():
        path = f"/groups/{name}"
        try:
            bundle.groups[name] = FiniteGroup(name, tuple(tuple(r) for r in entry["table"]),
                                              int(entry.get("identity", 0)))
        except (GroupTableError, KeyError, TypeError) as exc:
            raise SchemaError(path, str(exc)) from None
    return bundle


def save_bundle(bundle: Bundle, path: str) -> None:
    """Atomic write: serialize to a temporary file, then rename into place."""
    text = bundle_to_json(bundle)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_bundle(path: str) -> Bundle:
    with open(path, "r") as handle:
        return bundle_from_json(handle.read())
