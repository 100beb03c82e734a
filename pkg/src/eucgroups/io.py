"""Versioned JSON formats for groups, subspaces, targets and certificates.

Exact scalars are stored as strings in the scalar syntax (``"3/2 - t^2"``);
rationals as ``"p/q"`` strings.  Every semantic error is reported with the
line and column of the offending JSON value.  Output is produced with sorted
keys so equal inputs give byte-identical files.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from json.decoder import scanstring
from pathlib import Path
from typing import Any

from .compactgen import CompactGenCertificate, Emitted
from .errors import FileFormatError, ScalarSyntaxError
from .groups import FgGroup, StreamedGroup, Vector
from .scalars import Constant, ConstantBasis, ExactScalar, format_scalar, fresh_realization, parse_scalar

FORMAT_VERSION = 1

_WS = re.compile(r"[ \t\n\r]*")


# -- locating values ----------------------------------------------------------------------

def _value_positions(text: str) -> dict[tuple, int]:
    """Map every JSON path (tuple of keys / indices) to the offset of its value."""
    decoder = json.JSONDecoder()
    out: dict[tuple, int] = {}

    def skip(i):
        return _WS.match(text, i).end()

    def walk(i, path):
        i = skip(i)
        out[path] = i
        ch = text[i] if i < len(text) else ""
        if ch == "{":
            i = skip(i + 1)
            if text[i] == "}":
                return i + 1
            while True:
                key, i = scanstring(text, skip(i) + 1)
                i = skip(i)
                i = walk(i + 1, path + (key,))  # past ':'
                i = skip(i)
                if text[i] == "}":
                    return i + 1
                i += 1  # ','
        if ch == "[":
            i = skip(i + 1)
            if text[i] == "]":
                return i + 1
            k = 0
            while True:
                i = skip(walk(i, path + (k,)))
                k += 1
                if text[i] == "]":
                    return i + 1
                i += 1
        _, end = decoder.raw_decode(text, i)
        return end

    walk(0, ())
    return out


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Doc:
    """A parsed JSON document that can point at its own values."""

    def __init__(self, text: str, path: str | None = None):
        self.text = text
        self.path = path
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"invalid JSON: {exc.msg}", path, exc.lineno, exc.colno) from None
        self._pos = _value_positions(text)

    @classmethod
    def load(cls, path) -> "_Doc":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise FileFormatError(f"cannot read file: {exc.strerror}", str(path)) from None
        return cls(text, str(path))

    def error(self, where: tuple, message: str, extra_col: int = 0) -> FileFormatError:
        while where and where not in self._pos:
            where = where[:-1]
        line, col = _line_col(self.text, self._pos.get(where, 0))
        return FileFormatError(message, self.path, line, col + extra_col)

    def get(self, where: tuple):
        node = self.data
        for k in where:
            node = node[k]
        return node

    def expect(self, where, kind, label):
        node = self.get(where)
        if not isinstance(node, kind) or isinstance(node, bool) and kind is not bool:
            raise self.error(where, f"{label} must be {_kind_name(kind)}")
        return node

    def fields(self, where, required, optional=()):
        node = self.expect(where, dict, "document" if not where else "/".join(map(str, where)))
        for key in node:
            if key not in required and key not in optional:
                raise self.error(where + (key,), f"unknown field {key!r}")
        for key in required:
            if key not in node:
                raise self.error(where, f"missing field {key!r}")
        return node

    def version(self):
        v = self.get(("version",))
        if v != FORMAT_VERSION:
            raise self.error(("version",), f"unsupported version {v!r} (expected {FORMAT_VERSION})")

    def scalar(self, where, constants) -> ExactScalar:
        node = self.get(where)
        if isinstance(node, bool) or not isinstance(node, (str, int)):
            raise self.error(where, "scalar must be a string or an integer")
        if isinstance(node, int):
            return ExactScalar(node)
        try:
            return parse_scalar(node, constants)
        except ScalarSyntaxError as exc:
            # +1 skips the opening quote
            raise self.error(where, f"bad scalar {node!r}: {exc.reason}", (exc.column or 1)) from None

    def rational(self, where) -> Fraction:
        node = self.get(where)
        if isinstance(node, (int, str)) and not isinstance(node, bool):
            try:
                return Fraction(node)
            except (ValueError, ZeroDivisionError):
                pass
        raise self.error(where, f"expected a rational number, got {node!r}")

    def vectors(self, where, constants, length=None) -> list[Vector]:
        rows = self.expect(where, list, where[-1])
        out = []
        for i, row in enumerate(rows):
            self.expect(where + (i,), list, f"{where[-1]}[{i}]")
            v = tuple(self.scalar(where + (i, j), constants) for j in range(len(row)))
            if length is not None and len(v) != length:
                raise self.error(where + (i,), f"expected {length} coordinates, found {len(v)}")
            out.append(v)
        return out


def _kind_name(kind) -> str:
    return {dict: "an object", list: "a list", str: "a string", int: "an integer", bool: "a boolean"}.get(kind, str(kind))


# -- constants ----------------------------------------------------------------------------

def _read_constants(doc: _Doc, where: tuple, cb: ConstantBasis):
    for i, entry in enumerate(doc.expect(where, list, "constants")):
        w = where + (i,)
        node = doc.fields(w, ("name",), ("realization", "fresh", "seed"))
        name = doc.expect(w + ("name",), str, "name")
        try:
            if node.get("fresh"):
                if "realization" in node:
                    raise doc.error(w, "a fresh constant cannot also have a realization")
                seed = doc.expect(w + ("seed",), int, "seed") if "seed" in node else 0
                c = Constant(name, fresh_realization(seed, name))
            else:
                if "realization" not in node:
                    raise doc.error(w, f"constant {name!r} needs a realization or \"fresh\": true")
                c = Constant(name, doc.expect(w + ("realization",), str, "realization"))
            cb.declare(c)
        except ValueError as exc:
            if isinstance(exc, FileFormatError):
                raise
            raise doc.error(w, str(exc)) from None


def constants_json(constants) -> list[dict]:
    return [{"name": c.name, "realization": c.literal} for c in sorted(constants, key=lambda c: c.name)]


def _used_constants(vectors) -> list[Constant]:
    seen = {}
    for v in vectors:
        for a in v:
            for c in a.constants():
                seen[c.name] = c
    return [seen[k] for k in sorted(seen)]


def scalar_json(a: ExactScalar) -> str:
    return format_scalar(a)


def vector_json(v: Vector) -> list[str]:
    return [format_scalar(a) for a in v]


def fraction_json(q: Fraction | None) -> str | None:
    return None if q is None else str(q)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# -- group files ----------------------------------------------------------------------------

@dataclass
class GroupData:
    group: FgGroup
    constants: ConstantBasis
    space: str  # "R^m" or "R^omega"
    support: int | None = None
    stream: StreamedGroup | None = None
    path: str | None = None

    @property
    def ambient(self) -> int:
        return self.group.ambient


_AMBIENT_RE = re.compile(r"R\^(\d+)\Z")


def _read_ambient(doc: _Doc):
    node = doc.get(("ambient",))
    if isinstance(node, int) and not isinstance(node, bool):
        if node < 1:
            raise doc.error(("ambient",), "ambient dimension must be positive")
        return "R^m", node, None
    if isinstance(node, str):
        m = _AMBIENT_RE.match(node)
        if not m or int(m.group(1)) < 1:
            raise doc.error(("ambient",), f"ambient must look like \"R^3\", got {node!r}")
        return "R^m", int(m.group(1)), None
    if isinstance(node, dict):
        doc.fields(("ambient",), ("space", "support"))
        if node["space"] != "R^omega":
            raise doc.error(("ambient", "space"), "space must be \"R^omega\"")
        S = doc.expect(("ambient", "support"), int, "support")
        if S < 1:
            raise doc.error(("ambient", "support"), "support bound must be positive")
        return "R^omega", S, S
    raise doc.error(("ambient",), "ambient must be \"R^m\", an integer, or {\"space\": \"R^omega\", \"support\": S}")


def parse_group(text: str, path: str | None = None) -> GroupData:
    return _group_from_doc(_Doc(text, path))


def load_group(path) -> GroupData:
    return _group_from_doc(_Doc.load(path))


def _group_from_doc(doc: _Doc) -> GroupData:
    doc.fields((), ("version", "ambient", "generators"), ("constants", "stream"))
    doc.version()
    cb = ConstantBasis()
    if "constants" in doc.data:
        _read_constants(doc, ("constants",), cb)
    space, m, support = _read_ambient(doc)
    gens = doc.vectors(("generators",), cb, length=m)
    try:
        G = FgGroup(gens, ambient=m)
    except ValueError as exc:
        raise doc.error(("generators",), str(exc)) from None
    stream = None
    if "stream" in doc.data:
        doc.fields(("stream",), ("rule",))
        if doc.data["stream"]["rule"] != "round-robin":
            raise doc.error(("stream", "rule"), "the only stream rule is \"round-robin\"")
        if not gens:
            raise doc.error(("stream",), "a stream needs at least one generator")
        stream = StreamedGroup.round_robin(gens, m, support)
    return GroupData(G, cb, space, support, stream, doc.path)


def group_json(G: FgGroup, constants=None, space: str = "R^m", support: int | None = None, fresh_seed: dict | None = None, stream: bool = False) -> dict:
    """Group file contents; constants named in ``fresh_seed`` are written as fresh."""
    used = list(constants) if constants is not None else _used_constants(G.generators)
    fresh_seed = fresh_seed or {}
    decl = []
    for c in sorted(used, key=lambda c: c.name):
        if c.name in fresh_seed:
            decl.append({"name": c.name, "fresh": True, "seed": fresh_seed[c.name]})
        else:
            decl.append({"name": c.name, "realization": c.literal})
    doc = {
        "version": FORMAT_VERSION,
        "constants": decl,
        "ambient": {"space": "R^omega", "support": support} if space == "R^omega" else f"R^{G.ambient}",
        "generators": [vector_json(g) for g in G.generators],
    }
    if stream:
        doc["stream"] = {"rule": "round-robin"}
    return doc


# -- subspace files -------------------------------------------------------------------------

def parse_subspace(text: str, constants: ConstantBasis, path: str | None = None):
    return _subspace_from_doc(_Doc(text, path), constants)


def load_subspace(path, constants: ConstantBasis):
    return _subspace_from_doc(_Doc.load(path), constants)


def _subspace_from_doc(doc: _Doc, constants: ConstantBasis):
    from .intersect import SubspaceSpec

    doc.fields((), ("version", "ambient"), ("span", "equations", "constants"))
    doc.version()
    cb = constants.copy()
    if "constants" in doc.data:
        _read_constants(doc, ("constants",), cb)
    space, m, _ = _read_ambient(doc)
    if space != "R^m":
        raise doc.error(("ambient",), "subspaces live in R^m")
    has_span, has_eq = "span" in doc.data, "equations" in doc.data
    if has_span == has_eq:
        raise doc.error((), "give exactly one of \"span\" or \"equations\"")
    key = "span" if has_span else "equations"
    rows = doc.vectors((key,), cb, length=m)
    if has_span:
        return SubspaceSpec(m, span=tuple(rows))
    return SubspaceSpec(m, equations=tuple(rows))


def subspace_json(V) -> dict:
    rows = V.span if V.span is not None else V.equations
    return {
        "version": FORMAT_VERSION,
        "constants": constants_json(_used_constants(rows)),
        "ambient": f"R^{V.ambient}",
        ("span" if V.span is not None else "equations"): [vector_json(v) for v in rows],
    }


# -- density targets --------------------------------------------------------------------------

def parse_targets(text: str, ambient: int, path: str | None = None) -> list[tuple[Fraction, ...]]:
    doc = _Doc(text, path)
    doc.fields((), ("version", "targets"))
    doc.version()
    out = []
    for i, row in enumerate(doc.expect(("targets",), list, "targets")):
        doc.expect(("targets", i), list, f"targets[{i}]")
        if len(row) != ambient:
            raise doc.error(("targets", i), f"expected {ambient} coordinates, found {len(row)}")
        out.append(tuple(doc.rational(("targets", i, j)) for j in range(ambient)))
    return out


def load_targets(path, ambient: int):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"cannot read file: {exc.strerror}", str(path)) from None
    return parse_targets(text, ambient, str(path))


# -- certificates -----------------------------------------------------------------------------

def _emitted_json(e: Emitted) -> dict:
    d = {"vector": vector_json(e.vector), "witness": list(e.witness)}
    if e.stage is not None:
        d.update(stage=e.stage, bound=fraction_json(e.bound), prefix=e.prefix, role=e.role)
    return d


def certificate_json(cert: CompactGenCertificate) -> dict:
    return {
        "version": FORMAT_VERSION,
        "kind": "compactgen",
        "method": cert.method,
        "space": cert.space,
        "dimension": cert.dimension,
        "norm": cert.norm,
        "constants": constants_json(_used_constants(cert.generators)),
        "generators": [vector_json(g) for g in cert.generators],
        "finite_part": [_emitted_json(e) for e in cert.finite_part],
        "null_sequence": [_emitted_json(e) for e in cert.null_sequence],
        "coverage": [[list(p) for p in pairs] for pairs in cert.coverage],
        "scale": fraction_json(cert.scale),
        "epsilon0": fraction_json(cert.epsilon0),
        "search_K": list(cert.search_K),
        "streamed": cert.streamed,
    }


def dumps_certificate(cert: CompactGenCertificate) -> str:
    return dumps(certificate_json(cert))


@dataclass
class LoadedCertificate:
    certificate: CompactGenCertificate
    group: FgGroup
    constants: ConstantBasis


_CERT_FIELDS = ("version", "kind", "method", "space", "dimension", "norm", "constants", "generators",
                "finite_part", "null_sequence", "coverage", "scale", "epsilon0", "search_K", "streamed")


def parse_certificate(text: str, path: str | None = None) -> LoadedCertificate:
    doc = _Doc(text, path)
    doc.fields((), _CERT_FIELDS)
    doc.version()
    if doc.data["kind"] != "compactgen":
        raise doc.error(("kind",), f"cannot verify certificates of kind {doc.data['kind']!r}")
    method = doc.expect(("method",), str, "method")
    if method not in ("R", "Rm", "Romega"):
        raise doc.error(("method",), f"unknown method {method!r}")
    space = doc.expect(("space",), str, "space")
    dim = doc.expect(("dimension",), int, "dimension")
    if doc.data["norm"] != "sup":
        raise doc.error(("norm",), "only the sup norm is supported")
    cb = ConstantBasis()
    _read_constants(doc, ("constants",), cb)
    gens = doc.vectors(("generators",), cb)
    m = len(gens[0]) if gens else dim
    for i, g in enumerate(gens):
        if len(g) != m:
            raise doc.error(("generators", i), "generators differ in length")

    def emitted(where, finite):
        keys = ("vector", "witness") if finite else ("vector", "witness", "stage", "bound", "prefix", "role")
        node = doc.fields(where, keys)
        vec = tuple(doc.scalar(where + ("vector", j), cb) for j in range(len(doc.expect(where + ("vector",), list, "vector"))))
        wit = doc.expect(where + ("witness",), list, "witness")
        for j, x in enumerate(wit):
            doc.expect(where + ("witness", j), int, "witness entry")
        if finite:
            return Emitted(vec, tuple(wit))
        stage = doc.expect(where + ("stage",), int, "stage")
        bound = doc.rational(where + ("bound",))
        prefix = node["prefix"]
        if prefix is not None:
            prefix = doc.expect(where + ("prefix",), int, "prefix")
        role = doc.expect(where + ("role",), str, "role")
        return Emitted(vec, tuple(wit), stage, bound, prefix, role)

    finite = tuple(emitted(("finite_part", i), True) for i in range(len(doc.expect(("finite_part",), list, "finite_part"))))
    null = tuple(emitted(("null_sequence", i), False) for i in range(len(doc.expect(("null_sequence",), list, "null_sequence"))))
    coverage = []
    for i, pairs in enumerate(doc.expect(("coverage",), list, "coverage")):
        doc.expect(("coverage", i), list, "coverage entry")
        row = []
        for j, pair in enumerate(pairs):
            if not (isinstance(pair, list) and len(pair) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in pair)):
                raise doc.error(("coverage", i, j), "coverage pairs are [element index, integer coefficient]")
            row.append(tuple(pair))
        coverage.append(tuple(row))
    scale = None if doc.data["scale"] is None else doc.rational(("scale",))
    eps0 = doc.rational(("epsilon0",))
    Ks = doc.expect(("search_K",), list, "search_K")
    streamed = doc.expect(("streamed",), bool, "streamed")
    cert = CompactGenCertificate(space, dim, method, tuple(gens), finite, null, tuple(coverage), scale, eps0, tuple(Ks), streamed)
    return LoadedCertificate(cert, FgGroup(gens, ambient=m), cb)


def load_certificate(path) -> LoadedCertificate:
    doc_text = _Doc.load(path).text
    return parse_certificate(doc_text, str(path))


def verify_certificate_file(cert_path, group_path=None):
    """Verify a certificate from its file, optionally against a separate group file."""
    from .compactgen import verify_certificate

    loaded = load_certificate(cert_path)
    G = loaded.group
    if group_path is not None:
        gd = load_group(group_path)
        G = gd.stream.prefix(len(loaded.certificate.generators)) if gd.stream is not None and loaded.certificate.streamed else gd.group
    return verify_certificate(G, loaded.certificate)


# -- reports as JSON ------------------------------------------------------------------------------

def closure_json(decomp, witnesses=None) -> dict:
    G = decomp.group
    doc = {
        "version": FORMAT_VERSION,
        "kind": "closure",
        "norm": decomp.norm,
        "constants": constants_json(_used_constants(G.generators)),
        "generators": [vector_json(g) for g in G.generators],
        "V0_basis": [vector_json(v) for v in decomp.V0_basis],
        "dense_lattice": [list(c) for c in decomp.dense_lattice],
        "F": [{"vector": vector_json(f), "witness": list(G.basis_to_generators(c))} for f, c in zip(decomp.F, decomp.F_coefficients)],
        "epsilon0": fraction_json(decomp.epsilon0),
        "epsilon0_exact": decomp.epsilon0_exact,
    }
    if witnesses is not None:
        doc["dense_witnesses"] = [
            {
                "stage": n,
                "bound": fraction_json(eps),
                "K": K,
                "vectors": [{"vector": vector_json(v), "witness": list(G.basis_to_generators(c))} for v, c in zip(B, coeffs)],
            }
            for n, (eps, B, coeffs, K) in enumerate(zip(witnesses.epsilons, witnesses.B, witnesses.coefficients, witnesses.K_used))
        ]
    return doc


def intersection_json(res) -> dict:
    G = res.group
    v = res.verdict
    doc = {
        "version": FORMAT_VERSION,
        "kind": "intersection",
        "norm": "sup",
        "provenance": res.provenance,
        "constants": constants_json(_used_constants(list(G.generators) + list(res.subspace.span or res.subspace.equations or ()))),
        "generators": [vector_json(g) for g in G.generators],
        "subspace": subspace_json(res.subspace),
        "intersection": [{"vector": vector_json(g), "coefficients": list(c), "witness": list(w)} for g, c, w in zip(res.generators, res.coefficients, res.witnesses)],
        "trace": [{"level": t.level, "k": t.k, "x": list(t.x) if t.x else None} for t in res.trace],
        "Q": list(res.Q),
        "discrete": v.discrete,
        "separation": fraction_json(v.separation) if v.discrete else None,
        "separation_exact": v.separation_exact,
    }
    if not v.discrete:
        doc["density_witness"] = {"direction": vector_json(v.direction), "element": vector_json(v.witness), "norm": fraction_json(v.witness_norm)}
    return doc
