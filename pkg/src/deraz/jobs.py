"""Job files: a small block language naming algebras, complexes and one task.

See ``docs/grammar.md`` for the full grammar.  Example::

    algebra A { field = Q; vars = x, y; }
    dgalgebra B { kind = matrix; over = A; n = 2; }
    task check-azumaya { algebra = B; }
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .azumaya import right_ideal_witness
from .complexes import FreeComplex, direct_sum, koszul
from .cring import PolyAlgebra
from .dgalg import (algebra_from_quotient, dual_numbers, end_dga, matrix_algebra, opposite,
                    product_algebra, quaternion_algebra, tensor_dga, unit_algebra, zero_algebra)
from .glue import GluedComplex, GluedScheme, glued_direct_sum, line_bundle, projective_line
from .scalars import Matrix, parse_field


class JobError(ValueError):
    """Malformed or inconsistent job file; carries a source position when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + message)


# lexer -----------------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<arrow>->)
  | (?P<num>-?\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*(?:-[A-Za-z][A-Za-z0-9_]*)*)
  | (?P<punct>[{}()\[\],;=])
""", re.VERBOSE)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise JobError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        pos = m.end()
    out.append(Token("end", "", line, pos - start + 1))
    return out


# syntax tree ----------------------------------------------------------------------------------

@dataclass
class Value:
    kind: str  # str | num | ident | list | matrix | map | tuple
    data: Any
    line: int
    col: int

    def plain(self):
        if self.kind in ("list", "tuple"):
            return [v.plain() for v in self.data]
        if self.kind == "matrix":
            return [[v.plain() for v in row] for row in self.data]
        if self.kind == "map":
            return {k: v.plain() for k, v in self.data.items()}
        return self.data


@dataclass
class Block:
    kind: str
    name: Any
    line: int
    col: int
    fields: dict = field(default_factory=dict)
    positions: dict = field(default_factory=dict)
    blocks: list = field(default_factory=list)

    def get(self, key, default=None):
        v = self.fields.get(key)
        return default if v is None else v

    def require(self, key) -> Value:
        v = self.fields.get(key)
        if v is None:
            raise JobError(f"{self.kind} {self.name}: missing field {key!r}", self.line, self.col)
        return v


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.take()
        if t.text != text or t.kind == "str":
            raise JobError(f"expected {text!r}, found {t.text or 'end of file'!r}", t.line, t.col)
        return t

    def file(self) -> list[Block]:
        out = []
        while self.peek().kind != "end":
            out.append(self.block())
        return out

    def block(self) -> Block:
        t = self.take()
        if t.kind != "ident":
            raise JobError(f"expected a block keyword, found {t.text or 'end of file'!r}", t.line, t.col)
        name = None
        if self.peek().kind == "ident":
            name = self.take().text
        elif self.peek().text == "(":
            self.take()
            names = [self._ident()]
            while self.peek().text == ",":
                self.take()
                names.append(self._ident())
            self.expect(")")
            name = tuple(names)
        self.expect("{")
        b = Block(t.text, name, t.line, t.col)
        while self.peek().text != "}":
            if self.peek().kind == "end":
                raise JobError(f"unterminated block {t.text}", t.line, t.col)
            # a nested block starts with ident [ident | (..)] '{'
            nxt = self.peek(1)
            if self.peek().kind == "ident" and (nxt.text in ("{", "(") or nxt.kind == "ident"):
                b.blocks.append(self.block())
                continue
            key_tok = self.peek()
            key = self._key()
            self.expect("=")
            val = self.value()
            self.expect(";")
            if key in b.fields:
                raise JobError(f"duplicate field {key!r}", key_tok.line, key_tok.col)
            b.fields[key] = val
            b.positions[key] = (key_tok.line, key_tok.col)
        self.expect("}")
        return b

    def _ident(self) -> str:
        t = self.take()
        if t.kind != "ident":
            raise JobError(f"expected a name, found {t.text or 'end of file'!r}", t.line, t.col)
        return t.text

    def _key(self):
        name = self._ident()
        if self.peek().text == "[":
            self.take()
            t = self.take()
            if t.kind != "num" or "/" in t.text:
                raise JobError("index must be an integer", t.line, t.col)
            self.expect("]")
            return (name, int(t.text))
        return name

    def value(self) -> Value:
        first = self.atom()
        if self.peek().text != ",":
            return first
        items = [first]
        while self.peek().text == ",":
            self.take()
            items.append(self.atom())
        return Value("list", items, first.line, first.col)

    def atom(self) -> Value:
        t = self.take()
        if t.kind == "str":
            return Value("str", bytes(t.text[1:-1], "utf-8").decode("unicode_escape"), t.line, t.col)
        if t.kind == "num":
            q = Fraction(t.text)
            return Value("num", int(q) if q.denominator == 1 else q, t.line, t.col)
        if t.kind == "ident":
            return Value("ident", t.text, t.line, t.col)
        if t.text == "[":
            rows = []
            if self.peek().text == "[":
                while True:
                    self.expect("[")
                    row = []
                    if self.peek().text != "]":
                        row.append(self.atom())
                        while self.peek().text == ",":
                            self.take()
                            row.append(self.atom())
                    self.expect("]")
                    rows.append(row)
                    if self.peek().text != ",":
                        break
                    self.take()
            self.expect("]")
            return Value("matrix", rows, t.line, t.col)
        if t.text == "{":
            entries = {}
            while self.peek().text != "}":
                k = self._ident()
                a = self.take()
                if a.kind != "arrow":
                    raise JobError("expected '->'", a.line, a.col)
                entries[k] = self.atom()
                if self.peek().text == ",":
                    self.take()
            self.expect("}")
            return Value("map", entries, t.line, t.col)
        if t.text == "(":
            items = [self.atom()]
            while self.peek().text == ",":
                self.take()
                items.append(self.atom())
            self.expect(")")
            return Value("tuple", items, t.line, t.col)
        raise JobError(f"unexpected {t.text or 'end of file'!r}", t.line, t.col)


def parse_job(text: str) -> list[Block]:
    return _Parser(text).file()


# building objects ----------------------------------------------------------------------------

OBJECT_KINDS = ("algebra", "complex", "dgalgebra", "scheme", "witness")


@dataclass
class Job:
    objects: dict
    blocks: dict
    task: Block

    @property
    def task_name(self) -> str:
        return self.task.name

    def lookup(self, v: Value, kinds: tuple | None = None):
        if v.kind != "ident":
            raise JobError("expected the name of an object", v.line, v.col)
        obj = self.objects.get(v.data)
        if obj is None:
            raise JobError(f"unresolved reference {v.data!r}", v.line, v.col)
        if kinds and self.blocks[v.data].kind not in kinds:
            raise JobError(f"{v.data!r} is a {self.blocks[v.data].kind}, expected {' or '.join(kinds)}",
                           v.line, v.col)
        return obj


def _as_list(v: Value | None) -> list[Value]:
    if v is None:
        return []
    return v.data if v.kind == "list" else [v]


def _text(v: Value) -> str:
    if v.kind in ("str", "ident"):
        return v.data
    if v.kind == "num":
        return str(v.data)
    raise JobError("expected a string", v.line, v.col)


def _int(v: Value) -> int:
    if v.kind != "num" or not isinstance(v.data, int):
        raise JobError("expected an integer", v.line, v.col)
    return v.data


def _field(v: Value):
    try:
        return parse_field(_text(v))
    except ValueError as e:
        raise JobError(str(e), v.line, v.col)


def _elem(A: PolyAlgebra, v: Value):
    try:
        if v.kind == "num":
            return A.const(v.data)
        return A.parse(_text(v))
    except Exception as e:
        raise JobError(f"bad element {v.plain()!r}: {e}", v.line, v.col)


def _algebra_from(b: Block, F=None) -> PolyAlgebra:
    F = F or _field(b.require("field"))
    names = [_text(x) for x in _as_list(b.get("vars"))]
    rels = [_text(x) for x in _as_list(b.get("relations"))]
    order = _text(b.get("order")) if b.get("order") else "degrevlex"
    try:
        return PolyAlgebra(F, names, rels, order)
    except JobError:
        raise
    except Exception as e:
        raise JobError(f"algebra {b.name}: {e}", b.line, b.col)


class _Builder:
    def __init__(self, blocks: list[Block]):
        self.job = Job({}, {}, None)
        tasks = [b for b in blocks if b.kind == "task"]
        if not tasks:
            raise JobError("no task block")
        if len(tasks) > 1:
            raise JobError("more than one task block", tasks[1].line, tasks[1].col)
        self.job.task = tasks[0]
        if not isinstance(tasks[0].name, str):
            raise JobError("task needs a name", tasks[0].line, tasks[0].col)
        for b in blocks:
            if b.kind == "task":
                continue
            if b.kind not in OBJECT_KINDS:
                raise JobError(f"unknown block kind {b.kind!r}", b.line, b.col)
            if not isinstance(b.name, str):
                raise JobError(f"{b.kind} needs a name", b.line, b.col)
            if b.name in self.job.blocks:
                raise JobError(f"duplicate name {b.name!r}", b.line, b.col)
            self.job.blocks[b.name] = b
            try:
                self.job.objects[b.name] = getattr(self, "_" + b.kind)(b)
            except JobError:
                raise
            except Exception as e:
                raise JobError(f"{b.kind} {b.name}: {e}", b.line, b.col)

    def ref(self, v: Value, kinds=None):
        return self.job.lookup(v, kinds)

    def _algebra(self, b: Block):
        return _algebra_from(b)

    def _complex(self, b: Block):
        kind = _text(b.get("kind")) if b.get("kind") else "explicit"
        if kind in ("line-bundle", "structure-sheaf"):
            X = self.ref(b.require("on"), ("scheme",))
            n = _int(b.get("degree")) if b.get("degree") else 0
            return line_bundle(X, n if kind == "line-bundle" else 0)
        if kind == "direct-sum":
            parts = [self.ref(v, ("complex",)) for v in _as_list(b.require("parts"))]
            if all(isinstance(p, GluedComplex) for p in parts):
                return glued_direct_sum(*parts)
            if any(isinstance(p, GluedComplex) for p in parts):
                raise JobError("cannot add glued and plain complexes", b.line, b.col)
            return direct_sum(*parts)
        A = self.ref(b.require("over"), ("algebra",))
        if kind == "koszul":
            return koszul(A, [_elem(A, v) for v in _as_list(b.require("elements"))])
        if kind == "unit":
            return FreeComplex(A, 0, [1])
        if kind != "explicit":
            raise JobError(f"unknown complex kind {kind!r}", b.line, b.col)
        lo = _int(b.require("lo"))
        ranks = [_int(v) for v in _as_list(b.require("ranks"))]
        diffs = {}
        for key, v in b.fields.items():
            if isinstance(key, tuple) and key[0] == "d":
                if v.kind != "matrix":
                    raise JobError("differential must be a matrix", v.line, v.col)
                rows = [[_elem(A, x) for x in row] for row in v.data]
                i = key[1]
                ncols = ranks[i - lo] if lo <= i < lo + len(ranks) else 0
                diffs[i] = Matrix(A, rows, ncols)
        return FreeComplex(A, lo, ranks, diffs)

    def _dgalgebra(self, b: Block):
        kind = _text(b.require("kind"))
        if kind == "tensor":
            return tensor_dga(self.ref(b.require("left"), ("dgalgebra",)), self.ref(b.require("right"), ("dgalgebra",)))
        if kind == "opposite":
            return opposite(self.ref(b.require("of"), ("dgalgebra",)))
        if kind == "end":
            E = self.ref(b.require("complex"), ("complex",))
            if isinstance(E, GluedComplex):
                raise JobError("end of a glued complex: use the cech task", b.line, b.col)
            return end_dga(E)
        if kind == "quotient":
            return algebra_from_quotient(self.ref(b.require("ring"), ("algebra",)))
        A = self.ref(b.require("over"), ("algebra",))
        if kind == "unit":
            return unit_algebra(A)
        if kind == "zero":
            return zero_algebra(A)
        if kind == "matrix":
            return matrix_algebra(A, _int(b.require("n")))
        if kind == "product":
            return product_algebra(A, _int(b.require("n")))
        if kind == "quaternion":
            return quaternion_algebra(A, _elem(A, b.require("a")), _elem(A, b.require("b")))
        if kind == "dual-numbers":
            return dual_numbers(A)
        raise JobError(f"unknown dg-algebra kind {kind!r}", b.line, b.col)

    def _scheme(self, b: Block):
        kind = _text(b.get("kind")) if b.get("kind") else "patches"
        if kind == "p1":
            return projective_line(_field(b.get("field")) if b.get("field") else "Q")
        if kind == "affine":
            A = self.ref(b.require("algebra"), ("algebra",))
            w = [_int(x) for x in _as_list(b.get("weights"))] or None
            return GluedScheme({"U": A}, None, {"U": w} if w else None)
        patches, weights, overlap = {}, {}, None
        F = _field(b.require("field")) if b.get("field") else None
        for sub in b.blocks:
            if sub.kind == "patch":
                Fp = F or _field(sub.require("field"))
                F = Fp
                patches[sub.name] = _algebra_from(sub, Fp)
                if sub.get("weights") is not None:
                    weights[sub.name] = [_int(x) for x in _as_list(sub.get("weights"))]
            elif sub.kind == "overlap":
                overlap = sub
            else:
                raise JobError(f"unknown scheme block {sub.kind!r}", sub.line, sub.col)
        if not patches:
            raise JobError("scheme without patches", b.line, b.col)
        if overlap is None:
            return GluedScheme(patches, None, weights or None)
        if not isinstance(overlap.name, tuple) or list(overlap.name) != list(patches):
            raise JobError("overlap must name the two patches in order", overlap.line, overlap.col)
        U, V = overlap.name
        fwd = overlap.require("map")
        back = overlap.require("inverse")
        if fwd.kind != "map" or back.kind != "map":
            raise JobError("map and inverse must be mappings {var -> \"expr\"}", fwd.line, fwd.col)
        images = [_text(fwd.data[v]) if v in fwd.data else None for v in patches[U].variables]
        inverse = [_text(back.data[v]) if v in back.data else None for v in patches[V].variables]
        if None in images or None in inverse:
            raise JobError("every generator needs an image", fwd.line, fwd.col)
        data = {"f": (_text(overlap.require("f")), _text(overlap.require("g"))), "map": images, "inverse": inverse}
        return GluedScheme(patches, data, weights or None)

    def _witness(self, b: Block):
        kind = _text(b.get("kind")) if b.get("kind") else "right-ideal"
        if kind != "right-ideal":
            raise JobError(f"unknown witness kind {kind!r}", b.line, b.col)
        Bp = self.ref(b.require("target"), ("dgalgebra",))
        src = self.ref(b.get("source"), ("dgalgebra",)) if b.get("source") else unit_algebra(Bp.base)
        e = [_elem(Bp.base, v) for v in _as_list(b.require("idempotent"))]
        if len(e) != Bp.dim:
            raise JobError(f"idempotent needs {Bp.dim} coordinates", b.line, b.col)
        w = right_ideal_witness(Bp, e, src)
        if w is None:
            raise JobError("the given element does not define a right-ideal witness", b.line, b.col)
        return w


def load_job(text: str) -> Job:
    blocks = parse_job(text)
    if not blocks:
        raise JobError("empty job file")
    return _Builder(blocks).job
