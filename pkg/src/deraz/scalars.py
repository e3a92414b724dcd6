"""Exact scalar fields and dense linear algebra.

Two kinds of field are supported: the rationals (elements are
:class:`fractions.Fraction`) and prime fields ``F_p`` (elements are
:class:`FpElement`).  :class:`Matrix` is a dense row-major matrix whose
entries live in a *ring* object; any object with ``zero``, ``one``,
``__call__`` (conversion) and ``owns`` works, so the same class carries
matrices over polynomial quotient algebras.  Elimination routines
(:func:`rank`, :func:`kernel_basis`, :func:`solve`) require a field.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence


class FieldMismatch(ValueError):
    """Entries from different fields were combined."""


class ShapeError(ValueError):
    """Matrix/vector dimensions do not fit together."""


class FpElement:
    """Residue class modulo a prime, stored as an int in ``[0, p)``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other) -> int:
        if type(other) is FpElement:
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p} vs F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        raise FieldMismatch(f"cannot combine F_{self.p} element with {type(other).__name__}")

    def __add__(self, other):
        return FpElement(self.v + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpElement(self.v - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpElement(self._coerce(other) - self.v, self.p)

    def __mul__(self, other):
        return FpElement(self.v * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.v, self.p)

    def __pos__(self):
        return self

    def inverse(self) -> "FpElement":
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return FpElement(pow(self.v, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other) % self.p
        if o == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return FpElement(self.v * pow(o, self.p - 2, self.p), self.p)

    def __rtruediv__(self, other):
        return FpElement(self._coerce(other), self.p) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return FpElement(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        if type(other) is FpElement:
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return self.v == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"FpElement({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """Base class for the two supported exact fields."""

    characteristic: int = 0
    name: str = ""

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __call__(self, x):
        raise NotImplementedError

    def owns(self, x) -> bool:
        raise NotImplementedError

    def is_finite(self) -> bool:
        return self.characteristic != 0

    def elements(self) -> Iterator:
        raise ValueError(f"{self.name} is infinite")

    def __repr__(self):
        return self.name


class RationalField(Field):
    characteristic = 0
    name = "Q"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x.strip())
        if isinstance(x, FpElement):
            raise FieldMismatch("cannot convert an F_p element to Q")
        raise TypeError(f"cannot convert {x!r} to Q")

    def owns(self, x) -> bool:
        return isinstance(x, Fraction)

    def __reduce__(self):
        return (_rationals, ())


class PrimeField(Field):
    _cache: dict[int, "PrimeField"] = {}

    def __new__(cls, p: int):
        if p in cls._cache:
            return cls._cache[p]
        if p < 2 or p >= 2**31 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not a prime below 2^31")
        obj = super().__new__(cls)
        obj.characteristic = p
        obj.name = f"Fp({p})"
        cls._cache[p] = obj
        return obj

    def __getnewargs__(self):
        return (self.characteristic,)

    def __call__(self, x):
        p = self.characteristic
        if type(x) is FpElement:
            if x.p != p:
                raise FieldMismatch(f"F_{x.p} element given to F_{p}")
            return x
        if isinstance(x, int):
            return FpElement(x, p)
        if isinstance(x, Fraction):
            if x.denominator % p == 0:
                raise ZeroDivisionError(f"denominator of {x} vanishes mod {p}")
            return FpElement(x.numerator * pow(x.denominator, p - 2, p), p)
        if isinstance(x, str):
            return self(Fraction(x.strip()))
        raise TypeError(f"cannot convert {x!r} to F_{p}")

    def owns(self, x) -> bool:
        return type(x) is FpElement and x.p == self.characteristic

    def elements(self) -> Iterator[FpElement]:
        for v in range(self.characteristic):
            yield FpElement(v, self.characteristic)


QQ = RationalField()


def _rationals():
    return QQ


def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(text: str) -> Field:
    """Parse ``"Q"`` or ``"Fp(p)"``."""
    t = text.strip().replace(" ", "")
    if t in ("Q", "QQ"):
        return QQ
    if t.startswith("Fp(") and t.endswith(")"):
        return GF(int(t[3:-1]))
    if t.startswith("F") and t[1:].isdigit():
        return GF(int(t[1:]))
    raise ValueError(f"unknown field {text!r}")


def field_of(x) -> Field:
    if isinstance(x, Fraction):
        return QQ
    if type(x) is FpElement:
        return GF(x.p)
    raise TypeError(f"{x!r} is not a field element")


class Matrix:
    """Immutable dense matrix with entries in ``ring``."""

    __slots__ = ("ring", "nrows", "ncols", "_rows")

    def __init__(self, ring, rows: Iterable[Sequence], ncols: int | None = None, *, check: bool = True):
        if check:
            conv = ring.__call__
            owns = ring.owns
            data = []
            for row in rows:
                out = []
                for x in row:
                    if owns(x):
                        out.append(x)
                    elif isinstance(x, int) and not isinstance(x, bool):
                        out.append(conv(x))
                    elif isinstance(x, (str, Fraction)) or not isinstance(ring, Field):
                        out.append(conv(x))
                    else:
                        raise FieldMismatch(f"entry {x!r} does not belong to {ring!r}")
                data.append(tuple(out))
        else:
            data = [tuple(r) for r in rows]
        self.ring = ring
        self.nrows = len(data)
        if ncols is None:
            ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ShapeError("ragged matrix rows")
        self.ncols = ncols
        self._rows = tuple(data)

    @classmethod
    def zeros(cls, ring, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero
        return cls(ring, [[z] * ncols for _ in range(nrows)], ncols, check=False)

    @classmethod
    def identity(cls, ring, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return cls(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n, check=False)

    @classmethod
    def from_columns(cls, ring, nrows: int, columns: Sequence[Sequence]) -> "Matrix":
        return cls(ring, [[c[i] for c in columns] for i in range(nrows)], len(columns))

    @classmethod
    def from_dict(cls, ring, nrows: int, ncols: int, entries: dict) -> "Matrix":
        rows = [[ring.zero] * ncols for _ in range(nrows)]
        for (i, j), v in entries.items():
            rows[i][j] = v
        return cls(ring, rows, ncols, check=False)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def rows(self) -> tuple[tuple, ...]:
        return self._rows

    def row(self, i: int) -> tuple:
        return self._rows[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self._rows)

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Matrix":
        return Matrix(self.ring, [self.column(j) for j in range(self.ncols)], self.nrows, check=False)

    def _same_ring(self, other: "Matrix"):
        if other.ring is not self.ring:
            raise FieldMismatch(f"{self.ring!r} vs {other.ring!r}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} + {other.shape}")
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                      self.ncols, check=False)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.shape != other.shape:
            raise ShapeError(f"{self.shape} - {other.shape}")
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)],
                      self.ncols, check=False)

    def __neg__(self) -> "Matrix":
        return Matrix(self.ring, [[-a for a in r] for r in self._rows], self.ncols, check=False)

    def scale(self, c) -> "Matrix":
        return Matrix(self.ring, [[c * a for a in r] for r in self._rows], self.ncols, check=False)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_ring(other)
        if self.ncols != other.nrows:
            raise ShapeError(f"{self.shape} @ {other.shape}")
        zero = self.ring.zero
        cols = other.columns()
        out = []
        for r in self._rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for c in cols:
                s = zero
                for k, a in nz:
                    b = c[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Matrix(self.ring, out, other.ncols, check=False)

    def apply(self, v: Sequence) -> list:
        if len(v) != self.ncols:
            raise ShapeError(f"matrix with {self.ncols} columns applied to vector of length {len(v)}")
        zero = self.ring.zero
        out = []
        for r in self._rows:
            s = zero
            for a, b in zip(r, v):
                if a and b:
                    s = s + a * b
            out.append(s)
        return out

    def map(self, f, ring=None) -> "Matrix":
        ring = self.ring if ring is None else ring
        return Matrix(ring, [[f(a) for a in r] for r in self._rows], self.ncols, check=False)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, [[self._rows[i][j] for j in cols] for i in rows], len(cols), check=False)

    def is_zero(self) -> bool:
        return not any(a for r in self._rows for a in r)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.ring is other.ring and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, self._rows))

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self._rows)
        return f"Matrix<{self.ring!r}, {self.nrows}x{self.ncols}>[{body}]"

    def tolist(self) -> list[list]:
        return [list(r) for r in self._rows]


def hstack(ring, blocks: Sequence[Matrix], nrows: int | None = None) -> Matrix:
    if nrows is None:
        nrows = blocks[0].nrows if blocks else 0
    for b in blocks:
        if b.nrows != nrows:
            raise ShapeError("hstack row mismatch")
    rows = [sum((b._rows[i] for b in blocks), ()) for i in range(nrows)]
    return Matrix(ring, rows, sum(b.ncols for b in blocks), check=False)


def vstack(ring, blocks: Sequence[Matrix], ncols: int | None = None) -> Matrix:
    if ncols is None:
        ncols = blocks[0].ncols if blocks else 0
    rows = []
    for b in blocks:
        if b.ncols != ncols:
            raise ShapeError("vstack column mismatch")
        rows.extend(b._rows)
    return Matrix(ring, rows, ncols, check=False)


def block_matrix(ring, blocks: Sequence[Sequence[Matrix | None]], row_sizes, col_sizes) -> Matrix:
    """Assemble a block matrix; ``None`` blocks are zero."""
    z = ring.zero
    rows = []
    for bi, rs in enumerate(row_sizes):
        for i in range(rs):
            row = []
            for bj, cs in enumerate(col_sizes):
                b = blocks[bi][bj]
                if b is None:
                    row.extend([z] * cs)
                else:
                    if b.shape != (rs, cs):
                        raise ShapeError(f"block ({bi},{bj}) has shape {b.shape}, expected {(rs, cs)}")
                    row.extend(b._rows[i])
            rows.append(row)
    return Matrix(ring, rows, sum(col_sizes), check=False)


def _require_field(M: Matrix) -> Field:
    if not isinstance(M.ring, Field):
        raise TypeError(f"elimination needs a field, got {M.ring!r}")
    return M.ring


def rref(M: Matrix) -> tuple[list[list], list[int]]:
    """Reduced row echelon form with first-nonzero pivoting.

    Returns the nonzero rows of the echelon form and the pivot columns.
    """
    _require_field(M)
    rows = [list(r) for r in M._rows]
    pivots: list[int] = []
    r = 0
    n, m = M.nrows, M.ncols
    for c in range(m):
        piv = next((i for i in range(r, n) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        prow = [a * inv for a in rows[r]]
        rows[r] = prow
        nzc = [j for j in range(c, m) if prow[j]]
        for i in range(n):
            if i != r:
                f = rows[i][c]
                if f:
                    ri = rows[i]
                    for j in nzc:
                        ri[j] = ri[j] - f * prow[j]
        pivots.append(c)
        r += 1
        if r == n:
            break
    return rows[:r], pivots


def rank(M: Matrix) -> int:
    return len(rref(M)[1])


def kernel_basis(M: Matrix) -> Matrix:
    """Columns of the returned ``ncols x k`` matrix form a basis of ``ker M``."""
    F = _require_field(M)
    R, pivots = rref(M)
    free = [c for c in range(M.ncols) if c not in set(pivots)]
    cols = []
    for f in free:
        v = [F.zero] * M.ncols
        v[f] = F.one
        for row, pc in zip(R, pivots):
            if row[f]:
                v[pc] = -row[f]
        cols.append(v)
    return Matrix.from_columns(F, M.ncols, cols) if cols else Matrix(F, [[] for _ in range(M.ncols)], 0)


def solve(M: Matrix, b: Sequence) -> list | None:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent."""
    F = _require_field(M)
    if len(b) != M.nrows:
        raise ShapeError(f"{M.nrows} equations but right-hand side of length {len(b)}")
    aug = Matrix(F, [list(r) + [F(x) if not F.owns(x) else x] for r, x in zip(M._rows, b)], M.ncols + 1)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == M.ncols:
        return None
    x = [F.zero] * M.ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[M.ncols]
    return x


def rank_of_columns(field: Field, columns: Iterable[dict]) -> int:
    """Rank of a matrix given column-wise as ``{row: value}`` dictionaries.

    Structure maps of large matrix-like algebras are extremely sparse and
    split into many independent blocks, so the columns are grouped into
    connected components of the row/column incidence graph and each
    component is eliminated on its own.
    """
    cols = [{k: v for k, v in c.items() if v} for c in columns]
    cols = [c for c in cols if c]
    parent: dict = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in cols:
        keys = iter(c)
        r0 = find(next(keys))
        for k in keys:
            rk = find(k)
            if rk != r0:
                parent[rk] = r0
    groups: dict = {}
    for c in cols:
        groups.setdefault(find(next(iter(c))), []).append(c)
    return sum(_sparse_rank(field, g) for g in groups.values())


def _sparse_rank(field: Field, cols: list[dict]) -> int:
    pivots: dict = {}  # row index -> reduced column with that leading row
    r = 0
    for c in cols:
        c = dict(c)
        while c:
            lead = min(c)
            p = pivots.get(lead)
            if p is None:
                inv = 1 / c[lead]
                pivots[lead] = {k: v * inv for k, v in c.items()}
                r += 1
                break
            f = c[lead]
            for k, v in p.items():
                nv = c.get(k, field.zero) - f * v
                if nv:
                    c[k] = nv
                else:
                    c.pop(k, None)
    return r
