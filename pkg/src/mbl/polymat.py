"""Dense exact matrices, matrix polynomials, truncated Laurent tails and block matrices.

Sizes are tiny (N <= 4, degrees around 20), so everything is dense and
immutable.  Linear solves use fraction-free (Bareiss) elimination.
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .errors import ShapeError, SingularMatrix
from .exactnum import ONE, ZERO, GaussianRational, as_gr, format_scalar, parse_scalar

__all__ = [
    "MatrixGR",
    "MatPoly",
    "LaurentTail",
    "BlockMatrix",
    "BlockMat2",
    "bareiss_solve",
    "mat_inverse",
    "commutator",
    "matpoly_arith",
    "matpoly_derivative",
    "j_block",
]


def _lcm(a: int, b: int) -> int:
    from math import gcd

    return a // gcd(a, b) * b


class MatrixGR:
    """Row-major dense matrix of :class:`GaussianRational` entries."""

    __slots__ = ("n_rows", "n_cols", "entries", "_hash")

    def __init__(self, n_rows: int, n_cols: int, entries: Iterable):
        entries = tuple(as_gr(e) for e in entries)
        if n_rows <= 0 or n_cols <= 0 or len(entries) != n_rows * n_cols:
            raise ShapeError(f"{n_rows}x{n_cols} matrix cannot hold {len(entries)} entries")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.entries = entries
        self._hash = None

    @classmethod
    def _raw(cls, n_rows, n_cols, entries: tuple) -> "MatrixGR":
        obj = object.__new__(cls)
        obj.n_rows = n_rows
        obj.n_cols = n_cols
        obj.entries = entries
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "MatrixGR":
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [e for r in rows for e in r])

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int | None = None) -> "MatrixGR":
        n_cols = n_rows if n_cols is None else n_cols
        return cls._raw(n_rows, n_cols, (ZERO,) * (n_rows * n_cols))

    @classmethod
    def identity(cls, n: int) -> "MatrixGR":
        return cls.scalar(n, ONE)

    @classmethod
    def scalar(cls, n: int, value) -> "MatrixGR":
        value = as_gr(value)
        return cls._raw(n, n, tuple(value if i == j else ZERO for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values: Sequence) -> "MatrixGR":
        n = len(values)
        vals = [as_gr(v) for v in values]
        return cls._raw(n, n, tuple(vals[i] if i == j else ZERO for i in range(n) for j in range(n)))

    # -- access -----------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.n_rows, self.n_cols)

    def __getitem__(self, ij) -> GaussianRational:
        i, j = ij
        return self.entries[i * self.n_cols + j]

    def rows(self) -> list[list[GaussianRational]]:
        c = self.n_cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.n_rows)]

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def is_scalar(self) -> bool:
        """True for multiples of the identity."""
        if not self.is_square():
            return False
        d = self.entries[0]
        n = self.n_cols
        return all(
            (e == d) if i == j else not e
            for k, e in enumerate(self.entries)
            for i, j in [divmod(k, n)]
        )

    # -- arithmetic ---------------------------------------------------------
    def _check_same(self, other: "MatrixGR"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, MatrixGR):
            return NotImplemented
        self._check_same(other)
        return MatrixGR._raw(self.n_rows, self.n_cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other):
        if not isinstance(other, MatrixGR):
            return NotImplemented
        self._check_same(other)
        return MatrixGR._raw(self.n_rows, self.n_cols, tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self):
        return MatrixGR._raw(self.n_rows, self.n_cols, tuple(-a for a in self.entries))

    def scale(self, s) -> "MatrixGR":
        s = as_gr(s)
        return MatrixGR._raw(self.n_rows, self.n_cols, tuple(s * a for a in self.entries))

    def __mul__(self, other):
        if isinstance(other, MatrixGR):
            return self.matmul(other)
        if isinstance(other, (MatPoly, LaurentTail, BlockMatrix)):
            return NotImplemented
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __rmul__(self, other):
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __matmul__(self, other):
        return self.matmul(other)

    def matmul(self, other: "MatrixGR") -> "MatrixGR":
        if self.n_cols != other.n_rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        n, m, p = self.n_rows, self.n_cols, other.n_cols
        a, b = self.entries, other.entries
        out = []
        for i in range(n):
            row = a[i * m:(i + 1) * m]
            for j in range(p):
                acc = ZERO
                for k in range(m):
                    x = row[k]
                    if x:
                        y = b[k * p + j]
                        if y:
                            acc = acc + x * y
                out.append(acc)
        return MatrixGR._raw(n, p, tuple(out))

    def transpose(self) -> "MatrixGR":
        n, m = self.n_rows, self.n_cols
        return MatrixGR._raw(m, n, tuple(self.entries[i * m + j] for j in range(m) for i in range(n)))

    @property
    def T(self) -> "MatrixGR":
        return self.transpose()

    def inverse(self) -> "MatrixGR":
        return mat_inverse(self)

    def det(self) -> GaussianRational:
        return bareiss_det(self)

    def __eq__(self, other):
        if not isinstance(other, MatrixGR):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n_rows, self.n_cols, self.entries))
        return self._hash

    def __repr__(self):
        body = "; ".join(", ".join(format_scalar(e) for e in r) for r in self.rows())
        return f"MatrixGR([{body}])"

    # -- encoding -------------------------------------------------------------
    def to_strings(self) -> list[str]:
        return [format_scalar(e) for e in self.entries]

    def to_json(self) -> dict:
        return {"shape": [self.n_rows, self.n_cols], "entries": self.to_strings()}

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixGR":
        n, m = obj["shape"]
        return cls(n, m, [parse_scalar(s) for s in obj["entries"]])


def commutator(a: MatrixGR, b: MatrixGR) -> MatrixGR:
    """``ab - ba``."""
    if not (a.is_square() and a.shape == b.shape):
        raise ShapeError(f"commutator needs equal square shapes, got {a.shape}, {b.shape}")
    return a.matmul(b) - b.matmul(a)


# -- fraction-free elimination ------------------------------------------------

def _integerize_rows(rows: list[list[GaussianRational]]) -> list[list[GaussianRational]]:
    """Scale each row by the lcm of its denominators so all entries are Gaussian integers."""
    out = []
    for r in rows:
        den = 1
        for e in r:
            den = _lcm(den, e.re.denominator)
            den = _lcm(den, e.im.denominator)
        out.append([e * den for e in r] if den != 1 else list(r))
    return out


def _bareiss_forward(rows: list[list[GaussianRational]], n_pivot_cols: int):
    """In-place Bareiss forward elimination on the first ``n_pivot_cols`` columns.

    Returns the sign of the applied row permutation.  Raises SingularMatrix
    with the failing stage.  With Gaussian-integer input every division below
    is exact in Z[i], so entries stay integral (they are minors of the input).
    """
    n = len(rows)
    width = len(rows[0])
    prev = ONE
    sign = 1
    for k in range(n_pivot_cols):
        if not rows[k][k]:
            for i in range(k + 1, n):
                if rows[i][k]:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                raise SingularMatrix(k)
        pivot = rows[k][k]
        rk = rows[k]
        for i in range(k + 1, n):
            ri = rows[i]
            lead = ri[k]
            for j in range(k + 1, width):
                v = pivot * ri[j] - lead * rk[j]
                ri[j] = v / prev if prev != ONE else v
            ri[k] = ZERO
        prev = pivot
    return sign


def bareiss_det(m: MatrixGR) -> GaussianRational:
    if not m.is_square():
        raise ShapeError("determinant of a non-square matrix")
    rows = m.rows()
    scale = ONE
    scaled = []
    for r in rows:
        den = 1
        for e in r:
            den = _lcm(_lcm(den, e.re.denominator), e.im.denominator)
        scale = scale * den
        scaled.append([e * den for e in r])
    try:
        sign = _bareiss_forward(scaled, m.n_rows)
    except SingularMatrix:
        return ZERO
    return scaled[-1][-1] * sign / scale


def bareiss_solve(a: MatrixGR, b: MatrixGR) -> MatrixGR:
    """Solve ``a x = b`` exactly by fraction-free elimination on ``[a | b]``."""
    if not a.is_square():
        raise ShapeError("coefficient matrix must be square")
    if a.n_rows != b.n_rows:
        raise ShapeError(f"right-hand side has {b.n_rows} rows, expected {a.n_rows}")
    n, p = a.n_rows, b.n_cols
    aug = [ra + rb for ra, rb in zip(a.rows(), b.rows())]
    aug = _integerize_rows(aug)
    _bareiss_forward(aug, n)
    # back substitution on the upper-triangular integral system
    x = [[ZERO] * p for _ in range(n)]
    for i in range(n - 1, -1, -1):
        row = aug[i]
        piv = row[i]
        for j in range(p):
            acc = row[n + j]
            for k in range(i + 1, n):
                if row[k]:
                    acc = acc - row[k] * x[k][j]
            x[i][j] = acc / piv
    return MatrixGR._raw(n, p, tuple(e for r in x for e in r))


def mat_inverse(m: MatrixGR) -> MatrixGR:
    if not m.is_square():
        raise ShapeError(f"cannot invert a {m.shape} matrix")
    n = m.n_rows
    if n == 1:
        e = m.entries[0]
        if not e:
            raise SingularMatrix(0)
        return MatrixGR._raw(1, 1, (e.inverse(),))
    return bareiss_solve(m, MatrixGR.identity(n))


# -- matrix polynomials --------------------------------------------------------

class MatPoly:
    """Matrix polynomial ``sum_k coeffs[k] z**k``; the zero polynomial has no coefficients."""

    __slots__ = ("shape", "coeffs")

    def __init__(self, coeffs: Iterable[MatrixGR], shape: tuple[int, int] | None = None):
        coeffs = list(coeffs)
        if shape is None:
            if not coeffs:
                raise ShapeError("zero polynomial needs an explicit shape")
            shape = coeffs[0].shape
        shape = tuple(shape)
        for c in coeffs:
            if c.shape != shape:
                raise ShapeError(f"coefficient of shape {c.shape} in {shape} polynomial")
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.shape = shape
        self.coeffs = tuple(coeffs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, n_rows: int, n_cols: int | None = None) -> "MatPoly":
        return cls([], (n_rows, n_rows if n_cols is None else n_cols))

    @classmethod
    def constant(cls, m: MatrixGR) -> "MatPoly":
        return cls([m], m.shape)

    @classmethod
    def monomial(cls, m: MatrixGR, k: int) -> "MatPoly":
        return cls([MatrixGR.zeros(*m.shape)] * k + [m], m.shape)

    @classmethod
    def z(cls, n: int = 1) -> "MatPoly":
        """``z I``."""
        return cls.monomial(MatrixGR.identity(n), 1)

    @classmethod
    def from_scalar_coeffs(cls, coeffs: Sequence) -> "MatPoly":
        """1x1 polynomial from a low-to-high scalar coefficient list."""
        return cls([MatrixGR(1, 1, [c]) for c in coeffs], (1, 1))

    @classmethod
    def scalar_times(cls, coeffs: Sequence, n: int) -> "MatPoly":
        """``p(z) I_n`` for a scalar polynomial ``p``."""
        return cls([MatrixGR.scalar(n, c) for c in coeffs], (n, n))

    @classmethod
    def from_entry_coeffs(cls, grid: Sequence[Sequence[Sequence]]) -> "MatPoly":
        """Build from ``grid[i][j]`` = low-to-high coefficients of entry ``(i, j)``."""
        n_rows, n_cols = len(grid), len(grid[0])
        deg = max(len(e) for row in grid for e in row) - 1
        coeffs = []
        for k in range(deg + 1):
            coeffs.append(MatrixGR(n_rows, n_cols, [
                row[j][k] if k < len(row[j]) else 0 for row in grid for j in range(n_cols)]))
        return cls(coeffs, (n_rows, n_cols))

    # -- queries ------------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, k: int) -> MatrixGR:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return MatrixGR.zeros(*self.shape)

    def leading(self) -> MatrixGR:
        if not self.coeffs:
            return MatrixGR.zeros(*self.shape)
        return self.coeffs[-1]

    def scalar_coeffs(self) -> list[GaussianRational]:
        if self.shape != (1, 1):
            raise ShapeError("scalar_coeffs needs a 1x1 polynomial")
        return [c.entries[0] for c in self.coeffs]

    def entry(self, i: int, j: int) -> list[GaussianRational]:
        return [c[i, j] for c in self.coeffs]

    # -- arithmetic -----------------------------------------------------------
    def _check_same(self, other: "MatPoly"):
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other):
        if isinstance(other, MatrixGR):
            other = MatPoly.constant(other)
        if not isinstance(other, MatPoly):
            return NotImplemented
        self._check_same(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return MatPoly([self.coeff(k) + other.coeff(k) for k in range(n)], self.shape)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, MatrixGR):
            other = MatPoly.constant(other)
        if not isinstance(other, MatPoly):
            return NotImplemented
        self._check_same(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return MatPoly([self.coeff(k) - other.coeff(k) for k in range(n)], self.shape)

    def __rsub__(self, other):
        if isinstance(other, MatrixGR):
            return MatPoly.constant(other) - self
        return NotImplemented

    def __neg__(self):
        return MatPoly([-c for c in self.coeffs], self.shape)

    def __mul__(self, other):
        if isinstance(other, MatPoly):
            return self._polymul(other)
        if isinstance(other, MatrixGR):
            if self.shape[1] != other.n_rows:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            return MatPoly([c.matmul(other) for c in self.coeffs], (self.shape[0], other.n_cols))
        if isinstance(other, (LaurentTail, BlockMatrix)):
            return NotImplemented
        try:
            s = as_gr(other)
        except TypeError:
            return NotImplemented
        return MatPoly([c.scale(s) for c in self.coeffs], self.shape)

    def __rmul__(self, other):
        if isinstance(other, MatrixGR):
            if other.n_cols != self.shape[0]:
                raise ShapeError(f"cannot multiply {other.shape} by {self.shape}")
            return MatPoly([other.matmul(c) for c in self.coeffs], (other.n_rows, self.shape[1]))
        try:
            s = as_gr(other)
        except TypeError:
            return NotImplemented
        return MatPoly([c.scale(s) for c in self.coeffs], self.shape)

    def _polymul(self, other: "MatPoly") -> "MatPoly":
        if self.shape[1] != other.shape[0]:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        shape = (self.shape[0], other.shape[1])
        if not self.coeffs or not other.coeffs:
            return MatPoly([], shape)
        out = [MatrixGR.zeros(*shape) for _ in range(len(self.coeffs) + len(other.coeffs) - 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + a.matmul(b)
        return MatPoly(out, shape)

    def mul_z(self, k: int = 1) -> "MatPoly":
        """Multiply by ``z**k`` (k >= 0)."""
        if not self.coeffs:
            return self
        return MatPoly([MatrixGR.zeros(*self.shape)] * k + list(self.coeffs), self.shape)

    def derivative(self) -> "MatPoly":
        return MatPoly([c.scale(k) for k, c in enumerate(self.coeffs) if k > 0], self.shape)

    def transpose(self) -> "MatPoly":
        return MatPoly([c.transpose() for c in self.coeffs], (self.shape[1], self.shape[0]))

    def evaluate(self, z) -> MatrixGR:
        z = as_gr(z)
        acc = MatrixGR.zeros(*self.shape)
        for c in reversed(self.coeffs):
            acc = acc.scale(z) + c
        return acc

    def __eq__(self, other):
        if isinstance(other, MatrixGR):
            other = MatPoly.constant(other)
        if not isinstance(other, MatPoly):
            return NotImplemented
        return self.shape == other.shape and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.shape, self.coeffs))

    def __repr__(self):
        if not self.coeffs:
            return f"MatPoly(0, shape={self.shape})"
        terms = [f"{c!r}*z^{k}" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return "MatPoly(" + " + ".join(terms) + ")"

    # -- encoding -------------------------------------------------------------
    def to_json(self) -> dict:
        return {"shape": list(self.shape), "coeffs": [c.to_strings() for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> "MatPoly":
        n, m = obj["shape"]
        return cls([MatrixGR(n, m, [parse_scalar(s) for s in c]) for c in obj["coeffs"]], (n, m))


def matpoly_arith(p: MatPoly, q: MatPoly, op: str) -> MatPoly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown operation {op!r}")


def matpoly_derivative(p: MatPoly) -> MatPoly:
    return p.derivative()


# -- truncated Laurent series -------------------------------------------------

class LaurentTail:
    """Matrix Laurent series in ``z`` known exactly for exponents ``>= known_from``.

    ``known_from is None`` marks an exact (finite) object.  Terms below
    ``known_from`` are unknown and never stored.  Arithmetic propagates the
    precision, so a residual's surviving coefficients are all trustworthy.
    """

    __slots__ = ("shape", "terms", "known_from")

    def __init__(self, terms: dict[int, MatrixGR], shape: tuple[int, int], known_from: int | None):
        shape = tuple(shape)
        clean = {}
        for e, c in terms.items():
            if c.shape != shape:
                raise ShapeError(f"term of shape {c.shape} in {shape} series")
            if c.is_zero():
                continue
            if known_from is not None and e < known_from:
                continue
            clean[e] = c
        self.shape = shape
        self.terms = clean
        self.known_from = known_from

    @classmethod
    def from_poly(cls, p: MatPoly) -> "LaurentTail":
        return cls({k: c for k, c in enumerate(p.coeffs)}, p.shape, None)

    @classmethod
    def from_matrix(cls, m: MatrixGR) -> "LaurentTail":
        return cls({0: m}, m.shape, None)

    @classmethod
    def coerce(cls, x) -> "LaurentTail":
        if isinstance(x, LaurentTail):
            return x
        if isinstance(x, MatPoly):
            return cls.from_poly(x)
        if isinstance(x, MatrixGR):
            return cls.from_matrix(x)
        raise TypeError(f"cannot treat {type(x).__name__} as a Laurent tail")

    # -- queries ------------------------------------------------------------
    def coeff(self, e: int) -> MatrixGR:
        if self.known_from is not None and e < self.known_from:
            raise ValueError(f"coefficient of z^{e} is below the known precision z^{self.known_from}")
        return self.terms.get(e, MatrixGR.zeros(*self.shape))

    @property
    def top(self) -> int | None:
        return max(self.terms) if self.terms else None

    def is_zero(self) -> bool:
        """No known nonzero coefficient (says nothing about the unknown tail)."""
        return not self.terms

    def nonzero_exponents(self) -> list[int]:
        return sorted(self.terms, reverse=True)

    def truncate_below(self, e: int) -> "LaurentTail":
        """Forget every term with exponent < e."""
        kf = e if self.known_from is None else max(e, self.known_from)
        return LaurentTail(self.terms, self.shape, kf)

    def polynomial_part(self) -> MatPoly:
        if self.known_from is not None and self.known_from > 0:
            raise ValueError("constant term is not known")
        top = self.top
        if top is None or top < 0:
            return MatPoly.zero(*self.shape)
        return MatPoly([self.coeff(k) for k in range(top + 1)], self.shape)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        try:
            o = LaurentTail.coerce(other)
        except TypeError:
            return NotImplemented
        if o.shape != self.shape:
            raise ShapeError(f"shape mismatch {self.shape} vs {o.shape}")
        kf = _max_prec(self.known_from, o.known_from)
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return LaurentTail(terms, self.shape, kf)

    __radd__ = __add__

    def __neg__(self):
        return LaurentTail({e: -c for e, c in self.terms.items()}, self.shape, self.known_from)

    def __sub__(self, other):
        try:
            o = LaurentTail.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = LaurentTail.coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (LaurentTail, MatPoly, MatrixGR)):
            return _series_mul(self, LaurentTail.coerce(other))
        if isinstance(other, BlockMatrix):
            return NotImplemented
        try:
            s = as_gr(other)
        except TypeError:
            return NotImplemented
        return LaurentTail({e: c.scale(s) for e, c in self.terms.items()}, self.shape, self.known_from)

    def __rmul__(self, other):
        if isinstance(other, (MatPoly, MatrixGR)):
            return _series_mul(LaurentTail.coerce(other), self)
        try:
            s = as_gr(other)
        except TypeError:
            return NotImplemented
        return LaurentTail({e: c.scale(s) for e, c in self.terms.items()}, self.shape, self.known_from)

    def mul_z(self, k: int = 1) -> "LaurentTail":
        kf = None if self.known_from is None else self.known_from + k
        return LaurentTail({e + k: c for e, c in self.terms.items()}, self.shape, kf)

    def derivative(self) -> "LaurentTail":
        kf = None if self.known_from is None else self.known_from - 1
        return LaurentTail({e - 1: c.scale(e) for e, c in self.terms.items() if e != 0}, self.shape, kf)

    def __repr__(self):
        kf = "exact" if self.known_from is None else f"O(z^{self.known_from - 1})"
        terms = [f"{self.terms[e]!r}*z^{e}" for e in self.nonzero_exponents()]
        return "LaurentTail(" + (" + ".join(terms) or "0") + f" + {kf})"

    def to_json(self) -> dict:
        exps = self.nonzero_exponents()
        return {
            "shape": list(self.shape),
            "known_from": self.known_from,
            "exponents": exps,
            "coeffs": [self.terms[e].to_strings() for e in exps],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LaurentTail":
        n, m = obj["shape"]
        terms = {
            e: MatrixGR(n, m, [parse_scalar(s) for s in c])
            for e, c in zip(obj["exponents"], obj["coeffs"])
        }
        return cls(terms, (n, m), obj["known_from"])


def _max_prec(a: int | None, b: int | None) -> int | None:
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def _series_mul(a: LaurentTail, b: LaurentTail) -> LaurentTail:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape} by {b.shape}")
    shape = (a.shape[0], b.shape[1])
    if (a.known_from is None and not a.terms) or (b.known_from is None and not b.terms):
        return LaurentTail({}, shape, None)
    # the unknown tail of one factor times the full other factor pollutes
    # every exponent below known_from + (largest exponent of the other factor)
    bounds = []
    if b.known_from is not None:
        bounds.append(b.known_from + _max_exponent(a))
    if a.known_from is not None:
        bounds.append(a.known_from + _max_exponent(b))
    kf = max(bounds) if bounds else None
    out: dict[int, MatrixGR] = {}
    for ea, ca in a.terms.items():
        for eb, cb in b.terms.items():
            e = ea + eb
            if kf is not None and e < kf:
                continue
            p = ca.matmul(cb)
            out[e] = out[e] + p if e in out else p
    return LaurentTail(out, shape, kf)


def _max_exponent(s: LaurentTail) -> int:
    if s.terms:
        return max(s.terms)
    return s.known_from - 1


# -- block matrices -------------------------------------------------------------

class BlockMatrix:
    """Rectangular grid of blocks (MatrixGR, MatPoly or LaurentTail) with block arithmetic."""

    __slots__ = ("blocks",)

    def __init__(self, blocks: Sequence[Sequence]):
        blocks = tuple(tuple(r) for r in blocks)
        if not blocks or any(len(r) != len(blocks[0]) for r in blocks):
            raise ShapeError("ragged block grid")
        self.blocks = blocks

    @property
    def grid(self) -> tuple[int, int]:
        return (len(self.blocks), len(self.blocks[0]))

    def __getitem__(self, ij):
        i, j = ij
        return self.blocks[i][j]

    def map(self, fn) -> "BlockMatrix":
        return type(self)([[fn(b) for b in r] for r in self.blocks])

    def __add__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return BlockMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return BlockMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return self.map(lambda b: -b)

    def __mul__(self, other):
        if isinstance(other, BlockMatrix):
            n, m = self.grid
            m2, p = other.grid
            if m != m2:
                raise ShapeError(f"block grids {self.grid} and {other.grid} do not chain")
            out = []
            for i in range(n):
                row = []
                for j in range(p):
                    acc = None
                    for k in range(m):
                        t = _block_mul(self.blocks[i][k], other.blocks[k][j])
                        acc = t if acc is None else _block_add(acc, t)
                    row.append(acc)
                out.append(row)
            return BlockMatrix(out)
        return self.map(lambda b: b * other)

    def __rmul__(self, other):
        return self.map(lambda b: other * b)

    def derivative(self) -> "BlockMatrix":
        return self.map(_block_derivative)

    def mul_z(self, k: int = 1) -> "BlockMatrix":
        return self.map(lambda b: _block_mul_z(b, k))

    def all_zero(self) -> bool:
        return all(_block_is_zero(b) for r in self.blocks for b in r)

    def assemble(self) -> MatPoly | LaurentTail:
        """Flatten into one matrix polynomial (or Laurent tail if any block is a series)."""
        blocks = [[b for b in r] for r in self.blocks]
        if any(isinstance(b, LaurentTail) for r in blocks for b in r):
            return _assemble_series(blocks)
        polys = [[b if isinstance(b, MatPoly) else MatPoly.constant(b) for b in r] for r in blocks]
        deg = max((p.degree for r in polys for p in r), default=-1)
        rows_h = [r[0].shape[0] for r in polys]
        cols_w = [p.shape[1] for p in polys[0]]
        coeffs = []
        for k in range(deg + 1):
            entries = []
            for bi, r in enumerate(polys):
                for ii in range(rows_h[bi]):
                    for bj, p in enumerate(r):
                        c = p.coeff(k)
                        entries.extend(c.entries[ii * c.n_cols:(ii + 1) * c.n_cols])
            coeffs.append(MatrixGR._raw(sum(rows_h), sum(cols_w), tuple(entries)))
        return MatPoly(coeffs, (sum(rows_h), sum(cols_w)))

    def __repr__(self):
        return f"BlockMatrix({self.blocks!r})"


BlockMat2 = BlockMatrix


def _assemble_series(blocks) -> LaurentTail:
    series = [[LaurentTail.coerce(b) for b in r] for r in blocks]
    kf = None
    exps = set()
    for r in series:
        for s in r:
            kf = _max_prec(kf, s.known_from)
            exps |= set(s.terms)
    rows_h = [r[0].shape[0] for r in series]
    cols_w = [s.shape[1] for s in series[0]]
    shape = (sum(rows_h), sum(cols_w))
    terms = {}
    for e in exps:
        if kf is not None and e < kf:
            continue
        entries = []
        for bi, r in enumerate(series):
            for ii in range(rows_h[bi]):
                for s in r:
                    c = s.terms.get(e) or MatrixGR.zeros(*s.shape)
                    entries.extend(c.entries[ii * c.n_cols:(ii + 1) * c.n_cols])
        terms[e] = MatrixGR._raw(shape[0], shape[1], tuple(entries))
    return LaurentTail(terms, shape, kf)


def _block_mul(a, b):
    if isinstance(a, LaurentTail) or isinstance(b, LaurentTail):
        return LaurentTail.coerce(a) * LaurentTail.coerce(b)
    if isinstance(a, MatrixGR) and isinstance(b, MatrixGR):
        return a.matmul(b)
    if isinstance(a, MatrixGR):
        return a * b  # MatPoly.__rmul__
    return a * b


def _block_add(a, b):
    if isinstance(a, LaurentTail) or isinstance(b, LaurentTail):
        return LaurentTail.coerce(a) + LaurentTail.coerce(b)
    if isinstance(a, MatPoly) or isinstance(b, MatPoly):
        pa = a if isinstance(a, MatPoly) else MatPoly.constant(a)
        return pa + b
    return a + b


def _block_derivative(b):
    if isinstance(b, MatrixGR):
        return MatPoly.zero(*b.shape)
    return b.derivative()


def _block_mul_z(b, k):
    if isinstance(b, MatrixGR):
        return MatPoly.monomial(b, k)
    return b.mul_z(k)


def _block_is_zero(b) -> bool:
    return b.is_zero()


def j_block(n: int) -> BlockMatrix:
    """``[[0, I], [-I, 0]]`` with N x N blocks."""
    i = MatrixGR.identity(n)
    o = MatrixGR.zeros(n)
    return BlockMatrix([[o, i], [-i, o]])
