r"""
Exact scalars, planar vectors and integer matrices.

Scalars are either :class:`fractions.Fraction` or :class:`QuadScalar`, an
element `a + b\sqrt{d}` of a fixed real quadratic field.  Mixing two different
fields is an error; a quadratic value whose irrational part vanishes mixes
freely with any field.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational
from typing import Iterable, Sequence, Union


class FieldMismatch(ValueError):
    """Raised when two quadratic scalars live in different fields."""


def squarefree_part(n: int) -> tuple[int, int]:
    r"""
    Return ``(s, f)`` with ``n = s * f**2`` and ``s`` square-free.

    >>> squarefree_part(12)
    (3, 2)
    """
    if n <= 0:
        raise ValueError("expected a positive integer")
    f = 1
    s = 1
    m = n
    p = 2
    while p * p <= m:
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        f *= p ** (e // 2)
        if e % 2:
            s *= p
        p += 1
    return s * m, f


class QuadScalar:
    r"""
    The number `(p + q\sqrt{d}) / r` with integers `p, q, r`, `r > 0`.

    Stored in lowest terms, so equality is structural.  When `q = 0` the value
    is rational; it then compares and hashes like the equal ``Fraction``.

    EXAMPLES::

        >>> s = QuadScalar(0, 1, 2)
        >>> s * s
        QuadScalar(2, 0, 2)
        >>> (s / 2) > Fraction(7, 10)
        True
    """

    __slots__ = ("_p", "_q", "_r", "d")

    def __init__(self, a=0, b=0, d: int = 1):
        a = Fraction(a)
        b = Fraction(b)
        if d <= 0:
            raise ValueError("d must be positive")
        s, f = squarefree_part(d)
        if s == 1:
            a, b, s = a + b * f, Fraction(0), 1
        else:
            b *= f
        r = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
        self._set(a.numerator * (r // a.denominator), b.numerator * (r // b.denominator), r, s)

    def _set(self, p: int, q: int, r: int, d: int) -> None:
        g = math.gcd(math.gcd(p, q), r)
        if g > 1:
            p //= g
            q //= g
            r //= g
        self._p, self._q, self._r, self.d = p, q, r, d

    @classmethod
    def _raw(cls, p: int, q: int, r: int, d: int) -> "QuadScalar":
        obj = cls.__new__(cls)
        if r < 0:
            p, q, r = -p, -q, -r
        obj._set(p, q, r, d)
        return obj

    @property
    def a(self) -> Fraction:
        return Fraction(self._p, self._r)

    @property
    def b(self) -> Fraction:
        return Fraction(self._q, self._r)

    def is_rational(self) -> bool:
        return self._q == 0

    def conjugate(self) -> "QuadScalar":
        return QuadScalar._raw(self._p, -self._q, self._r, self.d)

    def norm(self) -> Fraction:
        return Fraction(self._p * self._p - self._q * self._q * self.d, self._r * self._r)

    # coercion

    def _coerce(self, other) -> "QuadScalar | None":
        if isinstance(other, QuadScalar):
            if other.d == self.d or other._q == 0:
                return other if other.d == self.d else QuadScalar._raw(other._p, 0, other._r, self.d)
            if self._q == 0:
                return other
            raise FieldMismatch(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return QuadScalar._raw(other.numerator, 0, other.denominator, self.d)
        return None

    def _field(self, other: "QuadScalar") -> int:
        return self.d if self._q != 0 else other.d

    # arithmetic

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadScalar._raw(
            self._p * o._r + o._p * self._r, self._q * o._r + o._q * self._r, self._r * o._r, self._field(o)
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadScalar._raw(-self._p, -self._q, self._r, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._field(o)
        return QuadScalar._raw(
            self._p * o._p + self._q * o._q * d, self._p * o._q + self._q * o._p, self._r * o._r, d
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadScalar":
        n = self._p * self._p - self._q * self._q * self.d
        if n == 0:
            raise ZeroDivisionError("division by zero")
        # 1/((p + q s)/r) = r (p - q s) / (p^2 - q^2 d)
        return QuadScalar._raw(self._r * self._p, -self._r * self._q, n, self.d)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadScalar._raw(1, 0, 1, self.d)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # order

    def sign(self) -> int:
        p, q = self._p, self._q
        sp = (p > 0) - (p < 0)
        sq = (q > 0) - (q < 0)
        if sq == 0:
            return sp
        if sp == 0 or sp == sq:
            return sq
        # opposite signs: compare p^2 with q^2 d
        c = p * p - q * q * self.d
        return sp if c > 0 else sq

    def __eq__(self, other):
        if isinstance(other, float):
            return NotImplemented
        try:
            o = self._coerce(other)
        except FieldMismatch:
            return False
        if o is None:
            return NotImplemented
        return self._p * o._r == o._p * self._r and self._q * o._r == o._q * self._r

    def __hash__(self):
        if self._q == 0:
            return hash(Fraction(self._p, self._r))
        return hash((self._p, self._q, self._r, self.d))

    def __lt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is None else (self - o).sign() >= 0

    def __bool__(self):
        return self._p != 0 or self._q != 0

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __floor__(self) -> int:
        # floor(X / r) = floor(floor(X) / r) for r > 0, X = p + q sqrt(d)
        p, q, r = self._p, self._q, self._r
        root = math.isqrt(q * q * self.d)
        if q >= 0:
            fq = root
        else:
            fq = -root - (0 if root * root == q * q * self.d else 1)
        return (p + fq) // r

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __repr__(self):
        return f"QuadScalar({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, QuadScalar]


def qsqrt(n, d: int | None = None) -> Scalar:
    r"""
    Exact square root of a non-negative rational ``n``.

    Returns a ``Fraction`` when the root is rational and a ``QuadScalar``
    otherwise.
    """
    n = Fraction(n)
    if n < 0:
        raise ValueError("square root of a negative number")
    if n == 0:
        return Fraction(0)
    # sqrt(p/q) = sqrt(p q) / q
    m = n.numerator * n.denominator
    s, f = squarefree_part(m)
    if s == 1:
        return Fraction(f, n.denominator)
    return QuadScalar(0, Fraction(f, n.denominator), s)


def field_of(values: Iterable) -> int:
    r"""
    Return the common field tag of ``values`` (1 for the rationals).

    Raises :class:`FieldMismatch` on two different irrational fields.
    """
    d = 1
    for v in values:
        if isinstance(v, QuadScalar) and not v.is_rational():
            if d not in (1, v.d):
                raise FieldMismatch(f"cannot mix sqrt({d}) and sqrt({v.d})")
            d = v.d
    return d


def normalize(x) -> Scalar:
    """Collapse rational quadratic values to ``Fraction``."""
    if isinstance(x, QuadScalar):
        return x.a if x.is_rational() else x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    raise TypeError(f"not an exact scalar: {x!r}")


def scalar_cmp(a, b) -> int:
    """Exact trichotomy; mixed incompatible fields raise ``FieldMismatch``."""
    if isinstance(a, float) or isinstance(b, float):
        raise TypeError("floats are not exact scalars")
    diff = normalize(a) - normalize(b)
    if isinstance(diff, QuadScalar):
        return diff.sign()
    return (diff > 0) - (diff < 0)


def sign(x) -> int:
    return scalar_cmp(x, 0)


def floor(x) -> int:
    return math.floor(x)


def format_scalar(x) -> str:
    r"""
    Human readable form, e.g. ``-1/2 + 1/2*sqrt(5)``.
    """
    x = normalize(x)
    if isinstance(x, Fraction):
        return str(x)
    a, b = x.a, x.b
    root = f"sqrt({x.d})"
    if b == 1:
        irr = root
    elif b == -1:
        irr = f"-{root}"
    else:
        irr = f"{b}*{root}"
    if a == 0:
        return irr
    if irr.startswith("-"):
        return f"{a} - {irr[1:]}"
    return f"{a} + {irr}"


def scalar_to_json(x) -> dict:
    x = normalize(x)
    if isinstance(x, Fraction):
        return {"q": str(x)}
    return {"a": str(x.a), "b": str(x.b), "d": x.d}


def scalar_from_json(obj) -> Scalar:
    if isinstance(obj, dict):
        if "q" in obj:
            return Fraction(str(obj["q"]))
        return normalize(QuadScalar(Fraction(str(obj["a"])), Fraction(str(obj["b"])), int(obj["d"])))
    if isinstance(obj, (int, str)):
        return parse_scalar(str(obj))
    raise ValueError(f"cannot decode scalar from {obj!r}")


class ScalarSyntaxError(ValueError):
    pass


def parse_scalar(text: str) -> Scalar:
    r"""
    Parse an exact scalar expression.

    Accepts integers, decimals (read exactly, ``1.3`` is ``13/10``), ``p/q``,
    ``sqrt(n)``, the four operations, integer powers and parentheses.

    >>> parse_scalar("(sqrt(5)-1)/2")
    QuadScalar(-1/2, 1/2, 5)
    >>> parse_scalar("1.3")
    Fraction(13, 10)
    """
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ScalarSyntaxError(f"cannot parse scalar {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            segment = ast.get_source_segment(text.strip(), node)
            return Fraction(segment)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = ev(node.right)
                if not (isinstance(e, Fraction) and e.denominator == 1):
                    raise ScalarSyntaxError("exponents must be integers")
                return ev(node.left) ** int(e)
            ops = {ast.Add: lambda x, y: x + y, ast.Sub: lambda x, y: x - y,
                   ast.Mult: lambda x, y: x * y, ast.Div: lambda x, y: x / y}
            for op_type, fn in ops.items():
                if isinstance(node.op, op_type):
                    return fn(ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
                and len(node.args) == 1 and not node.keywords):
            arg = normalize(ev(node.args[0]))
            if not isinstance(arg, Fraction):
                raise ScalarSyntaxError("sqrt takes a rational argument")
            return qsqrt(arg)
        raise ScalarSyntaxError(f"unsupported syntax in {text!r}")

    try:
        return normalize(ev(tree))
    except ZeroDivisionError as exc:
        raise ScalarSyntaxError(f"division by zero in {text!r}") from exc


# planar vectors


@dataclass(frozen=True)
class Vec:
    r"""
    A planar vector with exact coordinates; ``x`` is the (signed) width and
    ``y`` the (signed) height.
    """

    x: Scalar
    y: Scalar

    def __add__(self, other: "Vec") -> "Vec":
        return Vec(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec") -> "Vec":
        return Vec(self.x - other.x, self.y - other.y)

    def __neg__(self) -> "Vec":
        return Vec(-self.x, -self.y)

    def __mul__(self, c) -> "Vec":
        return Vec(self.x * c, self.y * c)

    __rmul__ = __mul__

    def cross(self, other: "Vec") -> Scalar:
        return self.x * other.y - self.y * other.x

    def dot(self, other: "Vec") -> Scalar:
        return self.x * other.x + self.y * other.y

    def norm2(self) -> Scalar:
        return self.x * self.x + self.y * self.y

    def rot90(self) -> "Vec":
        """Multiplication by `i`."""
        return Vec(-self.y, self.x)

    def normalized(self) -> "Vec":
        return Vec(normalize(self.x), normalize(self.y))

    def __iter__(self):
        yield self.x
        yield self.y

    def __float__(self):
        raise TypeError

    def to_floats(self) -> tuple[float, float]:
        return float(self.x), float(self.y)

    def __str__(self):
        return f"({format_scalar(self.x)}, {format_scalar(self.y)})"


def vec(x, y) -> Vec:
    return Vec(normalize(x), normalize(y))


def vec_to_json(v: Vec) -> list:
    return [scalar_to_json(v.x), scalar_to_json(v.y)]


def vec_from_json(obj) -> Vec:
    return Vec(scalar_from_json(obj[0]), scalar_from_json(obj[1]))


# integer matrices


class IntMatrix:
    r"""
    Dense square integer matrix, immutable.

    When the size is `2k` the rows and columns are indexed by the wedge
    alphabet `(1,\ell), (1,r), \ldots, (k,\ell), (k,r)`.
    """

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence[int]]):
        rows = tuple(tuple(int(v) for v in row) for row in rows)
        n = len(rows)
        if any(len(row) != n for row in rows):
            raise ValueError("matrix must be square")
        self.rows = rows

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, IntMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.rows]})"

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            cols = list(zip(*other.rows))
            return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in cols] for row in self.rows])
        return NotImplemented

    def __mul__(self, c: int) -> "IntMatrix":
        return IntMatrix([[c * v for v in row] for row in self.rows])

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __pow__(self, e: int) -> "IntMatrix":
        if e < 0:
            return self.inverse() ** (-e)
        result = IntMatrix.identity(self.n)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def transpose(self) -> "IntMatrix":
        return IntMatrix(list(zip(*self.rows)))

    def apply(self, v: Sequence):
        """Matrix-vector product for any vector of ring elements."""
        out = []
        for row in self.rows:
            acc = None
            for a, x in zip(row, v):
                if a:
                    term = x * a if a != 1 else x
                    acc = term if acc is None else acc + term
            out.append(acc if acc is not None else v[0] * 0)
        return out

    def det(self) -> int:
        """Bareiss fraction-free elimination."""
        m = [list(r) for r in self.rows]
        n = self.n
        sgn = 1
        prev = 1
        for k in range(n - 1):
            if m[k][k] == 0:
                for i in range(k + 1, n):
                    if m[i][k] != 0:
                        m[k], m[i] = m[i], m[k]
                        sgn = -sgn
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            prev = m[k][k]
        return sgn * m[n - 1][n - 1] if n else 1

    def inverse(self) -> "IntMatrix":
        """Inverse of a unimodular matrix; raises if not integral."""
        inv = rational_inverse([[Fraction(v) for v in row] for row in self.rows])
        if any(v.denominator != 1 for row in inv for v in row):
            raise ValueError("matrix is not unimodular")
        return IntMatrix([[int(v) for v in row] for row in inv])

    def is_nonnegative(self) -> bool:
        return all(v >= 0 for row in self.rows for v in row)


def rational_inverse(m: list[list]) -> list[list]:
    """Gauss-Jordan inverse over any exact field."""
    n = len(m)
    a = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [v / p for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [row[n:] for row in a]


def nullspace(m: list[list]) -> list[list]:
    """Basis of the right kernel over an exact field (reduced row echelon)."""
    rows = [list(r) for r in m]
    if not rows:
        return []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -rows[i][f]
        basis.append(v)
    return basis


def mat_is_primitive(m: IntMatrix) -> bool:
    r"""
    Whether some power `M^n` with `n \le (\dim-1)^2 + 1` is strictly positive.

    Only the zero pattern matters, so powers are taken over booleans.
    """
    if not m.is_nonnegative():
        raise ValueError("primitivity is defined for non-negative matrices")
    n = m.n
    pattern = [[v > 0 for v in row] for row in m.rows]
    cols = [[pattern[i][j] for i in range(n)] for j in range(n)]
    power = pattern
    for _ in range((n - 1) ** 2 + 1):
        if all(all(row) for row in power):
            return True
        power = [[any(a and b for a, b in zip(row, col)) for col in cols] for row in power]
    return False


def charpoly(m: IntMatrix) -> list[int]:
    r"""
    Characteristic polynomial `\det(xI - M)` by Faddeev-LeVerrier.

    Coefficients from the leading one down: ``[1, c_1, ..., c_n]``.
    """
    n = m.n
    a = m.rows
    coeffs = [1]
    am = [[0] * n for _ in range(n)]  # A M_{k-1}, with M_0 = 0
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{k-1} I stays integral; the trace division is exact
        mk = [row[:] for row in am]
        for i in range(n):
            mk[i][i] += coeffs[-1]
        am = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        tr = -sum(am[i][i] for i in range(n))
        if tr % k:
            raise ArithmeticError("non-integral Faddeev-LeVerrier step")
        coeffs.append(tr // k)
    return coeffs


def poly_eval(coeffs: Sequence[int], x):
    acc = x * 0
    for c in coeffs:
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class PFData:
    r"""
    Certified leading eigen-data of a primitive matrix.

    ``lower <= eigenvalue <= upper`` holds exactly, and the characteristic
    polynomial changes sign on ``[lower, upper]``.
    """

    lower: Fraction
    upper: Fraction
    eigenvector: tuple[float, ...]
    charpoly: tuple[int, ...]

    @property
    def eigenvalue(self) -> float:
        return float((self.lower + self.upper) / 2)

    @property
    def radius(self) -> float:
        return float((self.upper - self.lower) / 2)


DEFAULT_TOLERANCE = Fraction(1, 2**60)


def pf_leading(m: IntMatrix, tolerance: Fraction = DEFAULT_TOLERANCE) -> PFData:
    r"""
    Perron-Frobenius eigenvalue bracket, eigenvector and characteristic
    polynomial of a primitive matrix.

    Repeated squaring of exact integer powers drives a positive vector toward
    the PF direction; Collatz-Wielandt ratios bracket the eigenvalue and
    bisection on the characteristic polynomial narrows the bracket.

    EXAMPLES::

        >>> d = pf_leading(IntMatrix([[2, 1], [1, 1]]))
        >>> round(d.eigenvalue, 10)
        2.6180339887
    """
    if not mat_is_primitive(m):
        raise ValueError("pf_leading needs a primitive matrix")
    n = m.n
    cp = charpoly(m)
    p = m ** ((n - 1) ** 2 + 1)  # strictly positive
    lo = hi = None
    v = None
    for _ in range(256):
        v = p.apply([1] * n)
        mv = m.apply(v)
        ratios = [Fraction(a, b) for a, b in zip(mv, v)]
        lo, hi = min(ratios), max(ratios)
        if hi - lo <= tolerance:
            break
        p = p @ p
        shift = max(max(row) for row in p.rows).bit_length() - 512
        if shift > 0:
            # any positive vector keeps the Collatz-Wielandt bracket valid
            p = IntMatrix([[max(1, x >> shift) for x in row] for row in p.rows])
    else:
        raise ArithmeticError("power iteration did not converge")
    if not _sign_change(cp, lo, hi):
        raise ArithmeticError("bracket does not isolate a root of the characteristic polynomial")
    return PFData(lo, hi, _unit(v), tuple(cp))


def _sign_change(cp, lo, hi) -> bool:
    a, b = poly_eval(cp, lo), poly_eval(cp, hi)
    return a == 0 or b == 0 or (a > 0) != (b > 0)


def _unit(v) -> tuple[float, ...]:
    total = sum(v)
    return tuple(float(Fraction(x, total)) for x in v)


# exact eigen-data over quadratic fields


def _quadratic_factors(cp: Sequence[int]):
    """Irreducible integer factors of degree <= 2, via sympy."""
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly(list(cp), x)
    _, factors = sympy.factor_list(poly)
    return [(list(int(c) for c in f.all_coeffs()), mult) for f, mult in factors]


def algebraic_root(factor: Sequence[int], approx: float) -> Scalar:
    """The real root of a linear or quadratic integer polynomial nearest ``approx``."""
    if len(factor) == 2:
        a, b = factor
        return Fraction(-b, a)
    if len(factor) != 3:
        raise ValueError("only degree <= 2 is exact")
    a, b, c = factor
    disc = b * b - 4 * a * c
    r = qsqrt(disc)
    roots = [(-b + r) / (2 * a), (-b - r) / (2 * a)]
    return normalize(min(roots, key=lambda z: abs(float(z) - approx)))


@dataclass(frozen=True)
class ExactPF:
    eigenvalue: Scalar
    eigenvector: tuple
    minpoly: tuple[int, ...]


def pf_exact(m: IntMatrix, pf: PFData | None = None) -> ExactPF | None:
    r"""
    Exact PF eigenvalue and eigenvector when the eigenvalue has degree at most
    two; ``None`` otherwise.  The eigenvector is positive with unit 1-norm.
    """
    pf = pf or pf_leading(m)
    for factor, _ in _quadratic_factors(pf.charpoly):
        if len(factor) > 3:
            continue
        try:
            rho = algebraic_root(factor, pf.eigenvalue)
        except ValueError:
            continue
        if not (pf.lower <= rho <= pf.upper):
            continue
        n = m.n
        shifted = [[Fraction(m[i, j]) - (rho if i == j else 0) for j in range(n)] for i in range(n)]
        shifted = [[normalize(v) for v in row] for row in shifted]
        basis = nullspace(shifted)
        if len(basis) != 1:
            raise ArithmeticError("PF eigenspace is not one-dimensional")
        v = [normalize(x) for x in basis[0]]
        total = sum(v, Fraction(0))
        v = tuple(normalize(x / total) for x in v)
        if any(sign(x) <= 0 for x in v):
            raise ArithmeticError("PF eigenvector is not positive")
        return ExactPF(rho, v, tuple(factor))
    return None


def lcm_many(values: Iterable[int]) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), values, 1)


def is_rational_like(x) -> bool:
    return isinstance(x, (int, Fraction, Rational)) or (isinstance(x, QuadScalar) and x.is_rational())
