"""Exact Gaussian-rational scalars, linear algebra and univariate polynomials.

Everything here is exact: no floating point enters unless a caller asks for
``complex(x)``.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence


class GaussQ:
    """An element re + i*im of Q(i) with Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussQ":
        if isinstance(x, GaussQ):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        if isinstance(x, float):
            return cls(Fraction(x))
        if isinstance(x, str):
            return parse_gaussq(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussQ")

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return GaussQ(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        if not o.im:
            return GaussQ(self.re * o.re, self.im * o.re)
        if not self.im:
            return GaussQ(self.re * o.re, self.re * o.im)
        return GaussQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return GaussQ(-self.re, -self.im)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "GaussQ":
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("GaussQ division by zero")
        return GaussQ(self.re / n, -self.im / n)

    def conjugate(self) -> "GaussQ":
        return GaussQ(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    # comparisons ------------------------------------------------------------
    def __eq__(self, other):
        o = _maybe(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def sort_key(self):
        return (self.re, self.im)

    # conversions ------------------------------------------------------------
    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        if not self.im:
            return f"GaussQ({self.re})"
        return f"GaussQ({self.re}, {self.im})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        # parseable by parse_exppoly and sympy
        if not self.re:
            return f"({self.im}*I)"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*I)"

    def to_json(self) -> dict:
        return {
            "re_num": self.re.numerator,
            "re_den": self.re.denominator,
            "im_num": self.im.numerator,
            "im_den": self.im.denominator,
        }

    @classmethod
    def from_json(cls, obj) -> "GaussQ":
        if isinstance(obj, dict):
            if "re_num" in obj:
                return cls(
                    Fraction(obj["re_num"], obj.get("re_den", 1)),
                    Fraction(obj.get("im_num", 0), obj.get("im_den", 1)),
                )
            return cls(_parse_fraction(obj.get("re", 0)), _parse_fraction(obj.get("im", 0)))
        return cls.coerce(obj)

    def to_short_json(self) -> dict:
        """The ``{re, im}`` form, with exact strings for non-integers."""
        return {"re": _fraction_out(self.re), "im": _fraction_out(self.im)}


ZERO = GaussQ(0)
ONE = GaussQ(1)
I = GaussQ(0, 1)


def _maybe(x):
    if isinstance(x, GaussQ):
        return x
    if isinstance(x, (int, Rational)):
        return GaussQ(x)
    return None


def _parse_fraction(x) -> Fraction:
    if isinstance(x, float):
        # decimal literal from JSON, read as written
        return Fraction(repr(x))
    return Fraction(x)


def _fraction_out(x: Fraction):
    if x.denominator == 1:
        return x.numerator
    return f"{x.numerator}/{x.denominator}"


def parse_gaussq(text: str) -> GaussQ:
    """Parse strings such as ``"3/2"``, ``"-i"``, ``"1/2-3/4i"`` or ``"(1/2 - 3/4*I)"``."""
    t = text.replace(" ", "").replace("j", "i").replace("*I", "i").replace("I", "i")
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    if not t.endswith("i"):
        return GaussQ(Fraction(t))
    body = t[:-1]
    # split at the last sign that is not a leading sign or exponent marker
    cut = max(body.rfind("+"), body.rfind("-"))
    if cut <= 0:
        re_part, im_part = "0", body
    else:
        re_part, im_part = body[:cut], body[cut:]
    if im_part in ("", "+"):
        im_part = "1"
    elif im_part == "-":
        im_part = "-1"
    return GaussQ(Fraction(re_part), Fraction(im_part))


def gq(x) -> GaussQ:
    return GaussQ.coerce(x)


# ---------------------------------------------------------------------------
# exact linear algebra over Q(i)
# ---------------------------------------------------------------------------

Vector = list  # list[GaussQ]


def rref(rows: Sequence[Sequence], ncols: int | None = None, column_order: Sequence[int] | None = None):
    """Reduced row echelon form.

    ``column_order`` gives the order in which columns are scanned for pivots
    (default left to right).  Returns ``(rows, pivots)`` with ``pivots[i]`` the
    pivot column of ``rows[i]``.
    """
    mat = [[gq(x) for x in r] for r in rows]
    if not mat:
        return [], []
    if ncols is None:
        ncols = len(mat[0])
    order = list(range(ncols)) if column_order is None else list(column_order)
    pivots: list[int] = []
    r = 0
    for c in order:
        if r == len(mat):
            break
        p = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        inv = mat[r][c].inverse()
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                ri = mat[r]
                mat[i] = [a - f * b if b else a for a, b in zip(mat[i], ri)]
        pivots.append(c)
        r += 1
    return mat[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    rows = [r for r in rows]
    if not rows:
        return 0
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : A x = 0}."""
    if not rows:
        return [[ONE if i == j else ZERO for i in range(ncols)] for j in range(ncols)]
    red, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for row, pc in zip(red, piv):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def determinant(mat: Sequence[Sequence]) -> GaussQ:
    m = [[gq(x) for x in r] for r in mat]
    n = len(m)
    det = ONE
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c]), None)
        if p is None:
            return ZERO
        if p != c:
            m[c], m[p] = m[p], m[c]
            det = -det
        det = det * m[c][c]
        inv = m[c][c].inverse()
        for i in range(c + 1, n):
            if m[i][c]:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return det


class IncrementalBasis:
    """Echelon basis that accepts vectors one at a time."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self.rows: list[Vector] = []
        self.pivots: list[int] = []

    def reduce(self, v: Sequence) -> Vector:
        v = [gq(x) for x in v]
        for row, pc in zip(self.rows, self.pivots):
            if v[pc]:
                f = v[pc]
                v = [a - f * b if b else a for a, b in zip(v, row)]
        return v

    def add(self, v: Sequence) -> bool:
        """Insert ``v``; return True iff it was independent."""
        w = self.reduce(v)
        pc = next((i for i, x in enumerate(w) if x), None)
        if pc is None:
            return False
        inv = w[pc].inverse()
        w = [x * inv for x in w]
        for i, row in enumerate(self.rows):
            if row[pc]:
                f = row[pc]
                self.rows[i] = [a - f * b if b else a for a, b in zip(row, w)]
        self.rows.append(w)
        self.pivots.append(pc)
        return True

    def __len__(self):
        return len(self.rows)


# ---------------------------------------------------------------------------
# univariate polynomials, coefficient lists in ascending degree
# ---------------------------------------------------------------------------

def utrim(p: Iterable) -> list[GaussQ]:
    out = [gq(c) for c in p]
    while out and not out[-1]:
        out.pop()
    return out


def udeg(p: Sequence) -> int:
    return len(p) - 1


def uadd(p, q):
    n = max(len(p), len(q))
    return utrim([(p[i] if i < len(p) else ZERO) + (q[i] if i < len(q) else ZERO) for i in range(n)])


def usub(p, q):
    n = max(len(p), len(q))
    return utrim([(p[i] if i < len(p) else ZERO) - (q[i] if i < len(q) else ZERO) for i in range(n)])


def umul(p, q):
    if not p or not q:
        return []
    out = [ZERO] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            if b:
                out[i + j] = out[i + j] + a * b
    return utrim(out)


def uscale(p, c):
    c = gq(c)
    return utrim([a * c for a in p])


def uderiv(p, k: int = 1):
    out = list(p)
    for _ in range(k):
        out = [out[i] * i for i in range(1, len(out))]
    return utrim(out)


def udivmod(p, q):
    p = utrim(p)
    q = utrim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    if len(p) < len(q):
        return [], p
    quot = [ZERO] * (len(p) - len(q) + 1)
    rem = list(p)
    lead_inv = q[-1].inverse()
    for i in range(len(p) - len(q), -1, -1):
        c = rem[i + len(q) - 1] * lead_inv
        quot[i] = c
        if c:
            for j, b in enumerate(q):
                rem[i + j] = rem[i + j] - c * b
    return utrim(quot), utrim(rem[: len(q) - 1])


def umonic(p):
    p = utrim(p)
    if not p:
        return p
    inv = p[-1].inverse()
    return [c * inv for c in p]


def ugcd(p, q):
    a, b = utrim(p), utrim(q)
    while b:
        a, b = b, udivmod(a, b)[1]
    return umonic(a)


def ueval(p, z):
    acc = ZERO
    for c in reversed(p):
        acc = acc * z + c
    return acc


def squarefree_decomposition(p) -> list[tuple[list[GaussQ], int]]:
    """Yun's algorithm: ``p = lc * prod(a_i ** i)`` with pairwise coprime
    square-free ``a_i``.  Returns ``[(a_i, i)]`` for non-constant factors."""
    p = umonic(p)
    if len(p) <= 1:
        return []
    out = []
    dp = uderiv(p)
    a = ugcd(p, dp)
    b = udivmod(p, a)[0]
    c = udivmod(dp, a)[0]
    d = usub(c, uderiv(b))
    i = 1
    while len(b) > 1:
        a = ugcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = udivmod(b, a)[0]
        c = udivmod(d, a)[0]
        d = usub(c, uderiv(b))
        i += 1
    return out


def order_at_factor(p, g) -> int:
    """Largest e with ``g**e`` dividing ``p`` (``g`` non-constant)."""
    p = utrim(p)
    if not p:
        raise ValueError("order of the zero polynomial is infinite")
    e = 0
    while True:
        quot, rem = udivmod(p, g)
        if rem:
            return e
        p = quot
        e += 1


def coprime_basis(polys: Sequence[Sequence]) -> list[list[GaussQ]]:
    """Pairwise coprime, square-free, monic factors such that every input is
    a unit times a product of powers of them (a gcd-free basis)."""
    work = [a for p in polys for a, _ in squarefree_decomposition(p)]
    basis: list[list[GaussQ]] = []
    while work:
        a = umonic(work.pop())
        if len(a) <= 1:
            continue
        for idx, b in enumerate(basis):
            g = ugcd(a, b)
            if len(g) > 1:
                basis.pop(idx)
                work.extend([g, udivmod(b, g)[0], udivmod(a, g)[0]])
                break
        else:
            basis.append(a)
    return sorted(basis, key=lambda b: (len(b), [c.sort_key() for c in b]))
