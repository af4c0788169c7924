"""Exact arithmetic workhorses: rationals, Gaussian rationals, matrices.

Everything here operates on Python ``Fraction`` scalars or on
``GaussianRational`` (complex numbers with rational real and imaginary
part).  Matrices are plain lists of lists.  All eliminations are exact;
no floating point enters any routine in this module.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Frac = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def frac(x) -> Fraction:
    """Coerce ints, strings like '3/4', and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x).limit_denominator(10**12)
    return Fraction(x)


def format_frac(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)


class GaussianRational:
    """A complex number a + b*i with exact rational a, b."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if isinstance(re, Fraction) else Fraction(re)
        self.im = im if isinstance(im, Fraction) else Fraction(im)

    @staticmethod
    def of(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return GaussianRational(frac(x.real), frac(x.imag))
        return GaussianRational(frac(x), ZERO)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        o = GaussianRational.of(other)
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.of(other))

    def __rsub__(self, other):
        return GaussianRational.of(other) + (-self)

    def __mul__(self, other):
        o = GaussianRational.of(other)
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.of(other)
        n2 = o.norm2()
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        c = o.conjugate()
        num = self * c
        return GaussianRational(num.re / n2, num.im / n2)

    def __rtruediv__(self, other):
        return GaussianRational.of(other) / self

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return format_frac(self.re)
        if self.re == 0:
            return f"{format_frac(self.im)}i"
        sign = "+" if self.im > 0 else "-"
        return f"{format_frac(self.re)}{sign}{format_frac(abs(self.im))}i"


I_UNIT = GaussianRational(0, 1)


def parse_gaussian(s) -> GaussianRational:
    """Parse 'a/b', 'a/bi', 'a/b+c/di' or a {'re':..,'im':..} mapping."""
    if isinstance(s, GaussianRational):
        return s
    if isinstance(s, dict):
        return GaussianRational(frac(s.get("re", 0)), frac(s.get("im", 0)))
    if isinstance(s, (int, Fraction)):
        return GaussianRational(frac(s))
    text = str(s).replace(" ", "")
    if not text.endswith("i"):
        return GaussianRational(Fraction(text))
    body = text[:-1]
    # split at the last +/- that is not a leading sign and not inside '/'
    for pos in range(len(body) - 1, 0, -1):
        if body[pos] in "+-" and body[pos - 1] not in "+-/":
            re_part, im_part = body[:pos], body[pos:]
            if im_part in ("+", "-"):
                im_part += "1"
            return GaussianRational(Fraction(re_part), Fraction(im_part))
    if body in ("", "+", "-"):
        body += "1"
    return GaussianRational(ZERO, Fraction(body))


def format_gaussian(z) -> str:
    if isinstance(z, Fraction):
        return format_frac(z)
    z = GaussianRational.of(z)
    if z.im == 0:
        return format_frac(z.re)
    return str(z)


def is_zero_scalar(x) -> bool:
    if isinstance(x, GaussianRational):
        return x.is_zero()
    return x == 0


# ---------------------------------------------------------------------------
# Dense exact matrices (lists of lists of Fraction or GaussianRational)
# ---------------------------------------------------------------------------


def mat(rows) -> list:
    return [[frac(x) if not isinstance(x, GaussianRational) else x for x in r] for r in rows]


def zeros(r: int, c: int) -> list:
    return [[ZERO] * c for _ in range(r)]


def eye(n: int) -> list:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = ONE
    return m


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(a, s):
    return [[s * x for x in r] for r in a]


def mat_mul(a, b):
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def mat_vec(a, v):
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a):
    return [list(r) for r in zip(*a)]


def vec_dot(u, v):
    return sum(x * y for x, y in zip(u, v))


def vec_sub(u, v):
    return [x - y for x, y in zip(u, v)]


def vec_scale(u, s):
    return [s * x for x in u]


def is_zero_vec(v) -> bool:
    return all(is_zero_scalar(x) for x in v)


def is_zero_mat(a) -> bool:
    return all(is_zero_scalar(x) for r in a for x in r)


def rref(matrix):
    """Reduced row echelon form; returns (rref_matrix, pivot_columns).

    Field-generic: works for Fraction and GaussianRational entries.
    """
    m = [list(r) for r in matrix]
    if not m:
        return m, []
    rows, cols = len(m), len(m[0])
    pivots = []
    r = 0
    for c in range(cols):
        pivot_row = None
        for i in range(r, rows):
            if not is_zero_scalar(m[i][c]):
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(rows):
            if i != r and not is_zero_scalar(m[i][c]):
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(matrix) -> int:
    return len(rref(matrix)[1])


def nullspace(matrix) -> list:
    """Exact basis of the right kernel, one vector per free column."""
    if not matrix:
        return []
    cols = len(matrix[0])
    red, pivots = rref(matrix)
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    basis = []
    for fc in free:
        v = [ZERO] * cols
        v[fc] = ONE
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(matrix, rhs):
    """Solve matrix @ x = rhs exactly; None when inconsistent."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    aug = [list(matrix[i]) + [rhs[i]] for i in range(rows)]
    red, pivots = rref(aug)
    if cols in pivots:
        return None
    x = [ZERO] * cols
    for r, pc in enumerate(pivots):
        x[pc] = red[r][cols]
    return x


def gram_schmidt_orthogonal(vectors):
    """Pairwise-orthogonalize without normalizing (stays rational)."""
    basis = []
    for v in vectors:
        w = list(v)
        for b in basis:
            coeff = vec_dot(w, b) / vec_dot(b, b)
            w = vec_sub(w, vec_scale(b, coeff))
        if not is_zero_vec(w):
            basis.append(w)
    return basis


def clear_denominators(v):
    """Scale a rational vector to coprime integers, first nonzero positive."""
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, abs(x))
    if g > 1:
        ints = [x // g for x in ints]
    for x in ints:
        if x != 0:
            if x < 0:
                ints = [-y for y in ints]
            break
    return [Fraction(x) for x in ints]


def bitsize(x) -> int:
    """Total bit size of the numerators and denominators involved."""
    if isinstance(x, GaussianRational):
        return bitsize(x.re) + bitsize(x.im)
    return x.numerator.bit_length() + x.denominator.bit_length()


def vec_bitsize(v) -> int:
    return sum(bitsize(x) for x in v)


# ---------------------------------------------------------------------------
# Symmetric matrices: PSD test, characteristic polynomial, eigen bounds
# ---------------------------------------------------------------------------


def ldlt_is_positive_definite(a) -> bool:
    """Exact test that a symmetric rational matrix is positive definite."""
    n = len(a)
    m = [list(r) for r in a]
    for k in range(n):
        if m[k][k] <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] -= f * m[k][j]
    return True


def char_poly(a):
    """Characteristic polynomial of a rational matrix (Faddeev-LeVerrier).

    Returns coefficients [c0, c1, ..., cn] of det(tI - A) with cn = 1.
    """
    n = len(a)
    coeffs = [ZERO] * (n + 1)
    coeffs[n] = ONE
    m = eye(n)
    for k in range(1, n + 1):
        m = mat_mul(a, m)
        tr = sum(m[i][i] for i in range(n))
        c = -tr / k
        coeffs[n - k] = c
        for i in range(n):
            m[i][i] += c
    return coeffs


def poly_eval_frac(coeffs, x: Fraction) -> Fraction:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_derivative(coeffs):
    return [c * k for k, c in enumerate(coeffs)][1:] or [ZERO]


def _poly_divmod(num, den):
    num = list(num)
    out = [ZERO] * max(len(num) - len(den) + 1, 1)
    while len(num) >= len(den) and any(c != 0 for c in num):
        if num[-1] == 0:
            num.pop()
            continue
        shift = len(num) - len(den)
        q = num[-1] / den[-1]
        out[shift] = q
        for i, c in enumerate(den):
            num[shift + i] -= q * c
        num.pop()
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return out, num


def sturm_chain(coeffs):
    chain = [list(coeffs), _poly_derivative(coeffs)]
    while True:
        _, rem = _poly_divmod(chain[-2], chain[-1])
        if all(c == 0 for c in rem):
            break
        chain.append([-c for c in rem])
    return chain


def _sign_changes(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = poly_eval_frac(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(chain, lo: Fraction, hi: Fraction) -> int:
    """Number of distinct real roots in (lo, hi]."""
    return _sign_changes(chain, lo) - _sign_changes(chain, hi)


def min_eigenvalue(a, tol=Fraction(1, 10**9)):
    """Smallest eigenvalue of a rational matrix with real spectrum.

    Returns ("exact", value) when the eigenvalue is rational, otherwise
    ("interval", (lo, hi)) with hi - lo <= tol, certified by Sturm counts.
    """
    n = len(a)
    if n == 0:
        return ("exact", None)
    coeffs = char_poly(a)
    # rational root candidates of the integer-cleared polynomial
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    lead, const = ints[-1], ints[0]
    chain = sturm_chain(coeffs)
    bound = ONE + max(abs(c) for c in coeffs[:-1])
    lo, hi = -bound, bound
    total = count_roots(chain, lo, hi)
    if total == 0:
        raise ArithmeticError("no real eigenvalues found")
    if const == 0:
        candidates = [ZERO]
    else:
        candidates = []
        for p in _divisors(abs(const)):
            for q in _divisors(abs(lead)):
                candidates.extend([Fraction(p, q), Fraction(-p, q)])
        candidates.append(ZERO)
    rational_roots = sorted({c for c in candidates if poly_eval_frac(coeffs, c) == 0})
    # bisect down to the smallest root; avoid landing exactly on a root
    while hi - lo > tol:
        mid = None
        for num, den in ((1, 2), (1, 3), (2, 5), (3, 7)):
            cand = lo + (hi - lo) * Fraction(num, den)
            if poly_eval_frac(coeffs, cand) != 0:
                mid = cand
                break
        if mid is None:
            break
        if count_roots(chain, lo, mid) > 0:
            hi = mid
        else:
            lo = mid
    for r0 in rational_roots:
        if lo <= r0 <= hi:
            return ("exact", r0)
    return ("interval", (lo, hi))


def _divisors(n: int):
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def sqrt_lower_bound(x: Fraction, bits: int = 64) -> Fraction:
    """Rational r with r*r <= x, tight to ~bits of precision."""
    if x < 0:
        raise ValueError("negative input")
    if x == 0:
        return ZERO
    scale = 1 << bits
    num = x.numerator * scale * scale
    den = x.denominator
    r = Fraction(math.isqrt(num // den), scale)
    while r * r > x:
        r -= Fraction(1, scale)
    return r


def sqrt_upper_bound(x: Fraction, bits: int = 64) -> Fraction:
    if x < 0:
        raise ValueError("negative input")
    r = sqrt_lower_bound(x, bits)
    step = Fraction(1, 1 << bits)
    while r * r < x:
        r += step
    return r


def exact_sqrt(x: Fraction):
    """Return sqrt(x) as a Fraction when x is a perfect rational square."""
    if x < 0:
        return None
    pn = math.isqrt(x.numerator)
    pd = math.isqrt(x.denominator)
    if pn * pn == x.numerator and pd * pd == x.denominator:
        return Fraction(pn, pd)
    return None


# ---------------------------------------------------------------------------
# Rational interval arithmetic (closed intervals with Fraction endpoints)
# ---------------------------------------------------------------------------


class Interval:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        self.lo = frac(lo)
        self.hi = self.lo if hi is None else frac(hi)
        if self.hi < self.lo:
            raise ValueError("empty interval")

    def __add__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        return Interval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        return self + (-o)

    def __mul__(self, other):
        o = other if isinstance(other, Interval) else Interval(other)
        prods = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(prods), max(prods))

    __rmul__ = __mul__

    def power(self, k: int) -> "Interval":
        if k == 0:
            return Interval(ONE)
        if k == 1:
            return Interval(self.lo, self.hi)
        if k % 2 == 1 or self.lo >= 0:
            return Interval(self.lo**k, self.hi**k)
        if self.hi <= 0:
            return Interval(self.hi**k, self.lo**k)
        return Interval(ZERO, max(self.lo**k, self.hi**k))

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def radius(self) -> Fraction:
        return (self.hi - self.lo) / 2

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"
