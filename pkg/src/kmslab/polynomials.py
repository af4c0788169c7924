"""Multivariate polynomials with exact coefficients.

Monomials are exponent tuples, polynomials are monomial -> coefficient
dicts, and ``PolyField`` carries vector-valued polynomials (coefficient
vectors per monomial) used for symbolic differential-operator work.
Storage is degree-graded on demand via ``graded_terms``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Dict, Iterable, List, Sequence, Tuple

from .exact import ZERO, frac, is_zero_scalar, is_zero_vec

Monomial = Tuple[int, ...]
Poly = Dict[Monomial, Fraction]


def mono_degree(m: Monomial) -> int:
    return sum(m)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def grlex_key(m: Monomial):
    return (sum(m), tuple(-e for e in m))


def monomials_of_degree(n: int, d: int) -> List[Monomial]:
    """All exponent tuples in n variables of total degree d, graded-lex."""
    if d == 0:
        return [(0,) * n]
    out = []
    for combo in combinations_with_replacement(range(n), d):
        m = [0] * n
        for i in combo:
            m[i] += 1
        out.append(tuple(m))
    return sorted(set(out), key=grlex_key)


def poly_zero() -> Poly:
    return {}


def poly_const(n: int, c) -> Poly:
    c = frac(c)
    return {} if c == 0 else {(0,) * n: c}


def poly_var(n: int, i: int) -> Poly:
    m = [0] * n
    m[i] = 1
    return {tuple(m): frac(1)}


def poly_add(p: Poly, q: Poly) -> Poly:
    out = dict(p)
    for m, c in q.items():
        s = out.get(m, ZERO) + c
        if is_zero_scalar(s):
            out.pop(m, None)
        else:
            out[m] = s
    return out


def poly_scale(p: Poly, s) -> Poly:
    if is_zero_scalar(s):
        return {}
    return {m: s * c for m, c in p.items()}


def poly_sub(p: Poly, q: Poly) -> Poly:
    return poly_add(p, poly_scale(q, frac(-1)))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = mono_mul(m1, m2)
            s = out.get(m, ZERO) + c1 * c2
            if is_zero_scalar(s):
                out.pop(m, None)
            else:
                out[m] = s
    return out


def poly_eval(p: Poly, point: Sequence) -> object:
    """Evaluate at a point of Fractions, GaussianRationals, or floats."""
    total = None
    for m, c in p.items():
        term = c
        for e, x in zip(m, point):
            for _ in range(e):
                term = term * x
        total = term if total is None else total + term
    return frac(0) if total is None else total


def poly_diff(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for m, c in p.items():
        if m[i] == 0:
            continue
        dm = list(m)
        dm[i] -= 1
        out[tuple(dm)] = c * m[i]
    return out


def poly_degree(p: Poly) -> int:
    """Total degree; -1 for the zero polynomial."""
    return max((mono_degree(m) for m in p), default=-1)


def poly_is_zero(p: Poly) -> bool:
    return not p


def poly_is_homogeneous(p: Poly, d: int) -> bool:
    return all(mono_degree(m) == d for m in p)


class PolyField:
    """A vector-valued polynomial map on R^n with rational coefficients.

    ``terms`` maps a monomial to the coefficient vector (length ``dim``).
    Evaluation and differentiation are exact.
    """

    def __init__(self, n: int, dim: int, terms: Dict[Monomial, tuple] | None = None):
        self.n = n
        self.dim = dim
        self.terms: Dict[Monomial, tuple] = {}
        if terms:
            for m, vec in terms.items():
                v = tuple(frac(x) for x in vec)
                if not is_zero_vec(v):
                    self.terms[m] = v

    @staticmethod
    def constant(n: int, vec) -> "PolyField":
        vec = tuple(frac(x) for x in vec)
        return PolyField(n, len(vec), {(0,) * n: vec})

    @staticmethod
    def zero(n: int, dim: int) -> "PolyField":
        return PolyField(n, dim)

    def component(self, i: int) -> Poly:
        return {m: v[i] for m, v in self.terms.items() if v[i] != 0}

    @staticmethod
    def from_components(n: int, comps: Sequence[Poly]) -> "PolyField":
        dim = len(comps)
        monos = set()
        for p in comps:
            monos.update(p)
        terms = {}
        for m in monos:
            terms[m] = tuple(p.get(m, ZERO) for p in comps)
        return PolyField(n, dim, terms)

    def add(self, other: "PolyField") -> "PolyField":
        terms = {m: list(v) for m, v in self.terms.items()}
        for m, v in other.terms.items():
            if m in terms:
                terms[m] = [a + b for a, b in zip(terms[m], v)]
            else:
                terms[m] = list(v)
        return PolyField(self.n, self.dim, {m: tuple(v) for m, v in terms.items()})

    def sub(self, other: "PolyField") -> "PolyField":
        return self.add(other.scale(frac(-1)))

    def scale(self, s) -> "PolyField":
        s = frac(s)
        return PolyField(self.n, self.dim, {m: tuple(s * x for x in v) for m, v in self.terms.items()})

    def map_linear(self, matrix) -> "PolyField":
        """Apply a constant linear map (rows x dim) to the values."""
        rows = len(matrix)
        terms = {}
        for m, v in self.terms.items():
            w = tuple(sum(matrix[i][j] * v[j] for j in range(self.dim)) for i in range(rows))
            terms[m] = w
        return PolyField(self.n, rows, terms)

    def diff(self, i: int) -> "PolyField":
        terms = {}
        for m, v in self.terms.items():
            if m[i] == 0:
                continue
            dm = list(m)
            dm[i] -= 1
            k = m[i]
            dm = tuple(dm)
            if dm in terms:
                terms[dm] = tuple(a + k * b for a, b in zip(terms[dm], v))
            else:
                terms[dm] = tuple(k * b for b in v)
        return PolyField(self.n, self.dim, terms)

    def diff_multi(self, alpha: Monomial) -> "PolyField":
        out = self
        for i, e in enumerate(alpha):
            for _ in range(e):
                out = out.diff(i)
        return out

    def evaluate(self, point: Sequence) -> list:
        vals = None
        for m, v in self.terms.items():
            factor = None
            for e, x in zip(m, point):
                for _ in range(e):
                    factor = x if factor is None else factor * x
            if factor is None:
                term = list(v)
            else:
                term = [c * factor for c in v]
            vals = term if vals is None else [a + b for a, b in zip(vals, term)]
        if vals is None:
            return [ZERO] * self.dim
        return vals

    def degree(self) -> int:
        return max((mono_degree(m) for m in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def graded_terms(self):
        """Terms grouped by total degree, ascending."""
        by_deg: Dict[int, Dict[Monomial, tuple]] = {}
        for m, v in self.terms.items():
            by_deg.setdefault(mono_degree(m), {})[m] = v
        return [(d, by_deg[d]) for d in sorted(by_deg)]

    def homogeneous_part(self, d: int) -> "PolyField":
        return PolyField(
            self.n, self.dim, {m: v for m, v in self.terms.items() if mono_degree(m) == d}
        )

    def __eq__(self, other):
        return (
            isinstance(other, PolyField)
            and self.n == other.n
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __repr__(self):
        return f"PolyField(n={self.n}, dim={self.dim}, nterms={len(self.terms)})"

    def to_json(self) -> dict:
        from .exact import format_frac

        records = []
        for m in sorted(self.terms, key=grlex_key):
            records.append(
                {"monomial": list(m), "coefficients": [format_frac(x) for x in self.terms[m]]}
            )
        return {"n": self.n, "dim": self.dim, "terms": records}

    @staticmethod
    def from_json(data: dict) -> "PolyField":
        terms = {
            tuple(rec["monomial"]): tuple(frac(x) for x in rec["coefficients"])
            for rec in data["terms"]
        }
        return PolyField(data["n"], data["dim"], terms)
