"""Exact linear algebra for matrix spaces and the part-map catalog.

A part map A selects a component of a square matrix (symmetric part,
deviator, trace part, and so on).  Everything is stored as an exact
rational matrix acting on the row-major flattening of R^{n x n}; kernels
come with pairwise-orthogonal rational bases (no square roots, the Gram
data stays diagonal and rational), and the catalog exposes orthogonal
projectors, the parametrizing isomorphism T onto ker(A), and a certified
injectivity constant for the restriction of A to ker(A)^perp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .exact import (
    ONE,
    ZERO,
    clear_denominators,
    exact_sqrt,
    eye,
    format_frac,
    frac,
    gram_schmidt_orthogonal,
    is_zero_vec,
    mat_mul,
    mat_vec,
    min_eigenvalue,
    nullspace,
    solve,
    sqrt_lower_bound,
    sqrt_upper_bound,
    transpose,
    vec_dot,
    zeros,
)

PART_MAP_NAMES = ("Id", "dev", "sym", "devsym", "skewtr", "skew", "tr")

_ALIASES = {
    "id": "Id",
    "identity": "Id",
    "dev": "dev",
    "sym": "sym",
    "devsym": "devsym",
    "dev_sym": "devsym",
    "skewtr": "skewtr",
    "skew+tr": "skewtr",
    "skew_tr": "skewtr",
    "skew": "skew",
    "tr": "tr",
    "trace": "tr",
}


def canonical_part_name(name: str) -> str:
    key = name.strip().lower().replace(" ", "")
    if key not in _ALIASES:
        raise ValueError(f"unknown part map name: {name!r}")
    return _ALIASES[key]


@dataclass(frozen=True)
class Space:
    """A finite-dimensional inner product space, optionally a matrix space."""

    dim: int
    shape: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dimension must be positive")
        if self.shape is not None and self.shape[0] * self.shape[1] != self.dim:
            raise ValueError("shape inconsistent with dimension")

    @staticmethod
    def matrices(rows: int, cols: int) -> "Space":
        return Space(rows * cols, (rows, cols))

    @staticmethod
    def vectors(n: int) -> "Space":
        return Space(n)


def flatten_matrix(m: Sequence[Sequence]) -> list:
    return [frac(x) for row in m for x in row]


def unflatten(v: Sequence, rows: int, cols: int) -> list:
    return [list(v[r * cols : (r + 1) * cols]) for r in range(rows)]


def basis_index(n: int, r: int, c: int) -> int:
    return r * n + c


def _unit_matrix_vec(n: int, r: int, c: int) -> list:
    v = [ZERO] * (n * n)
    v[basis_index(n, r, c)] = ONE
    return v


def identity_matrix_vec(n: int) -> list:
    v = [ZERO] * (n * n)
    for i in range(n):
        v[basis_index(n, i, i)] = ONE
    return v


def _skew_basis(n: int) -> List[list]:
    """so(n) basis; for n = 3 ordered as Anti(e1), Anti(e2), Anti(e3)."""
    if n == 3:
        out = []
        for axis in range(3):
            v = [ZERO] * 9
            i, j = {0: (2, 1), 1: (0, 2), 2: (1, 0)}[axis]
            v[basis_index(3, i, j)] = ONE
            v[basis_index(3, j, i)] = -ONE
            out.append(v)
        return out
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [ZERO] * (n * n)
            v[basis_index(n, i, j)] = ONE
            v[basis_index(n, j, i)] = -ONE
            out.append(v)
    return out


def _sym_basis(n: int) -> List[list]:
    out = []
    for i in range(n):
        out.append(_unit_matrix_vec(n, i, i))
    for i in range(n):
        for j in range(i + 1, n):
            v = [ZERO] * (n * n)
            v[basis_index(n, i, j)] = ONE
            v[basis_index(n, j, i)] = ONE
            out.append(v)
    return out


def _tracefree_diag_basis(n: int) -> List[list]:
    """Pairwise-orthogonal trace-free diagonal matrices d_k."""
    out = []
    for k in range(1, n):
        v = [ZERO] * (n * n)
        for i in range(k):
            v[basis_index(n, i, i)] = ONE
        v[basis_index(n, k, k)] = -Fraction(k)
        out.append(v)
    return out


def _tracefree_basis(n: int) -> List[list]:
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                out.append(_unit_matrix_vec(n, i, j))
    out.extend(_tracefree_diag_basis(n))
    return out


def _tracefree_sym_basis(n: int) -> List[list]:
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            v = [ZERO] * (n * n)
            v[basis_index(n, i, j)] = ONE
            v[basis_index(n, j, i)] = ONE
            out.append(v)
    out.extend(_tracefree_diag_basis(n))
    return out


def _part_matrix(name: str, n: int) -> list:
    dim = n * n
    m = zeros(dim, dim)
    half = Fraction(1, 2)
    for r in range(n):
        for c in range(n):
            col = basis_index(n, r, c)
            if name == "Id":
                m[col][col] = ONE
            elif name == "sym":
                m[basis_index(n, r, c)][col] += half
                m[basis_index(n, c, r)][col] += half
            elif name == "skew":
                m[basis_index(n, r, c)][col] += half
                m[basis_index(n, c, r)][col] -= half
            elif name == "dev":
                m[col][col] += ONE
                if r == c:
                    for i in range(n):
                        m[basis_index(n, i, i)][col] -= Fraction(1, n)
            elif name == "tr":
                if r == c:
                    for i in range(n):
                        m[basis_index(n, i, i)][col] += ONE
            elif name == "devsym":
                m[basis_index(n, r, c)][col] += half
                m[basis_index(n, c, r)][col] += half
                if r == c:
                    for i in range(n):
                        m[basis_index(n, i, i)][col] -= Fraction(1, n)
            elif name == "skewtr":
                m[basis_index(n, r, c)][col] += half
                m[basis_index(n, c, r)][col] -= half
                if r == c:
                    for i in range(n):
                        m[basis_index(n, i, i)][col] += ONE
            else:
                raise ValueError(f"unknown part map name: {name}")
    return m


def _catalog_kernel(name: str, n: int) -> List[list]:
    if name == "Id":
        return []
    if name == "sym":
        return _skew_basis(n)
    if name == "skew":
        return _sym_basis(n)
    if name == "dev":
        return [identity_matrix_vec(n)]
    if name == "tr":
        return _tracefree_basis(n)
    if name == "devsym":
        return _skew_basis(n) + [identity_matrix_vec(n)]
    if name == "skewtr":
        return _tracefree_sym_basis(n)
    raise ValueError(name)


@dataclass(frozen=True)
class Projector:
    """Exact orthogonal projector onto ker(A) or its complement."""

    onto: str  # "kernel" or "kernel_complement"
    matrix: tuple

    def apply(self, v: Sequence) -> list:
        return mat_vec(self.matrix, [frac(x) for x in v])


@dataclass(frozen=True)
class Parametrization:
    """Isomorphism T: R^M -> ker(A); columns are the kernel basis."""

    M: int
    matrix: tuple  # dim(V) x M

    def apply(self, coords: Sequence) -> list:
        return mat_vec(self.matrix, list(coords))

    def coordinates_of(self, element: Sequence):
        """Solve T c = element exactly; None when element is not in ker(A)."""
        if self.M == 0:
            return [] if is_zero_vec(list(element)) else None
        return solve([list(r) for r in self.matrix], list(element))


class InjectivityConstant:
    """Smallest singular value of A restricted to ker(A)^perp.

    Exact when rational; otherwise a certified rational interval.  The
    degenerate case ker(A)^perp = {0} is reported as infinite.
    """

    def __init__(self, kind: str, value=None, bounds=None):
        self.kind = kind  # "exact" | "interval" | "infinite"
        self.value = value
        self.bounds = bounds

    def __float__(self):
        if self.kind == "infinite":
            return math.inf
        if self.kind == "exact":
            return float(self.value)
        return float((self.bounds[0] + self.bounds[1]) / 2)

    def lower(self) -> Fraction:
        if self.kind == "exact":
            return self.value
        if self.kind == "interval":
            return self.bounds[0]
        raise ValueError("infinite constant has no rational lower bound")

    def __repr__(self):
        if self.kind == "exact":
            return f"InjectivityConstant({format_frac(self.value)})"
        if self.kind == "infinite":
            return "InjectivityConstant(inf)"
        lo, hi = self.bounds
        return f"InjectivityConstant([{format_frac(lo)}, {format_frac(hi)}])"


class PartMap:
    """A linear part map A: V -> V~ on a matrix space, stored exactly."""

    def __init__(self, name, domain: Space, codomain: Space, matrix, kernel=None):
        self.name = name
        self.domain = domain
        self.codomain = codomain
        self.matrix = tuple(tuple(frac(x) for x in row) for row in matrix)
        if len(self.matrix) != codomain.dim or (
            self.matrix and len(self.matrix[0]) != domain.dim
        ):
            raise ValueError("part map matrix shape mismatch")
        if kernel is None:
            raw = nullspace([list(r) for r in self.matrix])
            kernel = [clear_denominators(v) for v in gram_schmidt_orthogonal(raw)]
        self._kernel = [list(v) for v in kernel]
        for v in self._kernel:
            if not is_zero_vec(mat_vec(self.matrix, v)):
                raise ValueError("kernel basis vector not annihilated")
        for i, u in enumerate(self._kernel):
            for w in self._kernel[i + 1 :]:
                if vec_dot(u, w) != 0:
                    raise ValueError("kernel basis not orthogonal")
        self._gram = [vec_dot(v, v) for v in self._kernel]
        self._proj_kernel = None
        self._lambda = None

    # -- basic action -----------------------------------------------------

    def apply(self, v: Sequence) -> list:
        return mat_vec(self.matrix, [frac(x) for x in v])

    def apply_matrix(self, m: Sequence[Sequence]) -> list:
        rows, cols = self.codomain.shape
        return unflatten(self.apply(flatten_matrix(m)), rows, cols)

    # -- kernel data -------------------------------------------------------

    def kernel_basis(self) -> List[list]:
        """Exact pairwise-orthogonal spanning basis of ker(A)."""
        return [list(v) for v in self._kernel]

    def kernel_gram(self) -> List[Fraction]:
        return list(self._gram)

    @property
    def kernel_dim(self) -> int:
        return len(self._kernel)

    def projector(self, onto: str = "kernel") -> Projector:
        if onto not in ("kernel", "kernel_complement"):
            raise ValueError("onto must be 'kernel' or 'kernel_complement'")
        if self._proj_kernel is None:
            d = self.domain.dim
            p = zeros(d, d)
            for v, g in zip(self._kernel, self._gram):
                for i in range(d):
                    if v[i] == 0:
                        continue
                    for j in range(d):
                        p[i][j] += v[i] * v[j] / g
            self._proj_kernel = tuple(tuple(row) for row in p)
        if onto == "kernel":
            return Projector("kernel", self._proj_kernel)
        ident = eye(self.domain.dim)
        comp = tuple(
            tuple(ident[i][j] - self._proj_kernel[i][j] for j in range(self.domain.dim))
            for i in range(self.domain.dim)
        )
        return Projector("kernel_complement", comp)

    def parametrization(self) -> Parametrization:
        cols = self._kernel
        matrix = tuple(
            tuple(cols[j][i] for j in range(len(cols))) for i in range(self.domain.dim)
        )
        return Parametrization(len(cols), matrix)

    def injectivity_constant(self) -> InjectivityConstant:
        if self._lambda is not None:
            return self._lambda
        comp = self._complement_basis()
        if not comp:
            self._lambda = InjectivityConstant("infinite")
            return self._lambda
        images = [self.apply(u) for u in comp]
        q = [[vec_dot(a, b) for b in images] for a in images]
        g = [vec_dot(u, u) for u in comp]
        m = [[q[i][j] / g[i] for j in range(len(comp))] for i in range(len(comp))]
        kind, payload = min_eigenvalue(m, tol=Fraction(1, 10**18))
        if kind == "exact":
            root = exact_sqrt(payload)
            if root is not None:
                self._lambda = InjectivityConstant("exact", value=root)
            else:
                self._lambda = InjectivityConstant(
                    "interval",
                    bounds=(sqrt_lower_bound(payload), sqrt_upper_bound(payload)),
                )
        else:
            lo, hi = payload
            lo = max(lo, ZERO)
            self._lambda = InjectivityConstant(
                "interval", bounds=(sqrt_lower_bound(lo), sqrt_upper_bound(hi))
            )
        return self._lambda

    def _complement_basis(self) -> List[list]:
        proj = self.projector("kernel_complement")
        cands = [proj.apply(col) for col in eye(self.domain.dim)]
        basis = gram_schmidt_orthogonal([v for v in cands if not is_zero_vec(v)])
        return [clear_denominators(v) for v in basis]

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        if self.name in PART_MAP_NAMES and self.domain.shape is not None:
            return {"name": self.name, "n": self.domain.shape[0]}
        return {
            "n": self.domain.shape[0] if self.domain.shape else None,
            "matrix": [[format_frac(x) for x in row] for row in self.matrix],
        }

    @staticmethod
    def from_json(data: dict) -> "PartMap":
        if "name" in data:
            return build_part_map(data["name"], data["n"])
        n = data.get("n")
        matrix = [[frac(x) for x in row] for row in data["matrix"]]
        dim = len(matrix[0])
        if n is None:
            n = math.isqrt(dim)
        dom = Space.matrices(n, n) if n * n == dim else Space(dim)
        codom = Space.matrices(n, n) if n * n == len(matrix) else Space(len(matrix))
        return PartMap("custom", dom, codom, matrix)

    def __repr__(self):
        return f"PartMap({self.name}, n={self.domain.shape[0] if self.domain.shape else '?'})"


def build_part_map(name: str, n: int, matrix=None) -> PartMap:
    """Construct a catalog part map on R^{n x n}, or a custom one.

    Catalog names: Id, dev, sym, devsym, skewtr (X -> skew X + tr(X) 1),
    skew, tr (X -> tr(X) 1).  Custom maps are given by an explicit exact
    matrix acting on the row-major flattening.
    """

    if n < 2:
        raise ValueError("n must be at least 2")
    space = Space.matrices(n, n)
    if matrix is not None:
        return PartMap("custom", space, Space(len(matrix)), matrix)
    cname = canonical_part_name(name)
    return PartMap(cname, space, space, _part_matrix(cname, n), _catalog_kernel(cname, n))


def zero_part_map(n: int) -> PartMap:
    """The zero map; its kernel is all of R^{n x n}."""
    space = Space.matrices(n, n)
    dim = n * n
    basis = [_unit_matrix_vec(n, r, c) for r in range(n) for c in range(n)]
    return PartMap("zero", space, space, zeros(dim, dim), basis)


def kernel_basis(a: PartMap) -> List[list]:
    return a.kernel_basis()


def projector(a: PartMap, onto: str = "kernel") -> Projector:
    return a.projector(onto)


def injectivity_constant(a: PartMap) -> InjectivityConstant:
    return a.injectivity_constant()


def parametrization(a: PartMap) -> Parametrization:
    return a.parametrization()
