"""Homogeneous constant-coefficient operators and their symbol calculus.

Covers the gradient, the row-wise divergence, the matrix curl in its two
guises (the generalised cross-product curl in any dimension and the
classical row-wise curl for n = 3), the incompatibility operator
inc P = Curl((Curl P)^T), compositions with part maps, exact symbolic
application to polynomial fields, and the Nye identities that tie
Curl Anti a to the gradient of a.

Symbols are real polynomial substitutions: B[xi] = sum_alpha xi^alpha
B_alpha.  The spectral harness separately uses B[i xi] for FFT work.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import ONE, ZERO, format_frac, frac, is_zero_mat, mat_mul, mat_vec, zeros
from .matrix_spaces import PartMap, Space, basis_index, flatten_matrix, unflatten
from .polynomials import Monomial, PolyField, mono_degree, grlex_key

# re-exported carrier type for polynomial fields
__all__ = [
    "HomOperator",
    "PolyField",
    "anti",
    "anti_matrix",
    "anti_inverse_coords",
    "generalized_cross",
    "classical_cross",
    "cross_matrix",
    "GEN3_FROM_CLASSICAL",
    "build_operator",
    "compose_part",
    "precompose_linear",
    "compose_operators",
    "transpose_map",
    "apply_symbolic",
    "check_nye",
    "gradient_field",
    "divergence_poly",
]


# ---------------------------------------------------------------------------
# Generalised cross product and the canonical so(3) identification
# ---------------------------------------------------------------------------


def generalized_cross(a: Sequence, b: Sequence) -> list:
    """Inductive cross product R^n x R^n -> R^{n(n-1)/2}, n >= 2."""
    a = list(a)
    b = list(b)
    n = len(a)
    if n != len(b):
        raise ValueError("vectors must share a dimension")
    if n < 2:
        raise ValueError("generalized cross product needs n >= 2")
    if n == 2:
        return [a[0] * b[1] - a[1] * b[0]]
    head = generalized_cross(a[:-1], b[:-1])
    tail = [b[-1] * x - a[-1] * y for x, y in zip(a[:-1], b[:-1])]
    return head + tail


def cross_matrix(a: Sequence) -> list:
    """Matrix [[a]]_n with [[a]]_n b = a x_n b for every b."""
    n = len(a)
    cols = []
    for j in range(n):
        e = [ZERO] * n
        e[j] = ONE
        cols.append(generalized_cross(a, e))
    return [[cols[j][r] for j in range(n)] for r in range(n * (n - 1) // 2)]


#: component map relating the n=3 generalised and classical cross products:
#: (a x_3 b)[i] = sign * (a x b)[index] with (index, sign) per row.
GEN3_FROM_CLASSICAL: Tuple[Tuple[int, int], ...] = ((2, 1), (1, -1), (0, 1))


def classical_cross(a: Sequence, b: Sequence) -> list:
    return [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]


def anti(v: Sequence) -> list:
    """The canonical map R^3 -> so(3) with Anti(v) w = v x w."""
    if len(v) != 3:
        raise ValueError("Anti is defined on R^3")
    a, b, c = (frac(x) if not hasattr(x, "re") else x for x in v)
    return [[ZERO, -c, b], [c, ZERO, -a], [-b, a, ZERO]]


def anti_matrix() -> list:
    """Anti as a 9 x 3 matrix on row-major flattened output."""
    m = zeros(9, 3)
    for j in range(3):
        e = [ZERO] * 3
        e[j] = ONE
        col = flatten_matrix(anti(e))
        for i in range(9):
            m[i][j] = col[i]
    return m


def anti_inverse_coords(m3: Sequence[Sequence]) -> list:
    """Axial vector of a skew 3x3 matrix: Anti(axl(S)) = S."""
    return [m3[2][1], m3[0][2], m3[1][0]]


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


def _unit_alpha(n: int, *indices: int) -> Monomial:
    alpha = [0] * n
    for i in indices:
        alpha[i] += 1
    return tuple(alpha)


@dataclass
class HomOperator:
    """B = sum_{|alpha| = k} B_alpha d^alpha with exact coefficient maps."""

    order: int
    n: int
    domain: Space
    codomain: Space
    coeffs: Dict[Monomial, tuple]
    label: str = ""

    def __post_init__(self):
        clean: Dict[Monomial, tuple] = {}
        for alpha, m in self.coeffs.items():
            if mono_degree(alpha) != self.order:
                raise ValueError("coefficient multi-index of wrong order")
            rows = tuple(tuple(frac(x) for x in row) for row in m)
            if len(rows) != self.codomain.dim or len(rows[0]) != self.domain.dim:
                raise ValueError("coefficient map shape mismatch")
            if not is_zero_mat(rows):
                clean[alpha] = rows
        self.coeffs = clean

    def symbol(self, xi: Sequence) -> list:
        """Exact symbol map B[xi]: V -> W at rational or Gaussian xi."""
        out = [[ZERO] * self.domain.dim for _ in range(self.codomain.dim)]
        for alpha, m in self.coeffs.items():
            factor = ONE
            for e, x in zip(alpha, xi):
                for _ in range(e):
                    factor = factor * x
            for i in range(self.codomain.dim):
                row = m[i]
                for j in range(self.domain.dim):
                    if row[j] != 0:
                        out[i][j] = out[i][j] + factor * row[j]
        return out

    def is_zero(self) -> bool:
        return not self.coeffs

    def to_json(self) -> dict:
        coeffs = []
        for alpha in sorted(self.coeffs, key=grlex_key):
            coeffs.append(
                {
                    "alpha": list(alpha),
                    "matrix": [[format_frac(x) for x in row] for row in self.coeffs[alpha]],
                }
            )
        return {
            "kind": self.label,
            "n": self.n,
            "k": self.order,
            "domain_dim": self.domain.dim,
            "codomain_dim": self.codomain.dim,
            "coeffs": coeffs,
        }

    @staticmethod
    def from_json(data: dict) -> "HomOperator":
        coeffs = {
            tuple(rec["alpha"]): tuple(tuple(frac(x) for x in row) for row in rec["matrix"])
            for rec in data["coeffs"]
        }
        return HomOperator(
            data["k"],
            data["n"],
            Space(data["domain_dim"]),
            Space(data["codomain_dim"]),
            coeffs,
            label=data.get("kind", "custom"),
        )


def build_operator(kind: str, n: int, rows: Optional[int] = None) -> HomOperator:
    """Assemble a catalog operator.

    grad             R^r -> R^{r x n}
    div_rowwise      R^{r x n} -> R^r
    curl_generalized R^{r x n} -> R^{r x n(n-1)/2}
    curl_classical3  R^{3 x 3} -> R^{3 x 3}   (n = 3 only)
    inc3             R^{3 x 3} -> R^{3 x 3}   (n = 3 only, order 2)
    """

    if n < 2:
        raise ValueError("n must be at least 2")
    r = n if rows is None else rows
    if kind == "grad":
        dom = Space.vectors(r)
        codom = Space.matrices(r, n)
        coeffs = {}
        for j in range(n):
            m = zeros(codom.dim, dom.dim)
            for i in range(r):
                m[basis_index(n, i, j)][i] = ONE
            coeffs[_unit_alpha(n, j)] = m
        return HomOperator(1, n, dom, codom, coeffs, label="D")
    if kind == "div_rowwise":
        dom = Space.matrices(r, n)
        codom = Space.vectors(r)
        coeffs = {}
        for j in range(n):
            m = zeros(codom.dim, dom.dim)
            for i in range(r):
                m[i][basis_index(n, i, j)] = ONE
            coeffs[_unit_alpha(n, j)] = m
        return HomOperator(1, n, dom, codom, coeffs, label="Div")
    if kind == "curl_generalized":
        dom = Space.matrices(r, n)
        w = n * (n - 1) // 2
        codom = Space.matrices(r, w)
        coeffs = {}
        for j in range(n):
            e = [ZERO] * n
            e[j] = ONE
            cm = cross_matrix(e)  # w x n
            m = zeros(codom.dim, dom.dim)
            for i in range(r):
                for c in range(w):
                    for l in range(n):
                        if cm[c][l] != 0:
                            m[i * w + c][basis_index(n, i, l)] += cm[c][l]
            coeffs[_unit_alpha(n, j)] = m
        return HomOperator(1, n, dom, codom, coeffs, label="CurlGen")
    if kind == "curl_classical3":
        if n != 3 or (rows not in (None, 3)):
            raise ValueError("classical matrix curl requires n = 3 and 3 x 3 fields")
        dom = Space.matrices(3, 3)
        coeffs = {}
        for kdir in range(3):
            e = [ZERO] * 3
            e[kdir] = ONE
            a = anti(e)
            m = zeros(9, 9)
            for i in range(3):
                for j in range(3):
                    for l in range(3):
                        if a[l][j] != 0:
                            m[basis_index(3, i, j)][basis_index(3, i, l)] -= a[l][j]
            coeffs[_unit_alpha(3, kdir)] = m
        return HomOperator(1, 3, dom, dom, coeffs, label="Curl")
    if kind == "inc3":
        if n != 3 or (rows not in (None, 3)):
            raise ValueError("inc requires n = 3 and 3 x 3 fields")
        dom = Space.matrices(3, 3)
        units = []
        for d in range(3):
            e = [ZERO] * 3
            e[d] = ONE
            units.append(anti(e))
        coeffs = {}
        for a_dir in range(3):
            for b_dir in range(a_dir, 3):
                m = zeros(9, 9)
                pairs = [(a_dir, b_dir)]
                if a_dir != b_dir:
                    pairs.append((b_dir, a_dir))
                for (u, v) in pairs:
                    au, av = units[u], units[v]
                    # -Anti(e_u) P^T Anti(e_v)
                    for i in range(3):
                        for j in range(3):
                            for p in range(3):
                                for q in range(3):
                                    coef = -au[i][p] * av[q][j]
                                    if coef != 0:
                                        m[basis_index(3, i, j)][basis_index(3, q, p)] += coef
                coeffs[_unit_alpha(3, a_dir, b_dir)] = m
        return HomOperator(2, 3, dom, dom, coeffs, label="inc")
    raise ValueError(f"unknown operator kind: {kind}")


def compose_part(b_part: PartMap, op: HomOperator) -> HomOperator:
    """The operator x -> B_part[op x]; order is unchanged."""
    if b_part.domain.dim != op.codomain.dim:
        raise ValueError("part map domain does not match operator codomain")
    coeffs = {
        alpha: mat_mul(b_part.matrix, m) for alpha, m in op.coeffs.items()
    }
    label = op.label if b_part.name == "Id" else f"{b_part.name}({op.label})"
    return HomOperator(op.order, op.n, op.domain, b_part.codomain, coeffs, label=label)


def precompose_linear(op: HomOperator, lin_matrix, new_domain: Space, label=None) -> HomOperator:
    """The operator a -> op(L a) for a constant linear map L."""
    coeffs = {alpha: mat_mul(m, lin_matrix) for alpha, m in op.coeffs.items()}
    return HomOperator(
        op.order, op.n, new_domain, op.codomain, coeffs, label=label or op.label
    )


def compose_operators(outer: HomOperator, inner: HomOperator) -> HomOperator:
    """Differential composition outer(inner(.)); orders add."""
    if outer.domain.dim != inner.codomain.dim:
        raise ValueError("operator shapes do not compose")
    if outer.n != inner.n:
        raise ValueError("dimension mismatch")
    coeffs: Dict[Monomial, list] = {}
    for a2, m2 in outer.coeffs.items():
        for a1, m1 in inner.coeffs.items():
            gamma = tuple(x + y for x, y in zip(a2, a1))
            prod = mat_mul(m2, m1)
            if gamma in coeffs:
                coeffs[gamma] = [
                    [x + y for x, y in zip(r1, r2)] for r1, r2 in zip(coeffs[gamma], prod)
                ]
            else:
                coeffs[gamma] = prod
    return HomOperator(
        outer.order + inner.order,
        outer.n,
        inner.domain,
        outer.codomain,
        {g: tuple(tuple(row) for row in m) for g, m in coeffs.items()},
        label=f"{outer.label}.{inner.label}",
    )


def transpose_map(n: int) -> list:
    """Matrix of X -> X^T on row-major flattened R^{n x n}."""
    m = zeros(n * n, n * n)
    for i in range(n):
        for j in range(n):
            m[basis_index(n, j, i)][basis_index(n, i, j)] = ONE
    return m


def inc_via_curl() -> HomOperator:
    """inc as the composition Curl . transpose . Curl (n = 3)."""
    curl = build_operator("curl_classical3", 3)
    curl_t = precompose_linear(curl, transpose_map(3), curl.domain, label="Curl.T")
    return compose_operators(curl_t, curl)


# ---------------------------------------------------------------------------
# Symbolic application to polynomial fields
# ---------------------------------------------------------------------------


def apply_symbolic(op: HomOperator, f: PolyField) -> PolyField:
    """Exact result of op applied to a polynomial field."""
    if f.dim != op.domain.dim:
        raise ValueError("field dimension does not match operator domain")
    out = PolyField.zero(f.n, op.codomain.dim)
    for alpha, m in op.coeffs.items():
        out = out.add(f.diff_multi(alpha).map_linear(m))
    return out


def gradient_field(a: PolyField) -> PolyField:
    """Da as a matrix field, (Da)_{ij} = d_j a_i, row-major values."""
    comps = []
    for i in range(a.dim):
        for j in range(a.n):
            comps.append(a.diff(j).component(i))
    from .polynomials import PolyField as PF

    return PF.from_components(a.n, comps)


def divergence_poly(a: PolyField):
    """div a as a scalar polynomial."""
    from .polynomials import poly_add

    out = {}
    for i in range(a.n):
        out = poly_add(out, a.diff(i).component(i))
    return out


def _matrix_field_transpose(f: PolyField, n: int) -> PolyField:
    return f.map_linear(transpose_map(n))


def _identity_times(scalar_poly, n: int) -> PolyField:
    from .polynomials import PolyField as PF

    comps = []
    for i in range(n):
        for j in range(n):
            comps.append(dict(scalar_poly) if i == j else {})
    return PF.from_components(n, comps)


@dataclass
class NyeReport:
    ok: bool
    residual_curl: PolyField
    residual_gradient: PolyField
    residual_devsym: PolyField


def check_nye(a: PolyField) -> NyeReport:
    """Verify Nye's identities for a polynomial field a: R^3 -> R^3.

    Checks, with exact polynomial arithmetic,
      Curl Anti a = div a * 1 - (Da)^T,
      Da = tr(Curl Anti a)/2 * 1 - (Curl Anti a)^T,
      dev sym Curl Anti a = -dev sym Da,
    and returns the residual fields (all zero when the identities hold).
    """

    if a.n != 3 or a.dim != 3:
        raise ValueError("Nye's identities live on vector fields over R^3")
    curl = build_operator("curl_classical3", 3)
    anti_m = anti_matrix()
    curl_anti = apply_symbolic(
        precompose_linear(curl, anti_m, Space.vectors(3), label="Curl.Anti"), a
    )
    da = gradient_field(a)
    div_a = divergence_poly(a)
    rhs1 = _identity_times(div_a, 3).sub(_matrix_field_transpose(da, 3))
    res1 = curl_anti.sub(rhs1)

    from .polynomials import poly_scale

    trace_curl = {}
    from .polynomials import poly_add

    for i in range(3):
        trace_curl = poly_add(trace_curl, curl_anti.component(basis_index(3, i, i)))
    rhs2 = _identity_times(poly_scale(trace_curl, Fraction(1, 2)), 3).sub(
        _matrix_field_transpose(curl_anti, 3)
    )
    res2 = da.sub(rhs2)

    from .matrix_spaces import build_part_map

    devsym = build_part_map("devsym", 3)
    res3 = curl_anti.map_linear(devsym.matrix).add(da.map_linear(devsym.matrix))

    ok = res1.is_zero() and res2.is_zero() and res3.is_zero()
    return NyeReport(ok, res1, res2, res3)
