"""The polynomial corrector space K = { T a : B (T a) = 0 }.

For a part map A with parametrization T: R^M -> ker(A) and a homogeneous
operator B with constant coefficients, the fields annihilated pointwise
by A and distributionally by B form a space of polynomial fields.  It is
finite dimensional exactly when the restricted operator is complex
elliptic.  The solver works degree by degree: the homogeneous degree-d
slice is the exact nullspace of a rational linear system on coefficient
vectors, and the iteration stops at the first empty slice.  That stop
rule is sound because the kernel is closed under differentiation (A acts
pointwise, B has constant coefficients), so a nonempty slice above an
empty one would differentiate down to a contradiction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .exact import ONE, ZERO, clear_denominators, nullspace, solve
from .diffops import HomOperator, apply_symbolic, precompose_linear
from .matrix_spaces import PartMap, Space
from .polynomials import PolyField, grlex_key, monomials_of_degree

DEFAULT_DEGREE_CAP = 8


class DegreeCapExceededError(RuntimeError):
    """Raised when every degree up to the cap has a nonempty slice.

    Signals a non-complex-elliptic pair (infinite-dimensional kernel) or
    a cap that is genuinely too small.
    """

    def __init__(self, cap: int):
        super().__init__(
            f"kernel slices stay nonempty up to degree {cap}; "
            "the restricted operator is likely not complex elliptic"
        )
        self.cap = cap


@dataclass
class KernelBasis:
    """Exact basis of the corrector space for a pair (A, B)."""

    part_map: PartMap
    operator: HomOperator
    degree_bound: int
    basis: List[PolyField]          # V-valued fields T a
    coordinate_basis: List[PolyField]  # the corresponding R^M-valued a
    dim: int

    def to_json(self) -> dict:
        return {
            "A": self.part_map.to_json(),
            "operator": self.operator.label,
            "degree_bound": self.degree_bound,
            "dim": self.dim,
            "basis": [f.to_json() for f in self.basis],
        }


def _reduced_operator(a: PartMap, b: HomOperator) -> Tuple[HomOperator, "object"]:
    if a.domain.dim != b.domain.dim:
        raise ValueError("operator domain does not match part map domain")
    t = a.parametrization()
    reduced = precompose_linear(
        b, [list(r) for r in t.matrix], Space(t.M) if t.M else Space(1), label="B.T"
    )
    return reduced, t


def kernel_polynomials(
    a: PartMap, b: HomOperator, degree_cap: int = DEFAULT_DEGREE_CAP
) -> KernelBasis:
    """Exact polynomial basis of {T a : B T a = 0}, solved slice by slice."""

    t = a.parametrization()
    n = b.n
    if t.M == 0:
        return KernelBasis(a, b, -1, [], [], 0)
    reduced, _ = _reduced_operator(a, b)
    coord_fields: List[PolyField] = []
    top_degree = -1
    for d in range(degree_cap + 1):
        slice_fields = _degree_slice(reduced, t.M, n, d)
        if not slice_fields:
            basis = [f.map_linear([list(r) for r in t.matrix]) for f in coord_fields]
            return KernelBasis(a, b, top_degree, basis, coord_fields, len(basis))
        coord_fields.extend(slice_fields)
        top_degree = d
    raise DegreeCapExceededError(degree_cap)


def _degree_slice(reduced: HomOperator, m_dim: int, n: int, d: int) -> List[PolyField]:
    """Homogeneous degree-d solutions of the reduced operator."""
    monos = monomials_of_degree(n, d)
    unknowns = [(j, mono) for mono in monos for j in range(m_dim)]
    out_deg = d - reduced.order
    if out_deg < 0:
        # order-k operators annihilate anything of lower degree
        return [
            PolyField(n, m_dim, {mono: tuple(ONE if i == j else ZERO for i in range(m_dim))})
            for (j, mono) in unknowns
        ]
    out_monos = monomials_of_degree(n, out_deg)
    out_index = {mm: i for i, mm in enumerate(out_monos)}
    w_dim = reduced.codomain.dim
    rows = w_dim * len(out_monos)
    cols = len(unknowns)
    matrix = [[ZERO] * cols for _ in range(rows)]
    for col, (j, mono) in enumerate(unknowns):
        unit = PolyField(
            n, m_dim, {mono: tuple(ONE if i == j else ZERO for i in range(m_dim))}
        )
        image = apply_symbolic(reduced, unit)
        for mm, vec in image.terms.items():
            base = out_index[mm] * w_dim
            for w in range(w_dim):
                if vec[w] != 0:
                    matrix[base + w][col] = vec[w]
    kernel = nullspace(matrix)
    fields = []
    for vec in kernel:
        vec = clear_denominators(vec)
        terms = {}
        for col, (j, mono) in enumerate(unknowns):
            if vec[col] != 0:
                cur = list(terms.get(mono, (ZERO,) * m_dim))
                cur[j] = vec[col]
                terms[mono] = tuple(cur)
        fields.append(PolyField(n, m_dim, terms))
    return fields


def kernel_dim(a: PartMap, b: HomOperator, degree_cap: int = DEFAULT_DEGREE_CAP) -> int:
    return kernel_polynomials(a, b, degree_cap).dim


def spans_derivatives(kb: KernelBasis) -> bool:
    """Closure under differentiation: d_i of any element stays in the span."""
    if kb.dim == 0:
        return True
    fields = kb.coordinate_basis
    n = fields[0].n
    monos = sorted({m for f in fields for m in f.terms}, key=grlex_key)
    index = {m: i for i, m in enumerate(monos)}
    m_dim = fields[0].dim

    def coords(f: PolyField):
        v = [ZERO] * (len(monos) * m_dim)
        for m, vec in f.terms.items():
            if m not in index:
                return None
            for j in range(m_dim):
                v[index[m] * m_dim + j] = vec[j]
        return v

    span = [coords(f) for f in fields]
    for f in fields:
        for i in range(n):
            df = f.diff(i)
            if df.is_zero():
                continue
            target = coords(df)
            if target is None:
                return False
            aug_rows = list(zip(*span))
            if solve([list(r) for r in aug_rows], target) is None:
                return False
    return True


# ---------------------------------------------------------------------------
# Least-squares projection of sampled fields onto span(K)
# ---------------------------------------------------------------------------

IRLS_MAX_ITER = 50
IRLS_TOL = 1e-9


def project_samples(
    values: np.ndarray,
    points: np.ndarray,
    basis_fields: Sequence[PolyField],
    q: float = 2.0,
    weights: Optional[np.ndarray] = None,
):
    """Minimize the discrete L^q norm of values - sum c_k basis_k(points).

    values: (npts, dim) samples, points: (npts, n) coordinates.  The
    q = 2 path solves the normal equations in closed form; general q runs
    iteratively reweighted least squares seeded by the q = 2 solution.
    Returns (coefficients, residual_norm).
    """

    npts, dim = values.shape
    if weights is None:
        weights = np.ones(npts)
    cols = [polyfield_samples(f, points) for f in basis_fields]
    if not cols:
        res = _lq_norm(values, weights, q)
        return np.zeros(0), res
    phi = np.stack(cols, axis=-1)  # (npts, dim, K)
    k = phi.shape[-1]
    phi_flat = phi.reshape(npts * dim, k)
    if np.linalg.matrix_rank(phi_flat) < k:
        raise RuntimeError("rank-deficient projection basis; sampling bug")
    y = values.reshape(npts * dim)
    w_flat = np.repeat(weights, dim)
    coeff = _weighted_lstsq(phi_flat, y, w_flat)
    if abs(q - 2.0) > 1e-12:
        for _ in range(IRLS_MAX_ITER):
            resid = (values - (phi @ coeff)).reshape(npts, dim)
            point_norm = np.sqrt((resid**2).sum(axis=1))
            floor = max(point_norm.max(), 1e-300) * 1e-12
            irls_w = weights * np.maximum(point_norm, floor) ** (q - 2.0)
            new_coeff = _weighted_lstsq(phi_flat, y, np.repeat(irls_w, dim))
            delta = np.linalg.norm(new_coeff - coeff)
            scale = max(np.linalg.norm(coeff), 1e-300)
            coeff = new_coeff
            if delta / scale < IRLS_TOL:
                break
    resid = values - (phi @ coeff)
    return coeff, _lq_norm(resid, weights, q)


def polyfield_samples(f: PolyField, points: np.ndarray) -> np.ndarray:
    """Float samples of a polynomial field at (npts, n) coordinates."""
    npts = len(points)
    out = np.zeros((npts, f.dim))
    for mono, vec in f.terms.items():
        factor = np.ones(npts)
        for i, e in enumerate(mono):
            if e:
                factor = factor * points[:, i] ** e
        out += np.outer(factor, np.array([float(x) for x in vec]))
    return out


def _weighted_lstsq(a, y, w):
    sw = np.sqrt(w)
    sol, *_ = np.linalg.lstsq(a * sw[:, None], y * sw, rcond=None)
    return sol


def _lq_norm(resid: np.ndarray, weights: np.ndarray, q: float) -> float:
    point_norm = np.sqrt((resid.reshape(len(weights), -1) ** 2).sum(axis=1))
    return float((weights * point_norm**q).sum() ** (1.0 / q))


def project_onto_kernel(field, kb: KernelBasis, domain=None, q: float = 2.0):
    """Best corrector in span(K) for a sampled field, plus the residual.

    ``field`` is a grid field (interior samples are used as the domain
    Omega); returns the minimizer as a PolyField with exact coefficients
    recovered from the float solution, and the quadrature residual norm.
    """

    dom = domain if domain is not None else field.domain
    points = dom.interior_coords()
    values = field.interior_values()
    weights = np.full(len(points), dom.cell_volume())
    coeff, resid = project_samples(values, points, kb.basis, q=q, weights=weights)
    combo = PolyField.zero(kb.basis[0].n if kb.basis else dom.n, field.values.shape[-1])
    for c, f in zip(coeff, kb.basis):
        combo = combo.add(f.scale(Fraction(float(c))))
    return combo, resid
