# basic_construction.py
"""
GNS realization L²(A, τ), Jones projections, the basic construction
A₁ = span{x e_B y}, the dual expectation E₁ and the relative commutant B′∩A₁.

Operators on the GNS space are d x d matrices in the coordinates of an
orthonormal basis of A for ⟨x, y⟩ = τ(x*y); every algebra living there is an
ordinary ConcreteAlgebra of size d.
"""
from dataclasses import dataclass, field

import numpy as np

import config
from errors import IndexNotScalar, InconsistentExtension, NotSubalgebra, VerificationError
from expectation import (
    ConditionalExpectation,
    QuasiBasis,
    quasi_basis,
    reconstruction_residual,
    trace_gram,
    trace_preserving_expectation,
    watatani_index,
)
from inclusion import (
    ConcreteAlgebra,
    block_structure,
    relative_commutant,
    subalgebra_from_generators,
    subspace_distance,
)
from multimatrix import adjoint, operator_norm, orthonormal_rows


@dataclass(eq=False)
class GNSRealization:
    algebra: ConcreteAlgebra
    trace: object
    ons: np.ndarray

    def __post_init__(self):
        self._flat = self.ons.reshape(self.dim, -1)
        self._flat_conj = np.conj(self._flat)

    @property
    def dim(self):
        return self.ons.shape[0]

    def coords(self, x):
        """Coordinates ⟨u_p, x⟩ = τ(u_p* x) of x ∈ A."""
        return self._flat_conj @ (x @ self.trace.density).reshape(-1)

    def coords_many(self, xs):
        xs = np.asarray(xs)
        return (xs @ self.trace.density).reshape(len(xs), -1) @ self._flat_conj.T

    def decode(self, xi):
        return (np.asarray(xi) @ self._flat).reshape(self.algebra.size, self.algebra.size)

    def decode_many(self, xis):
        n = self.algebra.size
        return (np.asarray(xis) @ self._flat).reshape(-1, n, n)

    def left_rep(self, a):
        return self.coords_many(a @ self.ons).T

    def left_rep_many(self, xs):
        xs = np.asarray(xs)
        if len(xs) == 0:
            return np.zeros((0, self.dim, self.dim), dtype=complex)
        prods = np.einsum("sij,djk->sdik", xs, self.ons).reshape(-1, self.algebra.size, self.algebra.size)
        return np.swapaxes(self.coords_many(prods).reshape(len(xs), self.dim, self.dim), 1, 2)

    def right_rep(self, b):
        """R_b: x ↦ x b."""
        return self.coords_many(self.ons @ b).T

    def right_rep_many(self, xs):
        return np.array([self.right_rep(b) for b in xs])

    def left_image(self, s, label=""):
        return ConcreteAlgebra.from_spanning(self.left_rep_many(s.matrices()), self.dim, label or f"L({s.label})")

    def right_image(self, s, label=""):
        return ConcreteAlgebra.from_spanning(self.right_rep_many(s.matrices()), self.dim, label or f"R({s.label})")

    def orthonormality_residual(self):
        gram = self.coords_many(self.ons)
        return float(np.max(np.abs(gram - np.eye(self.dim)), initial=0.0))


@dataclass(eq=False)
class JonesProjection:
    matrix: np.ndarray
    target: ConcreteAlgebra
    rank: int

    def residual(self):
        """Distance from being a self-adjoint idempotent."""
        e = self.matrix
        return max(float(np.linalg.norm(e @ e - e, 2)), float(np.linalg.norm(e - adjoint(e), 2)))


class DualMap:
    """
    E₁ given directly on operators of the GNS space:
        E₁(x) = Ind⁻¹ Σ_i decode(x λ̂_i) λ_i*
    for a quasi-basis {λ_i} of E. On A₁ this is the dual expectation; the
    value is returned as the left multiplication operator L_{E₁(x)}.
    """

    def __init__(self, g, qb, index, right_sub):
        self.gns = g
        self.lam = qb.elements
        self.lam_hat = g.coords_many(self.lam)
        self.lam_star = adjoint(self.lam)
        self.index_inv = np.linalg.inv(index.element)
        self.right_sub = right_sub

    @property
    def size(self):
        return self.gns.dim

    def element_many(self, ops):
        ops = np.asarray(ops)
        cols = ops @ self.lam_hat.T
        vecs = np.einsum("sdn,dij->snij", cols, self.gns.ons)
        summed = np.einsum("snij,njk->sik", vecs, self.lam_star)
        return self.index_inv @ summed

    def element(self, op):
        return self.element_many(op[None])[0]

    def apply_many(self, ops):
        return self.gns.left_rep_many(self.element_many(ops))

    def apply(self, op):
        return self.apply_many(op[None])[0]

    def commutation_residual(self, x):
        rb = self.right_sub.matrices()
        return float(np.max(np.linalg.norm(x @ rb - rb @ x, axis=(1, 2)), initial=0.0))

    def contains(self, x, tol=1e-9):
        """Membership in A₁ = (R_B)′."""
        return self.commutation_residual(x) <= tol * max(1.0, operator_norm(x))


@dataclass(eq=False)
class BasicConstructionData:
    inclusion: object
    trace: object
    gns: GNSRealization
    expectation: ConditionalExpectation
    quasi_basis: QuasiBasis
    index: object
    e: JonesProjection
    left_sup: ConcreteAlgebra
    left_sub: ConcreteAlgebra
    right_sub: ConcreteAlgebra
    dual: DualMap
    a1: ConcreteAlgebra = None
    checks: dict = field(default_factory=dict)

    @property
    def index_used(self):
        return self.index


@dataclass
class DualIndexCheck:
    index: object
    dual_index: object
    equal: bool
    residual: float


def gns(a, tau):
    """Löwdin-orthonormalized basis of A for ⟨x, y⟩ = τ(x*y)."""
    gram = trace_gram(a, tau)
    w, v = np.linalg.eigh(gram)
    inv_sqrt = (v / np.sqrt(w)) @ np.conj(v.T)
    ons = np.einsum("kp,kij->pij", inv_sqrt, a.matrices())
    return GNSRealization(a, tau, ons)


def jones_projection(g, s):
    if not g.algebra.contains_algebra(s):
        raise NotSubalgebra(f"{s.label or 'subalgebra'} is not contained in {g.algebra.label or 'the GNS algebra'}")
    rows = orthonormal_rows(g.coords_many(s.matrices()))
    return JonesProjection(rows.T @ np.conj(rows), s, rows.shape[0])


def _span_of_products(left, e, right):
    """All L_x e L_y as a (len(left) * len(right), d, d) stack."""
    le = left @ e
    d = e.shape[0]
    return np.einsum("aij,bjk->abik", le, right).reshape(-1, d, d)


def a1_dimension(lam):
    """dim R(B)′ on L²(A): Σ_i (Σ_j λ_ij a_j)² for the inclusion matrix data lam."""
    blocks = lam.lam @ np.array(lam.sup_dims.dims)
    return int(np.sum(blocks * blocks))


def build_a1(bc):
    """Build A₁ as a subspace and run the structural checks on it."""
    if bc.a1 is not None:
        return bc.a1
    d = bc.gns.dim
    gens = np.concatenate([bc.left_sup.hermitian_basis(), bc.e.matrix[None]])
    a1 = subalgebra_from_generators(d, gens, "A1")
    lx = bc.gns.left_rep_many(bc.gns.ons)
    span = ConcreteAlgebra.from_spanning(_span_of_products(lx, bc.e.matrix, lx), d, "span{xey}")
    bc.checks["span_dimension"] = float(abs(span.dim - a1.dim))
    bc.checks["span_distance"] = subspace_distance(span, a1)
    if bc.checks["span_distance"] > 1e-8:
        raise VerificationError("A1 is the span of x e y", bc.checks["span_distance"])
    comm = relative_commutant(bc.right_sub, ConcreteAlgebra.full(d), "R(B)'")
    bc.checks["commutant_of_right_b"] = subspace_distance(a1, comm)
    if bc.checks["commutant_of_right_b"] > 1e-8:
        raise VerificationError("A1 equals the commutant of right multiplication by B", bc.checks["commutant_of_right_b"])
    bc.a1 = a1
    return a1


def basic_construction(inc, tau, build_algebra=True):
    """
    Jones basic construction of inc.sub ⊂ inc.sup on L²(sup, τ). With
    build_algebra=False only the projection, quasi-basis and the dual map are
    prepared, and A₁ itself is never materialized.
    """
    g = gns(inc.sup, tau)
    e_map = trace_preserving_expectation(inc.sup, inc.sub, tau)
    qb = quasi_basis(e_map)
    index = watatani_index(qb)
    e = jones_projection(g, inc.sub)
    left_sup = g.left_image(inc.sup, "L(A)")
    left_sub = g.left_image(inc.sub, "L(B)")
    right_sub = g.right_image(inc.sub, "R(B)")

    lam_ops = g.left_rep_many(qb.elements)
    unit = np.einsum("nij,jk,nlk->il", lam_ops, e.matrix, np.conj(lam_ops))
    unit_residual = float(np.linalg.norm(unit - np.eye(g.dim), 2))
    if unit_residual > 1e-8:
        raise VerificationError("Σ λ e λ* = 1", unit_residual)

    dual = DualMap(g, qb, index, right_sub)
    markov = index.element @ dual.element(e.matrix) - np.eye(inc.size)
    bc = BasicConstructionData(inc, tau, g, e_map, qb, index, e, left_sup, left_sub, right_sub, dual)
    bc.checks["unit_criterion"] = unit_residual
    bc.checks["markov_identity"] = float(np.linalg.norm(markov, 2))
    bc.checks["jones_projection"] = e.residual()
    if build_algebra:
        build_a1(bc)
    return bc


def jones_compression_residual(bc, samples=4, seed=None):
    """Largest ‖e L_a e − L_{E(a)} e‖ over sampled a ∈ A."""
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    e = bc.e.matrix
    worst = 0.0
    for _ in range(samples):
        a = bc.inclusion.sup.random_element(rng)
        la = bc.gns.left_rep(a)
        lea = bc.gns.left_rep(bc.expectation.apply(a))
        worst = max(worst, float(np.linalg.norm(e @ la @ e - lea @ e, 2)) / max(1.0, operator_norm(la)))
    return worst


def pushdown_residual(bc, samples=4, seed=None):
    """Largest ‖x e − L_{Ind·E₁(x e)} e‖ over sampled x ∈ A₁."""
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    g, e = bc.gns, bc.e.matrix
    worst = 0.0
    for _ in range(samples):
        la = g.left_rep(bc.inclusion.sup.random_element(rng))
        lc = g.left_rep(bc.inclusion.sup.random_element(rng))
        ld = g.left_rep(bc.inclusion.sup.random_element(rng))
        x = la @ e @ lc + ld
        pushed = g.left_rep(bc.index.element @ bc.dual.element(x @ e))
        worst = max(worst, float(np.linalg.norm(x @ e - pushed @ e, 2)) / max(1.0, operator_norm(x)))
    return worst


def dual_expectation(bc):
    """
    E₁: A₁ → L_A fitted by least squares to E₁(L_x e L_y) = L_{Ind⁻¹xy} and
    E₁ = id on L_A. The fit residual measures well-definedness.
    """
    a1 = build_a1(bc)
    g = bc.gns
    lx = g.left_rep_many(g.ons)
    products = _span_of_products(lx, bc.e.matrix, lx)
    pair_values = np.einsum("aij,bjk->abik", g.ons, g.ons).reshape(-1, g.algebra.size, g.algebra.size)
    targets = g.left_rep_many(np.linalg.inv(bc.index.element) @ pair_values)
    la = bc.left_sup.matrices()

    lhs = a1.coords_many(np.concatenate([products, la]))
    rhs = a1.coords_many(np.concatenate([targets, la]))
    solution, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    residual = float(np.linalg.norm(lhs @ solution - rhs)) / max(1.0, float(np.linalg.norm(rhs)))
    if residual > 1e-8:
        raise InconsistentExtension("E1(x e y) = Ind^-1 x y extends linearly", residual)
    e1 = ConditionalExpectation(a1, bc.left_sup, solution.T, None, "E1")
    basis = a1.matrices()
    bc.checks["dual_least_squares"] = residual
    bc.checks["dual_formula_agreement"] = float(np.max(np.linalg.norm(e1.apply_many(basis) - bc.dual.apply_many(basis), axis=(1, 2)), initial=0.0))
    return e1


def dual_index_check(bc):
    """Ind_w(E₁) from the quasi-basis {λ_i e Ind^{1/2}}, compared with Ind_w(E)."""
    if not bc.index.is_scalar:
        raise IndexNotScalar("scalar index", None, "the dual index check needs a scalar Watatani index")
    e1 = dual_expectation(bc)
    c = bc.index.scalar
    mu = np.sqrt(c) * (bc.gns.left_rep_many(bc.quasi_basis.elements) @ bc.e.matrix)
    qb1 = QuasiBasis(mu, e1, "dual")
    residual = reconstruction_residual(qb1)
    if residual > 1e-8:
        raise VerificationError("dual quasi-basis reconstruction", residual)
    dual_index = watatani_index(qb1)
    equal = dual_index.is_scalar and abs(dual_index.scalar - c) <= 1e-7 * max(1.0, c)
    return DualIndexCheck(bc.index, dual_index, bool(equal), residual)


def higher_commutant(inc, bc, seed=None):
    """B′∩A₁ inside the basic construction, with its block structure."""
    a1 = build_a1(bc)
    comm = relative_commutant(bc.left_sub, a1, "B' ^ A1", seed)
    return comm, block_structure(comm, seed)
