# tensor.py
"""
Tensoring an inclusion B ⊂ A by a full matrix algebra M_m: the tensored
inclusion B⊗M_m ⊂ A⊗M_m, the correspondence between intermediates on both
levels, the basic construction of the tensored inclusion and the stability
of angles.
"""
from dataclasses import dataclass, field

import numpy as np

import config
from angle import angle
from basic_construction import a1_dimension, basic_construction, gns
from errors import CorrespondenceViolation, NotIntermediate, SpecError, TensorSizeExceeded, VerificationError
from expectation import QuasiBasis, quasi_basis, reconstruction_residual, trace_preserving_expectation, watatani_index
from inclusion import ConcreteAlgebra, UnitalInclusion, inclusion_matrix, relative_commutant, subspace_distance
from multimatrix import AmbientAlgebra, TraceFunctional, null_space, operator_norm, orthonormal_rows


@dataclass(eq=False)
class TensorInstance:
    base: UnitalInclusion
    trace: object
    m: int
    tensored: UnitalInclusion
    tensored_trace: object
    base_index: object = None
    tensored_index: object = None
    checks: dict = field(default_factory=dict)

    def lift(self, a):
        return np.kron(a, np.eye(self.m))

    def lift_algebra(self, c):
        return tensor_algebra(c, self.m)


@dataclass
class StabilityResult:
    base: object
    tensored: object
    difference: float


def _matrix_units(m):
    units = np.zeros((m * m, m, m), dtype=complex)
    for k in range(m * m):
        units[k, k // m, k % m] = 1.0
    return units


def tensor_algebra(c, m, label=""):
    """C ⊗ M_m, basis kron(c_k, e_ij) in canonical order."""
    units = _matrix_units(m)
    size = c.size * m
    mats = np.einsum("aij,bkl->abikjl", c.matrices(), units).reshape(-1, size, size)
    return ConcreteAlgebra(mats.reshape(len(mats), -1), size, label or f"{c.label}⊗M{m}", is_full=c.is_full)


def tensored_gns_dim(inc, m):
    return inc.sup.dim * m * m


def tensor_inclusion(inc, tau, m):
    """
    B⊗M_m ⊂ A⊗M_m with τ⊗tr_m. Checks that {λ_i ⊗ 1} is a quasi-basis of
    E⊗id and that Ind_w(E⊗id) = Ind_w(E) ⊗ 1.
    """
    if int(m) != m or m < 2:
        raise SpecError(f"tensor factor must be an integer ≥ 2, got {m!r}")
    if tensored_gns_dim(inc, m) > config.MAX_TENSOR_GNS_DIM:
        raise TensorSizeExceeded(f"tensored GNS dimension {tensored_gns_dim(inc, m)} exceeds {config.MAX_TENSOR_GNS_DIM}")
    sub = tensor_algebra(inc.sub, m)
    sup = tensor_algebra(inc.sup, m)
    tensored = UnitalInclusion(sub, sup, f"{inc.label}⊗M{m}")
    tau_m = tau.tensor(m)

    e = trace_preserving_expectation(inc.sup, inc.sub, tau)
    base_index = watatani_index(quasi_basis(e))
    e_m = trace_preserving_expectation(sup, sub, tau_m)
    lifted = np.array([np.kron(x, np.eye(m)) for x in quasi_basis(e).elements])
    lifted_qb = QuasiBasis(lifted, e_m, "lifted")
    ti = TensorInstance(inc, tau, m, tensored, tau_m, base_index)
    ti.checks["lifted_reconstruction"] = reconstruction_residual(lifted_qb)
    if ti.checks["lifted_reconstruction"] > 1e-8:
        raise VerificationError("{λ ⊗ 1} is a quasi-basis of E⊗id", ti.checks["lifted_reconstruction"])
    lifted_index = np.einsum("nij,nkj->ik", lifted, np.conj(lifted))
    ti.checks["index_tensor_identity"] = float(np.linalg.norm(lifted_index - np.kron(base_index.element, np.eye(m)), 2))
    if ti.checks["index_tensor_identity"] > 1e-8 * max(1.0, base_index.norm):
        raise VerificationError("Ind(E⊗id) = Ind(E)⊗1", ti.checks["index_tensor_identity"])

    ti.tensored_index = watatani_index(quasi_basis(e_m))
    ti.checks["index_norm_difference"] = abs(ti.tensored_index.norm - base_index.norm)
    return ti


def detensor(big, ti):
    """
    C = {a ∈ A : a ⊗ e_00 ∈ M} for B⊗M_m ⊆ M ⊆ A⊗M_m, verified to satisfy
    M = C ⊗ M_m.
    """
    if not (big.contains_algebra(ti.tensored.sub) and ti.tensored.sup.contains_algebra(big)):
        raise NotIntermediate(f"{big.label or 'algebra'} is not between the tensored algebras")
    m = ti.m
    corner = np.zeros((m, m))
    corner[0, 0] = 1.0
    sup = ti.base.sup
    lifted = np.array([np.kron(a, corner) for a in sup.matrices()]).reshape(sup.dim, -1)
    rest = lifted - (lifted @ np.conj(big.vectors.T)) @ big.vectors
    combos = null_space(rest.T).T
    small = ConcreteAlgebra(orthonormal_rows(combos @ sup.vectors, rtol=0.0, atol=1e-12), sup.size, f"detensor({big.label})")

    if big.dim != m * m * small.dim:
        raise CorrespondenceViolation("dim M = m² dim C", float(abs(big.dim - m * m * small.dim)))
    distance = subspace_distance(tensor_algebra(small, m), big)
    if distance > 1e-8:
        raise CorrespondenceViolation("M = C ⊗ M_m", distance)
    return small


def gns_identification(g_base, g_tensored, m):
    """
    Unitary W from L²(A,τ) ⊗ L²(M_m,tr) onto L²(A⊗M_m, τ⊗tr): column (p, q)
    holds the coordinates of u_p ⊗ f_q, with f_q = √m e_ij.
    """
    f = _matrix_units(m) * np.sqrt(m)
    size = g_tensored.algebra.size
    products = np.einsum("pij,qkl->pqikjl", g_base.ons, f).reshape(-1, size, size)
    return g_tensored.coords_many(products).T


def tensor_basic_check(ti, samples=3, seed=None):
    """
    Compare the basic construction of B⊗M_m ⊂ A⊗M_m with A₁ ⊗ M_m under the
    GNS identification W, without building either A₁ as a subspace.

    W carries the generators L(x)⊗1, 1⊗L(y) and e_B⊗1 of A₁ ⊗ L(M_m) onto
    L(x⊗1), L(1⊗y) and the tensored Jones projection, and the images commute
    with right multiplication by B⊗M_m, so W(A₁⊗L(M_m))W* ⊆ R(B⊗M_m)′.
    Equality follows from m²·dim A₁ = dim R(B⊗M_m)′, both counted from the
    inclusion matrices.
    """
    m = ti.m
    if tensored_gns_dim(ti.base, m) > config.MAX_BASIC_CHECK_DIM:
        raise TensorSizeExceeded(f"tensored GNS dimension {tensored_gns_dim(ti.base, m)} is above {config.MAX_BASIC_CHECK_DIM} for the basic-construction check")
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    bc_base = basic_construction(ti.base, ti.trace, build_algebra=False)
    bc_big = basic_construction(ti.tensored, ti.tensored_trace, build_algebra=False)
    g_base, g_big = bc_base.gns, bc_big.gns
    w = gns_identification(g_base, g_big, m)
    w_adj = np.conj(w.T)
    unitarity = float(np.linalg.norm(w_adj @ w - np.eye(w.shape[1]), 2))

    full_m = AmbientAlgebra.full_matrix(m)
    g_m = gns(ConcreteAlgebra.full(m), TraceFunctional.normalized(full_m))
    eye_base, eye_m = np.eye(g_base.dim), np.eye(m * m)

    e_lift = w @ np.kron(bc_base.e.matrix, eye_m) @ w_adj
    e_difference = float(np.linalg.norm(e_lift - bc_big.e.matrix, 2))
    transported, intertwining = [e_lift], 0.0
    for _ in range(samples):
        x = ti.base.sup.random_element(rng)
        y = full_m.random_element(rng)
        pairs = [
            (np.kron(g_base.left_rep(x), eye_m), g_big.left_rep(np.kron(x, np.eye(m)))),
            (np.kron(eye_base, g_m.left_rep(y)), g_big.left_rep(np.kron(np.eye(ti.base.size), y))),
        ]
        for small, big in pairs:
            image = w @ small @ w_adj
            intertwining = max(intertwining, operator_norm(image - big) / max(1.0, operator_norm(big)))
            transported.append(image)

    commutation = 0.0
    for _ in range(samples):
        r = g_big.right_rep(ti.tensored.sub.random_element(rng))
        scale = max(1.0, operator_norm(r))
        for t in transported:
            commutation = max(commutation, operator_norm(t @ r - r @ t) / (scale * max(1.0, operator_norm(t))))

    base_count = a1_dimension(inclusion_matrix(ti.base))
    big_count = a1_dimension(inclusion_matrix(ti.tensored))
    count_defect = abs(big_count - m * m * base_count)

    distance = max(intertwining, commutation)
    ti.checks["basic_construction_distance"] = distance
    ti.checks["generator_intertwining"] = intertwining
    ti.checks["right_commutation"] = commutation
    ti.checks["dimension_count_defect"] = float(count_defect)
    ti.checks["jones_projection_difference"] = e_difference
    ti.checks["identification_unitarity"] = unitarity
    passed = distance <= 1e-7 and e_difference <= 1e-7 and unitarity <= 1e-8 and count_defect == 0
    return distance, passed


def commutant_stability(ti):
    """Distance between (B⊗M_m)′∩(A⊗M_m) and (B′∩A)⊗1."""
    small = relative_commutant(ti.base.sub, ti.base.sup)
    m = ti.m
    lifted = ConcreteAlgebra.from_spanning(np.array([np.kron(z, np.eye(m)) for z in small.matrices()]), small.size * m)
    big = relative_commutant(ti.tensored.sub, ti.tensored.sup)
    return subspace_distance(lifted, big)


def stability_check(inc, c, d, tau, m, ti=None):
    """Angle of (C, D) in B ⊂ A against the angle of (C⊗M_m, D⊗M_m) in B⊗M_m ⊂ A⊗M_m."""
    ti = ti or tensor_inclusion(inc, tau, m)
    base = angle(inc, c, d, tau)
    bc_big = basic_construction(ti.tensored, ti.tensored_trace, build_algebra=False)
    big = angle(ti.tensored, tensor_algebra(c, m), tensor_algebra(d, m), ti.tensored_trace, bc_big)
    return StabilityResult(base, big, abs(base.angle - big.angle))
