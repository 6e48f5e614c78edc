# expectation.py
"""
Conditional expectations onto subalgebras, quasi-bases and the Watatani
index, the Pimsner-Popa constant and the minimal-index search.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.optimize import minimize

import config
from errors import (
    DegenerateModule,
    NotCentral,
    NotSubalgebra,
    SearchDidNotConverge,
    ShapeMismatch,
    TraceNotFaithful,
    VerificationError,
)
from inclusion import block_structure, inclusion_matrix, trace_from_block_weights
from multimatrix import adjoint, hermitian_part, operator_norm, random_unit_vectors, trace_defect

_PP_BATCH = 2000


@dataclass(eq=False)
class ConditionalExpectation:
    """
    E: source -> target stored as a matrix on the coordinates of source:
    column k holds the coordinates of E(basis_k).
    """

    source: object
    target: object
    map_matrix: np.ndarray
    trace: object = None
    label: str = ""

    def apply(self, x):
        return self.source.element(self.map_matrix @ self.source.coords(x))

    def apply_many(self, xs):
        if len(xs) == 0:
            return np.zeros((0, self.source.size, self.source.size), dtype=complex)
        return self.source.elements(self.source.coords_many(xs) @ self.map_matrix.T)

    def contains(self, x, tol=1e-9):
        return self.source.contains(x, tol)

    @property
    def size(self):
        return self.source.size


@dataclass(eq=False)
class QuasiBasis:
    elements: np.ndarray
    expectation: ConditionalExpectation
    pivot: str = "forward"

    def __len__(self):
        return len(self.elements)


@dataclass(eq=False)
class IndexValue:
    element: np.ndarray
    scalar: float = None
    block_values: tuple = ()
    residuals: dict = field(default_factory=dict)

    @property
    def norm(self):
        return operator_norm(self.element)

    @property
    def is_scalar(self):
        return self.scalar is not None

    def to_dict(self):
        return {
            "scalar": self.scalar,
            "block_values": list(self.block_values),
            "norm": self.norm,
        }


@dataclass
class PPConstant:
    value: float
    certificate: np.ndarray = field(repr=False, default=None)
    block: int = None
    samples: int = 0


@dataclass(eq=False)
class MinimalIndexResult:
    index: IndexValue
    trace: object
    regime: str
    value: float
    weights: tuple
    formula_residual: float = 0.0
    converged: bool = True
    optimality_gap: float = 0.0


def trace_gram(a, tau):
    """Gram matrix τ(m_k* m_l) of the stored basis of A; raises unless positive definite."""
    if tau.size != a.size:
        raise ShapeMismatch(f"trace acts on {tau.size}, algebra on {a.size}")
    mats = a.matrices()
    gram = hermitian_part(np.conj(a.vectors) @ (mats @ tau.density).reshape(a.dim, -1).T)
    w = np.linalg.eigvalsh(gram)
    if w[0] <= 1e-12 * max(1.0, w[-1]):
        raise TraceNotFaithful(f"trace is not faithful on {a.label or 'algebra'} (smallest Gram eigenvalue {w[0]:.3e})")
    return gram


def trace_preserving_expectation(a, s, tau, label=""):
    """The τ-preserving conditional expectation of A onto S, as the τ-orthogonal projection."""
    if not a.contains_algebra(s):
        raise NotSubalgebra(f"{s.label or 'target'} is not contained in {a.label or 'source'}")
    gram = trace_gram(a, tau)
    rng = np.random.default_rng(config.SEED)
    samples = [a.random_element(rng) for _ in range(3)]
    defect = trace_defect(tau, samples)
    if defect > 1e-8 * max(1.0, max(np.linalg.norm(x) for x in samples) ** 2):
        raise TraceNotFaithful(f"functional is not tracial on {a.label or 'algebra'} (defect {defect:.3e})")

    q = a.coords_many(s.matrices()).T
    qg = np.conj(q.T) @ gram
    p = q @ np.linalg.solve(qg @ q, qg)
    return ConditionalExpectation(a, s, p, tau, label or f"E[{a.label}->{s.label}]")


def restricted_expectation(source, target, apply_many, trace=None, label=""):
    """Wrap any map sending `source` onto `target` as a ConditionalExpectation on source."""
    images = apply_many(source.matrices())
    return ConditionalExpectation(source, target, source.coords_many(images).T, trace, label)


def verify_expectation(e, samples=4, seed=None):
    """Residuals of the defining properties; all should be at rounding level."""
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    n = e.size
    p = e.map_matrix
    out = {"idempotent": float(np.linalg.norm(p @ p - p, 2))}
    out["unital"] = float(np.linalg.norm(e.apply(np.eye(n)) - np.eye(n)))
    images = e.apply_many(e.source.matrices())
    out["range"] = float(np.max(e.target.residual_many(images), initial=0.0))
    out["rank"] = float(abs(np.linalg.matrix_rank(p, tol=1e-8) - e.target.dim))

    bimodular, positive = 0.0, 0.0
    for _ in range(samples):
        x = e.source.random_element(rng)
        s1 = e.target.random_element(rng)
        s2 = e.target.random_element(rng)
        lhs = e.apply(s1 @ x @ s2)
        rhs = s1 @ e.apply(x) @ s2
        bimodular = max(bimodular, float(np.linalg.norm(lhs - rhs)) / max(1.0, float(np.linalg.norm(rhs))))
        ex = hermitian_part(e.apply(adjoint(x) @ x))
        positive = max(positive, -float(np.linalg.eigvalsh(ex)[0]) / max(1.0, operator_norm(ex)))
    out["bimodular"] = bimodular
    out["positive"] = max(positive, 0.0)
    return out


def check_expectation(e, tol=1e-9, samples=4, seed=None):
    for name, residual in verify_expectation(e, samples, seed).items():
        if residual > tol:
            raise VerificationError(f"conditional expectation {name}", residual)
    return True


def compatibility_check(a, b, c, tau):
    """
    Residual of E_B = E_B|_C ∘ E_C over a basis of A, for the τ-preserving
    expectations of the inclusions B ⊂ C ⊂ A.
    """
    e_b = trace_preserving_expectation(a, b, tau)
    e_c = trace_preserving_expectation(a, c, tau)
    e_cb = trace_preserving_expectation(c, b, tau)
    xs = a.matrices()
    diff = e_b.apply_many(xs) - e_cb.apply_many(e_c.apply_many(xs))
    return float(np.max(np.linalg.norm(diff, axis=(1, 2)), initial=0.0))


def _right_sums(e, lam, xs):
    """Σ_i λ_i E(λ_i* x) for each x."""
    n, size = len(lam), e.size
    if n == 0:
        return np.zeros_like(xs)
    prods = np.einsum("nij,sjk->snik", adjoint(lam), xs).reshape(-1, size, size)
    ex = e.apply_many(prods).reshape(len(xs), n, size, size)
    return np.einsum("nij,snjk->sik", lam, ex)


def _left_sums(e, lam, xs):
    """Σ_i E(x λ_i) λ_i* for each x."""
    n, size = len(lam), e.size
    if n == 0:
        return np.zeros_like(xs)
    prods = np.einsum("sij,njk->snik", xs, lam).reshape(-1, size, size)
    ex = e.apply_many(prods).reshape(len(xs), n, size, size)
    return np.einsum("snij,njk->sik", ex, adjoint(lam))


def reconstruction_residual(qb, xs=None):
    """Worst relative error of both reconstruction identities over xs (default: a basis)."""
    e = qb.expectation
    xs = e.source.matrices() if xs is None else np.asarray(xs)
    worst = 0.0
    for start in range(0, len(xs), 64):
        chunk = xs[start:start + 64]
        scale = np.maximum(1.0, np.linalg.norm(chunk, axis=(1, 2)))
        right = np.linalg.norm(_right_sums(e, qb.elements, chunk) - chunk, axis=(1, 2)) / scale
        left = np.linalg.norm(_left_sums(e, qb.elements, chunk) - chunk, axis=(1, 2)) / scale
        worst = max(worst, float(np.max(right)), float(np.max(left)))
    return worst


def _candidates(source, pivot, seed):
    mats = source.matrices()
    if pivot == "forward":
        unit = np.eye(source.size, dtype=complex)[None] / np.sqrt(source.size)
        return np.concatenate([unit, mats])
    if pivot == "reverse":
        return mats[::-1]
    if pivot == "shuffle":
        rng = np.random.default_rng(config.SEED if seed is None else seed)
        return mats[rng.permutation(len(mats))]
    raise ValueError(f"unknown pivot {pivot!r}")


def quasi_basis(e, pivot="forward", seed=None):
    """
    B-valued Gram-Schmidt over a linear basis of the source. Each accepted
    step is rescaled by the pseudo-inverse square root of its Gram element,
    so that E(λ*λ) is the support projection of that element.
    """
    size = e.size
    lam = np.zeros((0, size, size), dtype=complex)
    for v in _candidates(e.source, pivot, seed):
        floor = 1e-20 * max(1.0, operator_norm(e.apply(adjoint(v) @ v)))
        for _ in range(3):
            r = v - _right_sums(e, lam, v[None])[0]
            g = hermitian_part(e.apply(adjoint(r) @ r))
            if operator_norm(g) <= floor:
                break
            w, vecs = np.linalg.eigh(g)
            keep = w > 1e-9 * w[-1]
            inv_sqrt = (vecs[:, keep] / np.sqrt(w[keep])) @ np.conj(vecs[:, keep].T)
            lam = np.concatenate([lam, (r @ inv_sqrt)[None]])
            v = r
    qb = QuasiBasis(lam, e, pivot)
    residual = reconstruction_residual(qb)
    if residual > 1e-8:
        raise DegenerateModule("quasi-basis reconstruction", residual)
    return qb


def _index_element(qb):
    lam = qb.elements
    return hermitian_part(np.einsum("nij,nkj->ik", lam, np.conj(lam)))


def _eigen_clusters(w, tol):
    values, current = [], [w[0]]
    for x in w[1:]:
        if x - current[-1] > tol:
            values.append(float(np.mean(current)))
            current = []
        current.append(x)
    values.append(float(np.mean(current)))
    return tuple(values)


def watatani_index(qb, check_independence=True):
    """Ind_w(E) = Σ λ_i λ_i*, checked central, positive, invertible and independent of the quasi-basis."""
    e = qb.expectation
    ind = _index_element(qb)
    scale = max(1.0, operator_norm(ind))
    mats = e.source.matrices()
    central = float(np.max(np.linalg.norm(ind @ mats - mats @ ind, axis=(1, 2)), initial=0.0)) / scale
    if central > 1e-8:
        raise NotCentral("index is central", central)
    w = np.linalg.eigvalsh(ind)
    if w[0] <= 1e-10:
        raise VerificationError("index is positive and invertible", float(w[0]))

    residuals = {"central": central}
    if check_independence:
        other = _index_element(quasi_basis(e, pivot="reverse"))
        diff = float(np.linalg.norm(ind - other, 2)) / scale
        if diff > 1e-8:
            raise NotCentral("quasi-basis independence", diff)
        residuals["independence"] = diff

    c = float(np.real(np.trace(ind))) / ind.shape[0]
    scalar = None
    if float(np.linalg.norm(ind - c * np.eye(ind.shape[0]), 2)) <= 1e-8 * max(1.0, abs(c)):
        scalar = c
    return IndexValue(ind, scalar, _eigen_clusters(w, 1e-7 * scale), residuals)


def _projections(w, mj, vs):
    """Minimal projections W (vv* ⊗ 1_m) W* for a batch of unit vectors v."""
    nj = vs.shape[1]
    outer = np.einsum("si,sj->sij", vs, np.conj(vs))
    big = np.einsum("sij,ab->siajb", outer, np.eye(mj)).reshape(len(vs), nj * mj, nj * mj)
    return w @ big @ np.conj(w.T)


def _pp_values(e, w, mj, vs):
    """Best λ with E(p) ≥ λp for each sampled minimal projection p; 0 when the support leaks."""
    p = _projections(w, mj, vs)
    a = hermitian_part(e.apply_many(p))
    a_pinv = np.linalg.pinv(a, rcond=1e-10, hermitian=True)
    leak = np.linalg.norm(p - a @ a_pinv @ p, axis=(1, 2))
    top = np.linalg.eigvalsh(hermitian_part(p @ a_pinv @ p))[:, -1]
    return np.where(leak > 1e-7, 0.0, 1.0 / np.maximum(top, 1e-300))


def pp_value_at(e, p):
    """Best λ with E(p) ≥ λp for a single projection p of the source."""
    a = hermitian_part(e.apply(p))
    a_pinv = np.linalg.pinv(a, rcond=1e-10, hermitian=True)
    if float(np.linalg.norm(p - a @ a_pinv @ p)) > 1e-7:
        return 0.0
    top = float(np.linalg.eigvalsh(hermitian_part(p @ a_pinv @ p))[-1])
    return 1.0 / max(top, 1e-300)


def _to_unit(x, n):
    v = x[:n] + 1j * x[n:]
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else np.eye(n)[0].astype(complex)


def pp_constant(e, samples=None, refine_steps=None, seed=None, structure=None):
    """
    Pimsner-Popa constant: the best λ with E(x) ≥ λx on the positive cone,
    evaluated on minimal projections of the source (the extreme rays of its
    positive cone), by seeded sampling followed by local refinement.
    """
    samples = config.PP_SAMPLES if samples is None else samples
    refine_steps = config.PP_REFINE_STEPS if refine_steps is None else refine_steps
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    bs = structure or block_structure(e.source, seed)
    per_block = max(1, samples // len(bs.dims))

    candidates = []
    for j, (nj, mj) in enumerate(zip(bs.dims, bs.multiplicities)):
        w = bs.block_isometry(j)
        fixed = np.vstack([np.eye(nj), np.ones((1, nj)) / np.sqrt(nj)]).astype(complex)
        vs = np.vstack([fixed, random_unit_vectors(rng, per_block, nj)])
        for start in range(0, len(vs), _PP_BATCH):
            chunk = vs[start:start + _PP_BATCH]
            values = _pp_values(e, w, mj, chunk)
            for k in np.argsort(values)[:3]:
                candidates.append((float(values[k]), j, chunk[k]))
    candidates.sort(key=lambda c: c[0])
    best_value, best_block, best_vec = candidates[0]

    for value, j, v in candidates[:3]:
        nj, mj = bs.dims[j], bs.multiplicities[j]
        if nj == 1 or value == 0.0 or refine_steps <= 0:
            continue
        w = bs.block_isometry(j)

        def objective(x, w=w, mj=mj, nj=nj):
            return float(_pp_values(e, w, mj, _to_unit(x, nj)[None])[0])

        res = minimize(objective, np.concatenate([v.real, v.imag]), method="L-BFGS-B", options={"maxiter": refine_steps})
        if res.fun < best_value:
            best_value, best_block, best_vec = float(res.fun), j, _to_unit(res.x, nj)

    certificate = _projections(bs.block_isometry(best_block), bs.multiplicities[best_block], best_vec[None])[0]
    total = sum(per_block + nj + 1 for nj in bs.dims)
    return PPConstant(best_value, certificate, best_block, total)


def probabilistic_index(e, **kwargs):
    """Ind_p(E) = 1 / pp_constant(E); infinite when the constant vanishes."""
    value = pp_constant(e, **kwargs).value
    return float("inf") if value <= 0 else 1.0 / value


def _block_index(gram, t):
    return (gram @ t) / t


def _weights_from_log(theta, dims):
    t = np.exp(theta - np.max(theta))
    return t / float(np.dot(dims, t))


def minimal_index_search(inc, restarts=None, seed=None, lam=None):
    """
    Smallest ‖Ind_w(E_τ)‖ over τ-preserving expectations, τ ranging over
    faithful traces on sup given by block weights. Closed forms are used when
    sub is the scalars or sup is a factor; otherwise Nelder-Mead over
    log-weights with seeded restarts. The optimum is re-evaluated through an
    actual quasi-basis.
    """
    restarts = config.MIN_INDEX_RESTARTS if restarts is None else restarts
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    lam = lam or inclusion_matrix(inc, seed)
    dims = np.array(lam.sup_dims.dims, dtype=float)
    gram = lam.gram()

    def objective(theta):
        return float(np.max(_block_index(gram, _weights_from_log(theta, dims))))

    if inc.sub.dim == 1:
        regime = "exact-scalar"
        total = sum(n * n for n in lam.sup_dims)
        weights = tuple(Fraction(n, total) for n in lam.sup_dims)
    elif len(dims) == 1:
        regime = "exact-factor"
        weights = (Fraction(1, int(dims[0])),)
    else:
        regime = "heuristic"
        starts = []
        w, v = np.linalg.eigh(gram)
        perron = np.abs(v[:, -1])
        if np.all(perron > 1e-12):
            starts.append(np.log(perron))
        starts.append(np.zeros(len(dims)))
        starts.extend(rng.standard_normal((restarts, len(dims))))
        best_x, best_fun = None, np.inf
        for theta0 in starts:
            res = minimize(
                objective,
                theta0,
                method="Nelder-Mead",
                options={"maxiter": 4000, "maxfev": 8000, "xatol": 1e-10, "fatol": 1e-13},
            )
            # the simplex can stall on the kink of the max without flagging success
            for x in (theta0, res.x):
                value = objective(x)
                if np.isfinite(value) and value < best_fun:
                    best_x, best_fun = x, value
        if best_x is None:
            raise SearchDidNotConverge("minimal index search", None, "no restart of the minimal index search produced a finite value")
        weights = tuple(float(x) for x in _weights_from_log(best_x, dims))

    t = np.array([float(x) for x in weights])
    predicted = float(np.max(_block_index(gram, t)))
    tau = trace_from_block_weights(lam.sup_structure, weights)
    e = trace_preserving_expectation(inc.sup, inc.sub, tau)
    index = watatani_index(quasi_basis(e))
    # the infimum over positive weights of max_j (Gt)_j / t_j is the spectral radius of G
    gap = predicted - float(np.linalg.eigvalsh(gram)[-1])
    converged = gap <= 1e-6 * max(1.0, predicted)
    return MinimalIndexResult(index, tau, regime, predicted, weights, abs(index.norm - predicted), converged, max(gap, 0.0))
