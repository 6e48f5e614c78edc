# inclusion.py
"""
Concrete *-subalgebras of a matrix algebra, unital inclusions between them,
relative commutants, Artin-Wedderburn block data and inclusion matrices.

A ConcreteAlgebra is stored as orthonormal rows (Frobenius inner product)
spanning a subspace of vectorized N x N matrices. The same class carries
subalgebras of a multi-matrix algebra and of the operator space of a GNS
realization.
"""
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

import config
from errors import NotAnAlgebra, NotSubalgebra, NotUnital, ShapeMismatch, SpecError, VerificationError
from multimatrix import (
    AmbientAlgebra,
    DimensionVector,
    TraceFunctional,
    adjoint,
    extend_orthonormal,
    hermitian_part,
    null_space,
    orthonormal_rows,
)

# Above this dimension commutants are taken against a few random elements
# instead of a full basis, then verified against the basis.
_RANDOM_GENERATOR_DIM = 12


class ConcreteAlgebra:
    def __init__(self, vectors, size, label="", is_full=False):
        vectors = np.asarray(vectors, dtype=complex)
        if vectors.ndim != 2 or vectors.shape[1] != size * size:
            raise ShapeMismatch(f"basis rows must have length {size * size}, got shape {vectors.shape}")
        self.vectors = vectors
        self.size = size
        self.label = label
        self.is_full = is_full

    def __repr__(self):
        return f"ConcreteAlgebra(label={self.label!r}, dim={self.dim}, size={self.size})"

    @classmethod
    def from_spanning(cls, matrices, size, label="", rtol=None):
        matrices = np.asarray(matrices, dtype=complex).reshape(-1, size * size)
        return cls(orthonormal_rows(matrices, rtol=rtol), size, label)

    @classmethod
    def full(cls, ambient, label=""):
        """The whole ambient algebra, basis of matrix units in canonical order."""
        if isinstance(ambient, int):
            ambient = AmbientAlgebra.full_matrix(ambient)
        n = ambient.size
        positions = ambient.unit_positions()
        vectors = np.zeros((len(positions), n * n), dtype=complex)
        for k, (i, j) in enumerate(positions):
            vectors[k, i * n + j] = 1.0
        return cls(vectors, n, label, is_full=len(ambient.dims) == 1)

    @classmethod
    def scalars(cls, size, label="C"):
        return cls(np.eye(size, dtype=complex).reshape(1, -1) / np.sqrt(size), size, label)

    @property
    def dim(self):
        return self.vectors.shape[0]

    def matrices(self):
        """Basis as (dim, N, N), each of unit Frobenius norm."""
        return self.vectors.reshape(self.dim, self.size, self.size)

    def basis(self):
        """Basis orthonormal for the normalized Hilbert-Schmidt inner product."""
        return self.matrices() * np.sqrt(self.size)

    def coords(self, x):
        return np.conj(self.vectors) @ np.asarray(x).reshape(-1)

    def coords_many(self, xs):
        xs = np.asarray(xs)
        return xs.reshape(xs.shape[0], -1) @ np.conj(self.vectors.T)

    def element(self, c):
        return (np.asarray(c) @ self.vectors).reshape(self.size, self.size)

    def elements(self, cs):
        cs = np.asarray(cs)
        return (cs @ self.vectors).reshape(cs.shape[0], self.size, self.size)

    def project(self, x):
        return self.element(self.coords(x))

    def residual(self, x):
        return float(np.linalg.norm(x - self.project(x)))

    def residual_many(self, xs):
        flat = np.asarray(xs).reshape(len(xs), -1)
        rest = flat - (flat @ np.conj(self.vectors.T)) @ self.vectors
        return np.linalg.norm(rest, axis=1)

    def contains(self, x, tol=1e-9):
        return self.residual(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def contains_algebra(self, other, tol=1e-9):
        if other.size != self.size:
            return False
        return float(np.max(self.residual_many(other.matrices()), initial=0.0)) <= tol

    def has_unit(self, tol=1e-9):
        return self.contains(np.eye(self.size), tol)

    def random_element(self, rng, hermitian=False):
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        x = self.element(c)
        return hermitian_part(x) if hermitian else x

    def hermitian_basis(self):
        return hermitian_basis(self.matrices())

    def closure_residual(self, rng, samples=4):
        """How far the span is from being closed under adjoint and product."""
        xs = [self.random_element(rng) for _ in range(samples)]
        worst = 0.0
        for x in xs:
            worst = max(worst, self.residual(adjoint(x)) / max(1.0, float(np.linalg.norm(x))))
            for y in xs:
                xy = x @ y
                worst = max(worst, self.residual(xy) / max(1.0, float(np.linalg.norm(xy))))
        return worst

    def gram_residual(self):
        g = self.vectors @ np.conj(self.vectors.T)
        return float(np.max(np.abs(g - np.eye(self.dim)), initial=0.0))

    def verify(self, seed=None, tol=1e-9):
        rng = np.random.default_rng(config.SEED if seed is None else seed)
        r = self.gram_residual()
        if r > 1e-10:
            raise NotAnAlgebra("orthonormal basis", r)
        r = self.closure_residual(rng)
        if r > tol:
            raise NotAnAlgebra("closed under adjoint and product", r, f"{self.label or 'span'} is not a *-algebra")
        return True


def hermitian_basis(matrices):
    """
    Orthonormal basis of Hermitian matrices for the *-closed span of `matrices`.
    Works over the reals so combinations stay Hermitian.
    """
    matrices = np.asarray(matrices, dtype=complex)
    n = matrices.shape[-1]
    re_part = hermitian_part(matrices)
    im_part = hermitian_part(-1j * matrices)
    herm = np.concatenate([re_part, im_part]).reshape(-1, n * n)
    real_rows = np.concatenate([herm.real, herm.imag], axis=1)
    rows = orthonormal_rows(real_rows)
    return (rows[:, : n * n] + 1j * rows[:, n * n:]).reshape(-1, n, n)


@dataclass(eq=False)
class UnitalInclusion:
    sub: ConcreteAlgebra
    sup: ConcreteAlgebra
    label: str = ""

    def __post_init__(self):
        if self.sub.size != self.sup.size:
            raise ShapeMismatch(f"sub acts on {self.sub.size}, sup on {self.sup.size}")
        if not self.sup.contains_algebra(self.sub):
            residual = float(np.max(self.sup.residual_many(self.sub.matrices())))
            raise NotSubalgebra(f"{self.sub.label or 'sub'} is not contained in {self.sup.label or 'sup'} (residual {residual:.3e})")
        if not (self.sub.has_unit() and self.sup.has_unit()):
            raise NotUnital("both algebras must contain the identity matrix")

    @property
    def size(self):
        return self.sup.size


@dataclass
class InclusionMatrixData:
    lam: np.ndarray
    sub_dims: DimensionVector
    sup_dims: DimensionVector
    sub_structure: object = field(default=None, repr=False)
    sup_structure: object = field(default=None, repr=False)

    def gram(self):
        """ΛᵀΛ, indexed by sup blocks."""
        lam = self.lam.astype(float)
        return lam.T @ lam

    def as_lists(self):
        return [[int(v) for v in row] for row in self.lam]


@dataclass(eq=False)
class BlockStructure:
    """
    Artin-Wedderburn data of a *-algebra S acting on C^N: S is unitarily
    conjugate to ⊕ M_{n_j} ⊗ 1_{m_j}.
    """

    dims: DimensionVector
    multiplicities: tuple
    central_projections: list
    unitary: np.ndarray

    def block_columns(self, j):
        start = sum(n * m for n, m in zip(self.dims.dims[:j], self.multiplicities[:j]))
        return slice(start, start + self.dims[j] * self.multiplicities[j])

    def block_isometry(self, j):
        return self.unitary[:, self.block_columns(j)]

    def compress(self, x, j):
        """The n_j x n_j matrix c with x P_j = W_j (c ⊗ 1) W_j*."""
        w = self.block_isometry(j)
        m = self.multiplicities[j]
        return (np.conj(w.T) @ x @ w)[::m, ::m]

    def embed(self, c, j):
        w = self.block_isometry(j)
        return w @ np.kron(c, np.eye(self.multiplicities[j])) @ np.conj(w.T)

    def ranks(self):
        return [n * m for n, m in zip(self.dims, self.multiplicities)]


def subalgebra_from_generators(ambient, generators, label="", rtol=None):
    """
    Unital *-algebra generated by `generators`: the span of all words in the
    generators and their adjoints, grown one letter at a time.
    """
    size = ambient if isinstance(ambient, int) else ambient.size
    gens = []
    for g in generators:
        g = np.asarray(g, dtype=complex)
        if g.shape != (size, size):
            raise ShapeMismatch(f"generator of shape {g.shape} in a {size}x{size} ambient")
        gens.append(g)
        if np.linalg.norm(g - adjoint(g)) > 1e-12 * max(1.0, float(np.linalg.norm(g))):
            gens.append(adjoint(g))
    gens = np.array(gens).reshape(-1, size, size)

    basis = np.eye(size, dtype=complex).reshape(1, -1) / np.sqrt(size)
    frontier = basis
    while frontier.shape[0]:
        added = []
        for g in gens:
            words = (g @ frontier.reshape(-1, size, size)).reshape(-1, size * size)
            new = extend_orthonormal(basis, words, rtol=rtol)
            if new.shape[0]:
                basis = np.vstack([basis, new])
                added.append(new)
        if not added:
            break
        frontier = np.vstack(added)
    return ConcreteAlgebra(basis, size, label)


def join(c, d, label=""):
    """C ∨ D, the *-algebra generated by C and D."""
    if c.size != d.size:
        raise ShapeMismatch("join of algebras acting on different spaces")
    gens = np.concatenate([c.hermitian_basis(), d.hermitian_basis()])
    return subalgebra_from_generators(c.size, gens, label or f"{c.label} v {d.label}")


def intersect(c, d, label=""):
    """C ∧ D as a subspace intersection."""
    if c.size != d.size:
        raise ShapeMismatch("intersection of algebras acting on different spaces")
    rest = c.vectors - (c.vectors @ np.conj(d.vectors.T)) @ d.vectors
    combos = null_space(rest.T)
    vectors = combos.T @ c.vectors
    return ConcreteAlgebra(orthonormal_rows(vectors, rtol=0.0, atol=1e-12), c.size, label or f"{c.label} ^ {d.label}")


def commutant(generators, size, label=""):
    """{x in M_size : xs = sx for every generator s}."""
    eye = np.eye(size)
    blocks = [np.kron(eye, s.T) - np.kron(s, eye) for s in generators]
    if not blocks:
        return ConcreteAlgebra.full(size, label)
    sol = null_space(np.vstack(blocks))
    return ConcreteAlgebra(sol.T, size, label)


def _commutant_generators(s, rng):
    if s.dim <= _RANDOM_GENERATOR_DIM:
        return list(s.matrices())
    return [s.random_element(rng) for _ in range(3)]


def _commutation_residual(z, s):
    """Largest ‖zs - sz‖ over a basis of z against a basis of s."""
    zs = z.matrices()
    ss = s.matrices()
    worst = 0.0
    for x in ss:
        worst = max(worst, float(np.max(np.linalg.norm(zs @ x - x @ zs, axis=(1, 2)), initial=0.0)))
    return worst


def relative_commutant(s, t, label="", seed=None):
    """S′ ∩ T."""
    if s.size != t.size:
        raise ShapeMismatch("relative commutant of algebras acting on different spaces")
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    label = label or f"{s.label}' ^ {t.label}"
    for _ in range(3):
        gens = _commutant_generators(s, rng)
        if t.is_full:
            result = commutant(gens, t.size, label)
        else:
            tm = t.matrices()
            stacked = np.concatenate([(tm @ g - g @ tm).reshape(t.dim, -1) for g in gens], axis=1).T
            sol = null_space(stacked)
            result = ConcreteAlgebra(sol.T @ t.vectors, t.size, label)
        if s.dim <= _RANDOM_GENERATOR_DIM or _commutation_residual(result, s) <= 1e-8:
            return result
    raise VerificationError("relative commutant", _commutation_residual(result, s))


def center(s, seed=None):
    return relative_commutant(s, s, f"Z({s.label})", seed)


def is_irreducible(inc, seed=None):
    """True when sub′ ∩ sup = C."""
    return relative_commutant(inc.sub, inc.sup, seed=seed).dim == 1


def subspace_distance(c, d):
    """
    Operator norm of the difference of the orthogonal projections onto the two
    subspaces; 0 for equal subspaces, 1 whenever the dimensions differ.
    """
    if c.size != d.size:
        raise ShapeMismatch("subspaces of different spaces")
    if c.dim != d.dim:
        return 1.0
    if c.dim == 0:
        return 0.0
    rest = c.vectors - (c.vectors @ np.conj(d.vectors.T)) @ d.vectors
    return float(np.linalg.norm(rest, 2))


def _cluster(values, tol):
    """Group sorted eigenvalues into runs separated by gaps larger than tol."""
    groups, current = [], [0]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] > tol:
            groups.append(current)
            current = []
        current.append(k)
    groups.append(current)
    return groups


def _polar_unitary(f):
    return scipy.linalg.polar(f)[0]


def block_structure(s, seed=None):
    """
    Dimension vector, multiplicities, minimal central projections and an
    adapting unitary for the *-algebra S. Blocks are ordered by where their
    central projection first appears on the diagonal, then by block size.
    """
    if not s.has_unit():
        raise NotAnAlgebra("unital", None, f"{s.label or 'algebra'} does not contain the identity")
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    z = center(s, seed)
    zh = z.hermitian_basis()
    n = s.size

    projections = None
    for _ in range(6):
        h = np.einsum("k,kij->ij", rng.standard_normal(len(zh)), zh)
        w, v = scipy.linalg.eigh(hermitian_part(h))
        scale = max(1.0, float(np.max(np.abs(w))))
        groups = _cluster(w, 1e-7 * scale)
        if len(groups) == z.dim:
            projections = [v[:, g] for g in groups]
            break
    if projections is None:
        raise NotAnAlgebra("center splits into minimal projections", None, f"could not separate the center of {s.label or 'algebra'}")

    mats = s.matrices()
    blocks = []
    for order, vj in enumerate(projections):
        r = vj.shape[1]
        compressed = (np.conj(vj.T) @ mats @ vj).reshape(s.dim, -1)
        block_dim = orthonormal_rows(compressed).shape[0]
        nj = int(round(np.sqrt(block_dim)))
        if nj * nj != block_dim or r % nj:
            raise NotAnAlgebra("block dimension", None, f"block of dimension {block_dim} on a rank {r} projection")
        mj = r // nj
        basis_j = _block_basis(s, vj, nj, mj, rng)
        support = int(np.argmax(np.sum(np.abs(vj) ** 2, axis=1) > 1e-9))
        blocks.append(((support, nj, order), nj, mj, vj @ vj.conj().T, basis_j))

    blocks.sort(key=lambda b: b[0])
    dims = DimensionVector(tuple(b[1] for b in blocks))
    unitary = np.hstack([b[4] for b in blocks])
    bs = BlockStructure(dims, tuple(b[2] for b in blocks), [b[3] for b in blocks], unitary)
    if sum(nj * nj for nj in dims) != s.dim:
        raise NotAnAlgebra("Σ n_j² = dim", abs(sum(nj * nj for nj in dims) - s.dim))
    _check_block_form(s, bs, n, rng)
    return bs


def _block_basis(s, vj, nj, mj, rng):
    """Columns w_{k,r} (k-major) on which S P_j acts as M_{n_j} ⊗ 1_{m_j}."""
    if nj == 1:
        return vj
    for _ in range(6):
        hc = np.conj(vj.T) @ s.random_element(rng, hermitian=True) @ vj
        w, v = scipy.linalg.eigh(hermitian_part(hc))
        scale = max(1.0, float(np.max(np.abs(w))))
        groups = _cluster(w, 1e-7 * scale)
        if len(groups) == nj and all(len(g) == mj for g in groups):
            break
    else:
        raise NotAnAlgebra("minimal projections", None, "could not split a simple block into minimal projections")
    q = [v[:, g] for g in groups]
    y = np.conj(vj.T) @ s.random_element(rng) @ vj
    columns = [q[0]]
    for qk in q[1:]:
        columns.append(qk @ _polar_unitary(np.conj(qk.T) @ y @ q[0]))
    return vj @ np.hstack(columns)


def _check_block_form(s, bs, n, rng):
    x = s.random_element(rng)
    y = np.conj(bs.unitary.T) @ x @ bs.unitary
    expected = np.zeros_like(y)
    start = 0
    for nj, mj in zip(bs.dims, bs.multiplicities):
        width = nj * mj
        block = y[start:start + width, start:start + width]
        expected[start:start + width, start:start + width] = np.kron(block[::mj, ::mj], np.eye(mj))
        start += width
    residual = float(np.linalg.norm(y - expected)) / max(1.0, float(np.linalg.norm(x)))
    unitarity = float(np.linalg.norm(np.conj(bs.unitary.T) @ bs.unitary - np.eye(n)))
    if residual > 1e-8 or unitarity > 1e-8:
        raise NotAnAlgebra("block-diagonal form", max(residual, unitarity))


def inclusion_matrix(inc, seed=None, sub_structure=None, sup_structure=None):
    """
    Λ with λ_ij = multiplicity of sub block i inside sup block j, read off
    as Tr(Q_i P_j) / (n_i m_j) from minimal central projections.
    """
    bs_sub = sub_structure or block_structure(inc.sub, seed)
    bs_sup = sup_structure or block_structure(inc.sup, seed)
    raw = np.zeros((len(bs_sub.dims), len(bs_sup.dims)))
    for i, (q, ni) in enumerate(zip(bs_sub.central_projections, bs_sub.dims)):
        for j, (p, mj) in enumerate(zip(bs_sup.central_projections, bs_sup.multiplicities)):
            raw[i, j] = np.real(np.trace(q @ p)) / (ni * mj)
    lam = np.rint(raw).astype(int)
    if np.max(np.abs(raw - lam), initial=0.0) > 1e-6:
        raise NotAnAlgebra("integral inclusion matrix", float(np.max(np.abs(raw - lam))))
    predicted = lam.T @ np.array(bs_sub.dims.dims)
    if not np.array_equal(predicted, np.array(bs_sup.dims.dims)):
        raise NotUnital(f"Λᵀ·(sub dims) = {predicted.tolist()} differs from sup dims {bs_sup.dims.as_list()}")
    return InclusionMatrixData(lam, bs_sub.dims, bs_sup.dims, bs_sub, bs_sup)


def trace_from_block_weights(bs, weights):
    """Trace on the algebra with block structure bs and value t_j on a minimal projection of block j."""
    weights = tuple(weights)
    if len(weights) != len(bs.dims):
        raise ShapeMismatch(f"{len(weights)} weights for {len(bs.dims)} blocks")
    total = sum(float(w) * nj for w, nj in zip(weights, bs.dims))
    if abs(total - 1.0) > 1e-9:
        raise SpecError(f"block weights are not normalized: Σ n_j t_j = {total}")
    h = sum(float(w) / mj * p for w, mj, p in zip(weights, bs.multiplicities, bs.central_projections))
    return TraceFunctional.from_density(h, weights, bs.dims)
