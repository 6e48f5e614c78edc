# multimatrix.py
"""
Dense complex matrix arithmetic and the ambient multi-matrix algebra
M_{n_1} ⊕ ... ⊕ M_{n_k}, realized block-diagonally inside M_N, N = Σ n_j.

Elements are plain numpy arrays of shape (N, N). Every algebra, trace and
expectation in this project ultimately lives on top of these helpers.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg

import config
from errors import ShapeMismatch, SpecError, TraceNotFaithful

# Matrices are numpy arrays; the alias only documents intent in signatures.
MatrixElement = np.ndarray


def as_int(value, what, minimum=None):
    """An integer read from a job, refusing bools, strings and non-integral floats."""
    integral = isinstance(value, (int, np.integer)) or (isinstance(value, float) and value.is_integer())
    if isinstance(value, bool) or not integral:
        raise SpecError(f"{what} must be an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise SpecError(f"{what} must be at least {minimum}, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class DimensionVector:
    dims: tuple

    def __post_init__(self):
        if isinstance(self.dims, (str, bytes)) or not hasattr(self.dims, "__iter__"):
            raise SpecError(f"dimension vector must be a list of positive integers, got {self.dims!r}")
        dims = tuple(self.dims)
        if not dims:
            raise SpecError("dimension vector must not be empty")
        object.__setattr__(self, "dims", tuple(as_int(n, "dimension vector entry", 1) for n in dims))

    def __iter__(self):
        return iter(self.dims)

    def __len__(self):
        return len(self.dims)

    def __getitem__(self, j):
        return self.dims[j]

    @property
    def size(self):
        """Ambient matrix size N = Σ n_j."""
        return sum(self.dims)

    @property
    def linear_dim(self):
        return sum(n * n for n in self.dims)

    def offsets(self):
        out, start = [], 0
        for n in self.dims:
            out.append(start)
            start += n
        return out

    def as_list(self):
        return list(self.dims)


@dataclass(frozen=True)
class AmbientAlgebra:
    dims: DimensionVector

    @classmethod
    def from_dims(cls, dims):
        if not isinstance(dims, DimensionVector):
            dims = DimensionVector(dims)
        return cls(dims)

    @classmethod
    def full_matrix(cls, n):
        return cls(DimensionVector((n,)))

    @property
    def size(self):
        return self.dims.size

    def block_slices(self):
        return [slice(o, o + n) for o, n in zip(self.dims.offsets(), self.dims)]

    def identity(self):
        return np.eye(self.size, dtype=complex)

    def matrix_unit(self, block, i, j):
        offset = self.dims.offsets()[block]
        e = np.zeros((self.size, self.size), dtype=complex)
        e[offset + i, offset + j] = 1.0
        return e

    def unit_positions(self):
        """(row, col) of every matrix unit, block-major and row-major inside a block."""
        positions = []
        for offset, n in zip(self.dims.offsets(), self.dims):
            for i in range(n):
                for j in range(n):
                    positions.append((offset + i, offset + j))
        return positions

    def block(self, a, j):
        s = self.block_slices()[j]
        return a[s, s]

    def contains(self, a, tol=None):
        """True when a is supported on the diagonal blocks."""
        tol = config.TOLERANCE if tol is None else tol
        _check_square(a, self.size)
        mask = np.zeros((self.size, self.size), dtype=bool)
        for s in self.block_slices():
            mask[s, s] = True
        return float(np.linalg.norm(np.where(mask, 0, a))) <= tol * max(1.0, float(np.linalg.norm(a)))

    def random_element(self, rng, hermitian=False):
        a = np.zeros((self.size, self.size), dtype=complex)
        for s in self.block_slices():
            n = s.stop - s.start
            a[s, s] = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return hermitian_part(a) if hermitian else a

    def tensor(self, m):
        """Ambient algebra of kron(a, b), a in self, b in M_m."""
        return AmbientAlgebra(DimensionVector(tuple(n * m for n in self.dims)))


def _check_square(a, size=None):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {a.shape}")
    if size is not None and a.shape[0] != size:
        raise ShapeMismatch(f"expected a {size}x{size} matrix, got {a.shape[0]}x{a.shape[1]}")


def product(a, b):
    _check_square(a)
    _check_square(b, a.shape[0])
    return a @ b


def adjoint(a):
    return np.conj(np.swapaxes(a, -1, -2))


def hermitian_part(a):
    return 0.5 * (a + adjoint(a))


def operator_norm(a):
    """Largest singular value."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def is_hermitian(a, tol=None):
    tol = config.TOLERANCE if tol is None else tol
    return float(np.linalg.norm(a - adjoint(a), 2)) <= tol * max(1.0, operator_norm(a))


def is_positive(a, tol=None):
    tol = config.TOLERANCE if tol is None else tol
    if not is_hermitian(a, tol):
        return False
    return float(np.linalg.eigvalsh(hermitian_part(a))[0]) >= -tol


def hs_inner(a, b):
    """Normalized Hilbert-Schmidt inner product Tr(a* b) / N."""
    return complex(np.vdot(a, b)) / a.shape[0]


def null_space(m, rtol=None, atol=1e-9):
    """
    Orthonormal columns spanning {x : m x = 0}.
    Singular values count as zero below max(rtol * s_max, atol).
    """
    rtol = config.RANK_RTOL if rtol is None else rtol
    m = np.atleast_2d(m)
    if m.shape[0] == 0:
        return np.eye(m.shape[1], dtype=complex)
    top = operator_norm(m)
    if top <= atol:
        return np.eye(m.shape[1], dtype=complex)
    return scipy.linalg.null_space(m, rcond=max(rtol, atol / top))


def orthonormal_rows(rows, rtol=None, atol=1e-9):
    """Orthonormal basis (as rows) of the row span."""
    rtol = config.RANK_RTOL if rtol is None else rtol
    rows = np.atleast_2d(rows)
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1])
    top = operator_norm(rows)
    if top <= atol:
        return rows[:0]
    return scipy.linalg.orth(rows.T, rcond=max(rtol, atol / top)).T


def extend_orthonormal(q, candidates, rtol=None, atol=1e-9):
    """
    New orthonormal rows spanning candidates modulo the row span of q.
    q must already have orthonormal rows.
    """
    if candidates.shape[0] == 0:
        return candidates
    r = candidates
    if q.shape[0]:
        # two passes keep the result orthogonal to q at machine precision
        r = r - (r @ np.conj(q.T)) @ q
        r = r - (r @ np.conj(q.T)) @ q
    scale = max(1.0, float(np.max(np.linalg.norm(candidates, axis=1))))
    rtol = config.RANK_RTOL if rtol is None else rtol
    cutoff = max(rtol, atol) * scale
    top = operator_norm(r)
    if top <= cutoff:
        return r[:0]
    new = scipy.linalg.orth(r.T, rcond=cutoff / top).T
    if q.shape[0] and new.shape[0]:
        new = new - (new @ np.conj(q.T)) @ q
        new = orthonormal_rows(new, rtol=0.0, atol=0.0)
    return new


def random_unit_vectors(rng, count, n):
    v = rng.standard_normal((count, n)) + 1j * rng.standard_normal((count, n))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _as_weight(w):
    if isinstance(w, Fraction):
        return w
    if isinstance(w, str):
        return Fraction(w.strip())
    if isinstance(w, int):
        return Fraction(w)
    return float(w)


@dataclass(eq=False)
class TraceFunctional:
    """
    Positive functional τ(x) = Tr(h x) given by a density h.
    `weights` keeps the per-block value t_j on a minimal projection when the
    functional was built from block weights.
    """

    density: np.ndarray
    weights: tuple = None
    dims: DimensionVector = None

    @classmethod
    def from_weights(cls, ambient, weights):
        weights = tuple(_as_weight(w) for w in weights)
        if len(weights) != len(ambient.dims):
            raise ShapeMismatch(f"{len(weights)} weights for {len(ambient.dims)} blocks")
        if any(float(w) <= 0 for w in weights):
            raise TraceNotFaithful(f"trace weights must be positive, got {[str(w) for w in weights]}")
        total = sum(float(n) * float(w) for n, w in zip(ambient.dims, weights))
        if abs(total - 1.0) > 1e-10:
            raise SpecError(f"trace weights are not normalized: Σ n_j t_j = {total}")
        h = np.zeros((ambient.size, ambient.size), dtype=complex)
        for s, w in zip(ambient.block_slices(), weights):
            h[s, s] = float(w) * np.eye(s.stop - s.start)
        return cls(h, weights, ambient.dims)

    @classmethod
    def normalized(cls, ambient):
        """Restriction of the normalized trace of M_N."""
        n = ambient.size
        return cls.from_weights(ambient, [Fraction(1, n)] * len(ambient.dims))

    @classmethod
    def from_density(cls, h, weights=None, dims=None):
        _check_square(h)
        if not is_positive(h, 1e-12):
            raise TraceNotFaithful("trace density is not positive")
        return cls(np.asarray(h, dtype=complex), weights, dims)

    @property
    def size(self):
        return self.density.shape[0]

    def __call__(self, a):
        return apply_trace(self, a)

    def tensor(self, m):
        """τ ⊗ tr_m with tr_m the normalized trace of M_m."""
        weights = None
        if self.weights is not None:
            weights = tuple(w / (m * m) if isinstance(w, Fraction) else float(w) / (m * m) for w in self.weights)
        dims = DimensionVector(tuple(n * m for n in self.dims)) if self.dims is not None else None
        return TraceFunctional(np.kron(self.density, np.eye(m) / m), weights, dims)

    def weights_as_text(self):
        if self.weights is None:
            return None
        return [str(w) if isinstance(w, Fraction) else repr(float(w)) for w in self.weights]


def apply_trace(tau, a):
    _check_square(a, tau.size)
    return complex(np.einsum("ij,ji->", tau.density, a))


def trace_defect(tau, elements):
    """Largest |τ(xy) - τ(yx)| over pairs of the given elements."""
    worst = 0.0
    for x in elements:
        for y in elements:
            worst = max(worst, abs(apply_trace(tau, x @ y) - apply_trace(tau, y @ x)))
    return worst
