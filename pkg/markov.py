# markov.py
"""
Markov traces from inclusion matrices, their closed forms for C ⊂ ⊕M_{n_j},
and the pipeline that bounds the number of intermediate subalgebras by a
power of 9 through B′∩A₁.
"""
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg

import config
from basic_construction import basic_construction, dual_expectation, gns, higher_commutant
from errors import DegeneratePerron
from expectation import minimal_index_search, pp_constant, pp_value_at, restricted_expectation
from inclusion import ConcreteAlgebra, inclusion_matrix, relative_commutant
from multimatrix import AmbientAlgebra, DimensionVector, TraceFunctional

EXACT_POWER_LIMIT = 32


@dataclass
class MarkovData:
    lam: object
    alpha: float
    t_sub: np.ndarray
    t_sup: np.ndarray
    residual: float
    alpha_exact: Fraction = None
    t_sub_exact: tuple = None
    t_sup_exact: tuple = None

    def to_dict(self):
        return {
            "lambda": self.lam.as_lists(),
            "alpha": self.alpha,
            "alpha_exact": _text(self.alpha_exact),
            "t_sub": [float(x) for x in self.t_sub],
            "t_sup": [float(x) for x in self.t_sup],
            "t_sub_exact": None if self.t_sub_exact is None else [str(x) for x in self.t_sub_exact],
            "t_sup_exact": None if self.t_sup_exact is None else [str(x) for x in self.t_sup_exact],
            "residual": self.residual,
        }


@dataclass
class BoundReport:
    commutant_dims: DimensionVector
    dim_total: int
    min_block: int
    ratio: Fraction
    minimal_index: float
    minimal_index_regime: str
    markov_index: float
    pp_e1: float
    pp_f: float
    lambda_tau: Fraction
    bound_log10: float
    bound_exact: str
    pp_e1_sweep: float = None
    chain_flags: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "commutant_dims": self.commutant_dims.as_list(),
            "dim_total": self.dim_total,
            "min_block": self.min_block,
            "ratio": str(self.ratio),
            "minimal_index": self.minimal_index,
            "minimal_index_regime": self.minimal_index_regime,
            "markov_index": self.markov_index,
            "pp_e1": self.pp_e1,
            "pp_e1_sweep": self.pp_e1_sweep,
            "pp_f": self.pp_f,
            "lambda_tau": str(self.lambda_tau),
            "bound_log10": self.bound_log10,
            "bound_exact": self.bound_exact,
            "chain": self.chain_flags,
            "hypotheses": self.hypotheses,
        }


def _text(x):
    return None if x is None else str(x)


def rationalize(x, tol=1e-9, max_denominator=10**6):
    """Closest small-denominator fraction to x, or None if none lies within tol."""
    f = Fraction(float(x)).limit_denominator(max_denominator)
    return f if abs(float(f) - float(x)) <= tol else None


def _rationalize_all(values):
    out = tuple(rationalize(v) for v in values)
    return None if any(v is None for v in out) else out


def markov_trace(lam):
    """Perron data of ΛᵀΛ: α and the trace weights on both sides."""
    mat = lam.lam.astype(float)
    if np.any(mat.sum(axis=0) == 0) or np.any(mat.sum(axis=1) == 0):
        raise DegeneratePerron("no zero rows or columns", None, "inclusion matrix has a zero row or column")
    gram = mat.T @ mat
    w, v = scipy.linalg.eigh(gram)
    alpha = float(w[-1])
    if len(w) > 1:
        gap = float(w[-1] - w[-2])
        if gap <= 1e-9 * max(1.0, alpha):
            raise DegeneratePerron("simple Perron eigenvalue", gap)
    sup_dims = np.array(lam.sup_dims.dims, dtype=float)
    t_sup = np.abs(v[:, -1])
    t_sup = t_sup / float(sup_dims @ t_sup)
    t_sub = mat @ t_sup
    residual = max(
        float(np.linalg.norm(gram @ t_sup - alpha * t_sup)),
        float(np.linalg.norm(mat @ mat.T @ t_sub - alpha * t_sub)),
    )
    return MarkovData(
        lam,
        alpha,
        t_sub,
        t_sup,
        residual,
        rationalize(alpha),
        _rationalize_all(t_sub),
        _rationalize_all(t_sup),
    )


def scalar_markov_closed_form(n):
    """t_j = n_j / Σ n_i² and α = Σ n_i² for C ⊂ ⊕M_{n_j}."""
    dims = n.dims if isinstance(n, DimensionVector) else tuple(n)
    total = sum(k * k for k in dims)
    return tuple(Fraction(k, total) for k in dims), total


def pp_constant_closed_form(t):
    """λ_τ(C ⊂ ⊕M_{n_j}) = min_j t_j."""
    return min(t)


def markov_restriction_residual(n):
    """
    The Markov trace of ⊕M_{n_j} is the normalized trace of the basic
    construction M_{Σn²} of C ⊂ ⊕M_{n_j} restricted to the left image.
    Returns the largest weight discrepancy over blocks.
    """
    ambient = AmbientAlgebra.from_dims(n)
    weights, total = scalar_markov_closed_form(ambient.dims)
    g = gns(ConcreteAlgebra.full(ambient), TraceFunctional.from_weights(ambient, weights))
    worst = 0.0
    for j, t in enumerate(weights):
        lp = g.left_rep(ambient.matrix_unit(j, 0, 0))
        worst = max(worst, abs(float(np.real(np.trace(lp))) / g.dim - float(t)))
    return worst


def _check(value, tol, passed, asserted=True, reason=""):
    out = {"value": value, "tol": tol, "pass": bool(passed), "asserted": asserted}
    if reason:
        out["reason"] = reason
    return out


def _trace_defect(f, source, rng, samples=4):
    worst = 0.0
    for _ in range(samples):
        x = source.random_element(rng)
        y = source.random_element(rng)
        worst = max(worst, float(np.linalg.norm(f.apply(x @ y) - f.apply(y @ x))))
    return worst


def bound_pipeline(inc, tau, samples=None, refine_steps=None, seed=None, bc=None):
    """
    From the basic construction to the 9-power bound: dimensions of B′∩A₁,
    the minimal index, the Markov index, and the chain
    λ_{E₁}(A ⊂ A₁) ≤ λ_F ≤ λ_τ with F = E₁ on B′∩A₁.
    """
    seed = config.SEED if seed is None else seed
    rng = np.random.default_rng(seed)
    bc = bc or basic_construction(inc, tau)
    comm, structure = higher_commutant(inc, bc, seed)
    dims = structure.dims
    dim_total = comm.dim
    min_block = min(dims)
    ratio = Fraction(dim_total, min_block)

    lam = inclusion_matrix(inc, seed)
    minimal = minimal_index_search(inc, seed=seed, lam=lam)
    try:
        markov_index = markov_trace(lam).alpha
        perron_reason = ""
    except DegeneratePerron as exc:
        markov_index = None
        perron_reason = str(exc)

    e1 = dual_expectation(bc)
    relative = relative_commutant(bc.left_sub, bc.left_sup, "B' ^ A")
    f = restricted_expectation(comm, relative, bc.dual.apply_many, label="F")
    pp_f_result = pp_constant(f, samples, refine_steps, seed, structure=structure)
    pp_f = pp_f_result.value
    pp_e1_sweep = pp_constant(e1, samples, refine_steps, seed).value
    # F's extremal projection is also a test element for E₁
    pp_e1 = min(pp_e1_sweep, pp_value_at(e1, pp_f_result.certificate))

    t_closed, _ = scalar_markov_closed_form(dims)
    lambda_tau = pp_constant_closed_form(t_closed)
    f_scalar = relative.dim == 1
    defect = _trace_defect(f, comm, rng)
    f_trace = f_scalar and defect <= 1e-8

    applies = inc.sub.dim == 1 or (
        len(lam.sub_dims) == 1 and len(lam.sup_dims) == 1
    )
    flags = {
        "restriction": _check(pp_e1 - pp_f, 1e-8, pp_e1 <= pp_f + 1e-8),
        "restriction_sweep": _check(pp_e1_sweep - pp_f, 1e-8, pp_e1_sweep <= pp_f + 1e-8, False, "E₁ sampled on its own"),
        "f_is_trace": _check(defect, 1e-8, f_trace, False, "" if f_scalar else "B′∩A is not the scalars"),
    }
    if f_trace:
        flags["popa_step"] = _check(pp_f - float(lambda_tau), 1e-6, pp_f <= float(lambda_tau) + 1e-6)
    else:
        flags["popa_step"] = _check(None, 1e-6, False, False, "F is not a trace on B′∩A₁")
    flags["min_block_one"] = _check(min_block, 0, min_block == 1, False)
    flags["ratio_le_minimal_index"] = _check(
        float(ratio) - minimal.value,
        1e-6,
        float(ratio) <= minimal.value + 1e-6,
        applies,
        "" if applies else "inclusion is neither over the scalars nor between factors",
    )
    flags["markov_perron"] = _check(markov_index, 0, markov_index is not None, False, perron_reason)
    flags["minimal_index_converged"] = _check(
        minimal.optimality_gap, 1e-6, minimal.converged, True, "" if minimal.converged else "search stopped above the spectral radius"
    )

    hypotheses = {
        "irreducible": f_scalar,
        "sup_simple": len(lam.sup_dims) == 1,
        "sub_simple": len(lam.sub_dims) == 1,
    }
    exact = None
    if ratio <= EXACT_POWER_LIMIT:
        exact = str(9 ** math.ceil(ratio))
    return BoundReport(
        dims,
        dim_total,
        min_block,
        ratio,
        minimal.value,
        minimal.regime,
        markov_index,
        pp_e1,
        pp_f,
        lambda_tau,
        minimal.value * math.log10(9),
        exact,
        pp_e1_sweep,
        flags,
        hypotheses,
    )
