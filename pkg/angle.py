# angle.py
"""
Angle between two intermediate subalgebras B ⊆ C, D ⊆ A, measured with the
A-valued inner product ⟨x, y⟩_A = E₁(x*y) on the basic construction.
"""
import itertools
from dataclasses import dataclass, field

import numpy as np

import config
from basic_construction import basic_construction, gns, jones_projection
from errors import DegenerateIntermediate, NotInBasicConstruction, NotIntermediate, VerificationError
from inclusion import center, intersect, relative_commutant
from multimatrix import adjoint, operator_norm

RIGIDITY_THRESHOLD = np.pi / 3
_CLAMP_TOL = 1e-9
_SNAP_TOL = 1e-12


@dataclass
class AngleReport:
    cos_value: float
    angle: float
    numerator: float
    denom_c: float
    denom_d: float
    trace_used: object = field(repr=False, default=None)
    labels: tuple = ()

    def to_dict(self):
        weights = None
        if self.trace_used is not None and self.trace_used.weights is not None:
            weights = self.trace_used.weights_as_text()
        return {
            "cos": self.cos_value,
            "angle": self.angle,
            "numerator": self.numerator,
            "denom_c": self.denom_c,
            "denom_d": self.denom_d,
            "trace_weights": weights,
            "pair": list(self.labels),
        }


@dataclass
class MeetCheck:
    difference: float
    passed: bool
    iterations: int
    monotone: bool
    final_distance: float


@dataclass
class RigidityReport:
    minimal: list
    pairs: list
    applicable: bool
    reasons: list

    def to_dict(self):
        return {
            "minimal": list(self.minimal),
            "pairs": self.pairs,
            "applicable": self.applicable,
            "reasons": list(self.reasons),
        }


def a_valued_inner(e1, x, y):
    """⟨x, y⟩_A = E₁(x*y), as an operator on the GNS space."""
    for z in (x, y):
        if not e1.contains(z):
            raise NotInBasicConstruction("operator is not in the basic construction")
    return e1.apply(adjoint(x) @ y)


def a_norm(e1, x):
    return float(np.sqrt(max(operator_norm(a_valued_inner(e1, x, x)), 0.0)))


def _check_intermediate(inc, c):
    if not (c.contains_algebra(inc.sub) and inc.sup.contains_algebra(c)):
        raise NotIntermediate(f"{c.label or 'algebra'} is not between {inc.sub.label or 'B'} and {inc.sup.label or 'A'}")


def angle(inc, c, d, tau, bc=None):
    """cos α(C, D) = ‖⟨e_C − e_B, e_D − e_B⟩_A‖ / (‖e_C − e_B‖_A ‖e_D − e_B‖_A)."""
    _check_intermediate(inc, c)
    _check_intermediate(inc, d)
    bc = bc or basic_construction(inc, tau, build_algebra=False)
    e1 = bc.dual
    e_b = bc.e.matrix
    x = jones_projection(bc.gns, c).matrix - e_b
    y = jones_projection(bc.gns, d).matrix - e_b

    denom_c = a_norm(e1, x)
    denom_d = a_norm(e1, y)
    for label, value in ((c.label, denom_c), (d.label, denom_d)):
        if value <= 1e-10:
            raise DegenerateIntermediate(f"{label or 'intermediate'} coincides with {inc.sub.label or 'B'}")
    numerator = operator_norm(a_valued_inner(e1, x, y))
    cos = numerator / (denom_c * denom_d)
    if cos > 1.0 + _CLAMP_TOL:
        raise VerificationError("Cauchy-Schwarz on the basic construction", cos - 1.0)
    cos = min(max(cos, 0.0), 1.0)
    if cos > 1.0 - _SNAP_TOL:
        cos = 1.0
    return AngleReport(cos, float(np.arccos(cos)), numerator, denom_c, denom_d, tau, (c.label, d.label))


def cauchy_schwarz_check(e, samples=1000, seed=None):
    """Largest ‖E(x*y)‖ − ‖x‖_E ‖y‖_E over seeded random pairs in the source of E."""
    rng = np.random.default_rng(config.SEED if seed is None else seed)
    source = e.source
    xs = np.array([source.random_element(rng) for _ in range(samples)])
    ys = np.array([source.random_element(rng) for _ in range(samples)])
    worst = 0.0
    for start in range(0, samples, 250):
        bx, by = xs[start:start + 250], ys[start:start + 250]
        cross = e.apply_many(adjoint(bx) @ by)
        sx = e.apply_many(adjoint(bx) @ bx)
        sy = e.apply_many(adjoint(by) @ by)
        lhs = np.linalg.norm(cross, 2, axis=(1, 2))
        rhs = np.sqrt(np.linalg.norm(sx, 2, axis=(1, 2))) * np.sqrt(np.linalg.norm(sy, 2, axis=(1, 2)))
        worst = max(worst, float(np.max((lhs - rhs) / np.maximum(1.0, rhs))))
    return worst


def meet_projection_check(inc, c, d, tau, g=None, max_iter=200):
    """
    Compare e_C ∧ e_D (eigenvalue-2 eigenspace of e_C + e_D) with e_{C∩D},
    and follow ‖(e_C e_D e_C)^n − e_C ∧ e_D‖ until it drops below 1e-6.
    """
    _check_intermediate(inc, c)
    _check_intermediate(inc, d)
    g = g or gns(inc.sup, tau)
    e_c = jones_projection(g, c).matrix
    e_d = jones_projection(g, d).matrix
    w, v = np.linalg.eigh(e_c + e_d)
    top = v[:, w >= 2.0 - 1e-9]
    meet = top @ np.conj(top.T)
    e_cd = jones_projection(g, intersect(c, d)).matrix
    difference = float(np.linalg.norm(meet - e_cd, 2))

    step = e_c @ e_d @ e_c
    power = step
    previous = np.inf
    monotone = True
    distance = float(np.linalg.norm(power - meet, 2))
    iterations = 1
    while distance >= 1e-6 and iterations < max_iter:
        power = power @ step
        iterations += 1
        previous, distance = distance, float(np.linalg.norm(power - meet, 2))
        if distance > previous + 1e-12:
            monotone = False
    passed = difference <= 1e-8 and distance < 1e-6 and monotone
    return MeetCheck(difference, passed, iterations, monotone, distance)


def minimal_elements(inc, family):
    """Names of members of `family` (name -> algebra) that contain no other member properly; B itself is ignored."""
    proper = {k: v for k, v in family.items() if v.dim > inc.sub.dim}
    minimal = []
    for name, alg in proper.items():
        below = [
            other
            for other_name, other in proper.items()
            if other_name != name and other.dim < alg.dim and alg.contains_algebra(other)
        ]
        if not below:
            minimal.append(name)
    return sorted(minimal)


def rigidity_report(inc, intermediates, tau, bc=None):
    """
    Pairwise angles between the minimal members of a family of intermediates,
    each reported against π/3. The threshold is informational unless the
    inclusion is irreducible between simple algebras.
    """
    for alg in intermediates.values():
        _check_intermediate(inc, alg)
    minimal = minimal_elements(inc, intermediates)
    pairs = []
    if len(minimal) > 1:
        bc = bc or basic_construction(inc, tau, build_algebra=False)
        for a, b in itertools.combinations(minimal, 2):
            report = angle(inc, intermediates[a], intermediates[b], tau, bc)
            pairs.append({"pair": [a, b], "angle": report.angle, "above_threshold": bool(report.angle > RIGIDITY_THRESHOLD)})

    reasons = []
    if relative_commutant(inc.sub, inc.sup).dim != 1:
        reasons.append("B′∩A is not the scalars")
    if center(inc.sup).dim != 1:
        reasons.append("A is not simple")
    if center(inc.sub).dim != 1:
        reasons.append("B is not simple")
    return RigidityReport(minimal, pairs, not reasons, reasons)
