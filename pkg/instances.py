# instances.py
"""
Instance generators: scalar inclusions C ⊂ ⊕M_{n_j}, factor tensors,
direct sums, diagonal embeddings and group-subgroup inclusions C[H] ⊂ C[G]
with their subgroup lattices.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from errors import NotASubgroup, SpecError, VerificationError
from inclusion import ConcreteAlgebra, UnitalInclusion, subalgebra_from_generators
from markov import scalar_markov_closed_form
from multimatrix import AmbientAlgebra, DimensionVector, TraceFunctional, as_int

MAX_GROUP_ORDER = 24


@dataclass(eq=False)
class FiniteGroupTable:
    name: str
    labels: tuple
    mult: np.ndarray
    identity: int
    inverse: np.ndarray

    @property
    def order(self):
        return len(self.labels)

    @classmethod
    def from_generators(cls, name, identity, generators, compose, key=lambda x: x, label=str):
        """Close the generators under `compose`, listing elements in breadth-first order from the identity."""
        elements = [identity]
        index = {key(identity): 0}
        i = 0
        while i < len(elements):
            for g in generators:
                y = compose(elements[i], g)
                k = key(y)
                if k not in index:
                    index[k] = len(elements)
                    elements.append(y)
                    if len(elements) > MAX_GROUP_ORDER:
                        raise SpecError(f"group {name} has more than {MAX_GROUP_ORDER} elements")
            i += 1
        n = len(elements)
        mult = np.zeros((n, n), dtype=int)
        for a in range(n):
            for b in range(n):
                mult[a, b] = index[key(compose(elements[a], elements[b]))]
        inverse = np.array([int(np.flatnonzero(mult[a] == 0)[0]) for a in range(n)])
        group = cls(name, tuple(label(x) for x in elements), mult, 0, inverse)
        group.verify()
        return group

    def verify(self):
        n = self.order
        mult = self.mult
        if not np.array_equal(mult[self.identity], np.arange(n)) or not np.array_equal(mult[:, self.identity], np.arange(n)):
            raise VerificationError("group identity")
        if not np.all(mult[np.arange(n), self.inverse] == self.identity):
            raise VerificationError("group inverses")
        lhs = mult[mult]
        rhs = mult[np.arange(n)[:, None, None], mult[None, :, :]]
        bad = int(np.sum(lhs != rhs))
        if bad:
            raise VerificationError("group associativity", float(bad))
        return True

    def index_of(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise SpecError(f"{label!r} is not an element of {self.name}") from None

    def closure(self, indices):
        """Subgroup generated by the given element indices."""
        gens = sorted(set(int(i) for i in indices))
        members = [self.identity]
        seen = {self.identity}
        k = 0
        while k < len(members):
            for g in gens:
                y = int(self.mult[members[k], g])
                if y not in seen:
                    seen.add(y)
                    members.append(y)
            k += 1
        return frozenset(seen)

    def is_subgroup(self, indices):
        s = set(indices)
        if self.identity not in s:
            return False
        return all(int(self.mult[a, self.inverse[b]]) in s for a in s for b in s)

    def generated(self, labels):
        return self.closure(self.index_of(x) for x in labels)

    def regular_representation(self):
        """u_g with u_g δ_h = δ_{gh}."""
        n = self.order
        u = np.zeros((n, n, n))
        for g in range(n):
            u[g, self.mult[g], np.arange(n)] = 1.0
        return u

    def subgroup_label(self, subgroup):
        if len(subgroup) == self.order:
            return self.name
        if len(subgroup) == 1:
            return "1"
        chosen, span = [], frozenset([self.identity])
        for g in sorted(subgroup):
            if g not in span:
                chosen.append(g)
                span = self.closure(chosen)
        return "<" + ",".join(self.labels[g] for g in chosen) + ">"


def _compose_perm(p, q):
    return tuple(p[q[i]] for i in range(len(q)))


def _cycle_label(p):
    seen, cycles = set(), []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cycle, k = [], start
        while k not in seen:
            seen.add(k)
            cycle.append(str(k + 1))
            k = p[k]
        cycles.append("(" + "".join(cycle) + ")")
    return "".join(cycles) or "()"


def permutation_group(name, degree, generators):
    return FiniteGroupTable.from_generators(name, tuple(range(degree)), [tuple(g) for g in generators], _compose_perm, label=_cycle_label)


def cyclic_group(n):
    if int(n) != n or not 1 <= n <= 12:
        raise SpecError(f"cyclic groups are available for 1 ≤ n ≤ 12, got {n!r}")
    return FiniteGroupTable.from_generators(f"Z{n}", 0, [1 % n], lambda a, b: (a + b) % n)


def symmetric_group(k):
    if k == 3:
        return permutation_group("S3", 3, [(1, 0, 2), (1, 2, 0)])
    if k == 4:
        return permutation_group("S4", 4, [(1, 0, 2, 3), (1, 2, 3, 0)])
    raise SpecError(f"symmetric group S{k} is not in the library")


def dihedral_group():
    """Symmetries of the square, acting on its vertices."""
    return permutation_group("D4", 4, [(1, 2, 3, 0), (0, 3, 2, 1)])


def klein_four_group():
    return FiniteGroupTable.from_generators(
        "Z2xZ2",
        (0, 0),
        [(1, 0), (0, 1)],
        lambda a, b: ((a[0] + b[0]) % 2, (a[1] + b[1]) % 2),
        label=lambda a: f"({a[0]},{a[1]})",
    )


_QUATERNION_UNITS = {
    "1": np.eye(2),
    "i": np.array([[1j, 0], [0, -1j]]),
    "j": np.array([[0, 1], [-1, 0]]),
    "k": np.array([[0, 1j], [1j, 0]]),
}


def _matrix_key(x):
    return tuple(np.round(np.concatenate([x.real.ravel(), x.imag.ravel()]), 8).tolist())


def _quaternion_label(x):
    for name, unit in _QUATERNION_UNITS.items():
        if np.allclose(x, unit):
            return name
        if np.allclose(x, -unit):
            return "-" + name
    raise SpecError("matrix is not a quaternion unit")


def quaternion_group():
    return FiniteGroupTable.from_generators(
        "Q8",
        np.eye(2, dtype=complex),
        [_QUATERNION_UNITS["i"].astype(complex), _QUATERNION_UNITS["j"].astype(complex)],
        lambda a, b: a @ b,
        key=_matrix_key,
        label=_quaternion_label,
    )


def group_by_name(name):
    if not isinstance(name, str):
        raise SpecError(f"group name must be a string, got {name!r}")
    name = name.strip()
    if name.upper().startswith("Z") and name[1:].isdigit():
        return cyclic_group(int(name[1:]))
    builders = {
        "S3": lambda: symmetric_group(3),
        "S4": lambda: symmetric_group(4),
        "D4": dihedral_group,
        "Q8": quaternion_group,
        "Z2XZ2": klein_four_group,
    }
    try:
        return builders[name.upper()]()
    except KeyError:
        raise SpecError(f"unknown group {name!r}; available: Z1..Z12, {', '.join(sorted(builders))}") from None


def all_subgroups(g):
    """Every subgroup, found by joining cyclic subgroups with single elements."""
    found = {g.closure([x]) for x in range(g.order)}
    frontier = list(found)
    while frontier:
        grown = []
        for sub in frontier:
            if 2 * len(sub) > g.order:
                # Lagrange: a proper subgroup of index < 2 is the whole group
                candidates = [frozenset(range(g.order))]
            else:
                candidates = [g.closure(set(sub) | {x}) for x in range(g.order) if x not in sub]
            for cand in candidates:
                if cand not in found:
                    found.add(cand)
                    grown.append(cand)
        frontier = grown
    return sorted(found, key=lambda s: (len(s), sorted(s)))


@dataclass
class SubgroupLattice:
    group: FiniteGroupTable
    subgroups: list
    order_relation: list = field(default_factory=list)

    def labels(self):
        return [self.group.subgroup_label(s) for s in self.subgroups]

    def to_dict(self):
        return {
            "subgroups": self.labels(),
            "orders": [len(s) for s in self.subgroups],
            "contained_in": [[i, j] for i, j in self.order_relation],
        }


def intermediate_subgroup_lattice(g, h):
    h = frozenset(h)
    if not g.is_subgroup(h):
        raise NotASubgroup(f"{sorted(h)} is not a subgroup of {g.name}")
    subs = [s for s in all_subgroups(g) if h <= s]
    relation = [(i, j) for i, a in enumerate(subs) for j, b in enumerate(subs) if i != j and a < b]
    return SubgroupLattice(g, subs, relation)


def group_algebra(g, subgroup, label=""):
    """span{u_k : k ∈ K} in the left regular representation."""
    u = g.regular_representation()
    idx = sorted(subgroup)
    vectors = u[idx].reshape(len(idx), -1) / np.sqrt(g.order)
    return ConcreteAlgebra(vectors.astype(complex), g.order, label or f"C[{g.subgroup_label(frozenset(idx))}]")


def group_algebra_inclusion(g, h):
    """C[H] ⊂ C[G] with τ(u_g) = δ_{g,e}, the normalized trace of M_|G|."""
    h = frozenset(h)
    if not g.is_subgroup(h):
        raise NotASubgroup(f"{sorted(h)} is not a subgroup of {g.name}")
    sub = group_algebra(g, h)
    sup = group_algebra(g, frozenset(range(g.order)))
    tau = TraceFunctional.normalized(AmbientAlgebra.full_matrix(g.order))
    return UnitalInclusion(sub, sup, f"{sub.label} ⊂ {sup.label}"), tau


def group_intermediates(g, h):
    """Group algebras C[K] for the subgroups H ⊊ K ⊆ G, keyed by subgroup label."""
    lattice = intermediate_subgroup_lattice(g, h)
    return {g.subgroup_label(k): group_algebra(g, k) for k in lattice.subgroups if k != frozenset(h)}


def scalar_inclusion(n):
    """C ⊂ ⊕M_{n_j} with the Markov trace."""
    ambient = AmbientAlgebra.from_dims(n)
    weights, _ = scalar_markov_closed_form(ambient.dims)
    label = "+".join(f"M{k}" for k in ambient.dims)
    sup = ConcreteAlgebra.full(ambient, label)
    return UnitalInclusion(ConcreteAlgebra.scalars(ambient.size), sup, f"C ⊂ {label}"), TraceFunctional.from_weights(ambient, weights)


def left_factor(k, m):
    """M_k ⊗ 1 inside M_k ⊗ M_m."""
    units = np.zeros((k * k, k, k))
    for a in range(k * k):
        units[a, a // k, a % k] = 1.0
    mats = np.array([np.kron(e, np.eye(m)) for e in units]) / np.sqrt(m)
    return ConcreteAlgebra(mats.reshape(k * k, -1).astype(complex), k * m, f"M{k}⊗1")


def right_factor(k, m):
    """1 ⊗ M_m inside M_k ⊗ M_m."""
    units = np.zeros((m * m, m, m))
    for a in range(m * m):
        units[a, a // m, a % m] = 1.0
    mats = np.array([np.kron(np.eye(k), e) for e in units]) / np.sqrt(k)
    return ConcreteAlgebra(mats.reshape(m * m, -1).astype(complex), k * m, f"1⊗M{m}")


def factor_tensor_inclusion(k, m):
    """M_k ⊗ 1 ⊂ M_k ⊗ M_m with the normalized trace."""
    if min(k, m) < 1 or k * m > 8:
        raise SpecError(f"factor tensor needs k, m ≥ 1 and km ≤ 8, got ({k}, {m})")
    ambient = AmbientAlgebra.full_matrix(k * m)
    sup = ConcreteAlgebra.full(ambient, f"M{k * m}")
    return UnitalInclusion(left_factor(k, m), sup, f"M{k}⊗1 ⊂ M{k * m}"), TraceFunctional.normalized(ambient)


def direct_sum_inclusion(dims):
    """⊕M_{n_j} embedded block-diagonally in M_N with the normalized trace."""
    ambient = AmbientAlgebra.from_dims(dims)
    label = "+".join(f"M{k}" for k in ambient.dims)
    full = AmbientAlgebra.full_matrix(ambient.size)
    sub = ConcreteAlgebra.full(ambient, label)
    sup = ConcreteAlgebra.full(full, f"M{ambient.size}")
    return UnitalInclusion(sub, sup, f"{label} ⊂ M{ambient.size}"), TraceFunctional.normalized(full)


def diagonal_inclusion(n, copies):
    """M_n embedded as x ↦ x ⊕ ... ⊕ x in ⊕ copies of M_n, equal weights."""
    if n < 1 or copies < 1:
        raise SpecError("diagonal inclusion needs n ≥ 1 and copies ≥ 1")
    ambient = AmbientAlgebra.from_dims([n] * copies)
    sup = ConcreteAlgebra.full(ambient, "+".join([f"M{n}"] * copies))
    units = np.zeros((n * n, n, n))
    for a in range(n * n):
        units[a, a // n, a % n] = 1.0
    mats = np.array([np.kron(np.eye(copies), e) for e in units]) / np.sqrt(copies)
    sub = ConcreteAlgebra(mats.reshape(n * n, -1).astype(complex), n * copies, f"M{n}")
    tau = TraceFunctional.from_weights(ambient, [Fraction(1, n * copies)] * copies)
    return UnitalInclusion(sub, sup, f"M{n} ⊂ {sup.label}"), tau


KINDS = ("scalar", "factor_tensor", "direct_sum", "diagonal", "group_pair")


@dataclass
class InstanceDescriptor:
    kind: str
    params: dict
    expected: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown instance kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        required = {
            "scalar": ("dims",),
            "factor_tensor": ("k", "m"),
            "direct_sum": ("dims",),
            "diagonal": ("n", "copies"),
            "group_pair": ("group", "subgroup"),
        }[self.kind]
        missing = [key for key in required if key not in self.params]
        if missing:
            raise SpecError(f"{self.kind} instance is missing {', '.join(missing)}")


def group_pair_from_params(params):
    g = group_by_name(params["group"])
    if not isinstance(params["subgroup"], list):
        raise SpecError(f"subgroup must be a list of generator labels, got {params['subgroup']!r}")
    h = g.generated(params["subgroup"])
    return g, h


def build_instance(desc):
    """(UnitalInclusion, TraceFunctional) for a descriptor."""
    p = desc.params
    if desc.kind == "scalar":
        return scalar_inclusion(DimensionVector(p["dims"]))
    if desc.kind == "factor_tensor":
        return factor_tensor_inclusion(as_int(p["k"], "k", 1), as_int(p["m"], "m", 1))
    if desc.kind == "direct_sum":
        return direct_sum_inclusion(p["dims"])
    if desc.kind == "diagonal":
        return diagonal_inclusion(as_int(p["n"], "n", 1), as_int(p["copies"], "copies", 1))
    g, h = group_pair_from_params(p)
    return group_algebra_inclusion(g, h)


def resolve_intermediate(desc, inc, spec):
    """
    An intermediate algebra from a job entry: subgroup generator labels for
    group instances, a named tensor factor, or explicit generator matrices.
    """
    if isinstance(spec, dict) and "subgroup" in spec:
        if desc is None or desc.kind != "group_pair":
            raise SpecError("subgroup intermediates need a group_pair instance")
        if not isinstance(spec["subgroup"], list):
            raise SpecError(f"subgroup must be a list of generator labels, got {spec['subgroup']!r}")
        g = group_by_name(desc.params["group"])
        return group_algebra(g, g.generated(spec["subgroup"]))
    if isinstance(spec, dict) and "factor" in spec:
        if spec["factor"] not in ("left", "right"):
            raise SpecError(f"factor must be 'left' or 'right', got {spec['factor']!r}")
        missing = [key for key in ("k", "m") if key not in spec]
        if missing:
            raise SpecError(f"factor intermediate is missing {', '.join(missing)}")
        k, m = as_int(spec["k"], "factor k", 1), as_int(spec["m"], "factor m", 1)
        if k * m != inc.size:
            raise SpecError(f"factor M{k}⊗M{m} does not act on C^{inc.size}")
        return left_factor(k, m) if spec["factor"] == "left" else right_factor(k, m)
    if isinstance(spec, dict) and "generators" in spec:
        if not isinstance(spec["generators"], list):
            raise SpecError("generators must be a list of matrices")
        gens = [parse_complex_matrix(x) for x in spec["generators"]]
        gens += list(inc.sub.matrices())
        return subalgebra_from_generators(inc.size, gens, spec.get("label", ""))
    raise SpecError(f"cannot read intermediate {spec!r}")


def parse_complex_matrix(rows):
    """[[re, im], ...] rows into a complex matrix."""
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise SpecError("matrix entries must be [re, im] pairs of numbers") from None
    if arr.ndim != 3 or arr.shape[-1] != 2 or arr.shape[0] != arr.shape[1]:
        raise SpecError(f"matrix must be square with [re, im] entries, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def default_suite():
    """Instances with closed-form Watatani indices."""
    return [
        InstanceDescriptor("scalar", {"dims": [1]}, {"index": 1}, "C in M1"),
        InstanceDescriptor("scalar", {"dims": [2]}, {"index": 4}, "C in M2"),
        InstanceDescriptor("scalar", {"dims": [3]}, {"index": 9}, "C in M3"),
        InstanceDescriptor("scalar", {"dims": [1, 1]}, {"index": 2}, "C in C+C"),
        InstanceDescriptor("scalar", {"dims": [1, 2]}, {"index": 5}, "C in M1+M2"),
        InstanceDescriptor("scalar", {"dims": [2, 3]}, {"index": 13}, "C in M2+M3"),
        InstanceDescriptor("factor_tensor", {"k": 2, "m": 2}, {"index": 4}, "M2 in M4"),
        InstanceDescriptor("factor_tensor", {"k": 1, "m": 3}, {"index": 9}, "C in M3 (tensor)"),
        InstanceDescriptor("direct_sum", {"dims": [1, 1]}, {"index": 2}, "C+C in M2"),
        InstanceDescriptor("direct_sum", {"dims": [1, 2]}, {"index": 2}, "M1+M2 in M3"),
        InstanceDescriptor("diagonal", {"n": 2, "copies": 2}, {"index": 2}, "M2 in M2+M2"),
        InstanceDescriptor("group_pair", {"group": "S3", "subgroup": []}, {"index": 6}, "C in C[S3]"),
        InstanceDescriptor("group_pair", {"group": "S3", "subgroup": ["(12)"]}, {"index": 3}, "C[Z2] in C[S3]"),
        InstanceDescriptor("group_pair", {"group": "Z4", "subgroup": ["2"]}, {"index": 2}, "C[Z2] in C[Z4]"),
        InstanceDescriptor("group_pair", {"group": "Q8", "subgroup": ["-1"]}, {"index": 4}, "C[Z2] in C[Q8]"),
        InstanceDescriptor("group_pair", {"group": "Z2xZ2", "subgroup": []}, {"index": 4}, "C in C[Z2xZ2]"),
    ]


@dataclass(eq=False)
class AnglePair:
    name: str
    inclusion: UnitalInclusion
    trace: TraceFunctional
    c: ConcreteAlgebra
    d: ConcreteAlgebra


def default_angle_suite():
    """Intermediate pairs used for angle, meet and stability checks."""
    pairs = []
    inc, tau = scalar_inclusion(DimensionVector((4,)))
    pairs.append(AnglePair("M4 commuting square", inc, tau, left_factor(2, 2), right_factor(2, 2)))
    pairs.append(AnglePair("M4 self pair", inc, tau, left_factor(2, 2), left_factor(2, 2)))

    s3 = symmetric_group(3)
    inc, tau = group_algebra_inclusion(s3, s3.generated([]))
    a, b, r = (group_algebra(s3, s3.generated([x])) for x in ("(12)", "(13)", "(123)"))
    pairs.append(AnglePair("S3 (12),(13)", inc, tau, a, b))
    pairs.append(AnglePair("S3 (12),(123)", inc, tau, a, r))
    pairs.append(AnglePair("S3 (123),S3", inc, tau, r, inc.sup))

    z4 = cyclic_group(4)
    inc, tau = group_algebra_inclusion(z4, z4.generated([]))
    pairs.append(AnglePair("Z4 <2>,Z4", inc, tau, group_algebra(z4, z4.generated(["2"])), inc.sup))

    klein = klein_four_group()
    inc, tau = group_algebra_inclusion(klein, klein.generated([]))
    pairs.append(
        AnglePair(
            "Z2xZ2 axes",
            inc,
            tau,
            group_algebra(klein, klein.generated(["(1,0)"])),
            group_algebra(klein, klein.generated(["(0,1)"])),
        )
    )
    return pairs
