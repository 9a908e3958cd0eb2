"""Eisenbud operators, Ext over A = Q/(f) as cohomology of Hom_A(F, D), and socles.

Sign convention: the lifted differential satisfies d~ o d~ = sum_j f_j * t~_j
with no sign.  The opposite sign gives homotopic operators and the same maps
on Ext up to a global sign.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .field_poly import FreeModule, Polynomial, TermOrder, Vector
from .groebner import (Lifter, ModuleMap, ModulePresentation, annihilated_submodule,
                       buchberger, kernel_of_map, minimal_generators, normal_form,
                       subquotient_presentation, submodule_membership)
from .resolution import Resolution


class WindowError(ValueError):
    pass


class LiftError(ArithmeticError):
    """d~^2 has an entry outside (f): the lifted differential is inconsistent."""


@dataclass(frozen=True, eq=False)
class LiftedDifferential:
    resolution: Resolution
    matrices: tuple

    def d(self, i: int) -> ModuleMap:
        return self.matrices[i - 1]


def lift_differential(R: Resolution) -> LiftedDifferential:
    """Entrywise preimages in Q, chosen as normal forms modulo (f)."""
    ring = R.ring
    mats = []
    for d in R.differentials:
        cols = [d.target.vector([ring.reduce(e) for e in col.components()]) for col in d.columns]
        mats.append(ModuleMap(d.source, d.target, cols, d.degree, check=False))
    return LiftedDifferential(R, tuple(mats))


@dataclass(frozen=True, eq=False)
class EisenbudOperators:
    """t_j^(i) : F_(i+2) -> F_i over A, with the Q-lifts used to build them."""

    resolution: Resolution
    lifted: LiftedDifferential
    operators: dict
    lifts: dict

    @property
    def c(self) -> int:
        return self.resolution.ring.c

    def t(self, j: int, i: int) -> ModuleMap:
        """Operator t_j (1-based j) on F_(i+2) -> F_i."""
        return self.operators[(j, i)]

    def identity_holds(self, i: int) -> bool:
        """sum_j f_j t~_j == d~_(i+1) o d~_(i+2), exactly over Q."""
        Ld = self.lifted
        lhs = Ld.d(i + 1).compose(Ld.d(i + 2))
        ring = self.resolution.ring
        total = [lhs.target.zero() for _ in lhs.columns]
        for j, fj in enumerate(ring.f, start=1):
            tt = self.lifts[(j, i)]
            total = [acc + col * fj for acc, col in zip(total, tt.columns)]
        return all(a == b for a, b in zip(total, lhs.columns))

    def to_json(self) -> dict:
        return {
            f"t{j}^({i})": m.to_text() for (j, i), m in sorted(self.operators.items())
        }


def eisenbud_operators(Ld: LiftedDifferential, f: Sequence[Polynomial] | None = None) -> EisenbudOperators:
    """Split d~_(i+1) o d~_(i+2) along f by exact division with cofactors."""
    R = Ld.resolution
    ring = R.ring
    f = tuple(ring.f if f is None else f)
    Q = ring.Q
    ops, lifts = {}, {}
    if not f:
        return EisenbudOperators(R, Ld, ops, lifts)
    rank1 = FreeModule(Q, (0,))
    divider = Lifter(rank1, [rank1.vector([g]) for g in f])
    for i in range(0, R.length - 1):
        comp = Ld.d(i + 1).compose(Ld.d(i + 2))
        src, tgt = comp.source, comp.target
        cols = [[{} for _ in f] for _ in comp.columns]
        for c, col in enumerate(comp.columns):
            for r, h in enumerate(col.components()):
                if not h:
                    continue
                q = divider.lift(rank1.vector([h]))
                if q is None:
                    raise LiftError(f"entry ({r},{c}) of d~_{i + 1} d~_{i + 2} = {h} is not in (f)")
                for j, qj in enumerate(q):
                    for m, coeff in qj.terms.items():
                        cols[c][j][(r, m)] = coeff
        for j, fj in enumerate(f, start=1):
            deg = comp.degree - fj.degree()
            tilde = [Vector._from_clean(tgt, cols[c][j - 1]) for c in range(src.rank)]
            lifts[(j, i)] = ModuleMap(src, tgt, tilde, deg)
            reduced = [tgt.vector([ring.reduce(e) for e in v.components()]) for v in tilde]
            ops[(j, i)] = ModuleMap(src, tgt, reduced, deg)
    return EisenbudOperators(R, Ld, ops, lifts)


@dataclass(frozen=True, eq=False)
class ExtModule:
    """Ext^i_A(M, D) presented on cocycle representatives in Hom_A(F_i, D)."""

    index: int
    coefficient: ModulePresentation
    presentation: ModulePresentation
    ambient: FreeModule

    @property
    def generators(self) -> tuple:
        return self.presentation.generators or ()

    @property
    def boundaries(self) -> tuple:
        """im(delta) + relations of Hom(F_i, D), inside the ambient module."""
        return self.presentation.ambient_relations or ()

    @cached_property
    def mu(self) -> int:
        return self.presentation.rank

    @cached_property
    def socle_dim(self) -> int:
        return socle_dimension(self.presentation)

    def is_zero(self) -> bool:
        return self.mu == 0

    def to_json(self) -> dict:
        out = self.presentation.to_json()
        out["index"] = self.index
        out["cocycles"] = [str(g) for g in self.generators]
        return out


def _hom_shifts(F: FreeModule, D: ModulePresentation) -> list[int]:
    return [sd - sf for sf in F.shifts for sd in D.shifts]


def precompose(phi: ModuleMap, D: ModulePresentation, source_hom: FreeModule,
               target_hom: FreeModule) -> ModuleMap:
    """Hom(phi, D) : Hom(F_b, D) -> Hom(F_a, D) for phi : F_a -> F_b."""
    m = D.rank
    rows = phi.rows()
    cols = []
    for k in range(phi.target.rank):
        for l in range(m):
            terms = {}
            for c in range(phi.source.rank):
                for mono, coeff in rows[k][c].terms.items():
                    terms[(c * m + l, mono)] = coeff
            cols.append(Vector._from_clean(target_hom, terms))
    return ModuleMap(source_hom, target_hom, cols, phi.degree)


class ExtComplex:
    """Hom_A(F, D) for a fixed resolution F of M; memoizes Ext modules and maps."""

    def __init__(self, resolution: Resolution, D: ModulePresentation,
                 operators: EisenbudOperators | None = None):
        self.resolution = resolution
        self.D = D
        self.operators = operators
        self._lock = threading.RLock()
        self._ext: dict[int, ExtModule] = {}
        self._lifters: dict = {}

    @property
    def max_index(self) -> int:
        return self.resolution.length - 1

    def hom(self, i: int) -> FreeModule:
        if i < 0 or i > self.resolution.length:
            return FreeModule(self.D.Q, ())
        return FreeModule(self.D.Q, _hom_shifts(self.resolution.free(i), self.D))

    def hom_relations(self, i: int) -> list[Vector]:
        H = self.hom(i)
        m = self.D.rank
        b = H.rank // m if m else 0
        return [rel.embed(H, k * m) for k in range(b) for rel in self.D.relations]

    def coboundary(self, i: int) -> ModuleMap:
        """delta^i : Hom(F_i, D) -> Hom(F_(i+1), D)."""
        R = self.resolution
        return precompose(R.d(i + 1), self.D, self.hom(i), self.hom(i + 1))

    def ext(self, i: int) -> ExtModule:
        if not 0 <= i <= self.max_index:
            raise WindowError(f"Ext^{i} needs d_{i + 1}; resolution truncated at {self.resolution.length}")
        with self._lock:
            if i in self._ext:
                return self._ext[i]
        H = self.hom(i)
        rel = self.hom_relations(i)
        if H.rank == 0:
            pres = ModulePresentation(self.D.ring, (), (), (), ())
        else:
            ker = kernel_of_map(self.coboundary(i), self.hom_relations(i + 1))
            im = list(self.coboundary(i - 1).columns) if i >= 1 else []
            pres = subquotient_presentation(ker, im, rel, self.D.ring, H)
        E = ExtModule(i, self.D, pres, H)
        with self._lock:
            return self._ext.setdefault(i, E)

    def boundary_basis(self, i: int):
        with self._lock:
            key = ("b", i)
            if key not in self._lifters:
                E = self.ext(i)
                self._lifters[key] = buchberger(list(E.boundaries), TermOrder(E.ambient, "top"),
                                                E.ambient)
            return self._lifters[key]

    def lifter(self, i: int) -> Lifter:
        with self._lock:
            if i not in self._lifters:
                E = self.ext(i)
                self._lifters[i] = Lifter(E.ambient, E.generators, E.boundaries)
            return self._lifters[i]

    def express(self, i: int, w: Vector) -> Vector:
        """Coordinates of the class of cocycle w in Ext^i, normalized mod its relations."""
        E = self.ext(i)
        coeffs = self.lifter(i).lift(Vector._from_clean(E.ambient, w.terms))
        if coeffs is None:
            raise ValueError(f"{w} is not a cocycle of Hom(F_{i}, D)")
        v = E.presentation.free_module.vector(coeffs)
        return E.presentation.normal_form(v)


@dataclass(frozen=True, eq=False)
class ExtMap:
    """A map between computed Ext presentations, columns normalized mod target relations."""

    source: ExtModule
    target: ExtModule
    matrix: ModuleMap
    well_defined: bool = True

    def compose(self, other: ExtMap) -> ExtMap:
        """self o other."""
        m = self.matrix.compose(other.matrix)
        cols = [self.target.presentation.normal_form(c) for c in m.columns]
        mat = ModuleMap(other.matrix.source, self.matrix.target, cols, m.degree, check=False)
        return ExtMap(other.source, self.target, mat, self.well_defined and other.well_defined)

    def equals(self, other: ExtMap) -> bool:
        return (self.matrix.source.rank == other.matrix.source.rank
                and all(a.terms == b.terms for a, b in zip(self.matrix.columns, other.matrix.columns)))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def is_surjective(self) -> bool:
        T = self.target.presentation
        if T.rank == 0:
            return True
        G = buchberger(list(self.matrix.columns) + list(T.relations), TermOrder(T.free_module, "top"),
                       T.free_module)
        return all(submodule_membership(T.free_module.basis(k), G) for k in range(T.rank))

    def is_injective(self) -> bool:
        S = self.source.presentation
        if S.rank == 0:
            return True
        ker = kernel_of_map(self.matrix, self.target.presentation.relations)
        G = S.relation_basis
        return all(submodule_membership(v, G) for v in ker)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and self.is_surjective()


def _map_on_ext(X_src: ExtComplex, i: int, X_tgt: ExtComplex, k: int,
                cochain_map: ModuleMap, degree: int) -> ExtMap:
    """Induced map Ext^i(X_src) -> Ext^k(X_tgt) of a cochain-level map Hom_i -> Hom_k."""
    E1, E2 = X_src.ext(i), X_tgt.ext(k)
    well = True
    # boundaries must land in boundaries
    if E1.boundaries and E2.ambient.rank:
        G2 = X_tgt.boundary_basis(k)
        for b in E1.boundaries:
            if not submodule_membership(cochain_map.apply(b), G2):
                well = False
                break
    cols = []
    lifter = X_tgt.lifter(k)
    for g in E1.generators:
        w = cochain_map.apply(g)
        coeffs = lifter.lift(w)
        if coeffs is None:
            well = False
            coeffs = [E2.presentation.Q.zero()] * E2.mu
        v = E2.presentation.free_module.vector(coeffs)
        cols.append(E2.presentation.normal_form(v))
    mat = ModuleMap(E1.presentation.free_module, E2.presentation.free_module, cols, degree, check=False)
    return ExtMap(E1, E2, mat, well)


def ext_module(R: Resolution, ops: EisenbudOperators | None, D: ModulePresentation, i: int) -> ExtModule:
    return ExtComplex(R, D, ops).ext(i)


def operator_map(X: ExtComplex, i: int, j: int) -> ExtMap:
    ops = X.operators
    if ops is None:
        raise ValueError("ExtComplex was built without operators")
    if i + 2 > X.max_index:
        raise WindowError(f"t_{j} on Ext^{i} needs Ext^{i + 2}; window ends at {X.max_index}")
    t = ops.t(j, i)
    P = precompose(t, X.D, X.hom(i), X.hom(i + 2))
    return _map_on_ext(X, i, X, i + 2, P, t.degree)


def ext_operator_action(ops: EisenbudOperators, D: ModulePresentation, i: int, j: int) -> ExtMap:
    """t_j : Ext^i(M, D) -> Ext^(i+2)(M, D) on the computed presentations."""
    return operator_map(ExtComplex(ops.resolution, D, ops), i, j)


def operators_commute(X: ExtComplex, i: int, j: int, l: int) -> bool:
    a = operator_map(X, i + 2, j).compose(operator_map(X, i, l))
    b = operator_map(X, i + 2, l).compose(operator_map(X, i, j))
    return a.equals(b)


def socle_dimension(E) -> int:
    """dim_k (0 :_E m) for the irrelevant ideal m."""
    if isinstance(E, ExtModule):
        E = E.presentation
    if E.rank == 0:
        return 0
    F = E.free_module
    S = annihilated_submodule(E, E.Q.gens())
    return len(minimal_generators(S, E.relations, F))


def coefficient_map(X1: ExtComplex, X2: ExtComplex, i: int, u: Polynomial) -> ExtMap:
    """Ext^i(M, D1) -> Ext^i(M, D2) induced by multiplication by u : D1 -> D2."""
    D1, D2 = X1.D, X2.D
    if D1.shifts != D2.shifts:
        raise ValueError("coefficient modules must share generators")
    H1, H2 = X1.hom(i), X2.hom(i)
    cols = [Vector._from_clean(H2, (H1.basis(k) * u).terms) for k in range(H1.rank)]
    deg = u.degree() if u else 0
    P = ModuleMap(H1, H2, cols, deg, check=False)
    return _map_on_ext(X1, i, X2, i, P, deg)


@dataclass
class NaturalityReport:
    index: int
    commutes: dict = field(default_factory=dict)
    well_defined: bool = True

    @property
    def ok(self) -> bool:
        return self.well_defined and all(self.commutes.values())


def naturality_check(ops: EisenbudOperators, u: Polynomial, D1: ModulePresentation,
                     D2: ModulePresentation, i: int) -> NaturalityReport:
    """t_j o u == u o t_j as maps Ext^i(M, D1) -> Ext^(i+2)(M, D2), for every j."""
    R = ops.resolution
    X1, X2 = ExtComplex(R, D1, ops), ExtComplex(R, D2, ops)
    report = NaturalityReport(i)
    G2 = D2.relation_basis
    for rel in D1.relations:
        if not submodule_membership(Vector._from_clean(D2.free_module, (rel * u).terms), G2):
            report.well_defined = False
            return report
    u_i = coefficient_map(X1, X2, i, u)
    u_i2 = coefficient_map(X1, X2, i + 2, u)
    for j in range(1, ops.c + 1):
        a = operator_map(X2, i, j).compose(u_i)
        b = u_i2.compose(operator_map(X1, i, j))
        report.commutes[j] = a.equals(b)
        report.well_defined &= a.well_defined and b.well_defined
    return report
