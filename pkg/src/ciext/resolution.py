"""Truncated minimal graded free resolutions over A = Q/(f)."""
from __future__ import annotations

from dataclasses import dataclass, field

from .field_poly import FreeModule, Vector
from .groebner import (ModuleMap, ModulePresentation, buchberger, kernel_of_map,
                       minimal_generators, submodule_membership)
from .field_poly import TermOrder


def default_length(c: int) -> int:
    return 2 * c + 6


@dataclass(frozen=True, eq=False)
class Resolution:
    """F_L -> ... -> F_1 -> F_0 with ``differentials[i-1]`` = d_i : F_i -> F_{i-1}."""

    module: ModulePresentation
    shifts: tuple
    differentials: tuple

    @property
    def ring(self):
        return self.module.ring

    @property
    def length(self) -> int:
        return len(self.differentials)

    @property
    def ranks(self) -> tuple:
        return tuple(len(s) for s in self.shifts)

    def free(self, i: int) -> FreeModule:
        return FreeModule(self.ring.Q, self.shifts[i])

    def d(self, i: int) -> ModuleMap:
        if not 1 <= i <= self.length:
            raise IndexError(f"differential d_{i} outside 1..{self.length}")
        return self.differentials[i - 1]

    def to_json(self) -> dict:
        return {
            "ranks": list(self.ranks),
            "shifts": [list(s) for s in self.shifts],
            "differentials": [d.to_text() for d in self.differentials],
        }


def _normalize(v: Vector, ring) -> Vector:
    if not ring.f:
        return v
    return v.module.vector([ring.reduce(c) for c in v.components()])


def resolve(M: ModulePresentation, length: int) -> Resolution:
    """Minimal graded free resolution of M over A, truncated at homological degree ``length``.

    Each step trims the kernel of the previous differential to minimal
    generators modulo f * F before building the next free module.
    """
    if length < 1:
        raise ValueError("resolution length must be at least 1")
    ring = M.ring
    Q = ring.Q
    F = M.free_module
    basis = [F.basis(i) for i in range(F.rank)]
    cover = minimal_generators(basis, M.relations, F)
    F0 = FreeModule(Q, [v.degree() for v in cover])
    shifts = [F0.shifts]
    if cover:
        kernel = kernel_of_map(ModuleMap(F0, F, cover), M.relations)
    else:
        kernel = []
    diffs = []
    prev = F0
    for _ in range(length):
        base = ring.f_relations(prev)
        gens = [_normalize(g, ring) for g in minimal_generators(kernel, base, prev)]
        Fi = FreeModule(Q, [g.degree() for g in gens])
        d = ModuleMap(Fi, prev, gens)
        diffs.append(d)
        shifts.append(Fi.shifts)
        kernel = kernel_of_map(d, ring.f_relations(prev)) if gens else []
        prev = Fi
    return Resolution(M, tuple(shifts), tuple(diffs))


@dataclass
class Violation:
    kind: str
    spot: int
    column: int | None = None
    detail: str = ""


@dataclass
class ComplexReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v.kind for v in self.violations}


def verify_complex(R: Resolution) -> ComplexReport:
    """Certify d^2 = 0, exactness at spots 1..L-1, and minimality over A."""
    ring = R.ring
    report = ComplexReport()
    L = R.length
    for i in range(1, L + 1):
        for c, col in enumerate(R.d(i).columns):
            if any(e.constant_term() for e in col.components()):
                report.violations.append(Violation("minimality", i, c, "unit entry"))
    for i in range(1, L):
        comp = R.d(i).compose(R.d(i + 1))
        for c, col in enumerate(comp.columns):
            if any(ring.reduce(e) for e in col.components()):
                report.violations.append(Violation("composition", i, c, "d_i o d_(i+1) != 0"))
        target_rel = ring.f_relations(R.free(i - 1))
        kernel = kernel_of_map(R.d(i), target_rel)
        Fi = R.free(i)
        order = TermOrder(Fi, "top")
        image = buchberger(list(R.d(i + 1).columns) + ring.f_relations(Fi), order, Fi)
        for k in kernel:
            if not submodule_membership(k, image):
                report.violations.append(Violation("exactness", i, None, f"cycle {k} not a boundary"))
        kernel_gb = buchberger(kernel + ring.f_relations(Fi), order, Fi)
        for c, col in enumerate(R.d(i + 1).columns):
            if not submodule_membership(col, kernel_gb):
                report.violations.append(Violation("exactness", i, c, f"column {col} not a cycle"))
    return report


def minimal_generator_count(E: ModulePresentation) -> int:
    """mu(E) = dim_k E / mE, by graded Nakayama trimming of the presentation."""
    F = E.free_module
    return len(minimal_generators([F.basis(i) for i in range(F.rank)], E.relations, F))


def eventual_period_start(ranks, period: int = 2) -> int | None:
    """Least i with ranks[j] == ranks[j + period] for all j >= i inside the window."""
    ranks = list(ranks)
    if len(ranks) < period + 2:
        return None
    start = len(ranks) - period
    while start > 0 and ranks[start - 1] == ranks[start - 1 + period]:
        start -= 1
    if start > len(ranks) - period - 2:
        return None
    return start
