"""Complete intersections A = Q/(f), their modules, and the I-adic filtration of a module."""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .field_poly import FreeModule, NotHomogeneousError, Polynomial, PolyRing, TermOrder, Vector
from .groebner import (GroebnerBasis, ModulePresentation, buchberger, ideal_basis,
                       krull_dimension, minimal_generators, normal_form, subquotient_presentation)

__all__ = [
    "RingPresentation", "ModulePresentation", "RegularSequenceReport", "IdealPowerCache",
    "verify_regular_sequence", "ideal_power", "quotient_mod_power", "gr_piece",
]


@dataclass(frozen=True)
class RegularSequenceReport:
    ok: bool
    dimensions: tuple
    failing_prefix: int | None = None

    @property
    def message(self) -> str:
        if self.ok:
            return "regular sequence"
        k = self.failing_prefix
        return (f"not a regular sequence: f_{k} does not lower the dimension "
                f"(dim Q/(f_1..f_{k}) = {self.dimensions[k]}, before it {self.dimensions[k - 1]})")


def verify_regular_sequence(Q: PolyRing, f: Sequence[Polynomial]) -> RegularSequenceReport:
    """Dimension-drop test, valid for homogeneous f in a polynomial ring."""
    for g in f:
        if not g.is_homogeneous():
            raise NotHomogeneousError(f"{g} is not homogeneous")
    dims = [Q.nvars]
    for k in range(1, len(f) + 1):
        dims.append(krull_dimension(ideal_basis(list(f[:k]), Q)))
    for k in range(1, len(f) + 1):
        if dims[k] != Q.nvars - k:
            return RegularSequenceReport(False, tuple(dims), k)
    return RegularSequenceReport(True, tuple(dims))


@dataclass(frozen=True, eq=False)
class RingPresentation:
    """A = Q/(f) with f a homogeneous Q-regular sequence (possibly empty)."""

    Q: PolyRing
    f: tuple = ()
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "f", tuple(self.f))
        for g in self.f:
            if g.ring != self.Q:
                raise ValueError(f"{g} does not live in {self.Q}")
            if not g:
                raise ValueError("regular sequence entries must be nonzero")
            if not g.is_homogeneous():
                raise NotHomogeneousError(f"{g} is not homogeneous")
        if self.check:
            report = self.regular_sequence
            if not report.ok:
                raise ValueError(report.message)

    @property
    def c(self) -> int:
        return len(self.f)

    @property
    def p(self) -> int:
        return self.Q.p

    @cached_property
    def regular_sequence(self) -> RegularSequenceReport:
        return verify_regular_sequence(self.Q, self.f)

    @cached_property
    def f_basis(self) -> GroebnerBasis:
        return ideal_basis(list(self.f), self.Q)

    def reduce(self, g: Polynomial) -> Polynomial:
        return normal_form(g, self.f_basis)

    def f_relations(self, module: FreeModule) -> list[Vector]:
        out = []
        for i in range(module.rank):
            e = module.basis(i)
            out.extend(e * g for g in self.f)
        return out

    def ideal(self, polys: Sequence[Polynomial]) -> GroebnerBasis:
        """Basis of the preimage in Q of the ideal of A generated by ``polys``."""
        return ideal_basis(list(polys) + list(self.f), self.Q)

    def module(self, shifts: Sequence[int], relations: Sequence = ()) -> ModulePresentation:
        """Cokernel over A of the given relation columns (vectors or component lists)."""
        F = FreeModule(self.Q, shifts)
        cols = []
        for r in relations:
            v = r if isinstance(r, Vector) else F.vector([self.Q(e) for e in r])
            if v.module != F:
                v = Vector._from_clean(F, v.terms)
            if not v.is_homogeneous():
                raise NotHomogeneousError(f"relation {v} is not homogeneous")
            cols.append(v)
        cols.extend(self.f_relations(F))
        return ModulePresentation(self, tuple(F.shifts), tuple(c for c in cols if c))

    def free(self, shifts: Sequence[int] = (0,)) -> ModulePresentation:
        return self.module(shifts)

    def residue_field(self, shift: int = 0) -> ModulePresentation:
        F = FreeModule(self.Q, (shift,))
        return self.module((shift,), [F.vector([x]) for x in self.Q.gens()])

    def quotient(self, polys: Sequence[Polynomial]) -> ModulePresentation:
        F = FreeModule(self.Q, (0,))
        return self.module((0,), [F.vector([g]) for g in polys])


class IdealPowerCache:
    """Memoized powers I^n of a homogeneous ideal of A; safe for concurrent readers."""

    def __init__(self, ring: RingPresentation, generators: Sequence[Polynomial]):
        gens = [ring.Q(g) for g in generators]
        for g in gens:
            if not g.is_homogeneous():
                raise NotHomogeneousError(f"ideal generator {g} is not homogeneous")
        self.ring = ring
        self.given = tuple(gens)
        self.r = len(gens)
        self._lock = threading.RLock()
        self._gens: dict[int, list[Polynomial]] = {0: [ring.Q.one()]}
        self._bases: dict[int, GroebnerBasis] = {}
        self._rank1 = FreeModule(ring.Q, (0,))

    def generators(self, n: int) -> list[Polynomial]:
        """Minimal homogeneous generators of I^n modulo (f), computed as I^(n-1) * I."""
        if n < 0:
            raise ValueError("n must be non-negative")
        with self._lock:
            if n in self._gens:
                return self._gens[n]
            prev = self.generators(n - 1)
            Q = self.ring.Q
            products = [self.ring.reduce(a * b) for a in prev for b in self.given]
            vecs = [self._rank1.vector([g]) for g in products if g]
            base = [self._rank1.vector([g]) for g in self.ring.f]
            kept = minimal_generators(vecs, base, self._rank1)
            gens = [v.component(0) for v in kept]
            self._gens[n] = gens
            return gens

    def basis(self, n: int) -> GroebnerBasis:
        with self._lock:
            if n not in self._bases:
                self._bases[n] = self.ring.ideal(self.generators(n))
            return self._bases[n]


def ideal_power(cache: IdealPowerCache, n: int) -> GroebnerBasis:
    return cache.basis(n)


def _power_relations(N: ModulePresentation, cache: IdealPowerCache, n: int) -> list[Vector]:
    F = N.free_module
    out = []
    for g in cache.generators(n):
        for i in range(F.rank):
            out.append(F.basis(i) * g)
    return out


def quotient_mod_power(N: ModulePresentation, cache: IdealPowerCache, n: int,
                       trim: bool = True) -> ModulePresentation:
    """N / I^n N, keeping N's generators unless ``trim`` drops redundant ones."""
    rels = tuple(N.relations) + tuple(_power_relations(N, cache, n))
    F = N.free_module
    basis = [F.basis(i) for i in range(F.rank)]
    if trim:
        kept = minimal_generators(basis, rels, F)
        if len(kept) != len(basis):
            return subquotient_presentation(basis, (), rels, N.ring, F)
    return ModulePresentation(N.ring, N.shifts, rels, N.generators)


def gr_piece(N: ModulePresentation, cache: IdealPowerCache, n: int) -> ModulePresentation:
    """I^n N / I^(n+1) N as a subquotient of N."""
    return subquotient_presentation(_power_relations(N, cache, n), _power_relations(N, cache, n + 1),
                                    N.relations, N.ring, N.free_module)
