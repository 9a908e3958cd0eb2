"""Buchberger engine for homogeneous submodules of graded free modules.

Everything downstream (resolutions, Ext, annihilators, socles) is phrased as
one of a handful of primitives here: normal forms, reduced bases, syzygies,
kernels of maps into presented modules, lifting along generators, and graded
Nakayama trimming.
"""
from __future__ import annotations

import heapq
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, count
from typing import Any, Sequence

from .field_poly import (FreeModule, NotHomogeneousError, Polynomial, PolyRing,
                         TermOrder, Vector, mono_div, mono_divides, mono_lcm, mono_mul)


class ContainmentError(ValueError):
    """Structured diagnostic: which operation, which element, in which degree."""

    def __init__(self, operation: str, element, degree):
        super().__init__(f"{operation}: element {element} (degree {degree}) is not contained "
                         "in the required submodule")
        self.operation = operation
        self.element = element
        self.degree = degree


# -- raw term-dict kernels -----------------------------------------------------------

def _axpy(target: dict, terms: dict, coeff: int, mono: tuple, p: int, push=None):
    """target -= coeff * mono * terms, in place."""
    for (idx, m), c in terms.items():
        k = (idx, mono_mul(m, mono))
        old = target.get(k)
        v = ((old or 0) - coeff * c) % p
        if v:
            target[k] = v
            if old is None and push is not None:
                push(k)
        elif old is not None:
            del target[k]


def _reduce(terms: dict, reducer, order: TermOrder, p: int, full: bool = True,
            quotients: list | None = None) -> dict:
    """Divide ``terms`` by the monic elements known to ``reducer``.

    With ``full=False`` stop as soon as the leading term is irreducible.
    ``quotients[pos]`` accumulates {monomial: coeff} multipliers when given.
    """
    f = dict(terms)
    if not f:
        return {}
    key = order.key
    heap = [(_neg(key(*k)), k) for k in f]
    heapq.heapify(heap)

    def push(k):
        heapq.heappush(heap, (_neg(key(*k)), k))

    rem = {}
    while heap:
        _, t = heapq.heappop(heap)
        c = f.get(t)
        if c is None:
            continue
        hit = reducer.find(t[0], t[1])
        if hit is None:
            if not full:
                rem.update(f)
                return rem
            rem[t] = c
            del f[t]
            continue
        pos, g, lm = hit
        q = mono_div(t[1], lm)
        _axpy(f, g, c, q, p, push)
        if quotients is not None:
            bucket = quotients[pos]
            bucket[q] = (bucket.get(q, 0) + c) % p
    return rem


def _neg(key: tuple) -> tuple:
    return tuple(-x for x in key)


def _lead(terms: dict, order: TermOrder) -> tuple:
    return max(terms, key=lambda k: order.key(*k))


def _monic(terms: dict, order: TermOrder, p: int) -> dict:
    lc = terms[_lead(terms, order)]
    if lc == 1:
        return terms
    inv = pow(lc, -1, p)
    return {k: c * inv % p for k, c in terms.items()}


class _Builder:
    """Incremental homogeneous Buchberger: normal selection, product and chain criteria."""

    def __init__(self, order: TermOrder):
        self.order = order
        self.p = order.ring.p
        self.elems: list[dict] = []
        self.leads: list[tuple] = []
        self.by_idx: dict[int, list[int]] = {}
        self.heap: list = []
        self.pending: set = set()
        self._tick = count()
        self.ideal_like = order.module.rank == 1

    def find(self, idx, mono):
        for pos in self.by_idx.get(idx, ()):
            lm = self.leads[pos][1]
            if mono_divides(lm, mono):
                return pos, self.elems[pos], lm
        return None

    def push(self, terms: dict):
        if not terms:
            return
        idx, mono = _lead(terms, self.order)
        deg = self.order.degree(idx, mono)
        heapq.heappush(self.heap, (deg, next(self._tick), -1, -1, terms))

    def _insert(self, terms: dict):
        terms = _monic(terms, self.order, self.p)
        lead = _lead(terms, self.order)
        pos = len(self.elems)
        self.elems.append(terms)
        self.leads.append(lead)
        peers = self.by_idx.setdefault(lead[0], [])
        for k in peers:
            lcm = mono_lcm(self.leads[k][1], lead[1])
            deg = self.order.degree(lead[0], lcm)
            heapq.heappush(self.heap, (deg, next(self._tick), k, pos, None))
            self.pending.add((k, pos))
        peers.append(pos)

    def _skip(self, i: int, j: int) -> bool:
        (idx, mi), (_, mj) = self.leads[i], self.leads[j]
        if self.ideal_like and all(a == 0 or b == 0 for a, b in zip(mi, mj)):
            return True
        lcm = mono_lcm(mi, mj)
        for k in self.by_idx.get(idx, ()):
            if k in (i, j) or not mono_divides(self.leads[k][1], lcm):
                continue
            if (min(i, k), max(i, k)) not in self.pending and \
                    (min(j, k), max(j, k)) not in self.pending:
                return True
        return False

    def _spoly(self, i: int, j: int) -> dict:
        (_, mi), (_, mj) = self.leads[i], self.leads[j]
        lcm = mono_lcm(mi, mj)
        s: dict = {}
        _axpy(s, self.elems[i], self.p - 1, mono_div(lcm, mi), self.p)
        _axpy(s, self.elems[j], 1, mono_div(lcm, mj), self.p)
        return s

    def run(self, max_degree: int | None = None):
        while self.heap and (max_degree is None or self.heap[0][0] <= max_degree):
            _, _, i, j, g = heapq.heappop(self.heap)
            if g is None:
                self.pending.discard((i, j))
                if self._skip(i, j):
                    continue
                g = self._spoly(i, j)
            h = _reduce(g, self, self.order, self.p, full=False)
            if h:
                self._insert(h)

    def reduced(self) -> list[dict]:
        order = self.order
        positions = sorted(range(len(self.elems)), key=lambda k: order.key(*self.leads[k]))
        kept: list[int] = []
        for pos in positions:
            idx, mono = self.leads[pos]
            if any(self.leads[k][0] == idx and mono_divides(self.leads[k][1], mono) for k in kept):
                continue
            kept.append(pos)
        kept.sort(key=lambda k: (order.degree(*self.leads[k]), _neg(order.key(*self.leads[k]))))
        reducer = _StaticReducer([self.elems[k] for k in kept], order)
        out = []
        for k in kept:
            g = self.elems[k]
            lead = self.leads[k]
            tail = {t: c for t, c in g.items() if t != lead}
            red = _reduce(tail, reducer, order, self.p)
            red[lead] = 1
            out.append(red)
        return out


class _StaticReducer:
    def __init__(self, elems: list[dict], order: TermOrder):
        self.elems = elems
        self.leads = [_lead(e, order) for e in elems]
        self.by_idx: dict[int, list[int]] = {}
        for pos, (idx, _) in enumerate(self.leads):
            self.by_idx.setdefault(idx, []).append(pos)

    def find(self, idx, mono):
        for pos in self.by_idx.get(idx, ()):
            lm = self.leads[pos][1]
            if mono_divides(lm, mono):
                return pos, self.elems[pos], lm
        return None


# -- public types ---------------------------------------------------------------------

_CACHE_LIMIT = 4096
_cache: OrderedDict = OrderedDict()
_cache_lock = threading.Lock()


def _order_signature(order: TermOrder):
    if order.kind == "schreyer":
        return None
    return (order.module, order.kind, order.split)


class GroebnerBasis:
    """Reduced Groebner basis of a submodule of ``order.module`` (rank 1 for ideals)."""

    def __init__(self, order: TermOrder, elements: list[dict], reduced: bool = True):
        self.order = order
        self.module = order.module
        self.ring = order.ring
        self.reduced = reduced
        self._elems = elements
        self._reducer = _StaticReducer(elements, order)

    def __len__(self):
        return len(self._elems)

    @property
    def generators(self) -> list[Vector]:
        return [Vector._from_clean(self.module, dict(e)) for e in self._elems]

    def polynomials(self) -> list[Polynomial]:
        if self.module.rank != 1:
            raise ValueError("not an ideal basis")
        return [Polynomial._from_clean(self.ring, {m: c for (_, m), c in e.items()})
                for e in self._elems]

    def leading_terms(self) -> list[tuple[int, tuple]]:
        return list(self._reducer.leads)

    def reduce_terms(self, terms: dict, quotients: list | None = None) -> dict:
        return _reduce(terms, self._reducer, self.order, self.ring.p, True, quotients)

    def normal_form(self, v):
        return normal_form(v, self)

    def __contains__(self, v) -> bool:
        return submodule_membership(v, self)

    def is_unit(self) -> bool:
        return any(not any(m) for _, m in self._reducer.leads)

    def __repr__(self):
        return f"GroebnerBasis({[str(g) for g in self.generators]})"


def _as_terms(v, module: FreeModule) -> dict:
    if isinstance(v, Polynomial):
        if module.rank != 1:
            raise ValueError("polynomial given for a module of rank > 1")
        return {(0, m): c for m, c in v.terms.items()}
    if isinstance(v, Vector):
        if v.module.rank != module.rank or v.module.ring != module.ring:
            raise ValueError(f"vector in {v.module} does not live in {module}")
        return v.terms
    raise TypeError(f"expected Polynomial or Vector, got {type(v).__name__}")


def normal_form(f, G: GroebnerBasis):
    rem = G.reduce_terms(_as_terms(f, G.module))
    if isinstance(f, Polynomial):
        return Polynomial._from_clean(G.ring, {m: c for (_, m), c in rem.items()})
    return Vector._from_clean(f.module, rem)


def submodule_membership(v, G: GroebnerBasis) -> bool:
    return not G.reduce_terms(_as_terms(v, G.module))


def _check_homogeneous(gens, module: FreeModule, operation: str):
    for g in gens:
        terms = _as_terms(g, module)
        degs = {module.term_degree(i, m) for i, m in terms}
        if len(degs) > 1:
            raise NotHomogeneousError(f"{operation}: {g} is not homogeneous (degrees {sorted(degs)})")


def buchberger(gens: Sequence, order: TermOrder | None = None,
               module: FreeModule | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the span of homogeneous ``gens``.

    ``order`` defaults to position-over-term on ``module`` (or on the rank-1
    module for a list of polynomials).
    """
    if order is None:
        if module is None:
            if not gens:
                raise ValueError("need a module or order for an empty generator list")
            first = gens[0]
            module = first.module if isinstance(first, Vector) else FreeModule(first.ring, (0,))
        order = TermOrder(module, "pot")
    module = order.module
    term_lists = [_as_terms(g, module) for g in gens]
    _check_homogeneous(gens, module, "buchberger")
    sig = _order_signature(order)
    cache_key = None
    if sig is not None:
        cache_key = (sig, tuple(frozenset(t.items()) for t in term_lists))
        with _cache_lock:
            hit = _cache.get(cache_key)
            if hit is not None:
                _cache.move_to_end(cache_key)
                return GroebnerBasis(order, hit)
    builder = _Builder(order)
    for t in term_lists:
        builder.push(t)
    builder.run()
    elems = builder.reduced()
    if cache_key is not None:
        with _cache_lock:
            _cache[cache_key] = elems
            if len(_cache) > _CACHE_LIMIT:
                _cache.popitem(last=False)
    return GroebnerBasis(order, elems)


def ideal_basis(polys: Sequence[Polynomial], ring: PolyRing | None = None) -> GroebnerBasis:
    ring = ring or (polys[0].ring if polys else None)
    if ring is None:
        raise ValueError("empty ideal needs an explicit ring")
    return buchberger(list(polys), TermOrder(FreeModule(ring, (0,)), "pot"))


def spair_residues(G: GroebnerBasis) -> list[dict]:
    """Remainders of all S-pairs of G (all empty iff G is a Groebner basis)."""
    out = []
    p = G.ring.p
    elems, leads = G._elems, G._reducer.leads
    for i, j in combinations(range(len(elems)), 2):
        if leads[i][0] != leads[j][0]:
            continue
        lcm = mono_lcm(leads[i][1], leads[j][1])
        s: dict = {}
        ci = pow(elems[i][leads[i]], -1, p)
        cj = pow(elems[j][leads[j]], -1, p)
        _axpy(s, elems[i], -ci % p, mono_div(lcm, leads[i][1]), p)
        _axpy(s, elems[j], cj, mono_div(lcm, leads[j][1]), p)
        out.append(G.reduce_terms(s))
    return out


# -- maps ---------------------------------------------------------------------------------

class ModuleMap:
    """Homogeneous map between graded free modules, stored by columns.

    Column c is the image of the c-th source basis vector; ``degree`` is the
    internal degree of the map (image degree minus source degree).
    """

    def __init__(self, source: FreeModule, target: FreeModule, columns: Sequence[Vector],
                 degree: int = 0, check: bool = True):
        columns = tuple(columns)
        if len(columns) != source.rank:
            raise ValueError(f"{len(columns)} columns for source rank {source.rank}")
        for col in columns:
            if col.module.rank != target.rank or col.module.ring != target.ring:
                raise ValueError("column does not live in the target module")
        self.source = source
        self.target = target
        self.columns = tuple(c if c.module == target else Vector._from_clean(target, c.terms)
                             for c in columns)
        self.degree = degree
        if check:
            for c, col in enumerate(self.columns):
                if col.is_zero():
                    continue
                d = col.degree()
                if d != source.shifts[c] + degree:
                    raise NotHomogeneousError(
                        f"column {c} has degree {d}, expected {source.shifts[c] + degree}")

    @classmethod
    def from_rows(cls, source: FreeModule, target: FreeModule, rows, degree: int = 0):
        ring = target.ring
        cols = []
        for c in range(source.rank):
            cols.append(target.vector([ring(rows[r][c]) for r in range(target.rank)]))
        return cls(source, target, cols, degree)

    @property
    def ring(self) -> PolyRing:
        return self.target.ring

    def entry(self, r: int, c: int) -> Polynomial:
        return self.columns[c].component(r)

    def rows(self) -> list[list[Polynomial]]:
        comps = [col.components() for col in self.columns]
        return [[comps[c][r] for c in range(self.source.rank)] for r in range(self.target.rank)]

    def apply(self, v: Vector) -> Vector:
        p = self.ring.p
        out: dict = {}
        for (c, m), coeff in v.terms.items():
            _axpy(out, self.columns[c].terms, -coeff % p, m, p)
        return Vector._from_clean(self.target, out)

    def compose(self, other: ModuleMap) -> ModuleMap:
        """self o other."""
        cols = [self.apply(Vector._from_clean(self.source, col.terms)) for col in other.columns]
        return ModuleMap(other.source, self.target, cols, self.degree + other.degree, check=False)

    def is_zero(self) -> bool:
        return all(col.is_zero() for col in self.columns)

    def __eq__(self, other):
        return (isinstance(other, ModuleMap) and self.source == other.source
                and self.target == other.target and self.columns == other.columns)

    def __hash__(self):
        return hash((self.source, self.target, self.columns))

    def to_text(self) -> list[list[str]]:
        return [[str(e) for e in row] for row in self.rows()]

    def __repr__(self):
        return f"ModuleMap({self.to_text()})"


def _relation_vectors(relations, module: FreeModule) -> list[Vector]:
    if relations is None:
        return []
    if isinstance(relations, ModuleMap):
        relations = relations.columns
    out = []
    for r in relations:
        if isinstance(r, Polynomial):
            r = module.vector([r])
        out.append(Vector._from_clean(module, r.terms) if r.module != module else r)
    return out


def syzygy_module(G: GroebnerBasis) -> ModuleMap:
    """Schreyer syzygies of the elements of G.

    Columns generate the syzygy module and form a Groebner basis for the
    order induced by G's leading terms.
    """
    p = G.ring.p
    elems = G._elems
    leads = G._reducer.leads
    degs = [G.order.degree(*lead) for lead in leads]
    target = FreeModule(G.ring, degs)
    cols, shifts = [], []
    for i, j in combinations(range(len(elems)), 2):
        if leads[i][0] != leads[j][0]:
            continue
        lcm = mono_lcm(leads[i][1], leads[j][1])
        qi, qj = mono_div(lcm, leads[i][1]), mono_div(lcm, leads[j][1])
        ci = pow(elems[i][leads[i]], -1, p)
        cj = pow(elems[j][leads[j]], -1, p)
        s: dict = {}
        _axpy(s, elems[i], -ci % p, qi, p)
        _axpy(s, elems[j], cj, qj, p)
        quotients: list[dict] = [{} for _ in elems]
        rem = G.reduce_terms(s, quotients)
        if rem:
            raise ArithmeticError("syzygy_module: input is not a Groebner basis")
        terms: dict = {}
        for k, bucket in enumerate(quotients):
            for m, c in bucket.items():
                terms[(k, m)] = (terms.get((k, m), 0) - c) % p
        for k, m, c in ((i, qi, ci), (j, qj, -cj % p)):
            terms[(k, m)] = (terms.get((k, m), 0) + c) % p
        terms = {k: c for k, c in terms.items() if c}
        cols.append(Vector._from_clean(target, terms))
        shifts.append(G.order.degree(leads[i][0], lcm))
    return ModuleMap(FreeModule(G.ring, shifts), target, cols)


def schreyer_order(G: GroebnerBasis, syzygies: ModuleMap) -> TermOrder:
    return TermOrder(syzygies.target, "schreyer", images=G.leading_terms(), base=G.order)


def _augmented(target: FreeModule, columns: Sequence[Vector], col_shifts: Sequence[int],
               relations: Sequence[Vector]):
    m = target.rank
    aug = FreeModule(target.ring, target.shifts + tuple(col_shifts))
    order = TermOrder(aug, "block", split=m)
    gens = []
    unit = target.ring.unit_monomial
    for j, col in enumerate(columns):
        terms = {k: c for k, c in col.terms.items()}
        terms[(m + j, unit)] = 1
        gens.append(terms)
    gens.extend(dict(r.terms) for r in relations if r)
    return aug, order, gens


def _gb_from_terms(order: TermOrder, gens: list[dict]) -> GroebnerBasis:
    sig = _order_signature(order)
    key = (sig, tuple(frozenset(g.items()) for g in gens))
    with _cache_lock:
        hit = _cache.get(key)
        if hit is not None:
            _cache.move_to_end(key)
            return GroebnerBasis(order, hit)
    builder = _Builder(order)
    for g in gens:
        degs = {order.degree(i, mono) for i, mono in g}
        if len(degs) > 1:
            raise NotHomogeneousError(f"inhomogeneous generator in degrees {sorted(degs)}")
        builder.push(g)
    builder.run()
    elems = builder.reduced()
    with _cache_lock:
        _cache[key] = elems
        if len(_cache) > _CACHE_LIMIT:
            _cache.popitem(last=False)
    return GroebnerBasis(order, elems)


def kernel_of_map(phi: ModuleMap, relations_target=None) -> list[Vector]:
    """Generators of {v : phi(v) in span(relations_target)} (a Groebner basis of it)."""
    rels = _relation_vectors(relations_target, phi.target)
    for r in rels:
        if r.module.rank != phi.target.rank:
            raise ValueError("relation vector does not live in the target module")
    m = phi.target.rank
    col_shifts = [s + phi.degree for s in phi.source.shifts]
    _, order, gens = _augmented(phi.target, phi.columns, col_shifts, rels)
    G = _gb_from_terms(order, gens)
    out = []
    for e in G._elems:
        if _lead(e, order)[0] >= m:
            out.append(Vector._from_clean(phi.source, {(i - m, mono): c for (i, mono), c in e.items()}))
    return out


class Lifter:
    """Express vectors through fixed generators modulo fixed relations."""

    def __init__(self, module: FreeModule, gens: Sequence[Vector], relations: Sequence[Vector] = ()):
        self.module = module
        self.gens = [Vector._from_clean(module, g.terms) for g in gens]
        shifts = [g.degree() if g else 0 for g in self.gens]
        _, self.order, terms = _augmented(module, self.gens, shifts,
                                          _relation_vectors(relations, module))
        self.basis = _gb_from_terms(self.order, terms)
        self.m = module.rank

    def lift(self, v: Vector) -> list[Polynomial] | None:
        rem = self.basis.reduce_terms(_as_terms(v, self.module))
        if any(i < self.m for i, _ in rem):
            return None
        ring = self.module.ring
        p = ring.p
        coeffs: list[dict] = [{} for _ in self.gens]
        for (i, mono), c in rem.items():
            coeffs[i - self.m][mono] = -c % p
        return [Polynomial._from_clean(ring, d) for d in coeffs]

    def contains(self, v: Vector) -> bool:
        return self.lift(v) is not None


def ideal_quotient(I: GroebnerBasis, J: Sequence[Polynomial]) -> GroebnerBasis:
    """(I : J) = {a : a*J subset of I} as a reduced basis."""
    ring = I.ring
    if I.module.rank != 1:
        raise ValueError("ideal_quotient expects an ideal basis")
    J = [g for g in J if g]
    if not J:
        return ideal_basis([ring.one()], ring)
    target = FreeModule(ring, [-g.degree() for g in J])
    col = target.vector(J)
    phi = ModuleMap(FreeModule(ring, (0,)), target, [col])
    rels = []
    for k in range(len(J)):
        for g in I.polynomials():
            comps = [ring.zero()] * len(J)
            comps[k] = g
            rels.append(target.vector(comps))
    kernel = kernel_of_map(phi, rels)
    return ideal_basis([v.component(0) for v in kernel], ring)


def krull_dimension(I: GroebnerBasis) -> int:
    """dim Q/I from the leading monomials; -1 for the unit ideal."""
    leads = [m for _, m in I.leading_terms()]
    n = I.ring.nvars
    if any(not any(m) for m in leads):
        return -1
    supports = [frozenset(k for k, e in enumerate(m) if e) for m in leads]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = frozenset(subset)
            if not any(sup <= s for sup in supports):
                return size
    return 0


def minimal_generators(gens: Sequence[Vector], base: Sequence[Vector] = (),
                       module: FreeModule | None = None) -> list[Vector]:
    """Graded Nakayama trimming of ``gens`` modulo span(base).

    Generators are visited by increasing degree (stable within a degree) and
    kept only if not already in the span of base plus earlier keepers.
    """
    if module is None:
        if gens:
            module = gens[0].module
        elif base:
            module = base[0].module
        else:
            return []
    order = TermOrder(module, "top")
    builder = _Builder(order)
    for b in base:
        builder.push(dict(_as_terms(b, module)))
    nonzero = [g for g in gens if g]
    for g in nonzero:
        if not g.is_homogeneous():
            raise NotHomogeneousError(f"minimal_generators: {g} is not homogeneous")
    nonzero.sort(key=lambda g: g.degree())
    kept = []
    for g in nonzero:
        builder.run(max_degree=g.degree())
        r = _reduce(_as_terms(g, module), builder, order, module.ring.p, full=False)
        if r:
            kept.append(g)
            builder.push(dict(_as_terms(g, module)))
    return kept


# -- presented modules -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModulePresentation:
    """Cokernel of a homogeneous matrix: Q^shifts / span(relations).

    ``ring`` is the ring presentation (anything with ``.Q`` and ``.f``); over
    A = Q/(f) the relations carry the f_j * e_i closure.  ``generators`` keeps
    ambient representatives when the module was built as a subquotient.
    """

    ring: Any
    shifts: tuple
    relations: tuple
    generators: tuple | None = None
    ambient_relations: tuple | None = field(default=None, repr=False)

    @property
    def Q(self) -> PolyRing:
        return self.ring.Q

    @property
    def rank(self) -> int:
        return len(self.shifts)

    @cached_property
    def free_module(self) -> FreeModule:
        return FreeModule(self.Q, self.shifts)

    @cached_property
    def relation_basis(self) -> GroebnerBasis:
        return buchberger(list(self.relations), TermOrder(self.free_module, "top"))

    @property
    def relation_map(self) -> ModuleMap:
        shifts = [r.degree() if r else 0 for r in self.relations]
        return ModuleMap(FreeModule(self.Q, shifts), self.free_module, self.relations)

    def is_zero(self) -> bool:
        G = self.relation_basis
        return all(submodule_membership(self.free_module.basis(i), G) for i in range(self.rank))

    def normal_form(self, v: Vector) -> Vector:
        return normal_form(Vector._from_clean(self.free_module, v.terms), self.relation_basis)

    def hilbert_function(self, degree: int) -> int:
        """dim_k of the degree-``degree`` piece (count of standard monomials)."""
        leads = self.relation_basis.leading_terms()
        total = 0
        for idx, s in enumerate(self.shifts):
            for mono in self.Q.monomials(degree - s):
                if not any(i == idx and mono_divides(lm, mono) for i, lm in leads):
                    total += 1
        return total

    def to_json(self) -> dict:
        return {
            "shifts": list(self.shifts),
            "relations": [[str(c) for c in r.components()] for r in self.relations],
        }


def subquotient_presentation(ker_gens: Sequence[Vector], im_gens: Sequence[Vector],
                             ambient_relations: Sequence[Vector], ring,
                             module: FreeModule | None = None) -> ModulePresentation:
    """Presentation of span(ker) / (span(im) + ambient relations), trimmed to minimal generators."""
    pool = list(ker_gens) + list(im_gens) + list(ambient_relations)
    if module is None:
        if not pool:
            raise ValueError("cannot infer the ambient module")
        module = pool[0].module
    ker = [Vector._from_clean(module, v.terms) for v in ker_gens]
    im = [Vector._from_clean(module, v.terms) for v in im_gens]
    amb = [Vector._from_clean(module, v.terms) for v in ambient_relations]
    if im:
        big = buchberger(ker + amb, TermOrder(module, "top"))
        for v in im:
            if not submodule_membership(v, big):
                raise ContainmentError("subquotient_presentation", v, v.degree())
    base = im + amb
    kept = minimal_generators(ker, base, module)
    shifts = tuple(v.degree() for v in kept)
    gen_module = FreeModule(module.ring, shifts)
    if not kept:
        return ModulePresentation(ring, (), (), (), tuple(base))
    phi = ModuleMap(gen_module, module, kept)
    rels = kernel_of_map(phi, base)
    rels = minimal_generators(rels, (), gen_module)
    return ModulePresentation(ring, shifts, tuple(rels), tuple(kept), tuple(base))


def annihilated_submodule(E: ModulePresentation, polys: Sequence[Polynomial]) -> list[Vector]:
    """Generators of the preimage in Q^r of (0 :_E (polys)); it contains the relations."""
    F = E.free_module
    polys = [g for g in polys if g]
    if not polys:
        return [F.basis(i) for i in range(F.rank)]
    r = F.rank
    shifts = [s - g.degree() for g in polys for s in F.shifts]
    target = FreeModule(F.ring, shifts)
    cols = []
    for idx in range(r):
        terms = {}
        for b, g in enumerate(polys):
            for m, c in g.terms.items():
                terms[(b * r + idx, m)] = c
        cols.append(Vector._from_clean(target, terms))
    rels = [rel.embed(target, b * r) for b in range(len(polys)) for rel in E.relations]
    return kernel_of_map(ModuleMap(F, target, cols), rels)


def annihilator(E: ModulePresentation, elements: Sequence[Vector]) -> GroebnerBasis:
    """Ideal of Q killing every given element of E (unit ideal if all vanish in E)."""
    F = E.free_module
    Q = F.ring
    elements = [Vector._from_clean(F, h.terms) for h in elements if h]
    if not elements:
        return ideal_basis([Q.one()], Q)
    r = F.rank
    shifts = [s - h.degree() for h in elements for s in F.shifts]
    target = FreeModule(Q, shifts)
    terms = {}
    for b, h in enumerate(elements):
        for (idx, m), c in h.terms.items():
            terms[(b * r + idx, m)] = c
    col = Vector._from_clean(target, terms)
    rels = [rel.embed(target, b * r) for b in range(len(elements)) for rel in E.relations]
    kernel = kernel_of_map(ModuleMap(FreeModule(Q, (0,)), target, [col]), rels)
    return ideal_basis([v.component(0) for v in kernel], Q)
