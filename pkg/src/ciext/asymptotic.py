"""Associated primes of Ext^i(M, N/I^n N) over (i, n) grids, their stabilization,
socle-series rationality and complexity of Ext."""
from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Sequence

from .cohomology import EisenbudOperators, ExtComplex, WindowError, eisenbud_operators, lift_differential
from .field_poly import Polynomial
from .graded_ring import IdealPowerCache, ModulePresentation, RingPresentation, quotient_mod_power
from .groebner import annihilated_submodule, annihilator, ideal_basis, normal_form, submodule_membership
from .resolution import Resolution, default_length, resolve

FIT = "fit"
STABLE = "stable"
WINDOW_TOO_SMALL = "window-too-small"


class WindowTooSmallError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PrimeIdeal:
    """A homogeneous prime of Q containing f, i.e. a prime of A = Q/(f).

    ``certificate`` records why it is prime: "monomial" (generated by
    variables) or "fixture" (asserted by the input data).
    """

    generators: tuple
    label: str
    certificate: str | None = "monomial"

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        if self.certificate == "monomial":
            for g in self.generators:
                if len(g.terms) != 1 or sum(g.lead_monomial()) != 1 or g.lead_coefficient() != 1:
                    raise ValueError(f"{self.label}: {g} is not a variable")
        for g in self.generators:
            if g.is_constant() and g:
                raise ValueError(f"{self.label} is the unit ideal")

    @classmethod
    def from_variables(cls, Q, indices: Sequence[int]) -> PrimeIdeal:
        gens = tuple(Q.var(k) for k in indices)
        label = "(" + ",".join(Q.names[k] for k in indices) + ")" if indices else "(0)"
        return cls(gens, label, "monomial")

    def basis(self, ring: RingPresentation):
        return ideal_basis(list(self.generators) + list(ring.f), ring.Q)

    def contains(self, g: Polynomial, ring: RingPresentation) -> bool:
        return not normal_form(g, self.basis(ring))

    def __str__(self):
        return self.label


def monomial_prime_candidates(ring: RingPresentation) -> list[PrimeIdeal]:
    """Variable-subset primes P_S of Q with f contained in P_S (so P_S/(f) is a prime of A)."""
    Q = ring.Q
    out = []
    for size in range(Q.nvars + 1):
        for subset in combinations(range(Q.nvars), size):
            s = set(subset)
            # f_j in (x_S) iff every term of f_j involves a variable of S
            if all(all(any(mono[k] for k in s) for mono in g.terms) for g in ring.f):
                out.append(PrimeIdeal.from_variables(Q, subset))
    return out


def is_associated_prime(p: PrimeIdeal, E: ModulePresentation) -> bool:
    """p in Ass(E) iff ann(0 :_E p) is contained in p."""
    if p.certificate is None:
        raise ValueError(f"{p.label} carries no primality certificate")
    if E.rank == 0:
        return False
    S = annihilated_submodule(E, p.generators)
    G = E.relation_basis
    S = [v for v in S if not submodule_membership(v, G)]
    if not S:
        return False
    ann = annihilator(E, S)
    P = p.basis(E.ring)
    return all(not normal_form(g, P) for g in ann.polynomials())


def associated_primes(E: ModulePresentation, candidates: Sequence[PrimeIdeal]) -> list[PrimeIdeal]:
    return [p for p in candidates if is_associated_prime(p, E)]


def labels(primes) -> list[str]:
    return sorted(p.label if isinstance(p, PrimeIdeal) else p for p in primes)


class Experiment:
    """The data (A, M, N, I) plus memoized resolution, operators and N/I^n N."""

    def __init__(self, ring: RingPresentation, M: ModulePresentation, N: ModulePresentation,
                 I: Sequence[Polynomial], candidates: Sequence[PrimeIdeal] | None = None,
                 length: int | None = None, name: str = ""):
        self.ring = ring
        self.M = M
        self.N = N
        self.name = name
        self.powers = IdealPowerCache(ring, I)
        self.candidates = list(candidates) if candidates is not None else monomial_prime_candidates(ring)
        self.length = length if length is not None else default_length(ring.c)
        self._lock = threading.RLock()
        self._complexes: dict[int, ExtComplex] = {}
        self._resolution: Resolution | None = None
        self._ops: EisenbudOperators | None = None

    @property
    def r(self) -> int:
        return self.powers.r

    @property
    def resolution(self) -> Resolution:
        with self._lock:
            if self._resolution is None:
                self._resolution = resolve(self.M, self.length)
            return self._resolution

    @property
    def operators(self) -> EisenbudOperators:
        with self._lock:
            if self._ops is None:
                self._ops = eisenbud_operators(lift_differential(self.resolution))
            return self._ops

    def coefficient(self, n: int) -> ModulePresentation:
        """N / I^n N."""
        return self.complex(n).D

    def complex(self, n: int) -> ExtComplex:
        with self._lock:
            X = self._complexes.get(n)
            if X is None:
                D = quotient_mod_power(self.N, self.powers, n)
                X = ExtComplex(self.resolution, D, self.operators)
                self._complexes[n] = X
            return X

    def check_window(self, imax: int) -> None:
        if imax > self.length - 1:
            raise WindowError(f"i_max = {imax} exceeds the resolution truncation {self.length} minus one")


@dataclass(frozen=True)
class Cell:
    i: int
    n: int
    mu: int
    socle_dim: int
    ass: tuple

    def to_dict(self) -> dict:
        return {"i": self.i, "n": self.n, "mu": self.mu, "socle_dim": self.socle_dim,
                "ass": list(self.ass)}


@dataclass(frozen=True)
class Stabilization:
    """Pair index i0 covers homological degrees 2*i0 and up."""

    status: str
    i0: int | None = None
    n0: int | None = None
    even: tuple = ()
    odd: tuple = ()

    def to_dict(self) -> dict:
        return {"status": self.status, "i0": self.i0, "n0": self.n0,
                "even": list(self.even), "odd": list(self.odd)}


@dataclass
class AssScanReport:
    name: str
    imax: int
    nmax: int
    cells: dict = field(default_factory=dict)

    @property
    def union(self) -> tuple:
        return tuple(sorted({lab for c in self.cells.values() for lab in c.ass}))

    def grid(self, attr: str = "ass") -> dict:
        return {key: getattr(c, attr) for key, c in self.cells.items()}

    def parity_table(self, parity: int, attr: str = "socle_dim") -> list[list]:
        return [[getattr(self.cells[(i, n)], attr) for n in range(self.nmax + 1)]
                for i in range(parity, self.imax + 1, 2)]

    @property
    def stabilization(self) -> Stabilization:
        return detect_stabilization(self.grid(), self.imax, self.nmax)

    def to_dict(self) -> dict:
        return {
            "window": {"imax": self.imax, "nmax": self.nmax},
            "cells": [self.cells[k].to_dict() for k in sorted(self.cells)],
            "union": list(self.union),
            "stabilization": self.stabilization.to_dict(),
        }


def scan_cell(exp: Experiment, i: int, n: int) -> Cell:
    E = exp.complex(n).ext(i)
    if E.is_zero():
        return Cell(i, n, 0, 0, ())
    ass = tuple(labels(associated_primes(E.presentation, exp.candidates)))
    return Cell(i, n, E.mu, E.socle_dim, ass)


def ass_scan(exp: Experiment, imax: int, nmax: int, threads: int = 1) -> AssScanReport:
    """Fill mu, socle dimension and Ass over 0 <= i <= imax, 0 <= n <= nmax."""
    exp.check_window(imax)
    keys = [(i, n) for n in range(nmax + 1) for i in range(imax + 1)]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            cells = list(pool.map(lambda k: scan_cell(exp, *k), keys))
    else:
        cells = [scan_cell(exp, *k) for k in keys]
    report = AssScanReport(exp.name, imax, nmax)
    for k, c in sorted(zip(keys, cells)):
        report.cells[k] = c
    return report


def detect_stabilization(grid: dict, imax: int, nmax: int) -> Stabilization:
    """Least (i0, n0), by i0 + n0 then i0, after which Ass depends only on the parity of i.

    The region must keep two even and two odd degrees and two columns, so
    that the constancy is observed rather than vacuous.
    """
    options = [(a, b) for a in range(imax + 1) for b in range(nmax + 1)
               if 2 * a + 3 <= imax and b < nmax]
    options.sort(key=lambda t: (t[0] + t[1], t[0]))
    for a, b in options:
        even, odd = grid[(2 * a, b)], grid[(2 * a + 1, b)]
        if all(grid[(i, n)] == (odd if i % 2 else even)
               for i in range(2 * a, imax + 1) for n in range(b, nmax + 1)):
            return Stabilization(STABLE, a, b, tuple(even), tuple(odd))
    return Stabilization(WINDOW_TOO_SMALL)


# -- series ------------------------------------------------------------------------

def _times_denominator(table: list[list[int]], c: int, r: int) -> list[list[int]]:
    rows, cols = len(table), len(table[0]) if table else 0
    out = [[0] * cols for _ in range(rows)]
    for u in range(rows):
        for n in range(cols):
            s = 0
            for a in range(min(c, u) + 1):
                for b in range(min(r, n) + 1):
                    s += (-1) ** (a + b) * comb(c, a) * comb(r, b) * table[u - a][n - b]
            out[u][n] = s
    return out


def _newton_fit(points_u: list[int], points_n: list[int], value) -> dict:
    """Power-basis coefficients {(s, t): Fraction} of the interpolant on a grid."""
    def interp_1d(xs, ys):
        # Newton divided differences, then expand to power basis
        coef = [Fraction(y) for y in ys]
        for level in range(1, len(xs)):
            for k in range(len(xs) - 1, level - 1, -1):
                coef[k] = (coef[k] - coef[k - 1]) / (xs[k] - xs[k - level])
        poly = [Fraction(0)]
        for k in range(len(xs) - 1, -1, -1):
            # poly = poly * (x - xs[k]) + coef[k]
            shifted = [Fraction(0)] + poly
            for d in range(len(poly)):
                shifted[d] -= xs[k] * poly[d]
            shifted[0] += coef[k]
            poly = shifted
        while len(poly) > 1 and poly[-1] == 0:
            poly.pop()
        return poly

    # interpolate in n for each u, then each n-coefficient in u
    per_u = [interp_1d(points_n, [value(u, n) for n in points_n]) for u in points_u]
    width = max(len(p) for p in per_u)
    out = {}
    for t in range(width):
        col = interp_1d(points_u, [p[t] if t < len(p) else Fraction(0) for p in per_u])
        for s, v in enumerate(col):
            if v:
                out[(s, t)] = v
    return out


def _eval(poly: dict, u: int, n: int) -> Fraction:
    return sum((v * u ** s * n ** t for (s, t), v in poly.items()), Fraction(0))


def _root_one_multiplicity(coeffs: list) -> int:
    """Largest e with (1 - z)^e dividing the polynomial (coeffs low to high)."""
    p = [Fraction(x) for x in coeffs]
    e = 0
    while any(p) and sum(p) == 0:
        # divide by (z - 1) synthetically
        q = [Fraction(0)] * (len(p) - 1)
        acc = Fraction(0)
        for k in range(len(p) - 1, 0, -1):
            acc = p[k] + acc
            q[k - 1] = acc
        p = q
        e += 1
    return e


@dataclass
class SeriesFit:
    """Bivariate table T[u][n] against the denominator (1 - u)^c (1 - w)^r, u = z^2."""

    table: list
    c: int
    r: int
    status: str
    numerator: list = field(default_factory=list)
    corner: tuple | None = None
    tail: dict = field(default_factory=dict)
    pole_order: tuple | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "denominator": {"c": self.c, "r": self.r},
            "numerator": self.numerator,
            "corner": list(self.corner) if self.corner is not None else None,
            "tail": [[s, t, str(v)] for (s, t), v in sorted(self.tail.items())],
            "pole_order": list(self.pole_order) if self.pole_order is not None else None,
        }


def fit_series(table: list[list[int]], c: int, r: int) -> SeriesFit:
    if not table or not table[0]:
        return SeriesFit(table, c, r, WINDOW_TOO_SMALL)
    rows, cols = len(table), len(table[0])
    prod = _times_denominator(table, c, r)
    support = [(u, n) for u in range(rows) for n in range(cols) if prod[u][n]]
    A = max((u for u, _ in support), default=0)
    B = max((n for _, n in support), default=0)
    if A >= rows - 1 or B >= cols - 1:
        return SeriesFit(table, c, r, WINDOW_TOO_SMALL)
    numerator = [row[:B + 1] for row in prod[:A + 1]]
    # rows of the tail start where every numerator term contributes
    a0 = A if c else A + 1
    b0 = B if r else B + 1
    us = list(range(a0, min(a0 + max(c, 1), rows)))
    ns = list(range(b0, min(b0 + max(r, 1), cols)))
    tail = _newton_fit(us, ns, lambda u, n: table[u][n]) if us and ns else {}
    for u in range(a0, rows):
        for n in range(b0, cols):
            if _eval(tail, u, n) != table[u][n]:
                return SeriesFit(table, c, r, WINDOW_TOO_SMALL, numerator, (A, B), tail)
    # pole orders: (1-u) and (1-w) factors surviving in the reduced fraction
    if support:
        eu = min(_root_one_multiplicity(col) for col in zip(*numerator) if any(col))
        ew = min(_root_one_multiplicity(row) for row in numerator if any(row))
        poles = (max(c - eu, 0), max(r - ew, 0))
    else:
        poles = (0, 0)
    return SeriesFit(table, c, r, FIT, numerator, (A, B), tail, poles)


@dataclass
class SocleSeriesCheck:
    even: SeriesFit
    odd: SeriesFit

    @property
    def status(self) -> str:
        return FIT if self.even.status == FIT and self.odd.status == FIT else WINDOW_TOO_SMALL

    def to_dict(self) -> dict:
        return {"status": self.status, "even": self.even.to_dict(), "odd": self.odd.to_dict()}


def socle_series_check(report: AssScanReport, c: int, r: int) -> SocleSeriesCheck:
    """Rationality of the socle-dimension tables of V_{2u,n} and V_{2u+1,n}."""
    return SocleSeriesCheck(fit_series(report.parity_table(0), c, r),
                            fit_series(report.parity_table(1), c, r))


def cx_from_series(mu: Sequence[int], c: int) -> int:
    """c minus the order of vanishing at z = 1 of (sum mu_i z^i)(1 - z^2)^c."""
    mu = list(mu)
    if not any(mu):
        return 0
    h = list(mu)
    for _ in range(c):
        h = [h[k] - (h[k - 2] if k >= 2 else 0) for k in range(len(h))]
    if len(h) < 2 or h[-1] or h[-2]:
        raise WindowTooSmallError(f"numerator not yet finite in the window: {h}")
    while h and h[-1] == 0:
        h.pop()
    return max(c - _root_one_multiplicity(h), 0)


@dataclass
class CxScan:
    values: list
    status: str
    jstar: int | None = None

    def to_dict(self) -> dict:
        return {"status": self.status, "jstar": self.jstar,
                "values": [[j, cx] for j, cx in self.values]}


def cx_stability_scan(exp: Experiment, jmax: int, imax: int, threads: int = 1) -> CxScan:
    """cx(M, N/I^j N) for 0 <= j <= jmax and the least j* after which it is constant."""
    exp.check_window(imax)
    keys = [(i, j) for j in range(jmax + 1) for i in range(imax + 1)]

    def mu(key):
        i, j = key
        return exp.complex(j).ext(i).mu

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mus = list(pool.map(mu, keys))
    else:
        mus = [mu(k) for k in keys]
    table = dict(zip(keys, mus))
    values = []
    for j in range(jmax + 1):
        try:
            values.append((j, cx_from_series([table[(i, j)] for i in range(imax + 1)], exp.ring.c)))
        except WindowTooSmallError:
            values.append((j, None))
    if any(v is None for _, v in values):
        return CxScan(values, WINDOW_TOO_SMALL)
    jstar = jmax
    while jstar > 0 and values[jstar - 1][1] == values[jmax][1]:
        jstar -= 1
    if jstar == jmax and jmax > 0:
        return CxScan(values, WINDOW_TOO_SMALL, jstar)
    return CxScan(values, STABLE, jstar)
