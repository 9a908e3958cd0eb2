"""Prime fields, monomial orders, sparse polynomials and graded free-module elements.

Monomials are plain exponent tuples.  Polynomials and vectors keep their terms
in a dict and sort on demand using the active term order; both are treated as
immutable once built.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

DEFAULT_PRIME = 32003


class RingMismatchError(ValueError):
    pass


class NotHomogeneousError(ValueError):
    pass


class PolynomialSyntaxError(ValueError):
    """Raised by the fixture polynomial parser; ``column`` is 1-based."""

    def __init__(self, message: str, text: str, column: int):
        super().__init__(f"{message} at column {column}: {text!r}")
        self.text = text
        self.column = column


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class FieldElement:
    value: int
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.p != self.p:
                raise RingMismatchError(f"F_{self.p} vs F_{other.p}")
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value + v, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value - v, self.p)

    def __rsub__(self, other):
        v = self._coerce(other)
        return FieldElement(v - self.value, self.p)

    def __mul__(self, other):
        v = self._coerce(other)
        return FieldElement(self.value * v, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.p)

    def inverse(self) -> FieldElement:
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse")
        return FieldElement(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        v = self._coerce(other)
        return self * FieldElement(v, self.p).inverse()

    def __int__(self):
        return self.value


class Cmp(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


# -- monomials ---------------------------------------------------------------

def mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


class PolyRing:
    """Graded polynomial ring over F_p with weighted variables, degrevlex order."""

    def __init__(self, names: Sequence[str], p: int = DEFAULT_PRIME,
                 degrees: Sequence[int] | None = None):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise ValueError(f"bad variable name {name!r}")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        degrees = tuple(degrees) if degrees is not None else (1,) * len(names)
        if len(degrees) != len(names) or any(d < 1 for d in degrees):
            raise ValueError("variable degrees must be positive, one per variable")
        self.names = names
        self.p = p
        self.weights = degrees
        self.nvars = len(names)
        self._keys: dict[tuple, tuple] = {}

    def __eq__(self, other):
        return (isinstance(other, PolyRing) and self.names == other.names
                and self.p == other.p and self.weights == other.weights)

    def __hash__(self):
        return hash((self.names, self.p, self.weights))

    def __repr__(self):
        return f"PolyRing({list(self.names)}, p={self.p}, degrees={list(self.weights)})"

    @property
    def unit_monomial(self) -> tuple:
        return (0,) * self.nvars

    def mono_degree(self, mono: tuple) -> int:
        return sum(e * w for e, w in zip(mono, self.weights))

    def mono_key(self, mono: tuple) -> tuple:
        """Sort key for degrevlex: larger key means larger monomial."""
        key = self._keys.get(mono)
        if key is None:
            key = (self.mono_degree(mono),) + tuple(-e for e in reversed(mono))
            self._keys[mono] = key
        return key

    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return Polynomial(self, {self.unit_monomial: 1})

    def constant(self, c: int) -> Polynomial:
        return Polynomial(self, {self.unit_monomial: c})

    def var(self, which: int | str) -> Polynomial:
        idx = self.names.index(which) if isinstance(which, str) else which
        mono = tuple(1 if k == idx else 0 for k in range(self.nvars))
        return Polynomial(self, {mono: 1})

    def gens(self) -> list[Polynomial]:
        return [self.var(k) for k in range(self.nvars)]

    def monomial(self, mono: Sequence[int], coeff: int = 1) -> Polynomial:
        return Polynomial(self, {tuple(mono): coeff})

    def monomials(self, degree: int) -> list[tuple]:
        """All monomials of the given weighted degree, largest first."""
        if degree < 0:
            return []
        out = []

        def rec(k, remaining, prefix):
            if k == self.nvars:
                if remaining == 0:
                    out.append(tuple(prefix))
                return
            w = self.weights[k]
            for e in range(remaining // w + 1):
                prefix.append(e)
                rec(k + 1, remaining - e * w, prefix)
                prefix.pop()

        rec(0, degree, [])
        out.sort(key=self.mono_key, reverse=True)
        return out

    def format_monomial(self, mono: tuple) -> str:
        parts = []
        for name, e in zip(self.names, mono):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts)

    def parse(self, text: str) -> Polynomial:
        return parse_polynomial(self, text)

    def __call__(self, value) -> Polynomial:
        if isinstance(value, Polynomial):
            if value.ring != self:
                raise RingMismatchError(f"{value.ring} vs {self}")
            return value
        if isinstance(value, int):
            return self.constant(value)
        if isinstance(value, str):
            return self.parse(value)
        raise TypeError(f"cannot coerce {type(value).__name__} into {self}")


class Polynomial:
    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict | None = None):
        p = ring.p
        self.ring = ring
        self.terms = {m: c % p for m, c in (terms or {}).items() if c % p}

    @classmethod
    def _from_clean(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        return obj

    def _check(self, other) -> Polynomial:
        if isinstance(other, int):
            return self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = (out.get(m, 0) + c) % p
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Polynomial._from_clean(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial._from_clean(self.ring, {m: p - c for m, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = (out.get(m, 0) + c1 * c2) % p
        return Polynomial._from_clean(self.ring, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c: int) -> Polynomial:
        return Polynomial(self.ring, {m: v * c for m, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        return (isinstance(other, Polynomial) and self.ring == other.ring
                and self.terms == other.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def sorted_terms(self) -> list[tuple[tuple, int]]:
        key = self.ring.mono_key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def lead_monomial(self) -> tuple:
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        return max(self.terms, key=self.ring.mono_key)

    def lead_coefficient(self) -> int:
        return self.terms[self.lead_monomial()]

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        return self.scale(pow(self.lead_coefficient(), -1, self.ring.p))

    def is_homogeneous(self) -> bool:
        return len({self.ring.mono_degree(m) for m in self.terms}) <= 1

    def degree(self) -> int:
        """Weighted degree of the leading term; -1 for zero."""
        if not self.terms:
            return -1
        return max(self.ring.mono_degree(m) for m in self.terms)

    def is_constant(self) -> bool:
        return all(not any(m) for m in self.terms)

    def constant_term(self) -> int:
        return self.terms.get(self.ring.unit_monomial, 0)

    def __str__(self):
        if not self.terms:
            return "0"
        p = self.ring.p
        pieces = []
        for mono, c in self.sorted_terms():
            neg = c > p // 2 and p > 2
            a = p - c if neg else c
            body = self.ring.format_monomial(mono)
            if not body:
                text = str(a)
            elif a == 1:
                text = body
            else:
                text = f"{a}*{body}"
            pieces.append(("-", text) if neg else ("+", text))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, text in pieces[1:]:
            out += f" {sign} {text}"
        return out

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


def poly_arithmetic(a: Polynomial, b: Polynomial | int, op: str) -> Polynomial:
    """Dispatch helper: ``op`` is one of add, sub, mul, scale."""
    if op == "scale":
        if not isinstance(b, int):
            raise TypeError("scale expects an integer factor")
        return a.scale(b)
    if not isinstance(b, Polynomial) or b.ring != a.ring:
        raise RingMismatchError("operands live in different rings")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# -- graded free modules -------------------------------------------------------

class FreeModule:
    """Graded free module Q(-s_0) + ... + Q(-s_{r-1}); basis e_i has degree s_i."""

    def __init__(self, ring: PolyRing, shifts: Iterable[int]):
        self.ring = ring
        self.shifts = tuple(int(s) for s in shifts)

    @property
    def rank(self) -> int:
        return len(self.shifts)

    def __eq__(self, other):
        return (isinstance(other, FreeModule) and self.ring == other.ring
                and self.shifts == other.shifts)

    def __hash__(self):
        return hash((self.ring, self.shifts))

    def __repr__(self):
        return f"FreeModule(rank={self.rank}, shifts={list(self.shifts)})"

    def zero(self) -> Vector:
        return Vector(self, {})

    def basis(self, i: int) -> Vector:
        if not 0 <= i < self.rank:
            raise IndexError(f"basis index {i} out of range for rank {self.rank}")
        return Vector(self, {(i, self.ring.unit_monomial): 1})

    def vector(self, components: Sequence) -> Vector:
        if len(components) != self.rank:
            raise ValueError(f"expected {self.rank} components, got {len(components)}")
        terms = {}
        for i, comp in enumerate(components):
            poly = self.ring(comp)
            for m, c in poly.terms.items():
                terms[(i, m)] = c
        return Vector._from_clean(self, terms)

    def term_degree(self, idx: int, mono: tuple) -> int:
        return self.shifts[idx] + self.ring.mono_degree(mono)


class Vector:
    """Element of a graded free module, stored sparsely as {(index, monomial): coeff}."""

    __slots__ = ("module", "terms")

    def __init__(self, module: FreeModule, terms: dict | None = None):
        p = module.ring.p
        self.module = module
        self.terms = {k: c % p for k, c in (terms or {}).items() if c % p}
        for idx, _ in self.terms:
            if not 0 <= idx < module.rank:
                raise IndexError(f"component {idx} outside rank {module.rank}")

    @classmethod
    def _from_clean(cls, module, terms):
        obj = cls.__new__(cls)
        obj.module = module
        obj.terms = terms
        return obj

    @property
    def ring(self) -> PolyRing:
        return self.module.ring

    def component(self, i: int) -> Polynomial:
        return Polynomial._from_clean(
            self.ring, {m: c for (idx, m), c in self.terms.items() if idx == i})

    def components(self) -> list[Polynomial]:
        buckets: list[dict] = [{} for _ in range(self.module.rank)]
        for (idx, m), c in self.terms.items():
            buckets[idx][m] = c
        return [Polynomial._from_clean(self.ring, b) for b in buckets]

    def support(self) -> list[int]:
        return sorted({idx for idx, _ in self.terms})

    def _check(self, other: Vector):
        if not isinstance(other, Vector):
            raise TypeError(f"expected Vector, got {type(other).__name__}")
        if other.module.ring != self.module.ring or other.module.rank != self.module.rank:
            raise RingMismatchError(f"{self.module} vs {other.module}")

    def __add__(self, other: Vector) -> Vector:
        self._check(other)
        p = self.ring.p
        out = dict(self.terms)
        for k, c in other.terms.items():
            v = (out.get(k, 0) + c) % p
            if v:
                out[k] = v
            else:
                out.pop(k, None)
        return Vector._from_clean(self.module, out)

    def __neg__(self) -> Vector:
        p = self.ring.p
        return Vector._from_clean(self.module, {k: p - c for k, c in self.terms.items()})

    def __sub__(self, other: Vector) -> Vector:
        return self + (-other)

    def __mul__(self, other) -> Vector:
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if other.ring != self.ring:
            raise RingMismatchError(f"{other.ring} vs {self.ring}")
        p = self.ring.p
        out: dict = {}
        for (idx, m1), c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                k = (idx, mono_mul(m1, m2))
                out[k] = (out.get(k, 0) + c1 * c2) % p
        return Vector._from_clean(self.module, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, Vector) and self.module == other.module
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.module, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set[int]:
        return {self.module.term_degree(i, m) for i, m in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int | None:
        """Degree of a homogeneous vector; None for the zero vector."""
        degs = self.degrees()
        if not degs:
            return None
        if len(degs) > 1:
            raise NotHomogeneousError(f"vector {self} mixes degrees {sorted(degs)}")
        return degs.pop()

    def embed(self, module: FreeModule, offset: int = 0) -> Vector:
        """Reinterpret in a larger free module, shifting component indices."""
        return Vector._from_clean(
            module, {(idx + offset, m): c for (idx, m), c in self.terms.items()})

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.components()) + "]"

    def __repr__(self):
        return f"Vector({self})"


# -- term orders ---------------------------------------------------------------

class TermOrder:
    """Monomial order on a free module.

    kinds:
      ``pot``       position over term, lower index dominates
      ``top``       term over position (graded by degree incl. shifts)
      ``block``     positions below ``split`` dominate everything else, TOP inside blocks
      ``schreyer``  order induced by the leading terms of a list of images
    """

    def __init__(self, module: FreeModule, kind: str = "pot", split: int = 0,
                 images: Sequence[tuple[int, tuple]] | None = None,
                 base: TermOrder | None = None):
        if kind not in ("pot", "top", "block", "schreyer"):
            raise ValueError(f"unknown order kind {kind!r}")
        if kind == "schreyer" and (images is None or base is None):
            raise ValueError("schreyer order needs base order and leading terms")
        self.module = module
        self.ring = module.ring
        self.kind = kind
        self.split = split
        self.images = tuple(images) if images is not None else None
        self.base = base
        self._cache: dict = {}

    def degree(self, idx: int, mono: tuple) -> int:
        return self.module.term_degree(idx, mono)

    def key(self, idx: int, mono: tuple) -> tuple:
        k = (idx, mono)
        key = self._cache.get(k)
        if key is not None:
            return key
        mk = self.ring.mono_key(mono)
        if self.kind == "pot":
            key = (-idx,) + mk
        elif self.kind == "top":
            key = (self.module.shifts[idx] + mk[0],) + mk[1:] + (-idx,)
        elif self.kind == "block":
            key = (1 if idx < self.split else 0,
                   self.module.shifts[idx] + mk[0]) + mk[1:] + (-idx,)
        else:
            lidx, lmono = self.images[idx]
            key = self.base.key(lidx, mono_mul(lmono, mono)) + (-idx,)
        self._cache[k] = key
        return key

    def compare(self, m1: tuple, m2: tuple, i1: int = 0, i2: int = 0) -> Cmp:
        return term_compare(self, m1, m2, i1, i2)


def term_compare(order: TermOrder, m1: tuple, m2: tuple, i1: int = 0, i2: int = 0) -> Cmp:
    n = order.ring.nvars
    if len(m1) != n or len(m2) != n:
        raise ValueError(f"monomials must have {n} exponents")
    k1, k2 = order.key(i1, tuple(m1)), order.key(i2, tuple(m2))
    if k1 == k2:
        return Cmp.EQ
    return Cmp.GT if k1 > k2 else Cmp.LT


def ideal_order(ring: PolyRing) -> TermOrder:
    return TermOrder(FreeModule(ring, (0,)), "pot")


# -- parsing -----------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\^)|(\*)|([+-])|(\()|(\)))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialSyntaxError("unexpected character", text, pos + 1)
        col = m.start(m.lastindex) + 1
        kinds = ("int", "name", "^", "*", "sign", "(", ")")
        tokens.append((kinds[m.lastindex - 1], m.group(m.lastindex), col))
        pos = m.end()
    return tokens


def parse_polynomial(ring: PolyRing, text: str) -> Polynomial:
    """Parse ``c*x^a*y^b + ...`` (parentheses allowed) over a declared ring."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else ("end", "", len(text) + 1)

    def take():
        nonlocal pos
        tok = peek()
        pos += 1
        return tok

    def expr():
        kind, val, _ = peek()
        negate = False
        if kind == "sign":
            take()
            negate = val == "-"
        acc = term()
        if negate:
            acc = -acc
        while peek()[0] == "sign":
            _, sign, _ = take()
            t = term()
            acc = acc + t if sign == "+" else acc - t
        return acc

    def term():
        acc = factor()
        while peek()[0] == "*":
            take()
            acc = acc * factor()
        return acc

    def factor():
        kind, val, col = take()
        if kind == "int":
            base = ring.constant(int(val))
        elif kind == "name":
            if val not in ring.names:
                raise PolynomialSyntaxError(f"undeclared variable {val!r}", text, col)
            base = ring.var(val)
        elif kind == "(":
            base = expr()
            k2, _, c2 = take()
            if k2 != ")":
                raise PolynomialSyntaxError("expected ')'", text, c2)
        else:
            raise PolynomialSyntaxError(f"unexpected token {val or kind!r}", text, col)
        if peek()[0] == "^":
            take()
            k2, v2, c2 = take()
            if k2 != "int":
                raise PolynomialSyntaxError("exponent must be a non-negative integer", text, c2)
            base = base ** int(v2)
        return base

    if not tokens:
        raise PolynomialSyntaxError("empty polynomial", text, 1)
    result = expr()
    if pos != len(tokens):
        raise PolynomialSyntaxError(f"unexpected token {peek()[1]!r}", text, peek()[2])
    return result


def all_monomials_upto(ring: PolyRing, degree: int) -> list[tuple]:
    """Monomials of total (unweighted) degree <= degree; used by exhaustive checks."""
    out = []
    for d in range(degree + 1):
        for combo in combinations_with_replacement(range(ring.nvars), d):
            mono = [0] * ring.nvars
            for k in combo:
                mono[k] += 1
            out.append(tuple(mono))
    return out
