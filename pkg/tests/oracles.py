"""Independent dense oracles: plain mod-p linear algebra on explicit bases.

Nothing here touches the Groebner engine.  Polynomials enter as
``{exponent_tuple: coeff}`` dicts (``Polynomial.terms`` is accepted as data).
"""
from __future__ import annotations

from itertools import combinations_with_replacement, product


def mono_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def monomials_of_degree(nvars: int, d: int, vars_subset=None):
    idx = list(range(nvars)) if vars_subset is None else list(vars_subset)
    out = []
    for combo in combinations_with_replacement(idx, d):
        e = [0] * nvars
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    return out


# -- linear algebra mod p -------------------------------------------------------

def rref(rows, p):
    """Row echelon form; returns (rows, pivot columns)."""
    rows = [list(r) for r in rows if any(x % p for x in r)]
    pivots = []
    out = []
    for row in rows:
        row = [x % p for x in row]
        for prow, pc in zip(out, pivots):
            if row[pc]:
                c = row[pc]
                row = [(a - c * b) % p for a, b in zip(row, prow)]
        lead = next((k for k, x in enumerate(row) if x), None)
        if lead is None:
            continue
        inv = pow(row[lead], p - 2, p)
        row = [x * inv % p for x in row]
        for k, prow in enumerate(out):
            if prow[lead]:
                c = prow[lead]
                out[k] = [(a - c * b) % p for a, b in zip(prow, row)]
        out.append(row)
        pivots.append(lead)
    return out, pivots


def rank(rows, p) -> int:
    return len(rref(rows, p)[0])


def reduce_vec(v, echelon, pivots, p):
    v = [x % p for x in v]
    for row, pc in zip(echelon, pivots):
        if v[pc]:
            c = v[pc]
            v = [(a - c * b) % p for a, b in zip(v, row)]
    return v


def in_span(v, rows, p) -> bool:
    ech, piv = rref(rows, p)
    return not any(reduce_vec(v, ech, piv, p))


def nullspace(matrix, ncols, p):
    """Basis of {v : matrix v = 0}; matrix given as a list of rows."""
    ech, piv = rref(matrix, p)
    free = [k for k in range(ncols) if k not in piv]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for row, pc in zip(ech, piv):
            v[pc] = -row[fcol] % p
        basis.append(v)
    return basis


def coordinates(v, basis, p):
    """Solve v = sum c_k basis_k (basis independent); None if v is outside the span."""
    n = len(basis)
    aug = [list(col) for col in zip(*basis)] if basis else [[] for _ in v]
    rows = [aug[r] + [v[r]] for r in range(len(v))]
    ech, piv = rref(rows, p)
    if n in piv:
        return None
    sol = [0] * n
    for row, pc in zip(ech, piv):
        sol[pc] = row[n]
    return sol


# -- ideal membership --------------------------------------------------------------

def ideal_contains_monomial(gens, mono, nvars, p) -> bool:
    """Is the monomial in the homogeneous ideal spanned by gens (degree-wise linear algebra)?"""
    return ideal_contains(gens, {mono: 1}, nvars, p)


def ideal_contains(gens, poly: dict, nvars, p) -> bool:
    """Membership of a homogeneous polynomial (standard grading) in the ideal of gens."""
    if not poly:
        return True
    d = sum(next(iter(poly)))
    basis = monomials_of_degree(nvars, d)
    index = {m: k for k, m in enumerate(basis)}
    rows = []
    for g in gens:
        gd = sum(next(iter(g)))
        if gd > d:
            continue
        for t in monomials_of_degree(nvars, d - gd):
            row = [0] * len(basis)
            for m, c in g.items():
                row[index[mono_add(m, t)]] = (row[index[mono_add(m, t)]] + c) % p
            rows.append(row)
    target = [0] * len(basis)
    for m, c in poly.items():
        target[index[m]] = c % p
    return in_span(target, rows, p)


# -- modules over monomial quotients ----------------------------------------------

class MonomialQuotient:
    """k[x]/(monomials), finite dimensional; basis = standard monomials."""

    def __init__(self, nvars: int, gens, p: int):
        self.nvars, self.p = nvars, p
        self.gens = [tuple(g) for g in gens]
        if any(not any(g) for g in self.gens):
            self.basis, self.index, self.dim = [], {}, 0
            return
        bound = [None] * nvars
        for g in self.gens:
            support = [k for k, e in enumerate(g) if e]
            if len(support) == 1:
                k = support[0]
                bound[k] = g[k] if bound[k] is None else min(bound[k], g[k])
        if any(b is None for b in bound):
            raise ValueError("need a pure power of every variable for finiteness")
        self.basis = [m for m in product(*(range(b) for b in bound)) if not self.zero(m)]
        self.index = {m: k for k, m in enumerate(self.basis)}
        self.dim = len(self.basis)

    def zero(self, m) -> bool:
        return any(all(a >= b for a, b in zip(m, g)) for g in self.gens)

    def act(self, poly: dict, v):
        out = [0] * self.dim
        for k, c in enumerate(v):
            if not c:
                continue
            m = self.basis[k]
            for t, a in poly.items():
                mt = mono_add(m, t)
                if not self.zero(mt):
                    j = self.index[mt]
                    out[j] = (out[j] + a * c) % self.p
        return out


class DenseModule:
    """A finite-dimensional module: vector space with variable action matrices (columns)."""

    def __init__(self, dim: int, actions, p: int):
        self.dim, self.actions, self.p = dim, actions, p

    def apply(self, k: int, v):
        M = self.actions[k]
        return [sum(M[r][c] * v[c] for c in range(self.dim)) % self.p for r in range(self.dim)]

    def socle_dim(self) -> int:
        rows = []
        for M in self.actions:
            rows.extend(M)
        return len(nullspace(rows, self.dim, self.p))

    def mu(self) -> int:
        cols = []
        for k in range(len(self.actions)):
            for c in range(self.dim):
                e = [0] * self.dim
                e[c] = 1
                cols.append(self.apply(k, e))
        return self.dim - rank(cols, self.p)


def hom_complex_ext(mats, D: MonomialQuotient, i: int) -> DenseModule:
    """Ext^i(M, D) from a free resolution given by matrices (d_1, d_2, ...).

    ``mats[j]`` is d_(j+1) as a list of rows of polynomial dicts.  Hom(F_i, D)
    is D^(b_i); the coboundary sends phi to phi o d_(i+1).
    """
    p = D.p
    ranks = [len(mats[0])] + [len(m[0]) if m else 0 for m in mats]
    dim = D.dim

    def coboundary(j):
        # Hom(F_j, D) -> Hom(F_(j+1), D), dense (b_(j+1) dim) x (b_j dim)
        if j < 0:
            return None
        d = mats[j]
        src, tgt = ranks[j], ranks[j + 1]
        cols = []
        for k in range(src):
            for l in range(dim):
                e = [0] * dim
                e[l] = 1
                col = []
                for c in range(tgt):
                    col.extend(D.act(d[k][c], e))
                cols.append(col)
        return [list(r) for r in zip(*cols)] if cols else []

    n_i = ranks[i] * dim
    delta = coboundary(i)
    Z = nullspace(delta, n_i, p) if delta else [[int(r == c) for c in range(n_i)] for r in range(n_i)]
    prev = coboundary(i - 1)
    B = [list(c) for c in zip(*prev)] if prev else []
    bech, bpiv = rref(B, p)
    # quotient coordinates: the non-pivot positions after reduction by B
    keep = [k for k in range(n_i) if k not in bpiv]

    def to_q(v):
        r = reduce_vec(v, bech, bpiv, p)
        return [r[k] for k in keep]

    W, _ = rref([to_q(z) for z in Z], p)
    if not W:
        return DenseModule(0, [[] for _ in range(D.nvars)], p)

    def lift(w):
        v = [0] * n_i
        for k, x in zip(keep, w):
            v[k] = x
        return v

    actions = []
    for var in range(D.nvars):
        x = {tuple(int(j == var) for j in range(D.nvars)): 1}
        cols = []
        for w in W:
            v = lift(w)
            xv = []
            for k in range(ranks[i]):
                xv.extend(D.act(x, v[k * dim:(k + 1) * dim]))
            c = coordinates(to_q(xv), W, p)
            assert c is not None, "cocycles must be stable under the ring action"
            cols.append(c)
        actions.append([list(r) for r in zip(*cols)])
    return DenseModule(len(W), actions, p)


def ass_finite_by_enumeration(E: DenseModule, prime_supports, nvars: int):
    """Monomial primes (given by variable sets) equal to ann(e) for some element e.

    Every nonzero element of E is enumerated.  ann(e) = (x_S) iff x_s e = 0
    for s in S and the monomials in the other variables act independently on
    e in every degree up to dim E + 1.
    """
    p = E.p
    if E.dim == 0:
        return set()
    if p ** E.dim > 1 << 16:
        raise ValueError("module too large to enumerate")
    found = set()
    for v in product(range(p), repeat=E.dim):
        if not any(v):
            continue
        for S in prime_supports:
            if S in found:
                continue
            if any(any(E.apply(s, list(v))) for s in S):
                continue
            T = [k for k in range(nvars) if k not in S]
            ok = True
            for t in range(1, E.dim + 2):
                images = []
                for m in monomials_of_degree(nvars, t, T):
                    w = list(v)
                    for k, e in enumerate(m):
                        for _ in range(e):
                            w = E.apply(k, w)
                    images.append(w)
                if images and rank(images, p) < len(images):
                    ok = False
                    break
            if ok:
                found.add(S)
    return found


class GradedTruncation:
    """Q^r(shifts) / span(relations), degree pieces up to ``top`` by dense linear algebra."""

    def __init__(self, nvars: int, p: int, shifts, relations, top: int):
        self.nvars, self.p, self.shifts, self.top = nvars, p, list(shifts), top
        self.pieces = {}
        for d in range(top + 1):
            basis = [(i, m) for i, s in enumerate(self.shifts) if d - s >= 0
                     for m in monomials_of_degree(nvars, d - s)]
            index = {b: k for k, b in enumerate(basis)}
            rows = []
            for rel in relations:
                # rel: {(i, mono): c}, homogeneous
                rd = self.shifts[next(iter(rel))[0]] + sum(next(iter(rel))[1])
                if rd > d:
                    continue
                for t in monomials_of_degree(nvars, d - rd):
                    row = [0] * len(basis)
                    for (i, m), c in rel.items():
                        k = index[(i, mono_add(m, t))]
                        row[k] = (row[k] + c) % p
                    rows.append(row)
            ech, piv = rref(rows, p)
            keep = [k for k in range(len(basis)) if k not in piv]
            self.pieces[d] = (basis, index, ech, piv, keep)

    def dim(self, d: int) -> int:
        return len(self.pieces[d][4]) if 0 <= d <= self.top else 0

    def normal(self, d: int, vec: dict):
        basis, index, ech, piv, keep = self.pieces[d]
        v = [0] * len(basis)
        for key, c in vec.items():
            v[index[key]] = (v[index[key]] + c) % self.p
        r = reduce_vec(v, ech, piv, self.p)
        return [r[k] for k in keep]

    def elements(self, d: int):
        """All nonzero homogeneous elements of degree d, as {(i, mono): c}."""
        basis, _, _, _, keep = self.pieces[d]
        for coeffs in product(range(self.p), repeat=len(keep)):
            if any(coeffs):
                yield {basis[k]: c for k, c in zip(keep, coeffs) if c}

    def times(self, vec: dict, mono) -> dict:
        return {(i, mono_add(m, mono)): c for (i, m), c in vec.items()}

    def associated_monomial_primes(self, prime_supports):
        """Supports S with ann(e) = (x_S) for a homogeneous e, up to the truncation degree."""
        found = set()
        for d in range(self.top):
            for e in self.elements(d):
                for S in prime_supports:
                    if S in found:
                        continue
                    unit = [tuple(int(j == s) for j in range(self.nvars)) for s in S]
                    if any(any(self.normal(d + 1, self.times(e, u))) for u in unit):
                        continue
                    T = [k for k in range(self.nvars) if k not in S]
                    ok = True
                    for t in range(1, self.top - d + 1):
                        images = [self.normal(d + t, self.times(e, m))
                                  for m in monomials_of_degree(self.nvars, t, T)]
                        if images and rank(images, self.p) < len(images):
                            ok = False
                            break
                    if ok:
                        found.add(S)
        return found

    def socle_dim(self, d: int) -> int:
        """dim of {e in degree d : x_k e = 0 for all k}, valid for d < top."""
        basis, _, _, _, keep = self.pieces[d]
        rows = []
        for k in range(self.nvars):
            unit = tuple(int(j == k) for j in range(self.nvars))
            images = [self.normal(d + 1, self.times({basis[b]: 1}, unit)) for b in keep]
            rows.extend(list(r) for r in zip(*images)) if images else None
        return len(nullspace(rows, len(keep), self.p)) if keep else 0
