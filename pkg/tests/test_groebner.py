import random
from itertools import product

import pytest

from ciext import groebner
from ciext.field_poly import FreeModule, NotHomogeneousError, PolyRing, TermOrder, all_monomials_upto
from ciext.graded_ring import RingPresentation
from ciext.groebner import (ContainmentError, Lifter, ModuleMap, buchberger, ideal_basis,
                            ideal_quotient, kernel_of_map, krull_dimension, minimal_generators,
                            normal_form, spair_residues, subquotient_presentation,
                            submodule_membership, syzygy_module)

from oracles import ideal_contains, ideal_contains_monomial


def ring(names="xy", p=5, degrees=None):
    Q = PolyRing(list(names), p=p, degrees=degrees)
    return Q, Q.gens()


def test_normal_form_single_step():
    # x^2 - y is homogeneous once y has weight 2
    Q, (x, y) = ring(degrees=[1, 2])
    G = ideal_basis([x**2 - y], Q)
    assert normal_form(x**2, G) == y


def test_normal_form_trivial_cases():
    Q, (x, y) = ring()
    G = ideal_basis([x**2 + x * y], Q)
    assert normal_form(x**2 + x * y, G).is_zero()
    assert normal_form(y**3, ideal_basis([x], Q)) == y**3
    assert normal_form(Q.zero(), G).is_zero()


def test_buchberger_hand_example():
    Q, (x, y) = ring()
    G = ideal_basis([x**2 - y**2, x * y], Q)
    assert sorted(map(str, G.polynomials())) == sorted(["x*y", "x^2 - y^2", "y^3"])
    gens = [(x**2 - y**2).terms, (x * y).terms]
    for d in range(6):
        for m in all_monomials_upto(Q, d):
            if sum(m) != d:
                continue
            assert normal_form(Q.monomial(m), G).is_zero() == ideal_contains_monomial(gens, m, 2, 5)


def test_buchberger_trivial_cases():
    Q, (x, y) = ring()
    assert [str(g) for g in ideal_basis([x], Q).polynomials()] == ["x"]
    F = FreeModule(Q, (0, 0))
    assert len(buchberger([], module=F)) == 0


def test_inhomogeneous_input_rejected():
    Q, (x, y) = ring()
    with pytest.raises(NotHomogeneousError):
        ideal_basis([x**2 + y], Q)


def test_syzygies_koszul_and_monomial():
    Q, (x, y) = ring()
    for gens in ([x, y], [x**2, x * y]):
        G = ideal_basis(gens, Q)
        S = syzygy_module(G)
        assert len(S.columns) == 1
        col = S.columns[0].components()
        assert col == [y, -x]
        total = sum((g * c for g, c in zip(G.polynomials(), col)), Q.zero())
        assert total.is_zero()
    assert syzygy_module(ideal_basis([x], Q)).columns == ()


def test_syzygy_composition_random():
    rng = random.Random(3)
    Q, (x, y, z) = ring("xyz", p=7)
    monos = [m for m in all_monomials_upto(Q, 2) if sum(m) == 2]
    for _ in range(4):
        gens = [sum((Q.monomial(rng.choice(monos), rng.randrange(1, 7)) for _ in range(2)), Q.zero())
                for _ in range(3)]
        G = ideal_basis([g for g in gens if g], Q)
        polys = G.polynomials()
        for col in syzygy_module(G).columns:
            total = sum((g * c for g, c in zip(polys, col.components())), Q.zero())
            assert total.is_zero()


def test_kernel_examples():
    Q, (x,) = ring("x")
    F = FreeModule(Q, (0,))
    mult = ModuleMap(FreeModule(Q, (0,)), FreeModule(Q, (-1,)), [FreeModule(Q, (-1,)).vector([x])], 0)
    ker = kernel_of_map(mult, [FreeModule(Q, (-1,)).vector([x**2])])
    assert [v.components() for v in ker] == [[x]]
    ident = ModuleMap(F, F, [F.basis(0)])
    assert kernel_of_map(ident) == []
    zero = ModuleMap(F, F, [F.zero()])
    assert [v.components() for v in kernel_of_map(zero)] == [[Q.one()]]


def test_kernel_elements_satisfy_membership():
    Q, (x, y) = ring()
    T = FreeModule(Q, (0, 0))
    S = FreeModule(Q, (1, 1, 1))
    phi = ModuleMap(S, T, [T.vector([x, y]), T.vector([y, x]), T.vector([x + y, x + y])], 0)
    rels = [T.vector([x**2, Q.zero()])]
    G = buchberger(rels, TermOrder(T, "top"), T)
    for v in kernel_of_map(phi, rels):
        assert submodule_membership(phi.apply(v), G)


def test_ideal_quotient_examples():
    Q, (x, y) = ring()
    I = ideal_basis([x**2, x * y], Q)
    Jq = ideal_quotient(I, [x])
    assert sorted(map(str, Jq.polynomials())) == ["x", "y"]
    assert ideal_quotient(I, [Q.one()]).polynomials() == I.polynomials()
    assert [str(g) for g in ideal_quotient(ideal_basis([x], Q), [y]).polynomials()] == ["x"]
    for a in Jq.polynomials():
        assert normal_form(a * x, I).is_zero()


def test_membership_examples():
    Q, (x, y) = ring()
    assert submodule_membership(x**2 * y, ideal_basis([x**2, x * y], Q))
    assert not submodule_membership(y, ideal_basis([x], Q))
    assert submodule_membership(x**3 - x * y**2, ideal_basis([x**2 - y**2, x * y], Q))


def test_krull_dimension_examples():
    Q, (x, y) = ring()
    assert krull_dimension(buchberger([], module=FreeModule(Q, (0,)))) == 2
    assert krull_dimension(ideal_basis([x**2, y**3], Q)) == 0
    assert krull_dimension(ideal_basis([x * y], Q)) == 1


def _independent_set_dim(monos, n):
    best = 0
    for mask in range(1 << n):
        s = {k for k in range(n) if mask >> k & 1}
        if not any(all(k in s for k, e in enumerate(m) if e) for m in monos):
            best = max(best, len(s))
    return best


def test_krull_dimension_against_subset_oracle():
    rng = random.Random(11)
    Q = PolyRing(list("wxyz"), p=3)
    for _ in range(15):
        monos = [tuple(rng.randrange(3) for _ in range(4)) for _ in range(rng.randrange(1, 4))]
        monos = [m for m in monos if any(m)]
        if not monos:
            continue
        G = ideal_basis([Q.monomial(m) for m in monos], Q)
        assert krull_dimension(G) == _independent_set_dim(monos, 4)


def test_gb_invariants_random_ideals():
    rng = random.Random(5)
    Q = PolyRing(list("xyz"), p=11)
    for deg in (2, 3):
        monos = [m for m in all_monomials_upto(Q, deg) if sum(m) == deg]
        gens = [sum((Q.monomial(rng.choice(monos), rng.randrange(1, 11)) for _ in range(3)), Q.zero())
                for _ in range(3)]
        gens = [g for g in gens if g]
        G = ideal_basis(gens, Q)
        assert not any(spair_residues(G))
        for g in gens:
            assert normal_form(g, G).is_zero()
        h = Q.monomial((3, 1, 2)) + Q.monomial((2, 2, 2))
        r = normal_form(h, G)
        assert normal_form(r, G) == r


def test_cache_is_pure_memoization():
    Q, (x, y) = ring("xy", p=7)
    first = ideal_basis([x**3 + y**3, x**2 * y], Q).polynomials()
    groebner._cache.clear()
    again = ideal_basis([x**3 + y**3, x**2 * y], Q).polynomials()
    assert first == again


def test_subquotient_examples():
    Q, (x,) = ring("x")
    A = RingPresentation(Q, [x**2])
    F = FreeModule(Q, (0,))
    rel = A.f_relations(F)
    v = F.vector([x])
    zero = subquotient_presentation([v], [v], rel, A, F)
    assert zero.rank == 0
    k1 = subquotient_presentation([v], [], rel, A, F)
    assert k1.shifts == (1,)
    assert [k1.hilbert_function(d) for d in range(4)] == [0, 1, 0, 0]
    quot = subquotient_presentation([F.basis(0)], [v], rel, A, F)
    assert [quot.hilbert_function(d) for d in range(3)] == [1, 0, 0]


def test_subquotient_containment_diagnostic():
    Q, (x, y) = ring()
    F = FreeModule(Q, (0,))
    with pytest.raises(ContainmentError) as err:
        subquotient_presentation([F.vector([x])], [F.vector([y])], [], None, F)
    assert err.value.operation == "subquotient_presentation"
    assert err.value.degree == 1


def test_minimal_generators_trims():
    Q, (x, y) = ring()
    F = FreeModule(Q, (0,))
    gens = [F.vector([x]), F.vector([y]), F.vector([x * y + x**2])]
    kept = minimal_generators(gens, (), F)
    assert [v.components() for v in kept] == [[x], [y]]


def test_lifter_expresses_combinations():
    Q, (x, y) = ring()
    F = FreeModule(Q, (0,))
    gens = [F.vector([x**2]), F.vector([y**2])]
    L = Lifter(F, gens)
    coeffs = L.lift(F.vector([x**3 + x * y**2]))
    assert x**2 * coeffs[0] + y**2 * coeffs[1] == x**3 + x * y**2
    assert L.lift(F.vector([x * y])) is None


def test_ideal_quotient_brute_force_f2():
    # a in (I : x) iff a*x in I, checked on every polynomial of degree <= 3 over F2
    Q = PolyRing(["x", "y"], p=2)
    x, y = Q.gens()
    for I_gens, J in (([x**2, x * y], x), ([x], y), ([x**2, y**2], x * y)):
        I = ideal_basis(I_gens, Q)
        Jq = ideal_quotient(I, [J])
        dense = [g.terms for g in I_gens]
        for d in range(4):
            monos = Q.monomials(d)
            for bits in product([0, 1], repeat=len(monos)):
                a = sum((Q.monomial(m) for m, b in zip(monos, bits) if b), Q.zero())
                expected = ideal_contains(dense, (a * J).terms, 2, 2)
                assert submodule_membership(a, Jq) == expected
