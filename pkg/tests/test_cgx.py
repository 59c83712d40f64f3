"""Irreps, Clebsch-Gordan data, matrix-coefficient algebras, and the
classical Poisson brackets on products of principal affine spaces."""

from fractions import Fraction

import pytest

from qaffine.cgx import (
    BracketSpec, DimensionBoundError, PWContext, _act_factor,
    classical_bracket, hw_coefficient, invariant_action, matrix_coefficient,
    pw_evaluate, pw_multiply, pw_one, pw_tensor,
)
from qaffine.liebialg import basis_tensor, build_sl

F = Fraction


@pytest.fixture(scope="module")
def ctx():
    return PWContext(build_sl(2))


@pytest.fixture(scope="module")
def ctx3():
    return PWContext(build_sl(3))


def test_sl2_irrep_dimensions(ctx):
    for n in range(6):
        rep = ctx.irrep((n,))
        assert rep.dim == n + 1
        assert rep.weights[0] == (n,)


def test_sl3_irrep_dimensions(ctx3):
    for lam, d in [((0, 0), 1), ((1, 0), 3), ((0, 1), 3), ((1, 1), 8),
                   ((2, 0), 6), ((0, 2), 6)]:
        assert ctx3.irrep(lam).dim == d


def test_sl2_clebsch_gordan_rule(ctx):
    for n in range(4):
        for m in range(4):
            cg = ctx.cg((n,), (m,))
            got = sorted(w[0] for w, _, _ in cg.summands)
            assert got == sorted(range(abs(n - m), n + m + 1, 2))


def test_sl3_clebsch_gordan_examples(ctx3):
    cg = ctx3.cg((1, 0), (0, 1))
    assert sorted(w for w, _, _ in cg.summands) == [(0, 0), (1, 1)]
    cg = ctx3.cg((1, 0), (1, 0))
    assert sorted(w for w, _, _ in cg.summands) == [(0, 1), (2, 0)]


def test_dimension_bound_is_enforced():
    small = PWContext(build_sl(2), dim_bound=4)
    with pytest.raises(DimensionBoundError):
        small.irrep((5,))


def test_product_ring_axioms(ctx):
    f = matrix_coefficient(ctx, (1,), {0: F(1)}, {1: F(1)})
    g = matrix_coefficient(ctx, (2,), {1: F(1, 2)}, {0: F(1)})
    h = matrix_coefficient(ctx, (1,), {1: F(3)}, {0: F(1)})
    assert pw_multiply(f, g) == pw_multiply(g, f)
    assert pw_multiply(pw_multiply(f, g), h) == pw_multiply(f, pw_multiply(g, h))
    assert pw_multiply(pw_one(ctx, 1), f) == f
    assert pw_multiply(f + g.scale(2), h) == \
        pw_multiply(f, h) + pw_multiply(g, h).scale(2)


def test_evaluation_oracle(ctx):
    f = matrix_coefficient(ctx, (1,), {0: F(1)}, {1: F(1)})
    g = matrix_coefficient(ctx, (2,), {1: F(1)}, {0: F(1)})
    # at the identity (empty word) evaluation is a character
    assert pw_evaluate(pw_multiply(f, g), [[]]) == \
        pw_evaluate(f, [[]]) * pw_evaluate(g, [[]])
    # a highest-weight coefficient paired against a lowering word is nonzero
    alg = ctx.alg
    phi = hw_coefficient(ctx, (1,), {1: F(1)})
    assert pw_evaluate(phi, [[]]) == 0
    assert pw_evaluate(phi, [[alg.lower_index(0)]]) != 0


def test_left_and_right_actions_are_derivations(ctx):
    alg = ctx.alg
    f = matrix_coefficient(ctx, (1,), {0: F(1)}, {1: F(1)})
    g = matrix_coefficient(ctx, (2,), {1: F(1, 2)}, {0: F(1)})
    for side in ("left", "right"):
        for i in range(alg.dim):
            x = basis_tensor(alg, i)
            lhs = invariant_action(x, pw_multiply(f, g), side)
            rhs = pw_multiply(invariant_action(x, f, side), g) \
                + pw_multiply(f, invariant_action(x, g, side))
            assert lhs == rhs


def test_weight_reading_on_semi_invariants(ctx):
    alg = ctx.alg
    for n in (1, 2, 3):
        for a in range(n + 1):
            phi = hw_coefficient(ctx, (n,), {a: F(1)})
            assert phi.is_semi_invariant()
            hr = invariant_action(basis_tensor(alg, 0), phi, "right")
            assert hr == phi.scale(-n)
            # raising vectors kill semi-invariants from the right
            er = invariant_action(
                basis_tensor(alg, alg.raise_index(0)), phi, "right")
            assert er.is_zero()


def test_semi_invariant_products_add_weights(ctx):
    phi = hw_coefficient(ctx, (3,), {2: F(1)})
    psi = hw_coefficient(ctx, (2,), {1: F(1)})
    pr = pw_multiply(phi, psi)
    assert pr.is_semi_invariant()
    assert pr.weight_keys() == [((5,),)]


def test_product_bracket_m1_axioms(ctx):
    spec1 = BracketSpec(ctx, 1, "product")
    f = matrix_coefficient(ctx, (1,), {0: F(1)}, {1: F(1)})
    g = matrix_coefficient(ctx, (2,), {1: F(1, 2)}, {0: F(1)})
    h = matrix_coefficient(ctx, (1,), {1: F(3)}, {0: F(1)})

    def br(a, b):
        return classical_bracket(a, b, spec1)

    assert (br(f, g) + br(g, f)).is_zero()
    assert br(f, pw_one(ctx, 1)).is_zero()
    assert br(f, pw_multiply(g, h)) == \
        pw_multiply(br(f, g), h) + pw_multiply(g, br(f, h))
    assert (br(f, br(g, h)) + br(g, br(h, f)) + br(h, br(f, g))).is_zero()


def test_bracket_of_semi_invariants_is_top_projection(ctx):
    """On semi-invariants only the left legs of the standard bivector
    survive, so the bracket is the bivector applied by left-invariant
    derivations followed by multiplication."""
    spec1 = BracketSpec(ctx, 1, "product")
    lam = spec1.st.lam
    for (w, a) in [(1, 0), (1, 1), (2, 1), (3, 2)]:
        for (l, b) in [(1, 1), (2, 0), (2, 2)]:
            phi = hw_coefficient(ctx, (w,), {a: F(1)})
            psi = hw_coefficient(ctx, (l,), {b: F(1)})
            oracle = None
            for (x, y), c in lam.data.items():
                piece = pw_multiply(_act_factor(phi, 0, x, "left"),
                                    _act_factor(psi, 0, y, "left")).scale(c)
                oracle = piece if oracle is None else oracle + piece
            got = classical_bracket(phi, psi, spec1)
            assert got == oracle
            if not got.is_zero():
                assert got.weight_keys() == [((w + l,),)]


def test_mixed_bracket_axioms_m2(ctx):
    spec2m = BracketSpec(ctx, 2, "mixed")
    phi = hw_coefficient(ctx, (3,), {2: F(1)})
    psi = hw_coefficient(ctx, (2,), {1: F(1)})
    Ft = pw_tensor([phi, psi])
    Gt = pw_tensor([psi, phi])
    Ht = pw_tensor([phi, phi])
    assert (classical_bracket(Ft, Gt, spec2m)
            + classical_bracket(Gt, Ft, spec2m)).is_zero()
    j = (classical_bracket(Ft, classical_bracket(Gt, Ht, spec2m), spec2m)
         + classical_bracket(Gt, classical_bracket(Ht, Ft, spec2m), spec2m)
         + classical_bracket(Ht, classical_bracket(Ft, Gt, spec2m), spec2m))
    assert j.is_zero()


def test_product_and_mixed_brackets_agree_on_semi_invariants(ctx):
    spec2p = BracketSpec(ctx, 2, "product")
    spec2m = BracketSpec(ctx, 2, "mixed")
    gens = [hw_coefficient(ctx, (1,), {a: F(1)}) for a in range(2)] \
        + [hw_coefficient(ctx, (2,), {a: F(1)}) for a in range(3)]
    pairs = [pw_tensor([f, g]) for f in gens[:2] for g in gens]
    for f in pairs:
        for g in pairs:
            assert classical_bracket(f, g, spec2p) == \
                classical_bracket(f, g, spec2m)


def test_cross_factor_bracket_formula(ctx):
    """For f in the first factor and g in the second, the bracket reduces
    to minus the mixing part of the bivector acting by left-invariant
    derivations, plus a weight-pairing multiple of the plain product."""
    from qaffine.liebialg import mix_tensor, standard_r

    spec2m = BracketSpec(ctx, 2, "mixed")
    st = standard_r(ctx.alg)
    mix = mix_tensor(st.r, 2)
    d = ctx.alg.dim
    one = hw_coefficient(ctx, (0,), {0: F(1)})
    for (w, a) in [(1, 0), (2, 1)]:
        for (l, b) in [(1, 1), (2, 0)]:
            phi = hw_coefficient(ctx, (w,), {a: F(1)})
            psi = hw_coefficient(ctx, (l,), {b: F(1)})
            fl = pw_tensor([phi, one])
            gt = pw_tensor([one, psi])
            oracle = pw_multiply(fl, gt).scale(
                ctx.alg.r0_pairing((w,), (l,)))
            for (x, y), c in mix.data.items():
                jx, bx = divmod(x, d)
                jy, by = divmod(y, d)
                piece = pw_multiply(
                    _act_factor(fl, jx, bx, "left"),
                    _act_factor(gt, jy, by, "left")).scale(-c)
                oracle = oracle + piece
            assert classical_bracket(fl, gt, spec2m) == oracle


def test_bracket_grading(ctx):
    spec2m = BracketSpec(ctx, 2, "mixed")
    gens = [hw_coefficient(ctx, (n,), {a: F(1)})
            for n in (1, 2) for a in range(n + 1)]
    for f1 in gens[:3]:
        for f2 in gens:
            for g1 in gens[:3]:
                for g2 in gens:
                    f = pw_tensor([f1, f2])
                    g = pw_tensor([g1, g2])
                    fk, gk = f.weight_keys()[0], g.weight_keys()[0]
                    want = tuple((fk[j][0] + gk[j][0],) for j in range(2))
                    for key in classical_bracket(f, g, spec2m).weight_keys():
                        assert key == want


def test_sl3_bracket_smoke(ctx3):
    spec1 = BracketSpec(ctx3, 1, "product")
    phi = hw_coefficient(ctx3, (1, 0), {0: F(1)})
    psi = hw_coefficient(ctx3, (0, 1), {1: F(1)})
    br = classical_bracket(phi, psi, spec1)
    assert (br + classical_bracket(psi, phi, spec1)).is_zero()
    for key in br.weight_keys():
        assert key == ((1, 1),)
