"""The truncated quantum group, its R-matrix, iterated twists, and the
quantized function algebras with their semiclassical limits."""

import random
from fractions import Fraction

import pytest

from qaffine.kernel import TruncatedSeries, q_int
from qaffine.que import (
    QAffineContext, TwistedHopf, UqContext, UqElement, UqTensor,
    almost_cocommutativity_residuals, antipode, coproduct, counit,
    counit_leg, delta_leg, hexagon_residuals, q_hw_coefficient, q_integer,
    q_matrix_coefficient, q_multiply, q_one, q_tensor,
    quantum_affine_multiply, quantum_affine_multiply_pairwise, r_matrix_m,
    r_matrix_sl2, semiclassical_bracket, semiclassical_r, tensor_inv,
    tensor_one, twi_m, twi_m_inductive, twist_condition_residuals,
    twist_hopf, uq_cartan_exp, uq_gen, uq_normalize, uq_one,
)
from qaffine.liebialg import build_sl, standard_r, twisted_r
from qaffine.cgx import (
    BracketSpec, classical_bracket, hw_coefficient, matrix_coefficient,
    pw_multiply, pw_tensor,
)

F = Fraction


@pytest.fixture(scope="module")
def ctx():
    return UqContext(4)


@pytest.fixture(scope="module")
def gens(ctx):
    return uq_gen(ctx, "E"), uq_gen(ctx, "F"), uq_gen(ctx, "H")


def test_defining_relations(ctx, gens):
    E, Fg, H = gens
    assert H * E - E * H == E.scale(2)
    assert H * Fg - Fg * H == Fg.scale(-2)
    comm = E * Fg - Fg * E
    assert comm.mod_hbar() == {(0, 1, 0): F(1)}
    # (q - q^-1) [E,F] = K^2 - K^-2 with K^2 = exp(hbar H / 2)
    lhs = comm.scale(ctx.q - ctx.q_inv)
    rhs = uq_cartan_exp(ctx, F(1, 2)) - uq_cartan_exp(ctx, F(-1, 2))
    assert lhs == rhs


def test_q_integer_matches_kernel(ctx):
    for n in range(6):
        assert q_integer(ctx, n) == q_int(n, 1, ctx.order)


def test_associativity_sampled(ctx, gens):
    rng = random.Random(7)
    pool = list(gens) + [gens[0] * gens[1], uq_one(ctx)]
    for _ in range(25):
        x, y, z = (rng.choice(pool) for _ in range(3))
        assert (x * y) * z == x * (y * z)


def test_normalize_is_multiplicative(ctx):
    w = uq_normalize(ctx, ["E", "F", "H", "E"])
    assert w == uq_normalize(ctx, ["E"]) * uq_normalize(ctx, ["F", "H", "E"])
    # EF = FE + lower terms: the normal form of EF has leading mono FHE-free
    ef = uq_normalize(ctx, ["E", "F"])
    assert (1, 0, 1) in ef.data and (0, 1, 0) in ef.data


def test_antipode_values(ctx, gens):
    E, Fg, H = gens
    assert antipode(E) == E.scale(-ctx.q_inv)
    assert antipode(Fg) == Fg.scale(-ctx.q)
    assert antipode(H) == H.scale(-1)


def test_hopf_axioms(ctx, gens):
    E, Fg, H = gens
    for g in gens:
        d = coproduct(g)
        assert delta_leg(d, 0) == delta_leg(d, 1)  # coassociativity
        assert counit_leg(d, 0) == UqTensor(
            ctx, 1, {(m,): s for m, s in g.data.items()})
        left = UqElement(ctx)
        right = UqElement(ctx)
        for (m1, m2), s in d.data.items():
            x1 = UqElement(ctx, {m1: 1})
            x2 = UqElement(ctx, {m2: 1})
            left = left + (antipode(x1) * x2).scale(s)
            right = right + (x1 * antipode(x2)).scale(s)
        assert left.is_zero() and right.is_zero()  # counit(g) = 0
    for x in gens:
        for y in gens:
            assert coproduct(x * y) == coproduct(x) * coproduct(y)
            assert counit(x * y) == counit(x) * counit(y)
            # antipode is an anti-homomorphism
            assert antipode(x * y) == antipode(y) * antipode(x)


def test_r_matrix_quasitriangular(ctx):
    R = r_matrix_sl2(ctx)
    for r in almost_cocommutativity_residuals(ctx, R):
        assert r.is_zero()
    h1, h2 = hexagon_residuals(ctx, R)
    assert h1.is_zero() and h2.is_zero()
    assert counit_leg(R, 0) == tensor_one(ctx, 1)
    assert counit_leg(R, 1) == tensor_one(ctx, 1)
    Rinv = tensor_inv(R)
    assert R * Rinv == tensor_one(ctx, 2)
    assert Rinv * R == tensor_one(ctx, 2)


def test_r_matrix_first_order(ctx):
    R = r_matrix_sl2(ctx)
    h1 = (R - tensor_one(ctx, 2)).hbar_coefficient(1)
    assert h1 == {((0, 1, 0), (0, 1, 0)): F(1, 4),
                  ((1, 0, 0), (0, 0, 1)): F(1)}


def test_twist_closed_vs_inductive():
    ctx = UqContext(3)
    R = r_matrix_sl2(ctx)
    assert twi_m(R, 1) == tensor_one(ctx, 2)
    assert r_matrix_m(R, 1) == R
    # the twist of the square is R placed in legs (2, 3) of H^(x)4
    assert twi_m(R, 2) == R.embed(4, (1, 2))
    for m in (2, 3):
        J = twi_m(R, m)
        assert J == twi_m_inductive(R, m)
        res, c1, c2 = twist_condition_residuals(J, m)
        assert res.is_zero() and c1.is_zero() and c2.is_zero()


def test_twisted_square_r_matrix():
    ctx = UqContext(3)
    R = r_matrix_sl2(ctx)
    R2 = r_matrix_m(R, 2)
    th = twist_hopf(twi_m(R, 2), 2)
    monos = {"E": (0, 0, 1), "F": (1, 0, 0), "H": (0, 1, 0)}
    for mono in monos.values():
        for leg in (0, 1):
            key = [(0, 0, 0), (0, 0, 0)]
            key[leg] = mono
            xt = UqTensor(ctx, 2, {tuple(key): 1})
            assert R2 * th.delta(xt) == th.delta_op(xt) * R2


def test_semiclassical_r_matrices():
    ctx = UqContext(3)
    R = r_matrix_sl2(ctx)
    st = standard_r(build_sl(2))
    assert semiclassical_r(R, 1) == st.r
    for m in (2, 3):
        assert semiclassical_r(r_matrix_m(R, m), m) == twisted_r(st.r, m)


@pytest.fixture(scope="module")
def qctx(ctx):
    return QAffineContext(ctx)


def test_quantum_irreps_reduce_to_classical(qctx):
    alg = qctx.alg
    pw = qctx.pw
    for n in (1, 2, 3):
        qv = qctx.qirrep(n)
        cv = pw.irrep((n,))
        assert qv.dim == cv.dim
        for name, idx in (("matH", 0), ("matE", alg.raise_index(0)),
                          ("matF", alg.lower_index(0))):
            qm = getattr(qv, name)
            for i in range(qv.dim):
                for j in range(qv.dim):
                    assert qm[i][j][0] == cv.act[idx][i][j]


def test_q_multiply_ring_and_classical_limit(qctx):
    pw = qctx.pw
    f = q_matrix_coefficient(qctx, 1, {0: 1}, {1: 1})
    g = q_matrix_coefficient(qctx, 2, {1: F(1, 2)}, {0: 1})
    h = q_matrix_coefficient(qctx, 1, {1: 3}, {0: 1})
    fc = matrix_coefficient(pw, (1,), {0: F(1)}, {1: F(1)})
    gc = matrix_coefficient(pw, (2,), {1: F(1, 2)}, {0: F(1)})
    assert q_multiply(f, g).mod_hbar() == pw_multiply(fc, gc)
    assert q_multiply(q_multiply(f, g), h) == q_multiply(f, q_multiply(g, h))
    assert q_multiply(f, g) != q_multiply(g, f)  # noncommutative at order 1
    assert q_multiply(q_one(qctx, 1), f) == f
    assert q_multiply(f, q_one(qctx, 1)) == f


def test_semiclassical_bracket_m1(qctx):
    pw = qctx.pw
    spec1 = BracketSpec(pw, 1, "product")
    cases = [
        (q_matrix_coefficient(qctx, 1, {0: 1}, {1: 1}),
         matrix_coefficient(pw, (1,), {0: F(1)}, {1: F(1)})),
        (q_matrix_coefficient(qctx, 2, {1: F(1, 2)}, {0: 1}),
         matrix_coefficient(pw, (2,), {1: F(1, 2)}, {0: F(1)})),
        (q_hw_coefficient(qctx, 1, {1: 1}),
         hw_coefficient(pw, (1,), {1: F(1)})),
    ]
    for qa, ca in cases:
        for qb, cb in cases:
            assert semiclassical_bracket(qa, qb) == \
                classical_bracket(ca, cb, spec1)


def test_quantum_affine_product(qctx):
    phi = q_hw_coefficient(qctx, 1, {0: 1})
    psi = q_hw_coefficient(qctx, 1, {1: 1})
    # m = 1 reduces to the convolution product
    assert quantum_affine_multiply(phi, psi) == q_multiply(phi, psi)
    F2, G2 = q_tensor([phi, psi]), q_tensor([psi, phi])
    H2 = q_tensor([phi, phi])
    prod = quantum_affine_multiply
    assert prod(prod(F2, G2), H2) == prod(F2, prod(G2, H2))
    assert prod(F2, G2).is_semi_invariant()
    # per-factor case split
    one1 = q_hw_coefficient(qctx, 0, {0: 1})
    fa, ga = q_tensor([phi, one1]), q_tensor([psi, one1])
    fb, gb = q_tensor([one1, phi]), q_tensor([one1, psi])
    for x, y in ((fa, gb), (gb, fa), (fb, ga), (ga, fb), (fa, ga), (fb, gb)):
        assert prod(x, y) == quantum_affine_multiply_pairwise(x, y)


def test_semiclassical_bracket_m2(qctx):
    pw = qctx.pw
    spec2m = BracketSpec(pw, 2, "mixed")
    qg = [q_hw_coefficient(qctx, 1, {a: 1}) for a in range(2)]
    cg = [hw_coefficient(pw, (1,), {a: F(1)}) for a in range(2)]
    for i in range(2):
        for j in range(2):
            qF, qG = q_tensor([qg[i], qg[j]]), q_tensor([qg[j], qg[i]])
            cF, cG = pw_tensor([cg[i], cg[j]]), pw_tensor([cg[j], cg[i]])
            got = semiclassical_bracket(qF, qG, quantum_affine_multiply)
            assert got == classical_bracket(cF, cG, spec2m)


def test_qfunction_serialization(qctx):
    f = q_hw_coefficient(qctx, 2, {0: 1, 1: F(1, 3)})
    js = f.to_json()
    assert js["m"] == 1
    assert js["order"] == qctx.uq.order
    assert set(js["blocks"]) == {"2"}
