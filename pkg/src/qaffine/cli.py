"""Command-line driver: configure the engine, run verification suites,
compute individual brackets/products, and emit machine-readable reports.

The report format is versioned JSON; with a fixed configuration the
output is byte-identical across runs (wall-clock timings are only
included when explicitly requested, since they would break that
guarantee).

Exit codes: 0 = all checks pass (inconclusive results do not fail a
run), 1 = at least one check failed, 2 = configuration error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

SCHEMA = "qaffine-report/1"

_ENV_PREFIX = "QAFFINE_"
_SUITES = ("classical", "quantum", "coiso")


class ConfigError(ValueError):
    pass


class RunConfig:
    """Validated run configuration.  A fixed configuration (including
    the seed) produces a byte-identical report."""

    def __init__(self, algebra: str = "sl2", m: int = 2, hbar_order: int = 3,
                 degree_bound: int = 4, weight_bound: int = 2, seed: int = 0,
                 scale: str = "1", suites: Optional[Sequence[str]] = None,
                 timings: bool = False):
        self.algebra = algebra
        self.m = m
        self.hbar_order = hbar_order
        self.degree_bound = degree_bound
        self.weight_bound = weight_bound
        self.seed = seed
        self.scale = str(scale)
        if suites is None:
            suites = _SUITES if algebra == "sl2" else ("classical",)
        self.suites = tuple(suites)
        self.timings = timings
        self.validate()

    def validate(self):
        if self.algebra not in ("sl2", "sl3"):
            raise ConfigError(
                "unknown algebra %r (expected sl2 or sl3)" % (self.algebra,))
        if not 1 <= self.m <= 3:
            raise ConfigError("m must be in 1..3")
        if not 2 <= self.hbar_order <= 6:
            raise ConfigError("hbar-order must be in 2..6")
        if self.degree_bound < 1 or self.weight_bound < 1:
            raise ConfigError("bounds must be positive")
        try:
            if Fraction(self.scale) <= 0:
                raise ConfigError("form scaling must be positive")
        except (ValueError, ZeroDivisionError):
            raise ConfigError("bad form scaling %r" % (self.scale,))
        for s in self.suites:
            if s not in _SUITES:
                raise ConfigError("unknown suite %r" % (s,))
        if self.algebra != "sl2" and set(self.suites) & {"quantum", "coiso"}:
            raise ConfigError(
                "the quantum and coiso suites run at desk scale for sl2 only")

    def to_json(self) -> Dict:
        return {
            "algebra": self.algebra,
            "m": self.m,
            "hbar_order": self.hbar_order,
            "degree_bound": self.degree_bound,
            "weight_bound": self.weight_bound,
            "seed": self.seed,
            "scale": self.scale,
            "suites": list(self.suites),
        }


class Report:
    """Per-check records, assembled deterministically (sorted by id)."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.checks: List[Dict] = []
        self._timings: Dict[str, float] = {}

    def record(self, check_id: str, description: str, status: str,
               residual: str, witness=None, wall: float = 0.0):
        assert status in ("pass", "fail", "inconclusive")
        self.checks.append({
            "id": check_id,
            "description": description,
            "status": status,
            "residual": residual,
            "witness": witness,
        })
        self._timings[check_id] = wall

    @property
    def failed(self) -> bool:
        return any(c["status"] == "fail" for c in self.checks)

    def status_of(self, check_id: str) -> Optional[str]:
        for c in self.checks:
            if c["id"] == check_id:
                return c["status"]
        return None

    def to_json(self) -> Dict:
        checks = sorted(self.checks, key=lambda c: c["id"])
        out = {
            "schema": SCHEMA,
            "config": self.config.to_json(),
            "checks": checks,
            "summary": {
                "total": len(checks),
                "pass": sum(c["status"] == "pass" for c in checks),
                "fail": sum(c["status"] == "fail" for c in checks),
                "inconclusive": sum(
                    c["status"] == "inconclusive" for c in checks),
            },
        }
        if self.config.timings:
            out["timings_ms"] = {
                k: round(v * 1000.0, 1)
                for k, v in sorted(self._timings.items())
            }
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2) + "\n"


def _run_check(report: Report, check_id: str, description: str,
               fn: Callable[[], Tuple[bool, str, object]]):
    from .cgx import DimensionBoundError

    t0 = time.monotonic()
    try:
        ok, residual, witness = fn()
        status = "pass" if ok else "fail"
    except DimensionBoundError as e:  # resource bound, not a refutation
        status, residual, witness = "inconclusive", "bound exceeded", str(e)
    report.record(check_id, description, status, residual, witness,
                  time.monotonic() - t0)


# -- classical suite ----------------------------------------------------------


def _ad2(alg, x_idx: int, t):
    """Diagonal adjoint action of basis element x_idx on an arity-2 tensor."""
    from .liebialg import LieTensor

    out = LieTensor(alg, 2)
    for (a, b), c in t.data.items():
        for k, cc in alg.bracket_basis(x_idx, a).items():
            out.add_term((k, b), c * cc)
        for k, cc in alg.bracket_basis(x_idx, b).items():
            out.add_term((a, k), c * cc)
    return out


def _diag_act(f, idx: int):
    """Diagonal left-invariant action of one basis element on every factor."""
    from .cgx import _act_factor

    out = _act_factor(f, 0, idx, "left")
    for j in range(1, f.m):
        out = out + _act_factor(f, j, idx, "left")
    return out


def _rho_tensor(t, f, g):
    """rho(t)(f (x) g) = sum over terms a(x)b of (rho(a)f)(rho(b)g) for the
    diagonal action rho."""
    from .cgx import pw_multiply

    out = None
    for (a, b), c in t.data.items():
        piece = pw_multiply(_diag_act(f, a), _diag_act(g, b)).scale(c)
        out = piece if out is None else out + piece
    return out


def poisson_action_residual(spec, f, g):
    """First nonzero residual (or None) of the Poisson-action identity for
    the diagonal left action: rho(delta(x))(f (x) g) = rho(x){f,g} -
    {rho(x)f, g} - {f, rho(x)g} over all basis elements x."""
    from .cgx import classical_bracket
    from .liebialg import basis_tensor, cobracket

    alg = spec.ctx.alg
    for x_idx in range(alg.dim):
        lhs = _rho_tensor(cobracket(spec.st.r, basis_tensor(alg, x_idx)), f, g)
        rhs = (_diag_act(classical_bracket(f, g, spec), x_idx)
               - classical_bracket(_diag_act(f, x_idx), g, spec)
               - classical_bracket(f, _diag_act(g, x_idx), spec))
        diff = rhs.scale(-1) if lhs is None else lhs - rhs
        if not diff.is_zero():
            return diff
    return None


def _dual_act_vec(rep, basis_idx: int,
                  xi: Dict[int, Fraction]) -> Dict[int, Fraction]:
    """Action on the dual slot of a matrix coefficient: (x.xi)_s =
    -sum_a A[a][s] xi_a."""
    mat = rep.act[basis_idx]
    out: Dict[int, Fraction] = {}
    for a, c in xi.items():
        row = mat[a]
        for s in range(rep.dim):
            if row[s] != 0:
                nv = out.get(s, Fraction(0)) - c * row[s]
                if nv == 0:
                    out.pop(s, None)
                else:
                    out[s] = nv
    return out


def hw_bracket_oracle(ctx, st, w: int, l: int, xi: Dict[int, Fraction],
                      mu: Dict[int, Fraction]):
    """Independent value of the bracket of two highest-weight coefficients:
    apply the standard bivector to xi (x) mu inside V(w) (x) V(l), project
    onto the top Clebsch-Gordan summand V(w+l), and read the result off as
    a single highest-weight coefficient."""
    from .cgx import PWFunction

    rw, rl = ctx.irrep((w,)), ctx.irrep((l,))
    flat: Dict[int, Fraction] = {}
    for (a, b), c in st.lam.data.items():
        axi = _dual_act_vec(rw, a, xi)
        bmu = _dual_act_vec(rl, b, mu)
        for i, ci in axi.items():
            for j, cj in bmu.items():
                k = i * rl.dim + j
                nv = flat.get(k, Fraction(0)) + c * ci * cj
                if nv == 0:
                    flat.pop(k, None)
                else:
                    flat[k] = nv
    cg = ctx.cg((w,), (l,))
    inj = cg.cartan_injection()
    proj = cg.cartan_projection()
    dnu = len(inj[0])
    out = PWFunction(ctx, 1)
    key = ((w + l,),)
    for s in range(dnu):
        ic = Fraction(0)
        for fl, c in flat.items():
            ic += inj[fl][s] * c
        if ic == 0:
            continue
        for t in range(dnu):
            pc = proj[t][0]  # image of the pair of highest vectors
            if pc != 0:
                out._bump(key, (s, t), ic * pc)
    return out


def _suite_classical(cfg: RunConfig, report: Report):
    from .liebialg import (
        LieTensor, Subspace, basis_tensor, build_sl, cobracket, cybe_residual,
        diagonal_r, mix_tensor, r_membership_lie, standard_r,
        strongly_coisotropic_lie, twisted_r, verify_twisting_element,
    )
    from .cgx import (
        BracketSpec, PWContext, classical_bracket, hw_coefficient,
        matrix_coefficient, pw_multiply, pw_tensor,
    )

    n = 2 if cfg.algebra == "sl2" else 3
    alg = build_sl(n, Fraction(cfg.scale))
    st = standard_r(alg)

    def cybe():
        res = cybe_residual(st.r)
        if not res.is_zero():
            return False, "%d terms" % len(res.data), "r_st"
        if cfg.algebra == "sl2":
            for m in (2, 3):
                res = cybe_residual(twisted_r(st.r, m))
                if not res.is_zero():
                    return False, "%d terms" % len(res.data), "r^(%d)" % m
        return True, "0", None

    _run_check(report, "classical.cybe",
               "classical Yang-Baxter equation for the standard and twisted "
               "r-matrices", cybe)

    def cobr():
        deltas = [cobracket(st.r, basis_tensor(alg, i))
                  for i in range(alg.dim)]
        for i, dx in enumerate(deltas):
            if not (dx + dx.transpose()).is_zero():
                return False, "antisymmetry", alg.labels[i]
        for i in range(alg.dim):
            for j in range(alg.dim):
                bij = alg.bracket_basis(i, j)
                lhs = cobracket(
                    st.r, LieTensor(alg, 1, {(k,): c for k, c in bij.items()}))
                rhs = _ad2(alg, i, deltas[j]) - _ad2(alg, j, deltas[i])
                if not (lhs - rhs).is_zero():
                    return False, "cocycle", \
                        "(%s,%s)" % (alg.labels[i], alg.labels[j])
        return True, "0", None

    _run_check(report, "classical.cobracket",
               "antisymmetry and cocycle identity of the standard cobracket",
               cobr)

    def twisting():
        for m in (2, 3):
            t = mix_tensor(st.r, m)
            ok, res = verify_twisting_element(t, diagonal_r(st.r, m, t.alg))
            if not ok:
                return False, "%d terms" % len(res.data), "m=%d" % m
        return True, "0", None

    _run_check(report, "classical.twisting",
               "the mixed tensor is a twisting element of the direct product",
               twisting)

    def coisotropy():
        borel = Subspace.from_indices(
            alg, list(range(alg.rank))
            + [alg.raise_index(b) for b in range(alg.n_pos)])
        res = strongly_coisotropic_lie(borel, st.r)
        if not (res["strongly"] and res["coisotropic"]):
            return False, "borel", str(res)
        if not r_membership_lie(borel, st.r):
            return False, "borel r-membership", None
        if cfg.algebra != "sl2":
            return True, "0", None
        span_f = Subspace.from_indices(alg, [alg.lower_index(0)])
        res = strongly_coisotropic_lie(span_f, st.r)
        if res["strongly"] or not res["coisotropic"]:
            return False, "span(f)", str(res)
        r2 = twisted_r(st.r, 2)
        borel2 = Subspace.from_indices(
            r2.alg, [0, alg.raise_index(0),
                     alg.dim, alg.dim + alg.raise_index(0)])
        res = strongly_coisotropic_lie(borel2, r2)
        if not res["strongly"]:
            return False, "borel^2", str(res)
        return True, "0", None

    _run_check(report, "classical.coisotropy",
               "strong coisotropy of the Borel and its square; the opposite "
               "nilpotent line is coisotropic but not strongly", coisotropy)

    if cfg.algebra != "sl2":
        return  # function-algebra checks run at desk scale on sl2

    ctx = PWContext(alg)
    spec1 = BracketSpec(ctx, 1, "product")

    def projection():
        for w in (1, 2):
            for l in (1, 2):
                for a in range(w + 1):
                    for b in range(l + 1):
                        f = hw_coefficient(ctx, (w,), {a: Fraction(1)})
                        g = hw_coefficient(ctx, (l,), {b: Fraction(1)})
                        got = classical_bracket(f, g, spec1)
                        oracle = hw_bracket_oracle(
                            ctx, spec1.st, w, l,
                            {a: Fraction(1)}, {b: Fraction(1)})
                        if got != oracle:
                            return False, "mismatch", \
                                "(%d,%d,%d,%d)" % (w, l, a, b)
                        if not got.is_zero() and \
                                got.weight_keys() != [((w + l,),)]:
                            return False, "off-block", \
                                "(%d,%d,%d,%d)" % (w, l, a, b)
        return True, "0", None

    _run_check(report, "classical.projection",
               "brackets of highest-weight coefficients factor through the "
               "top Clebsch-Gordan projection", projection)

    spec2p = BracketSpec(ctx, 2, "product")
    spec2m = BracketSpec(ctx, 2, "mixed")
    gens1 = [hw_coefficient(ctx, (1,), {a: Fraction(1)}) for a in range(2)]
    gens2 = [hw_coefficient(ctx, (2,), {a: Fraction(1)}) for a in range(3)]
    pairs2 = [pw_tensor([f, g])
              for f in gens1 + gens2 for g in gens1 + gens2]

    def agreement():
        for f in pairs2:
            for g in pairs2:
                if classical_bracket(f, g, spec2p) != \
                        classical_bracket(f, g, spec2m):
                    return False, "mismatch", \
                        str(f.weight_keys() + g.weight_keys())
        return True, "0", None

    _run_check(report, "classical.bracket-agreement",
               "ambient and intrinsic brackets agree on semi-invariants of "
               "the twisted square", agreement)

    def poisson_action():
        f1 = matrix_coefficient(ctx, (1,), {0: Fraction(1)}, {1: Fraction(1)})
        g1 = matrix_coefficient(ctx, (2,), {1: Fraction(1)}, {0: Fraction(1)})
        res = poisson_action_residual(spec1, f1, g1)
        if res is not None:
            return False, "%d blocks" % len(res.blocks), "m=1"
        res = poisson_action_residual(
            spec1, pw_multiply(gens1[0], gens1[1]), gens2[0])
        if res is not None:
            return False, "%d blocks" % len(res.blocks), "m=1 products"
        F = pw_tensor([gens1[0], gens2[1]])
        G = pw_tensor([gens2[0], gens1[1]])
        res = poisson_action_residual(spec2m, F, G)
        if res is not None:
            return False, "%d blocks" % len(res.blocks), "m=2"
        return True, "0", None

    _run_check(report, "classical.poisson-action",
               "the diagonal left action is a Poisson action on the twisted "
               "product", poisson_action)

    def grading():
        for f in pairs2:
            fk = f.weight_keys()[0]
            for g in pairs2:
                gk = g.weight_keys()[0]
                want = tuple((fk[j][0] + gk[j][0],) for j in range(2))
                br = classical_bracket(f, g, spec2m)
                for key in br.weight_keys():
                    if key != want:
                        return False, "off-block", str(key)
        # section-algebra substrate: powers of a fixed weight pair close
        lam = (1, 2)
        for n1 in (1, 2):
            for n2 in (1, 2):
                f = pw_tensor([
                    hw_coefficient(ctx, (n1 * lam[0],), {0: Fraction(1)}),
                    hw_coefficient(ctx, (n1 * lam[1],), {1: Fraction(1)})])
                g = pw_tensor([
                    hw_coefficient(ctx, (n2 * lam[0],), {1: Fraction(1)}),
                    hw_coefficient(ctx, (n2 * lam[1],), {0: Fraction(1)})])
                br = classical_bracket(f, g, spec2m)
                want = (((n1 + n2) * lam[0],), ((n1 + n2) * lam[1],))
                for key in br.weight_keys():
                    if key != want:
                        return False, "section", str(key)
        return True, "0", None

    _run_check(report, "classical.grading",
               "semi-invariant brackets respect the weight grading and close "
               "on the section algebras", grading)

    def jacobi():
        gens = [pw_tensor([a, b]) for a in gens1 for b in gens1]
        for f in gens:
            for g in gens:
                for h in gens:
                    j = (classical_bracket(
                            f, classical_bracket(g, h, spec2m), spec2m)
                         + classical_bracket(
                            g, classical_bracket(h, f, spec2m), spec2m)
                         + classical_bracket(
                            h, classical_bracket(f, g, spec2m), spec2m))
                    if not j.is_zero():
                        return False, "%d blocks" % len(j.blocks), None
        return True, "0", None

    _run_check(report, "classical.jacobi",
               "Jacobi identity of the twisted-square bracket on weight-1 "
               "generators", jacobi)


# -- quantum suite ------------------------------------------------------------


def _suite_quantum(cfg: RunConfig, report: Report):
    from .liebialg import build_sl, standard_r, twisted_r
    from .cgx import BracketSpec, classical_bracket, hw_coefficient, pw_tensor
    from .que import (
        QAffineContext, TwistedHopf, UqContext, UqElement, UqTensor,
        almost_cocommutativity_residuals, antipode, coproduct, counit_leg,
        delta_leg, hexagon_residuals, q_hw_coefficient, q_tensor,
        quantum_affine_multiply, quantum_affine_multiply_pairwise, r_matrix_m,
        r_matrix_sl2, semiclassical_bracket, semiclassical_r, tensor_one,
        twi_m, twi_m_inductive, twist_condition_residuals, uq_gen,
    )

    ctx = UqContext(cfg.hbar_order)
    E, F, H = uq_gen(ctx, "E"), uq_gen(ctx, "F"), uq_gen(ctx, "H")
    R = r_matrix_sl2(ctx)

    def algebra():
        if (H * E - E * H) != E.scale(2) or (H * F - F * H) != F.scale(-2):
            return False, "Cartan relations", None
        if (E * F - F * E).mod_hbar() != {(0, 1, 0): Fraction(1)}:
            return False, "[E,F] mod hbar", None
        rng = random.Random(cfg.seed)
        gens = [E, F, H]
        for _ in range(10):
            x, y, z = (rng.choice(gens) for _ in range(3))
            if (x * y) * z != x * (y * z):
                return False, "associativity", None
        for name, g in (("E", E), ("F", F), ("H", H)):
            d = coproduct(g)
            if delta_leg(d, 0) != delta_leg(d, 1):
                return False, "coassociativity", name
            if counit_leg(d, 0) != UqTensor(
                    ctx, 1, {(m,): s for m, s in g.data.items()}):
                return False, "counit axiom", name
            acc = UqElement(ctx)
            for (m1, m2), s in d.data.items():
                acc = acc + (antipode(UqElement(ctx, {m1: 1}))
                             * UqElement(ctx, {m2: 1})).scale(s)
            if not acc.is_zero():
                return False, "antipode axiom", name
        for x in (E, F, H):
            for y in (E, F, H):
                if coproduct(x * y) != coproduct(x) * coproduct(y):
                    return False, "coproduct not an algebra map", None
        return True, "0", None

    _run_check(report, "quantum.algebra",
               "defining relations and Hopf axioms of the truncated quantum "
               "group", algebra)

    def rmatrix():
        for r in almost_cocommutativity_residuals(ctx, R):
            if not r.is_zero():
                return False, "almost-cocommutativity", None
        h1, h2 = hexagon_residuals(ctx, R)
        if not (h1.is_zero() and h2.is_zero()):
            return False, "hexagon", None
        if counit_leg(R, 0) != tensor_one(ctx, 1) or \
                counit_leg(R, 1) != tensor_one(ctx, 1):
            return False, "counit of R", None
        return True, "0", None

    _run_check(report, "quantum.rmatrix",
               "quasitriangularity of the R-matrix", rmatrix)

    def twists():
        for m in (2, 3):
            J = twi_m(R, m)
            if J != twi_m_inductive(R, m):
                return False, "closed vs inductive", "m=%d" % m
            res, c1, c2 = twist_condition_residuals(J, m)
            if not (res.is_zero() and c1.is_zero() and c2.is_zero()):
                return False, "twist axiom", "m=%d" % m
        return True, "0", None

    _run_check(report, "quantum.twists",
               "twisting-element axioms for the iterated twist, closed and "
               "inductive forms", twists)

    def rmatrix_m():
        R2 = r_matrix_m(R, 2)
        th = TwistedHopf(twi_m(R, 2), 2)
        monos = {"E": (0, 0, 1), "F": (1, 0, 0), "H": (0, 1, 0)}
        for g, mono in monos.items():
            for leg in (0, 1):
                key = [(0, 0, 0), (0, 0, 0)]
                key[leg] = mono
                xt = UqTensor(ctx, 2, {tuple(key): 1})
                if R2 * th.delta(xt) != th.delta_op(xt) * R2:
                    return False, "almost-cocommutativity", \
                        "%s leg %d" % (g, leg)
        return True, "0", None

    _run_check(report, "quantum.rmatrix-m",
               "the twisted tensor-square R-matrix intertwines the twisted "
               "coproduct", rmatrix_m)

    def semiclassical():
        alg = build_sl(2)
        st = standard_r(alg)
        h1 = (R - tensor_one(ctx, 2)).hbar_coefficient(1)
        want = {((0, 1, 0), (0, 1, 0)): Fraction(1, 4),
                ((1, 0, 0), (0, 0, 1)): Fraction(1)}
        if h1 != want:
            return False, "order-1 of R", None
        if semiclassical_r(r_matrix_m(R, 2), 2) != twisted_r(st.r, 2):
            return False, "order-1 of the twisted R", None
        qctx = QAffineContext(ctx)
        pw = qctx.pw
        spec1 = BracketSpec(pw, 1, "product")
        spec2 = BracketSpec(pw, 2, "mixed")
        qg = [q_hw_coefficient(qctx, 1, {a: 1}) for a in range(2)]
        cg = [hw_coefficient(pw, (1,), {a: Fraction(1)}) for a in range(2)]
        for qa, ca in zip(qg, cg):
            for qb, cb in zip(qg, cg):
                if semiclassical_bracket(qa, qb) != \
                        classical_bracket(ca, cb, spec1):
                    return False, "bracket m=1", None
        for i in range(2):
            for j in range(2):
                qF, qG = q_tensor([qg[i], qg[j]]), q_tensor([qg[j], qg[i]])
                cF, cG = pw_tensor([cg[i], cg[j]]), pw_tensor([cg[j], cg[i]])
                got = semiclassical_bracket(qF, qG, quantum_affine_multiply)
                if got != classical_bracket(cF, cG, spec2):
                    return False, "bracket m=2", "(%d,%d)" % (i, j)
        return True, "0", None

    _run_check(report, "quantum.semiclassical",
               "order-1 data of the R-matrices and products reproduce the "
               "classical structures", semiclassical)

    def factorization():
        qctx = QAffineContext(ctx)
        rng = random.Random(cfg.seed)
        gens = [q_hw_coefficient(qctx, 1, {a: 1}) for a in range(2)]
        gens += [q_hw_coefficient(qctx, 2, {a: 1}) for a in range(3)]
        pool = [q_tensor([rng.choice(gens), rng.choice(gens)])
                for _ in range(12)]
        for _ in range(20):
            f, g, h = (rng.choice(pool) for _ in range(3))
            lhs = quantum_affine_multiply(quantum_affine_multiply(f, g), h)
            rhs = quantum_affine_multiply(f, quantum_affine_multiply(g, h))
            if lhs != rhs:
                return False, "associativity", None
        one1 = q_hw_coefficient(qctx, 0, {0: 1})
        fa = q_tensor([gens[0], one1])
        ga = q_tensor([gens[1], one1])
        fb = q_tensor([one1, gens[0]])
        gb = q_tensor([one1, gens[1]])
        for x, y in ((fa, gb), (gb, fa), (fb, ga), (ga, fb), (fa, ga),
                     (fb, gb)):
            if quantum_affine_multiply(x, y) != \
                    quantum_affine_multiply_pairwise(x, y):
                return False, "factor case split", None
        return True, "0", None

    _run_check(report, "quantum.factorization",
               "associativity of the twisted product on seeded triples and "
               "the per-factor case split", factorization)


# -- coiso suite --------------------------------------------------------------


def _suite_coiso(cfg: RunConfig, report: Report):
    from .que import (QAffineContext, UqContext, q_hw_coefficient, q_tensor,
                      r_matrix_sl2, uq_gen)
    from .coiso import (
        CharacterMonoid, GradedSemiInvariants, HopfSubalgebra, _fn_span,
        borel_subalgebra, classical_shadow, counit_character,
        quantum_section_check, r_membership_hopf, semi_invariants,
        strong_coiso_hopf, strong_coiso_twisted, weight_character,
    )
    from .liebialg import standard_r, strongly_coisotropic_lie

    ctx = UqContext(cfg.hbar_order)
    U = borel_subalgebra(ctx, cfg.degree_bound)
    R = r_matrix_sl2(ctx)

    def membership():
        rep = r_membership_hopf(U, R)
        if rep.status != "true":
            return False, rep.status, rep.witness
        Uf = HopfSubalgebra(ctx, [uq_gen(ctx, "F")], cfg.degree_bound, ["F"])
        repf = r_membership_hopf(Uf, R)
        if repf.status != "false":
            return False, "negative control: " + repf.status, repf.witness
        return True, "0", None

    _run_check(report, "coiso.r-membership",
               "R-matrix compatibility window for the Borel subalgebra, with "
               "a negative control", membership)

    def strong():
        rep = strong_coiso_hopf(U, "right")
        if rep.status != "true":
            return False, rep.status, rep.witness
        rep = strong_coiso_twisted(U, R, 2)
        if rep.status != "true":
            return False, "tensor square: " + rep.status, rep.witness
        sh = classical_shadow(U)
        res = strongly_coisotropic_lie(sh, standard_r(sh.alg).r)
        if not res["strongly"]:
            return False, "classical shadow", str(res)
        return True, "0", None

    _run_check(report, "coiso.strong",
               "strong coisotropy of the Borel window, its twisted tensor "
               "square, and its classical shadow", strong)

    def monoid():
        mon = CharacterMonoid(U, precheck=False)
        eps = counit_character(U)
        z = {n: weight_character(U, n) for n in range(5)}
        for n in (1, 2):
            for l in (1, 2):
                if mon.product(z[n], z[l]) != z[n + l]:
                    return False, "additivity", "(%d,%d)" % (n, l)
        if mon.product(eps, z[1]) != z[1] or mon.product(z[1], eps) != z[1]:
            return False, "unit", None
        lhs = mon.product(mon.product(z[1], z[2]), z[1])
        rhs = mon.product(z[1], mon.product(z[2], z[1]))
        if lhs != rhs:
            return False, "associativity", None
        return True, "0", None

    _run_check(report, "coiso.monoid",
               "weight characters add under the reduced-coproduct product",
               monoid)

    def semi():
        qctx = QAffineContext(ctx)
        z1 = weight_character(U, 1)
        got = semi_invariants(qctx, U, (z1, z1), 1, m=2)
        graded = GradedSemiInvariants(U, 2)
        graded.add((z1, z1), got)
        if not graded.validate():
            return False, "eigenproperty", None
        expect = [q_tensor([q_hw_coefficient(qctx, 1, {a: 1}),
                            q_hw_coefficient(qctx, 1, {b: 1})])
                  for a in range(2) for b in range(2)]
        if not _fn_span(got).equals(_fn_span(expect)):
            return False, "block mismatch", "%d generators" % len(got)
        return True, "0", None

    _run_check(report, "coiso.semi-invariants",
               "semi-invariants of the twisted square match the quantum "
               "principal affine blocks", semi)

    def sections():
        qctx = QAffineContext(ctx)
        mon = CharacterMonoid(U, precheck=False)
        d = q_hw_coefficient(qctx, 1, {0: 1})
        rep = quantum_section_check(d, U, n_max=3, monoid=mon)
        if rep.prequantum.status != "true" or rep.graded.status != "true":
            return False, \
                "%s/%s" % (rep.prequantum.status, rep.graded.status), \
                rep.graded.witness or rep.prequantum.witness
        return True, "0", None

    _run_check(report, "coiso.sections",
               "the highest-weight coefficient is a quantum section with the "
               "expected grading", sections)


def run_suite(config: RunConfig) -> Report:
    report = Report(config)
    if "classical" in config.suites:
        _suite_classical(config, report)
    if "quantum" in config.suites:
        _suite_quantum(config, report)
    if "coiso" in config.suites:
        _suite_coiso(config, report)
    return report


# -- compute subcommands ------------------------------------------------------


def _lie_tensor_json(t) -> Dict:
    return {
        "arity": t.arity,
        "terms": sorted([list(key), str(c)] for key, c in t.data.items()),
    }


def _uq_tensor_json(t) -> Dict:
    return {
        "legs": t.legs,
        "order": t.ctx.order,
        "terms": sorted(
            [[list(m) for m in key], [str(c) for c in s.coeffs]]
            for key, s in t.data.items()
        ),
    }


def _generator_index(alg, name: str) -> int:
    aliases = {"h": "h1", "e": "e1", "f": "f1"}
    name = aliases.get(name, name)
    kind, idx = name[:1], name[1:]
    if kind not in ("h", "e", "f") or not idx.isdigit():
        raise ConfigError("unknown generator %r" % (name,))
    i = int(idx) - 1
    if kind == "h" and 0 <= i < alg.rank:
        return i
    if kind == "e" and 0 <= i < alg.n_pos:
        return alg.raise_index(i)
    if kind == "f" and 0 <= i < alg.n_pos:
        return alg.lower_index(i)
    raise ConfigError("generator %r out of range" % (name,))


def _parse_function_spec(spec: str) -> List[Tuple[int, int]]:
    """Per-factor highest-weight coefficients "n:a" joined by commas."""
    out = []
    for part in spec.split(","):
        try:
            n_s, a_s = part.split(":")
            n, a = int(n_s), int(a_s)
        except ValueError:
            raise ConfigError(
                "bad function spec %r (expected n:a,...)" % (spec,))
        if n < 0 or not 0 <= a <= n:
            raise ConfigError("bad function spec %r" % (spec,))
        out.append((n, a))
    return out


def _algebra_size(name: str) -> int:
    n = {"sl2": 2, "sl3": 3}.get(name)
    if n is None:
        raise ConfigError("unknown algebra %r" % (name,))
    return n


def _compute(args) -> Dict:
    from .liebialg import basis_tensor, build_sl, cobracket, mix_tensor, \
        standard_r

    if args.expr == "cobracket":
        if len(args.args) != 2:
            raise ConfigError("usage: compute cobracket <sl2|sl3> <generator>")
        alg = build_sl(_algebra_size(args.args[0]))
        st = standard_r(alg)
        idx = _generator_index(alg, args.args[1])
        return {"cobracket": _lie_tensor_json(
            cobracket(st.r, basis_tensor(alg, idx)))}

    if args.expr == "mix":
        if len(args.args) != 2 or not args.args[1].isdigit():
            raise ConfigError("usage: compute mix <sl2|sl3> <m>")
        m = int(args.args[1])
        if not 1 <= m <= 3:
            raise ConfigError("m must be in 1..3")
        alg = build_sl(_algebra_size(args.args[0]))
        return {"mix": _lie_tensor_json(mix_tensor(standard_r(alg).r, m))}

    if args.expr == "bracket":
        from .cgx import BracketSpec, PWContext, classical_bracket, \
            hw_coefficient, pw_tensor

        if len(args.args) != 4:
            raise ConfigError(
                "usage: compute bracket sl2 <product|mixed> <f-spec> <g-spec>")
        if args.args[0] != "sl2":
            raise ConfigError("bracket computations run on sl2")
        mode = args.args[1]
        if mode not in ("product", "mixed"):
            raise ConfigError("bracket mode must be product or mixed")
        fs = _parse_function_spec(args.args[2])
        gs = _parse_function_spec(args.args[3])
        if len(fs) != len(gs):
            raise ConfigError("factor counts differ")
        ctx = PWContext(build_sl(2))
        spec = BracketSpec(ctx, len(fs), mode)
        f = pw_tensor([hw_coefficient(ctx, (n,), {a: Fraction(1)})
                       for n, a in fs])
        g = pw_tensor([hw_coefficient(ctx, (n,), {a: Fraction(1)})
                       for n, a in gs])
        return {"bracket": classical_bracket(f, g, spec).to_json()}

    if args.expr == "qmultiply":
        from .que import (QAffineContext, UqContext, q_hw_coefficient,
                          q_multiply, q_tensor, quantum_affine_multiply)

        if len(args.args) != 2:
            raise ConfigError("usage: compute qmultiply <f-spec> <g-spec>")
        fs = _parse_function_spec(args.args[0])
        gs = _parse_function_spec(args.args[1])
        if len(fs) != len(gs):
            raise ConfigError("factor counts differ")
        qctx = QAffineContext(UqContext(args.hbar_order))
        f = q_tensor([q_hw_coefficient(qctx, n, {a: 1}) for n, a in fs])
        g = q_tensor([q_hw_coefficient(qctx, n, {a: 1}) for n, a in gs])
        prod = q_multiply if len(fs) == 1 else quantum_affine_multiply
        return {"qmultiply": prod(f, g).to_json()}

    if args.expr == "twi":
        from .que import UqContext, r_matrix_sl2, twi_m

        if len(args.args) != 1 or not args.args[0].isdigit():
            raise ConfigError("usage: compute twi <m>")
        m = int(args.args[0])
        if not 1 <= m <= 3:
            raise ConfigError("m must be in 1..3")
        ctx = UqContext(args.hbar_order)
        return {"twi": _uq_tensor_json(twi_m(r_matrix_sl2(ctx), m))}

    if args.expr == "coiso-check":
        from .que import UqContext, r_matrix_sl2, uq_gen
        from .coiso import HopfSubalgebra, r_membership_hopf, \
            strong_coiso_hopf

        if len(args.args) != 1:
            raise ConfigError(
                "usage: compute coiso-check <generators, e.g. HE>")
        letters = args.args[0]
        if not letters or any(c not in "EFH" for c in letters):
            raise ConfigError("subalgebra spec must use the letters E, F, H")
        ctx = UqContext(args.hbar_order)
        U = HopfSubalgebra(ctx, [uq_gen(ctx, c) for c in letters],
                           args.degree_bound, list(letters))
        return {
            "strong_coiso": strong_coiso_hopf(U, "right").to_json(),
            "r_membership": r_membership_hopf(U, r_matrix_sl2(ctx)).to_json(),
        }

    raise ConfigError("unknown compute expression %r" % (args.expr,))


# -- entry point --------------------------------------------------------------


def _env_default(name: str, cast, fallback):
    raw = os.environ.get(_ENV_PREFIX + name.upper().replace("-", "_"))
    if raw is None:
        return fallback
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError("bad environment override for %s: %r" % (name, raw))


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qaffine",
        description="exact verification suites and computations for twisted "
                    "products of principal affine spaces and their "
                    "quantizations")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run verification suites")
    run.add_argument("--algebra", default=None)
    run.add_argument("--m", type=int, default=None)
    run.add_argument("--hbar-order", type=int, default=None)
    run.add_argument("--degree-bound", type=int, default=None)
    run.add_argument("--weight-bound", type=int, default=None)
    run.add_argument("--scale", default=None,
                     help="invariant-form scaling (a positive rational)")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--suite", action="append", choices=_SUITES,
                     help="restrict to a suite (repeatable)")
    run.add_argument("--timings", action="store_true",
                     help="include wall-clock timings (breaks byte-for-byte "
                          "report determinism)")
    run.add_argument("--out", help="write the JSON report to a file")

    comp = sub.add_parser("compute", help="compute and print a single value")
    comp.add_argument("expr", choices=["bracket", "qmultiply", "cobracket",
                                       "mix", "twi", "coiso-check"])
    comp.add_argument("args", nargs="*")
    comp.add_argument("--hbar-order", type=int, default=None)
    comp.add_argument("--degree-bound", type=int, default=None)
    return p


def _config_from_args(args) -> RunConfig:
    def pick(value, name, cast, fallback):
        if value is not None:
            return value
        return _env_default(name, cast, fallback)

    suites = tuple(args.suite) if args.suite else None
    if suites is None:
        env_suites = os.environ.get(_ENV_PREFIX + "SUITE")
        if env_suites:
            suites = tuple(s.strip() for s in env_suites.split(","))
    return RunConfig(
        algebra=pick(args.algebra, "algebra", str, "sl2"),
        m=pick(args.m, "m", int, 2),
        hbar_order=pick(args.hbar_order, "hbar-order", int, 3),
        degree_bound=pick(args.degree_bound, "degree-bound", int, 4),
        weight_bound=pick(args.weight_bound, "weight-bound", int, 2),
        seed=pick(args.seed, "seed", int, 0),
        scale=pick(args.scale, "scale", str, "1"),
        suites=suites,
        timings=args.timings,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        code = e.code if e.code is not None else 0
        return 0 if code == 0 else 2
    try:
        if args.command == "run":
            config = _config_from_args(args)
            report = run_suite(config)
            text = report.dumps()
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return 1 if report.failed else 0
        if args.hbar_order is None:
            args.hbar_order = _env_default("hbar-order", int, 3)
        if args.degree_bound is None:
            args.degree_bound = _env_default("degree-bound", int, 4)
        if not 2 <= args.hbar_order <= 6:
            raise ConfigError("hbar-order must be in 2..6")
        result = _compute(args)
        sys.stdout.write(json.dumps(result, sort_keys=True, indent=2) + "\n")
        return 0
    except ConfigError as e:
        sys.stderr.write("config error: %s\n" % (e,))
        return 2


if __name__ == "__main__":
    sys.exit(main())
