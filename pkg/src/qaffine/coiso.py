"""Strongly coisotropic subalgebras of the truncated quantum group.

A subalgebra U of the Hopf algebra H is *right strongly coisotropic* when

    Delta(U)  is contained in  U(x)U + H(x)[U,U],

with [U,U] the two-sided ideal of U generated by commutators (the left
version puts the ideal in the first leg).  On such U the characters form
a monoid through the reduced coproduct, the character eigenspaces of the
right action on the quantized function algebra assemble into a graded
subalgebra, and highest-weight matrix coefficients become quantum
sections of the associated line bundles.

Everything here is decided inside explicit windows: a PBW degree bound
for U, a degree bound for the ambient factor, the series truncation
order, and weight bounds on function-algebra blocks.  Membership answers
are therefore three-valued -- ``true``, ``false`` (with a witness whose
residual is stable under window enlargement), or ``inconclusive`` -- and
every report records the window it was computed in.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .kernel import TruncatedSeries
from .linalg import EchelonSpan, nullspace
from .que import (
    QAffineContext,
    QFunction,
    UqContext,
    UqElement,
    UqTensor,
    TwistedHopf,
    antipode,
    coproduct,
    counit,
    q_multiply,
    q_one,
    tensor_of,
    twi_m,
    uq_gen,
    uq_one,
)

Word = Tuple[int, ...]  # word in generator indices


# -- vectorization over Q ----------------------------------------------------


def uq_vec(x: UqElement) -> Dict:
    """Flatten an element to a sparse Q-vector keyed by (monomial, hbar
    power)."""
    out = {}
    for m, s in x.data.items():
        for k, c in enumerate(s.coeffs):
            if c != 0:
                out[(m, k)] = c
    return out


def tensor_vec(t: UqTensor) -> Dict:
    out = {}
    for key, s in t.data.items():
        for k, c in enumerate(s.coeffs):
            if c != 0:
                out[(key, k)] = c
    return out


def qfun_vec(f: QFunction) -> Dict:
    out = {}
    for key, blk in f.blocks.items():
        for idx, s in blk.items():
            for k, c in enumerate(s.coeffs):
                if c != 0:
                    out[(key, idx, k)] = c
    return out


def _hbar(ctx: UqContext, k: int) -> TruncatedSeries:
    return TruncatedSeries.hbar(ctx.order, k) if k else ctx.one_series()


def _h_monomials(bound: int) -> List[Tuple[int, int, int]]:
    out = []
    for a in range(bound + 1):
        for b in range(bound + 1 - a):
            for c in range(bound + 1 - a - b):
                out.append((a, b, c))
    out.sort()
    return out


class _RevKey:
    """Wrapper reversing the total order of a key; used to recompute
    echelon complements with a permuted pivot order."""

    __slots__ = ("k",)

    def __init__(self, k):
        self.k = k

    def __lt__(self, other):
        return other.k < self.k

    def __eq__(self, other):
        return isinstance(other, _RevKey) and other.k == self.k

    def __hash__(self):
        return hash(("rev", self.k))


def _wrap_vec(vec: Dict, key_order: str) -> Dict:
    if key_order == "lex":
        return vec
    return {_RevKey(k): c for k, c in vec.items()}


# -- Hopf subalgebra windows -------------------------------------------------


class HopfSubalgebra:
    """The span of words of bounded length in a set of generators,
    cached as an echelon basis over Q (with hbar-shifted copies, so the
    Q-span equals the truncated-series-module span).

    Products of cached basis elements that leave the window are recorded
    in ``closure_defects`` rather than silently dropped.
    """

    def __init__(self, ctx: UqContext, generators: Sequence[UqElement],
                 degree_bound: int, names: Optional[Sequence[str]] = None):
        self.ctx = ctx
        self.generators = list(generators)
        self.degree_bound = degree_bound
        self.names = list(names) if names else [
            "g%d" % i for i in range(len(generators))
        ]
        self.span = EchelonSpan(track=True)
        self.tags: List[Tuple[int, int]] = []  # per add: (word index, shift)
        self.words: List[Word] = []            # every attempted word
        self.basis: List[UqElement] = []       # rank-increasing words only
        self.basis_words: List[Word] = []
        self._defects: Optional[List[Tuple[int, int]]] = None

        level: List[Tuple[Word, UqElement]] = [((), uq_one(ctx))]
        for length in range(degree_bound + 1):
            nxt: List[Tuple[Word, UqElement]] = []
            for w, el in level:
                widx = len(self.words)
                self.words.append(w)
                grew = False
                for k in range(ctx.order):
                    added = self.span.add(uq_vec(el.scale(_hbar(ctx, k))))
                    self.tags.append((widx, k))
                    if k == 0:
                        grew = added
                if grew:
                    self.basis.append(el)
                    self.basis_words.append(w)
                    if length < degree_bound:
                        for gi, g in enumerate(self.generators):
                            nxt.append((w + (gi,), el * g))
            level = nxt

    def contains(self, x: UqElement) -> bool:
        return self.span.contains(uq_vec(x))

    def element(self, word: Word) -> UqElement:
        out = uq_one(self.ctx)
        for gi in word:
            out = out * self.generators[gi]
        return out

    @property
    def closure_defects(self) -> List[Tuple[int, int]]:
        """Pairs (i, j) of basis indices whose product leaves the span
        (the product then necessarily exceeds the degree window; within
        the window the word construction is closed by design).  Kept as
        an explicit flag instead of silently dropping the products."""
        if self._defects is None:
            self._defects = []
            for i, u in enumerate(self.basis):
                for j, v in enumerate(self.basis):
                    if not self.contains(u * v):
                        self._defects.append((i, j))
        return self._defects

    @property
    def closed(self) -> bool:
        """Closed under multiplication up to the bound: every flagged
        pair genuinely exceeds the word-length window."""
        return all(
            len(self.basis_words[i]) + len(self.basis_words[j]) > self.degree_bound
            for i, j in self.closure_defects
        )

    def extend(self, degree_bound: int) -> "HopfSubalgebra":
        """The same subalgebra with a (weakly) larger word-length bound."""
        if degree_bound <= self.degree_bound:
            return self
        return HopfSubalgebra(self.ctx, self.generators, degree_bound,
                              self.names)


class IdealWindow:
    """Window of the two-sided ideal [U,U] of U generated by commutators:
    the echelon span of u(vw - wv)u' over words with total length inside
    the bound, together with the spanning elements themselves."""

    def __init__(self, U: HopfSubalgebra, bound: int,
                 elements: List[UqElement], span: EchelonSpan):
        self.U = U
        self.bound = bound
        self.elements = elements
        self.span = span

    def contains(self, x: UqElement) -> bool:
        return self.span.contains(uq_vec(x))


def ideal_commutator(U: HopfSubalgebra, bound: Optional[int] = None) -> IdealWindow:
    """Windowed two-sided ideal of U generated by the commutators of its
    cached basis, including one-sided multiples within the degree bound."""
    if bound is None:
        bound = U.degree_bound
    ctx = U.ctx
    W = U.extend(bound)
    span = EchelonSpan()
    elements: List[UqElement] = []
    comms: List[Tuple[int, UqElement]] = []
    for i in range(len(W.basis)):
        li = len(W.basis_words[i])
        for j in range(i + 1, len(W.basis)):
            lj = len(W.basis_words[j])
            if li + lj > bound:
                continue
            c = W.basis[i] * W.basis[j] - W.basis[j] * W.basis[i]
            if not c.is_zero():
                comms.append((li + lj, c))
    for lc, c in comms:
        for wl, el_l in zip(W.basis_words, W.basis):
            if len(wl) + lc > bound:
                continue
            for wr, el_r in zip(W.basis_words, W.basis):
                if len(wl) + lc + len(wr) > bound:
                    continue
                el = el_l * c * el_r
                grew = False
                for k in range(ctx.order):
                    if span.add(uq_vec(el.scale(_hbar(ctx, k)))) and k == 0:
                        grew = True
                if grew:
                    elements.append(el)
    return IdealWindow(W, bound, elements, span)


# -- strong coisotropy of Hopf subalgebras -----------------------------------


class CoisoReport:
    """Three-valued answer of a windowed membership computation."""

    def __init__(self, status: str, window: Dict, witness=None,
                 details: Optional[Dict] = None):
        assert status in ("true", "false", "inconclusive", "skipped")
        self.status = status
        self.window = window
        self.witness = witness
        self.details = details or {}

    def __bool__(self) -> bool:
        return self.status == "true"

    def __repr__(self):
        return "CoisoReport(%s, window=%s)" % (self.status, self.window)

    def to_json(self) -> Dict:
        out = {"status": self.status, "window": dict(self.window)}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


def _window_span(Uext: HopfSubalgebra, ideal: IdealWindow, h_bound: int,
                 side: str, track: bool = False, key_order: str = "lex"):
    """Echelon span of U(x)U + H(x)[U,U] (right) or U(x)U + [U,U](x)H
    (left) inside the given window, with hbar-shifted copies.  When
    tracking, returns tags aligned with every insertion."""
    ctx = Uext.ctx
    span = EchelonSpan(track=track)
    tags: List[Tuple] = []
    for i, u in enumerate(Uext.basis):
        for j, v in enumerate(Uext.basis):
            base = tensor_of([u, v])
            for k in range(ctx.order):
                span.add(_wrap_vec(tensor_vec(base.scale(_hbar(ctx, k))),
                                   key_order))
                tags.append(("uu", i, j, k))
    for hm in _h_monomials(h_bound):
        x = UqElement(ctx, {hm: 1})
        for ci, c in enumerate(ideal.elements):
            base = tensor_of([x, c]) if side == "right" else tensor_of([c, x])
            for k in range(ctx.order):
                span.add(_wrap_vec(tensor_vec(base.scale(_hbar(ctx, k))),
                                   key_order))
                tags.append(("ideal", hm, ci, k))
    return span, tags


def _coiso_residuals(U: HopfSubalgebra, targets: List[Tuple[object, UqTensor]],
                     side: str, span_bound: int, h_bound: int):
    Uext = U.extend(span_bound)
    ideal = ideal_commutator(Uext, span_bound)
    span, _ = _window_span(Uext, ideal, h_bound, side)
    out = []
    for label, t in targets:
        r = span.reduce(tensor_vec(t))
        if r:
            out.append((label, r))
    return out


def _three_valued(U: HopfSubalgebra, targets, side: str, span_bound: int,
                  h_bound: int, slack: int, extra_window: Dict) -> CoisoReport:
    window = {"degree_bound": U.degree_bound, "span_bound": span_bound,
              "h_bound": h_bound, "order": U.ctx.order, "side": side}
    window.update(extra_window)
    res = _coiso_residuals(U, targets, side, span_bound, h_bound)
    if not res:
        return CoisoReport("true", window)
    res2 = _coiso_residuals(U, targets, side, span_bound + slack,
                            h_bound + slack)
    if not res2:
        window["span_bound"] = span_bound + slack
        window["h_bound"] = h_bound + slack
        return CoisoReport("true", window)
    status = "false" if res2 == res else "inconclusive"
    label, residual = res2[0]
    witness = {
        "element": str(label),
        "residual_terms": sorted(str(k) for k in residual)[:8],
        "residual_size": len(residual),
    }
    return CoisoReport(status, window, witness)


def strong_coiso_hopf(U: HopfSubalgebra, side: str = "right",
                      span_bound: Optional[int] = None,
                      h_bound: Optional[int] = None,
                      slack: int = 2) -> CoisoReport:
    """Does Delta(u) lie in U(x)U + H(x)[U,U] (right) resp.
    U(x)U + [U,U](x)H (left) for every cached basis element u?

    The target span is built from an enlarged copy of U (the coproduct
    of a degree-d word has legs of degree up to d plus the truncation
    order), so a ``true`` answer is exact within the window.
    """
    assert side in ("right", "left")
    ctx = U.ctx
    if span_bound is None:
        span_bound = U.degree_bound + ctx.order - 1
    if h_bound is None:
        h_bound = span_bound
    targets = [("Delta(%s)" % ".".join(U.names[g] for g in w) if w
                else "Delta(1)", coproduct(u))
               for w, u in zip(U.basis_words, U.basis)]
    return _three_valued(U, targets, side, span_bound, h_bound, slack, {})


def r_membership_hopf(U: HopfSubalgebra, R: UqTensor,
                      span_bound: Optional[int] = None,
                      h_bound: Optional[int] = None,
                      slack: int = 2) -> CoisoReport:
    """Membership R in U(x)U + H(x)[U,U] mod hbar^K within the window.
    When it holds, the tensor powers of U stay right strongly
    coisotropic for the twisted coproducts (see
    ``strong_coiso_twisted``)."""
    ctx = U.ctx
    if span_bound is None:
        span_bound = U.degree_bound + ctx.order - 1
    if h_bound is None:
        h_bound = span_bound
    return _three_valued(U, [("R", R)], "right", span_bound, h_bound, slack,
                         {"target": "R"})


# -- strong coisotropy of U^(x)m in the twisted tensor power -----------------


def _monomial_support(span: EchelonSpan) -> Optional[set]:
    """If every echelon row is a single coordinate, the span is a
    monomial span; return its set of monomials (else None)."""
    monos = set()
    for piv, row in span.rows.items():
        if len(row) != 1:
            return None
        (m, _k), = row.keys()
        monos.add(m)
    return monos


def strong_coiso_twisted(U: HopfSubalgebra, R: UqTensor, m: int = 2,
                         check_bound: int = 2,
                         span_bound: Optional[int] = None,
                         h_bound: Optional[int] = None,
                         slack: int = 2) -> CoisoReport:
    """Direct verification that U^(x)m is right strongly coisotropic in
    the m-fold tensor power with coproduct twisted by the closed-formula
    twisting element of R:

        Delta_J(u) in (U^(x)m)(x)(U^(x)m) + (H^(x)m)(x)[U^(x)m, U^(x)m],

    where [U^(x)m, U^(x)m] = sum_j U(x)..(x)[U,U]_j(x)..(x)U.  Checked on
    tensors of basis words of per-factor length <= check_bound.  Requires
    the U- and ideal-windows to be monomial spans (true for the
    triangular subalgebras this is used on), so that membership reduces
    to a per-term predicate and the product window never has to be
    enumerated."""
    ctx = U.ctx
    if span_bound is None:
        span_bound = check_bound + 2 * (ctx.order - 1)
    if h_bound is None:
        h_bound = span_bound
    window = {"m": m, "check_bound": check_bound, "span_bound": span_bound,
              "h_bound": h_bound, "order": ctx.order}

    th = TwistedHopf(twi_m(R, m), m)
    Ucheck = U.extend(check_bound) if U.degree_bound < check_bound else U
    check_basis = [(w, el) for w, el in zip(Ucheck.basis_words, Ucheck.basis)
                   if len(w) <= check_bound]

    def residuals(sb: int, hb: int):
        Uext = U.extend(sb)
        ideal = ideal_commutator(Uext, sb)
        u_monos = _monomial_support(Uext.span)
        i_monos = _monomial_support(ideal.span)
        if u_monos is None or i_monos is None:
            raise ValueError(
                "tensor-power window requires monomial U- and ideal-spans"
            )

        def ok(key: Tuple) -> bool:
            if all(mono in u_monos for mono in key):
                return True
            # H-part: bounded first block, ideal somewhere in the second
            if any(sum(mono) > hb for mono in key[:m]):
                return False
            hit = False
            for mono in key[m:]:
                if mono in i_monos:
                    hit = True
                elif mono not in u_monos:
                    return False
            return hit

        out = []
        for combo in itertools.product(check_basis, repeat=m):
            t = tensor_of([el for _, el in combo])
            d = th.delta(t)
            bad = {key: s for key, s in d.data.items() if not ok(key)}
            if bad:
                label = " (x) ".join(
                    ".".join(U.names[g] for g in w) or "1" for w, _ in combo
                )
                out.append((label, sorted(bad)))
        return out

    res = residuals(span_bound, h_bound)
    if not res:
        return CoisoReport("true", window)
    res2 = residuals(span_bound + slack, h_bound + slack)
    if not res2:
        window["span_bound"] = span_bound + slack
        window["h_bound"] = h_bound + slack
        return CoisoReport("true", window)
    status = "false" if res2 == res else "inconclusive"
    label, bad = res2[0]
    return CoisoReport(status, window,
                       {"element": label,
                        "residual_terms": [str(k) for k in bad[:8]]})


# -- characters and their monoid ---------------------------------------------


class Character:
    """Algebra character of a Hopf-subalgebra window, stored by its
    values on the generators and validated on the cached basis."""

    def __init__(self, U: HopfSubalgebra, values: Sequence):
        assert len(values) == len(U.generators)
        self.U = U
        order = U.ctx.order
        self.values = [
            v if isinstance(v, TruncatedSeries) else TruncatedSeries.const(v, order)
            for v in values
        ]

    def __eq__(self, other):
        return (isinstance(other, Character) and self.U is other.U
                and self.values == other.values)

    def __repr__(self):
        return "Character(%s)" % ", ".join(
            "%s=%s" % (n, v) for n, v in zip(self.U.names, self.values)
        )

    def on_word(self, word: Word) -> TruncatedSeries:
        out = self.U.ctx.one_series()
        for gi in word:
            out = out * self.values[gi]
        return out

    def on_element(self, x: UqElement) -> Optional[TruncatedSeries]:
        """Value on an element of the window, through the tracked span;
        None when x is outside the window."""
        combo = self.U.span.coefficients(uq_vec(x))
        if combo is None:
            return None
        out = self.U.ctx.zero_series()
        for gen_idx, c in combo.items():
            widx, k = self.U.tags[gen_idx]
            out = out + self.on_word(self.U.words[widx]) * _hbar(self.U.ctx, k) * c
        return out

    def is_valid(self, ideal: Optional[IdealWindow] = None) -> bool:
        """Multiplicative on the cached basis and vanishing on the
        commutator-ideal window."""
        U = self.U
        for i, (wi, bi) in enumerate(zip(U.basis_words, U.basis)):
            for wj, bj in zip(U.basis_words, U.basis):
                if len(wi) + len(wj) > U.degree_bound:
                    continue
                got = self.on_element(bi * bj)
                if got is None or got != self.on_word(wi) * self.on_word(wj):
                    return False
        if ideal is None:
            ideal = ideal_commutator(U)
        for c in ideal.elements:
            v = self.on_element(c)
            if v is None or not v.is_zero():
                return False
        return True


def counit_character(U: HopfSubalgebra) -> Character:
    return Character(U, [counit(g) for g in U.generators])


def borel_subalgebra(ctx: UqContext, degree_bound: int = 4) -> HopfSubalgebra:
    """The Hopf subalgebra generated by H and E (the quantized positive
    Borel of sl2)."""
    return HopfSubalgebra(ctx, [uq_gen(ctx, "H"), uq_gen(ctx, "E")],
                          degree_bound, names=["H", "E"])


def weight_character(U: HopfSubalgebra, n: int) -> Character:
    """The character by which the weight-n highest-weight block of the
    quantized function algebra transforms under the right action
    c_{xi,v} . y = c_{xi, S(y)v}: the generator named H acts by -n and
    every other generator by its counit."""
    values = []
    for name, g in zip(U.names, U.generators):
        if name == "H":
            values.append(TruncatedSeries.const(-n, U.ctx.order))
        else:
            values.append(counit(g))
    return Character(U, values)


class ReducedCoproduct:
    """The reduced coproduct of a right strongly coisotropic window:
    Delta followed by projection onto the U(x)U part along the chosen
    echelon complement of H(x)[U,U].  Exposes the pairing
    (phi (x) psi)(reduced Delta(x)) used for the character product."""

    def __init__(self, U: HopfSubalgebra, span_bound: Optional[int] = None,
                 h_bound: Optional[int] = None, key_order: str = "lex"):
        ctx = U.ctx
        if span_bound is None:
            span_bound = U.degree_bound + ctx.order - 1
        if h_bound is None:
            h_bound = span_bound
        self.U = U
        self.key_order = key_order
        self.Uext = U.extend(span_bound)
        self.ideal = ideal_commutator(self.Uext, span_bound)
        self.span, self.tags = _window_span(
            self.Uext, self.ideal, h_bound, "right", track=True,
            key_order=key_order,
        )

    def pair_value(self, phi: Character, psi: Character,
                   x: UqElement) -> Optional[TruncatedSeries]:
        combo = self.span.coefficients(
            _wrap_vec(tensor_vec(coproduct(x)), self.key_order)
        )
        if combo is None:
            return None
        ctx = self.U.ctx
        out = ctx.zero_series()
        for gen_idx, c in combo.items():
            tag = self.tags[gen_idx]
            if tag[0] != "uu":
                continue  # phi (x) psi kills the H(x)[U,U] part
            _, i, j, k = tag
            out = out + (phi.on_word(self.Uext.basis_words[i])
                         * psi.on_word(self.Uext.basis_words[j])
                         * _hbar(ctx, k) * c)
        return out


class CharacterMonoid:
    """Monoid structure on characters of a right strongly coisotropic
    window: (phi psi)(u) = (phi (x) psi)(reduced Delta(u)).  The product
    is independent of the echelon complement; with ``recheck_pivots``
    every product is recomputed with a reversed pivot order and the two
    answers are asserted equal."""

    def __init__(self, U: HopfSubalgebra, span_bound: Optional[int] = None,
                 h_bound: Optional[int] = None, recheck_pivots: bool = True,
                 precheck: bool = True):
        if precheck:
            rep = strong_coiso_hopf(U, "right")
            if rep.status != "true":
                raise ValueError(
                    "character monoid requires a right strongly coisotropic "
                    "window (got %s)" % rep.status
                )
        self.U = U
        self.rc = ReducedCoproduct(U, span_bound, h_bound, "lex")
        self.rc_alt = (
            ReducedCoproduct(U, span_bound, h_bound, "rev")
            if recheck_pivots else None
        )

    @property
    def unit(self) -> Character:
        return counit_character(self.U)

    def product(self, phi: Character, psi: Character) -> Character:
        values = []
        for g in self.U.generators:
            v = self.rc.pair_value(phi, psi, g)
            if v is None:
                raise ValueError("coproduct of a generator left the window")
            if self.rc_alt is not None:
                v2 = self.rc_alt.pair_value(phi, psi, g)
                if v2 != v:
                    raise AssertionError(
                        "character product depends on the pivot order"
                    )
            values.append(v)
        return Character(self.U, values)

    def power(self, phi: Character, n: int) -> Character:
        out = self.unit
        for _ in range(n):
            out = self.product(out, phi)
        return out


# -- graded semi-invariants of the quantized function algebras ---------------


def q_evaluate(f: QFunction, *us: UqElement) -> TruncatedSeries:
    """Evaluate a matrix-coefficient function on a tensor of quantum
    group elements (one per factor): c_{xi,v}(u) = <u.xi, v> with the
    antipode-twisted dual action, the pairing under which the product of
    the function algebra is the convolution."""
    qctx = f.qctx
    assert len(us) == f.m
    out = qctx.uq.zero_series()
    mats = {}
    for key, blk in f.blocks.items():
        for j in range(f.m):
            if (key[j][0], j) not in mats:
                rep = qctx.qirrep(key[j][0])
                mats[(key[j][0], j)] = rep.act(antipode(us[j]))
        for idx, c in blk.items():
            s = c
            for j in range(f.m):
                s = s * mats[(key[j][0], j)][idx[2 * j]][idx[2 * j + 1]]
                if s.is_zero():
                    break
            if not s.is_zero():
                out = out + s
    return out


def q_right_action(f: QFunction, j: int, y: UqElement) -> QFunction:
    """Right action on factor j: c_{xi,v} . y = c_{xi, S(y)v}."""
    qctx = f.qctx
    out = QFunction(qctx, f.m)
    sy = antipode(y)
    for key, blk in f.blocks.items():
        rep = qctx.qirrep(key[j][0])
        mat = rep.act(sy)
        for idx, c in blk.items():
            b = idx[2 * j + 1]
            for s_ in range(rep.dim):
                if mat[s_][b].is_zero():
                    continue
                nidx = idx[: 2 * j + 1] + (s_,) + idx[2 * j + 2:]
                out._bump(key, nidx, c * mat[s_][b])
    return out


def q_right_action_word(f: QFunction, j: int, U: HopfSubalgebra,
                        word: Word) -> QFunction:
    out = f
    for gi in word:
        out = q_right_action(out, j, U.generators[gi])
    return out


def _qf_window_basis(qctx: QAffineContext, m: int, weight_bound: int) -> List[QFunction]:
    out = []
    for ns in itertools.product(range(weight_bound + 1), repeat=m):
        key = tuple((n,) for n in ns)
        ranges = []
        for n in ns:
            ranges.append(range(n + 1))
            ranges.append(range(n + 1))
        for idx in itertools.product(*ranges):
            out.append(QFunction(qctx, m, {key: {idx: 1}}))
    return out


def semi_invariants(qctx: QAffineContext, U: HopfSubalgebra,
                    chi: Union[Character, Sequence[Character]],
                    weight_bound: int, m: int = 1) -> List[QFunction]:
    """Basis of {f in the weight window : f.u = chi(u) f factorwise} by
    an exact linear solve.  The eigencondition is enforced on the
    generators of U, which suffices: the right action is multiplicative
    and the character values extend multiplicatively."""
    chis = [chi] * m if isinstance(chi, Character) else list(chi)
    assert len(chis) == m
    ctx = qctx.uq
    basis = _qf_window_basis(qctx, m, weight_bound)
    unknowns: List[Tuple[int, int]] = [
        (bi, k) for bi in range(len(basis)) for k in range(ctx.order)
    ]
    # residual of each unknown under each (factor, generator) condition
    cols = []
    for bi, k in unknowns:
        col: Dict = {}
        for j in range(m):
            for gi, g in enumerate(U.generators):
                res = (q_right_action(basis[bi], j, g)
                       - basis[bi].scale(chis[j].values[gi]))
                for key, c in qfun_vec(res.scale(_hbar(ctx, k))).items():
                    col[(j, gi, key)] = c
        cols.append(col)
    row_keys = sorted({k for col in cols for k in col})
    row_pos = {k: i for i, k in enumerate(row_keys)}
    matrix = [[Fraction(0)] * len(unknowns) for _ in row_keys]
    for ci, col in enumerate(cols):
        for k, c in col.items():
            matrix[row_pos[k]][ci] = c
    if not row_keys:
        matrix = [[Fraction(0)] * len(unknowns)]
    out = []
    for sol in nullspace(matrix):
        f = QFunction(qctx, m)
        for (bi, k), x in zip(unknowns, sol):
            if x != 0:
                f = f + basis[bi].scale(_hbar(ctx, k) * x)
        out.append(f)
    return out


class GradedSemiInvariants:
    """Character-graded family of semi-invariant windows with its
    defining eigenproperty checkable against the cached basis of U."""

    def __init__(self, U: HopfSubalgebra, m: int = 1):
        self.U = U
        self.m = m
        self.entries: List[Tuple[Tuple[Character, ...], List[QFunction]]] = []

    def add(self, chis: Union[Character, Sequence[Character]],
            fns: List[QFunction]):
        chis = (chis,) * self.m if isinstance(chis, Character) else tuple(chis)
        self.entries.append((chis, fns))

    def validate(self) -> bool:
        """Every listed f satisfies f.u = chi(u) f for all cached basis
        elements u of U, in every factor."""
        for chis, fns in self.entries:
            for f in fns:
                for j in range(self.m):
                    for w in self.U.basis_words:
                        lhs = q_right_action_word(f, j, self.U, w)
                        if lhs != f.scale(chis[j].on_word(w)):
                            return False
        return True


def _fn_span(fns: List[QFunction]) -> EchelonSpan:
    span = EchelonSpan()
    if not fns:
        return span
    order = fns[0].qctx.uq.order
    for f in fns:
        for k in range(order):
            span.add(qfun_vec(f.scale(_hbar(fns[0].qctx.uq, k))))
    return span


def semi_invariant_product_check(monoid: CharacterMonoid,
                                 qctx: QAffineContext,
                                 chi1, chi2, weight_bound: int,
                                 m: int = 1, product=None) -> bool:
    """A^{chi1} A^{chi2} lands in A^{chi1 chi2} on the window (products
    whose weights leave the window are excluded by choosing the bound
    large enough for the inputs used)."""
    if product is None:
        product = q_multiply
    chis1 = (chi1,) * m if isinstance(chi1, Character) else tuple(chi1)
    chis2 = (chi2,) * m if isinstance(chi2, Character) else tuple(chi2)
    a1 = semi_invariants(qctx, monoid.U, chis1, weight_bound, m)
    a2 = semi_invariants(qctx, monoid.U, chis2, weight_bound, m)
    chis12 = tuple(monoid.product(c1, c2) for c1, c2 in zip(chis1, chis2))
    a12 = semi_invariants(qctx, monoid.U, chis12, weight_bound, m)
    span = _fn_span(a12)
    for f in a1:
        for g in a2:
            if not span.contains(qfun_vec(product(f, g))):
                return False
    return True


# -- quantum sections ---------------------------------------------------------


def restriction_character(d: QFunction, U: HopfSubalgebra) -> Character:
    """p(d): the restriction of the evaluation functional of d to U,
    recorded by its values on the generators.  A character precisely
    when d is a prequantum section."""
    assert d.m == 1
    return Character(U, [q_evaluate(d, g) for g in U.generators])


def prequantum_check(d: QFunction, U: HopfSubalgebra) -> CoisoReport:
    """Windowed test of Delta(d) in d(x)d + ker(p)(x)A, where p restricts
    matrix coefficients to U.  With ker(p) realized as the annihilator
    of the U-window under the evaluation pairing, the condition is
    equivalent to the eigenproperty d.u = p(d)(u) d for every cached
    basis element u of U (apply evaluation at u to the first leg:
    coproduct terms in ker(p)(x)A die, Delta(d) gives d.u, and d(x)d
    gives p(d)(u) d)."""
    window = {"degree_bound": U.degree_bound, "order": U.ctx.order,
              "weights": [list(k) for k in d.weight_keys()]}
    if d.is_zero():
        return CoisoReport("false", window, {"element": "d", "reason": "zero"})
    if q_evaluate(d, uq_one(U.ctx)) != U.ctx.one_series():
        return CoisoReport("false", window,
                           {"element": "d", "reason": "d(1) != 1"})
    for w, u in zip(U.basis_words, U.basis):
        lhs = q_right_action_word(d, 0, U, w)
        rhs = d.scale(q_evaluate(d, u))
        if lhs != rhs:
            name = ".".join(U.names[g] for g in w) or "1"
            return CoisoReport(
                "false", window,
                {"element": name,
                 "reason": "d.u is not proportional to d with ratio p(d)(u)"},
            )
    return CoisoReport("true", window)


class QuantumSectionReport:
    def __init__(self, prequantum: CoisoReport, graded: CoisoReport,
                 left_coiso: CoisoReport, details: Optional[Dict] = None):
        self.prequantum = prequantum
        self.graded = graded
        self.left_coiso = left_coiso
        self.details = details or {}

    def __repr__(self):
        return "QuantumSectionReport(prequantum=%s, graded=%s)" % (
            self.prequantum.status, self.graded.status)

    def to_json(self) -> Dict:
        return {
            "prequantum": self.prequantum.to_json(),
            "graded": self.graded.to_json(),
            "left_coiso": self.left_coiso.to_json(),
            "details": self.details,
        }


def quantum_section_check(d: QFunction, U: HopfSubalgebra, n_max: int = 3,
                          weight_bound: Optional[int] = None,
                          monoid: Optional[CharacterMonoid] = None) -> QuantumSectionReport:
    """Prequantum test for d, then the graded structure: for each
    n <= n_max the degree-n sections computed from the coproduct
    condition (equivalently, the p(d^n)-eigenspace of the right action)
    must coincide with the semi-invariants of the monoid power p(d)^n,
    and products of sections must land in the correct degree."""
    qctx = d.qctx
    assert d.m == 1
    details: Dict = {}
    left = strong_coiso_hopf(U, side="left")
    pre = prequantum_check(d, U)
    window = {"n_max": n_max, "order": U.ctx.order}
    if pre.status != "true" or left.status != "true":
        return QuantumSectionReport(
            pre, CoisoReport("skipped", window), left, details)

    if weight_bound is None:
        weight_bound = n_max * max(
            (key[0][0] for key in d.weight_keys()), default=0)
    window["weight_bound"] = weight_bound
    if monoid is None:
        monoid = CharacterMonoid(U)
    chi = restriction_character(d, U)
    if not chi.is_valid():
        return QuantumSectionReport(
            pre, CoisoReport("false", window,
                             {"reason": "p(d) is not a character"}),
            left, details)

    spaces: List[List[QFunction]] = []
    dn = q_one(qctx, 1)
    chin = monoid.unit
    for n in range(n_max + 1):
        if n:
            dn = q_multiply(dn, d)
            chin = monoid.product(chin, chi)
        # p(d^n) = p(d)^n: the monoid power evaluates d^n on the generators
        evals = [q_evaluate(dn, g) for g in U.generators]
        if evals != chin.values:
            return QuantumSectionReport(
                pre, CoisoReport("false", window,
                                 {"reason": "p(d^%d) != p(d)^%d" % (n, n)}),
                left, details)
        spaces.append(semi_invariants(qctx, U, chin, weight_bound))
        if n and not _fn_span(spaces[n]).contains(qfun_vec(dn)):
            return QuantumSectionReport(
                pre, CoisoReport("false", window,
                                 {"reason": "d^%d outside its section space" % n}),
                left, details)
    details["dims"] = [len(s) for s in spaces]
    for a in range(n_max + 1):
        for b in range(n_max + 1 - a):
            span = _fn_span(spaces[a + b])
            for f in spaces[a]:
                for g in spaces[b]:
                    if not span.contains(qfun_vec(q_multiply(f, g))):
                        return QuantumSectionReport(
                            pre,
                            CoisoReport(
                                "false", window,
                                {"reason": "product of degrees (%d, %d) "
                                           "left degree %d" % (a, b, a + b)}),
                            left, details)
    return QuantumSectionReport(pre, CoisoReport("true", window), left, details)


# -- classical shadow ---------------------------------------------------------


def classical_shadow(U: HopfSubalgebra):
    """The Lie subalgebra of sl2 whose basis elements lie in the window
    mod hbar; lets the quantum coisotropy data be compared with the
    classical test on the semiclassical limit."""
    from .liebialg import Subspace, basis_tensor, build_sl

    alg = build_sl(2)
    gen_mono = {0: (0, 1, 0), alg.raise_index(0): (0, 0, 1),
                alg.lower_index(0): (1, 0, 0)}
    vectors = []
    for idx in range(alg.dim):
        x = UqElement(U.ctx, {gen_mono[idx]: 1})
        if U.contains(x):
            vectors.append(basis_tensor(alg, idx))
    return Subspace(alg, vectors)
