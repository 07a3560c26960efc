"""Noncommutative differential operators on the circle and their symbols.

An operator is a finite sum of terms ``T(g) b(x) K^l S`` where

* ``K = -i d/dx``; a negative ``l`` means the Fourier multiplier ``kappa^l``
  (zero on the constant mode), with ``kappa = 2 pi k / L``;
* ``S`` is the identity, ``Pi+`` (modes ``k >= 0``) or ``Pi-`` (modes ``k < 0``).

The half-line projections let order-zero operators carry different symbols on
the two cosphere components, which pure differential operators cannot.

The principal symbol of an order ``m`` operator has two components over the
cosphere bundle, ``sigma_+`` at ``xi = +1`` and ``sigma_-`` at ``xi = -1``, each
an element of the crossed product.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Iterable

import numpy as np

from ..algebra import fourier
from ..algebra.crossed import CrossedElement, cp_mul, cp_seminorm
from ..algebra.functions import PeriodicFunction
from ..algebra.groups import Element, GroupSpec
from ..algebra.inversion import invert
from ..errors import DomainError, IncompatibleAlgebraError

SHEETS = (None, "+", "-")


@dataclass(frozen=True)
class Term:
    g: Element
    l: int
    coeff: PeriodicFunction
    sheet: str | None = None


class NCOperatorSpec:
    """``sum T(g) b_{g,l}(x) K^l S`` with coefficients sharing ``L`` and ``N``."""

    def __init__(self, group: GroupSpec, order: int, terms: Iterable, N: int | None = None,
                 check_order: bool = True):
        terms = [t if isinstance(t, Term) else Term(*t) for t in terms]
        for t in terms:
            if t.coeff.L != group.L:
                raise IncompatibleAlgebraError("coefficient circumference differs from the group's")
            if t.sheet not in SHEETS:
                raise DomainError(f"unknown sheet {t.sheet!r}")
            if t.l > order:
                raise DomainError(f"term of order {t.l} exceeds operator order {order}")
            if t.sheet is not None and group.kind == "reflection":
                raise DomainError("half-line projections do not commute with the reflection")
        self.group = group
        self.order = int(order)
        self.N = max([t.coeff.N for t in terms] + [0]) if N is None else int(N)
        merged: dict[tuple, np.ndarray] = {}
        for t in terms:
            key = (group.canonical(t.g), int(t.l), t.sheet)
            c = fourier.resize(t.coeff.coeffs, self.N)
            merged[key] = merged[key] + c if key in merged else c
        self.terms = tuple(Term(g, l, PeriodicFunction(group.L, c), s)
                           for (g, l, s), c in sorted(merged.items(), key=_term_key))
        if check_order and terms and not any(t.l == self.order for t in self.terms):
            raise DomainError("no term reaches the stated order")

    @property
    def L(self) -> float:
        return self.group.L

    @property
    def bandwidth(self) -> int:
        """Largest Fourier mode carried by a nonzero coefficient."""
        bw = 0
        for t in self.terms:
            nz = np.nonzero(np.abs(t.coeff.coeffs) > 0)[0]
            if nz.size:
                bw = max(bw, int(np.max(np.abs(nz - t.coeff.N))))
        return bw

    def __add__(self, other: "NCOperatorSpec") -> "NCOperatorSpec":
        if other.group != self.group:
            raise IncompatibleAlgebraError("operators over different groups")
        return NCOperatorSpec(self.group, max(self.order, other.order), self.terms + other.terms,
                              N=max(self.N, other.N), check_order=False)

    def scaled(self, s) -> "NCOperatorSpec":
        return NCOperatorSpec(self.group, self.order,
                              [Term(t.g, t.l, t.coeff * s, t.sheet) for t in self.terms], N=self.N,
                              check_order=False)

    def __repr__(self):
        return f"NCOperatorSpec(order={self.order}, N={self.N}, terms={len(self.terms)})"


def _term_key(item):
    (g, l, s), _ = item
    return (g, l, SHEETS.index(s))


def constant(value, L: float) -> PeriodicFunction:
    return PeriodicFunction.constant(value, L)


def identity_operator(group: GroupSpec, N: int = 0) -> NCOperatorSpec:
    return NCOperatorSpec(group, 0, [Term(group.identity, 0, PeriodicFunction.constant(1.0, group.L, N))])


# -- composition -----------------------------------------------------------


def _mult_product(a: int, b: int) -> tuple[int, bool]:
    """``kappa^a kappa^b = kappa^{a+b}`` except on the constant mode when ``a = -b != 0``."""
    return a + b, not (a + b == 0 and a != 0)


def _sheet_product(s: str | None, t: str | None):
    if s is None:
        return t, True
    if t is None or t == s:
        return s, True
    return "zero", True


def compose(D: NCOperatorSpec, Q: NCOperatorSpec) -> tuple[NCOperatorSpec, bool]:
    """Symbolic product ``D Q``; the flag is ``False`` when finite-rank or lower-order remainders were dropped.

    Uses ``b T(h) = T(h) (b o h)``, ``K T(r) = -T(r) K`` for the reflection and
    Leibniz' rule for ``K^l c`` with ``l >= 0``. Multipliers ``kappa^l`` with
    ``l < 0`` and half-line projections commute exactly with constants only;
    for other coefficients the leading term is kept.
    """
    if D.group != Q.group:
        raise IncompatibleAlgebraError("operators over different groups")
    G = D.group
    N = D.N + Q.N
    exact = True
    out: list[Term] = []
    for td in D.terms:
        b = td.coeff.truncate(N)
        for tq in Q.terms:
            sign, shift = G.action(tq.g)
            if sign < 0 and (td.sheet or tq.sheet):
                raise DomainError("half-line projections do not commute with the reflection")
            bh = b.pullback(sign, shift) * (sign ** (td.l % 2) if td.l else 1)
            k = G.mul(td.g, tq.g)
            c = tq.coeff.truncate(N)
            c_const = not np.any(np.abs(np.delete(c.coeffs, c.N)) > 0)
            if td.l >= 0:
                pieces = [(comb(td.l, j), c.derivative(j) * (-1j) ** j, td.l - j) for j in range(td.l + 1)]
            else:
                pieces = [(1, c, td.l)]
                exact &= c_const
            if td.sheet is not None and not c_const:
                exact = False
            for binom, cj, rest in pieces:
                if not np.any(cj.coeffs):
                    continue
                power, ok = _mult_product(rest, tq.l)
                exact &= ok
                sheet, _ = _sheet_product(td.sheet, tq.sheet)
                if sheet == "zero":
                    continue
                coeff = bh.multiply(cj, N) * binom
                out.append(Term(k, power, coeff, sheet))
    return NCOperatorSpec(G, D.order + Q.order, out, N=N, check_order=False), exact


# -- symbols ---------------------------------------------------------------


def _swap(group: GroupSpec, g) -> bool:
    return group.orientation(g) < 0


@dataclass(frozen=True, eq=False)
class SymbolPair:
    """``(sigma_+, sigma_-)``: the symbol restricted to ``xi = +1`` and ``xi = -1``.

    The pair is encoded as the ``2 x 2`` crossed element
    ``A(g) = Pi(g) diag(sigma_+(g), sigma_-(g))`` where ``Pi(g)`` swaps the two
    components when ``g`` reverses orientation. Since such ``g`` also swap the
    two cosphere circles, products and inverses of pairs become ordinary
    matrix crossed-product arithmetic.
    """

    plus: CrossedElement
    minus: CrossedElement
    elliptic: bool = False

    def __post_init__(self):
        self.plus._check(self.minus)

    @property
    def group(self) -> GroupSpec:
        return self.plus.group

    @property
    def N(self) -> int:
        return self.plus.N

    def to_matrix(self) -> CrossedElement:
        G, n = self.group, self.plus.rank
        keys = sorted(set(self.plus.support) | set(self.minus.support))
        data = {}
        for g in keys:
            a, b = self.plus.component(g), self.minus.component(g)
            blk = np.zeros((2 * n, 2 * n, 2 * self.N + 1), dtype=complex)
            if _swap(G, g):
                blk[n:, :n], blk[:n, n:] = a, b
            else:
                blk[:n, :n], blk[n:, n:] = a, b
            data[g] = blk
        return CrossedElement(G, self.N, data, rank=2 * n, cap=self.plus.cap)

    @classmethod
    def from_matrix(cls, A: CrossedElement, elliptic: bool = False) -> "SymbolPair":
        G, n = A.group, A.rank // 2
        plus, minus = {}, {}
        for g, v in A.items():
            if _swap(G, g):
                plus[g], minus[g] = v[n:, :n], v[:n, n:]
            else:
                plus[g], minus[g] = v[:n, :n], v[n:, n:]
        return cls(CrossedElement(G, A.N, plus, rank=n, cap=A.cap),
                   CrossedElement(G, A.N, minus, rank=n, cap=A.cap), elliptic)

    @classmethod
    def constant(cls, group: GroupSpec, N: int, value=1.0) -> "SymbolPair":
        one = CrossedElement.identity(group, N) * value
        return cls(one, one)

    def __matmul__(self, other: "SymbolPair") -> "SymbolPair":
        return SymbolPair.from_matrix(cp_mul(self.to_matrix(), other.to_matrix()))

    def __add__(self, other):
        return SymbolPair(self.plus + other.plus, self.minus + other.minus)

    def __sub__(self, other):
        return SymbolPair(self.plus - other.plus, self.minus - other.minus)

    def __mul__(self, s):
        return SymbolPair(self.plus * s, self.minus * s)

    __rmul__ = __mul__

    def resize(self, N: int) -> "SymbolPair":
        return SymbolPair(self.plus.resize(N), self.minus.resize(N), self.elliptic)

    def norm(self) -> float:
        return max(cp_seminorm(self.plus), cp_seminorm(self.minus))

    def distance(self, other: "SymbolPair") -> float:
        return (self - other).norm()


def principal_symbol(op: NCOperatorSpec) -> SymbolPair:
    """``sigma_+(g) = sum b_{g,m}`` and ``sigma_-(g) = (-1)^m sum b_{g,m}`` over top-order terms."""
    G, N, m = op.group, op.N, op.order
    plus: dict = {}
    minus: dict = {}
    for t in op.terms:
        if t.l != m:
            continue
        c = t.coeff.coeffs
        if t.sheet in (None, "+"):
            plus[t.g] = plus.get(t.g, 0) + c
        if t.sheet in (None, "-"):
            minus[t.g] = minus.get(t.g, 0) + c * (-1) ** (m % 2)
    return SymbolPair(CrossedElement(G, N, plus, rank=1), CrossedElement(G, N, minus, rank=1))


@dataclass(frozen=True)
class EllipticityResult:
    elliptic: bool
    parametrix: SymbolPair | None
    residual: float
    neumann_residual: float | None
    dense_residual: float | None
    strategy: str | None


def is_elliptic(sigma: SymbolPair, tol: float = 1e-10) -> EllipticityResult:
    """Invert the symbol; ``NotInvertibleError`` propagates when neither strategy succeeds."""
    res = invert(sigma.to_matrix(), tol)
    par = SymbolPair.from_matrix(res.inverse, elliptic=True)
    return EllipticityResult(True, par, res.residual, res.neumann_residual, res.dense_residual, res.strategy)


def mark_elliptic(sigma: SymbolPair, tol: float = 1e-10) -> tuple[SymbolPair, SymbolPair]:
    """Return the certified symbol and its inverse."""
    r = is_elliptic(sigma, tol)
    return SymbolPair(sigma.plus, sigma.minus, True), r.parametrix


def parametrix_operator(op: NCOperatorSpec, tol: float = 1e-10) -> NCOperatorSpec:
    """Order ``-m`` operator with symbol ``sigma(op)^{-1}``, for rotation groups.

    Built as ``sum_g T(g) [q_+(g) Pi+ + (-1)^m q_-(g) Pi-] kappa^{-m}``.
    """
    G = op.group
    if G.kind == "reflection":
        raise DomainError("operator-level parametrix needs an orientation preserving action")
    _, inv = mark_elliptic(principal_symbol(op), tol)
    m = op.order
    terms = []
    for sheet, part, sgn in (("+", inv.plus, 1), ("-", inv.minus, (-1) ** (m % 2))):
        for g, v in part.items():
            terms.append(Term(g, -m, PeriodicFunction(G.L, v[0, 0] * sgn), sheet))
    return NCOperatorSpec(G, -m, terms, N=op.N)
