"""Discrete groups acting isometrically on a circle of circumference ``L``.

Three families are supported:

* ``lattice``: ``Z^n`` acting by rotations, ``g(x) = x + sum_i g_i * shift_i``;
* ``reflection``: ``Z_2 = {e, r}`` with ``r(x) = -x``;
* ``cyclic``: ``Z_m`` acting by rotation through ``L/m``.

Group elements are canonical tuples of ints so that equality and hashing are
exact: integer vectors for lattices, ``(0,)``/``(1,)`` for the reflection
group and residues ``(r,)`` for cyclic groups.

Shifts are stored unreduced. Only pullbacks reduce them modulo ``L``; the
commutator with the coordinate function needs the true displacement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from ..errors import DomainError

Element = tuple[int, ...]

LATTICE = "lattice"
REFLECTION = "reflection"
CYCLIC = "cyclic"


@dataclass(frozen=True)
class GroupSpec:
    kind: str
    L: float = 2 * math.pi
    shifts: tuple[float, ...] = ()
    order: int = 0
    labels: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.L <= 0:
            raise DomainError("circumference must be positive")
        if self.kind == LATTICE:
            if not self.shifts:
                raise DomainError("lattice group needs at least one generator shift")
        elif self.kind == REFLECTION:
            object.__setattr__(self, "order", 2)
        elif self.kind == CYCLIC:
            if self.order < 1:
                raise DomainError("cyclic group order must be >= 1")
        else:
            raise DomainError(f"unknown group kind {self.kind!r}")

    # -- structure ---------------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.shifts) if self.kind == LATTICE else 1

    @property
    def is_finite(self) -> bool:
        return self.kind != LATTICE

    @property
    def is_torsion_free(self) -> bool:
        return self.kind == LATTICE or self.order == 1

    @property
    def size(self) -> int | None:
        return None if self.kind == LATTICE else self.order

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def canonical(self, g) -> Element:
        if isinstance(g, int):
            g = (g,)
        g = tuple(int(v) for v in g)
        if len(g) != self.rank:
            raise DomainError(f"element {g} has wrong length for {self.kind} group")
        if self.kind != LATTICE:
            g = (g[0] % self.order,)
        return g

    def contains(self, g) -> bool:
        try:
            g = tuple(int(v) for v in g)
        except TypeError:
            return False
        if len(g) != self.rank:
            return False
        return self.kind == LATTICE or 0 <= g[0] < self.order

    def mul(self, g: Element, h: Element) -> Element:
        if self.kind == LATTICE:
            return tuple(a + b for a, b in zip(g, h))
        return ((g[0] + h[0]) % self.order,)

    def inv(self, g: Element) -> Element:
        if self.kind == LATTICE:
            return tuple(-a for a in g)
        return ((-g[0]) % self.order,)

    def norm(self, g: Element) -> int:
        """Word norm: l1 norm on lattices, distance to 0 in the cyclic word metric otherwise."""
        if self.kind == LATTICE:
            return sum(abs(a) for a in g)
        r = g[0] % self.order
        return min(r, self.order - r)

    def elements(self) -> Iterator[Element]:
        if self.kind == LATTICE:
            raise DomainError("cannot enumerate an infinite group")
        for r in range(self.order):
            yield (r,)

    def ball(self, radius: int) -> list[Element]:
        """All elements of word norm <= radius, in lexicographic order."""
        if self.kind != LATTICE:
            return [g for g in self.elements() if self.norm(g) <= radius]
        out: list[Element] = [()]
        for _ in range(self.rank):
            out = [p + (a,) for p in out for a in range(-radius, radius + 1)]
        return sorted(g for g in out if self.norm(g) <= radius)

    def conjugacy_class(self, g: Element) -> list[Element]:
        # every supported group is abelian
        return [self.canonical(g)]

    def centralizer(self, g: Element) -> list[Element]:
        return list(self.elements())

    # -- action on the circle ---------------------------------------------

    def action(self, g: Element) -> tuple[int, float]:
        """Return ``(sign, shift)`` with ``g(x) = sign * x + shift``."""
        if self.kind == LATTICE:
            return 1, float(sum(a * s for a, s in zip(g, self.shifts)))
        if self.kind == REFLECTION:
            return (-1, 0.0) if g[0] % 2 else (1, 0.0)
        return 1, (g[0] % self.order) * self.L / self.order

    def orientation(self, g: Element) -> int:
        return self.action(g)[0]

    def displacement(self, g: Element) -> float:
        """Unreduced rotation amount of a lattice element."""
        if self.kind != LATTICE:
            raise DomainError("displacement is only defined for lattice actions")
        return self.action(g)[1]

    def fixed_points(self, g: Element) -> str | list[float]:
        """Fixed-point set of ``g``: ``"circle"``, an explicit point list, or ``[]``.

        Computed analytically. An irrational rotation fixes nothing; a lattice
        element whose shift is a multiple of ``L`` fixes everything.
        """
        sign, shift = self.action(self.canonical(g))
        if sign == -1:
            return [0.0, self.L / 2]
        red = math.remainder(shift, self.L)
        if abs(red) <= 1e-12 * self.L:
            return "circle"
        return []


def lattice(shifts, L: float = 2 * math.pi, labels=()) -> GroupSpec:
    shifts = tuple(float(s) for s in (shifts if hasattr(shifts, "__len__") else [shifts]))
    return GroupSpec(LATTICE, L=float(L), shifts=shifts, labels=tuple(labels))


def reflection(L: float = 2 * math.pi) -> GroupSpec:
    return GroupSpec(REFLECTION, L=float(L), labels=("r",))


def cyclic(m: int, L: float = 2 * math.pi) -> GroupSpec:
    return GroupSpec(CYCLIC, L=float(L), order=int(m))


def torus_action(theta: float) -> GroupSpec:
    """Z acting on the circle of circumference ``theta``; ``T(1)`` is ``(Uf)(x) = f(x + 1)``.

    ``T(g)u = u o g^{-1}``, so ``U = T(1)`` needs ``g_1(x) = x - 1``.
    """
    if not 0 < theta <= 1:
        raise DomainError("theta must lie in (0, 1]")
    return GroupSpec(LATTICE, L=float(theta), shifts=(-1.0,), labels=("U",))


def is_torus_action(group: GroupSpec) -> bool:
    return group.kind == LATTICE and group.shifts == (-1.0,)
