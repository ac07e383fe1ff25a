"""Characters of finite abelian groups and exact character sums.

A character is stored by its images on the standard generators:
``chi(e_j) = exp(2*pi*i * images[j] / n_j)``. The dual group is enumerated in
the same mixed-radix order as the group itself, so the principal character
comes first.

Character sums are exact Gaussian integers whenever the character has order
dividing 4 (every character of a group of exponent dividing 4), and complex
doubles otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .errors import GroupMismatch, InvalidArgument, InvalidSubgroup, UnsupportedGroup
from .groups import ElementSet, FinAbGroup, GroupElement, Subgroup, _to_index, frattini_and_socle

APPROX_TOL = 1e-6

_RE4 = np.array([1, 0, -1, 0], dtype=np.int64)
_IM4 = np.array([0, 1, 0, -1], dtype=np.int64)


@dataclass(frozen=True)
class CycloValue:
    """A character value or character sum.

    ``exact`` values carry integer parts (an element of Z[i]); approximate ones
    carry floats.
    """

    re: int | float
    im: int | float
    exact: bool = True

    @classmethod
    def from_complex(cls, z: complex) -> CycloValue:
        return cls(float(z.real), float(z.imag), False)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __add__(self, other: CycloValue) -> CycloValue:
        return CycloValue(self.re + other.re, self.im + other.im, self.exact and other.exact)

    def __sub__(self, other: CycloValue) -> CycloValue:
        return CycloValue(self.re - other.re, self.im - other.im, self.exact and other.exact)

    def __mul__(self, other: CycloValue) -> CycloValue:
        return CycloValue(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
            self.exact and other.exact,
        )

    def conjugate(self) -> CycloValue:
        return CycloValue(self.re, -self.im, self.exact)

    def abs2(self) -> int | float:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def is_zero(self, tol: float = APPROX_TOL) -> bool:
        if self.exact:
            return self.re == 0 and self.im == 0
        return abs(self) <= tol

    def divisible_by(self, l: int) -> bool:
        """Componentwise divisibility by ``l`` in Z[i] (exact values only)."""
        if not self.exact:
            raise UnsupportedGroup("divisibility is only defined for exact values")
        return self.re % l == 0 and self.im % l == 0

    def to_json(self) -> dict:
        return {"re": self.re, "im": self.im, "exact": self.exact}


@dataclass(frozen=True)
class Character:
    parent: FinAbGroup
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.parent.rank:
            raise InvalidArgument("image tuple length does not match group rank")
        reduced = tuple(int(a) % n for a, n in zip(self.images, self.parent.factor_orders))
        object.__setattr__(self, "images", reduced)

    @property
    def order(self) -> int:
        return math.lcm(1, *(n // math.gcd(a, n) for a, n in zip(self.images, self.parent.factor_orders)))

    def is_principal(self) -> bool:
        return not any(self.images)

    def phases(self, elements) -> np.ndarray:
        """Numerators ``p`` with ``chi(g) = exp(2 pi i p / exponent)``."""
        return _phase_matrix(self.parent, np.array([self.images]), np.atleast_1d(elements))[0]

    def __call__(self, g) -> CycloValue:
        idx = _to_index(self.parent, g)
        return char_sum(self, ElementSet(self.parent, (idx,)))

    def __mul__(self, other: Character) -> Character:
        if other.parent != self.parent:
            raise GroupMismatch("characters of different groups")
        return Character(self.parent, tuple(a + b for a, b in zip(self.images, other.images)))

    def conjugate(self) -> Character:
        return Character(self.parent, tuple(-a for a in self.images))

    def is_principal_on(self, sub: ElementSet) -> bool:
        if sub.parent != self.parent:
            raise GroupMismatch("subgroup of a different group")
        return not self.phases(sub.array).any()

    def in_frattini_dual(self) -> bool:
        """Membership in Phi(G^): principal on every element of order <= 2."""
        _, socle = frattini_and_socle(self.parent)
        return self.is_principal_on(socle)

    def restrict(self, sub: Subgroup) -> SubgroupCharacter:
        return SubgroupCharacter(sub, tuple(self.phases(sub.array).tolist()))

    @property
    def index(self) -> int:
        return self.parent.index(self.images)


@dataclass(frozen=True)
class SubgroupCharacter:
    """A character of a subgroup ``H <= G`` given by its phase on each element of H.

    Phases are numerators over ``G.exponent`` aligned with ``subgroup.elements``.
    """

    subgroup: Subgroup
    phases: tuple[int, ...]

    def is_principal(self) -> bool:
        return not any(self.phases)


@dataclass(frozen=True)
class CharacterInfo:
    order: int
    principal_on: bool | None
    in_frattini_dual: bool


def _phase_matrix(group: FinAbGroup, images: np.ndarray, elements: np.ndarray) -> np.ndarray:
    L = group.exponent
    if group.rank == 0:
        return np.zeros((len(images), len(elements)), dtype=np.int64)
    scale = np.array([L // n for n in group.factor_orders], dtype=np.int64)
    return ((images * scale) @ group.digits[elements].T) % L


def all_character_images(group: FinAbGroup) -> np.ndarray:
    """Image tuples of every character, principal first; shape ``(|G|, rank)``."""
    return group.digits


def enumerate_characters(group: FinAbGroup) -> list[Character]:
    return [Character(group, tuple(int(x) for x in row)) for row in group.digits]


def character(group: FinAbGroup, index: int) -> Character:
    return Character(group, group.exponents(index))


def order2_character_indices(group: FinAbGroup) -> np.ndarray:
    """Indices of characters of order exactly 2, in canonical order."""
    imgs = group.digits
    orders = np.array(group.factor_orders)
    ok = ((2 * imgs) % orders == 0).all(axis=1) & imgs.any(axis=1)
    return np.flatnonzero(ok)


def gaussian_sums(group: FinAbGroup, elements: np.ndarray, chars: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Exact sums over ``elements`` for characters ``chars`` (default: all).

    ``elements`` may be 1-d (one set) or 2-d (one set per row); results have a
    leading character axis. Requires every character involved to have order
    dividing 4.
    """
    if chars is None and not group.exponent_divides(4):
        raise UnsupportedGroup(f"{group.descriptor} has exponent {group.exponent}; exact sums need exponent | 4")
    imgs = group.digits if chars is None else group.digits[np.asarray(chars)]
    if chars is not None and not group.exponent_divides(4):
        orders = np.array(group.factor_orders)
        if ((4 * imgs) % orders).any():
            raise UnsupportedGroup("character order does not divide 4")
    elements = np.asarray(elements, dtype=np.int64)
    flat = elements.reshape(-1)
    P4 = (_phase_matrix(group, imgs, flat) * 4) // group.exponent
    P4 = P4.reshape((len(imgs),) + elements.shape)
    return _RE4[P4].sum(axis=-1), _IM4[P4].sum(axis=-1)


def complex_sums(group: FinAbGroup, elements: np.ndarray, chars: np.ndarray | None = None) -> np.ndarray:
    """Floating-point sums (any group); same shapes as :func:`gaussian_sums`."""
    imgs = group.digits if chars is None else group.digits[np.asarray(chars)]
    elements = np.asarray(elements, dtype=np.int64)
    P = _phase_matrix(group, imgs, elements.reshape(-1))
    vals = np.exp(2j * np.pi * P / group.exponent).reshape((len(imgs),) + elements.shape)
    return vals.sum(axis=-1)


def iter_character_chunks(group: FinAbGroup, chunk: int = 4096) -> Iterator[np.ndarray]:
    for start in range(0, group.order, chunk):
        yield np.arange(start, min(start + chunk, group.order))


def char_sum(chi: Character, es: ElementSet) -> CycloValue:
    """``chi(E) = sum of chi(g) over g in E``."""
    if es.parent != chi.parent:
        raise GroupMismatch("character and set belong to different groups")
    group = chi.parent
    if 4 % chi.order == 0:
        P = _phase_matrix(group, np.array([chi.images]), es.array)[0]
        P4 = (P * 4) // group.exponent
        return CycloValue(int(_RE4[P4].sum()), int(_IM4[P4].sum()), True)
    P = _phase_matrix(group, np.array([chi.images]), es.array)[0]
    return CycloValue.from_complex(complex(np.exp(2j * np.pi * P / group.exponent).sum()))


def restrict_extend(chi_h: SubgroupCharacter, group: FinAbGroup | None = None) -> list[Character]:
    """All characters of G whose restriction to H equals ``chi_h``.

    There are exactly ``|G/H|`` of them, listed in canonical order.
    """
    sub = chi_h.subgroup
    group = sub.parent if group is None else group
    if sub.parent != group:
        raise InvalidSubgroup("the subgroup does not lie in this group")
    if not sub.is_subgroup():
        raise InvalidSubgroup("restriction domain is not a subgroup")
    target = np.array(chi_h.phases, dtype=np.int64)
    found: list[Character] = []
    for chunk in iter_character_chunks(group):
        P = _phase_matrix(group, group.digits[chunk], sub.array)
        hits = chunk[(P == target[None, :]).all(axis=1)]
        found.extend(character(group, int(i)) for i in hits)
    return found


def subgroup_dual(sub: Subgroup) -> list[SubgroupCharacter]:
    """The distinct restrictions of characters of G to ``sub`` (i.e. the dual of H)."""
    group = sub.parent
    P = _phase_matrix(group, group.digits, sub.array)
    uniq = np.unique(P, axis=0)
    return [SubgroupCharacter(sub, tuple(row.tolist())) for row in uniq]


def character_tools(chi: Character, sub: ElementSet | None = None) -> CharacterInfo:
    return CharacterInfo(
        order=chi.order,
        principal_on=None if sub is None else chi.is_principal_on(sub),
        in_frattini_dual=chi.in_frattini_dual(),
    )


def joint_nontrivial_character(g1: GroupElement, g2: GroupElement) -> Character:
    """A character that is non-trivial on both ``g1`` and ``g2``.

    Scans the dual in canonical order; one always exists for non-identity inputs.
    """
    if g1.group != g2.group:
        raise GroupMismatch("elements belong to different groups")
    if g1.is_identity() or g2.is_identity():
        raise InvalidArgument("both elements must be non-identity")
    group = g1.group
    P = _phase_matrix(group, group.digits, np.array([g1.index, g2.index]))
    ok = np.flatnonzero((P != 0).all(axis=1))
    return character(group, int(ok[0]))


def principal_on_mask(group: FinAbGroup, sub: ElementSet) -> np.ndarray:
    """Boolean mask over the dual: which characters are principal on ``sub``."""
    P = _phase_matrix(group, group.digits, sub.array)
    return ~P.any(axis=1)


def unit_value(chi: Character, g) -> complex:
    """``chi(g)`` as a Python complex number."""
    p = int(chi.phases(np.array([_to_index(chi.parent, g)]))[0])
    return cmath.exp(2j * cmath.pi * p / chi.parent.exponent)


def congruent_mod(re: np.ndarray, im: np.ndarray, modulus: int) -> bool:
    return bool((re % modulus == 0).all() and (im % modulus == 0).all())


def chars_of_set(group: FinAbGroup, elements: Iterable[int]) -> tuple[np.ndarray, np.ndarray]:
    return gaussian_sums(group, np.fromiter(elements, dtype=np.int64))
