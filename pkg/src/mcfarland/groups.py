"""Finite abelian groups given as products of cyclic factors.

Elements are addressed by a mixed-radix index over ``factor_orders`` with the
first factor most significant, so ``Z4 x Z2`` enumerates
``(0,0), (0,1), (1,0), (1,1), (2,0), ...``. Every dense table in the package
(group-ring coefficients, character tables, coset labels) uses this order.
Group law is written multiplicatively in docstrings and additively in code.
"""

from __future__ import annotations

import math
import re
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce

import numpy as np
from sympy import Matrix, ZZ, factorint
from sympy.matrices.normalforms import smith_normal_decomp

from .errors import GroupMismatch, InvalidDescriptor, InvalidSubgroup, UnsupportedGroup

__all__ = [
    "FinAbGroup",
    "GroupElement",
    "ElementSet",
    "Subgroup",
    "Coset",
    "QuotientMap",
    "make_group",
    "parse_descriptor",
    "format_descriptor",
    "subgroup_generate",
    "frattini_and_socle",
    "quotient",
    "coset_labels",
    "is_transversal",
    "stabilizer",
    "subgroups_of_order",
    "all_subgroups",
    "isomorphism_type",
    "as_subgroup",
    "automorphism_generators",
    "subgroup_orbits",
]


def _lcm(values: Iterable[int]) -> int:
    return reduce(math.lcm, values, 1)


def _is_prime_power(n: int) -> bool:
    return n >= 2 and len(factorint(n)) == 1


@dataclass(frozen=True)
class FinAbGroup:
    """``Z_{n_1} x ... x Z_{n_r}``; immutable, compared by its factor orders."""

    factor_orders: tuple[int, ...]

    @property
    def order(self) -> int:
        return math.prod(self.factor_orders)

    @property
    def exponent(self) -> int:
        return _lcm(self.factor_orders)

    @property
    def rank(self) -> int:
        return len(self.factor_orders)

    @property
    def descriptor(self) -> str:
        return format_descriptor(self.factor_orders)

    def __repr__(self) -> str:
        return f"FinAbGroup({self.descriptor})"

    def __len__(self) -> int:
        return self.order

    @cached_property
    def _orders(self) -> np.ndarray:
        return np.array(self.factor_orders, dtype=np.int64)

    @cached_property
    def _weights(self) -> np.ndarray:
        w = np.ones(self.rank, dtype=np.int64)
        for j in range(self.rank - 2, -1, -1):
            w[j] = w[j + 1] * self.factor_orders[j + 1]
        return w

    @cached_property
    def digits(self) -> np.ndarray:
        """Exponent tuples of all elements, shape ``(order, rank)``."""
        idx = np.arange(self.order, dtype=np.int64)
        return (idx[:, None] // self._weights[None, :]) % self._orders[None, :]

    def is_2group(self) -> bool:
        return all(n & (n - 1) == 0 for n in self.factor_orders)

    def exponent_divides(self, n: int) -> bool:
        return n % self.exponent == 0

    # -- index arithmetic (vectorised over numpy arrays) -------------------

    def ravel(self, exps) -> np.ndarray | int:
        exps = np.asarray(exps, dtype=np.int64) % self._orders
        out = exps @ self._weights if self.rank else np.zeros(exps.shape[:-1], dtype=np.int64)
        return int(out) if np.ndim(out) == 0 else out

    def index(self, exps: Sequence[int]) -> int:
        if len(exps) != self.rank:
            raise InvalidDescriptor(f"expected {self.rank} exponents, got {len(exps)}")
        return int(self.ravel(exps))

    def exponents(self, idx: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.digits[int(idx)])

    def mul(self, a, b):
        out = self.ravel(self.digits[a] + self.digits[b])
        return out

    def inv(self, a):
        return self.ravel(-self.digits[a])

    def power(self, a, t):
        t = np.asarray(t, dtype=np.int64)
        return self.ravel(self.digits[a] * t[..., None] if t.ndim else self.digits[a] * int(t))

    def element_order(self, a):
        d = self.digits[a]
        o = self._orders // np.gcd(d, self._orders)
        out = np.lcm.reduce(o, axis=-1) if self.rank else np.ones(np.shape(a), dtype=np.int64)
        return int(out) if np.ndim(out) == 0 else out

    # -- convenience constructors -----------------------------------------

    def element(self, exps: Sequence[int] | int) -> GroupElement:
        if isinstance(exps, (int, np.integer)):
            return GroupElement(self, self.exponents(exps))
        return GroupElement(self, tuple(int(x) for x in exps))

    @property
    def identity(self) -> GroupElement:
        return GroupElement(self, (0,) * self.rank)

    def subgroup(self, gens: Iterable) -> Subgroup:
        return _generate(self, [_to_index(self, g) for g in gens])

    def whole(self) -> Subgroup:
        gens = [self.index(tuple(1 if k == j else 0 for k in range(self.rank))) for j in range(self.rank)]
        return Subgroup(self, tuple(range(self.order)), tuple(gens))

    def trivial(self) -> Subgroup:
        return Subgroup(self, (0,), ())

    def element_set(self, elements: Iterable) -> ElementSet:
        return ElementSet(self, tuple(_to_index(self, e) for e in elements))


def _to_index(group: FinAbGroup, e) -> int:
    if isinstance(e, GroupElement):
        if e.group != group:
            raise GroupMismatch(f"element of {e.group.descriptor} used in {group.descriptor}")
        return e.index
    if isinstance(e, (int, np.integer)):
        if not 0 <= int(e) < group.order:
            raise InvalidDescriptor(f"element index {e} out of range for {group.descriptor}")
        return int(e)
    return group.index(tuple(e))


_DESCRIPTOR_TOKEN = re.compile(r"^Z(\d+)(?:\^(\d+))?$")


def parse_descriptor(text: str) -> tuple[int, ...]:
    """Parse ``"Z4^3"`` or ``"Z4xZ2^5xZ5"`` (also a JSON-ish ``"[4,2,2]"``)."""
    text = text.strip().replace(" ", "")
    if text.startswith("["):
        try:
            return tuple(int(x) for x in text.strip("[]").split(",") if x)
        except ValueError as exc:
            raise InvalidDescriptor(f"bad group descriptor {text!r}") from exc
    if text in ("", "1", "Z1"):
        return ()
    orders: list[int] = []
    for token in text.split("x"):
        match = _DESCRIPTOR_TOKEN.match(token)
        if not match:
            raise InvalidDescriptor(f"bad group descriptor token {token!r} in {text!r}")
        n = int(match.group(1))
        reps = int(match.group(2) or 1)
        if reps < 1:
            raise InvalidDescriptor(f"repetition count must be positive in {token!r}")
        orders.extend([n] * reps)
    return tuple(orders)


def format_descriptor(orders: Sequence[int]) -> str:
    if not orders:
        return "Z1"
    parts = []
    i = 0
    while i < len(orders):
        j = i
        while j < len(orders) and orders[j] == orders[i]:
            j += 1
        parts.append(f"Z{orders[i]}" + (f"^{j - i}" if j - i > 1 else ""))
        i = j
    return "x".join(parts)


@lru_cache(maxsize=None)
def _cached_group(orders: tuple[int, ...]) -> FinAbGroup:
    return FinAbGroup(orders)


def make_group(descriptor: str | Sequence[int]) -> FinAbGroup:
    """Build (or fetch the cached) group for a descriptor string or order list.

    >>> make_group("Z4xZ2^5xZ5").order
    640
    """
    orders = parse_descriptor(descriptor) if isinstance(descriptor, str) else tuple(int(n) for n in descriptor)
    for n in orders:
        if n < 2:
            raise InvalidDescriptor(f"cyclic factor order must be >= 2, got {n}")
        if n % 2 == 0 and not _is_prime_power(n):
            raise InvalidDescriptor(f"even factor order {n} must be a power of 2")
    return _cached_group(orders)


@dataclass(frozen=True)
class GroupElement:
    group: FinAbGroup
    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.exponents) != self.group.rank:
            raise InvalidDescriptor("exponent tuple length does not match group rank")
        reduced = tuple(int(e) % n for e, n in zip(self.exponents, self.group.factor_orders))
        object.__setattr__(self, "exponents", reduced)

    @property
    def index(self) -> int:
        return self.group.index(self.exponents)

    def _check(self, other: GroupElement) -> None:
        if not isinstance(other, GroupElement) or other.group != self.group:
            raise GroupMismatch("elements belong to different groups")

    def __mul__(self, other: GroupElement) -> GroupElement:
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def inverse(self) -> GroupElement:
        return GroupElement(self.group, tuple(-a for a in self.exponents))

    def __pow__(self, t: int) -> GroupElement:
        return GroupElement(self.group, tuple(a * t for a in self.exponents))

    @property
    def order(self) -> int:
        return _lcm(n // math.gcd(a, n) for a, n in zip(self.exponents, self.group.factor_orders))

    def is_identity(self) -> bool:
        return not any(self.exponents)

    def __repr__(self) -> str:
        return f"{self.exponents}"


@dataclass(frozen=True)
class ElementSet:
    """A subset of ``parent`` stored as a sorted tuple of element indices."""

    parent: FinAbGroup
    elements: tuple[int, ...]

    def __post_init__(self) -> None:
        elems = tuple(sorted({int(e) for e in self.elements}))
        if elems and (elems[0] < 0 or elems[-1] >= self.parent.order):
            raise InvalidDescriptor("element index out of range")
        object.__setattr__(self, "elements", elems)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, item) -> bool:
        return _to_index(self.parent, item) in self.members

    @cached_property
    def members(self) -> frozenset[int]:
        return frozenset(self.elements)

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)

    def tuples(self) -> list[tuple[int, ...]]:
        return [self.parent.exponents(e) for e in self.elements]

    def translate(self, g) -> ElementSet:
        g = _to_index(self.parent, g)
        return ElementSet(self.parent, tuple(self.parent.mul(g, self.array).tolist()))

    def _same_parent(self, other: ElementSet) -> None:
        if other.parent != self.parent:
            raise GroupMismatch("element sets belong to different groups")

    def intersection(self, other: ElementSet) -> ElementSet:
        self._same_parent(other)
        return ElementSet(self.parent, tuple(self.members & other.members))

    def union(self, other: ElementSet) -> ElementSet:
        self._same_parent(other)
        return ElementSet(self.parent, self.elements + other.elements)

    def difference(self, other: ElementSet) -> ElementSet:
        self._same_parent(other)
        return ElementSet(self.parent, tuple(self.members - other.members))

    def product(self, other: ElementSet) -> ElementSet:
        """Set product ``{xy : x in self, y in other}`` (multiplicities dropped)."""
        self._same_parent(other)
        prods = self.parent.mul(self.array[:, None], other.array[None, :])
        return ElementSet(self.parent, tuple(np.unique(prods).tolist()))

    def is_subgroup(self) -> bool:
        if 0 not in self.members:
            return False
        prods = self.parent.mul(self.array[:, None], self.array[None, :])
        return bool(np.isin(prods, self.array).all())


@dataclass(frozen=True)
class Subgroup(ElementSet):
    """A subgroup: full sorted element list plus generators kept for provenance."""

    generators: tuple[int, ...] = field(default=(), compare=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def generator_tuples(self) -> list[tuple[int, ...]]:
        return [self.parent.exponents(g) for g in self.generators]

    def __repr__(self) -> str:
        return f"Subgroup(order={self.order}, gens={self.generator_tuples()})"

    def join(self, other: Subgroup) -> Subgroup:
        self._same_parent(other)
        return _generate(self.parent, list(self.generators) + list(other.generators))

    def meet(self, other: Subgroup) -> Subgroup:
        return as_subgroup(self.intersection(other))

    def is_elementary(self) -> bool:
        return bool((self.parent.element_order(self.array) <= 2).all())


@dataclass(frozen=True)
class Coset:
    representative: int
    subgroup: Subgroup

    def as_set(self) -> ElementSet:
        return self.subgroup.translate(self.representative)


def _closure(group: FinAbGroup, base: np.ndarray, gens: Iterable[int]) -> np.ndarray:
    elems = base
    present = set(elems.tolist())
    for g in gens:
        if g in present:
            continue
        cyc = group.power(g, np.arange(group.element_order(g)))
        elems = np.unique(group.mul(elems[:, None], cyc[None, :]))
        present = set(elems.tolist())
    return elems


def _generate(group: FinAbGroup, gens: list[int]) -> Subgroup:
    elems = _closure(group, np.zeros(1, dtype=np.int64), gens)
    return Subgroup(group, tuple(elems.tolist()), _minimal_generators(group, elems, gens))


def _minimal_generators(group: FinAbGroup, elems: np.ndarray, hint: Sequence[int] = ()) -> tuple[int, ...]:
    """Greedy generating set: hint first, then elements by decreasing order."""
    target = len(elems)
    cur = np.zeros(1, dtype=np.int64)
    chosen: list[int] = []
    orders = group.element_order(elems)
    pool = list(hint) + [int(e) for e in elems[np.argsort(-orders, kind="stable")]]
    for g in pool:
        if len(cur) == target:
            break
        if g in set(cur.tolist()):
            continue
        cur = _closure(group, cur, [g])
        chosen.append(int(g))
    return tuple(chosen)


def as_subgroup(es: ElementSet) -> Subgroup:
    """Promote a closed :class:`ElementSet` to a :class:`Subgroup`."""
    if isinstance(es, Subgroup):
        if not es.generators and es.order > 1:
            return Subgroup(es.parent, es.elements, _minimal_generators(es.parent, es.array))
        return es
    if not es.is_subgroup():
        raise InvalidSubgroup("element set is not a subgroup")
    return Subgroup(es.parent, es.elements, _minimal_generators(es.parent, es.array))


def subgroup_generate(gens: Sequence[GroupElement], group: FinAbGroup | None = None) -> Subgroup:
    """Smallest subgroup containing ``gens``."""
    if group is None:
        if not gens:
            raise InvalidSubgroup("need a group or at least one generator")
        group = gens[0].group
    return group.subgroup(gens)


def frattini_and_socle(group: FinAbGroup) -> tuple[Subgroup, Subgroup]:
    """Return ``(Phi(G), Omega_1(G))``: the squares and the elements of order <= 2."""
    if not group.is_2group():
        raise UnsupportedGroup(f"{group.descriptor} is not a 2-group")
    allel = np.arange(group.order)
    squares = np.unique(group.power(allel, 2))
    socle = allel[group.element_order(allel) <= 2]
    return (
        Subgroup(group, tuple(squares.tolist()), _minimal_generators(group, squares)),
        Subgroup(group, tuple(socle.tolist()), _minimal_generators(group, socle)),
    )


@dataclass(frozen=True, eq=False)
class QuotientMap:
    """Surjection ``source -> target`` with kernel ``kernel``.

    Built from a Smith normal form ``S = U M V`` of the relation matrix ``M``
    (cyclic relations stacked on the kernel generators): ``x -> x V`` sends the
    relation lattice onto ``diag(S)``, and each invariant factor is then split
    into prime-power components.
    """

    source: FinAbGroup
    target: FinAbGroup
    kernel: Subgroup
    _basis: np.ndarray
    _components: tuple[tuple[int, int], ...]

    def __call__(self, x):
        if isinstance(x, GroupElement):
            return self.target.element(int(self(np.int64(x.index))))
        if isinstance(x, ElementSet):
            return ElementSet(self.target, tuple(np.asarray(self(x.array)).tolist()))
        y = self.source.digits[x] @ self._basis
        comps = [y[..., col] % q for col, q in self._components]
        if not comps:
            return np.zeros(np.shape(x), dtype=np.int64) if np.ndim(x) else 0
        out = self.target.ravel(np.stack(comps, axis=-1))
        return out

    def image_multiset(self, es: ElementSet) -> np.ndarray:
        """Coefficient vector of the pushforward of ``es`` (multiplicities kept)."""
        return np.bincount(np.asarray(self(es.array)), minlength=self.target.order)

    def preimage(self, es: ElementSet) -> ElementSet:
        img = np.asarray(self(np.arange(self.source.order)))
        return ElementSet(self.source, tuple(np.flatnonzero(np.isin(img, es.array)).tolist()))


def quotient(group: FinAbGroup, sub: ElementSet) -> QuotientMap:
    """``G/H`` in canonical primary form together with the projection."""
    if sub.parent != group:
        raise GroupMismatch("subgroup does not belong to this group")
    try:
        sub = as_subgroup(sub)
    except InvalidSubgroup as exc:
        raise InvalidSubgroup("quotient needs a subgroup") from exc
    rows = [[n if k == j else 0 for k in range(group.rank)] for j, n in enumerate(group.factor_orders)]
    rows += [list(group.exponents(g)) for g in sub.generators]
    if group.rank == 0:
        return QuotientMap(group, make_group(()), sub, np.zeros((0, 0), dtype=np.int64), ())
    S, _, V = smith_normal_decomp(Matrix(rows), domain=ZZ)
    basis = np.array(V.tolist(), dtype=np.int64)
    comps: list[tuple[int, int, int]] = []  # (prime, power, column)
    for col in range(group.rank):
        d = abs(int(S[col, col]))
        if d <= 1:
            continue
        for p, a in sorted(factorint(d).items()):
            comps.append((p, p**a, col))
    comps.sort(key=lambda c: (c[0], -c[1], c[2]))
    target = make_group([q for _, q, _ in comps])
    qmap = QuotientMap(group, target, sub, basis, tuple((col, q) for _, q, col in comps))
    return qmap


def coset_labels(sub: ElementSet) -> np.ndarray:
    """``labels[g]`` = smallest element index of the coset ``g*sub``."""
    group = sub.parent
    allel = np.arange(group.order)
    return group.mul(allel[:, None], sub.array[None, :]).min(axis=1)


def is_transversal(es: ElementSet, sub: ElementSet) -> bool:
    """True iff ``es`` meets every coset of ``sub`` exactly once."""
    if es.parent != sub.parent:
        raise GroupMismatch("transversal and subgroup belong to different groups")
    if len(es) * len(sub) != es.parent.order:
        return False
    labels = coset_labels(sub)[es.array]
    return len(np.unique(labels)) == len(es)


def stabilizer(es: ElementSet) -> Subgroup:
    """``{g : gE = E}``; always a subgroup."""
    if not len(es):
        raise InvalidSubgroup("stabilizer of the empty set is undefined here")
    group = es.parent
    e0 = es.elements[0]
    cands = group.mul(es.array, group.inv(e0))
    keep = [0]
    for g in np.unique(cands):
        if g == 0:
            continue
        if np.isin(group.mul(g, es.array), es.array).all():
            keep.append(int(g))
    elems = np.array(sorted(keep), dtype=np.int64)
    return Subgroup(group, tuple(elems.tolist()), _minimal_generators(group, elems))


def _subgroup_search(group: FinAbGroup, target: int | None, allowed: np.ndarray | None) -> list[Subgroup]:
    mask = np.ones(group.order, dtype=bool) if allowed is None else allowed
    start = np.zeros(1, dtype=np.int64)
    seen = {(0,)}
    frontier = [start]
    found: list[np.ndarray] = [start] if target in (None, 1) else []
    allel = np.arange(group.order)
    while frontier:
        nxt = []
        for sub in frontier:
            labels = group.mul(allel[:, None], sub[None, :]).min(axis=1)
            cand = np.flatnonzero(mask)
            _, first = np.unique(labels[cand], return_index=True)
            inside = set(sub.tolist())
            for g in cand[first]:
                if int(g) in inside:
                    continue
                grown = _closure(group, sub, [int(g)])
                if target is not None and len(grown) > target:
                    continue
                if not mask[grown].all():
                    continue
                key = tuple(grown.tolist())
                if key in seen:
                    continue
                seen.add(key)
                if target is None or len(grown) == target:
                    found.append(grown)
                if target is None or len(grown) < target:
                    nxt.append(grown)
        frontier = nxt
    found.sort(key=lambda a: (len(a), tuple(a.tolist())))
    return [Subgroup(group, tuple(a.tolist()), _minimal_generators(group, a)) for a in found]


def subgroups_of_order(group: FinAbGroup, order: int, within: ElementSet | None = None) -> list[Subgroup]:
    """All subgroups of the given order, optionally only those contained in ``within``.

    Breadth-first growth by one generator at a time, deduplicated on the
    sorted element set. Output is sorted by element tuple.
    """
    if group.order % order:
        return []
    allowed = None
    if within is not None:
        allowed = np.zeros(group.order, dtype=bool)
        allowed[within.array] = True
        if not allowed[0]:
            return []
    return _subgroup_search(group, order, allowed)


def all_subgroups(group: FinAbGroup) -> list[Subgroup]:
    return _subgroup_search(group, None, None)


def isomorphism_type(sub: ElementSet, modulo: ElementSet | None = None) -> tuple[int, ...]:
    """Prime-power invariants of ``sub`` (or of ``sub/modulo``), canonical order.

    Uses ``|Omega_k|``: for an abelian p-group of type ``(p^a_i)`` the number of
    elements killed by ``p^k`` is ``p^(sum_i min(a_i, k))``.
    """
    group = sub.parent
    elems = sub.array
    kern = np.zeros(1, dtype=np.int64) if modulo is None else modulo.array
    if modulo is not None and not set(kern.tolist()) <= set(elems.tolist()):
        raise InvalidSubgroup("modulus is not contained in the group")
    n = len(elems) // len(kern)
    out: list[tuple[int, int]] = []
    for p, total in sorted(factorint(n).items()) if n > 1 else []:
        logs = [0]
        k = 1
        while logs[-1] < total:
            hits = np.isin(group.power(elems, p**k), kern).sum() // len(kern)
            logs.append(round(math.log(int(hits), p)))
            k += 1
        ge = [logs[k] - logs[k - 1] for k in range(1, len(logs))]  # factors with a_i >= k
        for k in range(len(ge)):
            exact = ge[k] - (ge[k + 1] if k + 1 < len(ge) else 0)
            out.extend([(p, k + 1)] * exact)
    out.sort(key=lambda t: (t[0], -t[1]))
    return tuple(p**a for p, a in out)


def automorphism_generators(group: FinAbGroup) -> list[np.ndarray]:
    """Elementary automorphisms as index permutations.

    Transvections ``e_i -> e_i + c e_j`` (smallest admissible ``c``), sign
    changes ``e_i -> -e_i`` and swaps of equal factors. Each is a genuine
    automorphism, so orbits under them never merge inequivalent objects.
    """
    orders = group.factor_orders
    r = group.rank
    mats = []
    eye = np.eye(r, dtype=np.int64)
    for i in range(r):
        for j in range(r):
            if i == j:
                continue
            c = orders[j] // math.gcd(orders[i], orders[j])
            if c % orders[j] == 0:
                continue
            m = eye.copy()
            m[i, j] = c
            mats.append(m)
        if orders[i] > 2:
            m = eye.copy()
            m[i, i] = orders[i] - 1
            mats.append(m)
    for i in range(r - 1):
        if orders[i] == orders[i + 1]:
            m = eye.copy()
            m[[i, i + 1]] = m[[i + 1, i]]
            mats.append(m)
    mods = np.array(orders, dtype=np.int64)
    return [group.ravel((group.digits @ m) % mods) for m in mats]


def subgroup_orbits(subs: Sequence[ElementSet], perms: Sequence[np.ndarray]) -> list[list[int]]:
    """Partition ``subs`` (by position) into orbits under the permutations ``perms``."""
    key = {tuple(s.elements): i for i, s in enumerate(subs)}
    seen = [False] * len(subs)
    orbits = []
    for i in range(len(subs)):
        if seen[i]:
            continue
        seen[i] = True
        orbit, stack = [i], [i]
        while stack:
            cur = subs[stack.pop()].array
            for p in perms:
                j = key.get(tuple(np.sort(p[cur]).tolist()))
                if j is not None and not seen[j]:
                    seen[j] = True
                    orbit.append(j)
                    stack.append(j)
        orbits.append(sorted(orbit))
    return orbits
