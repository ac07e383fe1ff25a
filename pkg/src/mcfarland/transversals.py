"""Transversals with the half-modulus property: classification and structure checks.

A transversal ``E`` of ``N`` in ``G`` is of type I when ``E = aH1 + bH2`` for
subgroups of order ``|E|/2``, and of type II when ``E = H E'`` with
``|H| = |E|/8`` and ``|E'| = 8``. The two flags are computed independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .characters import (
    _phase_matrix,
    character,
    gaussian_sums,
    order2_character_indices,
)
from .designs import BuildingSetFamily
from .errors import (
    GroupMismatch,
    HypothesisNotMet,
    InvalidSubgroup,
    LemmaViolation,
    PreconditionViolation,
    UnsupportedGroup,
)
from .group_ring import has_half_modulus_property
from .groups import (
    Coset,
    ElementSet,
    FinAbGroup,
    Subgroup,
    as_subgroup,
    coset_labels,
    frattini_and_socle,
    is_transversal,
    isomorphism_type,
    stabilizer,
    subgroups_of_order,
)


@dataclass(frozen=True)
class TypeIWitness:
    a: int
    b: int
    H1: Subgroup
    H2: Subgroup

    def reconstruct(self) -> ElementSet:
        return self.H1.translate(self.a).union(self.H2.translate(self.b))

    def to_json(self) -> dict:
        g = self.H1.parent
        return {
            "a": list(g.exponents(self.a)),
            "b": list(g.exponents(self.b)),
            "H1": {"generators": self.H1.generator_tuples()},
            "H2": {"generators": self.H2.generator_tuples()},
        }


@dataclass(frozen=True)
class TypeIIWitness:
    H: Subgroup
    E_prime: ElementSet

    def reconstruct(self) -> ElementSet:
        return self.H.product(self.E_prime)

    def to_json(self) -> dict:
        return {"H": {"generators": self.H.generator_tuples()}, "E_prime": self.E_prime.tuples()}


@dataclass
class ClassificationReport:
    type_I: TypeIWitness | None
    type_II: TypeIIWitness | None
    method: str | None = None  # how the type I witness was found
    stabilizer_order: int = 1

    @property
    def neither(self) -> bool:
        return self.type_I is None and self.type_II is None

    def to_json(self) -> dict:
        return {
            "type_I": None if self.type_I is None else self.type_I.to_json(),
            "type_II": None if self.type_II is None else self.type_II.to_json(),
            "neither": self.neither,
            "method": self.method,
            "stabilizer_order": self.stabilizer_order,
        }


def _coset_of_subgroup(group: FinAbGroup, elems: np.ndarray) -> tuple[int, Subgroup] | None:
    """If ``elems`` is a coset ``rH``, return ``(r, H)`` with ``r = min(elems)``."""
    r = int(elems.min())
    shifted = np.sort(group.mul(elems, group.inv(r)))
    es = ElementSet(group, tuple(shifted.tolist()))
    if not es.is_subgroup():
        return None
    return r, as_subgroup(es)


def type_I_by_split(e: ElementSet) -> TypeIWitness | None:
    """Fast path: halve E along the kernel of an order-2 character, coset-test both halves.

    When ``E = aH1 + bH2`` every order-2 character trivial on ``H1 H2`` but not
    on ``a^-1 b`` separates the two cosets, so it sums to zero on E. We scan
    the order-2 characters splitting E evenly.
    """
    group = e.parent
    if len(e) % 2:
        return None
    idx = order2_character_indices(group)
    if not len(idx):
        return None
    P = _phase_matrix(group, group.digits[idx], e.array)
    inside = P == 0
    even = np.flatnonzero(inside.sum(axis=1) * 2 == len(e))
    tried = set()
    for row in even:
        mask = inside[row]
        key = tuple(mask.tolist())
        if key in tried:
            continue
        tried.add(key)
        left = _coset_of_subgroup(group, e.array[mask])
        if left is None:
            continue
        right = _coset_of_subgroup(group, e.array[~mask])
        if right is None:
            continue
        return TypeIWitness(left[0], right[0], left[1], right[1])
    return None


def type_I_by_enumeration(e: ElementSet) -> TypeIWitness | None:
    """Complete search: subgroups of order ``|E|/2`` inside ``e0^-1 E`` with ``e0 = min E``.

    Whichever of the two cosets contains ``e0`` equals ``e0 H``, so one base
    point suffices.
    """
    group = e.parent
    if len(e) % 2:
        return None
    e0 = e.elements[0]
    shifted = e.translate(group.inv(e0))
    for h1 in subgroups_of_order(group, len(e) // 2, within=shifted):
        first = h1.translate(e0)
        rest = e.difference(first)
        found = _coset_of_subgroup(group, rest.array)
        if found is not None:
            return TypeIWitness(e0, found[0], h1, found[1])
    return None


def type_II_witness(e: ElementSet, stab: Subgroup | None = None) -> TypeIIWitness | None:
    """Type II holds iff the stabilizer has order at least ``|E|/8``."""
    if len(e) % 8:
        return None
    stab = stabilizer(e) if stab is None else stab
    need = len(e) // 8
    if stab.order < need:
        return None
    h = stab if stab.order == need else subgroups_of_order(e.parent, need, within=stab)[0]
    labels = coset_labels(h)[e.array]
    _, first = np.unique(labels, return_index=True)
    e_prime = ElementSet(e.parent, tuple(sorted(e.array[first].tolist())))
    return TypeIIWitness(h, e_prime)


def stabilizer_orders(group: FinAbGroup, rows: np.ndarray) -> np.ndarray:
    """``|stabilizer(E)|`` for every row of element indices (sets of equal size)."""
    rows = np.sort(np.atleast_2d(rows), axis=1)
    out = np.zeros(len(rows), dtype=np.int64)
    for g in range(group.order):
        out += (np.sort(group.mul(rows, g), axis=1) == rows).all(axis=1)
    return out


def classify_transversal(e: ElementSet, n: Subgroup, complete: bool = True) -> ClassificationReport:
    """Type flags for a transversal ``e`` of ``n``, each with a validated witness.

    With ``complete`` the subgroup enumeration runs whenever the split fast
    path finds nothing, so a missing type I flag is a proof of absence.
    """
    if e.parent != n.parent:
        raise GroupMismatch("set and subgroup belong to different groups")
    if not is_transversal(e, n):
        raise PreconditionViolation("E is not a transversal of N")
    stab = stabilizer(e)
    w2 = type_II_witness(e, stab)
    w1 = type_I_by_split(e)
    method = "character-split" if w1 is not None else None
    if w1 is None and complete:
        w1 = type_I_by_enumeration(e)
        method = "subgroup-enumeration" if w1 is not None else "exhausted"
    for w in (w1, w2):
        if w is not None and w.reconstruct() != e:
            raise LemmaViolation("classifier witness does not reconstruct E")
    return ClassificationReport(w1, w2, method, stab.order)


@dataclass
class StructureReport:
    facts: dict
    ok: bool

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "facts": self.facts}


def typeI_structure_report(e: ElementSet, n: Subgroup, witness: TypeIWitness) -> StructureReport:
    """Check the structural consequences of a type I decomposition.

    Raises :class:`HypothesisNotMet` when E lacks the half-modulus property.
    """
    if not has_half_modulus_property(e):
        raise HypothesisNotMet("|chi(E)| is not in {|E|/2, 0} for every non-principal chi")
    group = e.parent
    h1, h2 = witness.H1, witness.H2
    h1n, h2n = h1.join(n), h2.join(n)
    joined = h1.join(h2)
    meet = h1.meet(h2)
    ab = int(group.mul(group.inv(witness.a), witness.b))
    facts = {
        "H1_meet_N_trivial": h1.meet(n).order == 1,
        "H2_meet_N_trivial": h2.meet(n).order == 1,
        "H1N_equals_H2N": h1n == h2n,
        "a_inv_b_outside_H1N": ab not in h1n,
        "N_in_H1H2": n.members <= joined.members,
        "meet_order": meet.order,
        "expected_meet_order": len(e) // (2 * n.order) if len(e) >= 2 * n.order else None,
        "H1_mod_meet": list(isomorphism_type(h1, meet)),
        "H2_mod_meet": list(isomorphism_type(h2, meet)),
        "N_type": list(isomorphism_type(n)),
    }
    facts["meet_order_ok"] = meet.order * 2 * n.order == len(e)
    facts["quotients_match_N"] = facts["H1_mod_meet"] == facts["N_type"] == facts["H2_mod_meet"]
    ok = all(
        facts[k]
        for k in (
            "H1_meet_N_trivial",
            "H2_meet_N_trivial",
            "H1N_equals_H2N",
            "a_inv_b_outside_H1N",
            "N_in_H1H2",
            "meet_order_ok",
            "quotients_match_N",
        )
    )
    return StructureReport(facts, ok)


@dataclass
class OrthogonalityReport:
    ok: bool
    failure: dict | None = None

    def __bool__(self) -> bool:
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "failure": self.failure}


def spread_orthogonality_check(fam: BuildingSetFamily, witnesses: list[TypeIWitness] | None = None) -> OrthogonalityReport:
    """Pairwise ``Hs & Ht = 1`` and ``N Hs = N Ht = Hs Ht`` over all witness subgroups.

    Also checks ``Hs & N = 1``, so a pass means N together with the ``H_i`` is a
    partial spread.
    """
    if witnesses is None:
        witnesses = []
        for i, blk in enumerate(fam.blocks):
            w = classify_transversal(blk, fam.N).type_I
            if w is None:
                return OrthogonalityReport(False, {"block": i, "reason": "not type I"})
            witnesses.append(w)
    subs = [h for w in witnesses for h in (w.H1, w.H2)]
    for s, h in enumerate(subs):
        if h.meet(fam.N).order != 1:
            return OrthogonalityReport(False, {"s": s, "reason": "H_s meets N"})
    for s, t in combinations(range(len(subs)), 2):
        hs, ht = subs[s], subs[t]
        if hs.meet(ht).order != 1:
            return OrthogonalityReport(False, {"s": s, "t": t, "reason": "H_s and H_t intersect"})
        if not (hs.join(fam.N) == ht.join(fam.N) == hs.join(ht)):
            return OrthogonalityReport(False, {"s": s, "t": t, "reason": "N H_s, N H_t, H_s H_t differ"})
    return OrthogonalityReport(True)


# -- checks on single sets ------------------------------------------------------


def _all_sums(e: ElementSet) -> tuple[np.ndarray, np.ndarray]:
    group = e.parent
    if not group.exponent_divides(4):
        raise UnsupportedGroup("exact character sums need exponent dividing 4")
    return gaussian_sums(group, e.array)


def _divisible(re: np.ndarray, im: np.ndarray, l: int) -> bool:
    return bool((re % l == 0).all() and (im % l == 0).all())


def order2_half_characters(e: ElementSet) -> np.ndarray:
    """Order-2 characters ``phi`` with ``|phi(E)| = |E|/2``, canonical order."""
    group = e.parent
    idx = order2_character_indices(group)
    P = _phase_matrix(group, group.digits[idx], e.array)
    vals = (P == 0).sum(axis=1) * 2 - len(e)
    return idx[np.abs(vals) * 2 == len(e)]


def extract_coset_E2(e: ElementSet, phi: int | None = None) -> Coset:
    """A coset of a subgroup of order ``|E|/4`` contained in E, via an order-2 split."""
    group = e.parent
    if len(e) % 4:
        raise HypothesisNotMet("|E| must be divisible by 4")
    re, im = _all_sums(e)
    if not _divisible(re, im, len(e) // 2):
        raise HypothesisNotMet("chi(E) is not divisible by |E|/2 for every character")
    if phi is None:
        cands = order2_half_characters(e)
        if not len(cands):
            raise HypothesisNotMet("no order-2 character with |phi(E)| = |E|/2")
        phi = int(cands[0])
    chi = character(group, phi)
    if chi.order != 2:
        raise HypothesisNotMet("phi must have order 2")
    inside = chi.phases(e.array) == 0
    if abs(2 * int(inside.sum()) - len(e)) * 2 != len(e):
        raise HypothesisNotMet("|phi(E)| != |E|/2")
    half = e.array[inside] if inside.sum() * 4 == len(e) else e.array[~inside]
    found = _coset_of_subgroup(group, half)
    if found is None:
        raise LemmaViolation("the small half is not a coset")
    return Coset(found[0], found[1])


@dataclass
class CZ43Result:
    ratio: int
    bound_ok: bool

    def to_json(self) -> dict:
        return {"ratio": self.ratio, "bound_ok": self.bound_ok}


def cz43_check(n: Subgroup, e: ElementSet) -> CZ43Result:
    """``|(N & Phi(G)) / Phi(N)|`` for a transversal with ``chi(E) = 0 mod |E|/2``."""
    group = e.parent
    if not is_transversal(e, n):
        raise HypothesisNotMet("E is not a transversal of N")
    re, im = _all_sums(e)
    if len(e) >= 2 and not _divisible(re, im, len(e) // 2):
        raise HypothesisNotMet("chi(E) is not divisible by |E|/2 for every character")
    phi_g, _ = frattini_and_socle(group)
    phi_n = np.unique(group.power(n.array, 2))
    ratio = n.meet(phi_g).order // len(phi_n)
    return CZ43Result(ratio, ratio <= 4)


def eg_find_order2(e: ElementSet) -> int:
    """Index of an order-2 character with ``|phi(E)| = |E|/2`` (never absent on valid inputs)."""
    group = e.parent
    m = (group.order.bit_length() - 2) // 2
    if group.order != 2 ** (2 * m + 1) or m < 3:
        raise PreconditionViolation("needs |G| = 2^(2m+1) with m >= 3")
    if not group.exponent_divides(4):
        raise PreconditionViolation("needs exponent at most 4")
    if len(e) != 2 ** (m + 1):
        raise PreconditionViolation(f"needs |E| = 2^(m+1) = {2 ** (m + 1)}")
    re, im = _all_sums(e)
    mod2 = (re * re + im * im)[1:]
    if not np.isin(mod2, (0, 4**m)).all():
        raise PreconditionViolation("moduli are not all in {2^m, 0}")
    cands = order2_half_characters(e)
    if not len(cands):
        raise LemmaViolation("no order-2 character with |phi(E)| = |E|/2")
    return int(cands[0])


@dataclass
class CongResult:
    part: ElementSet
    ok: bool

    def to_json(self) -> dict:
        return {"part": self.part.tuples(), "ok": self.ok}


def cong_restrict(e: ElementSet, k: Subgroup, l: int) -> CongResult:
    """Restrict to an index-2 subgroup and check divisibility by ``l`` there.

    Every character of K extends to G, so evaluating all characters of G on
    ``E & K`` covers the dual of K.
    """
    group = e.parent
    if k.parent != group:
        raise GroupMismatch("K lives in a different group")
    if not k.is_subgroup() or 2 * k.order != group.order:
        raise InvalidSubgroup("K must be a subgroup of index 2")
    re, im = _all_sums(e)
    if not _divisible(re, im, 2 * l):
        raise HypothesisNotMet(f"chi(E) is not divisible by {2 * l} for every character")
    part = e.intersection(k)
    pre, pim = gaussian_sums(group, part.array)
    return CongResult(part, _divisible(pre, pim, l))
