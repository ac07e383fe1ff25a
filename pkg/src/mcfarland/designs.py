"""Building sets from a GF(2^m) spread, and the difference sets they assemble into.

Construction (m >= 2): take the 2^m + 1 one-dimensional GF(2^m)-subspaces
``H_0, ..., H_{2^m}`` of ``GF(2^m)^2`` viewed as an elementary abelian group
of order 2^(2m). With ``N = H_0`` and an extra generator ``t``,
``E_i = H_{2i-1} + t H_{2i}`` (i = 1 .. 2^(m-1)) are building sets relative to
N in ``<H, t>``. A character that is non-trivial on the ambient group is
trivial on exactly one spread member, which is what makes the three building
set conditions hold; :func:`verify_building_sets` certifies every instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .characters import gaussian_sums, iter_character_chunks, principal_on_mask
from .errors import (
    GroupMismatch,
    InvalidArgument,
    InvalidField,
    InvalidSubgroup,
    NotMcFarlandShaped,
    UnsupportedGroup,
)
from .group_ring import GroupRingElement, convolve, involute_power, sylow_split
from .groups import (
    ElementSet,
    FinAbGroup,
    Subgroup,
    as_subgroup,
    is_transversal,
    make_group,
    quotient,
)

DEFAULT_POLYS = {
    1: 0b11,
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
}


# -- GF(2^m) in polynomial basis -------------------------------------------


def _poly_mod(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Irreducibility over GF(2) by trial division (degrees <= 6 in practice)."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        if d.bit_length() - 1 > deg // 2:
            break
        if _poly_mod(poly, d) == 0:
            return False
    return True


def gf_mul(a: int, b: int, poly: int) -> int:
    m = poly.bit_length() - 1
    out = 0
    while b:
        if b & 1:
            out ^= a
        b >>= 1
        a <<= 1
        if a >> m & 1:
            a ^= poly
    return out


# -- spreads -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class SpreadFamily:
    """The 2^m + 1 lines through the origin of ``GF(2^m)^2``.

    ``members[0]`` is ``{(0, b)}``; ``members[1 + s]`` is ``{(a, s*a)}`` for the
    field element with bit pattern ``s``. Coordinates: the m bits of ``a``
    (least significant first) followed by the m bits of ``b``.
    """

    m: int
    ambient: Subgroup
    members: tuple[Subgroup, ...]
    field_poly: int

    @property
    def group(self) -> FinAbGroup:
        return self.ambient.parent

    def check(self) -> list[str]:
        """Return violated spread invariants (empty when it is a spread)."""
        problems = []
        q = 1 << self.m
        if len(self.members) != q + 1:
            problems.append(f"expected {q + 1} members, got {len(self.members)}")
        for i, h in enumerate(self.members):
            if h.order != q:
                problems.append(f"member {i} has order {h.order}")
        for i, j in combinations(range(len(self.members)), 2):
            if len(self.members[i].members & self.members[j].members) != 1:
                problems.append(f"members {i} and {j} intersect non-trivially")
        covered = set().union(*(h.members for h in self.members))
        if len(covered) != self.group.order:
            problems.append("members do not cover the ambient group")
        counts = hyperplane_containment_counts(self)
        bad = np.flatnonzero(counts != 1)
        if len(bad):
            problems.append(f"{len(bad)} hyperplanes contain {sorted(set(counts[bad].tolist()))} members")
        return problems


def hyperplane_containment_counts(spread: SpreadFamily) -> np.ndarray:
    """For every index-2 subgroup (kernel of a non-zero functional), how many members it contains."""
    group = spread.group
    functionals = group.digits[1:]
    counts = np.zeros(len(functionals), dtype=np.int64)
    for h in spread.members:
        gens = group.digits[list(h.generators)]
        counts += ((functionals @ gens.T) % 2 == 0).all(axis=1)
    return counts


def _field_vector(a: int, b: int, m: int) -> tuple[int, ...]:
    return tuple((a >> i) & 1 for i in range(m)) + tuple((b >> i) & 1 for i in range(m))


def gf2m_spread(m: int, poly: int | None = None) -> SpreadFamily:
    if not 1 <= m <= 6:
        raise InvalidArgument("spread construction supports 1 <= m <= 6")
    poly = DEFAULT_POLYS[m] if poly is None else int(poly)
    if poly.bit_length() - 1 != m or not is_irreducible(poly):
        raise InvalidField(f"polynomial {poly:#b} is not an irreducible of degree {m}")
    group = make_group([2] * (2 * m))
    q = 1 << m
    basis = [1 << i for i in range(m)]
    members = [group.subgroup([_field_vector(0, e, m) for e in basis])]
    for s in range(q):
        members.append(group.subgroup([_field_vector(e, gf_mul(s, e, poly), m) for e in basis]))
    spread = SpreadFamily(m, group.whole(), tuple(members), poly)
    problems = spread.check()
    if problems:
        raise InvalidField("; ".join(problems))
    return spread


# -- building sets ---------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BuildingSetFamily:
    """Blocks ``E_1..E_{2^(m-1)}`` of size 2^(m+1) relative to ``N`` in ``G2``."""

    G2: FinAbGroup
    N: Subgroup
    blocks: tuple[ElementSet, ...]
    m: int
    provenance: dict = field(default_factory=dict)

    @property
    def block_size(self) -> int:
        return 2 ** (self.m + 1)

    @property
    def modulus(self) -> int:
        return 2**self.m

    def __eq__(self, other) -> bool:
        if not isinstance(other, BuildingSetFamily):
            return NotImplemented
        return (self.G2, self.N, self.blocks, self.m) == (other.G2, other.N, other.blocks, other.m)


@dataclass
class Verification:
    verdict: bool
    violations: list[dict]

    def __bool__(self) -> bool:
        return self.verdict

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "violations": self.violations}


def _embed_ambient(spread: SpreadFamily, sylow_type: str):
    """Return ``(G2, ambient->G2 index map, t)`` for the requested Sylow type."""
    m = spread.m
    amb = spread.group
    if sylow_type == "EA":
        G2 = make_group([2] * (2 * m + 1))
        emb = G2.ravel(np.concatenate([np.zeros((amb.order, 1), dtype=np.int64), amb.digits], axis=1))
        return G2, emb, G2.index((1,) + (0,) * (2 * m))
    if sylow_type == "Z4":
        G2 = make_group([4] + [2] * (2 * m - 1))
        # t has order 4 and t^2 = c, the first non-identity element of H_1
        c = np.array(amb.exponents(spread.members[1].elements[1]))
        pivot = int(np.flatnonzero(c)[0])
        rest = [j for j in range(2 * m) if j != pivot]
        v = amb.digits
        coef_c = v[:, pivot]
        reduced = (v - coef_c[:, None] * c[None, :]) % 2
        exps = np.concatenate([2 * coef_c[:, None], reduced[:, rest]], axis=1)
        return G2, G2.ravel(exps), G2.index((1,) + (0,) * (2 * m - 1))
    raise InvalidArgument(f"unknown Sylow type {sylow_type!r} (expected 'EA' or 'Z4')")


def construct_building_sets(m: int, sylow_type: str = "EA", poly: int | None = None) -> BuildingSetFamily:
    """(2^(m+1), 2^m, 2^(m-1)) building sets in a group of order 2^(2m+1).

    ``sylow_type`` ``"EA"`` gives ``Z2^(2m+1)``; ``"Z4"`` gives ``Z4 x Z2^(2m-1)``.
    """
    if not 2 <= m <= 5:
        raise InvalidArgument("construction supports 2 <= m <= 5")
    sylow_type = sylow_type.upper()
    spread = gf2m_spread(m, poly)
    G2, emb, t = _embed_ambient(spread, sylow_type)
    embedded = [ElementSet(G2, tuple(emb[h.array].tolist())) for h in spread.members]
    N = as_subgroup(embedded[0])
    pairs = [(2 * i - 1, 2 * i) for i in range(1, 2 ** (m - 1) + 1)]
    blocks = tuple(embedded[a].union(embedded[b].translate(t)) for a, b in pairs)
    provenance = {
        "construction": "gf2m-spread",
        "sylow_type": sylow_type,
        "field_poly": format(spread.field_poly, "b"),
        "pairing": [list(p) for p in pairs],
        "t": list(G2.exponents(t)),
    }
    if m == 2:
        provenance["note"] = "q = 4 family; informational"
    return BuildingSetFamily(G2, N, blocks, m, provenance)


def verify_building_sets(fam: BuildingSetFamily) -> Verification:
    """Check the three building-set conditions over every character of G2, exactly."""
    G2, N, m = fam.G2, fam.N, fam.m
    k, n = fam.block_size, fam.modulus
    violations: list[dict] = []
    if not G2.exponent_divides(4):
        raise UnsupportedGroup("exact verification needs a group of exponent dividing 4")
    if len(fam.blocks) != 2 ** (m - 1):
        violations.append({"condition": "count", "detail": f"expected {2 ** (m - 1)} blocks, got {len(fam.blocks)}"})
    for i, blk in enumerate(fam.blocks):
        if blk.parent != G2:
            raise GroupMismatch("block lives in a different group")
        if len(blk) != k:
            violations.append({"condition": "i", "block": i, "detail": f"size {len(blk)} != {k}"})
    if not violations:
        arr = np.stack([b.array for b in fam.blocks])
        n2 = n * n
        triv_n = principal_on_mask(G2, N)
        for chunk in iter_character_chunks(G2, 1024):
            re, im = gaussian_sums(G2, arr, chunk)
            mod2 = re * re + im * im  # (chars, blocks)
            for row, chi in enumerate(chunk):
                if chi == 0:
                    continue
                vals = mod2[row]
                if triv_n[chi]:
                    if vals.any():
                        violations.append(_violation("ii", G2, chi, vals))
                else:
                    if (vals == n2).sum() != 1 or ((vals != 0) & (vals != n2)).any() or (vals == 0).sum() != len(vals) - 1:
                        violations.append(_violation("iii", G2, chi, vals))
                if len(violations) >= 16:
                    break
            if len(violations) >= 16:
                break
    return Verification(not violations, violations)


def _violation(cond: str, group: FinAbGroup, chi: int, mod2: np.ndarray) -> dict:
    return {"condition": cond, "character": list(group.exponents(int(chi))), "moduli_squared": mod2.tolist()}


def assemble_difference_set(fam: BuildingSetFamily, oddgroup: FinAbGroup | None = None) -> ElementSet:
    """``D = N + h_1 E_1 + ... + h_r E_r`` inside ``G2 x oddgroup``.

    ``h_1, h_2, ...`` are the non-identity elements of the odd group in
    canonical order.
    """
    m = fam.m
    r = 2 ** (m - 1)
    if oddgroup is None:
        oddgroup = make_group([r + 1])
    if oddgroup.order != r + 1 or oddgroup.order % 2 == 0:
        raise InvalidArgument(f"odd group must have order {r + 1}, got {oddgroup.order}")
    G = make_group(fam.G2.factor_orders + oddgroup.factor_orders)
    split = sylow_split(G)
    parts = [split.embed(fam.N.array, np.zeros(len(fam.N), dtype=np.int64))]
    for i, blk in enumerate(fam.blocks, start=1):
        parts.append(split.embed(blk.array, np.full(len(blk), i)))
    return ElementSet(G, tuple(np.concatenate(parts).tolist()))


@dataclass(frozen=True, eq=False)
class Decomposition:
    family: BuildingSetFamily
    identity_fiber: ElementSet
    fiber_element: int  # index in the odd part carrying the size-2^m fiber
    fiber_sizes: tuple[int, ...]


def decompose_difference_set(d: ElementSet) -> Decomposition:
    """Split D over the odd part of its group into fibers and recover the building sets."""
    split = sylow_split(d.parent)
    K, H = split.two_part, split.odd_part
    fibers = [split.fiber(d, h) for h in range(H.order)]
    sizes = tuple(len(f) for f in fibers)
    r = H.order - 1
    if r < 1 or r & (r - 1):
        raise NotMcFarlandShaped(f"odd part has order {H.order}, not 2^(m-1)+1")
    m = r.bit_length()
    if K.order != 2 ** (2 * m + 1):
        raise NotMcFarlandShaped(f"2-part has order {K.order}, expected {2 ** (2 * m + 1)}")
    small = [h for h, s in enumerate(sizes) if s == 2**m]
    if len(small) != 1 or sorted(sizes) != sorted([2**m] + [2 ** (m + 1)] * r):
        raise NotMcFarlandShaped(f"fiber sizes {sizes} do not have the shape 2^m, 2^(m+1) x {r}")
    h0 = small[0]
    e0 = fibers[h0]
    shifted = e0.translate(K.inv(e0.elements[0]))
    if not shifted.is_subgroup():
        raise NotMcFarlandShaped("the size-2^m fiber is not a coset of a subgroup")
    N = as_subgroup(shifted)
    blocks = tuple(f for h, f in enumerate(fibers) if h != h0)
    fam = BuildingSetFamily(K, N, blocks, m, {"construction": "decomposed", "odd_group": H.descriptor})
    return Decomposition(fam, e0, h0, sizes)


def quotient_building_sets(fam: BuildingSetFamily, sub: Subgroup) -> BuildingSetFamily:
    """Push the family forward to ``G2/H`` relative to ``N/H`` for ``H <= N``."""
    if sub.parent != fam.G2:
        raise GroupMismatch("subgroup of a different group")
    if not sub.members <= fam.N.members:
        raise InvalidSubgroup("H must be contained in N")
    qmap = quotient(fam.G2, sub)
    multiplicities = []
    blocks = []
    for blk in fam.blocks:
        counts = qmap.image_multiset(blk)
        multiplicities.append(int(counts.max()))
        blocks.append(ElementSet(qmap.target, tuple(np.flatnonzero(counts).tolist())))
    N_bar = as_subgroup(qmap(fam.N))
    prov = dict(fam.provenance)
    prov.update(
        {
            "quotient_by": [list(fam.G2.exponents(g)) for g in as_subgroup(sub).generators],
            "max_multiplicity": multiplicities,
        }
    )
    out = BuildingSetFamily(qmap.target, N_bar, tuple(blocks), fam.m, prov)
    return out


@dataclass
class IdentityCheck:
    holds: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.holds

    def to_json(self) -> dict:
        return {"holds": self.holds, "witness": self.witness}


def block_autocorrelation_sum(fam: BuildingSetFamily) -> GroupRingElement:
    total = GroupRingElement(fam.G2, np.zeros(fam.G2.order, dtype=np.int64))
    for blk in fam.blocks:
        x = GroupRingElement.from_set(blk)
        total = total + convolve(x, involute_power(x, -1))
    return total


def sum_identity_check(fam: BuildingSetFamily) -> IdentityCheck:
    """``sum_k E_k E_k^(-1) = 2^(2m) + 2^(2m-n) (G - N)`` with ``|N| = 2^n``, exactly."""
    G2, m = fam.G2, fam.m
    n = fam.N.order.bit_length() - 1
    if fam.N.order != 1 << n or n > 2 * m:
        raise InvalidArgument("N must have order 2^n with n <= 2m")
    lhs = block_autocorrelation_sum(fam).coeffs
    rhs = np.full(G2.order, 2 ** (2 * m - n), dtype=np.int64)
    rhs[fam.N.array] = 0
    rhs[0] += 2 ** (2 * m)
    bad = np.flatnonzero(lhs != rhs)
    if len(bad):
        g = int(bad[0])
        return IdentityCheck(False, {"element": list(G2.exponents(g)), "lhs": int(lhs[g]), "rhs": int(rhs[g])})
    return IdentityCheck(True)


def blocks_are_transversals(fam: BuildingSetFamily) -> bool:
    return all(is_transversal(b, fam.N) for b in fam.blocks)
