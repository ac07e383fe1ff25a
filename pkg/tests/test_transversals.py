import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcfarland.characters import char_sum, character
from mcfarland.designs import construct_building_sets
from mcfarland.errors import HypothesisNotMet, InvalidSubgroup, PreconditionViolation
from mcfarland.group_ring import has_half_modulus_property
from mcfarland.groups import ElementSet, is_transversal, make_group, subgroups_of_order
from mcfarland.transversals import (
    classify_transversal,
    cong_restrict,
    cz43_check,
    eg_find_order2,
    extract_coset_E2,
    spread_orthogonality_check,
    stabilizer_orders,
    type_I_by_enumeration,
    type_I_by_split,
    typeI_structure_report,
)
from strategies import group_and_subgroup


@pytest.fixture(scope="module")
def families():
    return {(m, s): construct_building_sets(m, s) for m in (2, 3, 4) for s in ("EA", "Z4")}


# -- classification -----------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4])
@pytest.mark.parametrize("sylow", ["EA", "Z4"])
def test_blocks_are_type_I(families, m, sylow):
    fam = families[(m, sylow)]
    for blk in fam.blocks:
        cr = classify_transversal(blk, fam.N)
        assert cr.type_I is not None and cr.type_II is None
        assert cr.type_I.reconstruct() == blk
        # one coset sits in the index-2 ambient, the other in its t-translate
        assert int(fam.G2.mul(fam.G2.inv(cr.type_I.a), cr.type_I.b)) not in cr.type_I.H1.join(fam.N).members
        assert cr.method == "character-split"


def test_block_witness_is_identity_and_t(families):
    fam = families[(3, "EA")]
    t = fam.G2.index(fam.provenance["t"])
    w = classify_transversal(fam.blocks[0], fam.N).type_I
    assert w.a == 0 and w.b == t


def test_split_and_enumeration_agree(families):
    for (m, s), fam in families.items():
        if m == 4:
            continue
        for blk in fam.blocks:
            fast, slow = type_I_by_split(blk), type_I_by_enumeration(blk)
            assert (fast is None) == (slow is None)
            assert slow.reconstruct() == blk


def test_m2_blocks_are_also_type_II(families):
    fam = families[(2, "EA")]
    for blk in fam.blocks:
        cr = classify_transversal(blk, fam.N)
        assert cr.type_II is not None and cr.type_I is not None


def test_type_II_constructed():
    g = make_group([4, 2, 2, 2, 2])
    h = g.subgroup([(0, 0, 0, 0, 1), (0, 0, 0, 1, 0)])  # order 4 = |E|/8
    e_prime = g.element_set([(a, b, c, 0, 0) for a in range(4) for b in range(2) for c in (0,)])
    e = h.product(e_prime)
    assert len(e) == 32
    n = g.subgroup([(0, 0, 1, 0, 0)])
    cr = classify_transversal(e, n)
    assert cr.type_II is not None
    assert cr.type_II.H.order == 4 and len(cr.type_II.E_prime) == 8
    assert cr.type_II.reconstruct() == e


def test_every_4_subset_of_z2_cubed_is_type_I():
    # any two elements of Z2^3 form a coset of an order-2 subgroup, so no 4-subset is "neither"
    g = make_group([2, 2, 2])
    for n in subgroups_of_order(g, 2):
        for c in itertools.combinations(range(8), 4):
            e = ElementSet(g, c)
            if is_transversal(e, n):
                assert classify_transversal(e, n).type_I is not None


def test_neither_exists_and_is_reported():
    # in Z8 the only subgroup of order 2 is {0, 4}, and {0, 1, 2, 7} contains no pair differing by 4
    g = make_group([8])
    n = g.subgroup([(4,)])
    e = g.element_set([(0,), (1,), (2,), (7,)])
    cr = classify_transversal(e, n)
    assert cr.neither and cr.type_I is None and cr.method == "exhausted"


def test_classify_rejects_non_transversal():
    g = make_group([2, 2])
    n = g.subgroup([(1, 0)])
    with pytest.raises(PreconditionViolation):
        classify_transversal(n, n)


@given(group_and_subgroup(max_order=32), st.data())
def test_classifier_soundness(gs, data):
    group, sub = gs
    reps = {}
    for x in range(group.order):
        reps.setdefault(min(group.mul(x, np.array(sub.elements)).tolist()), []).append(x)
    e = ElementSet(group, tuple(sorted(data.draw(st.sampled_from(v)) for v in reps.values())))
    cr = classify_transversal(e, sub)
    for w in (cr.type_I, cr.type_II):
        if w is not None:
            assert w.reconstruct() == e
    if cr.type_I is not None:
        assert cr.type_I.H1.order == cr.type_I.H2.order == len(e) // 2
    # the split fast path never reports a false positive
    fast = type_I_by_split(e)
    if fast is not None:
        assert cr.type_I is not None
    assert (cr.type_II is not None) == (len(e) % 8 == 0 and cr.stabilizer_order * 8 >= len(e))
    assert stabilizer_orders(group, np.array([e.elements]))[0] == cr.stabilizer_order


# -- structure ----------------------------------------------------------------------


@pytest.mark.parametrize("m", [3, 4])
@pytest.mark.parametrize("sylow", ["EA", "Z4"])
def test_structure_report(families, m, sylow):
    fam = families[(m, sylow)]
    for blk in fam.blocks:
        w = classify_transversal(blk, fam.N).type_I
        rep = typeI_structure_report(blk, fam.N, w)
        assert rep.ok
        assert rep.facts["meet_order"] == len(blk) // (2 * fam.N.order) == 1
        assert rep.facts["H1N_equals_H2N"] and rep.facts["a_inv_b_outside_H1N"]


def test_structure_h1n_is_index2_ambient(families):
    fam = families[(3, "EA")]
    w = classify_transversal(fam.blocks[0], fam.N).type_I
    h1n = w.H1.join(fam.N)
    assert h1n.order * 2 == fam.G2.order
    t = fam.G2.index(fam.provenance["t"])
    assert t not in h1n.members


def test_structure_requires_half_modulus():
    g = make_group([2, 2, 2])
    e = g.element_set([(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)])
    n = g.subgroup([(1, 1, 0)])
    w = classify_transversal(e, n).type_I
    assert not has_half_modulus_property(e)
    with pytest.raises(HypothesisNotMet):
        typeI_structure_report(e, n, w)


def test_orthogonality(families):
    fam = families[(3, "Z4")]
    assert spread_orthogonality_check(fam).ok
    ws = [classify_transversal(b, fam.N).type_I for b in fam.blocks]
    bad = [ws[0], ws[0]] + ws[2:]
    assert not spread_orthogonality_check(fam, bad).ok


def test_orthogonality_pass_is_partial_spread(families):
    fam = families[(3, "EA")]
    ws = [classify_transversal(b, fam.N).type_I for b in fam.blocks]
    subs = [fam.N] + [h for w in ws for h in (w.H1, w.H2)]
    # 1 + 8 subgroups of order 8 meeting pairwise trivially inside the index-2 ambient
    ambient = ws[0].H1.join(fam.N)
    cover = set().union(*(h.members for h in subs))
    assert cover == ambient.members
    assert spread_orthogonality_check(fam, ws).ok


# -- single-set checks --------------------------------------------------------------


def test_extract_coset_on_block(families):
    fam = families[(3, "EA")]
    blk = fam.blocks[0]
    c = extract_coset_E2(blk)
    assert c.subgroup.order == 4
    assert c.as_set().members <= blk.members


def test_extract_coset_singleton():
    g = make_group([2, 2, 2])
    e = g.element_set([(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 1)])
    phi = g.index((0, 0, 1))  # characters share the element indexing: images (0, 0, 1)
    assert character(g, phi).images == (0, 0, 1)
    c = extract_coset_E2(e, phi)
    assert c.subgroup.order == 1
    assert c.representative in e.members


def test_extract_coset_rejects_subgroup():
    g = make_group([2, 2, 2, 2])
    h = g.subgroup([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)])
    with pytest.raises(HypothesisNotMet):
        extract_coset_E2(h)


def test_cz43_examples(families):
    v = make_group([2, 2, 2, 2])
    n = v.subgroup([(1, 0, 0, 0), (0, 1, 0, 0)])
    e = v.subgroup([(0, 0, 1, 0), (0, 0, 0, 1)])
    assert cz43_check(n, e).ratio == 1
    z42 = make_group([4, 4])
    assert cz43_check(z42.subgroup([(1, 0)]), z42.subgroup([(0, 1)])).ratio == 1
    for s in ("EA", "Z4"):
        fam = families[(3, s)]
        for blk in fam.blocks:
            r = cz43_check(fam.N, blk)
            assert r.bound_ok and r.ratio <= 4


def test_cz43_hypothesis():
    g = make_group([4, 4])
    n = g.subgroup([(0, 2)])
    e = g.element_set([(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1), (3, 0), (3, 3)])
    with pytest.raises(HypothesisNotMet):
        cz43_check(n, e)
    with pytest.raises(HypothesisNotMet):
        cz43_check(n, g.element_set([(0, 0), (0, 2)]))


def test_eg_find_order2(families):
    for s in ("EA", "Z4"):
        fam = families[(3, s)]
        for blk in fam.blocks:
            phi = eg_find_order2(blk)
            chi = character(fam.G2, phi)
            assert chi.order == 2 and char_sum(chi, blk).abs2() == 64
    with pytest.raises(PreconditionViolation):
        eg_find_order2(families[(2, "EA")].blocks[0])


def test_eg_type_I_witness_character(families):
    fam = families[(3, "EA")]
    blk = fam.blocks[0]
    w = classify_transversal(blk, fam.N).type_I
    g = fam.G2
    # an order-2 character trivial on H1 and non-trivial on H2 gives |phi(E)| = |E|/2
    for i in range(1, g.order):
        chi = character(g, i)
        if chi.order == 2 and chi.is_principal_on(w.H1) and not chi.is_principal_on(w.H2):
            assert char_sum(chi, blk).abs2() == 64
            break
    else:
        pytest.fail("no separating character")


def test_cong_restrict_examples(families):
    g = make_group([4, 2, 2])
    k = g.subgroup([(1, 0, 0), (0, 1, 0)])
    res = cong_restrict(g.whole(), k, k.order // 2)
    assert res.ok and res.part.members == k.members
    fam = families[(3, "Z4")]
    for k in subgroups_of_order(fam.G2, 64)[:5]:
        for blk in fam.blocks:
            assert cong_restrict(blk, k, 4).ok
    v = make_group([2, 2])
    with pytest.raises(HypothesisNotMet):
        cong_restrict(v.element_set([(0, 0)]), v.subgroup([(1, 0)]), 1)
    with pytest.raises(InvalidSubgroup):
        cong_restrict(v.whole(), v.trivial(), 1)


def test_stabilizer_orders_batch():
    g = make_group([4, 2, 2])
    h = g.subgroup([(2, 0, 0), (0, 1, 0)])
    rows = np.array([h.elements, g.element_set([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)]).elements])
    assert stabilizer_orders(g, rows).tolist() == [4, 1]
