import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from mcfarland.characters import Character, char_sum, enumerate_characters
from mcfarland.designs import assemble_difference_set, construct_building_sets
from mcfarland.errors import GroupMismatch, InvalidArgument, InvalidDecomposition
from mcfarland.group_ring import (
    GroupRingElement,
    character_moduli,
    convolve,
    dset_character_criterion,
    fiber_fourier,
    has_half_modulus_property,
    involute_power,
    is_difference_set,
    mcfarland_params,
    sylow_split,
)
from mcfarland.groups import ElementSet, frattini_and_socle, make_group
from strategies import mixed_groups, subsets, two_groups


@pytest.fixture(scope="module")
def d_m3():
    return assemble_difference_set(construct_building_sets(3, "EA"))


def _elem(group, coeffs):
    return GroupRingElement(group, np.asarray(coeffs))


@st.composite
def ring_elements(draw, group, n=1):
    return [
        _elem(group, draw(st.lists(st.integers(-3, 3), min_size=group.order, max_size=group.order)))
        for _ in range(n)
    ]


# -- convolution and involution -----------------------------------------------------


def test_convolve_singletons():
    g = make_group([4, 2])
    x = GroupRingElement.from_set(g.element_set([(1, 0)]))
    y = GroupRingElement.from_set(g.element_set([(2, 1)]))
    assert convolve(x, y) == GroupRingElement.from_set(g.element_set([(3, 1)]))


def test_whole_group_squared():
    g = make_group([4, 2, 3])
    G = GroupRingElement.whole(g)
    assert G * G == g.order * G


@pytest.mark.parametrize("orders", [(4, 4), (4, 2, 2), (2, 2, 2), (4, 4, 4)])
def test_power_map_of_whole_group(orders):
    g = make_group(orders)
    phi, _ = frattini_and_socle(g)
    lhs = involute_power(GroupRingElement.whole(g), 2)
    assert lhs == (g.order // phi.order) * GroupRingElement.from_set(phi)


def test_involution_examples():
    z4 = make_group([4])
    x = GroupRingElement.from_set(z4.element_set([(0,), (1,)]))
    assert involute_power(x, -1) == GroupRingElement.from_set(z4.element_set([(0,), (3,)]))
    assert involute_power(x, 1) == x
    g = make_group([4, 2])
    h = GroupRingElement.from_set(g.subgroup([(1, 1)]))
    assert involute_power(h, -1) == h


def test_convolve_mismatch():
    with pytest.raises(GroupMismatch):
        convolve(GroupRingElement.whole(make_group([2])), GroupRingElement.whole(make_group([4])))


@given(mixed_groups(max_order=24), st.data())
def test_ring_laws(group, data):
    x, y, z = data.draw(ring_elements(group, 3))
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert involute_power(x * y, -1) == involute_power(x, -1) * involute_power(y, -1)


@given(mixed_groups(max_order=24), st.data())
def test_convolution_matches_definition(group, data):
    x, y = data.draw(ring_elements(group, 2))
    out = (x * y).coeffs
    for g in range(group.order):
        ref = sum(x.coeffs[h] * y.coeffs[int(group.mul(g, group.inv(h)))] for h in range(group.order))
        assert out[g] == ref


# -- difference sets ----------------------------------------------------------------


def test_trivial_difference_set():
    z2 = make_group([2])
    v = is_difference_set(z2.element_set([(1,)]))
    assert v.verdict and (v.v, v.k, v.lam) == (2, 1, 0)


def test_not_a_difference_set_with_witness():
    z4 = make_group([4])
    v = is_difference_set(z4.element_set([(0,), (2,)]))
    assert not v.verdict
    assert v.witness == {"elements": [[1], [2]], "coefficients": [0, 2]}


def test_assembled_m3(d_m3):
    v = is_difference_set(d_m3)
    assert v.verdict and (v.v, v.k, v.lam) == (640, 72, 8)
    assert dset_character_criterion(d_m3, 72, 8, tol=1e-6)
    mod2 = character_moduli(d_m3)
    assert abs(mod2[0] - 72**2) < 1e-6
    assert np.abs(mod2[1:] - 64).max() < 1e-6


def test_subgroup_fails_character_criterion():
    g = make_group([4, 2])
    h = g.subgroup([(1, 0)])
    assert not dset_character_criterion(h, 4, 4)


def test_singer_difference_set():
    z7 = make_group([7])
    d = z7.element_set([(1,), (2,), (4,)])
    assert is_difference_set(d).params.lam == 1
    assert dset_character_criterion(d, 3, 1)


@given(mixed_groups(max_order=40), st.data())
def test_verdict_matches_brute_force(group, data):
    e = data.draw(subsets(group))
    v = is_difference_set(ElementSet(group, tuple(e)))
    ok, lam = oracle.is_difference_set([group.exponents(x) for x in e], group.factor_orders)
    assert v.verdict == ok
    if ok:
        assert v.lam == lam


@given(two_groups(max_order=64), st.data())
def test_convolution_and_character_criteria_agree(group, data):
    e = ElementSet(group, tuple(data.draw(subsets(group))))
    v = is_difference_set(e)
    k, n = len(e), group.order
    if k * (k - 1) % (n - 1):
        assert not v.verdict
    else:
        assert dset_character_criterion(e, k, k * (k - 1) // (n - 1)) == v.verdict


def test_known_hadamard_set_both_criteria():
    # (16, 6, 2) difference set in Z2^4
    g = make_group([2, 2, 2, 2])
    d = g.element_set([(0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1), (1, 1, 1, 1)])
    v = is_difference_set(d)
    assert v.verdict and v.lam == 2
    assert dset_character_criterion(d, 6, 2)


# -- fiber inversion ----------------------------------------------------------------


def test_fiber_fourier_principal(d_m3):
    split = sylow_split(d_m3.parent)
    chi0 = Character(split.two_part, (0,) * split.two_part.rank)
    sizes = [fiber_fourier(d_m3, chi0, h).re for h in range(split.odd_part.order)]
    assert sizes[0] == 8
    assert sizes[1:] == [16, 16, 16, 16]


def test_fiber_fourier_matches_direct_sums(d_m3):
    split = sylow_split(d_m3.parent)
    K = split.two_part
    for chi in enumerate_characters(K)[1::9]:
        for h in range(split.odd_part.order):
            v = fiber_fourier(d_m3, chi, h)
            assert v == char_sum(chi, split.fiber(d_m3, h))
            assert v.divisible_by(8)


def test_fiber_fourier_needs_2_part_character(d_m3):
    with pytest.raises(InvalidDecomposition):
        fiber_fourier(d_m3, Character(d_m3.parent, (0,) * d_m3.parent.rank), 0)


# -- parameters ---------------------------------------------------------------------


@pytest.mark.parametrize("q, n, vkl", [(8, 2, (640, 72, 8)), (2, 1, (4, 1, 0)), (4, 2, (96, 20, 4))])
def test_mcfarland_params_examples(q, n, vkl):
    p = mcfarland_params(q, n)
    assert (p.v, p.k, p.lam) == vkl


def test_mcfarland_params_rejects_non_prime_power():
    with pytest.raises(InvalidArgument):
        mcfarland_params(6, 2)


@given(st.sampled_from([2, 3, 4, 5, 7, 8, 9, 16, 32]), st.integers(1, 4))
def test_params_counting_identity(q, n):
    p = mcfarland_params(q, n)
    assert p.lam * (p.v - 1) == p.k * (p.k - 1)
    assert (p.v, p.k, p.lam) == oracle.mcfarland(q, n)


@given(st.integers(1, 6))
def test_params_two_power_form(m):
    p = mcfarland_params(2**m, 2)
    assert (p.v, p.k, p.lam) == (2 ** (2 * m + 1) * (2 ** (m - 1) + 1), 2**m * (2**m + 1), 2**m)


# -- half-modulus property ----------------------------------------------------------


@given(two_groups(max_order=32), st.data())
def test_half_modulus_matches_brute_force(group, data):
    e = data.draw(subsets(group))
    ref = oracle.half_modulus([group.exponents(x) for x in e], group.factor_orders)
    assert has_half_modulus_property(ElementSet(group, tuple(e))) == ref


def test_half_modulus_on_blocks():
    fam = construct_building_sets(3, "Z4")
    assert all(has_half_modulus_property(b) for b in fam.blocks)
