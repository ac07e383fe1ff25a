import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from mcfarland.groups import ElementSet, frattini_and_socle, is_transversal, make_group, subgroups_of_order
from mcfarland.search import (
    CURATED_SIZE8,
    QuotientLiftSearch,
    SearchReport,
    TransversalSearch,
    congruence_predicate,
    ei_ej_sweep,
    half_modulus_predicate,
    load_checkpoint,
    normalized_z43_subsearch,
    oracle_size,
    oracle_size_curated,
    oracle_z43,
    two_groups,
    z43_control,
)
from strategies import group_and_subgroup


def _brute_transversals(group, sub):
    """Every normalized transversal (identity coset represented by the identity)."""
    cosets = {}
    for x in range(group.order):
        cosets.setdefault(min(group.mul(x, np.array(sub.elements)).tolist()), []).append(x)
    rest = [v for k, v in sorted(cosets.items()) if k != 0]
    for choice in itertools.product(*rest):
        yield tuple(sorted((0,) + choice))


# -- report -------------------------------------------------------------------------


def test_report_invariant():
    with pytest.raises(ValueError):
        SearchReport("x", 1, 1, [])
    rep = SearchReport("x", 3, 1, [(0, 1)], wall_time=2.5)
    assert "wall_time" not in rep.to_json()
    assert rep.to_json(include_time=True)["wall_time"] == 2.5


# -- predicates ---------------------------------------------------------------------


@given(group_and_subgroup(max_order=32), st.data())
def test_half_modulus_predicate_matches_brute_force(gs, data):
    group, _ = gs
    k = data.draw(st.sampled_from([2, 4, 8]).filter(lambda k: k <= group.order))
    rows = np.array(
        [sorted(data.draw(st.sets(st.integers(0, group.order - 1), min_size=k, max_size=k))) for _ in range(5)]
    )
    got = half_modulus_predicate(group)(rows)
    for row, ok in zip(rows, got):
        assert ok == oracle.half_modulus([group.exponents(x) for x in row], group.factor_orders)


def test_congruence_predicate():
    g = make_group([4, 4])
    pred = congruence_predicate(g, 4)
    h = g.subgroup([(1, 0)])
    assert pred(np.array([h.elements]))[0]
    assert not pred(np.array([[0, 1, 2, 5]]))[0]


# -- the Z4^3 certificate -----------------------------------------------------------


@pytest.fixture(scope="module")
def z43():
    return oracle_z43()


def test_z43_no_solutions(z43):
    assert z43.satisfying_found == 0 and z43.witnesses == []
    assert z43.candidates_examined <= 8**7
    assert z43.candidates_examined == 2097152


def test_z43_normalized_subsearch(z43):
    assert z43.details["normalized_subsearch"] == {"assignments": 4096, "constraints": 0, "characters": 0}
    assert normalized_z43_subsearch()["assignments"] == 4096


def test_z43_control_finds_solutions():
    rep = z43_control()
    assert rep.satisfying_found >= 1
    g = make_group([4, 4, 4])
    _, soc = frattini_and_socle(g)
    for w in rep.witnesses[:50]:
        e = ElementSet(g, w)
        assert is_transversal(e, soc)
        assert congruence_predicate(g, 2)(np.array([w]))[0]


def test_z43_worker_determinism(z43):
    four = oracle_z43(workers=4)
    assert json.dumps(four.to_json(), sort_keys=True) == json.dumps(z43.to_json(), sort_keys=True)


def test_z43_checkpoint_and_resume(tmp_path, z43):
    ck = tmp_path / "ck.json"
    oracle_z43(checkpoint=str(ck), subsearch=False)
    done = load_checkpoint(ck)
    assert len(done) == 8
    resumed = oracle_z43(resume=done[:3])
    assert resumed.to_json() == z43.to_json()


def test_hash_join_matches_brute_force_small():
    """Same engine on Z4 x Z2^2 with N of order 2 against direct enumeration."""
    g = make_group([4, 2, 2])
    for sub in subgroups_of_order(g, 2):
        for mod in (2, 4):
            rep = TransversalSearch(g, sub, mod, "congruence").run()
            pred = congruence_predicate(g, mod)
            brute = [t for t in _brute_transversals(g, sub) if pred(np.array([t]))[0]]
            assert sorted(rep.witnesses) == sorted(brute)


# -- size bound ---------------------------------------------------------------------


def test_two_groups():
    assert [g.descriptor for g in two_groups(16)] == ["Z16", "Z8xZ2", "Z4^2", "Z4xZ2^2", "Z2^4"]
    assert len(two_groups(64, max_exponent=4)) == 4


def test_size_small_exhaustive():
    rep = oracle_size(16, sizes=(2,))
    assert rep.satisfying_found == 0
    assert rep.details["per_size"]["2"]["qualifying"] == 0
    rep = oracle_size(32, sizes=(4,))
    assert rep.satisfying_found == 0
    assert rep.details["per_size"]["4"]["qualifying"] > 0  # boundary cases |N| = |E| exist


def test_size_two_element_sets_never_qualify():
    # |1 + chi(g)| = 1 would need chi(g) to be a primitive cube root of unity
    g = make_group([2, 2])
    assert not half_modulus_predicate(g)(np.array([[0, 1]]))[0]


def test_size_boundary_instance():
    # |N| = |E| = 4 is attainable; in Z2^4 no such transversal exists, in Z4^2 one does
    g = make_group([4, 4])
    n = g.subgroup([(0, 2), (2, 0)])
    e = g.element_set([(0, 0), (0, 1), (1, 0), (3, 3)])
    assert is_transversal(e, n)
    assert half_modulus_predicate(g)(np.array([e.elements]))[0]
    assert oracle.half_modulus([g.exponents(x) for x in e.elements], g.factor_orders)
    assert n.order == len(e)


@given(group_and_subgroup(max_order=32))
def test_lift_search_matches_brute_force(gs):
    group, sub = gs
    if not group.exponent_divides(4) or sub.order == group.order:
        return
    k = group.order // sub.order
    if sub.order ** (k - 1) > 5000:
        return
    rep = QuotientLiftSearch(group, sub).run()
    pred = half_modulus_predicate(group)
    brute = [t for t in _brute_transversals(group, sub) if pred(np.array([t]))[0]]
    assert rep.witnesses == sorted(brute)


def test_lift_search_even_branch_z2_6():
    g = make_group([2] * 6)
    n = g.subgroup([(0, 0, 0, 0, 0, 1), (0, 0, 0, 0, 1, 0), (0, 0, 0, 1, 0, 0)])
    rep = QuotientLiftSearch(g, n).run()
    assert rep.satisfying_found == 86016
    sample = np.array(rep.witnesses[::997])
    assert half_modulus_predicate(g)(sample).all()


def test_curated_odd_branch_subset():
    rep = oracle_size_curated(instances=CURATED_SIZE8[1:5])
    assert rep.satisfying_found == 0
    assert all(r["N_order"] == 16 for r in rep.details["instances"])


def test_lift_workers_identical():
    g = make_group([4, 2, 2, 2, 2])
    n = g.subgroup([(2, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0)])
    a, b = QuotientLiftSearch(g, n).run(), QuotientLiftSearch(g, n).run(workers=2)
    assert a.to_json() == b.to_json()


# -- EI / EJ sweep ------------------------------------------------------------------


def test_ei_ej_sweep_small():
    rep = ei_ej_sweep(max_order=32)
    assert rep.satisfying_found == 0
    # below order 64 nothing with |N| >= 8 has the half-modulus property
    assert rep.details["hypotheses_met"] == 0
