"""Hypothesis strategies shared by the test modules."""

from hypothesis import strategies as st

from mcfarland import make_group


@st.composite
def two_groups(draw, max_order=64, max_exponent=4):
    """Abelian 2-groups of exponent <= max_exponent and order <= max_order."""
    choices = [n for n in (2, 4, 8) if n <= max_exponent]
    orders = []
    total = 1
    for _ in range(draw(st.integers(1, 6))):
        n = draw(st.sampled_from(choices))
        if total * n > max_order:
            break
        orders.append(n)
        total *= n
    if not orders:
        orders = [2]
    return make_group(sorted(orders, reverse=True))


@st.composite
def mixed_groups(draw, max_order=60):
    """Small abelian groups with factors 2, 3, 4, 5."""
    orders = []
    total = 1
    for _ in range(draw(st.integers(1, 4))):
        n = draw(st.sampled_from([2, 3, 4, 5]))
        if total * n > max_order:
            break
        orders.append(n)
        total *= n
    if not orders:
        orders = [3]
    return make_group(orders)


@st.composite
def subsets(draw, group, min_size=1):
    size = draw(st.integers(min_size, group.order))
    return sorted(draw(st.sets(st.integers(0, group.order - 1), min_size=size, max_size=size)))


@st.composite
def group_and_subgroup(draw, max_order=32):
    from mcfarland.groups import all_subgroups

    group = draw(two_groups(max_order=max_order))
    subs = all_subgroups(group)
    return group, subs[draw(st.integers(0, len(subs) - 1))]
