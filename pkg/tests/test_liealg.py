from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gaudin_oper.liealg import (
    Weight,
    WeylElement,
    classify_weight_at_infinity,
    pairing,
    shifted_weyl_action,
    type_a_data,
    weyl_group,
)


def test_rank_one_data():
    rd = type_a_data(1)
    assert rd.cartan == ((2,),)
    assert rd.alpha(1) == Weight([2])
    assert rd.rho == rd.omega(1)


def test_rank_two_cartan():
    rd = type_a_data(2)
    assert rd.cartan == ((2, -1), (-1, 2))
    assert pairing(rd, rd.alpha(1), 2) == -1


def test_rank_must_be_positive():
    with pytest.raises(ValueError):
        type_a_data(0)


@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_pairings(rank):
    rd = type_a_data(rank)
    for i in range(1, rank + 1):
        assert pairing(rd, rd.rho, i) == 1
        for j in range(1, rank + 1):
            assert pairing(rd, rd.alpha(j), i) == rd.cartan[i - 1][j - 1]
            assert pairing(rd, rd.omega(j), i) == int(i == j)


def test_pairing_examples():
    a2, a1 = type_a_data(2), type_a_data(1)
    assert pairing(a2, a2.omega(1), 1) == 1
    assert pairing(a1, a1.alpha(1), 1) == 2
    assert pairing(a2, a2.rho, 2) == 1
    with pytest.raises(IndexError):
        pairing(a2, a2.rho, 3)


def test_inner_product_normalization():
    rd = type_a_data(3)
    for i in range(1, 4):
        assert rd.inner(rd.alpha(i), rd.alpha(i)) == 2
        assert rd.inner(rd.omega(i), rd.alpha(i)) == 1


def test_epsilon_coordinates():
    rd = type_a_data(2)
    assert rd.epsilon_coordinates(rd.omega(1)) == (Fraction(2, 3), Fraction(-1, 3), Fraction(-1, 3))
    for lam in (rd.omega(1), rd.alpha(2), Weight([3, -1])):
        assert rd.from_epsilon(rd.epsilon_coordinates(lam)) == lam


@pytest.mark.parametrize("rank,expected", [(1, 2), (2, 6), (3, 24)])
def test_weyl_group_order(rank, expected):
    W = weyl_group(type_a_data(rank))
    assert len(W) == expected
    assert len(set(W)) == expected
    assert max(w.length for w in W) == rank * (rank + 1) // 2


def test_shifted_action_examples():
    a1, a2 = type_a_data(1), type_a_data(2)
    assert shifted_weyl_action(a1, WeylElement(1, ()), Weight([5])) == Weight([5])
    assert shifted_weyl_action(a1, WeylElement(1, (1,)), a1.zero()) == Weight([-2])
    # word acts right to left: s2 first, then s1
    s1s2 = WeylElement(2, (1, 2))
    assert shifted_weyl_action(a2, s1s2, a2.zero()) == Weight([-3, 0])
    assert shifted_weyl_action(a2, WeylElement(2, (2, 1)), a2.zero()) == Weight([0, -3])


def test_w0_is_longest_element():
    rd = type_a_data(3)
    longest = max(weyl_group(rd), key=lambda w: w.length)
    lam = Weight([1, 2, 5])
    assert longest.act(rd, lam) == rd.w0(lam)


def test_classify_examples():
    rd = type_a_data(1)
    lam, w = classify_weight_at_infinity(rd, Weight([0]))
    assert lam == Weight([0]) and w == WeylElement.identity(1)
    lam, w = classify_weight_at_infinity(rd, Weight([-2]))
    assert lam == Weight([0]) and w == WeylElement(1, (1,))
    lam, w = classify_weight_at_infinity(rd, Weight([3]))
    assert lam == Weight([3]) and w.length == 0
    assert classify_weight_at_infinity(rd, Weight([-1])) is None


def test_weyl_dimension():
    rd = type_a_data(2)
    assert rd.weyl_dimension(rd.omega(1)) == 3
    assert rd.weyl_dimension(rd.rho) == 8
    assert rd.weyl_dimension(Weight([2, 0])) == 6


def test_casimir_values():
    a1 = type_a_data(1)
    assert a1.casimir_value(Weight([1])) == Fraction(3, 4)
    assert a1.casimir_value(Weight([2])) == 2


ranks = st.integers(1, 3)


@given(ranks, st.data())
def test_shifted_action_is_a_group_action(rank, data):
    rd = type_a_data(rank)
    W = weyl_group(rd)
    lam = Weight(data.draw(st.lists(st.integers(-4, 4), min_size=rank, max_size=rank)))
    for w1 in W:
        for w2 in W:
            lhs = shifted_weyl_action(rd, w1 * w2, lam)
            rhs = shifted_weyl_action(rd, w1, shifted_weyl_action(rd, w2, lam))
            assert lhs == rhs


@given(ranks, st.data())
def test_classification_round_trip(rank, data):
    rd = type_a_data(rank)
    mu = Weight(data.draw(st.lists(st.integers(-5, 5), min_size=rank, max_size=rank)))
    res = classify_weight_at_infinity(rd, mu)
    if res is None:
        # mu + rho is fixed by some reflection
        assert any(r.act(rd, mu + rd.rho) == mu + rd.rho for r in weyl_group(rd) if r.length > 0)
        return
    lam_inf, w = res
    assert lam_inf.is_dominant_integral()
    assert shifted_weyl_action(rd, w, -rd.w0(lam_inf)) == mu
    if mu.is_dominant_integral():
        assert w.length == 0
