import pytest

from z2ncalc.grading import (
    GradingError,
    check_degree,
    deg_add,
    dot2,
    format_degree,
    is_even,
    is_odd,
    koszul_sign,
    order_position,
    parity,
    standard_order,
    zero_degree,
)


def test_check_degree():
    check_degree((0, 1), 2)
    with pytest.raises(GradingError):
        check_degree((0, 2), 2)
    with pytest.raises(GradingError):
        check_degree((0, 1, 1), 2)


def test_deg_add_is_mod2():
    assert deg_add((1, 0), (1, 1)) == (0, 1)
    assert deg_add((1, 1), (1, 1)) == (0, 0)


def test_koszul_sign_values():
    assert koszul_sign((0, 0), (1, 1)) == 1
    assert koszul_sign((0, 1), (1, 0)) == 1
    assert koszul_sign((0, 1), (0, 1)) == -1
    assert koszul_sign((1, 1), (1, 1)) == 1
    assert koszul_sign((1, 1), (0, 1)) == -1


def test_koszul_sign_symmetric_and_biadditive():
    degs = standard_order(3)
    for a in degs:
        for b in degs:
            assert koszul_sign(a, b) == koszul_sign(b, a)
            for c in degs:
                assert koszul_sign(deg_add(a, b), c) == (
                    koszul_sign(a, c) * koszul_sign(b, c)
                )


def test_parity_matches_self_pairing():
    for d in standard_order(3):
        assert parity(d) == dot2(d, d) % 2
        assert is_even(d) == (parity(d) == 0)
        assert is_odd(d) != is_even(d)


def test_standard_order_n1():
    assert standard_order(1) == ((0,), (1,))


def test_standard_order_n2():
    assert standard_order(2) == ((0, 0), (1, 1), (0, 1), (1, 0))


def test_standard_order_n3():
    assert standard_order(3) == (
        (0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0),
        (0, 0, 1), (0, 1, 0), (1, 0, 0), (1, 1, 1),
    )


def test_standard_order_evens_before_odds():
    for n in (1, 2, 3, 4):
        order = standard_order(n)
        assert len(order) == 2 ** n
        assert len(set(order)) == 2 ** n
        parities = [parity(d) for d in order]
        assert parities == sorted(parities)


def test_order_position_roundtrip():
    for n in (1, 2, 3):
        for i, d in enumerate(standard_order(n)):
            assert order_position(d, n) == i


def test_zero_degree_and_format():
    assert zero_degree(3) == (0, 0, 0)
    assert format_degree((1, 0, 1)) == "(1,0,1)"
