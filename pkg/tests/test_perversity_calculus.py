import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gserre.errors import InvariantViolation
from gserre.perversity_calculus import (
    NumericalPerversity,
    dual_by_conjugation,
    enumerate_Pn_rho,
    exists_pi_plus_eq_rho,
    in_Pn,
    in_Pn_rho,
    numerical_dual,
    p_rho_criterion,
    p_rho_plus_definitional,
    phi,
    phi_inverse,
    pi_max,
    pi_min,
    pi_plus,
)
from gserre.rho_calculus import TailedFunction, dual, enumerate_w, identity, rho_r

from .conftest import w_functions

WINDOW = 24


def window(f, upto=WINDOW):
    return tuple(f(k) for k in range(upto + 1))


def oracle_Pn_rho(rho, n, horizon):
    """Level-n perversities listed as value windows, by direct search over
    increment words; independent of the package's enumerator."""
    target = window(rho)
    found = set()
    for word in itertools.product((0, 1), repeat=horizon):
        for slope in (0, 1):
            vals = [0]
            for step in word:
                vals.append(vals[-1] + step)
            while len(vals) <= WINDOW:
                vals.append(vals[-1] + slope)
            if not 0 < vals[n] < n:
                continue
            threshold = n - vals[n]
            plus = [v + 1 if k - v >= threshold else v for k, v in enumerate(vals)]
            if any(p > r for p, r in zip(plus, target)):
                continue
            if plus[n:] != list(target[n:]):
                continue
            # dual nondecreasing
            if any((k + 1 - vals[k + 1]) < (k - vals[k]) for k in range(WINDOW)):
                continue
            found.add(tuple(vals))
    return found


CASES = [(rho_r(2), 2), (rho_r(3), 2), (rho_r(3), 3), (rho_r(3), 4), (identity(), 2), (identity(), 3),
         (identity(), 4), (TailedFunction.parse("0,1,2,2,3;+0"), 3), (TailedFunction.parse("0,1,2,2;+1"), 4),
         (TailedFunction.parse("0,1,2,3,3,4;+0"), 5)]


@pytest.mark.parametrize("rho, n", CASES)
def test_enumeration_matches_oracle(rho, n):
    horizon = max(n, rho.horizon) + 2
    got = {window(p) for p in enumerate_Pn_rho(rho, n, horizon)}
    assert got == oracle_Pn_rho(rho, n, horizon)


def test_identity_level_four_has_four_elements():
    assert len(enumerate_Pn_rho(identity(), 4, 8)) == 4
    assert len(oracle_Pn_rho(identity(), 4, 8)) == 4


def test_serre_two_level_two_is_two_to_one():
    elements = [p.encode() for p in enumerate_Pn_rho(rho_r(2), 2, 8)]
    assert elements == ["0,0,1;+0", "0,1;+0"]


@pytest.mark.parametrize("rho, n", CASES)
def test_extremes_are_min_and_max(rho, n):
    elements = enumerate_Pn_rho(rho, n, max(n, rho.horizon) + 2)
    low, high = pi_min(rho, n), pi_max(rho, n)
    assert in_Pn_rho(low, rho, n) and in_Pn_rho(high, rho, n)
    for p in elements:
        assert low.le(p) and p.le(high)


def test_pi_min_closed_form_example():
    # rho_3 at level 4: shift 4 - 3 + 1 = 2, then rho - 1 from 4 on
    assert window(pi_min(rho_r(3), 4), 6) == (0, 0, 0, 1, 2, 2, 2)
    assert window(pi_max(rho_r(3), 4), 6) == (0, 1, 2, 2, 2, 2, 2)


def test_plus_shift_bumps_upward_closed_set():
    p = NumericalPerversity.from_values((0, 0, 1, 1, 2), 1)
    q = pi_plus(p, 3)
    # threshold 3 - 1 = 2: k - p(k) >= 2 exactly for k >= 3
    assert window(q, 6) == (0, 0, 1, 2, 3, 4, 5)


@given(w_functions(max_horizon=8), st.integers(2, 8))
def test_exists_plus_closed_form(rho, n):
    horizon = max(n, rho.horizon) + 1
    brute = any(pi_plus(p, n).func == rho for p in enumerate_Pn_rho(rho, n, horizon))
    assert exists_pi_plus_eq_rho(rho, n) == brute == (rho(n - 1) < rho(n))


@given(w_functions(max_horizon=8), st.integers(2, 8), st.integers(0, 16))
def test_depth_bound_two_paths(rho, n, codim):
    assert p_rho_criterion(codim, rho, n) == p_rho_plus_definitional(codim, rho, n)


def test_depth_bound_example():
    assert p_rho_criterion(2, rho_r(3), 4) == 1
    assert p_rho_criterion(1, rho_r(3), 4) == 0
    assert p_rho_criterion(5, rho_r(3), 4) == 3


@given(w_functions(max_horizon=10))
def test_phi_fibre_is_the_extremes(rho):
    low, high = phi_inverse(rho)
    assert low == pi_min(rho, 2) and high == pi_max(rho, 2)
    assert low != high
    assert low(1) == 0 and high(1) == 1


@pytest.mark.parametrize("h", range(2, 8))
def test_phi_two_to_one_onto_W(h):
    level_two = [NumericalPerversity(f) for f in _wprime(h) if in_Pn(NumericalPerversity(f), 2)]
    images = {}
    for p in level_two:
        images.setdefault(phi(p), []).append(p)
    # phi keeps the horizon within one of the source
    ws = set(enumerate_w(h))
    assert ws <= set(images)
    for rho in ws:
        assert sorted(images[rho], key=lambda p: p(1)) == list(phi_inverse(rho))


def _wprime(h):
    from gserre.rho_calculus import enumerate_wprime

    return list(enumerate_wprime(h))


@given(w_functions(max_horizon=10))
def test_numerical_duality_swaps_fibres(rho):
    d = dual(rho)
    assert numerical_dual(pi_min(rho, 2)) == pi_max(d, 2)
    assert numerical_dual(pi_max(rho, 2)) == pi_min(d, 2)
    assert dual_by_conjugation(rho) == d


@given(w_functions(max_horizon=10))
def test_numerical_dual_involution(rho):
    p = pi_min(rho, 3)
    assert numerical_dual(numerical_dual(p)) == p
    assert in_Pn(numerical_dual(p), 3)


def test_phi_rejects_level_mismatch():
    with pytest.raises(InvariantViolation) as exc:
        phi(NumericalPerversity.from_values((0, 1, 2), 1))
    assert exc.value.code == "perversity.level"


def test_shape_violation():
    with pytest.raises(InvariantViolation) as exc:
        NumericalPerversity.from_values((0, 2), 0)
    assert exc.value.code == "perversity.shape"


@settings(max_examples=50)
@given(st.integers(2, 6))
def test_extremes_need_W(n):
    with pytest.raises(InvariantViolation):
        pi_min(rho_r(1), n)
