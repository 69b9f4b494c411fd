import random
from fractions import Fraction

import pytest

from ioident.algebra import NonGenericPointError
from ioident.dsl import parse_model
from ioident.ioeq import random_instance
from ioident.model import as_linear
from ioident.series import TruncatedSeries, jet_rank, random_input, series_wronskian, simulate

from conftest import model, random_system

F = Fraction


def test_exponential_jet():
    lm = parse_model("system e\nstates x\neq x' = -2*x\nout y = x\n")
    traj = simulate(lm, [], [1], [], 4)
    assert traj.states[0].coefficients == (1, -2, 2, F(-4, 3), F(2, 3))


def test_constant_state_stays_constant():
    lm = model("decay")
    traj = simulate(lm, [1, 2, 3], [4, 5], [], 6)
    assert traj.outputs[1].coefficients == (5, 0, 0, 0, 0, 0, 0)


def test_example1_trajectory_satisfies_two_compartment_relation():
    lm = as_linear(model("example1"))
    u = TruncatedSeries.of([0, 1] + [0] * 7)
    traj = simulate(lm, [1, 2, 3], [1, 1], [u], 8)
    y = traj.outputs[0]
    a01, a12, a21 = 1, 2, 3
    res = (y.derivative(2) + y.derivative(1).scale(a01 + a12 + a21) + y.scale(a01 * a12)).truncate(6) \
        - u.truncate(6).scale(a21)
    assert res.is_zero()


def test_state_equations_hold_on_random_models():
    rng = random.Random(8)
    for _ in range(50):
        lm = random_system(rng, rng.randint(1, 4), rng.randint(1, 2), rng.randint(0, 2))
        params, x0 = random_instance(lm, rng)
        order = 7
        inputs = [random_input(rng, order) for _ in lm.inputs]
        try:
            traj = simulate(lm, params, x0, inputs, order)
        except NonGenericPointError:
            continue
        point = list(params) + [0]
        for i in range(lm.n):
            rhs = TruncatedSeries.constant(lm.f0[i].evaluate(point), order)
            for j in range(lm.n):
                rhs = rhs + traj.states[j].scale(lm.A[i][j].evaluate(point))
            for j in range(lm.kappa):
                rhs = rhs + traj.inputs[j].scale(lm.B[i][j].evaluate(point))
            assert (traj.states[i].derivative() - rhs.truncate(order - 1)).is_zero()


def test_longer_truncation_extends_shorter_one():
    lm = as_linear(model("cyclic"))
    rng = random.Random(3)
    params, x0 = random_instance(lm, rng)
    u = [random_input(rng, 14)]
    short = simulate(lm, params, x0, [s.truncate(8) for s in u], 8)
    long = simulate(lm, params, x0, u, 14)
    for a, b in zip(short.outputs, long.outputs):
        assert b.truncate(8) == a


def test_non_generic_point_is_reported():
    lm = parse_model("system r\nparams p\nstates x\neq x' = x/p\nout y = x\n")
    with pytest.raises(NonGenericPointError):
        simulate(lm, [0], [1], [], 3)


def test_input_validation():
    lm = as_linear(model("example1"))
    with pytest.raises(ValueError):
        simulate(lm, [1, 2, 3], [1, 1], [TruncatedSeries.of([1, 2])], 4)
    with pytest.raises(ValueError):
        simulate(lm, [1, 2], [1, 1], [TruncatedSeries.of([1] * 5)], 4)


def test_wronskian_examples():
    one, t = TruncatedSeries.of([1, 0, 0, 0]), TruncatedSeries.of([0, 1, 0, 0])
    assert series_wronskian([t, one]).coefficients == (-1, 0, 0)
    assert series_wronskian([one, t]).coefficients == (1, 0, 0)
    assert series_wronskian([]).coefficients == (1,)
    with pytest.raises(ValueError):
        series_wronskian([one] * 5)


def test_wronskian_vanishes_with_constant_output():
    lm = model("decay")
    traj = simulate(lm, [1, 2, 3], [4, 5], [], 10)
    const = TruncatedSeries.constant(1, 10)
    assert series_wronskian([traj.outputs[0], traj.outputs[1], const]).is_zero()


def test_wronskian_nonzero_on_two_compartment_trajectory():
    lm = as_linear(model("example1"))
    u = TruncatedSeries.of([0, 1] + [0] * 8)
    traj = simulate(lm, [1, 2, 3], [1, 1], [u], 9)
    y = traj.outputs[0]
    w = series_wronskian([y.derivative(1).truncate(8), y.truncate(8), u.truncate(8)])
    assert not w.is_zero()


def test_wronskian_of_planted_dependence_is_zero():
    rng = random.Random(4)
    for _ in range(30):
        k = rng.randint(2, 4)
        base = [TruncatedSeries.of([rng.randint(-5, 5) for _ in range(10)]) for _ in range(k - 1)]
        combo = TruncatedSeries.constant(0, 9)
        for b in base:
            combo = combo + b.scale(F(rng.randint(-4, 4), rng.randint(1, 3)))
        series = base + [combo]
        rng.shuffle(series)
        assert series_wronskian(series).is_zero()


def test_jet_rank_agrees_with_wronskian():
    rng = random.Random(8)
    for _ in range(60):
        k = rng.randint(1, 4)
        series = [TruncatedSeries.of([rng.randint(-3, 3) * (rng.random() < 0.6) for _ in range(9)])
                  for _ in range(k)]
        if rng.random() < 0.3 and k > 1:
            series[-1] = series[0].scale(F(rng.randint(-4, 4), rng.randint(1, 3)))
        w = series_wronskian(series)
        if not w.is_zero():
            assert jet_rank(series) == k
        if jet_rank(series) < k:
            assert w.is_zero()
    one, t = TruncatedSeries.of([1, 0, 0]), TruncatedSeries.of([0, 1, 0])
    assert jet_rank([one, t]) == 2 and jet_rank([t, t.scale(3)]) == 1 and jet_rank([]) == 0
