import math

import numpy as np
import pytest

from qcdisc.channels import ChannelFamily, ChannelSpec
from qcdisc.optimizer import BoxDomain, OptimizerConfig, maximize
from qcdisc.strategies import InputSchedule, markovian_value

TIGHT = OptimizerConfig(value_tol=1e-14)


def closed_form_damping(eta0, eta1):
    """Piecewise one-shot optimum for the damping family, derived directly."""
    gamma = math.cos(eta0) + math.cos(eta1)
    if gamma < 1 / math.sqrt(2):
        return 0.25 * (2 + (math.cos(eta1) - math.cos(eta0)) / math.sqrt(1 - gamma**2))
    return 0.5 * (math.sin(eta0) ** 2 + math.cos(eta1) ** 2)


def test_quadratic_1d():
    res = maximize(lambda x: -((x[0] - 0.3) ** 2), BoxDomain.unit(1), TIGHT)
    assert abs(res.best_point[0] - 0.3) <= 1e-6
    assert res.converged


def test_quadratic_2d():
    res = maximize(
        lambda x: -((x[0] - 0.25) ** 2) - 2 * (x[1] - 0.75) ** 2,
        BoxDomain.unit(2),
        TIGHT,
    )
    np.testing.assert_allclose(res.best_point, [0.25, 0.75], atol=1e-6)


def test_boundary_optimum_found_exactly():
    res = maximize(lambda x: x[0] + x[1], BoxDomain.unit(2))
    np.testing.assert_allclose(res.best_point, [1.0, 1.0], atol=1e-9)
    assert abs(res.best_value - 2.0) <= 1e-12


def test_deterministic_for_fixed_seed():
    def f(x):
        return math.sin(5 * x[0]) * math.cos(3 * x[1]) + x[0]

    a = maximize(f, BoxDomain.unit(2), OptimizerConfig(seed=5))
    b = maximize(f, BoxDomain.unit(2), OptimizerConfig(seed=5))
    assert np.array_equal(a.best_point, b.best_point)
    assert a.best_value == b.best_value
    assert a.evaluations == b.evaluations


def test_improves_on_every_lattice_start():
    def f(x):
        return -((x[0] - 0.4) ** 2) - (x[1] - 0.9) ** 2

    res = maximize(f, BoxDomain.unit(2))
    for u in (0.0, 0.5, 1.0):
        for v in (0.0, 0.5, 1.0):
            assert res.best_value >= f((u, v)) - 1e-15


def test_best_value_reevaluates():
    def f(x):
        return -((x[0] - 0.6) ** 2)

    res = maximize(f, BoxDomain.unit(1), TIGHT)
    assert abs(res.best_value - f(res.best_point)) <= 1e-12


def test_budget_exhaustion_sets_converged_false():
    res = maximize(
        lambda x: -((x[0] - 0.3) ** 2), BoxDomain.unit(1), OptimizerConfig(max_evals=4)
    )
    assert not res.converged


def test_extra_starts_are_used():
    # A spike the lattice cannot see; the warm start lands on it.
    def f(x):
        return 1.0 if abs(x[0] - 0.123456) < 1e-9 else 0.0

    cfg = OptimizerConfig(extra_starts=((0.123456,),), max_evals=50)
    res = maximize(f, BoxDomain.unit(1), cfg)
    assert res.best_value == 1.0


def test_latin_hypercube_path_high_dimension():
    # 3^5 lattice points exceed the start cap; the sampled starts must stay
    # in the box and the search must remain deterministic.
    def f(x):
        return -np.sum((np.asarray(x) - 0.5) ** 2)

    a = maximize(f, BoxDomain.unit(5), OptimizerConfig(seed=2, max_evals=400))
    b = maximize(f, BoxDomain.unit(5), OptimizerConfig(seed=2, max_evals=400))
    assert np.array_equal(a.best_point, b.best_point)
    assert np.all(a.best_point >= 0.0) and np.all(a.best_point <= 1.0)
    assert abs(a.best_value) <= 1e-6


def test_domain_validation():
    with pytest.raises(ValueError):
        BoxDomain(0, (), ())
    with pytest.raises(ValueError):
        BoxDomain(2, (0.0, 0.0), (1.0,))
    with pytest.raises(ValueError):
        BoxDomain(1, (1.0,), (0.0,))


def test_bit_flip_one_shot_optimum_at_corner():
    spec0 = ChannelSpec(ChannelFamily.BIT_FLIP, 0.75)
    spec1 = ChannelSpec(ChannelFamily.BIT_FLIP, 0.4)
    res = maximize(
        lambda x: markovian_value(spec0, spec1, InputSchedule.flat(x)),
        BoxDomain.unit(1),
        TIGHT,
    )
    assert min(res.best_point[0], 1 - res.best_point[0]) <= 1e-6
    assert abs(res.best_value - 0.675) <= 1e-9


def test_damping_one_shot_matches_piecewise_form():
    # 8x8 grid spanning both regimes of the piecewise optimum.
    etas = np.linspace(0.05, 0.95, 8) * math.pi / 2
    worst = 0.0
    for eta0 in etas:
        for eta1 in etas:
            if eta0 <= eta1:
                continue
            spec0 = ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, float(eta0))
            spec1 = ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, float(eta1))
            res = maximize(
                lambda x: markovian_value(spec0, spec1, InputSchedule.flat(x)),
                BoxDomain.unit(1),
            )
            worst = max(worst, abs(res.best_value - closed_form_damping(eta0, eta1)))
    assert worst <= 1e-6


def test_damping_interior_optimum_location():
    # gamma < 1/sqrt(2) puts the best input strictly inside the box at
    # r = 1 / (2 (1 - gamma^2)); confirmed against a dense scan.
    eta0, eta1 = 1.35, 1.20
    spec0 = ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, eta0)
    spec1 = ChannelSpec(ChannelFamily.AMPLITUDE_DAMPING, eta1)

    def objective(x):
        return markovian_value(spec0, spec1, InputSchedule.flat(x))

    gamma = math.cos(eta0) + math.cos(eta1)
    assert gamma < 1 / math.sqrt(2)
    r_formula = 1 / (2 * (1 - gamma**2))
    scan = np.linspace(0.0, 1.0, 20001)
    r_scan = scan[int(np.argmax([objective((r,)) for r in scan]))]
    assert abs(r_scan - r_formula) <= 1e-4
    res = maximize(objective, BoxDomain.unit(1), TIGHT)
    assert abs(res.best_point[0] - r_formula) <= 1e-5
