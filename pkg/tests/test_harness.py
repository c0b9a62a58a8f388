import numpy as np
import pytest

from tiltmat import (
    NotReversibleError,
    PeriodicError,
    ReversibleChain,
    conjecture_scan,
    converge_demo,
    random_reversible,
)

THREE_CYCLE = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]


def lazy_chain(m, seed, hold=0.95):
    """Slow reversible chain: convex mix of the identity and a random kernel."""
    base = random_reversible(m, seed)
    P = hold * np.eye(m) + (1.0 - hold) * base.kernel.matrix
    return ReversibleChain.from_kernel(P)


def test_converge_constant_ones_matches_rate():
    chain = random_reversible(5, seed=50)
    report = converge_demo(chain, [np.ones(5)], n=60)
    assert report.n_steps == 60
    assert report.errors.shape == (60,)
    assert abs(report.fitted_rate - report.predicted_rate) < 0.05


def test_converge_decaying_schedule_matches_rate():
    # u_i -> ones quickly, so the tail decays at the kernel's own rate
    chain = random_reversible(4, seed=51)
    rng = np.random.default_rng(51)
    schedule = [1.0 + 0.5 ** i * rng.uniform(0.0, 1.0, size=4) for i in range(1, 13)]
    report = converge_demo(chain, schedule, n=80)
    assert abs(report.fitted_rate - report.predicted_rate) < 0.05


def test_converge_rank_one_kernel():
    # every tilt of a rank-1 kernel is rank-1, so the product is at its limit
    # from step one and no rate can be fitted
    mu = np.array([0.2, 0.3, 0.5])
    P = np.tile(mu, (3, 1))
    chain = ReversibleChain.from_kernel(P)
    report = converge_demo(chain, [np.array([1.0, 2.0, 0.5])], n=10)
    assert report.errors.max() < 1e-12
    assert report.fitted_rate == 0.0
    assert report.predicted_rate < 1e-12


def test_converge_bound_curve_dominates():
    chain = lazy_chain(6, seed=52)
    rng = np.random.default_rng(52)
    schedule = [rng.uniform(1.0, 1.3, size=6) for _ in range(5)]
    report = converge_demo(chain, schedule, n=40)
    assert np.all(report.bound_curve > 0.0)
    # the bound curve controls the observed error up to the step-one constant
    c0 = report.errors[0] / report.bound_curve[0]
    valid = report.errors >= 1e-13
    assert np.all(report.errors[valid] <= 2.0 * c0 * report.bound_curve[valid])


def test_converge_tail_ratio_tracks_second_eigenvalue():
    chain = lazy_chain(6, seed=53)
    report = converge_demo(chain, [np.ones(6)], n=160)
    ratios = report.errors[1:] / report.errors[:-1]
    tail = ratios[120:]
    assert np.abs(tail - report.predicted_rate).max() < 0.02
    assert abs(report.fitted_rate - report.predicted_rate) < 0.05


def test_converge_schedule_extension_repeats_last():
    chain = random_reversible(3, seed=54)
    u1 = np.array([1.0, 1.5, 2.0])
    u2 = np.array([2.0, 1.0, 1.0])
    short = converge_demo(chain, [u1, u2], n=6)
    explicit = converge_demo(chain, [u1, u2, u2, u2, u2, u2], n=6)
    assert np.array_equal(short.errors, explicit.errors)
    assert np.array_equal(short.bound_curve, explicit.bound_curve)


def test_converge_periodic_kernel_rejected():
    flip = ReversibleChain.from_kernel([[0.0, 1.0], [1.0, 0.0]])
    with pytest.raises(PeriodicError):
        converge_demo(flip, [np.ones(2)], n=10)


def test_converge_requires_reversible():
    cycle = ReversibleChain.from_kernel(THREE_CYCLE)
    with pytest.raises(NotReversibleError):
        converge_demo(cycle, [np.ones(3)], n=10)


def test_converge_input_errors():
    chain = random_reversible(3, seed=55)
    with pytest.raises(ValueError):
        converge_demo(chain, [np.ones(3)], n=1)
    with pytest.raises(ValueError):
        converge_demo(chain, [], n=10)
    with pytest.raises(ValueError):
        converge_demo(chain, [np.ones(4)], n=10)


def test_converge_report_is_frozen():
    chain = random_reversible(3, seed=56)
    report = converge_demo(chain, [np.ones(3)], n=5)
    with pytest.raises(ValueError):
        report.errors[0] = 0.0
    with pytest.raises(ValueError):
        report.bound_curve[0] = 0.0


def test_scan_is_deterministic():
    a = conjecture_scan(range(2, 4), range(1, 4), trials_per_cell=2, base_seed=5)
    b = conjecture_scan(range(2, 4), range(1, 4), trials_per_cell=2, base_seed=5)
    assert a == b
    c = conjecture_scan(range(2, 4), range(1, 4), trials_per_cell=2, base_seed=6)
    assert a != c


def test_scan_short_products_satisfy_closed_form():
    # for one or two factors the candidate formula is a theorem
    trials = conjecture_scan(range(2, 6), [1, 2], trials_per_cell=4, base_seed=0)
    for trial in trials:
        assert trial.defect <= 1e-9
        assert trial.candidate_residual <= 1e-9


def test_scan_trivial_tilts_any_length():
    # u_spread 0 makes every tilt vector all-ones, so the product is P^n and
    # the candidate formula collapses to the stationary law itself
    trials = conjecture_scan([3, 4], range(1, 7), trials_per_cell=2, u_spread=0.0)
    for trial in trials:
        assert trial.defect <= 1e-12
        assert trial.candidate_residual <= 1e-12


def test_scan_longer_products_report_without_asserting():
    # n >= 3 has no proved formula; the scan must only record the numbers
    trials = conjecture_scan([3], [3], trials_per_cell=3, base_seed=1)
    for trial in trials:
        assert trial.m == 3 and trial.n == 3
        assert np.isfinite(trial.defect) and trial.defect >= 0.0
        assert np.isfinite(trial.candidate_residual) and trial.candidate_residual >= 0.0


def test_scan_cell_order():
    trials = conjecture_scan([3, 2], [2, 1], trials_per_cell=2)
    cells = [(t.m, t.n) for t in trials]
    assert cells == [(2, 1), (2, 1), (2, 2), (2, 2), (3, 1), (3, 1), (3, 2), (3, 2)]


def test_scan_input_errors():
    with pytest.raises(ValueError):
        conjecture_scan([2], [1], trials_per_cell=0)
    with pytest.raises(ValueError):
        conjecture_scan([2], [1], trials_per_cell=1, base_seed=-1)
    with pytest.raises(ValueError):
        conjecture_scan([2], [1], trials_per_cell=1, u_spread=-0.5)
    with pytest.raises(ValueError):
        conjecture_scan([], [1], trials_per_cell=1)
    with pytest.raises(ValueError):
        conjecture_scan([0, 2], [1], trials_per_cell=1)
