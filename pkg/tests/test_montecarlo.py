import numpy as np
import pytest

from schoolsim import montecarlo
from schoolsim.core import DivergenceError, Pattern, SimParams, Strategy
from schoolsim.montecarlo import (
    TrialSummary, aggregate, run_trial, run_trials, summarize, sweep_school_size,
)
from schoolsim.noise import derive_seed

SMALL = SimParams(n_prey=4, t_max=150, t_max_school=150, sigma_prey=0.02, sigma_pred=0.02)


def test_trial_is_reproducible():
    a, b = run_trial(SMALL, 77), run_trial(SMALL, 77)
    np.testing.assert_array_equal(a.n_survived, b.n_survived)
    np.testing.assert_array_equal(a.diameter, b.diameter)
    assert a.seed == 77


def test_trials_use_derived_seeds():
    out = run_trials(SMALL, 3, base_seed=5)
    assert [s.seed for s in out] == [derive_seed(5, k) for k in range(3)]
    assert [s.index for s in out] == [0, 1, 2]
    direct = summarize(run_trial(SMALL, derive_seed(5, 2)), SMALL, 2)
    assert out[2].p_eaten == direct.p_eaten and out[2].t_alive == direct.t_alive


def test_parallel_matches_serial():
    serial = run_trials(SMALL, 4, base_seed=11, jobs=1)
    parallel = run_trials(SMALL, 4, base_seed=11, jobs=2)
    assert [(s.seed, s.p_eaten, s.t_alive, s.n_eaten) for s in serial] == \
           [(s.seed, s.p_eaten, s.t_alive, s.n_eaten) for s in parallel]


def test_failed_trials_are_reported_not_fatal(monkeypatch):
    real = montecarlo.run_trial

    def flaky(params, seed, **kw):
        if seed == derive_seed(3, 1):
            raise DivergenceError("non-finite state encountered", step=12)
        return real(params, seed, **kw)

    monkeypatch.setattr(montecarlo, "run_trial", flaky)
    out = run_trials(SMALL, 3, base_seed=3)
    assert [s.ok for s in out] == [True, False, True]
    assert "step 12" in out[1].error
    row = aggregate(4, Strategy.CENTER, out)
    assert row.trials == 2 and row.failures == 1


def test_aggregate_hand_values():
    sums = [TrialSummary(index=k, seed=k, p_eaten=pe, t_alive=ta, n_eaten=ne)
            for k, (pe, ta, ne) in enumerate([(0.0, 3000, 0), (0.5, 2000, 1), (1.0, 1000, 2)])]
    row = aggregate(2, Strategy.NEAREST, sums)
    assert row.p_eaten_mean == 0.5
    assert row.p_eaten_std == pytest.approx(0.5)
    assert (row.p_eaten_q25, row.p_eaten_q50, row.p_eaten_q75) == (0.25, 0.5, 0.75)
    assert row.t_alive_mean == 2000 and row.t_alive_std == pytest.approx(1000)
    assert row.n_eaten_mean == 1.0


def test_aggregate_all_failed():
    with pytest.raises(RuntimeError):
        aggregate(3, Strategy.CENTER, [TrialSummary(index=0, seed=0, error="boom")])


def test_sweep_rows_and_stability():
    table = sweep_school_size(SMALL, [1, 3], 2, base_seed=8, strategies=["center", "nearest"])
    assert [(r.n, r.strategy) for r in table.rows] == [
        (1, Strategy.CENTER), (3, Strategy.CENTER), (1, Strategy.NEAREST), (3, Strategy.NEAREST)]
    # adding a size leaves the other rows untouched
    bigger = sweep_school_size(SMALL, [1, 2, 3], 2, base_seed=8, strategies=["center"])
    assert bigger.row(3, "center") == table.row(3, "center")
    with pytest.raises(KeyError):
        table.row(7)


def test_sweep_rejects_bad_sizes():
    with pytest.raises(ValueError):
        sweep_school_size(SMALL, [0], 1, 1)
    with pytest.raises(ValueError):
        run_trials(SMALL, 0, 1)


def test_summary_classifies():
    rec = run_trial(SMALL, 1)
    s = summarize(rec, SMALL, keep_record=True)
    assert isinstance(s.pattern, Pattern)
    assert s.record is rec
