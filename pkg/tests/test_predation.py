import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from schoolsim.core import PredatorState, SimParams, Strategy, SwarmState
from schoolsim.noise import NoiseSource
from schoolsim.predation import (
    flight_force, hunting_force, hunting_force_center, hunting_force_nearest, predation_step,
    predator_spawn, prey_acceleration, run_predation,
)
from schoolsim.school import interaction_sums

QUIET = SimParams(sigma_prey=0.0, sigma_pred=0.0, v_max=100.0)


def test_flight_force_hand_value():
    # delta=1, R1=3, theta1=1: (3/2) * (2, 0)
    p = SimParams(delta=1.0, r1_flee=3.0, theta1=1.0)
    np.testing.assert_allclose(flight_force([2, 0], [0, 0], p), [3.0, 0.0], rtol=1e-15)


def test_center_pursuit_hand_value():
    p = SimParams(r2_hunt=5.0, theta2=0.5, gamma1=0.1, gamma2=0.1)
    prey = SwarmState([[0.0, 0.0]], [[0.0, 0.0]])
    pred = PredatorState([4.0, 0.0], [1.0, 0.0])
    w = (5.0 / 4.0) ** 0.5
    np.testing.assert_allclose(hunting_force_center(prey, pred, p), [-w * (0.4 + 0.01), 0.0], rtol=1e-14)


@given(st.lists(st.floats(-5, 5), min_size=8, max_size=8), st.floats(0.1, 3), st.floats(0.05, 5))
@settings(max_examples=60)
def test_strategies_agree_for_single_prey(vals, theta2, gamma1):
    p = SimParams(theta2=theta2, gamma1=gamma1)
    prey = SwarmState([vals[0:2]], [vals[2:4]])
    pred = PredatorState(vals[4:6], vals[6:8])
    np.testing.assert_allclose(hunting_force_center(prey, pred, p), hunting_force_nearest(prey, pred, p),
                               rtol=1e-12, atol=1e-12)


def test_nearest_strategy_weights_closer_prey_more():
    # term size scales like |y - x_j|^(1 - theta2): nearer prey dominate once theta2 > 1
    p = SimParams(strategy=Strategy.NEAREST, theta2=2.0)
    prey = SwarmState([[1.0, 0.0], [-4.0, 0.0]], np.zeros((2, 2)))
    pred = PredatorState([0.0, 0.0], [0.0, 0.0])
    # the nearer prey on +x dominates, so the predator accelerates toward +x
    assert hunting_force(prey, pred, p)[0] > 0
    assert hunting_force(prey, pred, p.with_(strategy="center"))[0] < 0


def test_hunting_ignores_dead_prey():
    p = SimParams(strategy=Strategy.NEAREST)
    pred = PredatorState([0.0, 0.0], [0.0, 0.0])
    both = SwarmState([[1.0, 0.0], [-4.0, 0.0]], np.zeros((2, 2)), alive=[True, False])
    alone = SwarmState([[1.0, 0.0]], np.zeros((1, 2)))
    for s in (Strategy.NEAREST, Strategy.CENTER):
        np.testing.assert_array_equal(hunting_force(both, pred, p.with_(strategy=s)),
                                      hunting_force(alone, pred, p.with_(strategy=s)))


def test_prey_acceleration_dead_rows_zero(five_prey):
    s = SwarmState(five_prey.positions, five_prey.velocities, [True, True, False, True, True])
    acc = prey_acceleration(s, PredatorState([5.0, 5.0], [0.0, 0.0]), SimParams())
    assert not acc[2].any()
    assert np.abs(acc[[0, 1, 3, 4]]).sum() > 0


def test_predation_step_update_order(five_prey):
    p = QUIET.with_(n_prey=5)
    pred = PredatorState([6.0, 1.0], [-0.5, 0.2])
    new, new_pred, ev = predation_step(five_prey, pred, p, NoiseSource(0), 1)
    x1 = five_prey.positions + five_prey.velocities * p.dt
    y1 = pred.position + pred.velocity * p.dt
    acc = interaction_sums(x1, five_prey.velocities, np.ones(5, bool), p)
    acc += np.array([flight_force(x, y1, p) for x in x1])
    v1 = five_prey.velocities + acc * p.dt
    np.testing.assert_allclose(new.positions, x1, rtol=1e-15)
    np.testing.assert_allclose(new_pred.position, y1, rtol=1e-15)
    np.testing.assert_allclose(new.velocities, v1, rtol=1e-12)
    # predator uses post-step prey positions and velocities
    after = SwarmState(x1, v1)
    expected = pred.velocity + hunting_force(after, PredatorState(y1, pred.velocity), p) * p.dt
    np.testing.assert_allclose(new_pred.velocity, expected, rtol=1e-12)
    assert ev.eaten_ids == []


@pytest.mark.parametrize("gap, eaten", [(0.5, False), (0.5 - 1e-9, True), (0.2, True)])
def test_capture_threshold_is_strict(gap, eaten):
    p = QUIET.with_(n_prey=1, m_catch=0.5, r_crit=1.0)
    prey = SwarmState([[0.0, 0.0]], [[0.0, 0.0]])
    pred = PredatorState([gap, 0.0], [0.0, 0.0])
    new, _, ev = predation_step(prey, pred, p, NoiseSource(0), 1)
    assert bool(ev.eaten_ids) is eaten
    assert new.alive[0] is not eaten


def test_dead_prey_are_frozen(five_prey):
    p = SimParams(n_prey=5)
    s = SwarmState(five_prey.positions, five_prey.velocities, [False, True, True, True, True])
    new, _, _ = predation_step(s, PredatorState([9.0, 0.0], [0.0, 0.0]), p, NoiseSource(1), 1)
    np.testing.assert_array_equal(new.positions[0], s.positions[0])
    np.testing.assert_array_equal(new.velocities[0], s.velocities[0])
    assert not new.alive[0]


def test_prey_speed_cap_applied(five_prey):
    p = SimParams(n_prey=5, v_max=0.01)
    new, _, _ = predation_step(five_prey, PredatorState([1.0, 0.0], [0.0, 0.0]), p, NoiseSource(1), 1)
    assert np.linalg.norm(new.velocities, axis=1).max() <= 0.01 * (1 + 1e-12)


def test_predator_spawn_geometry(five_prey):
    p = SimParams(r1_flee=3.0)
    pred = predator_spawn(five_prey, p, NoiseSource(2))
    xc = five_prey.positions.mean(axis=0)
    assert np.linalg.norm(pred.position - xc) == pytest.approx(6.0, rel=1e-12)
    assert not pred.velocity.any()
    pred = predator_spawn(five_prey, p.with_(spawn_dist=2.5), NoiseSource(2))
    assert np.linalg.norm(pred.position - xc) == pytest.approx(2.5, rel=1e-12)


def test_run_predation_record_consistency(five_prey):
    p = SimParams(n_prey=5, t_max=400, r1_flee=2.0, sigma_prey=0.02, sigma_pred=0.02)
    pred = PredatorState([3.0, 0.0], [0.0, 0.0])
    rec = run_predation(five_prey, pred, p, NoiseSource(3), record_every=25, keep_frames=True)
    assert rec.n_survived[0] == 5
    assert (np.diff(rec.n_survived) <= 0).all()
    assert rec.n_eaten == 5 - rec.n_survived[-1]
    for i, t in rec.eaten_times.items():
        assert rec.n_survived[t] < rec.n_survived[t - 1]
    assert rec.metric_steps[0] == 0 and rec.metric_steps[-1] == len(rec.n_survived) - 1
    assert len(rec.frames) == len(rec.metric_steps) == len(rec.diameter) == len(rec.n_groups)
    # alive flags never come back
    alive = np.array([f.alive for f in rec.frames])
    assert (np.diff(alive.astype(int), axis=0) <= 0).all()


def test_run_stops_when_all_eaten():
    p = QUIET.with_(n_prey=1, t_max=1000)
    prey = SwarmState([[0.0, 0.0]], [[0.0, 0.0]])
    pred = PredatorState([0.3, 0.0], [0.0, 0.0])
    rec = run_predation(prey, pred, p, NoiseSource(0))
    assert rec.eaten_times == {0: 1}
    assert len(rec.n_survived) == 2
    assert rec.diameter[-1] == 0.0 and rec.n_groups[-1] == 0


def test_run_predation_deterministic(five_prey):
    p = SimParams(n_prey=5, t_max=200)
    pred = PredatorState([4.0, 0.0], [0.0, 0.0])
    a = run_predation(five_prey, pred, p, NoiseSource(9), keep_frames=True)
    b = run_predation(five_prey, pred, p, NoiseSource(9), keep_frames=True)
    np.testing.assert_array_equal(a.frames[-1].positions, b.frames[-1].positions)
    np.testing.assert_array_equal(a.n_survived, b.n_survived)


def test_record_every_validated(five_prey):
    with pytest.raises(ValueError):
        run_predation(five_prey, PredatorState([4.0, 0.0], [0.0, 0.0]), SimParams(), NoiseSource(0),
                      record_every=0)


def test_three_dimensional_run():
    p = SimParams(n_prey=6, dims=3, t_max=100, t_max_school=100)
    from schoolsim.montecarlo import run_trial
    rec = run_trial(p, 5)
    assert rec.n_survived[0] == 6
