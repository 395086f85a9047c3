import numpy as np
import pytest

from sfqramp.schedule import (
    ClockGrid,
    Discarded,
    Ramp,
    Schedule,
    absolute_kick_times,
    ramp_tick_indices,
    schedule_spectrum,
    snap_to_clock,
    total_duration,
)

T = 1.7  # arbitrary period for structural tests


def make_schedule(r, times, n_train):
    return Schedule(
        ramp=Ramp(r_periods=r, times=tuple(times)),
        n_train=n_train,
        coupling="inductive",
        theta_kick=0.15,
    )


class TestDuration:
    @pytest.mark.parametrize(
        "r,n_train,periods",
        [(3, 10, 15), (1, 0, 2), (5, 1, 10), (1, 3, 4)],
    )
    def test_formula(self, r, n_train, periods):
        sched = make_schedule(r, [], n_train)
        assert total_duration(sched, T) == pytest.approx(periods * T)

    def test_integer_multiple_of_period(self):
        for r in (1, 2, 5):
            for nt in (0, 1, 7):
                d = total_duration(make_schedule(r, [], nt), T)
                assert abs(d / T - round(d / T)) < 1e-12


class TestAbsoluteKickTimes:
    def test_pure_train(self):
        kicks = absolute_kick_times(make_schedule(1, [], 3), T)
        assert np.allclose(kicks, [T, 2 * T, 3 * T])

    def test_mirror_construction(self):
        kicks = absolute_kick_times(make_schedule(1, [T / 4], 1), T)
        assert np.allclose(kicks, [T / 4, T, 2 * T - T / 4])

    def test_mirror_symmetry_property(self, rng):
        for _ in range(50):
            r = int(rng.integers(1, 6))
            n = int(rng.integers(0, 7))
            times = np.sort(rng.uniform(0.0, r * T, size=n))
            sched = make_schedule(r, times, int(rng.integers(1, 12)))
            kicks = absolute_kick_times(sched, T)
            duration = total_duration(sched, T)
            mirrored = np.sort(duration - kicks)
            assert np.abs(np.sort(kicks) - mirrored).max() < 1e-9

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="zero-gap"):
            absolute_kick_times(make_schedule(2, [0.5, 0.5], 1), T)

    def test_rejects_out_of_window(self):
        with pytest.raises(ValueError, match="inside"):
            absolute_kick_times(make_schedule(1, [1.5 * T], 1), T)


class TestSnapToClock:
    grid = ClockGrid.from_period(128, T)

    def test_single_pulse_to_nearest(self):
        ramp = Ramp(r_periods=1, times=(0.3 * self.grid.tick,))
        snapped = snap_to_clock(ramp, self.grid)
        assert snapped.times == (0.0,)

    def test_distinctness_forces_split(self):
        tick = self.grid.tick
        ramp = Ramp(r_periods=1, times=(1.4 * tick, 1.6 * tick))
        snapped = snap_to_clock(ramp, self.grid)
        assert np.allclose(snapped.times, (tick, 2 * tick))

    def test_three_in_one_interval_discarded(self):
        tick = self.grid.tick
        ramp = Ramp(r_periods=1, times=(1.1 * tick, 1.4 * tick, 1.9 * tick))
        outcome = snap_to_clock(ramp, self.grid)
        assert isinstance(outcome, Discarded)
        assert "two pulses" in outcome.reason

    def test_idempotent(self, rng):
        for _ in range(20):
            r = int(rng.integers(1, 6))
            n = int(rng.integers(1, 7))
            times = np.sort(rng.uniform(0.0, r * T, size=n))
            first = snap_to_clock(Ramp(r_periods=r, times=tuple(times)), self.grid)
            if isinstance(first, Discarded):
                continue
            again = snap_to_clock(first, self.grid)
            assert again == first

    def test_boundary_tick_pulled_inside(self):
        almost_end = T - 0.2 * self.grid.tick
        snapped = snap_to_clock(Ramp(r_periods=1, times=(almost_end,)), self.grid)
        assert snapped.times[0] == pytest.approx(127 * self.grid.tick)
        indices = ramp_tick_indices(snapped, self.grid)
        assert indices == [127]

    def test_mid_tick_tie_breaks_earlier(self):
        # unit tick makes the midpoint exact, so both neighbours tie
        grid = ClockGrid.from_period(4, 4.0)
        snapped = snap_to_clock(Ramp(r_periods=1, times=(2.5,)), grid)
        assert snapped.times[0] == pytest.approx(2.0)

    def test_optimization_variable_count(self):
        # 128x clock with the longest five-period ramp: 640 candidate ticks
        grid = ClockGrid.from_period(128, T)
        assert 5 * grid.multiple == 640

    def test_exact_duplicates_discarded(self):
        tick = self.grid.tick
        ramp = Ramp(r_periods=1, times=(3 * tick, 3 * tick))
        assert isinstance(snap_to_clock(ramp, self.grid), Discarded)


class TestSpectrum:
    def test_zero_frequency_counts_kicks(self):
        sched = make_schedule(2, [0.3, 1.7], 5)
        value = schedule_spectrum(sched, T, 0.0)
        assert value == pytest.approx(9.0)  # 2 ramp + 5 train + 2 mirrored

    def test_single_kick_unit_magnitude(self):
        sched = make_schedule(1, [], 1)
        for omega in (0.0, 0.7, 3.3):
            assert abs(schedule_spectrum(sched, T, omega)) == pytest.approx(1.0)
        assert schedule_spectrum(sched, T, 0.0) == pytest.approx(1.0 + 0.0j)

    def test_train_in_phase_at_qubit_frequency(self):
        omega01 = 2 * np.pi / T
        for n_train in (3, 10, 21):
            sched = make_schedule(1, [], n_train)
            assert abs(schedule_spectrum(sched, T, omega01)) == pytest.approx(
                n_train, abs=1e-10
            )


class TestValidation:
    def test_ramp_limits(self):
        with pytest.raises(ValueError):
            Ramp(r_periods=0, times=())
        with pytest.raises(ValueError):
            Ramp(r_periods=1, times=tuple(np.linspace(0, 1, 7)))
        with pytest.raises(ValueError):
            Ramp(r_periods=1, times=(0.5, 0.2))
        with pytest.raises(ValueError):
            Ramp(r_periods=1, times=(-0.1,))

    def test_schedule_limits(self):
        with pytest.raises(ValueError):
            make_schedule(1, [], -1)
        with pytest.raises(ValueError):
            Schedule(Ramp(1, ()), 1, "magnetic", 0.15)
        with pytest.raises(ValueError):
            Schedule(Ramp(1, ()), 1, "inductive", 0.0)

    def test_grid_consistency(self):
        grid = ClockGrid.from_period(64, T)
        assert grid.tick * grid.multiple == pytest.approx(T)
        with pytest.raises(ValueError):
            ClockGrid(multiple=0, tick=0.1)
