import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from balloonsim.atmosphere import AtmosphereModel, M_AIR
from balloonsim.control import (
    Command,
    ControlConfig,
    InfeasibleCommandError,
    MassDelta,
    apply_command,
    required_mass_for_rate,
    required_moles_for_rate,
)
from balloonsim.dynamics import (
    BalloonParams,
    MassState,
    cross_section_area,
    envelope_volume,
    steady_ascent_rate,
    total_mass,
)

ATMOSPHERE = AtmosphereModel()
PARAMS = BalloonParams(m_envelope=1.2, m_payload=0.8)
AREA_V2 = cross_section_area(2.0)


class TestRequiredMass:
    def test_zero_rate_is_neutral_mass(self):
        m = required_mass_for_rate(0.9, 3.0, 0.0, 0.2, 2.0, 9.81)
        assert m == pytest.approx(0.9 * 3.0)

    def test_inverse_of_terminal_velocity_example(self):
        m = required_mass_for_rate(1.0, 2.0, 5.0556, 0.2, AREA_V2, 9.81)
        assert m == pytest.approx(1.5, rel=1e-4)

    @settings(max_examples=100)
    @given(st.floats(0.05, 1.3), st.floats(0.5, 100.0), st.floats(-5, 5),
           st.floats(0.1, 0.3), st.floats(0.2, 20.0))
    def test_round_trip_against_forward_model(self, rho, vol, v, c_d, area):
        m = required_mass_for_rate(rho, vol, v, c_d, area, 9.81)
        if m <= 0:
            return  # unphysical corner: rate unreachable by any positive mass
        assert steady_ascent_rate(rho, vol, m, c_d, area, 9.81) == \
            pytest.approx(v, abs=1e-9)


class TestRequiredMoles:
    def setup_method(self):
        self.atm = ATMOSPHERE.sample(5_000.0)

    def solve(self, m_fixed, v):
        return required_moles_for_rate(PARAMS, m_fixed, self.atm.temperature,
                                       self.atm.pressure, self.atm.density, v)

    def forward(self, m_fixed, n):
        volume = envelope_volume(n, self.atm.temperature, self.atm.pressure)
        area = cross_section_area(volume)
        mass = m_fixed + n * PARAMS.molar_mass_helium
        return steady_ascent_rate(self.atm.density, volume, mass,
                                  PARAMS.c_drag, area, PARAMS.g)

    def test_identity_at_current_rate(self):
        n = self.solve(2.5, 0.0)
        rate = self.forward(2.5, n)
        assert self.solve(2.5, rate) == pytest.approx(n, abs=1e-9)

    def test_descend_at_three(self):
        n = self.solve(2.5, -3.0)
        assert self.forward(2.5, n) == pytest.approx(-3.0, abs=1e-6)

    def test_lift_per_mole_guard_value(self):
        sea = ATMOSPHERE.sample(0.0)
        per_mole = sea.density * PARAMS.gas_constant * sea.temperature / sea.pressure
        assert per_mole == pytest.approx(M_AIR, rel=1e-9)
        assert per_mole == pytest.approx(0.02896, abs=1e-4)
        assert per_mole > PARAMS.molar_mass_helium

    @settings(max_examples=100, deadline=None)
    @given(st.floats(0.5, 20.0), st.floats(-3, 3), st.floats(0, 25_000))
    def test_round_trip_random(self, m_fixed, v, altitude):
        atm = ATMOSPHERE.sample(altitude)
        try:
            n = required_moles_for_rate(PARAMS, m_fixed, atm.temperature,
                                        atm.pressure, atm.density, v)
        except InfeasibleCommandError:
            return
        volume = envelope_volume(n, atm.temperature, atm.pressure)
        area = cross_section_area(volume)
        mass = m_fixed + n * PARAMS.molar_mass_helium
        rate = steady_ascent_rate(atm.density, volume, mass,
                                  PARAMS.c_drag, area, PARAMS.g)
        assert rate == pytest.approx(v, abs=1e-6)

    def test_infeasible_when_drag_exceeds_fixed_weight(self):
        # tiny fixed mass, fast descent: even n=0 cannot be heavy enough
        with pytest.raises(InfeasibleCommandError):
            self.solve(1e-6, -5.0)


class TestMassDelta:
    def test_rejects_positive_deltas(self):
        with pytest.raises(ValueError):
            MassDelta(d_n_helium=0.1)
        with pytest.raises(ValueError):
            MassDelta(d_m_sand=0.1)

    def test_rejects_touching_both(self):
        with pytest.raises(ValueError):
            MassDelta(d_n_helium=-0.1, d_m_sand=-0.1)


class TestApplyCommand:
    def setup_method(self):
        self.atm = ATMOSPHERE.sample(5_000.0)
        self.config = ControlConfig()
        m_fixed = PARAMS.m_envelope + PARAMS.m_payload + 0.5
        self.n_neutral = required_moles_for_rate(
            PARAMS, m_fixed, self.atm.temperature, self.atm.pressure,
            self.atm.density, 0.0)

    def test_float_inside_dead_band(self):
        delta = apply_command(MassState(self.n_neutral, 0.5), Command.FLOAT,
                              self.atm, 0.0, PARAMS, self.config, 60.0)
        assert delta == MassDelta()

    def test_up_with_no_sand_saturates(self):
        # neutral with no sand aboard: rising to v_up needs mass gone, none left
        n = required_moles_for_rate(
            PARAMS, PARAMS.m_envelope + PARAMS.m_payload, self.atm.temperature,
            self.atm.pressure, self.atm.density, 0.0)
        delta = apply_command(MassState(n, 0.0), Command.UP,
                              self.atm, 0.0, PARAMS, self.config, 60.0)
        assert delta.d_m_sand == 0.0
        assert delta.d_n_helium == 0.0
        assert delta.saturated

    def test_down_reaches_target_with_generous_limit(self):
        config = ControlConfig(max_vent_rate=1e3)
        state = MassState(self.n_neutral, 0.5)
        delta = apply_command(state, Command.DOWN, self.atm, 0.0, PARAMS,
                              config, 60.0)
        assert delta.d_n_helium < 0 and delta.d_m_sand == 0.0
        n = state.n_helium + delta.d_n_helium
        volume = envelope_volume(n, self.atm.temperature, self.atm.pressure)
        mass = total_mass(PARAMS, MassState(n, 0.5))
        rate = steady_ascent_rate(self.atm.density, volume, mass, PARAMS.c_drag,
                                  cross_section_area(volume), PARAMS.g)
        assert rate == pytest.approx(config.v_down, abs=1e-6)

    def test_up_reaches_target_with_generous_limit(self):
        config = ControlConfig(max_ballast_rate=1e3)
        state = MassState(self.n_neutral, 0.5)
        delta = apply_command(state, Command.UP, self.atm, 0.0, PARAMS,
                              config, 60.0)
        assert delta.d_m_sand < 0 and delta.d_n_helium == 0.0
        n = state.n_helium
        volume = envelope_volume(n, self.atm.temperature, self.atm.pressure)
        mass = total_mass(PARAMS, MassState(n, 0.5 + delta.d_m_sand))
        rate = steady_ascent_rate(self.atm.density, volume, mass, PARAMS.c_drag,
                                  cross_section_area(volume), PARAMS.g)
        assert rate == pytest.approx(config.v_up, abs=1e-6)

    def test_float_regulates_toward_zero(self):
        rising = apply_command(MassState(self.n_neutral + 5.0, 0.5),
                               Command.FLOAT, self.atm, 1.5, PARAMS,
                               self.config, 60.0)
        assert rising.d_n_helium < 0 and rising.d_m_sand == 0.0
        sinking = apply_command(MassState(self.n_neutral - 5.0, 0.5),
                                Command.FLOAT, self.atm, -1.5, PARAMS,
                                self.config, 60.0)
        assert sinking.d_m_sand < 0 and sinking.d_n_helium == 0.0

    @settings(max_examples=200, deadline=None)
    @given(st.sampled_from(list(Command)), st.floats(0, 300), st.floats(0, 3),
           st.floats(-4, 4), st.floats(0, 25_000), st.floats(1, 600))
    def test_clamping_and_exclusivity(self, command, n, sand, rate, altitude, dt):
        atm = ATMOSPHERE.sample(altitude)
        delta = apply_command(MassState(n, sand), command, atm, rate, PARAMS,
                              self.config, dt)
        assert delta.d_n_helium <= 0.0 and delta.d_m_sand <= 0.0
        assert -delta.d_n_helium <= self.config.max_vent_rate * dt + 1e-12
        assert -delta.d_m_sand <= self.config.max_ballast_rate * dt + 1e-12
        assert -delta.d_n_helium <= n + 1e-12
        assert -delta.d_m_sand <= sand + 1e-12
        assert delta.d_n_helium == 0.0 or delta.d_m_sand == 0.0


class TestControlConfig:
    def test_rejects_inconsistent_rates(self):
        with pytest.raises(ValueError):
            ControlConfig(v_up=0.1, float_band=0.2)
        with pytest.raises(ValueError):
            ControlConfig(v_down=0.5)
        with pytest.raises(ValueError):
            ControlConfig(max_vent_rate=0.0)
