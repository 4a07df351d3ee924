import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sppal.errors import ParameterDomainError
from sppal.medium import (
    DB_PER_NEPER,
    absorption_coeff,
    absorption_coeff_db,
    build_medium,
)


def iso9613_alpha_db_oracle(f, t_c, rh_pct, p_kpa):
    """Independent scalar re-derivation of ISO 9613-1 Section 4.

    Structured differently from the library path (scalar math module,
    explicit intermediate names) to guard against transcription slips.
    """
    t = t_c + 273.15
    t_rel = t / 293.15
    p_rel = p_kpa / 101.325
    c_sat = -6.8346 * (273.16 / t) ** 1.261 + 4.6151
    h = rh_pct * 10.0 ** c_sat / p_rel
    fr_o = p_rel * (24.0 + 40400.0 * h * (0.02 + h) / (0.391 + h))
    fr_n = p_rel / math.sqrt(t_rel) * (
        9.0 + 280.0 * h * math.exp(-4.170 * (t_rel ** (-1.0 / 3.0) - 1.0)))
    classical = 1.84e-11 / p_rel * math.sqrt(t_rel)
    vib_o = 0.01275 * math.exp(-2239.1 / t) / (fr_o + f * f / fr_o)
    vib_n = 0.1068 * math.exp(-3352.0 / t) / (fr_n + f * f / fr_n)
    return 8.686 * f * f * (classical + t_rel ** -2.5 * (vib_o + vib_n))


class TestBuildMedium:
    def test_reference_state(self):
        m = build_medium(20.0, 0.70, 101.325)
        # c0 = 331.3 * sqrt(1 + 20/273.15) evaluated by hand
        assert m.sound_speed == pytest.approx(331.3 * math.sqrt(1 + 20 / 273.15),
                                              rel=1e-12)
        assert m.sound_speed == pytest.approx(343.2, abs=0.05)
        # ideal gas with dry-air constant
        assert m.density == pytest.approx(101325.0 / (287.058 * 293.15), rel=1e-12)
        assert m.beta == 1.2

    def test_zero_celsius_is_reference_speed(self):
        assert build_medium(0.0).sound_speed == pytest.approx(331.3, rel=1e-12)

    def test_domain_errors(self):
        with pytest.raises(ParameterDomainError):
            build_medium(relative_humidity=1.5)
        with pytest.raises(ParameterDomainError):
            build_medium(temperature=-40.0)
        with pytest.raises(ParameterDomainError):
            build_medium(pressure=0.0)
        with pytest.raises(ParameterDomainError):
            build_medium(pressure=250.0)

    def test_beta_override(self):
        assert build_medium(beta=3.5).beta == 3.5

    def test_lossless_copy(self, std_air):
        m0 = std_air.lossless()
        assert absorption_coeff(m0, 60e3) == 0.0
        assert m0.sound_speed == std_air.sound_speed


class TestAbsorption:
    # frozen from the in-file oracle at 20 degC / 70 % RH / 101.325 kPa
    FROZEN_DB_PER_M = {
        1e3: 0.004977810847208093,
        10e3: 0.1175073921779229,
        60e3: 2.1689722730443255,
    }

    def test_matches_independent_oracle(self, std_air):
        for f in (1e3, 5e3, 20e3, 40e3, 60e3, 90e3, 150e3):
            want = iso9613_alpha_db_oracle(f, 20.0, 70.0, 101.325)
            got = absorption_coeff_db(std_air, f)
            assert got == pytest.approx(want, rel=1e-12)

    def test_oracle_other_states(self):
        for t_c, rh, p in [(0.0, 0.30, 101.325), (35.0, 0.90, 90.0),
                           (10.0, 0.10, 101.325)]:
            m = build_medium(t_c, rh, p)
            for f in (2e3, 60e3):
                want = iso9613_alpha_db_oracle(f, t_c, 100 * rh, p)
                assert absorption_coeff_db(m, f) == pytest.approx(want, rel=1e-12)

    def test_frozen_values(self, std_air):
        for f, want in self.FROZEN_DB_PER_M.items():
            assert absorption_coeff_db(std_air, f) == pytest.approx(want, rel=1e-12)

    def test_db_neper_ratio(self, std_air):
        f = np.geomspace(100.0, 200e3, 40)
        np.testing.assert_allclose(absorption_coeff_db(std_air, f),
                                   DB_PER_NEPER * absorption_coeff(std_air, f),
                                   rtol=1e-14)

    def test_monotonic_in_band(self, std_air):
        assert absorption_coeff(std_air, 90e3) > absorption_coeff(std_air, 40e3)
        f = np.linspace(1e3, 200e3, 400)
        a = absorption_coeff(std_air, f)
        assert np.all(np.diff(a) > 0)

    def test_nonnegative_and_vectorized(self, std_air):
        f = np.geomspace(10.0, 500e3, 50)
        a = absorption_coeff(std_air, f)
        assert a.shape == f.shape
        assert np.all(a >= 0)

    def test_continuity(self, std_air):
        # 1 Hz steps across the band: increments bounded by the physical
        # slope (alpha ~ f^2 puts d(alpha)/df near 7.4e-6 Np/m/Hz at the
        # top of the band) and no jumps (second difference ~ 0)
        f = np.arange(1e3, 200e3, 1.0)
        a = absorption_coeff(std_air, f)
        d1 = np.diff(a)
        assert np.max(np.abs(d1)) < 1.2e-5
        assert np.max(np.abs(np.diff(d1))) < 1e-9

    def test_rejects_nonpositive_frequency(self, std_air):
        with pytest.raises(ParameterDomainError):
            absorption_coeff(std_air, 0.0)
        with pytest.raises(ParameterDomainError):
            absorption_coeff(std_air, np.array([100.0, -5.0]))

    @settings(max_examples=30, deadline=None)
    @given(t=st.floats(-20, 50), rh=st.floats(0, 1),
           logf=st.floats(np.log10(50), np.log10(2e5)))
    def test_property_positive_everywhere(self, t, rh, logf):
        m = build_medium(t, rh)
        assert absorption_coeff(m, 10.0 ** logf) >= 0.0
