import numpy as np
import pytest
from hypothesis import given, strategies as st

from balloonsim.wind import (
    OutOfDomainError,
    WindField,
    WindFileError,
    WindSynthesisError,
    WindVector,
    advect,
    load_windfield,
    save_windfield,
    synthesize,
)


def small_field(interp="trilinear", boundary=None):
    """2x2x2 grid, u varies along x from 0 to 10, v = -1 everywhere."""
    data = np.zeros((2, 2, 2, 2))
    data[1, :, :, 0] = 10.0
    data[..., 1] = -1.0
    kwargs = {} if boundary is None else {"boundary": boundary}
    return WindField(origin=(0.0, 0.0, 0.0), spacing=(100.0, 100.0, 50.0),
                     counts=(2, 2, 2), data=data, interp=interp, **kwargs)


class TestWindAt:
    def test_node_query_returns_stored_value(self):
        f = small_field()
        assert f.wind_at(100.0, 0.0, 50.0) == WindVector(10.0, -1.0)
        assert f.wind_at(0.0, 100.0, 0.0) == WindVector(0.0, -1.0)

    def test_node_query_nearest_bit_exact(self):
        f = small_field(interp="nearest")
        w = f.wind_at(100.0, 100.0, 0.0)
        assert (w.u, w.v) == (10.0, -1.0)

    def test_uniform_field_constant_everywhere(self):
        data = np.full((2, 2, 2, 2), 3.5)
        f = WindField((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (2, 2, 2), data)
        for q in [(0.2, 0.7, 0.5), (0.99, 0.01, 0.33)]:
            assert f.wind_at(*q) == WindVector(3.5, 3.5)

    def test_midpoint_linear(self):
        f = small_field()
        assert f.wind_at(50.0, 0.0, 0.0).u == pytest.approx(5.0, abs=1e-12)

    @given(st.floats(0, 100), st.floats(0, 100), st.floats(0, 50))
    def test_trilinear_convexity(self, x, y, h):
        f = small_field()
        w = f.wind_at(x, y, h)
        assert 0.0 - 1e-12 <= w.u <= 10.0 + 1e-12
        assert w.v == pytest.approx(-1.0)

    def test_out_of_domain_error_on_xy(self):
        f = small_field()
        with pytest.raises(OutOfDomainError, match="x=-5"):
            f.wind_at(-5.0, 0.0, 0.0)
        with pytest.raises(OutOfDomainError, match="y=200"):
            f.wind_at(0.0, 200.0, 0.0)

    def test_hold_edge_on_altitude(self):
        f = small_field()
        assert f.wind_at(0.0, 0.0, 9_999.0) == f.wind_at(0.0, 0.0, 50.0)
        assert f.wind_at(0.0, 0.0, -10.0) == f.wind_at(0.0, 0.0, 0.0)

    def test_hold_edge_everywhere_when_configured(self):
        f = small_field(boundary={"x": "hold", "y": "hold", "h": "hold"})
        assert f.wind_at(-1e6, 1e6, 1e6) == f.wind_at(0.0, 100.0, 50.0)


class TestAdvect:
    def test_zero_wind(self):
        assert advect(3.0, 4.0, WindVector(0.0, 0.0), 60.0) == (3.0, 4.0)

    def test_hand_arithmetic(self):
        assert advect(0.0, 0.0, WindVector(5.0, -2.0), 60.0) == (300.0, -120.0)

    @given(st.floats(-1e5, 1e5), st.floats(-1e5, 1e5),
           st.floats(-30, 30), st.floats(-30, 30), st.floats(0, 3600))
    def test_composition(self, x, y, u, v, dt):
        w = WindVector(u, v)
        two_steps = advect(*advect(x, y, w, dt), w, dt)
        one_step = advect(x, y, w, 2 * dt)
        assert two_steps[0] == pytest.approx(one_step[0], rel=1e-12, abs=1e-9)
        assert two_steps[1] == pytest.approx(one_step[1], rel=1e-12, abs=1e-9)

    @given(st.floats(-30, 30), st.floats(0, 3600), st.floats(1.5, 3.0))
    def test_linear_in_dt_and_wind(self, u, dt, k):
        x1, _ = advect(0.0, 0.0, WindVector(u, 0.0), dt)
        xk, _ = advect(0.0, 0.0, WindVector(u, 0.0), k * dt)
        assert xk == pytest.approx(k * x1, rel=1e-12, abs=1e-9)

    def test_rejects_negative_dt(self):
        with pytest.raises(ValueError):
            advect(0.0, 0.0, WindVector(1.0, 1.0), -1.0)


class TestFileRoundTrip:
    def test_minimal_round_trip(self, tmp_path):
        f = small_field()
        path = tmp_path / "field.csv"
        save_windfield(f, str(path))
        g = load_windfield(str(path))
        assert g.counts == f.counts
        assert np.array_equal(g.data, f.data)
        assert g.wind_at(100.0, 0.0, 50.0) == WindVector(10.0, -1.0)

    def test_synthesized_round_trip_preserves_nodes(self, tmp_path):
        f = synthesize("random-columns", {"nx": 3, "ny": 2, "nh": 5,
                                          "sigma": 8.0}, seed=7)
        path = tmp_path / "field.csv"
        save_windfield(f, str(path))
        g = load_windfield(str(path))
        assert np.array_equal(g.data, f.data)

    def test_nan_component_names_row(self, tmp_path):
        f = small_field()
        path = tmp_path / "field.csv"
        save_windfield(f, str(path))
        lines = path.read_text().splitlines()
        lines[3] = lines[3].rsplit(",", 1)[0] + ",nan"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(WindFileError, match="line 4"):
            load_windfield(str(path))

    def test_missing_header(self, tmp_path):
        path = tmp_path / "field.csv"
        path.write_text("0,0,0,1,1\n")
        with pytest.raises(WindFileError, match="line 1"):
            load_windfield(str(path))

    def test_wrong_row_count(self, tmp_path):
        f = small_field()
        path = tmp_path / "field.csv"
        save_windfield(f, str(path))
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(WindFileError, match="data rows"):
            load_windfield(str(path))

    def test_non_rectangular_grid_rejected(self, tmp_path):
        f = small_field()
        path = tmp_path / "field.csv"
        save_windfield(f, str(path))
        lines = path.read_text().splitlines()
        parts = lines[2].split(",")
        parts[2] = "33.0"  # not a grid node
        lines[2] = ",".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(WindFileError, match="line 3"):
            load_windfield(str(path))


class TestSynthesize:
    def test_constant(self):
        f = synthesize("constant", {"u": 3.0, "v": 0.0})
        assert np.all(f.data[..., 0] == 3.0)
        assert np.all(f.data[..., 1] == 0.0)

    def test_same_seed_identical(self):
        a = synthesize("random-columns", {"sigma": 5.0}, seed=3)
        b = synthesize("random-columns", {"sigma": 5.0}, seed=3)
        assert np.array_equal(a.data, b.data)

    def test_different_seed_differs(self):
        a = synthesize("random-columns", {"sigma": 5.0}, seed=3)
        b = synthesize("random-columns", {"sigma": 5.0}, seed=4)
        assert not np.array_equal(a.data, b.data)

    def test_layered_shear_band_membership(self):
        f = synthesize("layered-shear",
                       {"bands": [(0.0, 5.0, 0.0), (10_000.0, -5.0, 0.0)],
                        "h1": 20_000.0, "nh": 21, "interp": "nearest"})
        assert f.wind_at(0.0, 0.0, 5_000.0).u == 5.0
        assert f.wind_at(0.0, 0.0, 15_000.0).u == -5.0

    def test_bad_bands_rejected(self):
        with pytest.raises(WindSynthesisError):
            synthesize("layered-shear",
                       {"bands": [(10_000.0, 1.0, 0.0), (0.0, 2.0, 0.0)]})

    def test_unknown_kind(self):
        with pytest.raises(WindSynthesisError):
            synthesize("vortex", {})


class TestValidation:
    def test_rejects_nonfinite_data(self):
        data = np.zeros((2, 2, 2, 2))
        data[0, 0, 0, 0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            WindField((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (2, 2, 2), data)

    def test_rejects_bad_spacing(self):
        with pytest.raises(ValueError, match="spacing"):
            WindField((0.0, 0.0, 0.0), (1.0, 0.0, 1.0), (2, 2, 2),
                      np.zeros((2, 2, 2, 2)))

    def test_rejects_single_node_axis(self):
        with pytest.raises(ValueError):
            WindField((0.0, 0.0, 0.0), (1.0, 1.0, 1.0), (1, 2, 2),
                      np.zeros((1, 2, 2, 2)))
