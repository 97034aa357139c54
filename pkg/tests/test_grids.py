import pytest
from hypothesis import given
from hypothesis import strategies as st

from selfzeta.errors import ConfigError
from selfzeta.grids import SGrid, critline_grid, parse_grid, parse_point, real_grid, rect_grid, standard_grid


class TestStandardGrid:
    def test_size_and_bounds(self):
        g = standard_grid()
        assert len(g) >= 40
        assert all(abs(s.imag) <= 30 for s in g)

    def test_contains_anchor_points(self):
        pts = set(standard_grid())
        assert {complex(k) for k in range(-3, 5)} <= pts
        assert complex(0.5, 14.134725) in pts

    def test_deterministic(self):
        assert standard_grid().points == standard_grid().points

    def test_random_points_in_rectangle(self):
        rand = standard_grid().points[14:]
        assert all(-2 <= s.real <= 3 and 0 <= s.imag <= 25 for s in rand)


class TestBuilders:
    def test_real_grid_inclusive(self):
        g = real_grid(-3, 4, 0.5)
        assert len(g) == 15 and g.points[0] == -3 and g.points[-1] == 4

    def test_real_grid_steps_are_clean(self):
        assert 0.3 in real_grid(0, 1, 0.1).points

    def test_rect_row_major_in_imaginary_part(self):
        g = rect_grid(0, 1, 0, 2, 2, 3)
        assert g.points[:2] == (0j, 1 + 0j)
        assert len(g) == 6

    def test_critline(self):
        g = critline_grid(0, 30, 4)
        assert all(s.real == 0.5 for s in g) and g.points[-1] == 0.5 + 30j

    @pytest.mark.parametrize("bad", [lambda: real_grid(0, 1, 0), lambda: real_grid(1, 0, 0.1),
                                     lambda: rect_grid(0, 1, 0, 1, 0, 1), lambda: critline_grid(0, 1, 0),
                                     lambda: SGrid(()), lambda: SGrid((1, 1.0))])
    def test_invalid(self, bad):
        with pytest.raises(ConfigError):
            bad()


class TestParsing:
    def test_point(self):
        assert parse_point("0.5,14.1") == complex(0.5, 14.1)
        assert parse_point("-3") == -3 + 0j

    @pytest.mark.parametrize("bad", ["a,b", "1,2,3", "nan", "inf,0", ""])
    def test_bad_point(self, bad):
        with pytest.raises(ConfigError):
            parse_point(bad)

    def test_grid_kinds(self):
        assert parse_grid("real:-3:4:0.5").points == real_grid(-3, 4, 0.5).points
        assert parse_grid("rect:-1:2:0:10:4:3").points == rect_grid(-1, 2, 0, 10, 4, 3).points
        assert parse_grid("critline:1:30:5").points == critline_grid(1, 30, 5).points
        assert parse_grid("standard").points == standard_grid().points
        assert parse_grid("2;0.5,14").points == (2 + 0j, 0.5 + 14j)

    @pytest.mark.parametrize("bad", ["real:1:2", "rect:0:1:0:1:2", "critline:a:b:3", "1;1"])
    def test_bad_grids(self, bad):
        with pytest.raises(ConfigError):
            parse_grid(bad)

    @given(st.floats(-10, 10), st.floats(-10, 10))
    def test_point_round_trip(self, re, im):
        assert parse_point(f"{re!r},{im!r}") == complex(re, im)
