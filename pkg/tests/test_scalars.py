import math
from fractions import Fraction

import pytest

from hardylab.scalars import format_number, is_exact, json_ready, parse_number


class TestParseNumber:
    def test_integer_token(self):
        v = parse_number("3")
        assert v == 3 and isinstance(v, int)

    def test_rational_token(self):
        assert parse_number("1/3") == Fraction(1, 3)

    def test_decimal_token_is_exact(self):
        v = parse_number("0.25")
        assert v == Fraction(1, 4) and is_exact(v)

    def test_scientific_token(self):
        assert parse_number("1e-3") == Fraction(1, 1000)

    def test_negative_rational(self):
        assert parse_number("-7/2") == Fraction(-7, 2)

    @pytest.mark.parametrize("tok,val", [("inf", math.inf), ("-inf", -math.inf)])
    def test_infinities(self, tok, val):
        assert parse_number(tok) == val

    @pytest.mark.parametrize("tok", ["", "abc", "1/0", "2..5"])
    def test_rejects_garbage(self, tok):
        with pytest.raises(ValueError):
            parse_number(tok)


class TestFormatNumber:
    def test_fraction(self):
        assert format_number(Fraction(1, 3)) == "1/3"

    def test_integral_fraction(self):
        assert format_number(Fraction(4, 2)) == "2"

    def test_integral_float(self):
        assert format_number(4.0) == "4"

    def test_plain_float(self):
        assert format_number(2.5) == "2.5"

    def test_infinity(self):
        assert format_number(math.inf) == "inf"

    def test_round_trip(self):
        for v in (3, Fraction(22, 7), Fraction(-1, 8), math.inf):
            assert parse_number(format_number(v)) == v


class TestIsExact:
    def test_exact_kinds(self):
        assert is_exact(1) and is_exact(Fraction(1, 2))

    def test_inexact_kinds(self):
        assert not is_exact(0.5)

    def test_bool_is_not_a_number_here(self):
        assert not is_exact(True)


class TestJsonReady:
    def test_nested_structures(self):
        out = json_ready({"a": Fraction(1, 3), "b": [1, 2.5, (3, 4)],
                          "c": {"d": math.inf}})
        assert out == {"a": "1/3", "b": [1, 2.5, [3, 4]], "c": {"d": "inf"}}

    def test_preserves_bools_and_none(self):
        assert json_ready({"t": True, "n": None}) == {"t": True, "n": None}

    def test_nan_becomes_string(self):
        assert json_ready(math.nan) == "nan"

    def test_to_json_hook(self):
        class Thing:
            def to_json(self):
                return {"v": Fraction(1, 2)}
        assert json_ready(Thing()) == {"v": "1/2"}
