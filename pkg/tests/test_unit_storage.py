import json

import numpy as np
import pandas as pd
import pytest

from src.models.schemas import LawSpec, Table
from src.services.errors import ArgumentError, TailDomainError
from src.services.storage import parse_observations, read_observations, write_json, write_table


def test_parse_plain():
    np.testing.assert_array_equal(parse_observations("1\n2.5\n3e2\n"), [1.0, 2.5, 300.0])


def test_parse_header_and_blank_lines():
    np.testing.assert_array_equal(parse_observations("value\n\n1.5\n\n2\n"), [1.5, 2.0])
    np.testing.assert_array_equal(parse_observations("x, y\n4\n"), [4.0])


def test_parse_separators():
    np.testing.assert_array_equal(parse_observations("1,\n 2; \n\t3\n"), [1.0, 2.0, 3.0])


def test_parse_non_positive():
    with pytest.raises(TailDomainError) as err:
        parse_observations("1\n-2\n")
    assert "line 2" in str(err.value)
    with pytest.raises(TailDomainError):
        parse_observations("0\n")
    with pytest.raises(TailDomainError):
        parse_observations("1\ninf\n")
    with pytest.raises(TailDomainError):
        parse_observations("nan\n")


def test_parse_invalid_number():
    with pytest.raises(ArgumentError) as err:
        parse_observations("1\nabc\n")
    assert str(err.value) == "invalid number at line 2: 'abc'"


def test_parse_several_fields():
    with pytest.raises(ArgumentError):
        parse_observations("1,2\n")
    with pytest.raises(ArgumentError):
        parse_observations("1\n2 3\n")


def test_parse_empty():
    for text in ("", "\n\n", "value\n"):
        with pytest.raises(ArgumentError) as err:
            parse_observations(text)
        assert "no observations" in str(err.value)


def test_read_missing_file(tmp_path):
    with pytest.raises(ArgumentError):
        read_observations(tmp_path / "missing.csv")


def test_read_file(tmp_path):
    path = tmp_path / "data.csv"
    path.write_text("value\n1.25\n7\n")
    np.testing.assert_array_equal(read_observations(path), [1.25, 7.0])


def test_write_table(tmp_path):
    table = Table(name="t", columns=["k", "value"], rows=[[1, 0.1234567890123456], [2, 2.0]])
    path = write_table(table, tmp_path / "sub" / "t.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["k", "value"]
    assert frame["value"][0] == pytest.approx(0.123456789012, rel=1e-12)
    assert path.read_text().splitlines()[1] == "1,0.123456789012"


def test_write_json(tmp_path):
    path = write_json(LawSpec(name="hall", params={"beta": 1.0}), tmp_path / "law.json")
    assert json.loads(path.read_text()) == {"name": "hall", "params": {"beta": 1.0}}
    path = write_json({"b": 1, "a": [1, 2]}, tmp_path / "doc.json")
    assert json.loads(path.read_text()) == {"a": [1, 2], "b": 1}
