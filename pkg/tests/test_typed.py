from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Optional

import numpy as np
import pytest

from m1mcl.typed import Namespace, coerce, get_optional


class Colour(str, Enum):
    RED = "red"
    BLUE = "blue"


@dataclass(repr=False)
class Sensor(Namespace):
    name: str
    position: tuple[float, ...] = (0.0, 0.0)
    active: bool = True
    colour: Colour = Colour.RED
    kind: Literal["point", "line"] = "point"
    weights: list[int] = field(default_factory=list)
    limit: Optional[float] = None


def test_get_optional():
    assert get_optional(Optional[int]) is int
    assert get_optional(int) is None


@pytest.mark.parametrize(
    "tp, value, expected",
    [
        (int, "12", 12),
        (int, 3.0, 3),
        (float, "1e-3", 1e-3),
        (bool, "Yes", True),
        (bool, "off", False),
        (tuple[float, ...], "(1, 2.5)", (1.0, 2.5)),
        (tuple[int, str], ["1", "a"], (1, "a")),
        (list[int], "1, 2,3", [1, 2, 3]),
        (Colour, "blue", Colour.BLUE),
        (Optional[float], None, None),
        (Literal["a", "b"], "b", "b"),
    ],
)
def test_coerce(tp, value, expected):
    assert coerce(tp, value) == expected


@pytest.mark.parametrize(
    "tp, value",
    [(int, 2.5), (bool, "maybe"), (Literal["a"], "c"), (tuple[int, int], "1"), (Colour, "green")],
)
def test_coerce_rejects(tp, value):
    with pytest.raises(ValueError):
        coerce(tp, value)


def test_iteration_skips_defaults():
    sensor = Sensor(name="p", active=False)

    assert dict(sensor) == {"name": "p", "active": False}
    assert len(sensor) == 2
    assert sensor["active"] is False
    with pytest.raises(KeyError):
        sensor["missing"]


def test_from_text():
    sensor = Sensor.from_text({"name": "p", "position": "1, 2", "colour": "blue", "weights": "4,5"})

    assert sensor.position == (1.0, 2.0)
    assert sensor.colour is Colour.BLUE
    assert sensor.weights == [4, 5]

    moved = Sensor.from_text({"kind": "line"}, base=sensor)
    assert moved.kind == "line"
    assert moved.position == (1.0, 2.0)

    with pytest.raises(KeyError):
        Sensor.from_text({"name": "p", "size": "3"})


def test_json_round_trip(tmp_path):
    sensor = Sensor(name="p", position=(np.float64(0.5), 1.0), colour=Colour.BLUE, limit=2.0)
    path = tmp_path / "sensor.json"
    sensor.write_to_path(path)

    loaded = Sensor.read_from_path(path)
    assert loaded == sensor
    assert sensor.to_json() == {
        "name": "p",
        "position": [0.5, 1.0],
        "colour": "blue",
        "limit": 2.0,
    }


def test_repr():
    assert repr(Sensor(name="p")) == "Sensor(name='p')"
    assert repr(Sensor(name="p", limit=1.0)) == "Sensor(name='p', limit=1.0)"
