from __future__ import annotations

import json
from collections.abc import MutableMapping
from dataclasses import MISSING, Field, dataclass, fields, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type, Union, get_type_hints

import numpy as np
from typing_inspect import get_args, get_origin, is_literal_type, is_optional_type

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def get_optional(tp: Type):
    if is_optional_type(tp):
        if get_origin(tp) == Union:
            for t in get_args(tp):
                if t is type(None):
                    continue

                return t


def _split_sequence(text: str) -> list[str]:
    text = text.strip().strip("()[]")
    return [item.strip() for item in text.split(",") if item.strip()]


def coerce(tp: Type, value: Any) -> Any:
    """Convert ``value`` (JSON data or config-file text) to the annotated type ``tp``."""
    if value is None:
        return None

    tp = get_optional(tp) or tp
    origin = get_origin(tp)

    if is_dataclass(tp) and issubclass(tp, Namespace):
        return value if isinstance(value, tp) else tp.from_json(value)
    elif origin in (tuple, Tuple):
        args = get_args(tp)
        if isinstance(value, str):
            value = _split_sequence(value)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(coerce(args[0], item) for item in value)
        if len(args) != len(value):
            raise ValueError(f"expected {len(args)} items, got {value!r}")
        return tuple(coerce(t, item) for t, item in zip(args, value))
    elif origin in (list, List):
        (tp,) = get_args(tp)
        if isinstance(value, str):
            value = _split_sequence(value)
        return [coerce(tp, item) for item in value]
    elif origin in (dict, Dict):
        tk, tv = get_args(tp)
        assert tk == str
        return {key: coerce(tv, item) for key, item in value.items()}
    elif is_literal_type(tp):
        choices = get_args(tp)
        if value not in choices:
            raise ValueError(f"{value!r} is not one of {choices}")
        return value
    elif tp is bool:
        if isinstance(value, str):
            text = value.strip().lower()
            if text not in _TRUE | _FALSE:
                raise ValueError(f"{value!r} is not a boolean")
            return text in _TRUE
        return bool(value)
    elif isinstance(tp, type) and issubclass(tp, Enum):
        return tp(value)
    elif tp in (int, float, str):
        # JSON writes floats for integral values in some producers
        if tp is int and isinstance(value, float):
            if not value.is_integer():
                raise ValueError(f"{value!r} is not an integer")
        return tp(value)

    return value


def _default(field: Field):
    if field.default_factory is not MISSING:
        return field.default_factory()

    return field.default


def _plain(obj):
    if isinstance(obj, Namespace):
        return obj.to_json()
    elif isinstance(obj, Enum):
        return obj.value
    elif isinstance(obj, (list, tuple)):
        return [_plain(item) for item in obj]
    elif isinstance(obj, dict):
        return {key: _plain(value) for key, value in obj.items()}
    elif isinstance(obj, np.generic):
        return obj.item()
    elif isinstance(obj, Path):
        return str(obj)
    else:
        return obj


@dataclass(repr=False)
class Namespace(MutableMapping):
    def __iter__(self):
        defaults = {field.name: _default(field) for field in fields(self)}

        for key, value in self.__dict__.items():
            if key.startswith("_"):
                continue

            default = defaults.get(key, MISSING)
            if value != default:
                yield key

    def __len__(self):
        return sum(1 for _ in self)

    def __getitem__(self, item):
        value = getattr(self, item, MISSING)
        if value is MISSING:
            raise KeyError(item)

        return value

    def __setitem__(self, key, value):
        setattr(self, key, value)

    def __delitem__(self, key):
        delattr(self, key)

    def __contains__(self, item):
        return hasattr(self, item)

    @classmethod
    def field_types(cls) -> dict[str, Type]:
        hints = get_type_hints(cls)
        return {field.name: hints.get(field.name, field.type) for field in fields(cls)}

    @classmethod
    def from_json(cls, data: dict):
        data = dict(data)
        values = {}

        types = cls.field_types()
        for field in fields(cls):  # type: Field
            if not field.init:
                continue

            if field.default is not MISSING or field.default_factory is not MISSING:
                value = data.pop(field.name, MISSING)
                if value is MISSING:
                    continue
            else:
                value = data.pop(field.name)

            values[field.name] = coerce(types[field.name], value)

        # noinspection PyArgumentList
        obj = cls(**values)
        obj.__dict__.update(data)
        return obj

    @classmethod
    def from_text(cls, values: Mapping[str, str], base: Optional[Namespace] = None):
        """Build (or update a copy of ``base``) from string values, e.g. config-file entries."""
        types = cls.field_types()
        unknown = sorted(set(values) - set(types))
        if unknown:
            raise KeyError(", ".join(unknown))

        data = base.to_json(defaults=True) if base is not None else {}
        for key, text in values.items():
            data[key] = coerce(types[key], text)

        return cls.from_json(data)

    def to_json(self, defaults: bool = False) -> dict:
        """Plain JSON data; fields equal to their default are skipped unless ``defaults``."""
        if defaults:
            return {field.name: _plain(getattr(self, field.name)) for field in fields(self)}

        return {key: _plain(value) for key, value in self.items()}

    def write_to_path(self, path: Path, defaults: bool = True):
        obj = self.to_json(defaults=defaults)
        s = json.dumps(obj, indent=4, sort_keys=False)
        path.write_text(s, encoding="utf-8")

    @classmethod
    def read_from_path(cls, path: Path):
        s = path.read_text(encoding="utf-8")
        obj = json.loads(s)
        return cls.from_json(obj)

    def __repr__(self):
        names = set()
        items = []
        for field in fields(self):  # type: Field
            if field.repr:
                names.add(field.name)

                default = _default(field)
                value = getattr(self, field.name, default)
                if value != default:
                    items.append(f"{field.name}={value!r}")

        data = {key: value for key, value in self.items() if key not in names}
        if items and data:
            return f"{type(self).__name__}({', '.join(items)}, **{data!r})"
        elif items and not data:
            return f"{type(self).__name__}({', '.join(items)})"
        elif not items and data:
            return f"{type(self).__name__}(**{data!r})"
        else:
            return f"{type(self).__name__}()"
