"""Problem files: bands, windows, optional class array and function."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .bands import BandSystem, ValueWindows, transform, validate
from .errors import ProjFilterError
from .projline import MobiusMap
from .ratfun import RealRational, compose_source, compose_target
from .stiefel import IndexArray, transport

SCHEMA = 1


class SchemaError(ProjFilterError):
    """Malformed or invalid problem file; the message carries a line number."""


@dataclass
class Problem:
    bands: BandSystem
    windows: ValueWindows | None = None
    class_array: IndexArray | None = None
    function: RealRational | None = None
    name: str = ""

    @property
    def n(self) -> int | None:
        return None if self.function is None else self.function.nominal_degree

    def to_json(self) -> dict:
        out = {"schema": SCHEMA}
        if self.name:
            out["name"] = self.name
        out["bands"] = self.bands.to_json()
        out["transition_ids"] = list(self.bands.transition_ids)
        if self.windows is not None:
            out["windows"] = self.windows.to_json()
        if self.class_array is not None:
            out["class_array"] = self.class_array.to_json()
        if self.function is not None:
            out["function"] = self.function.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def _line_of(text: str, key: str) -> int:
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), 1):
        if needle in line:
            return i
    return 1


def _decode_number(v):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "-inf", "infinity"):
            return math.inf
        raise ValueError(f"expected a number or \"inf\", got {v!r}")
    return float(v)


def parse_problem(text: str, source: str = "<problem>") -> Problem:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc

    def fail(key, msg):
        raise SchemaError(f"{source}:{_line_of(text, key)}: {msg}")

    if not isinstance(d, dict):
        raise SchemaError(f"{source}:1: top level must be an object")
    if d.get("schema", SCHEMA) != SCHEMA:
        fail("schema", f"unsupported schema {d.get('schema')!r}")
    if "bands" not in d or not isinstance(d["bands"], list):
        fail("bands", "missing list 'bands'")
    try:
        items = [(b["type"], _decode_number(b["start"]), _decode_number(b["end"]))
                 for b in d["bands"]]
        e = BandSystem.from_intervals(items)
        if d.get("transition_ids"):
            e = BandSystem(e.bands, tuple(d["transition_ids"]))
    except (KeyError, TypeError, ValueError, ProjFilterError) as exc:
        fail("bands", f"invalid bands: {exc}")
    problems = validate(e)
    if problems:
        fail("bands", "; ".join(problems))
    f = None
    if "windows" in d:
        try:
            w = d["windows"]
            if isinstance(w, list):
                w = [_decode_number(v) for v in w]
            f = ValueWindows.from_json(w)
        except (KeyError, TypeError, ValueError, ProjFilterError) as exc:
            fail("windows", f"invalid windows: {exc}")
    cls = None
    if "class_array" in d:
        try:
            cls = IndexArray.from_json(d["class_array"])
        except (KeyError, TypeError, ValueError) as exc:
            fail("class_array", f"invalid class array: {exc}")
        if set(cls.bits) != set(e.transition_ids):
            fail("class_array", "class array keys differ from the transition ids")
    r = None
    if "function" in d:
        try:
            r = RealRational.from_json(d["function"])
        except (KeyError, TypeError, ValueError) as exc:
            fail("function", f"invalid function: {exc}")
    return Problem(e, f, cls, r, d.get("name", ""))


def load_problem(path) -> Problem:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from exc
    return parse_problem(text, str(path))


def transform_problem(pb: Problem, m: MobiusMap, target: bool = False) -> Problem:
    """Move the problem by a source map (default) or a target map."""
    if target:
        f = None if pb.windows is None else pb.windows.transform(m)
        r = None if pb.function is None else compose_target(pb.function, m)
        cls = None if pb.class_array is None else transport(pb.class_array, pb.bands, m)
        return Problem(pb.bands, f, cls, r, pb.name)
    e = transform(pb.bands, m)
    r = None if pb.function is None else compose_source(pb.function, m)
    cls = None if pb.class_array is None else IndexArray(
        dict(pb.class_array.bits), {}, pb.class_array.convention)
    return Problem(e, pb.windows, cls, r, pb.name)
