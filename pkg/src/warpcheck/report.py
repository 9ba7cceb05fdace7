"""Check records, reports and deterministic serialization.

The structured report format is a stability contract: a single top-level
object with keys ``version``, ``config``, ``checks``, ``verdict``; numbers
are serialized with 17 significant digits.  Serialization is hand-rolled so
output bytes are identical across platforms and runs.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckRecord:
    """Outcome of one named check over a point sample."""

    name: str
    anchor: str          # stable slug identifying the check in the catalog
    worst: float         # worst residual (or most negative slack) over points
    tol: float
    passed: bool
    points: int = 0
    note: str = ""

    def as_dict(self) -> dict:
        d = {"name": self.name, "anchor": self.anchor, "worst": self.worst,
             "tol": self.tol, "pass": self.passed, "points": self.points}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class CheckReport:
    """Ordered collection of check records; aggregate fails iff any record fails."""

    records: list[CheckRecord] = field(default_factory=list)

    def add(self, name: str, anchor: str, worst: float, tol: float,
            points: int = 0, note: str = "", passed: bool | None = None) -> CheckRecord:
        if passed is None:
            passed = worst <= tol
        rec = CheckRecord(name=name, anchor=anchor, worst=float(worst), tol=float(tol),
                          passed=bool(passed), points=points, note=note)
        self.records.append(rec)
        return rec

    def merge(self, other: "CheckReport") -> "CheckReport":
        self.records.extend(other.records)
        return self

    def __getitem__(self, name: str) -> CheckRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(rec.passed for rec in self.records)

    def worst_of(self, name: str) -> float:
        return self[name].worst


# ---------------------------------------------------------------------------
# Deterministic serialization
# ---------------------------------------------------------------------------


def format_number(x) -> str:
    """17-significant-digit decimal form, stable across runs and platforms."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    v = float(x)
    if v != v:
        return '"nan"'
    if v in (float("inf"), float("-inf")):
        return '"inf"' if v > 0 else '"-inf"'
    return format(v, ".17g")


def _escape(s: str) -> str:
    out = []
    for ch in s:
        if ch == '"':
            out.append('\\"')
        elif ch == "\\":
            out.append("\\\\")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04x}")
        else:
            out.append(ch)
    return "".join(out)


def to_json(obj, indent: int = 0) -> str:
    """Emit JSON with deterministic key order (dict insertion order) and
    fixed number formatting."""
    pad = "  " * indent
    pad_in = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)):
        return format_number(obj)
    if isinstance(obj, str):
        return f'"{_escape(obj)}"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad_in}"{_escape(str(k))}": {to_json(v, indent + 1)}'
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad_in}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json_bytes(obj) -> bytes:
    return (to_json(obj) + "\n").encode("utf-8")
