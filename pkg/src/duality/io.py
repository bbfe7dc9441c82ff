"""JSON state files with line-level diagnostics.

Example::

    {
      "kind": "boson",
      "occupation": [2, 1, 0],
      "preparation": "(13)",
      "internal": {
        "m": 2,
        "letters": ["a", "b"],
        "components": [
          {"q": 1.0, "amps": [{"tuple": ["a", "a", "a"], "re": 0.577350269189626, "im": 0.0}]}
        ]
      }
    }

Tuple entries are 1-based integers or, when ``letters`` is given, letter names.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

import jsonschema

from .combinatorics import ModeOccupation, Permutation
from .errors import StateValidationError
from .states import InternalState, PreparedState, Violation, validate_internal

STATE_SCHEMA = {
    "type": "object",
    "required": ["kind", "occupation", "internal"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["boson", "fermion"]},
        "occupation": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1},
        "preparation": {"type": "string"},
        "internal": {
            "type": "object",
            "required": ["m", "components"],
            "additionalProperties": False,
            "properties": {
                "m": {"type": "integer", "minimum": 1},
                "letters": {"type": "array", "items": {"type": "string"}, "uniqueItems": True},
                "components": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "required": ["q", "amps"],
                        "additionalProperties": False,
                        "properties": {
                            "q": {"type": "number", "minimum": 0},
                            "amps": {
                                "type": "array",
                                "minItems": 1,
                                "items": {
                                    "type": "object",
                                    "required": ["tuple", "re"],
                                    "additionalProperties": False,
                                    "properties": {
                                        "tuple": {
                                            "type": "array",
                                            "minItems": 1,
                                            "items": {"type": ["integer", "string"]},
                                        },
                                        "re": {"type": "number"},
                                        "im": {"type": "number"},
                                    },
                                },
                            },
                        },
                    },
                },
            },
        },
    },
}


class StateFileError(StateValidationError):
    """Malformed or invalid state file; messages carry line numbers where known."""


class _Locator:
    """Maps document positions of amplitude entries and keys to line numbers."""

    def __init__(self, text: str):
        self.text = text
        starts = [m.start() for m in re.finditer(r'"tuple"\s*:', text)]
        self.amp_lines = [text.count("\n", 0, pos) + 1 for pos in starts]

    def key_line(self, key: str) -> int | None:
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None


def _amp_ordinal(doc: dict, component: int, amp: int) -> int:
    comps = doc["internal"]["components"]
    return sum(len(c.get("amps", [])) for c in comps[:component]) + amp


def _schema_line(err, doc, locator: _Locator) -> int | None:
    path = list(err.absolute_path)
    if len(path) >= 5 and path[:2] == ["internal", "components"] and path[3] == "amps":
        try:
            return locator.amp_lines[_amp_ordinal(doc, path[2], path[4])]
        except (IndexError, KeyError, TypeError):
            return None
    for part in reversed(path):
        if isinstance(part, str):
            return locator.key_line(part)
    return None


def _parse_letter(value, letters: list[str] | None, m: int) -> int:
    if isinstance(value, str):
        if letters is None or value not in letters:
            raise ValueError(f"unknown internal letter {value!r}")
        return letters.index(value)
    if not 1 <= value <= m:
        raise ValueError(f"letter {value} outside 1..{m}")
    return value - 1


def _fmt_line(line) -> str:
    return f"line {line}: " if line else ""


def parse_state(text: str, validate: bool = True) -> PreparedState:
    """Parse a state document; raises :class:`StateFileError` with located diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"line {exc.lineno}: invalid JSON: {exc.msg}") from None
    locator = _Locator(text)
    errors = sorted(jsonschema.Draft202012Validator(STATE_SCHEMA).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        msgs = [f"{_fmt_line(_schema_line(e, doc, locator))}{e.message}" for e in errors]
        raise StateFileError("; ".join(msgs), msgs)

    internal = doc["internal"]
    m, letters = internal["m"], internal.get("letters")
    if letters is not None and len(letters) != m:
        raise StateFileError(f"{_fmt_line(locator.key_line('letters'))}{len(letters)} letters for m = {m}")
    occ = ModeOccupation(tuple(doc["occupation"]))
    lines: dict[tuple[int, tuple], int] = {}
    components, kept = [], []
    ordinal = 0
    for j, comp in enumerate(internal["components"]):
        amps = {}
        for amp in comp["amps"]:
            line = locator.amp_lines[ordinal] if ordinal < len(locator.amp_lines) else None
            ordinal += 1
            if len(amp["tuple"]) != occ.n_particles:
                raise StateFileError(f"{_fmt_line(line)}tuple {amp['tuple']} has {len(amp['tuple'])} entries, "
                                     f"occupation has {occ.n_particles} particles")
            try:
                key = tuple(_parse_letter(v, letters, m) for v in amp["tuple"])
            except ValueError as exc:
                raise StateFileError(f"{_fmt_line(line)}{exc}") from None
            amps[key] = amps.get(key, 0) + complex(amp["re"], amp.get("im", 0.0))
            lines.setdefault((j, key), line)
        if comp["q"] != 0:
            kept.append(j)
            components.append((comp["q"], amps))
    try:
        preparation = Permutation.from_cycles(doc.get("preparation", ""), occ.n_particles)
    except ValueError as exc:
        raise StateFileError(f"{_fmt_line(locator.key_line('preparation'))}{exc}") from None
    state = InternalState.mixture(components, m, occ.n_particles)
    p = PreparedState(occ, doc["kind"], state, preparation, validate=False)
    if validate:
        report = validate_internal(p.effective_internal, occ, p.kind)
        if not report.ok:
            msgs = [_describe(v, kept, lines, preparation) for v in report.violations]
            raise StateFileError("; ".join(msgs), report.violations)
    return p


def _describe(v: Violation, kept: list[int], lines: dict, preparation: Permutation) -> str:
    component = kept[v.component] if v.component is not None else None
    line = None
    if component is not None and v.tuple is not None:
        # violations refer to the prepared tuple; map back to the file tuple
        inv = preparation.inverse().images
        original = tuple(v.tuple[inv[i]] for i in range(len(v.tuple)))
        line = lines.get((component, original))
    where = f"component {component}: " if component is not None else ""
    return f"{_fmt_line(line)}{v.kind}: {where}{v.message}"


def load_state(path, validate: bool = True) -> PreparedState:
    return parse_state(Path(path).read_text(), validate=validate)


def state_to_dict(p: PreparedState) -> dict:
    """Serializable document for ``p`` using 1-based integer letters."""
    comps = []
    for q, amps in p.internal.components:
        entries = [
            {"tuple": [i + 1 for i in key], "re": float(value.real), "im": float(value.imag)}
            for key, value in sorted(amps.items())
        ]
        comps.append({"q": float(q), "amps": entries})
    doc = {
        "kind": p.kind.value,
        "occupation": list(p.occupation.counts),
        "internal": {"m": p.internal.m, "components": comps},
    }
    if not p.preparation.is_identity():
        doc["preparation"] = str(p.preparation)
    return doc


def dump_state(p: PreparedState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(p), indent=2) + "\n")
