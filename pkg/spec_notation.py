"""
Model notation: ``(p,d,q)x(P,D,Q)s`` with optional zero pins ``[sar3=0,ma2=0]``.
"""

import logging
from typing import List, Tuple

from errors import SpecParseError
from sarima import SarimaSpec

logger = logging.getLogger(__name__)


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_spaces(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_spaces()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, chars: str, what: str) -> str:
        ch = self.peek()
        if not ch or ch not in chars:
            found = f"'{ch}'" if ch else "end of input"
            raise SpecParseError(f"expected {what}, found {found}", self.pos)
        self.pos += 1
        return ch

    def integer(self, what: str) -> int:
        self.skip_spaces()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise SpecParseError(f"expected {what}", start)
        return int(self.text[start:self.pos])

    def word(self) -> Tuple[str, int]:
        self.skip_spaces()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isalnum():
            self.pos += 1
        return self.text[start:self.pos], start

    def at_end(self) -> bool:
        self.skip_spaces()
        return self.pos >= len(self.text)


def _triple(cursor: _Cursor, names: Tuple[str, str, str]) -> List[int]:
    cursor.expect("(", "'('")
    values = []
    for i, name in enumerate(names):
        values.append(cursor.integer(f"integer order {name}"))
        cursor.expect("," if i < 2 else ")", "','" if i < 2 else "')'")
    return values


def parse_spec(text: str) -> SarimaSpec:
    """Parse model notation into a SarimaSpec (mask slots validated against the orders)."""
    cursor = _Cursor(text)
    p, d, q = _triple(cursor, ("p", "d", "q"))
    cursor.expect("xX", "'x'")
    P, D, Q = _triple(cursor, ("P", "D", "Q"))
    s = cursor.integer("seasonal period")

    mask = set()
    if cursor.peek() == "[":
        cursor.expect("[", "'['")
        while True:
            slot, slot_pos = cursor.word()
            if not slot:
                raise SpecParseError("expected a coefficient slot such as sar3", slot_pos)
            cursor.expect("=", "'='")
            value_pos = cursor.pos
            if cursor.integer("pinned value 0") != 0:
                raise SpecParseError("only zero pins are supported", value_pos)
            if slot in mask:
                raise SpecParseError(f"slot {slot} pinned twice", slot_pos)
            mask.add(slot)
            if cursor.expect(",]", "',' or ']'") == "]":
                break
    if not cursor.at_end():
        raise SpecParseError("unexpected trailing text", cursor.pos)
    return SarimaSpec(p, d, q, P, D, Q, s, frozenset(mask))


def render_spec(spec: SarimaSpec) -> str:
    text = f"({spec.p},{spec.d},{spec.q})x({spec.P},{spec.D},{spec.Q}){spec.s}"
    if spec.mask:
        pins = [f"{slot}=0" for slot in spec.slots() if slot in spec.mask]
        text += "[" + ",".join(pins) + "]"
    return text
