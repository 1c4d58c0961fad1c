"""CA notation parsing and rendering.

Accepted forms (whitespace-insensitive, case-insensitive keyword):

    CA(2,3^13)
    MCA(2,5^1 3^8 2^2)
    CA(N;2,3^13)          the "N;" or "N," prefix is optional
    MCA(2, 6 5 4^6)       a bare cardinality means exponent 1
"""

from itertools import groupby
from typing import List, Optional

from ..data.models import CAConfig
from ..utils.errors import ConfigurationError, NotationParseError

MAX_PARAMETERS = 4096


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, literal: str) -> bool:
        self.skip()
        end = self.pos + len(literal)
        if self.text[self.pos:end].upper() == literal.upper():
            self.pos = end
            return True
        return False

    def expect(self, literal: str) -> None:
        if not self.accept(literal):
            raise self.error(f"expected '{literal}'")

    def number(self, what: str) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] in "0123456789":
            self.pos += 1
        if start == self.pos:
            raise self.error(f"expected {what}")
        return int(self.text[start:self.pos])

    def error(self, message: str, position: Optional[int] = None) -> NotationParseError:
        where = self.pos if position is None else position
        return NotationParseError(f"{message} at position {where} in {self.text!r}",
                                  text=self.text, position=where)


def parse_ca_notation(text: str) -> CAConfig:
    """解析 CA / MCA 记法, 展开指数得到取值个数列表

    Raises:
        NotationParseError: 语法错误, 或 t < 2, t > k, v < 2
    """
    if not text or not text.strip():
        raise NotationParseError("empty CA notation", text=text, position=0)

    s = _Scanner(text)
    if not (s.accept("MCA") or s.accept("CA")):
        raise s.error("expected 'CA' or 'MCA'")
    s.expect("(")
    if s.peek().upper() == "N":
        s.accept("N")
        if not (s.accept(";") or s.accept(",")):
            raise s.error("expected ';' or ',' after N")

    s.skip()
    strength_pos = s.pos
    strength = s.number("strength t")
    s.expect(",")

    cardinalities: List[int] = []
    while not (cardinalities and s.peek() == ")"):
        s.skip()
        group_pos = s.pos
        value = s.number("cardinality")
        count = 1
        if s.accept("^"):
            s.skip()
            exp_pos = s.pos
            count = s.number("exponent")
            if count < 1:
                raise s.error("exponent must be at least 1", exp_pos)
        if value < 2:
            raise s.error(f"cardinality {value} must be at least 2", group_pos)
        if len(cardinalities) + count > MAX_PARAMETERS:
            raise s.error(f"more than {MAX_PARAMETERS} parameters", group_pos)
        cardinalities.extend([value] * count)
        s.accept(",")
    s.expect(")")
    if s.peek():
        raise s.error("unexpected trailing characters")

    if strength < 2:
        raise s.error(f"strength t={strength} must be at least 2", strength_pos)
    if strength > len(cardinalities):
        raise s.error(f"strength t={strength} exceeds k={len(cardinalities)}", strength_pos)

    try:
        return CAConfig(strength, tuple(cardinalities))
    except ConfigurationError as e:
        raise NotationParseError(e.message, text=text, position=0) from e


def render_ca_notation(cfg: CAConfig) -> str:
    """Inverse of parse_ca_notation; consecutive equal cardinalities are grouped."""
    runs = [(v, len(list(group))) for v, group in groupby(cfg.cardinalities)]
    body = " ".join(f"{v}^{k}" for v, k in runs)
    prefix = "CA" if len(runs) == 1 else "MCA"
    return f"{prefix}({cfg.strength},{body})"
