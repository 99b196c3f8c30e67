"""Recursive-descent parser for expressions and differential forms.

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/"|"/\\") factor)*      "/" only by a constant
    factor := "-" factor | atom ("^" nonneg-int)?
    atom   := int | coord | func "(" expr ")" | "(" expr ")"
    coord  := "x" int | "y" int ("_[" int (" " int)* "]")?
            | "dx" int | "dy" int ("_[" ... "]")? | "w" int ("_[" ... "]")?

The 1-form atoms are only accepted by ``parse_form``.  Whitespace is ignored
outside the brackets of a jet index.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidIndex, OrderExceeded, ParseError, UnsupportedDivision
from .expr import BASE, FUNCTIONS, JET, Expr, JetSpec, func, jet_gen

_PUNCT = "+-*/^()"


class _Token:
    __slots__ = ("kind", "value", "pos")

    def __init__(self, kind, value, pos):
        self.kind = kind
        self.value = value
        self.pos = pos

    def __repr__(self):
        return f"{self.kind}:{self.value}@{self.pos}"


def tokenize(text: str) -> list[_Token]:
    tokens = []
    i = 0
    size = len(text)
    while i < size:
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch == "/" and text.startswith("/\\", i):
            tokens.append(_Token("op", "wedge", i))
            i += 2
        elif ch in _PUNCT:
            tokens.append(_Token("op", ch, i))
            i += 1
        elif ch.isdigit():
            start = i
            while i < size and text[i].isdigit():
                i += 1
            tokens.append(_Token("num", int(text[start:i]), start))
        elif ch.isalpha():
            start = i
            while i < size and text[i].isalpha():
                i += 1
            word = text[start:i]
            if word in FUNCTIONS:
                tokens.append(_Token("func", word, start))
                continue
            if word not in ("x", "y", "dx", "dy", "w"):
                raise ParseError(f"unknown identifier {word!r}", text, start)
            j = i
            while j < size and text[j].isdigit():
                j += 1
            if j == i:
                raise ParseError(f"{word!r} must be followed by an index", text, i)
            index = int(text[i:j])
            i = j
            multi = ()
            if word != "x" and word != "dx" and text.startswith("_[", i):
                close = text.find("]", i)
                if close < 0:
                    raise ParseError("unterminated multi-index", text, i)
                body = text[i + 2:close].split()
                if not all(b.isdigit() for b in body):
                    raise ParseError("multi-index entries must be integers", text, i + 2)
                multi = tuple(int(b) for b in body)
                i = close + 1
            tokens.append(_Token(word, (index, multi), start))
        else:
            raise ParseError(f"unexpected character {ch!r}", text, i)
    tokens.append(_Token("end", None, size))
    return tokens


class Parser:
    def __init__(self, text: str, spec: JetSpec | None, forms: bool = False):
        self.text = text
        self.spec = spec
        self.forms = forms
        self.tokens = tokenize(text)
        self.pos = 0

    # -- helpers ------------------------------------------------------------

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.text, tok.pos)

    def expect(self, value):
        tok = self.peek()
        if tok.kind != "op" or tok.value != value:
            raise self.error(f"expected {value!r}")
        return self.advance()

    def is_op(self, *values):
        tok = self.peek()
        return tok.kind == "op" and tok.value in values

    # -- value algebra (overridden for forms) -------------------------------

    def lift(self, e: Expr):
        return e

    def scalar(self, value, tok):
        if not isinstance(value, Expr):
            raise self.error("expected a scalar expression", tok)
        return value

    def one_form(self, tok):
        raise self.error(f"1-form atom {tok.kind!r} not allowed in an expression", tok)

    # -- grammar ------------------------------------------------------------

    def parse(self):
        value = self.expr()
        if self.peek().kind != "end":
            raise self.error("unexpected token")
        return value

    def expr(self):
        value = self.term()
        while self.is_op("+", "-"):
            op = self.advance().value
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.factor()
        while self.is_op("*", "/", "wedge"):
            tok = self.advance()
            rhs = self.factor()
            if tok.value == "/":
                divisor = self.scalar(rhs, tok)
                if not divisor.is_constant():
                    raise UnsupportedDivision(
                        f"division by a non-constant expression at position {tok.pos}"
                    )
                if divisor.constant_value() == 0:
                    raise self.error("division by zero", tok)
                value = value * (Fraction(1) / divisor.constant_value())
            else:
                value = value * rhs
        return value

    def factor(self):
        if self.is_op("-"):
            self.advance()
            return -self.factor()
        value = self.atom()
        if self.is_op("^"):
            tok = self.advance()
            exp_tok = self.peek()
            if exp_tok.kind != "num":
                raise self.error("exponent must be a non-negative integer")
            self.advance()
            base = self.scalar(value, tok)
            value = self.lift(base ** exp_tok.value)
        return value

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return self.lift(Expr.constant(tok.value))
        if tok.kind == "op" and tok.value == "(":
            self.advance()
            value = self.expr()
            self.expect(")")
            return value
        if tok.kind == "func":
            self.advance()
            self.expect("(")
            arg = self.scalar(self.expr(), tok)
            self.expect(")")
            return self.lift(func(tok.value, arg))
        if tok.kind == "x":
            self.advance()
            return self.lift(Expr.generator(self.base_gen(tok)))
        if tok.kind == "y":
            self.advance()
            return self.lift(Expr.generator(self.jet_gen(tok)))
        if tok.kind in ("dx", "dy", "w"):
            self.advance()
            return self.one_form(tok)
        raise self.error("unexpected token")

    def base_gen(self, tok):
        i, _ = tok.value
        if self.spec is not None and not 1 <= i <= self.spec.n:
            raise InvalidIndex(f"base index {i} outside 1..{self.spec.n} at position {tok.pos}")
        return (BASE, i)

    def jet_gen(self, tok, max_order=None):
        sigma, J = tok.value
        spec = self.spec
        if spec is not None:
            if not 1 <= sigma <= spec.m:
                raise InvalidIndex(f"fibre index {sigma} outside 1..{spec.m} at position {tok.pos}")
            for j in J:
                if not 1 <= j <= spec.n:
                    raise InvalidIndex(f"base index {j} outside 1..{spec.n} at position {tok.pos}")
            limit = spec.r if max_order is None else max_order
            if len(J) > limit:
                raise OrderExceeded(
                    f"jet order {len(J)} exceeds the allowed order {limit} at position {tok.pos}"
                )
        return jet_gen(sigma, J)


def parse_expr(text: str, spec: JetSpec) -> Expr:
    return Parser(text, spec).parse()


def parse_generator(text: str):
    e = Parser(text, None).parse()
    items = list(e.items())
    if len(items) != 1 or items[0][1] != 1 or len(items[0][0]) != 1 or items[0][0][0][1] != 1:
        raise ParseError(f"{text!r} is not a single generator")
    g = items[0][0][0][0]
    if g[0] not in (BASE, JET):
        raise ParseError(f"{text!r} is not a coordinate")
    return g


class FormParser(Parser):
    """Parser for forms: scalars become 0-forms, ``w`` atoms switch the result to the contact basis."""

    def __init__(self, text, spec):
        super().__init__(text, spec, forms=True)
        self.contact = False

    def lift(self, e):
        from .forms import DiffForm

        return DiffForm.function(self.spec, e)

    def scalar(self, value, tok):
        if value.degree != 0:
            raise self.error("expected a scalar expression", tok)
        return value.scalar()

    def one_form(self, tok):
        from .forms import DiffForm

        spec = self.spec
        if tok.kind == "dx":
            return DiffForm.dx(spec, self.base_gen(tok)[1])
        if tok.kind == "dy":
            _, _, sigma, J = self.jet_gen(tok)
            return DiffForm.dy(spec, sigma, J)
        _, _, sigma, J = self.jet_gen(tok, max_order=spec.r - 1)
        self.contact = True
        omega = DiffForm.omega(spec, sigma, J)
        from .forms import to_coordinate_basis

        return to_coordinate_basis(omega)

    def parse_form(self):
        from .forms import to_contact_same_chart

        value = self.parse()
        return to_contact_same_chart(value) if self.contact else value
