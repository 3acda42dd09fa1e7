"""Tokenizer and recursive-descent parser for the loop language.

Layout is free-form: newlines are ordinary whitespace, ``;`` may separate
statements, ``end`` closes blocks and ``#`` starts a comment.  A number
written directly against an identifier (``2x``) is an implicit product.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import sympy

from ..errors import ProbabilityError, ProgramSyntaxError
from .ast import (DISTRIBUTIONS, TRUE, Assign, Ast, BoolConst, BoolOp, Categorical, Compare,
                  Draw, If, Not, expr_symbols)

KEYWORDS = {"while", "if", "else", "end", "and", "or", "not", "true", "false"}
COMPARISONS = {"==", "!=", "<", ">", "<=", ">="}
_UNICODE = {"⋆": "*", "−": "-", "≠": "!=", "≤": "<=", "≥": ">=", "·": "*", "∗": "*"}

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<num>\d+(?:\.\d*)?|\.\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|==|!=|<=|>=|[-+*/(),:{}<>=;])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str  # num | ident | op | eof
    text: str
    line: int
    column: int


def tokenize(source: str) -> list[Token]:
    for u, a in _UNICODE.items():
        source = source.replace(u, a)
    tokens = []
    pos, line, line_start = 0, 1, 0
    last_end = -1
    while pos < len(source):
        m = _TOKEN.match(source, pos)
        if m is None:
            raise ProgramSyntaxError(f"unexpected character {source[pos]!r}",
                                     line, pos - line_start + 1)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            prev = tokens[-1] if tokens else None
            if kind == "ident" and prev is not None and prev.kind == "num" and m.start() == last_end:
                tokens.append(Token("op", "*", line, pos - line_start + 1))
            tokens.append(Token(kind, text, line, pos - line_start + 1))
            last_end = m.end()
        for i, ch in enumerate(text):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class Parser:
    def __init__(self, source: str):
        self.tokens = tokenize(source)
        self.pos = 0
        self.defined: set = set()
        self.assigned: set = set()
        self.reads: list = []  # (name, token, defined-at-read)

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k=1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def at(self, *texts) -> bool:
        t = self.tok
        return t.kind in ("op", "ident") and t.text in texts

    def advance(self) -> Token:
        t = self.tok
        self.pos += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self.advance()

    def error(self, message, tok=None):
        tok = tok or self.tok
        raise ProgramSyntaxError(message, tok.line, tok.column)

    def skip_separators(self):
        while self.at(";"):
            self.advance()

    # -- program -------------------------------------------------------------
    def parse_program(self) -> Ast:
        init = []
        self.skip_separators()
        while not self.at("while"):
            if self.tok.kind == "eof":
                self.error("program has no while-loop")
            init.append(self.statement())
            self.skip_separators()
        self.expect("while")
        guard = self.bexpr(allow_star=True)
        self.expect(":")
        body = self.block()
        self.expect("end")
        self.skip_separators()
        if self.tok.kind != "eof":
            self.error("unexpected text after the loop")
        params = self.check_reads()
        return Ast(tuple(init), guard, tuple(body), frozenset(params))

    def check_reads(self):
        params = set()
        for name, tok, defined in self.reads:
            if name not in self.assigned:
                params.add(name)
            elif name not in defined:
                raise ProgramSyntaxError(f"variable {name!r} is used before it is assigned",
                                         tok.line, tok.column)
        return params

    def block(self) -> list:
        stmts = []
        self.skip_separators()
        while not self.at("end", "else"):
            if self.tok.kind == "eof":
                self.error("missing 'end'")
            stmts.append(self.statement())
            self.skip_separators()
        if not stmts:
            self.error("empty block")
        return stmts

    def statement(self):
        if self.at("if"):
            return self.if_statement()
        if self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
            return self.assignment()
        self.error(f"expected a statement, found {self.tok.text or 'end of input'!r}")

    def if_statement(self) -> If:
        self.expect("if")
        cond = self.bexpr()
        self.expect(":")
        before = set(self.defined)
        then = self.block()
        after_then = set(self.defined)
        self.defined = set(before)
        orelse = []
        if self.at("else"):
            self.advance()
            if self.at("if"):
                orelse = [self.if_statement()]
                after_else = set(self.defined)
                self.defined = before | (after_then & after_else)
                return If(cond, tuple(then), tuple(orelse))
            self.expect(":")
            orelse = self.block()
        after_else = set(self.defined)
        self.expect("end")
        self.defined = before | (after_then & after_else)
        return If(cond, tuple(then), tuple(orelse))

    def at_assignment_start(self) -> bool:
        k = 0
        while True:
            t = self.peek(k)
            if t.kind != "ident" or t.text in KEYWORDS:
                return False
            nxt = self.peek(k + 1)
            if nxt.kind == "op" and nxt.text == "=":
                return True
            if nxt.kind == "op" and nxt.text == ",":
                k += 2
                continue
            return False

    def assignment(self) -> Assign:
        first = self.tok
        targets = [self.advance().text]
        while self.at(","):
            self.advance()
            if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
                self.error("expected a variable name")
            targets.append(self.advance().text)
        self.expect("=")
        if len(set(targets)) != len(targets):
            self.error("a variable is assigned twice in one simultaneous assignment", first)
        rhs = [self.assign_right()]
        for _ in targets[1:]:
            self.expect(",")
            rhs.append(self.assign_right())
        for t in targets:
            if t in DISTRIBUTIONS:
                self.error(f"{t!r} is a distribution name", first)
        self.defined.update(targets)
        self.assigned.update(targets)
        return Assign(tuple(targets), tuple(rhs))

    def assign_right(self):
        if self.tok.kind == "ident" and self.tok.text in DISTRIBUTIONS and self.peek().text == "(":
            return self.draw()
        return self.categorical()

    def draw(self) -> Draw:
        name_tok = self.advance()
        name = name_tok.text
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.poly())
            while self.at(","):
                self.advance()
                args.append(self.poly())
        self.expect(")")
        lo, hi = DISTRIBUTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            self.error(f"{name} takes {lo if lo == hi else f'at least {lo}'} argument(s), "
                       f"got {len(args)}", name_tok)
        return Draw(name, tuple(args))

    def starts_poly(self) -> bool:
        t = self.tok
        if t.kind == "num":
            return True
        if t.kind == "ident":
            return t.text not in KEYWORDS and not self.at_assignment_start()
        return t.kind == "op" and t.text in ("(", "-", "+")

    def categorical(self) -> Categorical:
        start = self.tok
        values, probs = [], []
        while True:
            values.append(self.poly())
            if not self.at("{"):
                probs.append(None)
                break
            self.advance()
            probs.append(self.poly())
            self.expect("}")
            if not self.starts_poly():
                break
        return Categorical(tuple(zip(values, complete_probabilities(probs, start))))

    # -- boolean expressions -----------------------------------------------
    def bexpr(self, allow_star=False):
        if allow_star and self.at("*"):
            self.advance()
            return TRUE
        return self.or_expr()

    def or_expr(self):
        node = self.and_expr()
        while self.at("or"):
            self.advance()
            node = BoolOp("or", node, self.and_expr())
        return node

    def and_expr(self):
        node = self.not_expr()
        while self.at("and"):
            self.advance()
            node = BoolOp("and", node, self.not_expr())
        return node

    def not_expr(self):
        if self.at("not"):
            self.advance()
            return Not(self.not_expr())
        return self.bool_atom()

    def bool_atom(self):
        if self.at("true"):
            self.advance()
            return TRUE
        if self.at("false"):
            self.advance()
            return BoolConst(False)
        if self.at("*"):
            self.advance()
            return TRUE
        if self.at("("):
            save, nreads = self.pos, len(self.reads)
            try:
                return self.comparison()
            except ProgramSyntaxError:
                self.pos = save
                del self.reads[nreads:]
            self.advance()
            node = self.or_expr()
            self.expect(")")
            return node
        return self.comparison()

    def comparison(self) -> Compare:
        left = self.poly()
        if self.at("="):
            self.advance()
            op = "=="
        elif self.tok.kind == "op" and self.tok.text in COMPARISONS:
            op = self.advance().text
        else:
            self.error("expected a comparison operator")
        return Compare(op, left, self.poly())

    # -- polynomial expressions -------------------------------------------
    def poly(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.advance().text
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.advance()
            rhs = self.unary()
            if op.text == "*":
                node = node * rhs
            else:
                if rhs == 0:
                    self.error("division by zero", op)
                node = node / rhs
        return node

    def unary(self):
        if self.at("-"):
            self.advance()
            return -self.unary()
        if self.at("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("**"):
            self.advance()
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.error("exponent must be a natural number literal")
            self.advance()
            return base ** int(t.text)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.advance()
            return sympy.Rational(t.text)
        if t.kind == "ident" and t.text not in KEYWORDS:
            if t.text in DISTRIBUTIONS:
                self.error(f"distribution {t.text} may only appear as a whole right-hand side")
            self.advance()
            self.reads.append((t.text, t, frozenset(self.defined)))
            return sympy.Symbol(t.text)
        if self.at("("):
            self.advance()
            node = self.poly()
            self.expect(")")
            return node
        self.error(f"expected an expression, found {t.text or 'end of input'!r}")


def complete_probabilities(probs, where=None):
    """Fill in an implicit trailing probability and validate numeric ones."""
    explicit = [p for p in probs if p is not None]
    numeric = all(p.is_number for p in explicit)
    line = (where.line, where.column) if where is not None else (None, None)
    if numeric:
        for p in explicit:
            if p < 0:
                raise ProbabilityError(_at(f"negative probability {p}", line))
        total = sum(explicit, sympy.Integer(0))
        if total > 1:
            raise ProbabilityError(_at(f"probabilities sum to {total} > 1", line))
        if probs[-1] is not None and len(probs) > 1 and total != 1:
            raise ProbabilityError(_at(f"probabilities sum to {total}, not 1", line))
    if probs[-1] is None:
        if len(probs) == 1:
            return [sympy.Integer(1)]
        rest = sympy.expand(1 - sum(explicit, sympy.Integer(0)))
        return explicit + [rest]
    if len(probs) == 1 and numeric and probs[0] != 1:
        raise ProbabilityError(_at(f"single option with probability {probs[0]}", line))
    return list(probs)


def _at(message, line):
    return message if line[0] is None else f"{message} (line {line[0]}, column {line[1]})"


def parse(source: str) -> Ast:
    """Parse program text into an :class:`Ast`.

    >>> ast = parse("x = 0\\nwhile true:\\n  x = x + 1 {1/2} x\\nend")
    >>> ast.body[0].rhs[0].options[1][1]
    1/2
    """
    parser = Parser(source)
    ast = parser.parse_program()
    _check_polynomial(ast)
    return ast


def parse_file(path) -> Ast:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def _check_polynomial(ast: Ast):
    variables = set(ast.variables)
    from .ast import walk

    def check(expr):
        _, den = sympy.fraction(sympy.together(expr))
        if expr_symbols(den) & variables:
            raise ProgramSyntaxError(f"expression {expr} divides by a program variable")

    for stmt in walk(ast.init + ast.body):
        if isinstance(stmt, Assign):
            for rhs in stmt.rhs:
                if isinstance(rhs, Categorical):
                    for v, p in rhs.options:
                        check(v)
                        check(p)
                else:
                    for a in rhs.args:
                        check(a)
