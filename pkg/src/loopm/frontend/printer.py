"""Render an :class:`~loopm.frontend.ast.Ast` back into program text.

The output reparses to a structurally equal tree.  Draws carrying a
location shift are printed with the shift folded back into their
location arguments, so normalized programs stay inside the grammar.
"""

import sympy

from .ast import LOCATION_ARGS, TRUE, Assign, BoolConst, BoolOp, Categorical, Compare, If, Not

INDENT = "  "


def format_expr(expr) -> str:
    return sympy.sstr(sympy.sympify(expr))


def format_bool(cond) -> str:
    if isinstance(cond, BoolConst):
        return "true" if cond.value else "false"
    if isinstance(cond, Compare):
        return f"{format_expr(cond.left)} {cond.op} {format_expr(cond.right)}"
    if isinstance(cond, Not):
        return f"not ({format_bool(cond.arg)})"
    if isinstance(cond, BoolOp):
        def side(c):
            text = format_bool(c)
            return f"({text})" if isinstance(c, BoolOp) else text
        return f"{side(cond.left)} {cond.op} {side(cond.right)}"
    raise TypeError(f"not a boolean expression: {cond!r}")


def format_rhs(rhs) -> str:
    if isinstance(rhs, Categorical):
        if len(rhs.options) == 1 and rhs.options[0][1] == 1:
            return format_expr(rhs.options[0][0])
        return " ".join(f"{format_expr(v)} {{{format_expr(p)}}}" for v, p in rhs.options)
    args = list(rhs.args)
    if rhs.shift != 0:
        if rhs.dist not in LOCATION_ARGS:
            raise ValueError(f"{rhs.dist} draw cannot carry a shift")
        for i in LOCATION_ARGS[rhs.dist]:
            args[i] = sympy.expand(args[i] + rhs.shift)
    return f"{rhs.dist}({', '.join(format_expr(a) for a in args)})"


def format_statements(stmts, depth=0) -> list:
    pad = INDENT * depth
    lines = []
    for s in stmts:
        if isinstance(s, Assign):
            lines.append(f"{pad}{', '.join(s.targets)} = {', '.join(format_rhs(r) for r in s.rhs)}")
        elif isinstance(s, If):
            lines.extend(_format_if(s, depth, "if"))
        else:
            raise TypeError(f"not a statement: {s!r}")
    return lines


def _format_if(s, depth, keyword):
    pad = INDENT * depth
    lines = [f"{pad}{keyword} {format_bool(s.cond)}:"]
    lines.extend(format_statements(s.then, depth + 1))
    if len(s.orelse) == 1 and isinstance(s.orelse[0], If):
        return lines + _format_if(s.orelse[0], depth, "else if")
    if s.orelse:
        lines.append(f"{pad}else:")
        lines.extend(format_statements(s.orelse, depth + 1))
    lines.append(f"{pad}end")
    return lines


def pretty(ast) -> str:
    lines = format_statements(ast.init)
    guard = "true" if ast.guard == TRUE else format_bool(ast.guard)
    lines.append(f"while {guard}:")
    lines.extend(format_statements(ast.body, 1))
    lines.append("end")
    return "\n".join(lines) + "\n"
