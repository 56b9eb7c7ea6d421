"""Symbolic group expressions, facts about them, and a small parser.

Concrete expressions carry integers; knowledge-base patterns may put
arithmetic over integer variables in those slots (``PureMCG(g,r,i+1)``).
"""
from __future__ import annotations

import ast
import operator
import re
from dataclasses import dataclass
from typing import Union

# argument signature per constructor: i = integer, g = group, t = surface tag, * = groups
SIGNATURES = {
    "PureMCG": "iii",
    "FullMCG": "iii",
    "Hyperelliptic": "i",
    "SL2Z": "",
    "Trivial": "",
    "FiniteCyclic": "i",
    "Quaternion8": "",
    "Symmetric": "i",
    "FreeGroup": "i",
    "SurfaceGroup": "i",
    "PureBraid": "i",
    "FreeAbelian": "i",
    "Product": "*",
    "Power": "gg",
    "Wreath": "gg",
    "ConfigSpacePi1": "tii",
}

PREDICATES = ("FIC", "SPF", "Finite", "FinitelyGeneratedFree", "SurfaceGroupKind",
              "GeomRealizable", "SES", "Subgroup", "Isomorphic")

KERNEL_KINDS = ("finite", "f.g.-free", "surface", "SPF", "infinite-cyclic", "general")

SURFACE_TAGS = ("plane", "sphere", "projective-plane", "genus")


class ParseError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        where = f" at position {pos}" if pos is not None else ""
        super().__init__(f"{message}{where}" + (f" in {text!r}" if text else ""))
        self.pos = pos


@dataclass(frozen=True)
class Arith:
    """Integer arithmetic over pattern variables: op in var, num, +, -, *."""

    op: str
    args: tuple

    def variables(self) -> set[str]:
        if self.op == "var":
            return {self.args[0]}
        if self.op == "num":
            return set()
        return set().union(*(a.variables() for a in self.args))

    def evaluate(self, env: dict) -> int | None:
        if self.op == "num":
            return self.args[0]
        if self.op == "var":
            return env.get(self.args[0])
        a, b = (x.evaluate(env) for x in self.args)
        if a is None or b is None:
            return None
        return {"+": operator.add, "-": operator.sub, "*": operator.mul}[self.op](a, b)

    def solve(self, value: int, env: dict) -> dict | None:
        """Bind the single unknown of ``var`` / ``var +- c`` / ``c + var`` so self == value."""
        if self.op == "var":
            name = self.args[0]
            if name in env:
                return env if env[name] == value else None
            return {**env, name: value}
        if self.op in "+-" and len(self.args) == 2:
            a, b = self.args
            if self.op == "+" and a.op == "num":
                a, b = b, a
            if b.op == "num":
                shift = b.args[0] if self.op == "+" else -b.args[0]
                return a.solve(value - shift, env)
        return None

    def __str__(self) -> str:
        if self.op == "num":
            return str(self.args[0])
        if self.op == "var":
            return self.args[0]
        a, b = self.args
        sa = f"({a})" if self.op == "*" and a.op in "+-" and len(a.args) == 2 else str(a)
        sb = f"({b})" if b.op in "+-" and len(b.args) == 2 else str(b)
        return f"{sa}{self.op}{sb}"


@dataclass(frozen=True)
class Tag:
    """Surface tag for configuration spaces: plane, sphere, projective-plane or genus-g."""

    name: str
    param: Union[int, Arith, None] = None

    def __str__(self) -> str:
        return self.name if self.param is None else f"{self.name}-{self.param}"


@dataclass(frozen=True)
class Group:
    ctor: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args and SIGNATURES.get(self.ctor) == "":
            return self.ctor
        return f"{self.ctor}({','.join(str(a) for a in self.args)})"

    def subterms(self):
        """Yield (path, subgroup) pairs, outermost first."""
        yield (), self
        for k, a in enumerate(self.args):
            if isinstance(a, Group):
                for path, sub in a.subterms():
                    yield (k,) + path, sub

    def replace_at(self, path: tuple, new: "Group") -> "Group":
        if not path:
            return new
        k = path[0]
        args = list(self.args)
        args[k] = args[k].replace_at(path[1:], new)
        return Group(self.ctor, tuple(args))

    def size(self) -> int:
        return 1 + sum(a.size() if isinstance(a, Group) else 1 for a in self.args)

    def is_concrete(self) -> bool:
        for a in self.args:
            if isinstance(a, Arith):
                return False
            if isinstance(a, Tag) and isinstance(a.param, Arith):
                return False
            if isinstance(a, Group) and not a.is_concrete():
                return False
        return True


def G(ctor: str, *args) -> Group:
    """Build and validate a concrete group expression."""
    g = Group(ctor, tuple(args))
    validate(g)
    return g


def structurally_finite(g: Group) -> bool:
    c, a = g.ctor, g.args
    if c in ("Trivial", "FiniteCyclic", "Quaternion8", "Symmetric"):
        return True
    if c in ("FreeGroup", "FreeAbelian", "SurfaceGroup"):
        return a[0] == 0
    if c == "PureBraid":
        return a[0] <= 1
    if c in ("Product", "Power", "Wreath"):
        return all(structurally_finite(x) for x in a)
    return False


def validate(g: Group) -> None:
    sig = SIGNATURES.get(g.ctor)
    if sig is None:
        raise ParseError(f"unknown group constructor {g.ctor!r}")
    if sig == "*":
        if not g.args or not all(isinstance(x, Group) for x in g.args):
            raise ParseError(f"{g.ctor} needs one or more group arguments")
    else:
        if len(g.args) != len(sig):
            raise ParseError(f"{g.ctor} takes {len(sig)} argument(s), got {len(g.args)}")
        for s, x in zip(sig, g.args):
            ok = {"i": lambda v: isinstance(v, int) and v >= 0,
                  "g": lambda v: isinstance(v, Group),
                  "t": lambda v: isinstance(v, Tag)}[s](x)
            if not ok:
                raise ParseError(f"bad argument {x} for {g.ctor}")
    for x in g.args:
        if isinstance(x, Group):
            validate(x)
        if isinstance(x, Tag):
            if x.name not in SURFACE_TAGS or (x.name == "genus") != (x.param is not None):
                raise ParseError(f"bad surface tag {x}")
            if x.name == "genus" and (not isinstance(x.param, int) or x.param < 1):
                raise ParseError(f"genus tag needs a positive genus, got {x}")
    if g.ctor == "FiniteCyclic" and g.args[0] < 1:
        raise ParseError("FiniteCyclic(n) needs n >= 1")
    if g.ctor == "Hyperelliptic" and g.args[0] < 1:
        raise ParseError("Hyperelliptic(g) needs g >= 1")
    if g.ctor in ("Wreath", "Power") and not structurally_finite(g.args[1]):
        raise ParseError(f"{g.ctor} needs a finite second argument, got {g.args[1]}")


@dataclass(frozen=True)
class Fact:
    """A predicate applied to groups. SES facts are (kernel, total, quotient)."""

    pred: str
    args: tuple
    kind: str | None = None
    realizable: bool | None = None

    def __str__(self) -> str:
        inner = ", ".join(str(a) for a in self.args)
        if self.pred == "SES":
            extra = f"; {self.kind}" + (", realizable" if self.realizable else "")
            return f"SES({inner}{extra})"
        return f"{self.pred}({inner})"


def FIC(g: Group) -> Fact:
    return Fact("FIC", (g,))


def Finite(g: Group) -> Fact:
    return Fact("Finite", (g,))


def SPF(g: Group) -> Fact:
    return Fact("SPF", (g,))


def SES(kernel: Group, total: Group, quotient: Group, kind: str, realizable: bool = False) -> Fact:
    return Fact("SES", (kernel, total, quotient), kind, bool(realizable))


def Subgroup(h: Group, g: Group) -> Fact:
    return Fact("Subgroup", (h, g))


def Isomorphic(a: Group, b: Group) -> Fact:
    return Fact("Isomorphic", (a, b))


# --- parsing -------------------------------------------------------------------

_TOKEN = re.compile(r"""
    \s*(?:
      (?P<tag>projective-plane|genus-(?:\d+|[A-Za-z_]\w*)|sphere\b|plane\b)
    | (?P<ident>[A-Za-z_]\w*)
    | (?P<int>\d+)
    | (?P<punct>[(),+\-*])
    )""", re.VERBOSE)


def _tokenize(text: str):
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError("unexpected character", text, pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, allow_vars: bool):
        self.text = text
        self.toks = _tokenize(text)
        self.k = 0
        self.allow_vars = allow_vars

    def peek(self, ahead: int = 0):
        return self.toks[min(self.k + ahead, len(self.toks) - 1)]

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value or kind
            raise ParseError(f"expected {want!r}, found {tok[1] or 'end of input'!r}", self.text, tok[2])
        self.k += 1
        return tok

    def done(self):
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"trailing input {tok[1]!r}", self.text, tok[2])

    def group(self) -> Group:
        tok = self.take(kind="ident")
        name = tok[1]
        if name not in SIGNATURES:
            raise ParseError(f"unknown group constructor {name!r}", self.text, tok[2])
        args = []
        if self.peek()[1] == "(":
            self.take("(")
            if self.peek()[1] != ")":
                args.append(self.arg())
                while self.peek()[1] == ",":
                    self.take(",")
                    args.append(self.arg())
            self.take(")")
        return Group(name, tuple(args))

    def arg(self):
        kind, val, pos = self.peek()
        if kind == "ident" and val in SIGNATURES:
            return self.group()
        if kind == "tag":
            self.k += 1
            if val.startswith("genus-"):
                p = val[len("genus-"):]
                if p.isdigit():
                    return Tag("genus", int(p))
                if not self.allow_vars:
                    raise ParseError(f"variable genus in concrete expression {val!r}", self.text, pos)
                return Tag("genus", Arith("var", (p,)))
            return Tag(val)
        e = self.arith()
        if e.op == "num":
            return e.args[0]
        if not self.allow_vars:
            raise ParseError("arithmetic/variables only allowed in knowledge-base patterns", self.text, pos)
        return e

    def arith(self) -> Arith:
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            e = Arith(op, (e, self.term()))
        return e

    def term(self) -> Arith:
        e = self.factor()
        while self.peek()[1] == "*":
            self.take("*")
            e = Arith("*", (e, self.factor()))
        return e

    def factor(self) -> Arith:
        kind, val, pos = self.peek()
        if kind == "int":
            self.k += 1
            return Arith("num", (int(val),))
        if kind == "ident":
            self.k += 1
            return Arith("var", (val,))
        if val == "(":
            self.take("(")
            e = self.arith()
            self.take(")")
            return e
        if val == "-":
            self.take("-")
            inner = self.factor()
            if inner.op == "num":
                return Arith("num", (-inner.args[0],))
            return Arith("-", (Arith("num", (0,)), inner))
        raise ParseError(f"unexpected token {val or 'end of input'!r}", self.text, pos)


def _fold(x):
    # collapse constant arithmetic so concrete patterns become plain ints
    if isinstance(x, Arith):
        if not x.variables():
            return x.evaluate({})
        return x
    if isinstance(x, Tag) and isinstance(x.param, Arith) and not x.param.variables():
        return Tag(x.name, x.param.evaluate({}))
    if isinstance(x, Group):
        return Group(x.ctor, tuple(_fold(a) for a in x.args))
    return x


def parse_group(text: str, pattern: bool = False) -> Group:
    p = _Parser(text, allow_vars=pattern)
    g = p.group()
    p.done()
    g = _fold(g)
    if not pattern:
        validate(g)
    return g


def parse_fact(text: str) -> Fact:
    """Parse ``PRED(group, ...)`` such as ``FIC(PureMCG(3,0,0))``."""
    p = _Parser(text, allow_vars=False)
    tok = p.take(kind="ident")
    if tok[1] not in PREDICATES or tok[1] == "SES":
        raise ParseError(f"unknown or unsupported predicate {tok[1]!r}", text, tok[2])
    p.take("(")
    args = [p.group()]
    while p.peek()[1] == ",":
        p.take(",")
        args.append(p.group())
    p.take(")")
    p.done()
    for a in args:
        validate(a)
    return Fact(tok[1], tuple(args))


def pattern_variables(x) -> set[str]:
    if isinstance(x, Arith):
        return x.variables()
    if isinstance(x, Tag):
        return x.param.variables() if isinstance(x.param, Arith) else set()
    if isinstance(x, Group):
        return set().union(set(), *(pattern_variables(a) for a in x.args))
    return set()


# --- matching ------------------------------------------------------------------

def match(pattern, concrete, env: dict | None = None) -> dict | None:
    """Unify a pattern with a concrete term, returning variable bindings or None."""
    env = dict(env or {})
    deferred: list[tuple[Arith, int]] = []
    if not _match(pattern, concrete, env, deferred):
        return None
    for expr, value in deferred:
        if expr.evaluate(env) != value:
            solved = expr.solve(value, env)
            if solved is None or expr.evaluate(solved) != value:
                return None
            env = solved
    return env


def _match(p, c, env, deferred) -> bool:
    if isinstance(p, Group):
        if not isinstance(c, Group) or p.ctor != c.ctor or len(p.args) != len(c.args):
            return False
        return all(_match(a, b, env, deferred) for a, b in zip(p.args, c.args))
    if isinstance(p, Tag):
        if not isinstance(c, Tag) or p.name != c.name:
            return False
        if isinstance(p.param, Arith):
            return _match(p.param, c.param, env, deferred)
        return p.param == c.param
    if isinstance(p, Arith):
        if not isinstance(c, int) or isinstance(c, bool):
            return False
        solved = p.solve(c, env)
        if solved is not None:
            env.update(solved)
            return True
        deferred.append((p, c))
        return True
    return p == c


def instantiate(p, env: dict):
    """Substitute bindings; returns None when a variable is unbound or a value is negative."""
    if isinstance(p, Group):
        args = []
        for a in p.args:
            v = instantiate(a, env)
            if v is None:
                return None
            args.append(v)
        return Group(p.ctor, tuple(args))
    if isinstance(p, Tag):
        if isinstance(p.param, Arith):
            v = p.param.evaluate(env)
            return None if v is None else Tag(p.name, v)
        return p
    if isinstance(p, Arith):
        v = p.evaluate(env)
        return None if v is None or v < 0 else v
    return p


_GUARD_NODES = (ast.Expression, ast.BoolOp, ast.And, ast.Or, ast.UnaryOp, ast.Not, ast.USub,
                ast.Compare, ast.Lt, ast.LtE, ast.Gt, ast.GtE, ast.Eq, ast.NotEq,
                ast.BinOp, ast.Add, ast.Sub, ast.Mult, ast.Name, ast.Load, ast.Constant)


def compile_guard(text: str):
    """Compile a guard such as ``2*g + r + i > 2 and r + i > 0`` into a predicate on bindings."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad guard expression: {exc.msg}", text, exc.offset) from None
    for node in ast.walk(tree):
        if not isinstance(node, _GUARD_NODES):
            raise ParseError(f"disallowed syntax {type(node).__name__} in guard", text)
        if isinstance(node, ast.Constant) and not isinstance(node.value, int):
            raise ParseError("guards may only use integer constants", text)
    code = compile(tree, "<guard>", "eval")
    names = {n.id for n in ast.walk(tree) if isinstance(n, ast.Name)}

    def guard(env: dict) -> bool:
        if not names <= env.keys():
            return False
        return bool(eval(code, {"__builtins__": {}}, dict(env)))

    guard.names = names
    guard.text = text
    return guard
