"""Formula language: AST, concrete syntax, parser, printer, derived forms.

The concrete grammar (ASCII, loosest to tightest binding):

    formula := iff
    iff     := impl ( "<->" impl )*          left associative
    impl    := or ( "->" impl )?             right associative
    or      := and ( "|" and )*
    and     := unary ( "&" unary )*
    unary   := "!" unary | box unary | "(" formula ")" | "true" | "false" | IDENT
    box     := "K{" agents "}" | "C{" agents "}" | "E{" agents "}"
             | "Kw{" agents "}" | "M{" agents "}" | "D{" agents "}"
             | "[" formula "]" sign "{" agents "}"
             | "<" formula ">" sign "{" agents "}"
             | "[" formula "]"               public announcement
    sign    := "-" | "+" | ""                "" only for singleton coalitions
    agents  := IDENT ("," IDENT)* | "*" | ""

K/Kw/M take exactly one agent.  An operator head (``K{`` etc.) is an
identifier immediately followed by ``{``; whitespace in between is a
syntax error.  ``*`` in agent position is the everyone placeholder
produced by the public-announcement translation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FormulaSyntaxError, NotPalFragment, UnknownOperator

_IDENT_CHARS = set("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


@dataclass(frozen=True)
class Coalition:
    """A finite set of agent names, or the everyone placeholder.

    The placeholder stands for "all agents of the model at hand" and is
    resolved at evaluation time.
    """

    members: frozenset = frozenset()
    everyone: bool = False

    @staticmethod
    def of(*names: str) -> "Coalition":
        return Coalition(frozenset(names))

    def resolve(self, agents) -> tuple:
        """Concrete, sorted agent tuple relative to a model's agent set."""
        if self.everyone:
            return tuple(agents)
        return tuple(sorted(self.members))

    def __str__(self) -> str:
        return "*" if self.everyone else ",".join(sorted(self.members))


EVERYONE = Coalition(everyone=True)


class Formula:
    """Base class for formula AST nodes. Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class KnowWhether(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Dual(Formula):
    """Epistemic possibility, the dual of Know."""

    agent: str
    sub: Formula


@dataclass(frozen=True)
class Common(Formula):
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class Everybody(Formula):
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class Distributed(Formula):
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class AnnLocal(Formula):
    """Local announcement box: split only the actual world's classes."""

    announced: Formula
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class AnnGlobal(Formula):
    """Global announcement box: split every class in the closure region."""

    announced: Formula
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class DiaLocal(Formula):
    announced: Formula
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class DiaGlobal(Formula):
    announced: Formula
    coalition: Coalition
    sub: Formula


@dataclass(frozen=True)
class PalAnn(Formula):
    """Public announcement box in the world-deleting style."""

    announced: Formula
    sub: Formula


TOP = Top()
BOT = Bot()

_BINARY = (And, Or, Implies, Iff)
_AGENT_OPS = (Know, KnowWhether, Dual)
_COALITION_OPS = (Common, Everybody, Distributed)
_ANNOUNCE_OPS = (AnnLocal, AnnGlobal, DiaLocal, DiaGlobal)


def children(f: Formula) -> tuple:
    """Immediate subformulas of a node, left to right."""
    if isinstance(f, (Atom, Top, Bot)):
        return ()
    if isinstance(f, Not):
        return (f.sub,)
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, _AGENT_OPS + _COALITION_OPS):
        return (f.sub,)
    if isinstance(f, _ANNOUNCE_OPS):
        return (f.announced, f.sub)
    if isinstance(f, PalAnn):
        return (f.announced, f.sub)
    raise TypeError(f"not a formula node: {f!r}")


def size(f: Formula) -> int:
    """Node count; strictly larger than the size of any proper subformula."""
    return 1 + sum(size(c) for c in children(f))


def depth(f: Formula) -> int:
    subs = children(f)
    return 1 + (max(depth(c) for c in subs) if subs else 0)


def atoms(f: Formula) -> frozenset:
    out = set()

    def walk(g):
        if isinstance(g, Atom):
            out.add(g.name)
        for c in children(g):
            walk(c)

    walk(f)
    return frozenset(out)


def agents(f: Formula) -> frozenset:
    """Agent names mentioned by the formula (the placeholder adds none)."""
    out = set()

    def walk(g):
        if isinstance(g, _AGENT_OPS):
            out.add(g.agent)
        elif isinstance(g, _COALITION_OPS + _ANNOUNCE_OPS):
            if not g.coalition.everyone:
                out.update(g.coalition.members)
        for c in children(g):
            walk(c)

    walk(f)
    return frozenset(out)


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_BOX_NAMES = {"K", "C", "E", "Kw", "M", "D"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str):
    tokens = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        start_col = col
        if text.startswith("<->", i):
            tokens.append(_Token("<->", "<->", line, col))
            i += 3
            col += 3
            continue
        if text.startswith("->", i):
            tokens.append(_Token("->", "->", line, col))
            i += 2
            col += 2
            continue
        if ch in "()[]<>{},!&|+-*":
            tokens.append(_Token(ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch in _IDENT_CHARS:
            j = i
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            name = text[i:j]
            col += j - i
            i = j
            # An identifier glued to "{" heads an operator block.
            if i < n and text[i] == "{":
                tokens.append(_Token("boxhead", name, line, start_col))
                tokens.append(_Token("{", "{", line, col))
                i += 1
                col += 1
            elif name == "true":
                tokens.append(_Token("true", name, line, start_col))
            elif name == "false":
                tokens.append(_Token("false", name, line, start_col))
            else:
                tokens.append(_Token("ident", name, line, start_col))
            continue
        raise FormulaSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, expected=None) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise FormulaSyntaxError(
                f"unexpected {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
                expected or {kind},
            )
        return self.advance()

    def fail(self, expected) -> FormulaSyntaxError:
        tok = self.peek()
        return FormulaSyntaxError(
            f"unexpected {tok.text or 'end of input'!r}", tok.line, tok.column, expected
        )

    # grammar levels -------------------------------------------------------

    def formula(self) -> Formula:
        left = self.implication()
        while self.peek().kind == "<->":
            self.advance()
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek().kind == "->":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek().kind == "|":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "!":
            self.advance()
            return Not(self.unary())
        if tok.kind == "(":
            self.advance()
            inner = self.formula()
            self.expect(")")
            return inner
        if tok.kind == "true":
            self.advance()
            return TOP
        if tok.kind == "false":
            self.advance()
            return BOT
        if tok.kind == "ident":
            self.advance()
            return Atom(tok.text)
        if tok.kind == "boxhead":
            return self.epistemic_box()
        if tok.kind == "[":
            return self.announcement("[", "]")
        if tok.kind == "<":
            return self.announcement("<", ">")
        raise self.fail({"formula"})

    def epistemic_box(self) -> Formula:
        head = self.advance()
        if head.text not in _BOX_NAMES:
            raise UnknownOperator(
                f"unknown operator {head.text + '{…}'!r}", head.line, head.column
            )
        self.expect("{")
        coalition = self.agent_list()
        self.expect("}")
        if head.text in ("K", "Kw", "M"):
            if coalition.everyone or len(coalition.members) != 1:
                raise FormulaSyntaxError(
                    f"{head.text}{{…}} takes exactly one agent", head.line, head.column
                )
            (agent,) = coalition.members
            sub = self.unary()
            cls = {"K": Know, "Kw": KnowWhether, "M": Dual}[head.text]
            return cls(agent, sub)
        sub = self.unary()
        cls = {"C": Common, "E": Everybody, "D": Distributed}[head.text]
        return cls(coalition, sub)

    def announcement(self, open_kind: str, close_kind: str) -> Formula:
        open_tok = self.expect(open_kind)
        announced = self.formula()
        self.expect(close_kind)
        sign = self.peek()
        if sign.kind in ("-", "+"):
            self.advance()
            self.expect("{")
            coalition = self.agent_list()
            self.expect("}")
            sub = self.unary()
            if open_kind == "[":
                return (AnnLocal if sign.kind == "-" else AnnGlobal)(announced, coalition, sub)
            return (DiaLocal if sign.kind == "-" else DiaGlobal)(announced, coalition, sub)
        if sign.kind == "{":
            self.advance()
            coalition = self.agent_list()
            self.expect("}")
            if coalition.everyone or len(coalition.members) != 1:
                raise FormulaSyntaxError(
                    "announcement without sign takes exactly one agent",
                    sign.line,
                    sign.column,
                )
            sub = self.unary()
            # Local and global refinements coincide for a single agent.
            return (AnnLocal if open_kind == "[" else DiaLocal)(announced, coalition, sub)
        if open_kind == "[":
            sub = self.unary()
            return PalAnn(announced, sub)
        raise FormulaSyntaxError(
            "diamond announcement needs a sign or singleton coalition",
            open_tok.line,
            open_tok.column,
            {"-", "+", "{"},
        )

    def agent_list(self) -> Coalition:
        tok = self.peek()
        if tok.kind == "}":
            return Coalition(frozenset())
        if tok.kind == "*":
            self.advance()
            return EVERYONE
        names = [self.expect("ident", {"agent name", "*", "}"}).text]
        while self.peek().kind == ",":
            self.advance()
            names.append(self.expect("ident", {"agent name"}).text)
        return Coalition(frozenset(names))


def parse(text: str) -> Formula:
    """Parse concrete formula text into its AST."""
    parser = _Parser(_tokenize(text))
    result = parser.formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise FormulaSyntaxError(
            f"trailing input {tok.text!r}", tok.line, tok.column, {"end of input"}
        )
    return result


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------

_BINARY_GLYPH = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_AGENT_GLYPH = {Know: "K", KnowWhether: "Kw", Dual: "M"}
_COALITION_GLYPH = {Common: "C", Everybody: "E", Distributed: "D"}


def print_formula(f: Formula) -> str:
    """Fully parenthesized canonical text; ``parse(print_formula(f)) == f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, Not):
        return f"!({print_formula(f.sub)})"
    if isinstance(f, _BINARY):
        glyph = _BINARY_GLYPH[type(f)]
        return f"({print_formula(f.left)}) {glyph} ({print_formula(f.right)})"
    if isinstance(f, _AGENT_OPS):
        glyph = _AGENT_GLYPH[type(f)]
        return f"{glyph}{{{f.agent}}} ({print_formula(f.sub)})"
    if isinstance(f, _COALITION_OPS):
        glyph = _COALITION_GLYPH[type(f)]
        return f"{glyph}{{{f.coalition}}} ({print_formula(f.sub)})"
    if isinstance(f, (AnnLocal, AnnGlobal)):
        sign = "-" if isinstance(f, AnnLocal) else "+"
        return f"[{print_formula(f.announced)}]{sign}{{{f.coalition}}} ({print_formula(f.sub)})"
    if isinstance(f, (DiaLocal, DiaGlobal)):
        sign = "-" if isinstance(f, DiaLocal) else "+"
        return f"<{print_formula(f.announced)}>{sign}{{{f.coalition}}} ({print_formula(f.sub)})"
    if isinstance(f, PalAnn):
        return f"[{print_formula(f.announced)}] ({print_formula(f.sub)})"
    raise TypeError(f"not a formula node: {f!r}")


# ---------------------------------------------------------------------------
# Derived forms
# ---------------------------------------------------------------------------


def translate_pal(f: Formula) -> Formula:
    """Embed a pure public-announcement formula into the two-operator core.

    Every public announcement box becomes a global announcement to the
    everyone placeholder; all other nodes are mapped homomorphically.
    Raises NotPalFragment if the formula already contains local/global
    announcement operators.
    """
    if isinstance(f, PalAnn):
        return AnnGlobal(translate_pal(f.announced), EVERYONE, translate_pal(f.sub))
    if isinstance(f, _ANNOUNCE_OPS):
        raise NotPalFragment(
            f"not in the public-announcement fragment: {print_formula(f)}"
        )
    return _rebuild(f, [translate_pal(c) for c in children(f)])


def _rebuild(f: Formula, subs) -> Formula:
    """Copy a node with fresh subformulas (same kind and labels)."""
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(subs[0])
    if isinstance(f, _BINARY):
        return type(f)(subs[0], subs[1])
    if isinstance(f, _AGENT_OPS):
        return type(f)(f.agent, subs[0])
    if isinstance(f, _COALITION_OPS):
        return type(f)(f.coalition, subs[0])
    if isinstance(f, _ANNOUNCE_OPS):
        return type(f)(subs[0], f.coalition, subs[1])
    if isinstance(f, PalAnn):
        return PalAnn(subs[0], subs[1])
    raise TypeError(f"not a formula node: {f!r}")


def expand_derived(f: Formula) -> Formula:
    """Rewrite to the core connectives: Atom/Top/Bot/Not/And plus Common,
    Distributed and the two announcement boxes.

    Know(a, x) becomes Common({a}, x); Everybody expands to the conjunction
    of its members' Know formulas in sorted name order (Top when empty);
    Kw, Dual, Or, Implies, Iff and the diamonds expand classically; public
    announcements go through the global-announcement embedding.
    """
    if isinstance(f, (Atom, Top, Bot)):
        return f
    if isinstance(f, Not):
        return Not(expand_derived(f.sub))
    if isinstance(f, And):
        return And(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Or):
        return _or(expand_derived(f.left), expand_derived(f.right))
    if isinstance(f, Implies):
        return Not(And(expand_derived(f.left), Not(expand_derived(f.right))))
    if isinstance(f, Iff):
        a, b = expand_derived(f.left), expand_derived(f.right)
        return And(Not(And(a, Not(b))), Not(And(b, Not(a))))
    if isinstance(f, Know):
        return Common(Coalition.of(f.agent), expand_derived(f.sub))
    if isinstance(f, Everybody):
        if f.coalition.everyone:
            raise ValueError("cannot expand the everyone placeholder without a model")
        sub = expand_derived(f.sub)
        conjuncts = [Common(Coalition.of(a), sub) for a in sorted(f.coalition.members)]
        if not conjuncts:
            return TOP
        out = conjuncts[0]
        for c in conjuncts[1:]:
            out = And(out, c)
        return out
    if isinstance(f, KnowWhether):
        sub = expand_derived(f.sub)
        knows = Common(Coalition.of(f.agent), sub)
        knows_not = Common(Coalition.of(f.agent), Not(sub))
        return _or(knows, knows_not)
    if isinstance(f, Dual):
        return Not(Common(Coalition.of(f.agent), Not(expand_derived(f.sub))))
    if isinstance(f, Common):
        return Common(f.coalition, expand_derived(f.sub))
    if isinstance(f, Distributed):
        return Distributed(f.coalition, expand_derived(f.sub))
    if isinstance(f, AnnLocal):
        return AnnLocal(expand_derived(f.announced), f.coalition, expand_derived(f.sub))
    if isinstance(f, AnnGlobal):
        return AnnGlobal(expand_derived(f.announced), f.coalition, expand_derived(f.sub))
    if isinstance(f, DiaLocal):
        return Not(AnnLocal(expand_derived(f.announced), f.coalition, Not(expand_derived(f.sub))))
    if isinstance(f, DiaGlobal):
        return Not(AnnGlobal(expand_derived(f.announced), f.coalition, Not(expand_derived(f.sub))))
    if isinstance(f, PalAnn):
        return AnnGlobal(expand_derived(f.announced), EVERYONE, expand_derived(f.sub))
    raise TypeError(f"not a formula node: {f!r}")


def _or(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))
