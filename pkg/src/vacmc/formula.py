"""CTL* formula ASTs, parser, printer, substitution, NNF, polarity, fragments.

Grammar (ASCII): atoms `[a-z][a-z0-9_]*`; constants `true`/`false`;
`!`, `&`, `|`, `->` with precedence ! > temporal U/R > & > | > -> and
right-associative `->`; CTL pairs `AX EX AF EF AG EG`, `A[f U g]`,
`E[f U g]`, `A[f R g]`, `E[f R g]`; CTL* `A(f)`, `E(f)` and path operators
`X F G` (prefix), `U`, `R` (infix); set atoms `{s0,s1}@NAME`; at most one
quantifier prefix `forall x .` / `exists x .` at the root.
"""

import enum
import re
from dataclasses import dataclass

from .errors import FormulaSyntaxError


class Formula:
    """Base class for formula nodes. Instances are immutable and hashable."""

    __slots__ = ("_hash",)
    _fields = ()

    def __init__(self, *args):
        if len(args) != len(self._fields):
            raise TypeError(f"{type(self).__name__} takes {len(self._fields)} arguments")
        for name, value in zip(self._fields, args):
            setattr(self, name, value)
        self._hash = hash((type(self).__name__,) + args)

    def _parts(self):
        return tuple(getattr(self, name) for name in self._fields)

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return False
        return self._parts() == other._parts()

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"<{type(self).__name__} {render_formula(self)!r}>"

    def children(self):
        return tuple(p for p in self._parts() if isinstance(p, Formula))


class Atom(Formula):
    __slots__ = ("name",)
    _fields = ("name",)


class SetAtom(Formula):
    """A set of states of a named structure, used as an atomic proposition.

    `ref` optionally carries the structure object itself; it is excluded
    from equality and hashing so parsed and constructed atoms compare equal.
    """

    __slots__ = ("structure", "states", "ref")
    _fields = ("structure", "states")

    def __init__(self, structure, states, ref=None):
        super().__init__(structure, tuple(sorted(set(states))))
        self.ref = ref


class TrueConst(Formula):
    __slots__ = ()


class FalseConst(Formula):
    __slots__ = ()


TRUE = TrueConst()
FALSE = FalseConst()


class Not(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class And(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")


class Or(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")


class Implies(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")


class PathA(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class PathE(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class Next(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class Until(Formula):
    __slots__ = ("left", "right")
    _fields = ("left", "right")


class Release(Formula):
    """Weak-until dual of Until: l R r == not (not l U not r)."""

    __slots__ = ("left", "right")
    _fields = ("left", "right")


class Future(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class Globally(Formula):
    __slots__ = ("child",)
    _fields = ("child",)


class ForallProp(Formula):
    __slots__ = ("var", "child")
    _fields = ("var", "child")


class ExistsProp(Formula):
    __slots__ = ("var", "child")
    _fields = ("var", "child")


_BINARY = (And, Or, Implies, Until, Release)
_UNARY = (Not, Next, Future, Globally, PathA, PathE)
QUANTIFIED = (ForallProp, ExistsProp)


def conj(items):
    """Left-associated conjunction of a list, folding the constants."""
    out = None
    for f in items:
        if isinstance(f, FalseConst):
            return FALSE
        if isinstance(f, TrueConst):
            continue
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


# ---------------------------------------------------------------------------
# Parsing


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<setatom>\{[^{}]*\}@[A-Za-z_][A-Za-z0-9_|/~^#]*)"
    r"|(?P<word>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<arrow>->)"
    r"|(?P<sym>[!&|()\[\].]))"
)

_KEYWORDS = {"true", "false", "forall", "exists"}
_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text[pos:].strip() == "":
                break
            raise FormulaSyntaxError(f"unexpected character {text[pos:].strip()[0]!r}", pos)
        if m.group("setatom"):
            tokens.append(("SETATOM", m.group("setatom"), m.start()))
        elif m.group("word"):
            tokens.append(("WORD", m.group("word"), m.start()))
        elif m.group("arrow"):
            tokens.append(("->", "->", m.start()))
        else:
            tokens.append((m.group("sym"), m.group("sym"), m.start()))
        pos = m.end()
    tokens.append(("END", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what=None):
        tok = self.next()
        if tok[0] != kind:
            raise FormulaSyntaxError(f"expected {what or kind!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self):
        f = self.quantified()
        tok = self.peek()
        if tok[0] != "END":
            raise FormulaSyntaxError(f"trailing input {tok[1]!r}", tok[2])
        return f

    def quantified(self):
        kind, value, _ = self.peek()
        if kind == "WORD" and value in ("forall", "exists"):
            self.next()
            var_tok = self.expect("WORD", "quantified variable")
            if not _ATOM_RE.match(var_tok[1]):
                raise FormulaSyntaxError(f"bad quantified variable {var_tok[1]!r}", var_tok[2])
            self.expect(".", "'.'")
            body = self.implies(False)
            node = ForallProp if value == "forall" else ExistsProp
            return node(var_tok[1], body)
        return self.implies(False)

    def implies(self, no_until):
        left = self.disj(no_until)
        if self.peek()[0] == "->":
            self.next()
            return Implies(left, self.implies(no_until))
        return left

    def disj(self, no_until):
        f = self.conj(no_until)
        while self.peek()[0] == "|":
            self.next()
            f = Or(f, self.conj(no_until))
        return f

    def conj(self, no_until):
        f = self.until(no_until)
        while self.peek()[0] == "&":
            self.next()
            f = And(f, self.until(no_until))
        return f

    def until(self, no_until):
        f = self.unary()
        kind, value, _ = self.peek()
        if not no_until and kind == "WORD" and value in ("U", "R"):
            self.next()
            right = self.until(False)
            return Until(f, right) if value == "U" else Release(f, right)
        return f

    def unary(self):
        kind, value, pos = self.next()
        if kind == "!":
            return Not(self.unary())
        if kind == "(":
            f = self.implies(False)
            self.expect(")", "')'")
            return f
        if kind == "SETATOM":
            body, name = value.rsplit("@", 1)
            states = [s.strip() for s in body[1:-1].split(",") if s.strip()]
            return SetAtom(name, states)
        if kind == "WORD":
            if value in ("X", "F", "G"):
                node = {"X": Next, "F": Future, "G": Globally}[value]
                return node(self.unary())
            if value in ("AX", "EX", "AF", "EF", "AG", "EG"):
                quant = PathA if value[0] == "A" else PathE
                node = {"X": Next, "F": Future, "G": Globally}[value[1]]
                return quant(node(self.unary()))
            if value in ("A", "E"):
                quant = PathA if value == "A" else PathE
                kind2, _, pos2 = self.peek()
                if kind2 == "(":
                    self.next()
                    f = self.implies(False)
                    self.expect(")", "')'")
                    return quant(f)
                if kind2 == "[":
                    self.next()
                    left = self.implies(True)
                    op = self.expect("WORD", "'U' or 'R'")
                    if op[1] not in ("U", "R"):
                        raise FormulaSyntaxError(f"expected 'U' or 'R', found {op[1]!r}", op[2])
                    right = self.implies(False)
                    self.expect("]", "']'")
                    return quant((Until if op[1] == "U" else Release)(left, right))
                raise FormulaSyntaxError(f"expected '(' or '[' after {value!r}", pos2)
            if value == "true":
                return TRUE
            if value == "false":
                return FALSE
            if value in ("forall", "exists"):
                raise FormulaSyntaxError("quantifier allowed only at the root", pos)
            if _ATOM_RE.match(value):
                return Atom(value)
            raise FormulaSyntaxError(f"unknown operator {value!r}", pos)
        raise FormulaSyntaxError(f"unexpected {value or 'end of input'!r}", pos)


def parse_formula(text):
    """Parse formula text into an AST; raises FormulaSyntaxError with position."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing


def _is_literal(f):
    if isinstance(f, (Atom, SetAtom, TrueConst, FalseConst)):
        return True
    return isinstance(f, Not) and _is_literal(f.child)


def _is_bracket_form(f):
    return isinstance(f, (PathA, PathE)) and isinstance(f.child, (Until, Release))


def _unary_op_arg(arg):
    if _is_literal(arg) or isinstance(arg, _UNARY):
        return render_formula(arg)
    return f"({render_formula(arg)})"


def _binary_operand(arg):
    if _is_literal(arg) or _is_bracket_form(arg):
        return render_formula(arg)
    return f"({render_formula(arg)})"


def _left_spine(f, node):
    items = []
    while isinstance(f, node):
        items.append(f.right)
        f = f.left
    items.append(f)
    items.reverse()
    return items


def render_formula(f):
    """Deterministic text form; parse_formula(render_formula(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, SetAtom):
        return "{" + ",".join(f.states) + "}@" + f.structure
    if isinstance(f, TrueConst):
        return "true"
    if isinstance(f, FalseConst):
        return "false"
    if isinstance(f, Not):
        return "!" + _unary_op_arg(f.child)
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        return op.join(_binary_operand(g) for g in _left_spine(f, type(f)))
    if isinstance(f, Implies):
        right = render_formula(f.right) if isinstance(f.right, Implies) else _binary_operand(f.right)
        return f"{_binary_operand(f.left)} -> {right}"
    if isinstance(f, (Until, Release)):
        op = " U " if isinstance(f, Until) else " R "
        return _binary_operand(f.left) + op + _binary_operand(f.right)
    if isinstance(f, Next):
        return "X " + _unary_op_arg(f.child)
    if isinstance(f, Future):
        return "F " + _unary_op_arg(f.child)
    if isinstance(f, Globally):
        return "G " + _unary_op_arg(f.child)
    if isinstance(f, (PathA, PathE)):
        q = "A" if isinstance(f, PathA) else "E"
        c = f.child
        if isinstance(c, Next):
            return q + "X " + _unary_op_arg(c.child)
        if isinstance(c, Future):
            return q + "F " + _unary_op_arg(c.child)
        if isinstance(c, Globally):
            return q + "G " + _unary_op_arg(c.child)
        if isinstance(c, (Until, Release)):
            op = " U " if isinstance(c, Until) else " R "
            return f"{q}[{_binary_operand(c.left)}{op}{render_formula(c.right)}]"
        return f"{q} ({render_formula(c)})"
    if isinstance(f, QUANTIFIED):
        kw = "forall" if isinstance(f, ForallProp) else "exists"
        return f"{kw} {f.var} . {render_formula(f.child)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Substitution and occurrence analysis


def _rebuild(f, new_children):
    parts = list(f._parts())
    it = iter(new_children)
    changed = False
    for i, p in enumerate(parts):
        if isinstance(p, Formula):
            q = next(it)
            if q is not p:
                parts[i] = q
                changed = True
    return type(f)(*parts) if changed else f


def substitute(phi, psi, chi):
    """Replace every maximal occurrence of psi (structural equality) by chi."""

    def go(f):
        if f == psi:
            return chi
        return _rebuild(f, [go(c) for c in f.children()])

    return go(phi)


def count_occurrences(phi, psi):
    """Number of maximal occurrences of psi in phi."""
    if phi == psi:
        return 1
    return sum(count_occurrences(c, psi) for c in phi.children())


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    MIXED = "mixed"
    ABSENT = "absent"


def occurrence_polarity(phi, psi):
    """Sign of psi's occurrences by parity of enclosing negations.

    Implies counts one negation on its left-hand side.  Maximal occurrences
    only, matching substitute().
    """
    seen = set()

    def go(f, parity):
        if f == psi:
            seen.add(parity)
            return
        if isinstance(f, Not):
            go(f.child, parity ^ 1)
        elif isinstance(f, Implies):
            go(f.left, parity ^ 1)
            go(f.right, parity)
        else:
            for c in f.children():
                go(c, parity)

    go(phi, 0)
    if not seen:
        return Polarity.ABSENT
    if seen == {0}:
        return Polarity.POSITIVE
    if seen == {1}:
        return Polarity.NEGATIVE
    return Polarity.MIXED


# ---------------------------------------------------------------------------
# Negation normal form


def nnf(phi):
    """Push negations to the atoms; A/E, U/R, F/G dualities; expands ->.

    The input must be quantifier-free.
    """
    if isinstance(phi, QUANTIFIED):
        raise ValueError("nnf expects a quantifier-free formula")
    return _nnf_pos(phi)


def _nnf_pos(f):
    if isinstance(f, (Atom, SetAtom, TrueConst, FalseConst)):
        return f
    if isinstance(f, Not):
        return _nnf_neg(f.child)
    if isinstance(f, Implies):
        return Or(_nnf_neg(f.left), _nnf_pos(f.right))
    return _rebuild(f, [_nnf_pos(c) for c in f.children()])


def _nnf_neg(f):
    if isinstance(f, (Atom, SetAtom)):
        return Not(f)
    if isinstance(f, TrueConst):
        return FALSE
    if isinstance(f, FalseConst):
        return TRUE
    if isinstance(f, Not):
        return _nnf_pos(f.child)
    if isinstance(f, And):
        return Or(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Or):
        return And(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Implies):
        return And(_nnf_pos(f.left), _nnf_neg(f.right))
    if isinstance(f, PathA):
        return PathE(_nnf_neg(f.child))
    if isinstance(f, PathE):
        return PathA(_nnf_neg(f.child))
    if isinstance(f, Next):
        return Next(_nnf_neg(f.child))
    if isinstance(f, Until):
        return Release(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Release):
        return Until(_nnf_neg(f.left), _nnf_neg(f.right))
    if isinstance(f, Future):
        return Globally(_nnf_neg(f.child))
    if isinstance(f, Globally):
        return Future(_nnf_neg(f.child))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Fragment analysis


def atoms(phi):
    """All proposition names occurring in phi (quantified variables included)."""
    out = set()

    def go(f):
        if isinstance(f, Atom):
            out.add(f.name)
        for c in f.children():
            go(c)

    go(phi)
    return out


def subformulas(phi):
    """Distinct subterms of phi, the DAG reading of the formula."""
    out = set()

    def go(f):
        if f in out:
            return
        out.add(f)
        for c in f.children():
            go(c)

    go(phi)
    return out


def formula_size(phi):
    """|phi| = number of distinct subterms (common subformulas shared)."""
    return len(subformulas(phi))


def is_state_formula(f):
    """True for formulas whose truth is a property of a state."""
    if isinstance(f, (Atom, SetAtom, TrueConst, FalseConst, PathA, PathE)):
        return True
    if isinstance(f, Not):
        return is_state_formula(f.child)
    if isinstance(f, (And, Or, Implies)):
        return is_state_formula(f.left) and is_state_formula(f.right)
    if isinstance(f, QUANTIFIED):
        return True
    return False


def is_pure_path(f):
    """No path quantifier anywhere inside."""
    if isinstance(f, (PathA, PathE) + QUANTIFIED):
        return False
    return all(is_pure_path(c) for c in f.children())


def is_ctl(phi):
    """Every path quantifier immediately pairs with one temporal operator."""
    if isinstance(phi, (Atom, SetAtom, TrueConst, FalseConst)):
        return True
    if isinstance(phi, Not):
        return is_ctl(phi.child)
    if isinstance(phi, (And, Or, Implies)):
        return is_ctl(phi.left) and is_ctl(phi.right)
    if isinstance(phi, (PathA, PathE)):
        c = phi.child
        if isinstance(c, (Next, Future, Globally)):
            return is_ctl(c.child)
        if isinstance(c, (Until, Release)):
            return is_ctl(c.left) and is_ctl(c.right)
        return False
    return False


def _contains_quantifier(f, kinds):
    if isinstance(f, kinds):
        return True
    return any(_contains_quantifier(c, kinds) for c in f.children())


_MARKER = Atom("__sub__")


def _scopes_universal(f, marker, inside_e=False):
    """No occurrence of marker (or its negation) under a PathE scope."""
    if f == marker or (isinstance(f, Not) and f.child == marker):
        return not inside_e
    if isinstance(f, PathE):
        return _scopes_universal(f.child, marker, True)
    if isinstance(f, PathA):
        return _scopes_universal(f.child, marker, inside_e)
    return all(_scopes_universal(c, marker, inside_e) for c in f.children())


def _scopes_existential(f, marker, inside_a=False):
    if f == marker or (isinstance(f, Not) and f.child == marker):
        return not inside_a
    if isinstance(f, PathA):
        return _scopes_existential(f.child, marker, True)
    if isinstance(f, PathE):
        return _scopes_existential(f.child, marker, inside_a)
    return all(_scopes_existential(c, marker, inside_a) for c in f.children())


@dataclass(frozen=True)
class Analysis:
    is_ctl: bool
    is_ltl: bool
    is_actl_star: bool
    is_ectl_star: bool
    size: int
    universal_in: bool
    existential_in: bool


def analyze(phi, psi=None):
    """Fragment flags, size, and quantifier-scope placement of psi in phi."""
    if isinstance(phi, QUANTIFIED):
        raise ValueError("analyze expects a quantifier-free formula")
    n = nnf(phi)
    actl = not _contains_quantifier(n, PathE)
    ectl = not _contains_quantifier(n, PathA)
    ltl = isinstance(phi, PathA) and is_pure_path(phi.child)
    if psi is None:
        universal = existential = False
    else:
        marked = nnf(substitute(phi, psi, _MARKER))
        universal = _scopes_universal(marked, _MARKER)
        existential = _scopes_existential(marked, _MARKER)
    return Analysis(
        is_ctl=is_ctl(phi),
        is_ltl=ltl,
        is_actl_star=actl,
        is_ectl_star=ectl,
        size=formula_size(phi),
        universal_in=universal,
        existential_in=existential,
    )


def fresh_prop(taken, base="x"):
    """A proposition name not occurring in `taken`."""
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


def strip_quantifier(q):
    """(kind, var, body) of a root-quantified formula."""
    if isinstance(q, ForallProp):
        return "forall", q.var, q.child
    if isinstance(q, ExistsProp):
        return "exists", q.var, q.child
    raise ValueError("expected a root-quantified formula")
