"""Process terms: names, binders, substitution, alpha-equivalence, structural
congruence and the textual grammar.

Grammar (one-token lookahead)::

    network   ::= component ('||' component)*
    component ::= [numeral ':'] process
    process   ::= sum ('|' sum)*
    sum       ::= unary ('+' unary)*
    unary     ::= '0' | '!' unary | 'new' x '.' unary | 'tau' '.' unary
                | x '?' '(' y ')' '.' unary
                | x '!' y ['.' unary]
                | x '!' '(' y ')' ['.' unary]
                | '(' process ')'

`x!y` alone is the output atom of the asynchronous dialect, `x!y.P` an output
prefix and `x!(y).P` the bound-output sugar for `new y.(x!y.P)`. Summands must
be prefix-guarded; the restriction introduced by the sugar is hoisted above the
whole sum. `new` and `!` scope over one unary term, so `new x. a!x | b!c`
reads as `(new x. a!x) | b!c`.
"""
from __future__ import annotations

import itertools
import logging
import re
import threading
from dataclasses import dataclass, field
from functools import cache

from .errors import ParseError, RenamingError, ReservedNameError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Name:
    """An interned channel/datum name.

    Tokens made only of digits are numerals, tokens containing `~` come from
    the fresh-name source and tokens starting with `%` are the canonical
    bound names produced by `canonical`; everything else was written by hand.
    """
    token: str

    @property
    def origin(self):
        if self.token.isdigit():
            return "numeral"
        if self.token.startswith("%"):
            return "canonical"
        if "~" in self.token:
            return "fresh"
        return "source"

    @property
    def is_numeral(self):
        return self.token.isdigit()

    def __str__(self):
        return self.token


@cache
def name(token: str) -> Name:
    """Return the interned Name for `token`."""
    return Name(token)


def numeral(n: int) -> Name:
    return name(str(n))


O = name("o")
# the datum of CCS outputs; never a channel and never bound
UNIT = name("unit")


class FreshNames:
    """Session-scoped source of fresh names.

    Fresh tokens look like `stem~N`; N strictly increases for the lifetime of
    the source, and the `~` keeps them apart from source names and numerals.
    """

    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self._floor = 0

    def next(self, base: Name | str = "v") -> Name:
        stem = base.token if isinstance(base, Name) else base
        stem = stem.split("~")[0].lstrip("%")
        if not stem or not stem[0].isalpha() or stem == O.token:
            stem = "v"
        with self._lock:
            n = next(self._counter)
            while n <= self._floor:
                n = next(self._counter)
        return name(f"{stem}~{n}")

    def observe(self, n: int):
        """Make sure counters up to `n` are never handed out (parsed fresh names)."""
        with self._lock:
            self._floor = max(self._floor, n)


FRESH = FreshNames()


# Prefixes

@dataclass(frozen=True)
class Input:
    channel: Name
    formal: Name

    def __str__(self):
        return f"{self.channel}?({self.formal})"


@dataclass(frozen=True)
class Output:
    channel: Name
    datum: Name

    def __str__(self):
        return f"{self.channel}!{self.datum}"


@dataclass(frozen=True)
class Tau:
    def __str__(self):
        return "tau"


TAU = Tau()

Prefix = Input | Output | Tau


# Processes

class Process:
    """Base of the five term constructors; `fn` holds the free names."""

    fn: frozenset

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True)
class Sum(Process):
    """Guarded choice; the empty sum is inaction."""
    branches: tuple = ()
    fn: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        branches = tuple(tuple(b) for b in self.branches)
        object.__setattr__(self, "branches", branches)
        names = set()
        for prefix, cont in branches:
            match prefix:
                case Input(channel, formal):
                    names.add(channel)
                    names |= cont.fn - {formal}
                case Output(channel, datum):
                    names |= {channel, datum} | cont.fn
                case Tau():
                    names |= cont.fn
        object.__setattr__(self, "fn", frozenset(names))


@dataclass(frozen=True)
class OutputAtom(Process):
    channel: Name
    datum: Name
    fn: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fn", frozenset({self.channel, self.datum}))


@dataclass(frozen=True)
class Restriction(Process):
    bound: Name
    body: Process
    fn: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fn", self.body.fn - {self.bound})


@dataclass(frozen=True)
class Parallel(Process):
    left: Process
    right: Process
    fn: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fn", self.left.fn | self.right.fn)


@dataclass(frozen=True)
class Replication(Process):
    body: Process
    fn: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fn", self.body.fn)


NIL = Sum()


def prefixed(prefix, cont=NIL) -> Sum:
    return Sum(((prefix, cont),))


def parallel(*procs: Process) -> Process:
    """Right-nested parallel composition; the empty composition is 0."""
    if not procs:
        return NIL
    result = procs[-1]
    for p in reversed(procs[:-1]):
        result = Parallel(p, result)
    return result


def free_names(p: Process) -> frozenset:
    return p.fn


# Renaming and substitution

class Renaming:
    """Finite partial map on names, identity outside its domain."""

    def __init__(self, mapping=None):
        self._map = {k: v for k, v in dict(mapping or {}).items() if k != v}

    def __call__(self, n: Name) -> Name:
        return self._map.get(n, n)

    @property
    def mapping(self):
        return dict(self._map)

    def compose(self, other: Renaming) -> Renaming:
        """self after other."""
        keys = set(self._map) | set(other._map)
        return Renaming({k: self(other(k)) for k in keys})

    def inverse(self) -> Renaming:
        if not self.is_injective_on(self._map):
            raise RenamingError(f"{self} has no inverse")
        return Renaming({v: k for k, v in self._map.items()})

    def extended(self, mapping) -> Renaming:
        return Renaming({**self._map, **dict(mapping)})

    def is_injective_on(self, names) -> bool:
        names = set(names)
        return len({self(n) for n in names}) == len(names)

    def __eq__(self, other):
        return isinstance(other, Renaming) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __repr__(self):
        pairs = ", ".join(f"{k}->{v}" for k, v in sorted(self._map.items()))
        return f"Renaming({pairs})"


def _under_binder(binder, body, mapping):
    """Mapping to push under `binder`, refreshing the binder on capture."""
    inner = {x: y for x, y in mapping.items() if x != binder and x in body.fn}
    if binder in inner.values():
        fresh = FRESH.next(binder)
        inner[binder] = fresh
        return fresh, inner
    return binder, inner


def rename(p: Process, mapping) -> Process:
    """Simultaneous capture-avoiding substitution of `mapping` in `p`."""
    mapping = {x: y for x, y in dict(mapping).items() if x != y and x in p.fn}
    if not mapping:
        return p
    get = lambda n: mapping.get(n, n)  # noqa: E731
    match p:
        case OutputAtom(channel, datum):
            return OutputAtom(get(channel), get(datum))
        case Parallel(left, right):
            return Parallel(rename(left, mapping), rename(right, mapping))
        case Replication(body):
            return Replication(rename(body, mapping))
        case Restriction(bound, body):
            bound, inner = _under_binder(bound, body, mapping)
            return Restriction(bound, rename(body, inner))
        case Sum(branches):
            renamed = []
            for prefix, cont in branches:
                match prefix:
                    case Input(channel, formal):
                        formal, inner = _under_binder(formal, cont, mapping)
                        renamed.append((Input(get(channel), formal), rename(cont, inner)))
                    case Output(channel, datum):
                        renamed.append((Output(get(channel), get(datum)), rename(cont, mapping)))
                    case Tau():
                        renamed.append((prefix, rename(cont, mapping)))
            return Sum(tuple(renamed))
    raise TypeError(f"Unexpected term in rename: {p!r}")


def substitute(p: Process, x: Name, y: Name) -> Process:
    """P{y/x}."""
    return rename(p, {x: y})


def apply_renaming(sigma: Renaming, p: Process) -> Process:
    """sigma-renaming of a process; bound names are left to alpha-conversion."""
    if not sigma.is_injective_on(p.fn):
        raise RenamingError(f"{sigma} is not injective on fn = {sorted(map(str, p.fn))}")
    return rename(p, sigma.mapping)


# Alpha-equivalence

def canonical(p: Process) -> Process:
    """Rename bound names to %0, %1, ... in leftmost-outermost binder order."""
    counter = itertools.count()

    def walk(p, env):
        get = lambda n: env.get(n, n)  # noqa: E731
        match p:
            case OutputAtom(channel, datum):
                return OutputAtom(get(channel), get(datum))
            case Parallel(left, right):
                return Parallel(walk(left, env), walk(right, env))
            case Replication(body):
                return Replication(walk(body, env))
            case Restriction(bound, body):
                fresh = name(f"%{next(counter)}")
                return Restriction(fresh, walk(body, {**env, bound: fresh}))
            case Sum(branches):
                out = []
                for prefix, cont in branches:
                    match prefix:
                        case Input(channel, formal):
                            fresh = name(f"%{next(counter)}")
                            out.append((Input(get(channel), fresh),
                                        walk(cont, {**env, formal: fresh})))
                        case Output(channel, datum):
                            out.append((Output(get(channel), get(datum)), walk(cont, env)))
                        case Tau():
                            out.append((prefix, walk(cont, env)))
                return Sum(tuple(out))
        raise TypeError(f"Unexpected term in canonical: {p!r}")

    return walk(p, {})


def alpha_equiv(p: Process, q: Process) -> bool:
    return p.fn == q.fn and canonical(p) == canonical(q)


# Structural congruence

_PLACEHOLDER = name("%_")


def _flatten(p: Process):
    """Split a parallel/restriction soup into fresh binders and components."""
    match p:
        case Parallel(left, right):
            bl, cl = _flatten(left)
            br, cr = _flatten(right)
            return bl + br, cl + cr
        case Restriction(bound, body):
            fresh = FRESH.next(bound)
            binders, comps = _flatten(substitute(body, bound, fresh))
            return [fresh] + binders, comps
    return [], [_normalize(p)]


def _first_occurrences(comps, binders):
    wanted = set(binders)
    order = []

    def note(*names):
        for n in names:
            if n in wanted and n not in order:
                order.append(n)

    def visit(p):
        match p:
            case OutputAtom(channel, datum):
                note(channel, datum)
            case Sum(branches):
                for prefix, cont in branches:
                    match prefix:
                        case Input(channel, _):
                            note(channel)
                        case Output(channel, datum):
                            note(channel, datum)
                    visit(cont)
            case Restriction(_, body) | Replication(body):
                visit(body)
            case Parallel(left, right):
                visit(left)
                visit(right)

    for comp in comps:
        visit(comp)
    return order + [b for b in binders if b not in order]


def _rebuild(binders, comps):
    shape = {id(c): pretty(canonical(rename(c, {b: _PLACEHOLDER for b in binders})))
             for c in comps}
    ordered = sorted(comps, key=lambda c: shape[id(c)])
    for _ in range(len(comps)):
        order = _first_occurrences(ordered, binders)
        marks = {b: name(f"%b{i}") for i, b in enumerate(order)}
        refined = sorted(ordered, key=lambda c: (shape[id(c)], pretty(canonical(rename(c, marks)))))
        if refined == ordered:
            break
        ordered = refined
    order = _first_occurrences(ordered, binders)
    result = parallel(*ordered)
    for b in reversed(order):
        result = Restriction(b, result)
    return result


def _normalize(p: Process) -> Process:
    match p:
        case Sum(branches):
            return Sum(tuple((prefix, _normalize(cont)) for prefix, cont in branches))
        case OutputAtom():
            return p
        case Replication(body):
            return Replication(_normalize(body))
        case Restriction() | Parallel():
            binders, comps = _flatten(p)
            return _rebuild(binders, comps)
    raise TypeError(f"Unexpected term in normal_form: {p!r}")


def normal_form(p: Process) -> Process:
    """Canonical representative of p modulo alpha, commutativity/associativity
    of `|` and scope extension; restrictions sit at the top of every parallel
    soup and bound names are canonical.

    Nothing else is identified: `0 | 0` and `0` differ, and so do `new x.0`
    and `0`.
    """
    return canonical(_normalize(p))


def discard_inert(p: Process) -> Process:
    """Drop `0` components of parallel compositions and restrictions whose
    name is unused, at every depth. The result is strongly bisimilar to p
    but in general not structurally congruent to it."""
    match p:
        case Sum(branches):
            return Sum(tuple((prefix, discard_inert(cont)) for prefix, cont in branches))
        case Replication(body):
            return Replication(discard_inert(body))
        case Restriction(bound, body):
            body = discard_inert(body)
            return Restriction(bound, body) if bound in body.fn else body
        case Parallel(left, right):
            parts = [q for q in (discard_inert(left), discard_inert(right)) if q != NIL]
            return parallel(*parts)
    return p


def struct_congruent(p: Process, q: Process) -> bool:
    return normal_form(p) == normal_form(q)


# Printing

_LEVEL_PAR, _LEVEL_SUM, _LEVEL_UNARY = 0, 1, 2


def _level(p):
    match p:
        case Parallel():
            return _LEVEL_PAR
        case Sum(branches) if len(branches) > 1:
            return _LEVEL_SUM
    return _LEVEL_UNARY


def pretty(p: Process, level: int = _LEVEL_PAR) -> str:
    """Print `p` in the grammar of this module."""
    match p:
        case Parallel(left, right):
            text = f"{pretty(left, _LEVEL_SUM)} | {pretty(right, _LEVEL_PAR)}"
        case Sum(()):
            text = "0"
        case Sum(branches):
            text = " + ".join(f"{prefix}.{pretty(cont, _LEVEL_UNARY)}" for prefix, cont in branches)
        case OutputAtom(channel, datum):
            text = f"{channel}!{datum}"
        case Restriction(bound, body):
            text = f"new {bound}.{pretty(body, _LEVEL_UNARY)}"
        case Replication(body):
            text = f"!{pretty(body, _LEVEL_UNARY)}"
        case _:
            raise TypeError(f"Unexpected term in pretty: {p!r}")
    return f"({text})" if _level(p) < level else text


# Parsing

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<pipe2>\|\|)
  | (?P<sym>[?!().+|:])
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*(?:~\d+)?)
""", re.VERBOSE)

_KEYWORDS = {"new", "tau"}


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text):
    tokens, pos, line, line_start = [], 0, 1, 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        value = match.group()
        if kind != "ws":
            if kind == "pipe2":
                kind = "sym"
            elif kind == "ident" and value in _KEYWORDS:
                kind = value
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = match.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:

    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message, token=None):
        token = token or self.peek
        return ParseError(message, token.line, token.column)

    def accept(self, text):
        if self.peek.text == text and self.peek.kind in ("sym", text):
            return self.advance()
        return None

    def expect(self, text):
        token = self.accept(text)
        if token is None:
            found = self.peek.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")
        return token

    def name(self):
        token = self.peek
        if token.kind not in ("ident", "num"):
            raise self.error(f"expected a name, found {token.text or 'end of input'!r}")
        self.advance()
        if "~" in token.text:
            FRESH.observe(int(token.text.rsplit("~", 1)[1]))
        return name(token.text)

    def binder(self):
        token = self.peek
        n = self.name()
        if n == O or n.is_numeral or n == UNIT:
            raise ReservedNameError(f"{n} cannot be bound", token.line, token.column)
        return n

    def network(self):
        components = []
        while True:
            ident = None
            if self.peek.kind == "num" and self.tokens[self.pos + 1].text == ":":
                ident = numeral(int(self.advance().text))
                self.expect(":")
            components.append((ident, self.process()))
            if not self.accept("||"):
                break
        self.end()
        return components

    def end(self):
        if self.peek.kind != "eof":
            raise self.error(f"unexpected {self.peek.text!r}")

    def process(self):
        operands = [self.sum()]
        while self.accept("|"):
            operands.append(self.sum())
        return parallel(*operands)

    def sum(self):
        start = self.peek
        operands = [self.unary()]
        while self.accept("+"):
            operands.append(self.unary())
        if len(operands) == 1:
            return operands[0]
        binders, branches = [], []
        for op in operands:
            inner, summand = [], op
            while isinstance(summand, Restriction):
                inner.append(summand.bound)
                summand = summand.body
            if not isinstance(summand, Sum) or len(summand.branches) != 1:
                raise self.error("summands must be prefix-guarded", start)
            binders.append(inner)
            branches.append(summand.branches[0])
        # hoist the bound-output restrictions above the whole sum
        hoisted = []
        for i, inner in enumerate(binders):
            others = Sum(tuple(b for j, b in enumerate(branches) if j != i)).fn
            for b in inner:
                if b in others or b in hoisted:
                    fresh = FRESH.next(b)
                    branches[i] = substitute(Sum((branches[i],)), b, fresh).branches[0]
                    b = fresh
                hoisted.append(b)
        result = Sum(tuple(branches))
        for b in reversed(hoisted):
            result = Restriction(b, result)
        return result

    def unary(self):
        token = self.peek
        if self.accept("("):
            p = self.process()
            self.expect(")")
            return p
        if token.kind == "num" and token.text == "0":
            self.advance()
            return NIL
        if self.accept("!"):
            return Replication(self.unary())
        if token.kind == "new":
            self.advance()
            bound = self.binder()
            self.expect(".")
            return Restriction(bound, self.unary())
        if token.kind == "tau":
            self.advance()
            self.expect(".")
            return prefixed(TAU, self.unary())
        channel = self.name()
        if channel == UNIT:
            raise ReservedNameError(f"{UNIT} is a datum, not a channel", token.line, token.column)
        if self.accept("?"):
            self.expect("(")
            formal = self.binder()
            self.expect(")")
            self.expect(".")
            return prefixed(Input(channel, formal), self.unary())
        if self.accept("!"):
            if self.accept("("):
                datum = self.binder()
                self.expect(")")
                if self.accept("."):
                    return Restriction(datum, prefixed(Output(channel, datum), self.unary()))
                return Restriction(datum, OutputAtom(channel, datum))
            datum = self.name()
            if self.accept("."):
                return prefixed(Output(channel, datum), self.unary())
            return OutputAtom(channel, datum)
        raise self.error(f"expected a process, found {token.text or 'end of input'!r}", token)


def parse(text: str) -> Process:
    """Parse one process."""
    parser = _Parser(text)
    p = parser.process()
    parser.end()
    return p


def parse_components(text: str):
    """Parse a network file: a list of (identifier or None, process)."""
    return _Parser(text).network()
