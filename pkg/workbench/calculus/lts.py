"""Early-instantiation labelled transition system.

Rules: I-Sum, O-Sum, Tau-Sum, Out (asynchronous output atoms), Open, Res, Par,
Com, Close and Rep. Cong is not a separate search: the rules above already
produce every action of a congruent term, and callers compare targets through
`syntax.normal_form`.

Inputs are computed once per input prefix as a `Reception`: the continuation
with the formal replaced by a fresh placeholder, instantiated on demand with
the received name. This is how Com/Close pick the exact datum and how the
public `transitions` keeps early branching finite.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

from .errors import DialectError
from .syntax import (
    FRESH, NIL, O, UNIT, Input, Name, Output, OutputAtom, Parallel, Process,
    Replication, Restriction, Sum, Tau, substitute,
)

logger = logging.getLogger(__name__)


class Dialect(enum.Enum):
    PI = "pi"
    PI_ASYNC = "pia"
    CCS = "ccs"
    PI_SEPARATE = "sep"


CCS_DATUM = UNIT


# Actions

@dataclass(frozen=True)
class InputAct:
    channel: Name
    received: Name

    def __str__(self):
        return f"{self.channel}?({self.received})"


@dataclass(frozen=True)
class FreeOutput:
    channel: Name
    datum: Name

    def __str__(self):
        return f"{self.channel}!{self.datum}"


@dataclass(frozen=True)
class BoundOutput:
    channel: Name
    datum: Name

    def __str__(self):
        return f"{self.channel}!({self.datum})"


@dataclass(frozen=True)
class TauAct:
    def __str__(self):
        return "tau"


TAU_ACT = TauAct()

Action = InputAct | FreeOutput | BoundOutput | TauAct


def bn(action) -> frozenset:
    match action:
        case InputAct(_, received):
            return frozenset({received})
        case BoundOutput(_, datum):
            return frozenset({datum})
    return frozenset()


def action_names(action) -> frozenset:
    match action:
        case InputAct(channel, other) | FreeOutput(channel, other) | BoundOutput(channel, other):
            return frozenset({channel, other})
    return frozenset()


def is_output(action) -> bool:
    return isinstance(action, (FreeOutput, BoundOutput))


def rename_action(action, sigma):
    """Apply a renaming (any callable on names) to the names of an action."""
    match action:
        case InputAct(channel, received):
            return InputAct(sigma(channel), sigma(received))
        case FreeOutput(channel, datum):
            return FreeOutput(sigma(channel), sigma(datum))
        case BoundOutput(channel, datum):
            return BoundOutput(sigma(channel), sigma(datum))
    return action


# Derivations

@dataclass(frozen=True)
class Derivation:
    """Proof-tree tag: the rule, the branch it picked and its premises."""
    rule: str
    arg: int | None = None
    premises: tuple = ()

    def __str__(self):
        head = self.rule if self.arg is None else f"{self.rule}[{self.arg}]"
        if not self.premises:
            return head
        return f"{head}({', '.join(map(str, self.premises))})"

    def count(self, rule: str) -> int:
        return (self.rule == rule) + sum(p.count(rule) for p in self.premises)


@dataclass(frozen=True)
class TransitionStep:
    source: Process
    action: object
    target: Process
    derivation: Derivation


@dataclass(frozen=True)
class Reception:
    """An input capability: `instantiate(z)` is the early step receiving z."""
    source: Process
    channel: Name
    placeholder: Name
    body: Process
    derivation: Derivation

    def instantiate(self, received: Name) -> TransitionStep:
        return TransitionStep(self.source, InputAct(self.channel, received),
                              substitute(self.body, self.placeholder, received),
                              self.derivation)

    def wrap(self, source, body, rule):
        return Reception(source, self.channel, self.placeholder, body,
                         Derivation(rule, premises=(self.derivation,)))


# Dialects

def _ccs_datum_ok(channel, datum):
    return datum == CCS_DATUM or (channel == O and datum.is_numeral)


def dialect_check(p: Process, d: Dialect) -> bool:
    """True iff every subterm of `p` obeys the syntactic restriction of `d`."""
    if d is Dialect.PI:
        return True
    match p:
        case OutputAtom(channel, datum):
            return d is not Dialect.CCS or _ccs_datum_ok(channel, datum)
        case Restriction(_, body) | Replication(body):
            return dialect_check(body, d)
        case Parallel(left, right):
            return dialect_check(left, d) and dialect_check(right, d)
        case Sum(branches):
            prefixes = [prefix for prefix, _ in branches]
            if d is Dialect.PI_ASYNC:
                if len(branches) > 1 or any(not isinstance(a, Input) for a in prefixes):
                    return False
            elif d is Dialect.PI_SEPARATE:
                inputs = sum(isinstance(a, Input) for a in prefixes)
                if inputs not in (0, len(prefixes)):
                    return False
            elif d is Dialect.CCS:
                for prefix, cont in branches:
                    match prefix:
                        case Input(_, formal) if formal in cont.fn:
                            return False
                        case Output(channel, datum) if not _ccs_datum_ok(channel, datum):
                            return False
            return all(dialect_check(cont, d) for _, cont in branches)
    raise TypeError(f"Unexpected term in dialect_check: {p!r}")


# Rules

def _communicate(source, reception, output, make_target, rule):
    """Com/Close between an input capability and an output step."""
    premises = (reception.derivation, output.derivation)
    match output.action:
        case FreeOutput(_, datum):
            received = reception.instantiate(datum)
            return TransitionStep(source, TAU_ACT, make_target(received.target, output.target),
                                  Derivation(f"Com-{rule}", premises=premises))
        case BoundOutput(_, datum):
            received = reception.instantiate(datum)
            return TransitionStep(source, TAU_ACT,
                                  Restriction(datum, make_target(received.target, output.target)),
                                  Derivation(f"Close-{rule}", premises=premises))
    raise TypeError(f"Not an output: {output.action!r}")


def _matches(reception, step):
    return is_output(step.action) and step.action.channel == reception.channel


def moves(p: Process):
    """All non-input steps of `p` and all its input capabilities."""
    steps, receptions = [], []
    match p:
        case OutputAtom(channel, datum):
            steps.append(TransitionStep(p, FreeOutput(channel, datum), NIL, Derivation("Out")))
        case Sum(branches):
            for j, (prefix, cont) in enumerate(branches):
                match prefix:
                    case Input(channel, formal):
                        placeholder = FRESH.next(formal)
                        receptions.append(Reception(p, channel, placeholder,
                                                    substitute(cont, formal, placeholder),
                                                    Derivation("I-Sum", j)))
                    case Output(channel, datum):
                        steps.append(TransitionStep(p, FreeOutput(channel, datum), cont,
                                                    Derivation("O-Sum", j)))
                    case Tau():
                        steps.append(TransitionStep(p, TAU_ACT, cont, Derivation("Tau-Sum", j)))
        case Restriction(bound, body):
            inner_steps, inner_receptions = moves(body)
            for step in inner_steps:
                action = step.action
                premise = (step.derivation,)
                if (isinstance(action, FreeOutput) and action.datum == bound
                        and action.channel != bound):
                    fresh = FRESH.next(bound)
                    steps.append(TransitionStep(p, BoundOutput(action.channel, fresh),
                                                substitute(step.target, bound, fresh),
                                                Derivation("Open", premises=premise)))
                elif bound not in action_names(action):
                    steps.append(TransitionStep(p, action, Restriction(bound, step.target),
                                                Derivation("Res", premises=premise)))
            for reception in inner_receptions:
                if reception.channel != bound:
                    receptions.append(reception.wrap(p, Restriction(bound, reception.body), "Res"))
        case Parallel(left, right):
            left_steps, left_receptions = moves(left)
            right_steps, right_receptions = moves(right)
            for step in left_steps:
                steps.append(TransitionStep(p, step.action, Parallel(step.target, right),
                                            Derivation("Par-L", premises=(step.derivation,))))
            for step in right_steps:
                steps.append(TransitionStep(p, step.action, Parallel(left, step.target),
                                            Derivation("Par-R", premises=(step.derivation,))))
            for reception in left_receptions:
                receptions.append(reception.wrap(p, Parallel(reception.body, right), "Par-L"))
            for reception in right_receptions:
                receptions.append(reception.wrap(p, Parallel(left, reception.body), "Par-R"))
            for reception in left_receptions:
                for step in right_steps:
                    if _matches(reception, step):
                        steps.append(_communicate(p, reception, step, Parallel, "L"))
            for reception in right_receptions:
                for step in left_steps:
                    if _matches(reception, step):
                        steps.append(_communicate(p, reception, step,
                                                  lambda inp, out: Parallel(out, inp), "R"))
        case Replication(body):
            copy_steps, copy_receptions = moves(body)
            for step in copy_steps:
                steps.append(TransitionStep(p, step.action, Parallel(step.target, p),
                                            Derivation("Rep", premises=(step.derivation,))))
            for reception in copy_receptions:
                receptions.append(reception.wrap(p, Parallel(reception.body, p), "Rep"))
            # two unfolded copies talking to each other
            other_steps, _ = moves(body)
            for reception in copy_receptions:
                for step in other_steps:
                    if _matches(reception, step):
                        inner = _communicate(p, reception, step,
                                             lambda inp, out: Parallel(inp, Parallel(out, p)), "L")
                        steps.append(TransitionStep(p, TAU_ACT, inner.target,
                                                    Derivation("Rep", premises=(inner.derivation,))))
        case _:
            raise TypeError(f"Unexpected term in moves: {p!r}")
    return steps, receptions


def transitions(p: Process, d: Dialect = Dialect.PI, universe=frozenset()) -> list:
    """Every step of `p`, early inputs drawn from `universe` plus one fresh name."""
    if not dialect_check(p, d):
        raise DialectError(f"term is not in dialect {d.value}: {p}")
    steps, receptions = moves(p)
    candidates = sorted(set(universe) | p.fn) + [FRESH.next("w")]
    for reception in receptions:
        steps.extend(reception.instantiate(z) for z in candidates)
    return steps
