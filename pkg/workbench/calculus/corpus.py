"""Seeded random terms, for uniformity corpora and property tests."""
from __future__ import annotations

import random

from .lts import CCS_DATUM, Dialect
from .network import Network
from .syntax import (
    NIL, O, TAU, Input, Output, OutputAtom, Parallel, Renaming, Replication, Restriction,
    Sum, name, numeral, prefixed,
)

NAME_POOL = tuple(name(t) for t in ("a", "b", "c", "x", "y", "z"))


def _branch(rng, d, depth, names, announce):
    cont = random_process(rng, d, depth - 1, names, announce=announce, replication=False)
    kind = rng.choice(("in", "out", "tau") if d is not Dialect.PI_ASYNC else ("in",))
    if kind == "in":
        if d is Dialect.CCS:
            formal = name("u")
        else:
            formal = rng.choice(names)
        return Input(rng.choice(names), formal), cont
    if kind == "out":
        if announce and rng.random() < 0.3:
            return Output(O, rng.choice(announce)), cont
        datum = CCS_DATUM if d is Dialect.CCS else rng.choice(names)
        return Output(rng.choice(names), datum), cont
    return TAU, cont


def _sum(rng, d, depth, names, announce):
    if d is Dialect.PI_ASYNC:
        return Sum((_branch(rng, d, depth, names, announce),))
    branches = [_branch(rng, d, depth, names, announce) for _ in range(rng.randint(1, 3))]
    if d is Dialect.PI_SEPARATE:
        inputs = [b for b in branches if isinstance(b[0], Input)]
        others = [b for b in branches if not isinstance(b[0], Input)]
        branches = inputs if len(inputs) >= len(others) else others
    return Sum(tuple(branches))


def random_process(rng: random.Random, d: Dialect = Dialect.PI, depth: int = 3,
                   names=NAME_POOL, announce=(), replication=True):
    """A random term of dialect `d`; `announce` lists numerals that may be output on `o`."""
    if depth <= 0:
        return NIL if rng.random() < 0.5 or d is Dialect.CCS else OutputAtom(*rng.sample(names, 2))
    roll = rng.random()
    if roll < 0.15:
        if announce and rng.random() < 0.5:
            return OutputAtom(O, rng.choice(announce))
        if d is Dialect.CCS:
            return NIL
        return OutputAtom(rng.choice(names), rng.choice(names))
    if roll < 0.5:
        return _sum(rng, d, depth, names, announce)
    if roll < 0.65:
        return Restriction(rng.choice(names), random_process(rng, d, depth - 1, names,
                                                             announce, replication))
    if roll < 0.9 or not replication:
        return Parallel(random_process(rng, d, depth - 1, names, announce, replication),
                        random_process(rng, d, depth - 1, names, announce, replication))
    return Replication(_sum(rng, d, depth - 1, names, announce))


def random_pairs(seed: int, size: int, d: Dialect = Dialect.PI, depth: int = 3) -> list:
    rng = random.Random(seed)
    return [(random_process(rng, d, depth), random_process(rng, d, depth)) for _ in range(size)]


def random_renamings(seed: int, size: int, names=NAME_POOL) -> list:
    """Random permutations of `names`, so every renaming is injective."""
    rng = random.Random(seed)
    result = []
    for _ in range(size):
        image = list(names)
        rng.shuffle(image)
        result.append(Renaming(dict(zip(names, image))))
    return result


def random_network(rng: random.Random, k: int = 2, depth: int = 2) -> Network:
    """A replication-free network whose components may announce any node."""
    announce = tuple(numeral(i) for i in range(1, k + 1))
    names = NAME_POOL[:3]
    components = [random_process(rng, Dialect.PI, depth, names, announce, replication=False)
                  for _ in range(k)]
    return Network(components)


def async_with_io(rng: random.Random, depth: int = 4):
    """A random asynchronous term (no replication) built around at least one
    output atom and one input prefix."""
    out = OutputAtom(rng.choice(NAME_POOL), rng.choice(NAME_POOL))
    inp = prefixed(Input(rng.choice(NAME_POOL), rng.choice(NAME_POOL)),
                   random_process(rng, Dialect.PI_ASYNC, depth - 2, replication=False))
    rest = random_process(rng, Dialect.PI_ASYNC, depth - 2, replication=False)
    parts = [out, inp, rest]
    rng.shuffle(parts)
    term = Parallel(parts[0], Parallel(parts[1], parts[2]))
    if rng.random() < 0.3:
        term = Restriction(rng.choice(NAME_POOL), term)
    return term
