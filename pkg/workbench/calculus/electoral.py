"""Bounded decision procedure for the electoral-system property.

A network is electoral when every maximal computation ends with every
component having announced the same leader on `o`, and no computation ever
announces two different leaders. The network is explored as a closed system:
internal steps and announcements only.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .errors import WorkbenchError
from .lts import Dialect, FreeOutput
from .network import Computation, Network, network_key, network_transitions
from .syntax import O

logger = logging.getLogger(__name__)

NO_LEADER = "no-leader-on-maximal-run"
CONFLICT = "conflicting-announcements"
MISSING = "missing-projection-announcement"


@dataclass(frozen=True)
class ExploreBounds:
    max_depth: int = 40
    max_rep_unfoldings: int = 2
    max_states: int = 100_000

    def __post_init__(self):
        if self.max_depth < 1 or self.max_states < 1:
            raise WorkbenchError("max_depth and max_states must be positive")
        if self.max_rep_unfoldings < 0:
            raise WorkbenchError("max_rep_unfoldings must not be negative")


# Verdicts

@dataclass(frozen=True)
class Electoral:
    leaders: dict = field(default_factory=dict)
    exit_code = 0

    def to_json(self):
        return {"verdict": "electoral", "leaders": self.leaders,
                "distinct_leaders": sorted(set(self.leaders.values()))}


@dataclass(frozen=True)
class NotElectoral:
    witness: Computation
    reason: str
    exit_code = 1

    def to_json(self):
        return {"verdict": "not-electoral", "reason": self.reason,
                "witness": [step.describe() for step in self.witness.steps],
                "announcements": {str(k): [str(n) for n in v]
                                  for k, v in announcements(self.witness).items()}}


@dataclass(frozen=True)
class Inconclusive:
    bound: str
    exit_code = 2

    def to_json(self):
        return {"verdict": "inconclusive", "bound": self.bound}


def is_announcement(action) -> bool:
    return isinstance(action, FreeOutput) and action.channel == O and action.datum.is_numeral


def announcements(c: Computation) -> dict:
    """Numerals each node has output on `o` along `c`, in order."""
    result = {node: [] for node in c.start.nodes}
    for step in c.steps:
        for mover in step.movers:
            if is_announcement(mover.action):
                result[mover.node].append(mover.action.datum)
    return result


def _verdict_on(summary: dict, nodes) -> tuple:
    """(reason, leader) for a run whose announcements are `summary`."""
    announced = set().union(*summary.values())
    if len(announced) > 1:
        return CONFLICT, None
    if not announced:
        return NO_LEADER, None
    leader = int(next(iter(announced)).token)
    if leader not in nodes:
        return NO_LEADER, None
    if any(not summary[node] for node in nodes):
        return MISSING, None
    return None, leader


class _Violation(Exception):

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason


class _Explorer:
    """Depth-first search over closed steps, memoized on (state, announcements)."""

    def __init__(self, net: Network, d: Dialect, bounds: ExploreBounds):
        self.start = net
        self.dialect = d
        self.bounds = bounds
        self.seen = set()
        self.truncated = None
        self.leaders = {}

    def truncate(self, bound):
        if self.truncated is None:
            logger.info("exploration bound hit: %s", bound)
            self.truncated = bound

    def run(self):
        self.visit(self.start, {node: frozenset() for node in self.start.nodes}, 0, (), set())

    def finish(self, state, summary, path):
        reason, leader = _verdict_on(summary, self.start.nodes)
        if reason is not None:
            raise _Violation(path, reason)
        # runs meeting in one final network are told apart by who won
        self.leaders.setdefault(f"{state[0][:12]}:{leader}", leader)

    def visit(self, net, summary, unfolded, path, on_path):
        state = (network_key(net), tuple(sorted((k, tuple(sorted(v))) for k, v in summary.items())))
        if state in on_path:
            # the cycle adds no announcement, so the infinite run ends with `summary`
            self.finish(state, summary, path)
            return
        if state in self.seen:
            return
        if len(self.seen) >= self.bounds.max_states:
            self.truncate("states")
            return
        self.seen.add(state)
        steps = network_transitions(net, self.dialect, closed=True)
        if not steps:
            self.finish(state, summary, path)
            return
        if len(path) >= self.bounds.max_depth:
            self.truncate("depth")
            return
        on_path.add(state)
        for step in steps:
            used = unfolded + sum(m.derivation.count("Rep") for m in step.movers)
            if used > self.bounds.max_rep_unfoldings:
                self.truncate("unfoldings")
                continue
            after = dict(summary)
            for mover in step.movers:
                if is_announcement(mover.action):
                    after[mover.node] = after[mover.node] | {mover.action.datum}
            if len(set().union(*after.values())) > 1:
                raise _Violation(path + (step,), CONFLICT)
            self.visit(step.post, after, used, path + (step,), on_path)
        on_path.discard(state)


def is_electoral(net: Network, d: Dialect = Dialect.PI, b: ExploreBounds = None):
    """Electoral, NotElectoral (with a replayable witness) or Inconclusive."""
    b = b or ExploreBounds()
    explorer = _Explorer(net, d, b)
    try:
        explorer.run()
    except _Violation as violation:
        witness = Computation(net, violation.path)
        logger.info("not electoral (%s) after %d steps", violation.reason, len(witness))
        return NotElectoral(witness, violation.reason)
    if explorer.truncated is not None:
        return Inconclusive(explorer.truncated)
    logger.info("electoral over %d states, leaders %s", len(explorer.seen),
                sorted(set(explorer.leaders.values())))
    return Electoral(explorer.leaders)


@dataclass(frozen=True)
class ExploreStats:
    states: int
    transitions: int
    maximal: int
    depth: int
    truncated: str | None

    def to_json(self):
        return {"states": self.states, "transitions": self.transitions,
                "maximal": self.maximal, "depth": self.depth, "truncated": self.truncated}


def explore(net: Network, d: Dialect = Dialect.PI, b: ExploreBounds = None) -> ExploreStats:
    """Breadth-first census of the closed state space."""
    b = b or ExploreBounds()
    frontier, seen = [net], {network_key(net)}
    transitions = maximal = depth = 0
    truncated = None
    while frontier and truncated is None:
        if depth >= b.max_depth:
            truncated = "depth"
            break
        next_frontier = []
        for state in frontier:
            steps = network_transitions(state, d, closed=True)
            transitions += len(steps)
            maximal += not steps
            for step in steps:
                key = network_key(step.post)
                if key in seen:
                    continue
                if len(seen) >= b.max_states:
                    truncated = "states"
                    break
                seen.add(key)
                next_frontier.append(step.post)
        frontier = next_frontier
        depth += bool(frontier)
    return ExploreStats(len(seen), transitions, maximal, depth, truncated)
