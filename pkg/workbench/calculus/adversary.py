"""Symmetric schedules that keep an asynchronous network from electing.

The adversary works in rounds. A round picks one step of one component and
then lets every component of the orbit do the corresponding step, so the
network is symmetric again at the end of the round. Communications between a
node and its image under sigma^r are closed around the cycles of sigma^r,
which is where confluence of asynchronous output and input is needed.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .electoral import is_announcement
from .errors import (
    NoDiamond, NotAnAutomorphism, NotAsync, PreconditionFailed, Stuck, SymmetryBroken,
    WorkbenchError,
)
from .lts import (
    TAU_ACT, BoundOutput, Dialect, FreeOutput, InputAct, TauAct, dialect_check,
    transitions,
)
from .network import (
    Automorphism, Computation, Network, check_automorphism, hypergraph_of,
    is_symmetric, is_well_balanced, network_transitions, orbit, orbits, single_orbit,
)
from .syntax import (
    O, Process, apply_renaming, normal_form, parallel, struct_congruent, substitute,
)

logger = logging.getLogger(__name__)


# Confluence

@dataclass(frozen=True)
class DiamondResult:
    """`left_step` runs the input after the output, `right_step` the output
    after the input; both reach `r` up to structural congruence."""
    r: Process
    left_step: object
    right_step: object


def _same_output(actual, expected) -> bool:
    if isinstance(expected, BoundOutput):
        return isinstance(actual, BoundOutput) and actual.channel == expected.channel
    return actual == expected


def find_diamond(p: Process, out_step, in_step, d: Dialect = Dialect.PI) -> DiamondResult | None:
    """Close the square spanned by an output step and an input step of `p`, if it closes."""
    if not isinstance(out_step.action, (FreeOutput, BoundOutput)):
        raise WorkbenchError(f"{out_step.action} is not an output")
    if not isinstance(in_step.action, InputAct):
        raise WorkbenchError(f"{in_step.action} is not an input")
    universe = p.fn | {in_step.action.received}
    after_out = [s for s in transitions(out_step.target, d, universe) if s.action == in_step.action]
    after_in = [s for s in transitions(in_step.target, d, universe)
                if _same_output(s.action, out_step.action)]
    for left in after_out:
        for right in after_in:
            closing = right.target
            if isinstance(right.action, BoundOutput):
                closing = substitute(closing, right.action.datum, out_step.action.datum)
            if struct_congruent(left.target, closing):
                return DiamondResult(normal_form(left.target), left, right)
    return None


def confluence_diamond(p: Process, out_step, in_step) -> DiamondResult:
    if not dialect_check(p, Dialect.PI_ASYNC):
        raise NotAsync(f"confluence holds for asynchronous terms only: {p}")
    result = find_diamond(p, out_step, in_step, Dialect.PI_ASYNC)
    if result is None:
        raise NoDiamond(f"{out_step.action} and {in_step.action} do not commute in {p}")
    return result


# Preconditions

def _order(sigma: Automorphism) -> int:
    return math.lcm(*(len(o) for o in orbits(sigma)))


def ccs_applicable(net: Network, sigma: Automorphism) -> bool:
    """No arc joins a node to one of its images under a power of sigma."""
    h = hypergraph_of(net)
    for power in range(1, _order(sigma)):
        moved = sigma.power(power)
        for n in h.nodes:
            image = moved.node(n)
            if image == n:
                continue
            if any(n in kind and image in kind for kind in h.type_of.values()):
                return False
    return True


def reduce_well_balanced(net: Network, sigma: Automorphism):
    """Group one representative per orbit into composite components.

    Returns (Q, theta) where Q_t = P_{sigma^t(i_1)} | ... | P_{sigma^t(i_p)} and
    theta is the cycle on the composites; identifiers inside the components
    still follow sigma.
    """
    if sigma.is_identity:
        raise PreconditionFailed("the automorphism is the identity")
    if not is_well_balanced(sigma):
        raise PreconditionFailed(f"{sigma} is not well-balanced")
    if not is_symmetric(net, sigma):
        raise PreconditionFailed(f"the network is not symmetric with respect to {sigma}")
    if single_orbit(sigma):
        return net, sigma
    representatives = [o[0] for o in orbits(sigma)]
    q = len(orbits(sigma)[0])
    composites = [parallel(*(net.component(sigma.power(t).node(i)) for i in representatives))
                  for t in range(q)]
    reduced = Network(composites, net.hoisted, tuple(range(1, q + 1)))
    theta = Automorphism({t: t % q + 1 for t in range(1, q + 1)}, sigma.arc_map, sigma.numeral_map())
    logger.info("reduced %d nodes in %d orbits to %d composites", len(net.nodes),
                len(representatives), q)
    return reduced, theta


def _check_preconditions(net: Network, sigma: Automorphism, d: Dialect):
    if d not in (Dialect.PI_ASYNC, Dialect.CCS):
        raise PreconditionFailed(f"the adversary needs dialect pia or ccs, not {d.value}")
    for node in net.nodes:
        if not dialect_check(net.component(node), d):
            raise PreconditionFailed(f"component {node} is not in dialect {d.value}")
    if sigma.is_identity:
        raise PreconditionFailed("the automorphism is the identity")
    try:
        check_automorphism(hypergraph_of(net), sigma)
    except NotAnAutomorphism as err:
        raise PreconditionFailed(str(err)) from err
    if not single_orbit(sigma) and not is_well_balanced(sigma):
        raise PreconditionFailed(f"{sigma} has orbits of different sizes")
    if d is Dialect.CCS and not ccs_applicable(net, sigma):
        raise PreconditionFailed("an arc connects a node with one of its images")
    if not is_symmetric(net, sigma):
        raise PreconditionFailed(f"the network is not symmetric with respect to {sigma}")


# Rounds

@dataclass
class AdversaryState:
    net: Network
    sigma: Automorphism
    trace: Computation
    round: int = 0
    certificates: list = field(default_factory=list)
    initiators: list = field(default_factory=list)
    reduced: bool = False


def _align(net: Network, sigma: Automorphism) -> Network:
    """Make every component the literal sigma-image of the first one."""
    start = min(net.nodes)
    comps = list(net.components)
    for m in range(len(net.nodes)):
        image = sigma.power(m)
        comps[net.index_of(image.node(start))] = apply_renaming(image.renaming(), net.component(start))
    return net.with_components(comps)


def _names(net: Network) -> frozenset:
    return frozenset().union(*(c.fn for c in net.components)) | set(net.hoisted)


def _half_matches(actual, expected, renaming, known, current) -> bool:
    """`known` are the names of the template's network, `current` those of the
    network the image step starts from; a received name outside `known` must
    be new in `current` as well."""
    match expected:
        case TauAct():
            return actual == TAU_ACT
        case FreeOutput(channel, datum):
            return actual == FreeOutput(renaming(channel), renaming(datum))
        case BoundOutput(channel, _):
            return isinstance(actual, BoundOutput) and actual.channel == renaming(channel)
        case InputAct(channel, received):
            if not isinstance(actual, InputAct) or actual.channel != renaming(channel):
                return False
            if received in known:
                return actual.received == renaming(received)
            return actual.received not in current
    return False


def _image_step(net: Network, d: Dialect, power: Automorphism, template):
    """The network step of `net` that is the image of `template` under `power`."""
    renaming = power.renaming()
    known, current = _names(template.source), _names(net)
    wanted = {power.node(m.node): m for m in template.movers}
    fallback = None
    for step in network_transitions(net, d):
        if step.rule != template.rule or {m.node for m in step.movers} != set(wanted):
            continue
        if not all(_half_matches(step.mover(n).action, m.action, renaming, known, current)
                   for n, m in wanted.items()):
            continue
        if all(str(step.mover(n).derivation) == str(m.derivation) for n, m in wanted.items()):
            return step
        fallback = fallback or step
    if fallback is None:
        raise SymmetryBroken(f"no image of {template.describe()} under {power}")
    return fallback


def _new_name(step):
    if step.extruded is not None:
        return step.extruded
    if isinstance(step.label, BoundOutput):
        return step.label.datum
    if isinstance(step.label, InputAct) and step.label.received not in _names(step.source):
        return step.label.received
    return None


def _candidates(net: Network, d: Dialect):
    """Internal steps and every visible step that does not use `o`."""
    steps = network_transitions(net, d)
    usable = [s for s in steps
              if not any(is_announcement(m.action) for m in s.movers)
              and (s.is_internal or s.label.channel != O)]
    if not usable:
        if any(is_announcement(m.action) for s in steps for m in s.movers):
            raise Stuck("only announcements on o are enabled", "announcements-only")
        raise Stuck("no step is enabled", "deadlock")
    return usable


def _pick(steps, order, round_no):
    """Round-robin over the orbit order; the preferred node plays its least
    step by serialized form."""
    rotated = order[round_no % len(order):] + order[:round_no % len(order)]
    for node in rotated:
        mine = [s for s in steps if s.mover(node) is not None]
        if mine:
            return node, min(mine, key=lambda s: s.describe())
    raise Stuck("no step is enabled", "deadlock")


def _close_chain(start: Network, images) -> int:
    """One confluence diamond per node that both sends and receives in a
    communication chain, taken at the component the round started from."""
    sent, received = {}, {}
    for step in images.values():
        for m in step.movers:
            (received if isinstance(m.action, InputAct) else sent)[m.node] = m.action
    closed = 0
    for node in sorted(sent.keys() & received.keys()):
        p = start.component(node)
        steps = transitions(p, Dialect.PI_ASYNC, {received[node].received})
        out_step = next((s for s in steps if _same_output(s.action, sent[node])), None)
        in_step = next((s for s in steps if s.action == received[node]), None)
        if out_step is None or in_step is None:
            raise NoDiamond(f"node {node} cannot offer both {sent[node]} and {received[node]}")
        confluence_diamond(p, out_step, in_step)
        closed += 1
    return closed


def _play_round(state: AdversaryState, d: Dialect, order):
    sigma, net = state.sigma, state.net
    k = len(order)
    initiator, chosen = _pick(_candidates(net, d), order, state.round)
    images = {}
    if len(chosen.movers) == 1:
        schedule = [(m, None) for m in range(k)]
    else:
        partner = next(m.node for m in chosen.movers if m.node != initiator)
        r = orbit(sigma, initiator).index(partner)
        g = math.gcd(r, k)
        p = k // g
        # one chain per cycle of sigma^r
        schedule = [((r * t + start) % k, None) for start in range(g) for t in range(p)]
    for m, _ in schedule:
        power = sigma.power(m)
        step = chosen if m == 0 else _image_step(net, d, power, chosen)
        state.trace = state.trace.append(step)
        net = step.post
        images[m] = step
    diamonds = 0
    # confluence needs asynchronous outputs
    if len(chosen.movers) > 1 and d is Dialect.PI_ASYNC:
        diamonds = _close_chain(state.net, images)
    fresh = {m: _new_name(step) for m, step in images.items()}
    if all(name is not None for name in fresh.values()):
        sigma = sigma.extended({fresh[m]: fresh[(m + 1) % k] for m in range(k)})
    if any(is_announcement(mover.action) for step in images.values() for mover in step.movers):
        raise SymmetryBroken("an announcement on o was scheduled")
    if not is_symmetric(net, sigma):
        raise SymmetryBroken(f"round {state.round + 1} ends asymmetric under {sigma}")
    state.net, state.sigma = net, sigma
    state.round += 1
    state.initiators.append(initiator)
    state.certificates.append({"round": state.round, "initiator": initiator,
                               "sigma": sigma.to_json(), "diamonds": diamonds, "check": "ok"})
    logger.info("round %d: node %s initiated %s", state.round, initiator, chosen.describe())


def run_adversary(net: Network, sigma: Automorphism, rounds: int, d: Dialect = Dialect.PI_ASYNC,
                  on_round=None) -> AdversaryState:
    """Play `rounds` symmetric rounds on `net`.

    Raises Stuck when no schedulable step remains; the state reached so far is
    attached to the exception as `state`.
    """
    _check_preconditions(net, sigma, d)
    reduced = False
    if not single_orbit(sigma):
        net, sigma = reduce_well_balanced(net, sigma)
        reduced = True
    net = _align(net, sigma)
    order = orbit(sigma, min(net.nodes))
    state = AdversaryState(net, sigma, Computation(net), reduced=reduced)
    try:
        for _ in range(rounds):
            _play_round(state, d, order)
            if on_round is not None:
                on_round(state)
    except Stuck as stuck:
        stuck.state = state
        logger.info("adversary stuck after %d rounds: %s", state.round, stuck.reason)
        raise
    return state
