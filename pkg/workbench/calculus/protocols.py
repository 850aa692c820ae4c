"""Canned networks and generators.

`election_network` builds, for a connected hypergraph on k nodes, a symmetric
network that elects a leader using mixed choice. Node i owns a private name
x_i and knows k:

1. it broadcasts the record (i, x_i) and collects the records of all the
   others. Records travel over a spanning tree that the nodes grow by merging
   over the arcs: on every arc slot it holds a node offers both to send a
   session name (and absorb the receiver) and to receive one (and be
   absorbed); the absorbed node hands its arc slots and records to the
   absorber. The node holding all the arc slots holds all k records and sends
   the full list down the tree, and every node forwards it to the nodes it
   absorbed;
2. it repeats, at most k - 1 times, a choice with one output guard on x_i and
   one input guard on every collected name. Whoever takes an input goes to 4
   after reporting how many nodes it had already beaten, and the winner adds
   them to its own count;
3. a node whose count reaches k - 1 is the leader: it announces itself on `o`
   and sends its identifier to the nodes it beat;
4. a beaten node waits for the name of the leader, announces it on `o` and
   forwards it to the nodes it beat.

The generated terms grow quickly with the total number of arc slots; small
hypergraphs only.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass

import networkx as nx

from .adversary import ccs_applicable
from .errors import DisconnectedSpec, ParseError, PreconditionFailed, WorkbenchError
from .lts import CCS_DATUM
from .network import Automorphism, Network, check_automorphism, hypergraph_of
from .syntax import (
    NIL, O, Input, Output, OutputAtom, Parallel, Replication, Restriction, Sum, name,
    numeral, parallel, prefixed,
)

logger = logging.getLogger(__name__)

_RESERVED_PREFIX = "v_"


@dataclass(frozen=True)
class HypergraphSpec:
    nodes: tuple
    arcs: tuple

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(int(n) for n in self.nodes))
        object.__setattr__(self, "arcs", tuple((name(str(x)), frozenset(int(n) for n in kind))
                                               for x, kind in self.arcs))
        for x, kind in self.arcs:
            if x.token.startswith(_RESERVED_PREFIX):
                raise WorkbenchError(f"arc names may not start with {_RESERVED_PREFIX!r}: {x}")
            if not kind <= set(self.nodes):
                raise WorkbenchError(f"arc {x} touches unknown nodes {sorted(kind - set(self.nodes))}")

    @property
    def k(self) -> int:
        return len(self.nodes)

    def arcs_of(self, node: int) -> list:
        return [x for x, kind in self.arcs if node in kind]

    @property
    def slots(self) -> int:
        return sum(len(kind) for _, kind in self.arcs)

    @classmethod
    def from_text(cls, text: str) -> HypergraphSpec:
        """Parse `nodes 1 2 3` and one `arc: node node ...` line per arc."""
        nodes, arcs = None, []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                if line.startswith("nodes"):
                    nodes = [int(tok) for tok in line[len("nodes"):].split()]
                else:
                    arc, _, members = line.partition(":")
                    if not _ or not arc.strip():
                        raise ValueError(f"expected 'arc: nodes', found {line!r}")
                    arcs.append((arc.strip(), [int(tok) for tok in members.split()]))
            except ValueError as err:
                raise ParseError(str(err), lineno, 1) from err
        if nodes is None:
            nodes = sorted({n for _, kind in arcs for n in kind})
        return cls(tuple(nodes), tuple(arcs))

    def to_text(self) -> str:
        lines = ["nodes " + " ".join(map(str, self.nodes))]
        lines += [f"{x}: {' '.join(map(str, sorted(kind)))}" for x, kind in self.arcs]
        return "\n".join(lines) + "\n"


def connected(spec: HypergraphSpec) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(("node", n) for n in spec.nodes)
    for x, kind in spec.arcs:
        graph.add_edges_from((("arc", x), ("node", n)) for n in kind)
    return spec.k >= 1 and nx.is_connected(graph)


# The two-node election

def two_node_election() -> Network:
    return Network.from_text(
        "0: x_0!(y).o!0 + x_1?(y).o!1 || "
        "1: x_1!(y).o!1 + x_0?(y).o!0"
    )


def split_choice(net: Network) -> Network:
    """Replace every mixed sum by its output part in parallel with its input part."""
    return net.with_components([_split(c) for c in net.components])


def _split(p):
    match p:
        case Sum(branches):
            branches = tuple((prefix, _split(cont)) for prefix, cont in branches)
            inputs = tuple(b for b in branches if isinstance(b[0], Input))
            others = tuple(b for b in branches if not isinstance(b[0], Input))
            if inputs and others:
                return Parallel(Sum(others), Sum(inputs))
            return Sum(branches)
        case Restriction(bound, body):
            return Restriction(bound, _split(body))
        case Parallel(left, right):
            return Parallel(_split(left), _split(right))
        case Replication(body):
            return Replication(_split(body))
    return p


# The election protocol for connected hypergraphs

class _Binders:
    """Binder names for generated code; equal structure gets equal names."""

    def __init__(self):
        self._counter = itertools.count(1)

    def __call__(self, stem):
        return name(f"{_RESERVED_PREFIX}{stem}{next(self._counter)}")


def _restrict(binders, body):
    for b in reversed(binders):
        body = Restriction(b, body)
    return body


def _send_all(channel, names, cont=NIL):
    for n in reversed(names):
        cont = prefixed(Output(channel, n), cont)
    return cont


def _receive_all(channel, binders, cont):
    for b in reversed(binders):
        cont = prefixed(Input(channel, b), cont)
    return cont


class _NodeCode:
    """Code of one node of `election_network`.

    Records are (numeral, name) pairs and always travel as two outputs on a
    session. Merge sessions carry slots, then records, each batch closed by
    an output on the session's end channel; the list coming back down carries
    exactly k records. Election sessions carry the end channel chosen by the
    beaten node, one token on it per node it had beaten, then an output on the
    session itself to close the count.
    """

    def __init__(self, ident: int, arcs: list, spec: HypergraphSpec):
        self.me = numeral(ident)
        self.arcs = arcs
        self.slots = spec.slots
        self.k = spec.k
        self.fresh = _Binders()

    def build(self):
        self.x = x = self.fresh("x")
        records = [(self.me, x)]
        if len(self.arcs) <= 1:
            return Restriction(x, self.merge(list(self.arcs), records, []))
        hub = self.fresh("h")
        loaded = [self.fresh("b") for _ in self.arcs]
        body = self.merge(loaded, records, [])
        for b in reversed(loaded):
            body = prefixed(Input(hub, b), body)
        return Restriction(x, Restriction(hub, parallel(*(OutputAtom(hub, a) for a in self.arcs),
                                                        body)))

    # step 1: merges over the arcs, then the record list down the tree

    def merge(self, held, records, absorbed):
        if len(held) >= self.slots:
            return self.spread(records, absorbed)
        sessions, branches = [], []
        for h in held:
            s, f = self.fresh("s"), self.fresh("f")
            sessions.append(s)
            branches.append((Output(h, s),
                             Restriction(f, prefixed(Output(s, f),
                                                     self.take_slots(held, records,
                                                                     absorbed + [s], s, f, 0)))))
        branches.extend(self.join(h, held, records, absorbed) for h in held)
        return _restrict(sessions, Sum(tuple(branches)))

    def take_slots(self, held, records, absorbed, s, f, got):
        options = []
        if len(held) < self.slots:
            y = self.fresh("y")
            options.append((Input(s, y),
                            self.take_slots(held + [y], records, absorbed, s, f, got + 1)))
        if got:
            options.append((Input(f, self.fresh("z")),
                            self.take_records(held, records, absorbed, s, f, 0)))
        return Sum(tuple(options))

    def take_records(self, held, records, absorbed, s, f, got):
        options = []
        if len(records) < self.k:
            tag, y = self.fresh("t"), self.fresh("y")
            more = self.take_records(held, records + [(tag, y)], absorbed, s, f, got + 1)
            options.append((Input(s, tag), prefixed(Input(s, y), more)))
        if got:
            options.append((Input(f, self.fresh("z")), self.merge(held, records, absorbed)))
        return Sum(tuple(options))

    def join(self, h, held, records, absorbed):
        s, f = self.fresh("s"), self.fresh("f")
        received = [(self.fresh("t"), self.fresh("y")) for _ in range(self.k)]
        cont = self.spread(received, absorbed)
        cont = _receive_all(s, [n for record in received for n in record], cont)
        cont = prefixed(Output(f, f), cont)
        cont = _send_all(s, [n for record in records for n in record], cont)
        cont = prefixed(Output(f, f), cont)
        cont = _send_all(s, held, cont)
        return Input(h, s), prefixed(Input(s, f), cont)

    def spread(self, records, absorbed):
        flat = [n for record in records for n in record]
        return parallel(*(_send_all(t, flat) for t in absorbed),
                        self.compete([y for _, y in records], 0, []))

    # steps 2 to 4: the election proper

    def compete(self, names, count, beaten):
        if count >= self.k - 1:
            return parallel(OutputAtom(O, self.me), *(OutputAtom(t, self.me) for t in beaten))
        s = self.fresh("s")
        win = (Output(self.x, s), self.take_count(names, count + 1, beaten + [s], s))
        losses = [self.concede(y, count, beaten) for y in names]
        return Restriction(s, Sum((win, *losses)))

    def take_count(self, names, count, beaten, s):
        e = self.fresh("e")
        return prefixed(Input(s, e), self.add_up(names, count, beaten, s, e))

    def add_up(self, names, count, beaten, s, e):
        options = []
        if count < self.k - 1:
            options.append((Input(e, self.fresh("u")),
                            self.add_up(names, count + 1, beaten, s, e)))
        options.append((Input(s, self.fresh("z")), self.compete(names, count, beaten)))
        return Sum(tuple(options))

    def concede(self, y, count, beaten):
        s, e, leader = self.fresh("s"), self.fresh("e"), self.fresh("l")
        cont = prefixed(Input(s, leader),
                        parallel(OutputAtom(O, leader), *(OutputAtom(t, leader) for t in beaten)))
        cont = prefixed(Output(s, s), cont)
        cont = _send_all(e, [e] * count, cont)
        return Input(y, s), Restriction(e, prefixed(Output(s, e), cont))


def election_network(spec: HypergraphSpec) -> Network:
    if spec.k < 1:
        raise WorkbenchError("the hypergraph has no nodes")
    if not connected(spec):
        raise DisconnectedSpec(f"the hypergraph on nodes {list(spec.nodes)} is not connected")
    components = [_NodeCode(n, spec.arcs_of(n), spec).build() for n in spec.nodes]
    logger.info("election network on %d nodes, %d arc slots", spec.k, spec.slots)
    return Network(components, identifiers=spec.nodes)


# Rings

def _rotation(net: Network, shift: int, channel) -> Automorphism:
    k = len(net.nodes)
    sigma = Automorphism({n: (n + shift) % k for n in range(k)},
                         {channel(n): channel((n + shift) % k) for n in range(k)})
    check_automorphism(hypergraph_of(net), sigma)
    return sigma


def ccs_ring(k: int, shift: int):
    """A CCS ring whose node n offers both to send on c_n and to receive on
    c_(n-1), with the rotation by `shift`."""
    if k < 2:
        raise WorkbenchError("a ring needs at least two nodes")
    if shift % k == 0:
        raise PreconditionFailed("the rotation by a multiple of k is the identity")
    channel = lambda n: name(f"c_{n}")  # noqa: E731
    components = []
    for n in range(k):
        send = (Output(channel(n), CCS_DATUM), NIL)
        receive = (Input(channel((n - 1) % k), name("u")), NIL)
        components.append(Replication(Sum((send, receive))))
    net = Network(components, identifiers=range(k))
    sigma = _rotation(net, shift, channel)
    if not ccs_applicable(net, sigma):
        raise PreconditionFailed(f"ring({k}) with shift {shift}: an arc joins a node to its image")
    return net, sigma


def async_ring(k: int) -> Network:
    """Asynchronous ring where every node forwards forever: c_n!a | !c_(n-1)?(y).c_n!y."""
    if k < 2:
        raise WorkbenchError("a ring needs at least two nodes")
    a = name("a")
    components = []
    for n in range(k):
        out, inp, y = name(f"c_{n}"), name(f"c_{(n - 1) % k}"), name("y")
        components.append(Parallel(OutputAtom(out, a),
                                   Replication(prefixed(Input(inp, y), OutputAtom(out, y)))))
    return Network(components, identifiers=range(k))


def async_extrusion_pair() -> Network:
    """Two nodes that extrude a fresh name to each other in every round."""
    return Network.from_text(
        "0: new y.x_0!y | !x_1?(z).(z!a | new y.x_0!y) || "
        "1: new y.x_1!y | !x_0?(z).(z!a | new y.x_1!y)"
    )
