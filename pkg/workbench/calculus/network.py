"""Networks of processes, their computations and their symmetries.

A network is the top-level parallel composition P_1 | ... | P_k. Each
component is a node of the communication hypergraph and is known by its
identifier numeral; the arcs are the free names shared by components, except
the external channel `o` and the constants (numerals and the CCS datum).
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field, replace

import networkx as nx

from .errors import BoundExceeded, DialectError, NotAnAutomorphism, WorkbenchError
from .lts import (
    CCS_DATUM, TAU_ACT, BoundOutput, Derivation, Dialect, FreeOutput,
    dialect_check, is_output, moves,
)
from .syntax import (
    FRESH, O, Name, Process, Renaming, Restriction, alpha_equiv, apply_renaming,
    discard_inert, name, normal_form, numeral, parallel, parse_components, pretty, rename,
    struct_congruent,
)

logger = logging.getLogger(__name__)

DEFAULT_AUTOMORPHISM_BOUND = 8


@dataclass(frozen=True)
class Network:
    components: tuple
    hoisted: tuple = ()
    identifiers: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "hoisted", tuple(self.hoisted))
        if not self.components:
            raise WorkbenchError("a network needs at least one component")
        if self.identifiers is None:
            object.__setattr__(self, "identifiers", tuple(range(1, len(self.components) + 1)))
        else:
            object.__setattr__(self, "identifiers", tuple(int(i) for i in self.identifiers))
        if len(self.identifiers) != len(self.components):
            raise WorkbenchError("one identifier per component is required")
        if len(set(self.identifiers)) != len(self.identifiers):
            raise WorkbenchError(f"duplicate node identifiers {list(self.identifiers)}")
        if len(set(self.hoisted)) != len(self.hoisted):
            raise WorkbenchError("hoisted names must be pairwise distinct")

    @classmethod
    def from_text(cls, text: str) -> Network:
        """Build a network from `[id:] P || [id:] P || ...`."""
        parsed = parse_components(text)
        labels = [ident for ident, _ in parsed]
        if all(label is None for label in labels):
            identifiers = None
        elif all(label is not None for label in labels):
            identifiers = [int(label.token) for label in labels]
        else:
            raise WorkbenchError("either every component carries an identifier or none does")
        return cls([p for _, p in parsed], identifiers=identifiers)

    @property
    def nodes(self) -> tuple:
        return self.identifiers

    def index_of(self, node: int) -> int:
        return self.identifiers.index(node)

    def component(self, node: int) -> Process:
        return self.components[self.index_of(node)]

    def with_components(self, components, hoisted=None) -> Network:
        return replace(self, components=tuple(components),
                       hoisted=self.hoisted if hoisted is None else tuple(hoisted))

    @property
    def fn(self) -> frozenset:
        return frozenset().union(*(c.fn for c in self.components)) - set(self.hoisted)

    def as_process(self) -> Process:
        """The flat term new h1...new hn.(P_1 | ... | P_k)."""
        result = parallel(*self.components)
        for h in reversed(self.hoisted):
            result = Restriction(h, result)
        return result

    def to_text(self) -> str:
        return " || ".join(f"{i}: {pretty(c)}" for i, c in zip(self.identifiers, self.components))

    def __str__(self):
        text = self.to_text()
        if self.hoisted:
            text = f"new {' '.join(map(str, self.hoisted))} in {text}"
        return text


def _creation_order(n: Name):
    stem, _, counter = n.token.partition("~")
    return (int(counter) if counter else 0, stem)


def canonical_state(net: Network) -> str:
    """Serialization of `net` that is stable under alpha and structural congruence
    of each component, in component order. Inert `0` components and unused
    restrictions are discarded first, so states that differ only in garbage share
    a key. Hoisted and fresh free names are replaced by marks so the text does
    not depend on the fresh-name counter."""
    components = [discard_inert(c) for c in net.components]
    marks = {}
    for comp in components:
        for n in sorted(comp.fn & set(net.hoisted), key=_creation_order):
            marks.setdefault(n, name(f"%h{len(marks)}"))
    fresh = sorted({n for c in components for n in c.fn
                    if n.origin == "fresh" and n not in marks}, key=_creation_order)
    marks.update({n: name(f"%f{i}") for i, n in enumerate(fresh)})
    parts = [f"{i}: {pretty(normal_form(rename(c, marks)))}"
             for i, c in zip(net.identifiers, components)]
    return f"[{len(marks)}] " + " || ".join(parts)


def network_key(net: Network) -> str:
    return hashlib.sha256(canonical_state(net).encode("utf-8")).hexdigest()


# Steps and computations

@dataclass(frozen=True)
class Mover:
    node: int
    action: object
    derivation: Derivation


@dataclass(frozen=True)
class NetworkStep:
    """One step of a network. `movers` holds one entry for a Par step and
    the two complementary halves for Com/Close."""
    label: object
    movers: tuple
    rule: str
    source: Network = field(repr=False)
    post: Network = field(repr=False)
    extruded: Name | None = None

    @property
    def is_internal(self) -> bool:
        return self.label == TAU_ACT

    def mover(self, node: int) -> Mover | None:
        for m in self.movers:
            if m.node == node:
                return m
        return None

    def describe(self) -> str:
        halves = ", ".join(f"{m.node}:{m.action}" for m in self.movers)
        return f"{self.label} [{self.rule} {halves}]"


def _sort_key(step: NetworkStep):
    return (str(step.label), tuple(m.node for m in step.movers),
            tuple(str(m.action) for m in step.movers),
            tuple(str(m.derivation) for m in step.movers))


def network_transitions(net: Network, d: Dialect = Dialect.PI, closed=False) -> list:
    """All steps of `net` in a deterministic order.

    Nobody inputs on `o` and `o` never synchronizes; visible actions on hoisted
    names are not reported; Close hoists the extruded name to the top. A `closed`
    network only talks to the outside world through announcements on `o`.
    """
    for node, comp in zip(net.identifiers, net.components):
        if not dialect_check(comp, d):
            raise DialectError(f"component {node} is not in dialect {d.value}: {comp}")
    hoisted = set(net.hoisted)
    per_node = [moves(comp) for comp in net.components]
    universe = sorted((frozenset().union(*(c.fn for c in net.components)) - hoisted))
    fresh_input = FRESH.next("w")
    result = []

    def updated(changes, extra_hoisted=()):
        comps = list(net.components)
        for index, target in changes.items():
            comps[index] = target
        return net.with_components(comps, net.hoisted + tuple(extra_hoisted))

    for index, (steps, receptions) in enumerate(per_node):
        node = net.identifiers[index]
        for step in steps:
            action = step.action
            if action == TAU_ACT:
                result.append(NetworkStep(action, (Mover(node, action, step.derivation),), "par",
                                          net, updated({index: step.target})))
                continue
            if action.channel in hoisted or (closed and action.channel != O):
                continue
            label, post = action, updated({index: step.target})
            if isinstance(action, FreeOutput) and action.datum in hoisted:
                label = BoundOutput(action.channel, action.datum)
                post = replace(post, hoisted=tuple(h for h in post.hoisted if h != action.datum))
            result.append(NetworkStep(label, (Mover(node, action, step.derivation),), "par",
                                      net, post))
        if closed:
            continue
        for reception in receptions:
            if reception.channel == O or reception.channel in hoisted:
                continue
            for z in universe + [fresh_input]:
                step = reception.instantiate(z)
                result.append(NetworkStep(step.action, (Mover(node, step.action, step.derivation),),
                                          "par", net, updated({index: step.target})))

    for i, (_, receptions) in enumerate(per_node):
        for j, (steps, _) in enumerate(per_node):
            if i == j:
                continue
            for reception in receptions:
                if reception.channel == O:
                    continue
                for step in steps:
                    if not is_output(step.action) or step.action.channel != reception.channel:
                        continue
                    datum = step.action.datum
                    received = reception.instantiate(datum)
                    halves = sorted([Mover(net.identifiers[i], received.action, received.derivation),
                                     Mover(net.identifiers[j], step.action, step.derivation)],
                                    key=lambda m: net.index_of(m.node))
                    changes = {i: received.target, j: step.target}
                    if isinstance(step.action, BoundOutput):
                        result.append(NetworkStep(TAU_ACT, tuple(halves), "close", net,
                                                  updated(changes, (datum,)), extruded=datum))
                    else:
                        result.append(NetworkStep(TAU_ACT, tuple(halves), "com", net,
                                                  updated(changes)))
    result.sort(key=_sort_key)
    return result


@dataclass(frozen=True)
class Computation:
    start: Network
    steps: tuple = ()

    @property
    def post(self) -> Network:
        return self.steps[-1].post if self.steps else self.start

    def append(self, step: NetworkStep) -> Computation:
        if step.source != self.post:
            raise WorkbenchError("step does not start where the computation ends")
        return Computation(self.start, self.steps + (step,))

    def extends(self, other: Computation) -> bool:
        """True iff `self` is a prefix of `other`."""
        return (self.start == other.start and len(self.steps) <= len(other.steps)
                and other.steps[:len(self.steps)] == self.steps)

    @property
    def labels(self) -> list:
        return [step.label for step in self.steps]

    def __len__(self):
        return len(self.steps)


def project(c: Computation, node: int) -> list:
    """Contribution of `node` to `c`: (tag, action or None, component after)."""
    segments = []
    for step in c.steps:
        mover = step.mover(node)
        after = step.post.component(node)
        if mover is None:
            segments.append(("idle", None, after))
        else:
            segments.append((step.rule, mover.action, after))
    return segments


# Hypergraph

def is_constant(n: Name) -> bool:
    return n == O or n.is_numeral or n == CCS_DATUM


@dataclass(frozen=True)
class Hypergraph:
    nodes: tuple
    arcs: tuple
    type_of: dict = field(compare=False)

    def incidence_graph(self) -> nx.Graph:
        graph = nx.Graph()
        for n in self.nodes:
            graph.add_node(("node", n), kind="node")
        for x in self.arcs:
            graph.add_node(("arc", x), kind="arc")
            for n in self.type_of[x]:
                graph.add_edge(("arc", x), ("node", n))
        return graph

    def is_connected(self) -> bool:
        graph = self.incidence_graph()
        return graph.number_of_nodes() > 0 and nx.is_connected(graph)


def hypergraph_of(net: Network) -> Hypergraph:
    type_of = {}
    for node, comp in zip(net.identifiers, net.components):
        for x in comp.fn:
            if not is_constant(x):
                type_of.setdefault(x, set()).add(node)
    arcs = tuple(sorted(type_of))
    return Hypergraph(tuple(net.identifiers), arcs, {x: frozenset(type_of[x]) for x in arcs})


# Automorphisms

@dataclass(frozen=True)
class Automorphism:
    """A pair of permutations on nodes and arcs.

    `arc_map` may also carry the associations added for extruded names.
    Identifier numerals follow the node map, unless `data_map` gives them
    explicitly (composite networks, whose nodes are not the numerals their
    components announce).
    """
    node_map: tuple
    arc_map: tuple = ()
    data_map: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "node_map", tuple(sorted(dict(self.node_map).items())))
        pairs = {x: y for x, y in dict(self.arc_map).items() if x != y}
        object.__setattr__(self, "arc_map", tuple(sorted(pairs.items())))
        object.__setattr__(self, "data_map", tuple(sorted(dict(self.data_map).items())))

    def numeral_map(self) -> dict:
        if self.data_map:
            return dict(self.data_map)
        return {numeral(k): numeral(v) for k, v in self.node_map}

    @classmethod
    def identity(cls, nodes) -> Automorphism:
        return cls({n: n for n in nodes})

    @property
    def nodes(self):
        return tuple(n for n, _ in self.node_map)

    def node(self, n: int) -> int:
        return dict(self.node_map)[n]

    def arc(self, x: Name) -> Name:
        return dict(self.arc_map).get(x, x)

    def compose(self, other: Automorphism) -> Automorphism:
        """self after other."""
        arcs = {x for x, _ in self.arc_map} | {x for x, _ in other.arc_map}
        data = ()
        if self.data_map or other.data_map:
            mine, theirs = self.numeral_map(), other.numeral_map()
            data = {k: mine.get(theirs.get(k, k), theirs.get(k, k)) for k in set(mine) | set(theirs)}
        return Automorphism({n: self.node(other.node(n)) for n in other.nodes},
                            {x: self.arc(other.arc(x)) for x in arcs}, data)

    def inverse(self) -> Automorphism:
        return Automorphism({v: k for k, v in self.node_map}, {v: k for k, v in self.arc_map},
                            {v: k for k, v in self.data_map})

    def power(self, m: int) -> Automorphism:
        base = self if m >= 0 else self.inverse()
        result = Automorphism.identity(self.nodes)
        for _ in range(abs(m)):
            result = base.compose(result)
        return result

    @property
    def is_identity(self) -> bool:
        return (all(k == v for k, v in self.node_map) and not self.arc_map
                and all(k == v for k, v in self.data_map))

    def extended(self, pairs) -> Automorphism:
        return replace(self, arc_map={**dict(self.arc_map), **dict(pairs)})

    def renaming(self) -> Renaming:
        """Arcs by the arc map and identifier numerals by the node map."""
        mapping = self.numeral_map()
        mapping.update(dict(self.arc_map))
        return Renaming(mapping)

    def to_json(self) -> dict:
        data = {"nodes": {str(k): v for k, v in self.node_map},
                "arcs": {str(k): str(v) for k, v in self.arc_map}}
        if self.data_map:
            data["data"] = {str(k): str(v) for k, v in self.data_map}
        return data

    @classmethod
    def from_json(cls, data) -> Automorphism:
        return cls({int(k): int(v) for k, v in data["nodes"].items()},
                   {name(k): name(v) for k, v in data.get("arcs", {}).items()},
                   {name(k): name(v) for k, v in data.get("data", {}).items()})

    def __str__(self):
        cycles = " ".join(f"({' '.join(map(str, o))})" for o in orbits(self) if len(o) > 1)
        arcs = ", ".join(f"{k}->{v}" for k, v in self.arc_map)
        return f"{cycles or 'id'}" + (f" [{arcs}]" if arcs else "")


def check_automorphism(h: Hypergraph, sigma: Automorphism):
    """Raise NotAnAutomorphism unless `sigma` preserves the arc types of `h`."""
    if set(sigma.nodes) != set(h.nodes) or sorted(sigma.node(n) for n in h.nodes) != sorted(h.nodes):
        raise NotAnAutomorphism(f"{sigma} is not a permutation of nodes {list(h.nodes)}")
    images = [sigma.arc(x) for x in h.arcs]
    if sorted(images) != sorted(h.arcs):
        raise NotAnAutomorphism(f"{sigma} is not a permutation of arcs")
    for x in h.arcs:
        if frozenset(sigma.node(n) for n in h.type_of[x]) != h.type_of[sigma.arc(x)]:
            raise NotAnAutomorphism(f"{sigma} does not preserve the type of arc {x}")


def automorphisms(h: Hypergraph, bound: int = DEFAULT_AUTOMORPHISM_BOUND) -> list:
    """Every type-preserving node/arc permutation pair, identity first."""
    if len(h.nodes) > bound:
        raise BoundExceeded(f"{len(h.nodes)} nodes exceed the automorphism bound {bound}")
    graph = h.incidence_graph()
    found = []
    for mapping in nx.vf2pp_all_isomorphisms(graph, graph, node_label="kind"):
        node_map = {src[1]: dst[1] for src, dst in mapping.items() if src[0] == "node"}
        arc_map = {src[1]: dst[1] for src, dst in mapping.items() if src[0] == "arc"}
        found.append(Automorphism(node_map, arc_map))
    found.sort(key=lambda s: (not s.is_identity, s.node_map, tuple((str(a), str(b)) for a, b in s.arc_map)))
    logger.debug("%d automorphisms on %d nodes", len(found), len(h.nodes))
    return found


def parse_cycles(text: str) -> dict:
    """Node permutation from cycle notation, e.g. `(0 1)(2 3)`."""
    mapping = {}
    for chunk in text.replace(")", "").split("("):
        cycle = [int(tok) for tok in chunk.replace(",", " ").split()]
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            if a in mapping:
                raise WorkbenchError(f"node {a} appears twice in {text!r}")
            mapping[a] = b
    return mapping


def automorphism_for(h: Hypergraph, node_map: dict, bound=DEFAULT_AUTOMORPHISM_BOUND) -> Automorphism:
    """The first automorphism of `h` acting on nodes as `node_map`."""
    wanted = {n: node_map.get(n, n) for n in h.nodes}
    for sigma in automorphisms(h, bound):
        if dict(sigma.node_map) == wanted:
            return sigma
    raise NotAnAutomorphism(f"no automorphism of the hypergraph moves nodes as {wanted}")


# Orbits

def orbit(sigma: Automorphism, n: int) -> list:
    result = [n]
    current = sigma.node(n)
    while current != n:
        result.append(current)
        current = sigma.node(current)
    return result


def orbits(sigma: Automorphism) -> list:
    """The partition of the nodes into orbits, each starting at its least node."""
    seen, result = set(), []
    for n in sorted(sigma.nodes):
        if n not in seen:
            o = orbit(sigma, n)
            seen.update(o)
            result.append(o)
    return result


def single_orbit(sigma: Automorphism) -> bool:
    return len(orbits(sigma)) == 1


def is_well_balanced(sigma: Automorphism) -> bool:
    return len({len(o) for o in orbits(sigma)}) == 1


def is_symmetric(net: Network, sigma: Automorphism) -> bool:
    """P_sigma(i) equals sigma(P_i) for every node i.

    Equality is alpha-equivalence, loosened to structural congruence: generated
    components order their parallel parts by node identifier, and renaming the
    identifiers permutes those parts without changing the term up to congruence.
    """
    check_automorphism(hypergraph_of(net), sigma)
    renaming = sigma.renaming()
    for node in net.nodes:
        image = apply_renaming(renaming, net.component(node))
        target = net.component(sigma.node(node))
        if not (alpha_equiv(image, target) or struct_congruent(image, target)):
            logger.debug("asymmetry at node %s: %s vs %s", node, image, target)
            return False
    return True


def symmetries(net: Network, bound: int = DEFAULT_AUTOMORPHISM_BOUND) -> list:
    """The automorphisms of the hypergraph under which `net` is symmetric."""
    return [s for s in automorphisms(hypergraph_of(net), bound) if is_symmetric(net, s)]


def symmetry_for(net: Network, node_map: dict, bound=DEFAULT_AUTOMORPHISM_BOUND) -> Automorphism:
    """An automorphism moving nodes as `node_map` under which `net` is symmetric.

    Arcs of equal type can be permuted in several ways for the same node map;
    only the arc map matching the components makes the network symmetric.
    """
    wanted = {n: node_map.get(n, n) for n in net.nodes}
    for sigma in symmetries(net, bound):
        if dict(sigma.node_map) == wanted:
            return sigma
    raise NotAnAutomorphism(f"the network is not symmetric under any automorphism moving nodes as {wanted}")
