"""Encodings between dialects: uniformity audit and the observables on `o`."""
from __future__ import annotations

import logging
import shlex
import subprocess
from dataclasses import dataclass, field

from .adversary import run_adversary
from .corpus import random_pairs, random_renamings
from .electoral import Electoral, ExploreBounds, is_announcement, is_electoral
from .errors import EncodingDialectError, NonUniformEncoding, Stuck, WorkbenchError
from .lts import Dialect, dialect_check
from .network import Network, is_symmetric, network_key, network_transitions, symmetry_for
from .protocols import two_node_election
from .syntax import (
    FRESH, NIL, Input, Output, OutputAtom, Parallel, Replication, Restriction, Sum, Tau,
    alpha_equiv, parse, prefixed, rename,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Encoding:
    name: str
    transform: object
    target_dialect: Dialect

    def __call__(self, p):
        image = self.transform(p)
        if not dialect_check(image, self.target_dialect):
            raise EncodingDialectError(
                f"encoding {self.name} left dialect {self.target_dialect.value}: {image}")
        return image


# Built-in transforms

def _homomorphic(p, leaf, par=Parallel):
    """Rebuild `p` bottom-up with `leaf` for sums and `par` for parallel composition."""
    match p:
        case Parallel(left, right):
            return par(_homomorphic(left, leaf, par), _homomorphic(right, leaf, par))
        case Restriction(bound, body):
            return Restriction(bound, _homomorphic(body, leaf, par))
        case Replication(body):
            return Replication(_homomorphic(body, leaf, par))
        case OutputAtom():
            return p
        case Sum():
            return leaf(p, lambda q: _homomorphic(q, leaf, par))
    raise TypeError(f"Unexpected term: {p!r}")


def identity(p):
    return p


def drop_continuations(p):
    """Output prefixes become atoms beside their continuation; sums become parallel."""

    def leaf(s, again):
        parts = []
        for prefix, cont in s.branches:
            match prefix:
                case Input(channel, formal):
                    parts.append(prefixed(Input(channel, formal), again(cont)))
                case Output(channel, datum):
                    parts.append(Parallel(OutputAtom(channel, datum), again(cont)))
                case Tau():
                    parts.append(again(cont))
        if not parts:
            return NIL
        result = parts[-1]
        for part in reversed(parts[:-1]):
            result = Parallel(part, result)
        return result

    return _homomorphic(p, leaf)


def monitor(p):
    """e(P | Q) = new m.(e(P) | m?(z).0 | e(Q))."""

    def leaf(s, again):
        return Sum(tuple((prefix, again(cont)) for prefix, cont in s.branches))

    def par(left, right):
        m = FRESH.next("m")
        return Restriction(m, Parallel(left, Parallel(prefixed(Input(m, FRESH.next("z"))), right)))

    return _homomorphic(p, leaf, par)


def constant(p):
    return NIL


class ExternalEncoding:
    """Runs `command` with the term text on stdin and parses its stdout."""

    def __init__(self, command: str, timeout: float = 30):
        self.args = shlex.split(command)
        self.timeout = timeout

    def __call__(self, p):
        try:
            completed = subprocess.run(self.args, input=str(p), capture_output=True, text=True,
                                       timeout=self.timeout, check=True)
        except (OSError, subprocess.SubprocessError) as err:
            raise WorkbenchError(f"external encoding {self.args[0]!r} failed: {err}") from err
        return parse(completed.stdout)


BUILTINS = {
    "identity": Encoding("identity", identity, Dialect.PI),
    "drop-continuations": Encoding("drop-continuations", drop_continuations, Dialect.PI_ASYNC),
    "monitor": Encoding("monitor", monitor, Dialect.PI),
    "constant": Encoding("constant", constant, Dialect.PI_ASYNC),
}


def get_encoding(spec: str, target: Dialect = Dialect.PI_ASYNC) -> Encoding:
    """A built-in by name, or `cmd:<command line>` for an external transform."""
    if spec.startswith("cmd:"):
        return Encoding(spec, ExternalEncoding(spec[4:]), target)
    try:
        return BUILTINS[spec]
    except KeyError:
        raise WorkbenchError(f"unknown encoding {spec!r}; choose from {sorted(BUILTINS)} "
                             "or cmd:<command>") from None


# Uniformity

@dataclass
class UniformityReport:
    encoding: str
    corpus_size: int
    renamings: int
    parallel_homomorphic: bool = True
    parallel_counterexample: tuple | None = None
    renaming_equivariant: bool = True
    renaming_counterexample: tuple | None = None

    @property
    def uniform(self) -> bool:
        return self.parallel_homomorphic and self.renaming_equivariant

    def to_json(self):
        data = {"encoding": self.encoding, "uniform": self.uniform,
                "corpus_size": self.corpus_size, "renamings": self.renamings,
                "parallel_homomorphic": self.parallel_homomorphic,
                "renaming_equivariant": self.renaming_equivariant}
        if self.parallel_counterexample:
            data["parallel_counterexample"] = [str(t) for t in self.parallel_counterexample]
        if self.renaming_counterexample:
            sigma, p = self.renaming_counterexample
            data["renaming_counterexample"] = {"sigma": repr(sigma), "process": str(p)}
        return data


def check_uniform(e: Encoding, corpus, renamings) -> UniformityReport:
    """e(P|Q) = e(P)|e(Q) and e(sigma P) = sigma e(P), both up to alpha, on the corpus."""
    corpus = list(corpus)
    renamings = list(renamings)
    report = UniformityReport(e.name, len(corpus), len(renamings))
    for p, q in corpus:
        if not alpha_equiv(e(Parallel(p, q)), Parallel(e(p), e(q))):
            report.parallel_homomorphic = False
            report.parallel_counterexample = (p, q)
            break
    terms = [t for pair in corpus for t in pair]
    for sigma in renamings:
        for p in terms:
            if not alpha_equiv(e(rename(p, sigma.mapping)), rename(e(p), sigma.mapping)):
                report.renaming_equivariant = False
                report.renaming_counterexample = (sigma, p)
                break
        if not report.renaming_equivariant:
            break
    logger.info("uniformity of %s: %s", e.name, report.uniform)
    return report


def default_audit(e: Encoding, seed: int = 0, size: int = 40) -> UniformityReport:
    return check_uniform(e, random_pairs(seed, size), random_renamings(seed, 5))


# Observables

def observables_on_o(net: Network, d: Dialect = Dialect.PI, b: ExploreBounds = None) -> set:
    """Announcement sequences of all maximal closed runs within the bounds."""
    b = b or ExploreBounds()
    result, seen = set(), set()

    def visit(state, sequence, depth, on_path):
        key = (network_key(state), sequence)
        if key in on_path:
            result.add(sequence)
            return
        if key in seen or len(seen) >= b.max_states:
            return
        seen.add(key)
        steps = network_transitions(state, d, closed=True)
        if not steps:
            result.add(sequence)
            return
        if depth >= b.max_depth:
            logger.debug("observables truncated at depth %d", depth)
            return
        on_path.add(key)
        for step in steps:
            spoken = tuple(int(m.action.datum.token) for m in step.movers if is_announcement(m.action))
            visit(step.post, sequence + spoken, depth + 1, on_path)
        on_path.discard(key)

    visit(net, (), 0, set())
    return result


def _as_lists(observables):
    return sorted(list(seq) for seq in observables)


@dataclass
class SeparationReport:
    encoding: str
    source_verdict: dict
    source_observables: list
    image: str
    image_symmetric: bool
    adversary_rounds: int
    adversary_announcements: list = field(default_factory=list)
    stuck: str | None = None
    image_observables: list = field(default_factory=list)

    @property
    def separated(self) -> bool:
        return self.source_observables != self.image_observables

    def to_json(self):
        return {"encoding": self.encoding, "source_verdict": self.source_verdict,
                "source_observables": self.source_observables, "image": self.image,
                "image_symmetric": self.image_symmetric,
                "adversary_rounds": self.adversary_rounds,
                "adversary_announcements": self.adversary_announcements,
                "stuck": self.stuck, "image_observables": self.image_observables,
                "separated": self.separated}


def separation_demo(e: Encoding, rounds: int = 10, b: ExploreBounds = None) -> SeparationReport:
    """Run the two-node election through `e` and let the adversary loose on the image."""
    b = b or ExploreBounds(max_depth=12, max_rep_unfoldings=0)
    if e.target_dialect is not Dialect.PI_ASYNC:
        raise EncodingDialectError(f"encoding {e.name} does not target the asynchronous dialect")
    audit = default_audit(e)
    if not audit.uniform:
        raise NonUniformEncoding(f"encoding {e.name} is not uniform", audit)
    source = two_node_election()
    verdict = is_electoral(source, Dialect.PI, b)
    if not isinstance(verdict, Electoral):
        raise WorkbenchError(f"the two-node election is not electoral: {verdict.to_json()}")
    image = source.with_components([e(c) for c in source.components])
    swap = symmetry_for(source, {0: 1, 1: 0})
    symmetric = is_symmetric(image, swap)
    if not symmetric:
        raise WorkbenchError(f"the image under {e.name} lost the symmetry of the source")
    stuck_reason = None
    try:
        state = run_adversary(image, swap, rounds, Dialect.PI_ASYNC)
    except Stuck as stuck:
        state, stuck_reason = stuck.state, stuck.reason
    spoken = [str(m.action) for step in state.trace.steps for m in step.movers
              if is_announcement(m.action)]
    return SeparationReport(
        encoding=e.name,
        source_verdict=verdict.to_json(),
        source_observables=_as_lists(observables_on_o(source, Dialect.PI, b)),
        image=image.to_text(),
        image_symmetric=symmetric,
        adversary_rounds=state.round,
        adversary_announcements=spoken,
        stuck=stuck_reason,
        image_observables=_as_lists(observables_on_o(image, Dialect.PI_ASYNC, b)),
    )
