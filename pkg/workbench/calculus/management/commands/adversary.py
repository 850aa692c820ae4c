from django.core.management.base import CommandError

from calculus import conf
from calculus.adversary import reduce_well_balanced, run_adversary
from calculus.electoral import is_announcement
from calculus.errors import Stuck
from calculus.lts import Dialect
from calculus.models import Run
from calculus.network import network_key, single_orbit
from calculus.tracefile import write_trace

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = ("Play symmetric rounds on an asynchronous (or CCS) network, "
            "writing the schedule as a trace with one certificate per round.")
    default_dialect = Dialect.PI_ASYNC

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_record_argument(parser)
        parser.add_argument('file', help="network text, or - for stdin")
        group = parser.add_mutually_exclusive_group(required=True)
        group.add_argument('--auto', action='store_true', help="pick an automorphism of the hypergraph")
        group.add_argument('--sigma', help="node permutation in cycle notation, e.g. '(0 1)(2 3)'")
        parser.add_argument('--rounds', type=int, default=20)
        parser.add_argument('--trace', help="trace file (default: TRACE_DIR/adversary-<hash>.jsonl)")

    def run(self, **options):
        if options['rounds'] < 1:
            raise CommandError("--rounds must be positive")
        net = self.load_network(options['file'])
        dialect = self.dialect(options)
        sigma = self.automorphism(net, 'auto' if options['auto'] else options['sigma'])

        stuck = None
        try:
            state = run_adversary(net, sigma, options['rounds'], dialect)
        except Stuck as err:
            state, stuck = err.state, err.reason
        start_sigma = sigma if single_orbit(sigma) else reduce_well_balanced(net, sigma)[1]

        spoken = [str(m.action) for step in state.trace.steps for m in step.movers
                  if is_announcement(m.action)]
        data = {
            'result': 'stuck' if stuck else 'ok',
            'sigma': str(sigma),
            'reduced': state.reduced,
            'rounds': state.round,
            'stuck': stuck,
            'announcements': spoken,
            'initiators': state.initiators,
            'certificates': state.certificates,
        }
        filename = options['trace'] or f"adversary-{network_key(net)[:12]}.jsonl"
        trace = write_trace(conf.trace_path(filename), state.trace, dialect, 'adversary',
                            automorphism=start_sigma, result=data['result'], stuck=stuck,
                            certificates=state.certificates)
        data['trace'] = str(trace)
        self.record(options, Run.Kind.ADVERSARY, dialect, net, data, trace)

        lines = [f"automorphism {sigma}" + (" (reduced to one orbit)" if state.reduced else "")]
        lines += [f"round {c['round']}: node {c['initiator']} initiated, symmetry {c['check']}"
                  for c in state.certificates]
        if stuck:
            lines.append(f"stuck after {state.round} rounds: {stuck}")
        lines.append(f"announcements: {' '.join(spoken) or 'none'}")
        lines.append(f"trace: {trace}")
        self.emit(options, data, "\n".join(lines))
