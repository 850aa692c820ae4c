from django.core.management.base import CommandError

from calculus import conf
from calculus.network import Computation, Network, network_transitions
from calculus.tracefile import write_trace

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = "List the enabled network steps, or apply a sequence of them by number."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('file', help="network text, or - for stdin")
        parser.add_argument('--apply', type=int, nargs='*', default=[], metavar='N',
                            help="apply the N-th listed step (1-based), repeatedly")
        parser.add_argument('--closed', action='store_true',
                            help="only internal steps and announcements on o")
        parser.add_argument('--trace', help="write the applied steps as a trace")

    def run(self, **options):
        text = self.read_text(options['file'])
        if not text.strip():
            self.stdout.write("no steps")
            return
        net = Network.from_text(text)
        dialect = self.dialect(options)
        computation = Computation(net)
        for choice in options['apply']:
            steps = network_transitions(computation.post, dialect, closed=options['closed'])
            if not 1 <= choice <= len(steps):
                raise CommandError(f"step {choice} out of range: {len(steps)} steps enabled")
            computation = computation.append(steps[choice - 1])

        if options['trace']:
            path = write_trace(conf.trace_path(options['trace']), computation, dialect, 'step',
                               result='applied')
            self.stderr.write(f"trace written to {path}")

        steps = network_transitions(computation.post, dialect, closed=options['closed'])
        data = {
            'applied': [step.describe() for step in computation.steps],
            'network': computation.post.to_text(),
            'hoisted': [str(h) for h in computation.post.hoisted],
            'enabled': [step.describe() for step in steps],
        }
        lines = [f"applied: {d}" for d in data['applied']]
        if computation.steps:
            lines.append(str(computation.post))
        lines += [f"[{i}] {d}" for i, d in enumerate(data['enabled'], start=1)] or ["no steps"]
        self.emit(options, data, "\n".join(lines))
