import sys

from calculus import conf
from calculus.electoral import NotElectoral, is_electoral
from calculus.models import Run
from calculus.tracefile import write_trace

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = ("Decide whether the network is electoral. "
            "Exit status 0 electoral, 1 not electoral, 2 inconclusive.")

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_bounds_arguments(parser)
        self.add_record_argument(parser)
        parser.add_argument('file', help="network text, or - for stdin")
        parser.add_argument('--trace', help="write the witness of a negative verdict as a trace")

    def run(self, **options):
        net = self.load_network(options['file'])
        dialect = self.dialect(options)
        verdict = is_electoral(net, dialect, self.bounds(options))
        data = verdict.to_json()

        trace = ''
        if options['trace'] and isinstance(verdict, NotElectoral):
            trace = write_trace(conf.trace_path(options['trace']), verdict.witness, dialect,
                                'elect', verdict=data['verdict'], reason=verdict.reason)
        self.record(options, Run.Kind.ELECT, dialect, net, data, trace)

        text = data['verdict']
        if isinstance(verdict, NotElectoral):
            text += f" ({verdict.reason})\n" + "\n".join(data['witness'])
        elif 'leaders' in data:
            text += f": leaders {data['distinct_leaders']}"
        else:
            text += f": {data['bound']} bound reached"
        self.emit(options, data, text)
        if verdict.exit_code:
            sys.exit(verdict.exit_code)
