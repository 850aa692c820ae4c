from calculus.electoral import explore
from calculus.encoding import observables_on_o
from calculus.models import Run

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = "Count the reachable states of the closed network and list its observables on o."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_bounds_arguments(parser)
        self.add_record_argument(parser)
        parser.add_argument('file', help="network text, or - for stdin")

    def run(self, **options):
        net = self.load_network(options['file'])
        dialect, bounds = self.dialect(options), self.bounds(options)
        stats = explore(net, dialect, bounds)
        observables = sorted(list(seq) for seq in observables_on_o(net, dialect, bounds))
        data = {**stats.to_json(), 'observables': observables}
        self.record(options, Run.Kind.EXPLORE, dialect, net, data)
        text = (f"states: {stats.states}\ntransitions: {stats.transitions}\n"
                f"maximal: {stats.maximal}\ndepth: {stats.depth}\n"
                f"truncated: {stats.truncated or 'no'}\n"
                f"observables: {' '.join(str(o) for o in observables) or '-'}")
        self.emit(options, data, text)
