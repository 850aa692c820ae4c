from calculus import conf
from calculus.lts import Dialect, dialect_check
from calculus.network import automorphisms, hypergraph_of
from calculus.syntax import normal_form, pretty

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = "Parse a network file and print its components, dialects and hypergraph."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('file', help="network text, or - for stdin")
        parser.add_argument('--normal', action='store_true', help="print normal forms")

    def run(self, **options):
        net = self.load_network(options['file'])
        show = (lambda p: pretty(normal_form(p))) if options['normal'] else pretty
        h = hypergraph_of(net)
        sigmas = automorphisms(h, conf.get('AUTOMORPHISM_BOUND'))
        data = {
            'components': {str(n): show(net.component(n)) for n in net.nodes},
            'dialects': [d.value for d in Dialect
                         if all(dialect_check(c, d) for c in net.components)],
            'arcs': {str(x): sorted(kind) for x, kind in sorted(h.type_of.items())},
            'connected': h.is_connected(),
            'automorphisms': [str(s) for s in sigmas],
        }
        lines = [f"{n}: {show(net.component(n))}" for n in net.nodes]
        lines.append(f"dialects: {' '.join(data['dialects']) or '-'}")
        lines += [f"arc {x}: {' '.join(map(str, kind))}" for x, kind in data['arcs'].items()]
        lines.append(f"automorphisms: {', '.join(data['automorphisms'])}")
        self.emit(options, data, "\n".join(lines))
