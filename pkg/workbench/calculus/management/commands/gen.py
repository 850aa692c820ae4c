from pathlib import Path

from django.core.management.base import CommandError

from calculus.protocols import (
    HypergraphSpec, async_extrusion_pair, async_ring, ccs_ring, election_network, split_choice,
    two_node_election,
)

from ._common import WorkbenchCommand

KINDS = ('two-node', 'split-choice', 'election', 'ccs-ring', 'async-ring', 'extrusion-pair')


class Command(WorkbenchCommand):
    help = "Print one of the canned networks in network-file syntax."

    def add_arguments(self, parser):
        parser.add_argument('kind', choices=KINDS)
        parser.add_argument('--spec', help="hypergraph file for `election`")
        parser.add_argument('--k', type=int, default=3, help="ring size")
        parser.add_argument('--shift', type=int, default=1, help="rotation of `ccs-ring`")
        parser.add_argument('--out', help="write the network to this file instead of stdout")
        parser.add_argument('--json', action='store_true', help='print machine-readable JSON')

    def run(self, **options):
        kind, sigma = options['kind'], None
        if kind == 'two-node':
            net = two_node_election()
        elif kind == 'split-choice':
            net = split_choice(two_node_election())
        elif kind == 'election':
            if not options['spec']:
                raise CommandError("election needs --spec")
            net = election_network(HypergraphSpec.from_text(self.read_text(options['spec'])))
        elif kind == 'ccs-ring':
            net, sigma = ccs_ring(options['k'], options['shift'])
        elif kind == 'async-ring':
            net = async_ring(options['k'])
        else:
            net = async_extrusion_pair()

        text = net.to_text()
        if options['out']:
            Path(options['out']).write_text(text + "\n", encoding='utf-8')
        data = {'kind': kind, 'network': text, 'sigma': None if sigma is None else str(sigma)}
        self.emit(options, data, text if sigma is None else f"{text}\n# sigma {sigma}")
