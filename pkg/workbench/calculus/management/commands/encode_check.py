import sys

from calculus import conf
from calculus.encoding import default_audit, get_encoding, separation_demo
from calculus.errors import EncodingDialectError, NonUniformEncoding
from calculus.lts import Dialect
from calculus.models import Run
from calculus.protocols import two_node_election

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = ("Audit an encoding for uniformity and, for a uniform encoding into pia, "
            "run the two-node election through it. Exit status 1 when the audit fails.")
    default_dialect = Dialect.PI_ASYNC

    def add_arguments(self, parser):
        super().add_arguments(parser)
        self.add_record_argument(parser)
        parser.add_argument('--encoding', required=True,
                            help="identity, drop-continuations, monitor, constant or cmd:<command>")
        parser.add_argument('--size', type=int, default=40, help="corpus size of the audit")
        parser.add_argument('--rounds', type=int, default=10)
        parser.add_argument('--depth', type=int, default=12)

    def run(self, **options):
        encoding = get_encoding(options['encoding'], self.dialect(options))
        audit = default_audit(encoding, options['seed'], options['size'])
        data = {'audit': audit.to_json()}
        lines = [f"{encoding.name}: {'uniform' if audit.uniform else 'NOT uniform'}"]
        if not audit.uniform:
            lines += [f"  {key}: {value}" for key, value in audit.to_json().items()
                      if key.endswith('counterexample')]
        elif encoding.target_dialect is Dialect.PI_ASYNC:
            try:
                report = separation_demo(encoding, options['rounds'],
                                         conf.default_bounds(depth=options['depth'], unfold=0))
            except (EncodingDialectError, NonUniformEncoding) as err:
                data['separation'] = {'error': str(err)}
                lines.append(f"separation demo skipped: {err}")
            else:
                data['separation'] = report.to_json()
                lines += [
                    f"source observables: {report.source_observables}",
                    f"image observables: {report.image_observables}",
                    f"adversary: {report.adversary_rounds} rounds, announcements "
                    f"{report.adversary_announcements or 'none'}, stuck {report.stuck or 'no'}",
                    f"separated: {report.separated}",
                ]
        else:
            lines.append(f"target dialect {encoding.target_dialect.value}: no separation demo")

        self.record(options, Run.Kind.ENCODE_CHECK, encoding.target_dialect, two_node_election(),
                    {'result': 'uniform' if audit.uniform else 'non-uniform', **data})
        self.emit(options, data, "\n".join(lines))
        if not audit.uniform:
            sys.exit(1)
