import sys

from calculus.errors import TraceMismatch
from calculus.tracefile import replay

from ._common import WorkbenchCommand


class Command(WorkbenchCommand):
    help = "Re-derive every step of a trace and check its hashes. Exit status 1 on a mismatch."

    def add_arguments(self, parser):
        parser.add_argument('trace')
        parser.add_argument('--json', action='store_true', help='print machine-readable JSON')

    def run(self, **options):
        try:
            result = replay(options['trace'])
        except TraceMismatch as mismatch:
            self.emit(options, {'result': 'mismatch', 'index': mismatch.index, 'message': str(mismatch)},
                      f"mismatch at {mismatch}")
            sys.exit(1)
        except OSError as err:
            self.emit(options, {'result': 'error', 'message': str(err)}, f"cannot read trace: {err}")
            sys.exit(1)
        self.emit(options, result.to_json(), f"ok: {result.steps} steps")
