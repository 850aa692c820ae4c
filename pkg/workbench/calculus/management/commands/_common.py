"""Shared plumbing for the workbench management commands."""
import json
import sys
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from calculus import conf
from calculus.errors import WorkbenchError
from calculus.forms import ExploreBoundsForm, form_errors
from calculus.lts import Dialect
from calculus.models import Run
from calculus.network import (
    Automorphism, Network, is_well_balanced, parse_cycles, single_orbit, symmetries, symmetry_for,
)


class WorkbenchCommand(BaseCommand):
    """Base command: common flags, network loading and error translation.

    Subclasses implement `run(**options)` and may raise WorkbenchError freely.
    """
    default_dialect = Dialect.PI

    def add_arguments(self, parser):
        parser.add_argument('--dialect', choices=[d.value for d in Dialect],
                            default=self.default_dialect.value)
        parser.add_argument('--json', action='store_true', help='print machine-readable JSON')
        parser.add_argument('--seed', type=int, default=0)

    def add_bounds_arguments(self, parser):
        parser.add_argument('--depth', type=int)
        parser.add_argument('--unfold', type=int)
        parser.add_argument('--states', type=int)

    def add_record_argument(self, parser):
        parser.add_argument('--record', action='store_true', help='store the result as a Run')

    def handle(self, *args, **options):
        try:
            return self.run(**options)
        except WorkbenchError as err:
            raise CommandError(str(err)) from err

    def run(self, **options):
        raise NotImplementedError

    # helpers

    @staticmethod
    def read_text(path) -> str:
        if path == '-':
            return sys.stdin.read()
        try:
            return Path(path).read_text(encoding='utf-8')
        except OSError as err:
            raise CommandError(f"cannot read {path}: {err}") from err

    def load_network(self, path) -> Network:
        return Network.from_text(self.read_text(path))

    @staticmethod
    def dialect(options) -> Dialect:
        return Dialect(options['dialect'])

    @staticmethod
    def bounds(options):
        form = ExploreBoundsForm({key: options.get(key) for key in ('depth', 'unfold', 'states')
                                  if options.get(key) is not None})
        if not form.is_valid():
            raise CommandError(form_errors(form))
        return form.bounds()

    @staticmethod
    def automorphism(net: Network, spec: str) -> Automorphism:
        """`auto` prefers a single-orbit automorphism, then a well-balanced one;
        anything else is read as cycle notation on node identifiers."""
        bound = conf.get('AUTOMORPHISM_BOUND')
        if spec == 'auto':
            candidates = sorted((s for s in symmetries(net, bound) if not s.is_identity),
                                key=lambda s: (not single_orbit(s), not is_well_balanced(s)))
            if not candidates:
                raise CommandError("the network is symmetric under no automorphism but the identity")
            return candidates[0]
        return symmetry_for(net, parse_cycles(spec), bound)

    def emit(self, options, data, text=None):
        if options.get('json') or text is None:
            self.stdout.write(json.dumps(data, indent=2, sort_keys=True))
        else:
            self.stdout.write(text)

    @staticmethod
    def record(options, kind, dialect, net, result, trace_path=''):
        if not options.get('record'):
            return None
        return Run.objects.create(kind=kind, dialect=dialect.value, source=net.to_text(),
                                  verdict=result, trace_path=str(trace_path or ''))
