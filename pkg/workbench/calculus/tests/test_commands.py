import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from calculus.models import Run
from calculus.protocols import async_ring, two_node_election


class CommandTestCase(TestCase):
    def setUp(self):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        self.dir = Path(tmp.name)
        settings = override_settings(WORKBENCH={'TRACE_DIR': str(self.dir / 'traces')})
        settings.enable()
        self.addCleanup(settings.disable)

    def network_file(self, text, filename='net.txt'):
        path = self.dir / filename
        path.write_text(text, encoding='utf-8')
        return str(path)

    def call(self, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err, **options)
        return out.getvalue()

    def call_json(self, *args, **options):
        return json.loads(self.call(*args, json=True, **options))

    def exit_code(self, *args, **options):
        with self.assertRaises(SystemExit) as ctx:
            self.call(*args, **options)
        return ctx.exception.code


class ParseCommandTests(CommandTestCase):
    def test_text(self):
        out = self.call('parse', self.network_file(two_node_election().to_text()))
        self.assertIn("0: new y.(x_0!y.o!0 + x_1?(y).o!1)", out)
        self.assertIn("dialects: pi", out)
        self.assertIn("arc x_0: 0 1", out)

    def test_json(self):
        data = self.call_json('parse', self.network_file("1: a!b || 2: a?(x).0"), normal=True)
        self.assertEqual(set(data['dialects']), {'pi', 'pia', 'sep'})
        self.assertEqual(data['arcs'], {'a': [1, 2], 'b': [1]})
        self.assertTrue(data['connected'])

    def test_parse_error(self):
        with self.assertRaises(CommandError):
            self.call('parse', self.network_file("a?(x).\n  x!"))

    def test_missing_file(self):
        with self.assertRaises(CommandError):
            self.call('parse', str(self.dir / 'missing.txt'))


class StepCommandTests(CommandTestCase):
    def test_listing(self):
        out = self.call('step', self.network_file("1: a!b || 2: a?(x).o!1"), closed=True)
        self.assertIn("[1] ", out)
        self.assertNotIn("[2] ", out)

    def test_two_node_election_offers_both_communications(self):
        data = self.call_json('step', self.network_file(two_node_election().to_text()), closed=True)
        self.assertEqual(len([d for d in data['enabled'] if d.startswith("tau ")]), 2)

    def test_apply(self):
        path = self.network_file("1: a!b || 2: a?(x).o!1")
        data = self.call_json('step', path, closed=True, apply=[1])
        self.assertEqual(len(data['applied']), 1)
        self.assertEqual(len(data['enabled']), 1)
        self.assertIn("o!1", data['enabled'][0])
        data = self.call_json('step', path, closed=True, apply=[1, 1])
        self.assertEqual(data['enabled'], [])

    def test_out_of_range(self):
        with self.assertRaisesMessage(CommandError, "step 3 out of range: 1 steps enabled"):
            self.call('step', self.network_file("1: o!1 || 2: 0"), apply=[3], closed=True)

    def test_nothing_enabled(self):
        self.assertIn("no steps", self.call('step', self.network_file("1: 0 || 2: 0")))
        self.assertIn("no steps", self.call('step', self.network_file("")))

    def test_trace(self):
        path = self.network_file("1: a!b || 2: a?(x).o!1")
        self.call('step', path, closed=True, apply=[1, 1], trace='steps.jsonl')
        trace = self.dir / 'traces' / 'steps.jsonl'
        self.assertTrue(trace.exists())
        self.assertIn("ok: 2 steps", self.call('replay', str(trace)))


class ElectCommandTests(CommandTestCase):
    def test_electoral_exits_normally(self):
        out = self.call('elect', self.network_file(two_node_election().to_text()),
                        depth=12, unfold=0)
        self.assertIn("electoral: leaders [0, 1]", out)

    def test_not_electoral_exits_with_1(self):
        path = self.network_file("1: o!1 || 2: o!2")
        self.assertEqual(self.exit_code('elect', path, unfold=0), 1)

    def test_inconclusive_exits_with_2(self):
        path = self.network_file(async_ring(2).to_text())
        self.assertEqual(self.exit_code('elect', path, depth=5, unfold=0), 2)

    def test_witness_trace_and_record(self):
        path = self.network_file("1: a!b.o!1 || 2: a?(x).o!2")
        self.assertEqual(self.exit_code('elect', path, unfold=0, trace='witness.jsonl',
                                        record=True), 1)
        run = Run.objects.get()
        self.assertEqual(run.kind, Run.Kind.ELECT)
        self.assertEqual(run.outcome, 'not-electoral')
        self.assertTrue(run.trace_path.endswith('witness.jsonl'))
        self.assertIn("ok: 3 steps", self.call('replay', run.trace_path))

    def test_bad_bounds(self):
        with self.assertRaises(CommandError):
            self.call('elect', self.network_file("1: o!1"), depth=0)


class ExploreCommandTests(CommandTestCase):
    def test_census_and_observables(self):
        data = self.call_json('explore', self.network_file("1: o!1 || 2: o!1"), unfold=0,
                              record=True)
        self.assertEqual(data['observables'], [[1, 1]])
        self.assertIsNone(data['truncated'])
        self.assertEqual(data['states'], 4)
        self.assertEqual(Run.objects.get().kind, Run.Kind.EXPLORE)

    def test_text(self):
        out = self.call('explore', self.network_file(async_ring(3).to_text()), depth=2)
        self.assertIn("truncated: depth", out)


class AdversaryCommandTests(CommandTestCase):
    def test_auto_writes_a_replayable_trace(self):
        path = self.network_file(async_ring(3).to_text())
        data = self.call_json('adversary', path, '--auto', rounds=6, record=True)
        self.assertEqual(data['result'], 'ok')
        self.assertEqual(data['rounds'], 6)
        self.assertEqual(data['announcements'], [])
        self.assertEqual(len(data['certificates']), 6)
        self.assertTrue(Path(data['trace']).parent.samefile(self.dir / 'traces'))
        self.assertIn("ok:", self.call('replay', data['trace']))
        self.assertEqual(Run.objects.get().kind, Run.Kind.ADVERSARY)

    def test_sigma_in_cycle_notation(self):
        out = self.call('adversary', self.network_file(async_ring(2).to_text()),
                        '--sigma', '(0 1)', rounds=3, trace='ring.jsonl')
        self.assertIn("round 3: node", out)
        self.assertIn("announcements: none", out)

    def test_ccs_ring_is_reduced(self):
        gen = self.call('gen', 'ccs-ring', k=4, shift=2, out=str(self.dir / 'ccs.txt'))
        self.assertIn("# sigma", gen)
        data = self.call_json('adversary', str(self.dir / 'ccs.txt'), '--sigma', '(0 2)(1 3)',
                              dialect='ccs', rounds=4)
        self.assertTrue(data['reduced'])
        self.assertIn("ok:", self.call('replay', data['trace']))

    def test_stuck(self):
        data = self.call_json('adversary', self.network_file("0: o!0 || 1: o!1"), '--auto',
                              rounds=3)
        self.assertEqual(data['result'], 'stuck')
        self.assertEqual(data['stuck'], 'announcements-only')

    def test_refusals(self):
        path = self.network_file(two_node_election().to_text())
        with self.assertRaises(CommandError):
            self.call('adversary', path, '--auto')
        with self.assertRaises(CommandError):
            self.call('adversary', self.network_file("0: a!a || 1: b?(x).0", 'lopsided.txt'),
                      '--sigma', '(0 1)')
        with self.assertRaises(CommandError):
            self.call('adversary', path, '--auto', rounds=0)

    def test_auto_and_sigma_exclude_each_other(self):
        path = self.network_file(async_ring(2).to_text())
        with self.assertRaises(CommandError):
            self.call('adversary', path, '--auto', '--sigma', '(0 1)')
        with self.assertRaises(CommandError):
            self.call('adversary', path)


class GenCommandTests(CommandTestCase):
    def test_kinds(self):
        for kind in ('two-node', 'split-choice', 'async-ring', 'extrusion-pair'):
            data = self.call_json('gen', kind)
            self.assertEqual(data['kind'], kind)
            self.assertIn("||", data['network'])

    def test_election_needs_a_spec(self):
        with self.assertRaises(CommandError):
            self.call('gen', 'election')
        spec = self.network_file("nodes 1 2\na: 1 2\n", 'pair.hg')
        out_file = self.dir / 'election.txt'
        self.call('gen', 'election', spec=spec, out=str(out_file))
        self.assertTrue(out_file.read_text().startswith("1: "))

    def test_errors(self):
        with self.assertRaises(CommandError):
            self.call('gen', 'ccs-ring', k=2, shift=1)
        with self.assertRaises(CommandError):
            self.call('gen', 'election', spec=self.network_file("nodes 1 2 3\na: 1 2\n", 'bad.hg'))


class EncodeCheckCommandTests(CommandTestCase):
    def test_uniform_encoding_with_separation(self):
        data = self.call_json('encode_check', encoding='drop-continuations', record=True)
        self.assertTrue(data['audit']['uniform'])
        self.assertTrue(data['separation']['separated'])
        self.assertEqual(Run.objects.get().outcome, 'uniform')

    def test_synchronous_target_has_no_demo(self):
        out = self.call('encode_check', encoding='identity', dialect='pi', size=5)
        self.assertIn("identity: uniform", out)
        self.assertIn("no separation demo", out)

    def test_non_uniform_exits_with_1(self):
        self.assertEqual(self.exit_code('encode_check', encoding='monitor', dialect='pi', size=5), 1)

    def test_unknown_encoding(self):
        with self.assertRaises(CommandError):
            self.call('encode_check', encoding='nonsense')


class ReplayCommandTests(CommandTestCase):
    def test_mismatch_exits_with_1(self):
        path = self.network_file(async_ring(2).to_text())
        data = self.call_json('adversary', path, '--auto', rounds=2)
        trace = Path(data['trace'])
        lines = trace.read_text().splitlines()
        lines[1] = lines[1].replace('"kind":"step"', '"kind":"stop"')
        trace.write_text("\n".join(lines) + "\n")
        self.assertEqual(self.exit_code('replay', str(trace)), 1)

    def test_missing_trace(self):
        self.assertEqual(self.exit_code('replay', str(self.dir / 'none.jsonl')), 1)

    def test_empty_trace(self):
        path = self.network_file("", 'empty.jsonl')
        self.assertIn("ok: 0 steps", self.call('replay', path))
