import shutil
import unittest

from django.test import SimpleTestCase

from calculus.corpus import random_pairs, random_renamings
from calculus.electoral import ExploreBounds
from calculus.encoding import (
    BUILTINS, Encoding, check_uniform, default_audit, drop_continuations, get_encoding, monitor,
    observables_on_o, separation_demo,
)
from calculus.errors import EncodingDialectError, NonUniformEncoding, WorkbenchError
from calculus.lts import Dialect, dialect_check
from calculus.network import Network
from calculus.protocols import two_node_election
from calculus.syntax import alpha_equiv, parse


class TransformTests(SimpleTestCase):
    def test_drop_continuations(self):
        image = drop_continuations(parse("a!b.c?(x).0 + d?(y).y!e"))
        self.assertTrue(dialect_check(image, Dialect.PI_ASYNC))
        self.assertTrue(alpha_equiv(image, parse("(a!b | c?(x).0) | d?(y).y!e")))

    def test_monitor_adds_a_restricted_listener(self):
        image = monitor(parse("a!b | c!d"))
        self.assertEqual(image.fn, parse("a!b | c!d").fn)
        self.assertFalse(alpha_equiv(image, parse("a!b | c!d")))

    def test_lookup(self):
        self.assertIs(get_encoding("monitor"), BUILTINS["monitor"])
        with self.assertRaises(WorkbenchError):
            get_encoding("nonsense")

    def test_image_must_stay_in_the_target_dialect(self):
        e = get_encoding("identity")
        self.assertEqual(e.target_dialect, Dialect.PI)
        with self.assertRaises(EncodingDialectError):
            Encoding("broken", lambda p: p, Dialect.PI_ASYNC)(parse("a!b.0"))


class UniformityTests(SimpleTestCase):
    def test_uniform_encodings(self):
        for spec in ("identity", "drop-continuations"):
            report = default_audit(get_encoding(spec))
            self.assertTrue(report.uniform, report.to_json())
            self.assertEqual(report.corpus_size, 40)

    def test_monitor_is_not_homomorphic(self):
        report = default_audit(get_encoding("monitor"))
        self.assertFalse(report.uniform)
        self.assertFalse(report.parallel_homomorphic)
        self.assertIsNotNone(report.parallel_counterexample)
        self.assertIn("parallel_counterexample", report.to_json())

    def test_constant_is_not_homomorphic(self):
        report = default_audit(get_encoding("constant"))
        self.assertFalse(report.uniform)

    @unittest.skipUnless(shutil.which("cat"), "cat is not available")
    def test_external_command(self):
        e = get_encoding("cmd:cat", Dialect.PI)
        p = parse("a?(x).x!b | new y.c!y")
        self.assertTrue(alpha_equiv(e(p), p))
        report = check_uniform(e, random_pairs(3, 4), random_renamings(3, 2))
        self.assertTrue(report.uniform)
        with self.assertRaises(EncodingDialectError):
            get_encoding("cmd:cat")(parse("a!b.0"))

    def test_failing_command(self):
        with self.assertRaises(WorkbenchError):
            get_encoding("cmd:/nonexistent/encoder")(parse("a!b"))


class ObservableTests(SimpleTestCase):
    def test_agreement(self):
        net = Network.from_text("1: o!1 || 2: o!1")
        self.assertEqual(observables_on_o(net), {(1, 1)})

    def test_two_node_election(self):
        observed = observables_on_o(two_node_election(), Dialect.PI, ExploreBounds(12, 0))
        self.assertEqual(observed, {(0, 0), (1, 1)})


class SeparationTests(SimpleTestCase):
    def test_dropping_continuations_separates(self):
        report = separation_demo(get_encoding("drop-continuations"))
        self.assertEqual(report.source_observables, [[0, 0], [1, 1]])
        self.assertTrue(report.image_symmetric)
        self.assertEqual(report.adversary_announcements, [])
        self.assertTrue(report.separated)
        self.assertIn([0, 1, 0, 1], report.image_observables)
        self.assertTrue(report.to_json()["separated"])

    def test_synchronous_target_is_refused(self):
        with self.assertRaises(EncodingDialectError):
            separation_demo(get_encoding("identity"))

    def test_non_uniform_encoding_is_refused(self):
        with self.assertRaises(NonUniformEncoding) as ctx:
            separation_demo(get_encoding("constant"))
        self.assertFalse(ctx.exception.report.uniform)
