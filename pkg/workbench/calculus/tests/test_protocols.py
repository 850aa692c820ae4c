from django.test import SimpleTestCase

from calculus.electoral import Electoral, ExploreBounds, is_electoral
from calculus.errors import DisconnectedSpec, ParseError, PreconditionFailed, WorkbenchError
from calculus.lts import Dialect, dialect_check
from calculus.network import is_symmetric, symmetries
from calculus.protocols import (
    HypergraphSpec, async_extrusion_pair, async_ring, ccs_ring, connected, election_network,
    split_choice, two_node_election,
)
from calculus.syntax import pretty

PAIR = "nodes 1 2\na: 1 2\n"
STAR = "nodes 1 2 3\na: 1 2 3\n"
TRIANGLE = "nodes 1 2 3\na: 1 2\nb: 2 3\nc: 1 3\n"


class HypergraphSpecTests(SimpleTestCase):
    def test_parse(self):
        spec = HypergraphSpec.from_text(TRIANGLE)
        self.assertEqual(spec.nodes, (1, 2, 3))
        self.assertEqual(spec.k, 3)
        self.assertEqual(spec.slots, 6)
        self.assertEqual([str(x) for x in spec.arcs_of(2)], ["a", "b"])
        self.assertEqual(HypergraphSpec.from_text(spec.to_text()), spec)

    def test_nodes_default_to_the_arc_members(self):
        spec = HypergraphSpec.from_text("# comment\na: 2 5\n")
        self.assertEqual(spec.nodes, (2, 5))

    def test_errors(self):
        with self.assertRaises(ParseError) as ctx:
            HypergraphSpec.from_text("nodes 1 2\nfoo\n")
        self.assertEqual(ctx.exception.line, 2)
        with self.assertRaises(ParseError):
            HypergraphSpec.from_text("nodes one two\n")
        with self.assertRaises(WorkbenchError):
            HypergraphSpec.from_text("nodes 1 2\na: 1 3\n")
        with self.assertRaises(WorkbenchError):
            HypergraphSpec.from_text("nodes 1 2\nv_a: 1 2\n")

    def test_connectivity(self):
        self.assertTrue(connected(HypergraphSpec.from_text(TRIANGLE)))
        spec = HypergraphSpec.from_text("nodes 1 2 3\na: 1 2\n")
        self.assertFalse(connected(spec))
        with self.assertRaises(DisconnectedSpec):
            election_network(spec)


class ElectionNetworkTests(SimpleTestCase):
    def test_pair_is_symmetric_and_electoral(self):
        net = election_network(HypergraphSpec.from_text(PAIR))
        self.assertEqual(net.nodes, (1, 2))
        found = symmetries(net)
        self.assertEqual(len(found), 2)
        verdict = is_electoral(net, Dialect.PI, ExploreBounds(60, 0, 100_000))
        self.assertIsInstance(verdict, Electoral)
        self.assertEqual(set(verdict.leaders.values()), {1, 2})

    def test_star_is_symmetric_and_electoral(self):
        net = election_network(HypergraphSpec.from_text(STAR))
        self.assertEqual(len(symmetries(net)), 6)
        verdict = is_electoral(net, Dialect.PI, ExploreBounds(60, 0, 100_000))
        self.assertIsInstance(verdict, Electoral)
        self.assertEqual(set(verdict.leaders.values()), {1, 2, 3})

    def test_single_node_announces_itself(self):
        net = election_network(HypergraphSpec.from_text("nodes 4\n"))
        verdict = is_electoral(net, Dialect.PI, ExploreBounds(5, 0))
        self.assertEqual(set(verdict.leaders.values()), {4})

    def test_node_code_follows_the_four_steps(self):
        [code, _] = election_network(HypergraphSpec.from_text(PAIR)).components
        text = pretty(code)
        self.assertTrue(text.startswith("new v_x1."))
        # the own record: identifier then private name
        self.assertIn("!1.", text)
        self.assertIn("!v_x1.", text)
        self.assertIn("o!1", text)
        self.assertNotIn("o!2", text)
        self.assertIn("o!v_l", text)

    def test_arc_order_does_not_break_symmetry(self):
        net = election_network(HypergraphSpec.from_text(TRIANGLE))
        found = symmetries(net)
        self.assertEqual(len(found), 6)
        self.assertTrue(all(is_symmetric(net, sigma) for sigma in found))


class CannedNetworkTests(SimpleTestCase):
    def test_two_node_election_uses_mixed_choice(self):
        net = two_node_election()
        self.assertFalse(any(dialect_check(c, Dialect.PI_SEPARATE) for c in net.components))
        split = split_choice(net)
        self.assertTrue(all(dialect_check(c, Dialect.PI_SEPARATE) for c in split.components))
        self.assertEqual(split.nodes, net.nodes)

    def test_rings(self):
        ring = async_ring(3)
        self.assertEqual(ring.nodes, (0, 1, 2))
        self.assertTrue(all(dialect_check(c, Dialect.PI_ASYNC) for c in ring.components))
        net, sigma = ccs_ring(4, 2)
        self.assertTrue(all(dialect_check(c, Dialect.CCS) for c in net.components))
        self.assertEqual(sigma.node(3), 1)
        with self.assertRaises(PreconditionFailed):
            ccs_ring(4, 1)
        self.assertTrue(all(dialect_check(c, Dialect.PI_ASYNC)
                            for c in async_extrusion_pair().components))

    def test_ring_errors(self):
        with self.assertRaises(WorkbenchError):
            async_ring(1)
        with self.assertRaises(WorkbenchError):
            ccs_ring(1, 1)
        with self.assertRaises(WorkbenchError):
            ccs_ring(3, 3)
