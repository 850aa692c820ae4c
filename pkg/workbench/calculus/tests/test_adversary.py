import random

from django.test import SimpleTestCase

from calculus.adversary import (
    ccs_applicable, confluence_diamond, find_diamond, reduce_well_balanced, run_adversary,
)
from calculus.corpus import async_with_io
from calculus.errors import NotAsync, PreconditionFailed, Stuck
from calculus.lts import BoundOutput, Dialect, FreeOutput, InputAct, transitions
from calculus.network import (
    Automorphism, Network, is_symmetric, network_key, parse_cycles, single_orbit, symmetry_for,
)
from calculus.protocols import async_extrusion_pair, async_ring, ccs_ring, two_node_election
from calculus.syntax import name, parse, struct_congruent


def output_and_input(p):
    steps = transitions(p, Dialect.PI_ASYNC)
    outs = [s for s in steps if isinstance(s.action, (FreeOutput, BoundOutput))]
    ins = [s for s in steps if isinstance(s.action, InputAct)]
    if outs and ins:
        return outs[0], ins[0]
    return None


class ConfluenceTests(SimpleTestCase):
    def test_random_asynchronous_terms_close_the_diamond(self):
        rng = random.Random(11)
        closed = 0
        for _ in range(5000):
            p = async_with_io(rng)
            pair = output_and_input(p)
            if pair is None:
                continue
            result = confluence_diamond(p, *pair)
            self.assertEqual(result.left_step.action, pair[1].action)
            closed += 1
            if closed == 500:
                break
        self.assertEqual(closed, 500)

    def test_bound_output_commutes_with_input(self):
        p = parse("new y.a!y | b?(x).x!c")
        out, inp = output_and_input(p)
        self.assertIsInstance(out.action, BoundOutput)
        result = confluence_diamond(p, out, inp)
        self.assertIsInstance(result.right_step.action, BoundOutput)

    def test_mixed_choice_has_no_diamond(self):
        p = parse("x_0!(y).o!0 + x_1?(y).o!1")
        steps = transitions(p)
        out = next(s for s in steps if isinstance(s.action, BoundOutput))
        inp = next(s for s in steps if isinstance(s.action, InputAct))
        self.assertIsNone(find_diamond(p, out, inp))
        with self.assertRaises(NotAsync):
            confluence_diamond(p, out, inp)


class PreconditionTests(SimpleTestCase):
    def test_synchronous_components_are_refused(self):
        net = two_node_election()
        with self.assertRaises(PreconditionFailed):
            run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 1, Dialect.PI_ASYNC)

    def test_identity_is_refused(self):
        net = async_ring(2)
        with self.assertRaises(PreconditionFailed):
            run_adversary(net, Automorphism.identity(net.nodes), 1)

    def test_ccs_ring_of_two_is_refused(self):
        with self.assertRaises(PreconditionFailed):
            ccs_ring(2, 1)

    def test_ccs_applicability(self):
        net, sigma = ccs_ring(4, 2)
        self.assertTrue(ccs_applicable(net, sigma))
        ring = async_ring(4)
        self.assertFalse(ccs_applicable(ring, symmetry_for(ring, parse_cycles("(0 1 2 3)"))))


class ReductionTests(SimpleTestCase):
    def test_well_balanced_reduction_is_coherent(self):
        net, sigma = ccs_ring(4, 2)
        self.assertFalse(single_orbit(sigma))
        reduced, theta = reduce_well_balanced(net, sigma)
        self.assertEqual(len(reduced.nodes), 2)
        self.assertTrue(single_orbit(theta))
        self.assertTrue(is_symmetric(reduced, theta))
        self.assertTrue(struct_congruent(reduced.as_process(), net.as_process()))

    def test_single_orbit_is_left_alone(self):
        ring = async_ring(3)
        sigma = symmetry_for(ring, parse_cycles("(0 1 2)"))
        self.assertEqual(reduce_well_balanced(ring, sigma), (ring, sigma))


class AdversaryTests(SimpleTestCase):
    def test_two_node_ring(self):
        ring = async_ring(2)
        state = run_adversary(ring, symmetry_for(ring, {0: 1, 1: 0}), 20)
        self.assertEqual(state.round, 20)
        self.assertEqual(len(state.certificates), 20)
        self.assertTrue(is_symmetric(state.net, state.sigma))
        self.assertFalse(state.reduced)

    def test_rotation_is_fair(self):
        ring = async_ring(3)
        state = run_adversary(ring, symmetry_for(ring, parse_cycles("(0 1 2)")), 20)
        self.assertEqual(state.round, 20)
        for i in range(len(state.initiators) - 2):
            self.assertEqual(set(state.initiators[i:i + 3]), {0, 1, 2})

    def test_extruded_names_join_the_symmetry(self):
        net = async_extrusion_pair()
        state = run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 20)
        self.assertEqual(state.round, 20)
        self.assertTrue(is_symmetric(state.net, state.sigma))
        self.assertGreater(len(state.sigma.arc_map), 2)

    def test_ccs_ring_with_two_orbits(self):
        net, sigma = ccs_ring(4, 2)
        state = run_adversary(net, sigma, 10, Dialect.CCS)
        self.assertEqual(state.round, 10)
        self.assertTrue(state.reduced)
        self.assertEqual(len(state.net.nodes), 2)

    def test_trace_starts_at_the_aligned_network(self):
        ring = async_ring(2)
        state = run_adversary(ring, symmetry_for(ring, {0: 1, 1: 0}), 3)
        self.assertGreaterEqual(len(state.trace), 3)
        self.assertEqual(state.trace.post, state.net)

    def test_stuck_on_announcements(self):
        net = Network.from_text("0: o!0 || 1: o!1")
        with self.assertRaises(Stuck) as ctx:
            run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 5)
        self.assertEqual(ctx.exception.reason, "announcements-only")
        self.assertEqual(ctx.exception.state.round, 0)

    def test_stuck_on_deadlock(self):
        net = Network.from_text("0: 0 || 1: 0")
        with self.assertRaises(Stuck) as ctx:
            run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 5)
        self.assertEqual(ctx.exception.reason, "deadlock")

    def test_environment_inputs_are_scheduled(self):
        net = Network.from_text("0: !a_0?(x).x!b || 1: !a_1?(x).x!b")
        state = run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 2)
        labels = [step.label for step in state.trace.steps]
        a_0, a_1, b = name("a_0"), name("a_1"), name("b")
        self.assertEqual(labels[:2], [InputAct(a_0, a_0), InputAct(a_1, a_1)])
        self.assertEqual(labels[2:], [FreeOutput(a_1, b), FreeOutput(a_0, b)])

    def test_least_step_of_the_preferred_node(self):
        ring = async_ring(2)
        state = run_adversary(ring, symmetry_for(ring, {0: 1, 1: 0}), 1)
        self.assertEqual(state.trace.steps[0].label, FreeOutput(name("c_0"), name("a")))

    def test_communication_rounds_close_diamonds(self):
        net = async_extrusion_pair()
        state = run_adversary(net, symmetry_for(net, {0: 1, 1: 0}), 3)
        self.assertEqual([c["diamonds"] for c in state.certificates], [2, 2, 2])
        self.assertTrue(all(step.rule == "close" for step in state.trace.steps))

    def test_first_round_agrees_with_the_reduced_network(self):
        ring = async_ring(4)
        sigma = symmetry_for(ring, parse_cycles("(0 2)(1 3)"))
        reduced, theta = reduce_well_balanced(ring, sigma)
        direct = run_adversary(ring, sigma, 1)
        grouped = run_adversary(reduced, theta, 1)
        self.assertTrue(direct.reduced)
        self.assertFalse(grouped.reduced)
        self.assertEqual([s.describe() for s in direct.trace.steps],
                         [s.describe() for s in grouped.trace.steps])
        self.assertEqual(network_key(direct.net), network_key(grouped.net))
