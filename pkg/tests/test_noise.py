import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gsnet.graphstate import GraphState, chain_graph
from gsnet.noise import (
    NoiseAssignment,
    PauliChannel,
    assemble_fidelity,
    compile_strategy,
    dephasing_channel,
    dephasing_probability,
    depolarizing_channel,
    propagate_channel,
    propagate_operator,
    strategy_fidelity,
)
from gsnet.oracle import dense_oracle_fidelity
from gsnet.pauli import PauliString, from_axes, identity, single


class TestChannelConstructors:
    def test_depolarizing_zero_is_identity(self):
        ch = depolarizing_channel(2, 0.0)
        assert ch.terms == ((1.0, identity()),)

    def test_depolarizing_full(self):
        ch = depolarizing_channel(2, 1.0)
        assert [w for w, _ in ch.terms] == [0.25, 0.25, 0.25, 0.25]

    def test_depolarizing_survival_weight(self):
        ch = depolarizing_channel(1, 0.04)
        assert ch.terms[0][0] == pytest.approx(0.97, abs=1e-15)

    def test_depolarizing_range(self):
        with pytest.raises(ValueError):
            depolarizing_channel(1, -0.1)
        with pytest.raises(ValueError):
            depolarizing_channel(1, 1.5)

    def test_dephasing_probability_limits(self):
        assert dephasing_probability(0.0, 1.0) == 0.0
        assert dephasing_probability(1.0, 1.0) == pytest.approx(0.5 * (1 - math.exp(-1)))
        assert dephasing_probability(1e9, 1e-3) == pytest.approx(0.5)
        assert dephasing_probability(math.log(2), 1.0) == pytest.approx(0.25)

    def test_dephasing_probability_errors(self):
        with pytest.raises(ValueError):
            dephasing_probability(-1.0, 1.0)
        with pytest.raises(ValueError):
            dephasing_probability(1.0, 0.0)

    def test_dephasing_channel_terms(self):
        ch = dephasing_channel(3, 0.25)
        assert ch.terms == ((0.75, identity()), (0.25, single(3, "z")))

    def test_channel_normalization_enforced(self):
        with pytest.raises(ValueError):
            PauliChannel(((0.5, identity()),))

    def test_channel_weight_range_enforced(self):
        with pytest.raises(ValueError):
            PauliChannel(((1.5, identity()), (-0.5, single(1, "z"))))

    @given(st.floats(min_value=0, max_value=1), st.floats(min_value=0, max_value=0.5))
    def test_constructed_channels_normalized(self, p, q):
        assert depolarizing_channel(1, p).total_weight() == pytest.approx(1.0, abs=1e-12)
        assert dephasing_channel(1, q).total_weight() == pytest.approx(1.0, abs=1e-12)


class TestNoiseAssignment:
    def test_channels_order_and_content(self):
        na = NoiseAssignment(
            depolarizing={2: 0.1, 1: 0.0},
            memory_time={1: 1.0, 2: 1.0},
            exposure={1: 0.0, 2: 1.0},
        )
        chans = na.channels()
        assert len(chans) == 4
        assert chans[0].terms == ((1.0, identity()),)  # p = 0 on qubit 1
        assert chans[3].terms[1][1] == single(2, "z")

    def test_exposure_without_memory(self):
        with pytest.raises(ValueError):
            NoiseAssignment(exposure={1: 1.0})

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            NoiseAssignment(depolarizing={1: 2.0})
        with pytest.raises(ValueError):
            NoiseAssignment(memory_time={1: 0.0})
        with pytest.raises(ValueError):
            NoiseAssignment(memory_time={1: 1.0}, exposure={1: -1.0})


class TestPropagation:
    def test_dephasing_on_z_measured_qubit_vanishes(self):
        g = chain_graph(3)
        ch = dephasing_channel(2, 0.3)
        out = propagate_channel(ch, [(2, "z")], g)
        assert out.terms == ((1.0, identity()),)

    def test_bit_flip_on_z_measured_qubit_becomes_correlated_phase(self):
        g = chain_graph(3)
        ch = PauliChannel(((0.6, identity()), (0.4, single(2, "x"))))
        out = propagate_channel(ch, [(2, "z")], g)
        images = {op for _, op in out.terms}
        assert images == {identity(), from_axes({1: "z", 3: "z"})}

    def test_identity_channel_stays_identity(self):
        g = chain_graph(5)
        ch = PauliChannel(((1.0, identity()),))
        strategy = [(2, "x"), (3, "y"), (4, "z")]
        out = propagate_channel(ch, strategy, g)
        assert out.terms == ((1.0, identity()),)

    def test_support_outside_graph_rejected(self):
        g = chain_graph(3)
        ch = dephasing_channel(9, 0.1)
        with pytest.raises(ValueError):
            propagate_channel(ch, [(2, "z")], g)

    def test_compiled_strategy_reusable(self):
        g = chain_graph(4)
        compiled = compile_strategy(g, [(2, "x"), (3, "x")])
        a = propagate_channel(dephasing_channel(2, 0.2), compiled)
        b = propagate_channel(dephasing_channel(2, 0.2), [(2, "x"), (3, "x")], g)
        assert a == b

    def test_uncompiled_needs_graph(self):
        with pytest.raises(ValueError):
            propagate_channel(dephasing_channel(1, 0.1), [(2, "z")])

    def test_propagated_operator_lands_on_survivors(self):
        g = chain_graph(5)
        compiled = compile_strategy(g, [(2, "x"), (3, "y"), (4, "x")])
        for v in (2, 3, 4):
            for axis in "xyz":
                image = propagate_operator(single(v, axis), compiled)
                assert image.support_mask & ~compiled.final_graph.vertex_mask == 0

    def test_weights_preserved_through_merge(self):
        g = chain_graph(6)
        compiled = compile_strategy(g, [(2, "x"), (3, "y"), (4, "x"), (5, "y")])
        ch = depolarizing_channel(3, 0.37)
        out = propagate_channel(ch, compiled)
        assert out.total_weight() == pytest.approx(1.0, abs=1e-12)


class TestAssembly:
    def test_no_noise_gives_unit_fidelity(self):
        target = GraphState([1, 2], [(1, 2)])
        assert assemble_fidelity([], target) == 1.0

    def test_half_dephasing_on_one_pair_qubit(self):
        target = GraphState([1, 2], [(1, 2)])
        ch = dephasing_channel(1, 0.5)
        assert assemble_fidelity([ch], target) == pytest.approx(0.5, abs=1e-12)

    def test_full_depolarizing_on_one_pair_qubit(self):
        target = GraphState([1, 2], [(1, 2)])
        ch = depolarizing_channel(2, 1.0)
        assert assemble_fidelity([ch], target) == pytest.approx(0.25, abs=1e-12)

    def test_support_leakage_rejected(self):
        target = GraphState([1, 2], [(1, 2)])
        with pytest.raises(ValueError):
            assemble_fidelity([dephasing_channel(3, 0.1)], target)

    def test_oversized_target_rejected(self):
        target = chain_graph(11)
        with pytest.raises(ValueError):
            assemble_fidelity([], target)

    def test_stabilizer_noise_is_invisible(self):
        # X1 Z2 fixes the pair state, so this channel cannot hurt fidelity
        target = GraphState([1, 2], [(1, 2)])
        ch = PauliChannel(((0.5, identity()), (0.5, from_axes({1: "x", 2: "z"}))))
        assert assemble_fidelity([ch], target) == pytest.approx(1.0, abs=1e-12)


class TestEndToEnd:
    def test_middle_dephasing_through_x_measurement(self):
        # noise Z on the measured middle qubit of a 3-chain turns into an
        # anticommuting image on the pair, so F = 1 - q exactly
        g = chain_graph(3)
        for q in (0.0, 0.1, 0.37, 0.5):
            f = strategy_fidelity(g, [(2, "x")], [dephasing_channel(2, q)])
            assert f == pytest.approx(1 - q, abs=1e-12)

    def test_middle_y_measurement_noiseless(self):
        g = chain_graph(3)
        assert strategy_fidelity(g, [(2, "y")], []) == 1.0

    def test_agrees_with_dense_oracle_on_chain(self):
        g = chain_graph(5)
        strategy = [(2, "x"), (3, "y"), (4, "x")]
        channels = [depolarizing_channel(v, 0.05) for v in range(1, 6)]
        channels += [dephasing_channel(v, 0.02 * v) for v in range(1, 6)]
        fast = strategy_fidelity(g, strategy, channels)
        slow = dense_oracle_fidelity(g, strategy, channels)
        assert fast == pytest.approx(slow, abs=1e-12)

    def test_oracle_refuses_large_graphs(self):
        g = chain_graph(9)
        with pytest.raises(ValueError):
            dense_oracle_fidelity(g, [(2, "x")], [])

    def test_oracle_noiseless_three_chain(self):
        g = chain_graph(3)
        assert dense_oracle_fidelity(g, [(2, "y")], []) == pytest.approx(1.0, abs=1e-12)

    def test_oracle_fully_depolarized_pair(self):
        g = GraphState([1, 2], [(1, 2)])
        channels = [depolarizing_channel(1, 1.0), depolarizing_channel(2, 1.0)]
        assert dense_oracle_fidelity(g, [], channels) == pytest.approx(0.25, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_random_scenarios_match_dense_oracle(self, data):
        n = data.draw(st.integers(min_value=2, max_value=5))
        labels = list(range(1, n + 1))
        edges = [
            e
            for e in itertools.combinations(labels, 2)
            if data.draw(st.booleans(), label=f"edge{e}")
        ]
        g = GraphState(labels, edges)
        k = data.draw(st.integers(min_value=0, max_value=n - 1))
        measured = data.draw(
            st.permutations(labels).map(lambda seq: list(seq)[:k]), label="measured"
        )
        strategy = [
            (v, data.draw(st.sampled_from("xyz"), label=f"basis{v}")) for v in measured
        ]
        channels = []
        for v in labels:
            p = data.draw(st.floats(min_value=0, max_value=1), label=f"p{v}")
            q = data.draw(st.floats(min_value=0, max_value=0.5), label=f"q{v}")
            channels.append(depolarizing_channel(v, p))
            channels.append(dephasing_channel(v, q))
        fast = strategy_fidelity(g, strategy, channels)
        slow = dense_oracle_fidelity(g, strategy, channels)
        assert fast == pytest.approx(slow, abs=1e-9)
        assert 0 <= fast <= 1 + 1e-12


class TestModelSeparation:
    def test_depolarizing_only_ignores_memory_numbers(self):
        g = chain_graph(4)
        strategy = [(2, "x"), (3, "y")]
        base = {v: 0.03 for v in range(1, 5)}
        a = NoiseAssignment(depolarizing=base, memory_time={1: 1.0}, exposure={})
        b = NoiseAssignment(depolarizing=base, memory_time={1: 1e-6}, exposure={})
        fa = strategy_fidelity(g, strategy, a.channels())
        fb = strategy_fidelity(g, strategy, b.channels())
        assert fa == fb

    def test_dephasing_only_scales_with_ratio(self):
        # equal t/T ratios give equal dephasing, regardless of absolute scale
        g = chain_graph(4)
        strategy = [(2, "x"), (3, "y")]
        times = {v: 1.0 for v in range(1, 5)}
        a = NoiseAssignment(memory_time=times, exposure={v: 0.25 for v in range(1, 5)})
        scaled = NoiseAssignment(
            memory_time={v: 4.0 for v in range(1, 5)},
            exposure={v: 1.0 for v in range(1, 5)},
        )
        fa = strategy_fidelity(g, strategy, a.channels())
        fb = strategy_fidelity(g, strategy, scaled.channels())
        assert fa == pytest.approx(fb, abs=1e-15)
