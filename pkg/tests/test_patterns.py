"""Strategy/pattern translation, enumeration, and exhaustive optimization."""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from gsnet.graphstate import GraphState, chain_graph
from gsnet.noise import (
    dephasing_channel,
    depolarizing_channel,
    strategy_fidelity,
)
from gsnet.patterns import (
    MeasurementPattern,
    OptimizationResult,
    Strategy,
    all_x_pattern,
    best_patterns,
    dephasing_candidate_pattern,
    enumerate_patterns,
    evaluate_pattern,
    pattern_from_string,
    pattern_string,
    pattern_to_strategy,
    strategy_to_pattern,
)


def uniform_channels(n, p=0.05, q=0.1):
    out = []
    for v in range(1, n + 1):
        out.append(depolarizing_channel(v, p))
        out.append(dephasing_channel(v, q))
    return tuple(out)


class TestContainers:
    def test_pattern_sorts_and_looks_up(self):
        p = MeasurementPattern({3: "y", 2: "x"})
        assert p.vertices == (2, 3)
        assert p.basis_of(3) == "y"
        with pytest.raises(KeyError):
            p.basis_of(7)

    def test_pattern_rejects_bad_basis(self):
        with pytest.raises(ValueError):
            MeasurementPattern({2: "q"})

    def test_strategy_pairs_and_triples(self):
        s = Strategy([(2, "y"), (3, "x", 4)])
        assert s.steps == ((2, "y", None), (3, "x", 4))
        assert s.vertices == (2, 3)

    def test_strategy_rejects_duplicates_and_bad_basis(self):
        with pytest.raises(ValueError):
            Strategy([(2, "x"), (2, "y")])
        with pytest.raises(ValueError):
            Strategy([(2, "w")])

    def test_string_round_trip(self):
        p = pattern_from_string("xyz")
        assert p.as_dict() == {2: "x", 3: "y", 4: "z"}
        assert pattern_string(p) == "xyz"
        q = pattern_from_string("yx", first_vertex=5)
        assert q.as_dict() == {5: "y", 6: "x"}


class TestTranslationExamples:
    def test_double_y_on_four_chain(self):
        # Two sequential y measurements look like y then x when fired at once:
        # the first correction rewrites the second qubit's basis.
        g = chain_graph(4)
        strat = Strategy([(2, "y"), (3, "y")])
        assert strategy_to_pattern(strat, g).as_dict() == {2: "y", 3: "x"}

    def test_double_y_inverse(self):
        g = chain_graph(4)
        p = MeasurementPattern({2: "y", 3: "x"})
        s = pattern_to_strategy(p, g)
        assert s.steps == ((2, "y", None), (3, "y", None))

    def test_all_x_records_default_special_neighbors(self):
        g = chain_graph(4)
        s = pattern_to_strategy(all_x_pattern(4), g)
        assert s.steps == ((2, "x", 1), (3, "x", 1))

    def test_nondefault_special_neighbor_rewrites_later_z(self):
        g = chain_graph(4)
        strat = Strategy([(2, "x", 3), (3, "z")])
        assert strategy_to_pattern(strat, g).as_dict() == {2: "x", 3: "x"}

    def test_z_steps_never_rewrite(self):
        g = chain_graph(5)
        strat = Strategy([(2, "z"), (3, "y"), (4, "y")])
        p = strategy_to_pattern(strat, g)
        assert p.basis_of(2) == "z"

    def test_rejects_missing_vertex(self):
        g = chain_graph(3)
        with pytest.raises(ValueError):
            strategy_to_pattern(Strategy([(9, "x")]), g)

    def test_rejects_w0_not_adjacent(self):
        g = chain_graph(4)
        with pytest.raises(ValueError):
            strategy_to_pattern(Strategy([(2, "x", 4)]), g)

    def test_rejects_w0_on_non_x(self):
        g = chain_graph(4)
        with pytest.raises(ValueError):
            strategy_to_pattern(Strategy([(2, "y", 1)]), g)

    def test_inverse_rejects_bad_order_and_vertices(self):
        g = chain_graph(4)
        p = MeasurementPattern({2: "x", 3: "y"})
        with pytest.raises(ValueError):
            pattern_to_strategy(p, g, order=[2])
        with pytest.raises(ValueError):
            pattern_to_strategy(p, g, order=[2, 3, 4])
        with pytest.raises(ValueError):
            pattern_to_strategy(MeasurementPattern({9: "x"}), g)


class TestRoundTrips:
    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_every_xy_pattern_survives_ascending_round_trip(self, n):
        g = chain_graph(n)
        for p in enumerate_patterns(n):
            s = pattern_to_strategy(p, g)
            assert strategy_to_pattern(s, g).as_dict() == p.as_dict()

    @pytest.mark.parametrize("n", [4, 5])
    def test_patterns_with_z_survive_round_trip(self, n):
        g = chain_graph(n)
        inner = range(2, n)
        for bases in itertools.product("xyz", repeat=n - 2):
            p = MeasurementPattern(dict(zip(inner, bases)))
            s = pattern_to_strategy(p, g)
            assert strategy_to_pattern(s, g).as_dict() == p.as_dict()

    @given(
        n=st.integers(3, 7),
        data=st.data(),
    )
    @settings(max_examples=60, deadline=None)
    def test_round_trip_in_any_order(self, n, data):
        g = chain_graph(n)
        inner = list(range(2, n))
        bases = data.draw(
            st.lists(st.sampled_from("xyz"), min_size=n - 2, max_size=n - 2)
        )
        order = data.draw(st.permutations(inner))
        p = MeasurementPattern(dict(zip(inner, bases)))
        s = pattern_to_strategy(p, g, order=order)
        assert s.vertices == tuple(order)
        assert strategy_to_pattern(s, g).as_dict() == p.as_dict()

    def test_strategy_round_trip_with_default_neighbors(self):
        g = chain_graph(6)
        strat = pattern_to_strategy(pattern_from_string("xyxy"), g)
        p = strategy_to_pattern(strat, g)
        again = pattern_to_strategy(p, g)
        assert again.steps == strat.steps


class TestOrderInvariance:
    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_fidelity_ignores_measurement_order(self, data):
        n = data.draw(st.integers(4, 6))
        g = chain_graph(n)
        inner = list(range(2, n))
        bases = data.draw(
            st.lists(st.sampled_from("xy"), min_size=n - 2, max_size=n - 2)
        )
        order = data.draw(st.permutations(inner))
        channels = []
        for v in data.draw(st.lists(st.integers(1, n), min_size=1, max_size=3)):
            channels.append(
                depolarizing_channel(v, data.draw(st.floats(0.0, 0.3)))
            )
        channels.append(
            dephasing_channel(
                data.draw(st.integers(1, n)), data.draw(st.floats(0.0, 0.5))
            )
        )
        p = MeasurementPattern(dict(zip(inner, bases)))
        f_sorted = evaluate_pattern(g, p, channels)
        f_shuffled = evaluate_pattern(g, p, channels, order=order)
        assert f_shuffled == pytest.approx(f_sorted, abs=1e-12)

    @given(data=st.data())
    @settings(max_examples=40, deadline=None)
    def test_translated_pattern_matches_strategy_fidelity(self, data):
        # Translation absorbs every correction, including the one attached to
        # an arbitrary special-neighbor choice, so firing the pattern all at
        # once in ascending order reproduces the strategy's fidelity exactly.
        from gsnet.graphstate import measure_update

        n = data.draw(st.integers(4, 6))
        g = chain_graph(n)
        order = data.draw(st.permutations(list(range(2, n))))
        gg = g
        steps = []
        for v in order:
            basis = data.draw(st.sampled_from("xyz"))
            w0 = None
            if basis == "x":
                nbrs = gg.neighbors(v)
                if nbrs:
                    w0 = data.draw(st.sampled_from(list(nbrs)))
            steps.append((v, basis, w0))
            gg = measure_update(gg, v, basis, w0=w0)
        channels = [
            depolarizing_channel(data.draw(st.integers(1, n)), data.draw(st.floats(0.0, 0.3))),
            dephasing_channel(data.draw(st.integers(1, n)), data.draw(st.floats(0.0, 0.5))),
        ]
        strat = Strategy(steps)
        f_strategy = strategy_fidelity(g, strat, channels)
        translated = strategy_to_pattern(strat, g)
        f_pattern = evaluate_pattern(g, translated, channels)
        assert f_pattern == pytest.approx(f_strategy, abs=1e-12)


class TestEnumeration:
    def test_counts_and_order(self):
        pats = enumerate_patterns(4)
        assert [pattern_string(p) for p in pats] == ["xx", "xy", "yx", "yy"]
        assert len(enumerate_patterns(8)) == 64

    def test_three_chain_has_two_patterns(self):
        assert [pattern_string(p) for p in enumerate_patterns(3)] == ["x", "y"]

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            enumerate_patterns(2)

    def test_all_x(self):
        assert pattern_string(all_x_pattern(6)) == "xxxx"


class TestCandidatePatterns:
    def test_local_puts_y_on_first_two_inner(self):
        assert pattern_string(dephasing_candidate_pattern(6, "local")) == "yyxx"
        assert pattern_string(dephasing_candidate_pattern(3, "local")) == "y"
        assert pattern_string(dephasing_candidate_pattern(4, "local")) == "yy"

    def test_central_puts_y_around_middle(self):
        assert pattern_string(dephasing_candidate_pattern(6, "central")) == "yyyx"
        assert pattern_string(dephasing_candidate_pattern(8, "central")) == "xyyyxx"
        assert pattern_string(dephasing_candidate_pattern(7, "central")) == "xyyxx"

    def test_unknown_protocol(self):
        with pytest.raises(ValueError):
            dephasing_candidate_pattern(5, "hybrid")


class TestBestPatterns:
    def test_noiseless_everything_ties_at_one(self):
        g = chain_graph(5)
        result = best_patterns(g, {}, [2, 3, 4], ())
        assert result.fidelity == pytest.approx(1.0, abs=1e-12)
        assert len(result.patterns) == 8
        assert pattern_string(result.canonical) == "xxx"

    def test_reports_true_maximum_and_consistent_ties(self):
        g = chain_graph(5)
        channels = uniform_channels(5, p=0.08, q=0.2)
        result = best_patterns(g, {}, [2, 3, 4], channels)
        scores = {
            pattern_string(p): evaluate_pattern(g, p, channels)
            for p in enumerate_patterns(5)
        }
        assert result.fidelity == pytest.approx(max(scores.values()), abs=1e-15)
        for p in result.patterns:
            assert scores[pattern_string(p)] >= result.fidelity - 1e-12
        assert isinstance(result, OptimizationResult)

    def test_mirror_symmetric_noise_gives_mirror_symmetric_scores(self):
        g = chain_graph(5)
        channels = uniform_channels(5)
        for p in enumerate_patterns(5):
            mirrored = pattern_from_string(pattern_string(p)[::-1])
            assert evaluate_pattern(g, mirrored, channels) == pytest.approx(
                evaluate_pattern(g, p, channels), abs=1e-12
            )
        ties = best_patterns(g, {}, [2, 3, 4], channels).patterns
        tie_strings = {pattern_string(p) for p in ties}
        assert {s[::-1] for s in tie_strings} == tie_strings

    def test_fixed_z_cut_keeps_interior_request_perfect(self):
        # Request between 2 and 4 on a 5-chain: ends are cut with z.
        g = chain_graph(5)
        result = best_patterns(g, {1: "z", 5: "z"}, [3], ())
        assert result.fidelity == pytest.approx(1.0, abs=1e-12)

    def test_adjacent_targets_leave_empty_pattern(self):
        # Hop-1 requests have nothing to optimize but are still answerable.
        g = chain_graph(4)
        result = best_patterns(g, {1: "z", 4: "z"}, [], ())
        assert result.patterns == (MeasurementPattern({}),)
        assert result.fidelity == pytest.approx(1.0, abs=1e-12)
        assert pattern_string(result.canonical) == ""
