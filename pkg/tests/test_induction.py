"""Concept induction: covers, hypothesis spaces, query episodes, finalization."""

from __future__ import annotations

import pytest

from blocksmith.concepts import Const, Param, ParamMinus1
from blocksmith.induction import (
    ConceptHypothesis,
    InductionEpisode,
    PartHypothesis,
    TrainingInstance,
    TooLargeError,
    YesNoQuery,
    connected,
    decompose,
    finalize,
    generalize,
    hypothesis_extent,
    query_text,
)
from blocksmith.world import Color, Position

L_CELLS = {
    Position(0, 0, 0): Color.RED,
    Position(0, 1, 0): Color.RED,
    Position(0, 2, 0): Color.RED,
    Position(1, 0, 0): Color.RED,
    Position(2, 0, 0): Color.RED,
}


def l_instance(height=3, width=3):
    return TrainingInstance.from_cells("l", L_CELLS, (("height", height),
                                                      ("width", width)))


class TestDecompose:
    def test_l_shape_two_minimal_covers(self):
        covers = decompose(L_CELLS)
        summaries = [
            tuple((p.kind, p.dims, tuple(p.anchor)) for p in cover)
            for cover in covers
        ]
        assert summaries == [
            (("tower", (3,), (0, 0, 0)), ("row", (2,), (1, 0, 0))),
            (("tower", (2,), (0, 1, 0)), ("row", (3,), (0, 0, 0))),
        ]

    def test_single_block(self):
        covers = decompose({Position(0, 0, 0)})
        assert len(covers) == 1
        assert [(p.kind, p.dims) for p in covers[0]] == [("block", ())]

    def test_square_beats_two_part_covers(self):
        cells = {Position(x, y, 0) for x in range(2) for y in range(2)}
        covers = decompose(cells)
        assert all(len(cover) == 1 for cover in covers)
        assert covers[0][0].kind == "square"
        assert covers[0][0].dims == (2,)

    def test_colors_split_parts(self):
        cells = {Position(0, 0, 0): Color.RED, Position(1, 0, 0): Color.RED,
                 Position(2, 0, 0): Color.BLUE}
        covers = decompose(cells)
        assert len(covers) == 1
        kinds = [(p.kind, p.color) for p in covers[0]]
        assert ("block", Color.BLUE) in kinds
        assert ("row", Color.RED) in kinds

    def test_too_large(self):
        cells = {Position(x, 0, z) for x in range(15) for z in range(15)}
        with pytest.raises(TooLargeError):
            decompose(cells)

    def test_canonical_kind_precedence(self):
        # a 1x3x1 box is a tower, never a rectangle or cuboid
        covers = decompose({Position(0, y, 0) for y in range(3)})
        assert covers[0][0].kind == "tower"


class TestGeneralize:
    def test_l_survivors_include_both_decompositions(self):
        instance = l_instance()
        survivors = generalize(decompose(L_CELLS), instance)
        shapes = {
            tuple((p.kind, p.dims, p.offset) for p in h.parts)
            for h in survivors
        }
        zero = (Const(0), Const(0), Const(0))
        tall = (("tower", (Param("height"),), zero),
                ("row", (ParamMinus1("width"),), (Const(1), Const(0), Const(0))))
        short = (("tower", (ParamMinus1("height"),), (Const(0), Const(1), Const(0))),
                 ("row", (Param("width"),), zero))
        assert tall in shapes
        assert short in shapes

    def test_tower_consistency_at_training_valuation(self):
        cells = {Position(0, y, 0): Color.RED for y in range(3)}
        instance = TrainingInstance.from_cells("spire", cells, (("height", 3),))
        survivors = generalize(decompose(cells), instance)
        dim_exprs = {h.parts[0].dims[0] for h in survivors if len(h.parts) == 1}
        assert Param("height") in dim_exprs
        assert Const(3) in dim_exprs
        assert ParamMinus1("height") not in dim_exprs  # evaluates to 2, not 3

    def test_block_constant_and_parameter_both_survive(self):
        cells = {Position(0, 0, 0): Color.RED}
        instance = TrainingInstance.from_cells("dot", cells, (("size", 1),))
        survivors = generalize(decompose(cells), instance)
        assert len(survivors) > 1
        offsets = {h.parts[0].offset for h in survivors}
        all_const = (Const(0), Const(0), Const(0))
        assert all_const in offsets
        assert any(ParamMinus1("size") in offset for offset in offsets)

    def test_pruning_rejects_overlap_and_disconnection(self):
        # a hypothesis whose parts drift apart at larger valuations must die
        bad = ConceptHypothesis((
            PartHypothesis("block", (), (Const(0), Const(0), Const(0))),
            PartHypothesis("block", (), (Param("size"), Const(0), Const(0))),
        ))
        assert hypothesis_extent(bad, {"size": 2}) is None  # gap -> disconnected
        overlapping = ConceptHypothesis((
            PartHypothesis("row", (Param("size"),), (Const(0), Const(0), Const(0))),
            PartHypothesis("block", (), (Const(0), Const(0), Const(0))),
        ))
        assert hypothesis_extent(overlapping, {"size": 2}) is None

    def test_preference_order_param_before_const(self):
        cells = {Position(0, y, 0): Color.RED for y in range(3)}
        instance = TrainingInstance.from_cells("spire", cells, (("height", 3),))
        survivors = generalize(decompose(cells), instance)
        first = survivors[0]
        assert first.parts[0].dims == (Param("height"),)

    def test_two_color_instance_keeps_part_colors(self):
        cells = {Position(0, 0, 0): Color.RED, Position(0, 1, 0): Color.BLUE}
        instance = TrainingInstance.from_cells("duo", cells, (("height", 2),))
        survivors = generalize(decompose(cells), instance)
        for h in survivors:
            colors = {p.color for p in h.parts}
            assert colors == {Color.RED, Color.BLUE}

    def test_monochrome_instance_inherits_color(self):
        survivors = generalize(decompose(L_CELLS), l_instance())
        assert all(p.color is None for h in survivors for p in h.parts)


class TestTrainingInstance:
    def test_disconnected_rejected(self):
        cells = {Position(0, 0, 0): Color.RED, Position(5, 0, 5): Color.RED}
        with pytest.raises(Exception):
            TrainingInstance.from_cells("x", cells, (("size", 1),))

    def test_connected_helper(self):
        assert connected([Position(0, 0, 0), Position(0, 1, 0)])
        assert not connected([Position(0, 0, 0), Position(2, 0, 0)])
        assert not connected([])


class TestQueries:
    def _tower_live(self):
        return [
            ConceptHypothesis((PartHypothesis(
                "tower", (Param("height"),), (Const(0), Const(0), Const(0))),)),
            ConceptHypothesis((PartHypothesis(
                "tower", (Const(3),), (Const(0), Const(0), Const(0))),)),
        ]

    def _instance(self):
        cells = {Position(0, y, 0): Color.RED for y in range(3)}
        return TrainingInstance.from_cells("spire", cells, (("height", 3),))

    def test_first_distinguishing_valuation_and_text(self):
        episode = InductionEpisode(self._instance(), self._tower_live())
        query = episode.next_query()
        assert dict(query.valuation) == {"height": 2}
        assert query.text == "If its height were 2, would it contain exactly 2 blocks?"
        assert query.expected_count == 2

    def test_no_query_for_singleton(self):
        episode = InductionEpisode(self._instance(), self._tower_live()[:1])
        assert episode.next_query() is None

    def test_yes_keeps_agreeing_no_keeps_disagreeing(self):
        episode = InductionEpisode(self._instance(), self._tower_live())
        query = episode.next_query()
        episode.update(query, True)
        assert episode.live == [self._tower_live()[0]]

        episode = InductionEpisode(self._instance(), self._tower_live())
        query = episode.next_query()
        episode.update(query, False)
        assert episode.live == [self._tower_live()[1]]

    def test_equal_count_valuations_are_skipped(self):
        # the two L generalizations predict equal counts wherever both are
        # defined; the only separating valuation has height 1
        instance = l_instance()
        zero = (Const(0), Const(0), Const(0))
        live = [
            ConceptHypothesis((
                PartHypothesis("tower", (Param("height"),), zero),
                PartHypothesis("row", (ParamMinus1("width"),),
                               (Const(1), Const(0), Const(0))),
            )),
            ConceptHypothesis((
                PartHypothesis("tower", (ParamMinus1("height"),),
                               (Const(0), Const(1), Const(0))),
                PartHypothesis("row", (Param("width"),), zero),
            )),
        ]
        episode = InductionEpisode(instance, live)
        query = episode.next_query()
        assert dict(query.valuation)["height"] == 1

    def test_contradictory_answer_falls_back_to_full_set(self):
        episode = InductionEpisode(self._instance(), self._tower_live())
        live_before = list(episode.live)
        stale = YesNoQuery(valuation=(("height", 5),),
                           text=query_text((("height", 5),), 9),
                           expected_count=9, agree=(), disagree=())
        assert episode.update(stale, True) is False
        assert episode.live == live_before
        assert episode.contradictions == 1

    def test_budget_never_exceeded(self):
        episode = InductionEpisode(self._instance(), self._tower_live(), max_queries=0)
        assert episode.next_query() is None

    def test_version_space_strictly_shrinks(self):
        instance = l_instance()
        episode = InductionEpisode(instance, generalize(decompose(L_CELLS), instance))
        while True:
            query = episode.next_query()
            if query is None:
                break
            before = len(episode.live)
            episode.update(query, len(query.agree) >= len(query.disagree))
            assert len(episode.live) < before
        assert episode.queries_asked <= 5


class TestFinalize:
    def test_l_clause_matches_expected_shape(self):
        instance = l_instance()
        zero = (Const(0), Const(0), Const(0))
        chosen = ConceptHypothesis((
            PartHypothesis("tower", (Param("height"),), zero),
            PartHypothesis("row", (ParamMinus1("width"),),
                           (Const(1), Const(0), Const(0))),
        ))
        definition = finalize(chosen, instance)
        assert definition.clause_text == (
            "l(C, H, W) :- tower(C, H, 0, 0, 0), row(C, W - 1, 1, 0, 0)")
        assert definition.explanation.startswith("IF ")
        assert definition.explanation.endswith("THEN this is a l")
        assert definition.schema().params == ("height", "width")

    def test_single_part_alias_gets_one_atom_clause(self):
        cells = {Position(0, y, 0): Color.RED for y in range(3)}
        instance = TrainingInstance.from_cells("spire", cells, (("height", 3),))
        chosen = ConceptHypothesis((PartHypothesis(
            "tower", (Param("height"),), (Const(0), Const(0), Const(0))),))
        definition = finalize(chosen, instance)
        assert len(definition.clause.body) == 1

    def test_two_color_parts_fix_their_colors(self):
        cells = {Position(0, 0, 0): Color.RED, Position(0, 1, 0): Color.BLUE}
        instance = TrainingInstance.from_cells("duo", cells, (("height", 2),))
        chosen = generalize(decompose(cells), instance)[0]
        definition = finalize(chosen, instance)
        part_colors = {p.color for p in definition.parts}
        assert part_colors == {Color.RED, Color.BLUE}
        assert "red" in definition.clause_text and "blue" in definition.clause_text
