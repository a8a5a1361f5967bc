"""Scenario harness and the oracle architect."""

from __future__ import annotations

import pytest

from blocksmith.concepts import ConceptPart, Const, Param, build_definition
from blocksmith.scripts import (
    ArchitectSays,
    ExpectBuilderSays,
    ExpectRepositoryHas,
    ExpectWorldEquals,
    OracleArchitect,
    ScenarioError,
    StepFailed,
    UnanswerableQuestion,
    bundled_scenario,
    parse_scenario,
    run_script,
)
from blocksmith.service import BuilderService
from blocksmith.world import Color, Position


def tower_definition(height_expr):
    return build_definition("spire", ("height",), (
        ConceptPart("tower", (height_expr,), (Const(0), Const(0), Const(0))),
    ))


class TestScenarioParsing:
    def test_directives(self):
        steps = parse_scenario(
            "# comment\n"
            "architect: build a red tower\n"
            "expect-says: tall\n"
            "expect-world: 1 0 1 red; 2 0 1 blue\n"
            "expect-world-empty\n"
            "expect-repo: l\n"
        )
        assert steps[0] == ArchitectSays("build a red tower")
        assert steps[1] == ExpectBuilderSays("tall")
        assert steps[2] == ExpectWorldEquals(frozenset({
            (Position(1, 0, 1), Color.RED), (Position(2, 0, 1), Color.BLUE)}))
        assert steps[3] == ExpectWorldEquals(frozenset())
        assert steps[4] == ExpectRepositoryHas("l")

    def test_unknown_directive(self):
        with pytest.raises(ScenarioError):
            parse_scenario("teleport: somewhere\n")


class TestBundledScenarios:
    def test_fig1_passes(self):
        result = run_script(bundled_scenario("fig1.scenario"))
        assert result.passed, result.failure

    def test_learn_l_passes(self):
        result = run_script(bundled_scenario("learn_l.scenario"))
        assert result.passed, result.failure

    def test_wrong_expectation_fails_with_diff(self):
        steps = parse_scenario(
            "architect: build a red tower\n"
            "architect: 2\n"
            "expect-world: 0 0 0 red\n"
        )
        result = run_script(steps)
        assert not result.passed
        assert isinstance(result.failure, StepFailed)
        assert result.failure.index == 2
        assert "missing=" in result.failure.actual and "extra=" in result.failure.actual

    def test_missing_reply_fails(self):
        steps = parse_scenario("architect: hello\nexpect-says: impossible marker\n")
        result = run_script(steps)
        assert not result.passed

    @pytest.mark.parametrize("name", ["fig1.scenario", "learn_l.scenario"])
    def test_deterministic_across_ten_runs(self, name):
        transcripts = []
        for _ in range(10):
            result = run_script(bundled_scenario(name))
            assert result.passed
            transcripts.append(tuple(result.transcript))
        assert len(set(transcripts)) == 1

    def test_script_runs_against_supplied_service(self, tmp_path):
        service = BuilderService(repo_file=tmp_path / "repo.json")
        result = run_script(bundled_scenario("learn_l.scenario"), service=service)
        assert result.passed
        assert "l" in service.repo


class TestOracleArchitect:
    def test_answers_count_query_from_parameterized_truth(self):
        oracle = OracleArchitect(tower_definition(Param("height")), {"height": 3})
        answer = oracle.respond(
            "If its height were 2, would it contain exactly 2 blocks?")
        assert answer == "yes"

    def test_constant_truth_answers_no(self):
        oracle = OracleArchitect(tower_definition(Const(3)), {"height": 3})
        answer = oracle.respond(
            "If its height were 2, would it contain exactly 2 blocks?")
        assert answer == "no"

    def test_undefined_valuation_answers_no(self):
        defn = build_definition("thin", ("width",), (
            ConceptPart("row", (Param("width"),), (Const(0), Const(0), Const(0))),
            ConceptPart("block", (), (Const(0), Const(1), Const(0))),
        ))
        oracle = OracleArchitect(defn, {"width": 2})
        # width 0 is not buildable, so no count can be exactly right
        assert oracle.respond(
            "If its width were 0, would it contain exactly 1 block?") == "no"

    def test_malformed_question_raises(self):
        oracle = OracleArchitect(tower_definition(Param("height")), {"height": 3})
        with pytest.raises(UnanswerableQuestion):
            oracle.respond("Would you kindly describe your feelings?")

    def test_save_name_dims_flow_answers(self):
        oracle = OracleArchitect(tower_definition(Param("height")), {"height": 3})
        assert oracle.respond("Do you want me to remember this structure for later?") == "yes"
        assert oracle.respond("Great. What should we call it?") == "call it spire"
        assert oracle.respond("Okay. Describe its dimensions for me, for example: "
                              "its height is 3 and its width is 2.") == "its height is 3"
