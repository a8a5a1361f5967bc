"""Scripted scenarios and the oracle architect used for end-to-end verification."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .concepts import ConceptDefinition
from .induction import parts_extent
from .service import BuilderService
from .world import Color, Position


class ScenarioError(Exception):
    pass


class StepFailed(ScenarioError):
    def __init__(self, index: int, expected: str, actual: str):
        super().__init__(f"step {index}: expected {expected}\n  actual: {actual}")
        self.index = index
        self.expected = expected
        self.actual = actual


class UnanswerableQuestion(ScenarioError):
    def __init__(self, question: str):
        super().__init__(f"the oracle cannot answer: {question!r}")
        self.question = question


# --- scenario scripts -------------------------------------------------------------

@dataclass(frozen=True)
class ArchitectSays:
    text: str


@dataclass(frozen=True)
class ExpectBuilderSays:
    substring: str


@dataclass(frozen=True)
class ExpectWorldEquals:
    blocks: frozenset[tuple[Position, Color]]


@dataclass(frozen=True)
class ExpectRepositoryHas:
    name: str


ScenarioStep = Union[ArchitectSays, ExpectBuilderSays, ExpectWorldEquals,
                     ExpectRepositoryHas]


def parse_scenario(text: str) -> list[ScenarioStep]:
    steps: list[ScenarioStep] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive, _, value = line.partition(":")
        directive = directive.strip()
        value = value.strip()
        if directive == "architect":
            steps.append(ArchitectSays(value))
        elif directive == "expect-says":
            steps.append(ExpectBuilderSays(value))
        elif directive == "expect-world":
            steps.append(ExpectWorldEquals(_parse_blocks(value)))
        elif directive == "expect-world-empty":
            steps.append(ExpectWorldEquals(frozenset()))
        elif directive == "expect-repo":
            steps.append(ExpectRepositoryHas(value))
        else:
            raise ScenarioError(f"line {line_no}: unknown directive {directive!r}")
    return steps


def _parse_blocks(value: str) -> frozenset[tuple[Position, Color]]:
    blocks = set()
    for chunk in value.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        x, y, z, color = chunk.split()
        blocks.add((Position(int(x), int(y), int(z)), Color(color)))
    return frozenset(blocks)


def load_scenario(path: str | Path) -> list[ScenarioStep]:
    return parse_scenario(Path(path).read_text())


def bundled_scenario(name: str) -> list[ScenarioStep]:
    text = resources.files("blocksmith").joinpath(f"data/scenarios/{name}").read_text()
    return parse_scenario(text)


@dataclass
class ScriptResult:
    passed: bool
    transcript: list[str]
    failure: Optional[StepFailed] = None


def run_script(steps: list[ScenarioStep], service: Optional[BuilderService] = None,
               repo_file: Optional[str | Path] = None) -> ScriptResult:
    """Execute a scenario on a fresh session; deterministic for fixed inputs."""
    if service is None:
        service = BuilderService(repo_file=repo_file)
    session = service.create_session()
    transcript: list[str] = [f"builder: {e['text']}"
                             for e in session.events.since(0) if e["type"] == "say"]
    last_replies: list[str] = transcript[:]

    for index, step in enumerate(steps):
        if isinstance(step, ArchitectSays):
            transcript.append(f"architect: {step.text}")
            result = session.post_message(step.text)
            last_replies = result["replies"]
            transcript.extend(f"builder: {r}" for r in last_replies)
        elif isinstance(step, ExpectBuilderSays):
            if not any(step.substring.lower() in reply.lower()
                       for reply in last_replies):
                failure = StepFailed(index, f"a builder reply containing {step.substring!r}",
                                     " | ".join(last_replies) or "(no replies)")
                return ScriptResult(False, transcript, failure)
        elif isinstance(step, ExpectWorldEquals):
            actual = frozenset(session.world.snapshot())
            if actual != step.blocks:
                missing = step.blocks - actual
                extra = actual - step.blocks
                diff = (f"missing={sorted((tuple(p), c.value) for p, c in missing)} "
                        f"extra={sorted((tuple(p), c.value) for p, c in extra)}")
                failure = StepFailed(index, "an exact world snapshot", diff)
                return ScriptResult(False, transcript, failure)
        elif isinstance(step, ExpectRepositoryHas):
            if step.name not in service.repo:
                failure = StepFailed(index, f"repository kind {step.name!r}",
                                     str(list(service.repo.kinds())))
                return ScriptResult(False, transcript, failure)
    return ScriptResult(True, transcript)


# --- oracle architect ----------------------------------------------------------------

_QUERY_RE = re.compile(r"^if its (.+), would it contain exactly (\d+) blocks?",
                       re.IGNORECASE)
_PAIR_RE = re.compile(r"(\w+) were (\d+)")


def definition_extent(definition: ConceptDefinition, valuation: dict[str, int],
                      repo=None) -> Optional[frozenset[Position]]:
    """Cell set of a definition at a valuation; None where it is inadmissible."""
    return parts_extent(definition.parts, valuation, repo)


class OracleArchitect:
    """Answers the builder's questions from a ground-truth definition.

    Used to automate the human side in the induction test suite; it only
    understands the builder's own question templates, so any drift in those
    templates shows up as UnanswerableQuestion.
    """

    def __init__(self, definition: ConceptDefinition,
                 training_valuation: dict[str, int],
                 color: Color = Color.RED):
        self.definition = definition
        self.training = dict(training_valuation)
        self.color = color

    def respond(self, question: str) -> str:
        text = question.strip()
        lowered = text.lower()
        if "remember this structure" in lowered:
            return "yes"
        if "what should we call it" in lowered:
            return f"call it {self.definition.name}"
        if "describe its dimensions" in lowered:
            decl = " and ".join(f"its {p} is {v}" for p, v in self.training.items())
            return decl
        match = _QUERY_RE.match(lowered)
        if match:
            pairs = _PAIR_RE.findall(match.group(1))
            if not pairs:
                raise UnanswerableQuestion(question)
            valuation = {name: int(value) for name, value in pairs}
            expected = int(match.group(2))
            cells = definition_extent(self.definition, valuation)
            return "yes" if cells is not None and len(cells) == expected else "no"
        if "what color" in lowered:
            return self.color.value
        size_match = re.search(r"what should the (\w+) of", lowered)
        if size_match and size_match.group(1) in self.training:
            return str(self.training[size_match.group(1)])
        if "what size" in lowered:
            # single-dimension clarification; answer with the first declared value
            return str(next(iter(self.training.values())))
        raise UnanswerableQuestion(question)
