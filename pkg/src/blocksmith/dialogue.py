"""Finite-state dialogue orchestration: triage, clarify, build, save, learn.

Every architect message yields at least one Say effect and at most one builder
question; failures never escape as exceptions, they become polite replies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import ClassVar, Optional, Union

from . import induction
from .forms import (
    InstructionForm,
    Task,
    check_completeness,
    fill_slot,
    to_htn_task,
)
from .induction import InductionEpisode, TrainingInstance, YesNoQuery
from .parser import (
    PARAM_WORDS,
    BuildInstruction,
    DimensionDeclaration,
    Greeting,
    NameDeclaration,
    ParseContext,
    SaveAccept,
    SaveDecline,
    SlotAnswer,
    UndoCommand,
    Unknown,
    YesNoAnswer,
    parse,
)
from .planner import (
    InstanceRegistry,
    NoRoomError,
    PlanFailure,
    Repository,
    UnknownReferenceError,
    execute,
    plan,
    resolve_placement,
)
from .world import COLOR_NAMES, Color, NothingToUndoError, Place, Position, World


def load_replies() -> dict[str, str]:
    text = resources.files("blocksmith").joinpath("data/replies.json").read_text()
    return json.loads(text)


REPLIES = load_replies()

RESERVED_NAMES = set(COLOR_NAMES) | set(PARAM_WORDS) | {
    "undo", "yes", "no", "it", "that", "this", "build", "make", "place",
}


class DialogueError(Exception):
    pass


# --- effects -------------------------------------------------------------------

@dataclass(frozen=True)
class Say:
    text: str


@dataclass(frozen=True)
class WorldChanged:
    placed: tuple[tuple[Position, Color], ...]
    removed: tuple[tuple[Position, Color], ...]


@dataclass(frozen=True)
class RepositoryChanged:
    name: str


@dataclass(frozen=True)
class StateChanged:
    state: str


Effect = Union[Say, WorldChanged, RepositoryChanged, StateChanged]


# --- dialogue states --------------------------------------------------------------

@dataclass
class AwaitingInstruction:
    tag: ClassVar[str] = "awaiting-instruction"


@dataclass
class AwaitingSlot:
    form: InstructionForm
    missing: tuple[str, ...]
    tag: ClassVar[str] = "awaiting-slot"


@dataclass
class OfferingSave:
    cells: dict[Position, Color]
    tag: ClassVar[str] = "offering-save"


@dataclass
class AwaitingName:
    cells: dict[Position, Color]
    tag: ClassVar[str] = "awaiting-name"


@dataclass
class AwaitingDims:
    name: str
    cells: dict[Position, Color]
    tag: ClassVar[str] = "awaiting-dims"


@dataclass
class AwaitingQueryAnswer:
    episode: InductionEpisode
    query: YesNoQuery
    tag: ClassVar[str] = "awaiting-query-answer"


@dataclass
class SessionEnded:
    tag: ClassVar[str] = "session-ended"


DialogueState = Union[
    AwaitingInstruction, AwaitingSlot, OfferingSave, AwaitingName,
    AwaitingDims, AwaitingQueryAnswer, SessionEnded,
]


class DialogueManager:
    """One state machine per session, strictly single-threaded per message."""

    def __init__(self, world: World, repo: Repository,
                 registry: Optional[InstanceRegistry] = None):
        self.world = world
        self.repo = repo
        self.registry = registry or InstanceRegistry()
        self.state: Optional[DialogueState] = None

    # --- entry points -----------------------------------------------------

    def greet(self) -> list[Effect]:
        if self.state is not None:
            raise DialogueError("session already started")
        self.state = AwaitingInstruction()
        return [Say(REPLIES["greeting"]), StateChanged(self.state.tag)]

    def end_session(self) -> None:
        self.state = SessionEnded()

    def handle_message(self, utterance: str) -> list[Effect]:
        if self.state is None:
            raise DialogueError("session not started; call greet() first")
        if isinstance(self.state, SessionEnded):
            return [Say(REPLIES["session_over"])]

        old_tag = self.state.tag
        message = parse(utterance, self._parse_context())
        effects: list[Effect] = []
        self._dispatch(message, effects)
        if not any(isinstance(e, Say) for e in effects):
            effects.append(Say(REPLIES["unknown"]))
        if self.state.tag != old_tag:
            effects.append(StateChanged(self.state.tag))
        return effects

    # --- plumbing ----------------------------------------------------------

    def _parse_context(self) -> ParseContext:
        pending = None
        if isinstance(self.state, AwaitingSlot):
            pending = self.state.missing[0]
        return ParseContext(
            state=self.state.tag,
            pending_slot=pending,
            known_kinds=self.repo.kinds(),
            schemas={k: self.repo.schema(k) for k in self.repo.kinds()},
            registry=self.registry,
        )

    def _pending_question(self) -> Optional[str]:
        if isinstance(self.state, AwaitingSlot):
            return self._slot_question(self.state.missing[0], self.state.form.kind)
        if isinstance(self.state, OfferingSave):
            return REPLIES["offer_save"]
        if isinstance(self.state, AwaitingName):
            return REPLIES["ask_name"]
        if isinstance(self.state, AwaitingDims):
            return REPLIES["ask_dims"]
        if isinstance(self.state, AwaitingQueryAnswer):
            return self.state.query.text
        return None

    def _say_unknown(self, effects: list[Effect]) -> None:
        effects.append(Say(REPLIES["unknown"]))
        question = self._pending_question()
        if question:
            effects.append(Say(REPLIES["repeat_question"].format(question=question)))

    def _slot_question(self, slot: str, kind: str) -> str:
        key = f"ask_{slot}"
        if key in REPLIES:
            return REPLIES[key].format(kind=kind)
        return REPLIES["ask_param"].format(param=slot, kind=kind)

    # --- dispatch ------------------------------------------------------------

    def _dispatch(self, message, effects: list[Effect]) -> None:
        if isinstance(message, Greeting):
            effects.append(Say(REPLIES["greet_back"]))
            return
        if isinstance(message, UndoCommand):
            self._on_undo(effects)
            return
        if isinstance(message, BuildInstruction):
            if isinstance(self.state, (AwaitingInstruction, AwaitingSlot, OfferingSave)):
                self._start_build(message.form, effects)
            else:
                self._say_unknown(effects)
            return
        if isinstance(message, SlotAnswer):
            self._on_slot_answer(message, effects)
            return
        if isinstance(message, SaveAccept):
            self._on_save_accept(effects)
            return
        if isinstance(message, SaveDecline):
            if isinstance(self.state, OfferingSave):
                effects.append(Say(REPLIES["decline_save"]))
                self.state = AwaitingInstruction()
            else:
                self._say_unknown(effects)
            return
        if isinstance(message, NameDeclaration):
            self._on_name(message.name, effects)
            return
        if isinstance(message, DimensionDeclaration):
            self._on_dims(message.dims, effects)
            return
        if isinstance(message, YesNoAnswer):
            self._on_yes_no(message.value, effects)
            return
        self._say_unknown(effects)

    # --- build pipeline ----------------------------------------------------------

    def _start_build(self, form: InstructionForm, effects: list[Effect]) -> None:
        schema = self.repo.schema(form.kind)
        missing = check_completeness(form, schema)
        if missing:
            self.state = AwaitingSlot(form, tuple(missing))
            effects.append(Say(self._slot_question(missing[0], form.kind)))
            return
        self._execute_form(form, effects)

    def _execute_form(self, form: InstructionForm, effects: list[Effect]) -> None:
        schema = self.repo.schema(form.kind)
        try:
            size = self.repo.box_size(form.kind, form.dims)
            anchor = resolve_placement(form.placement, size, self.world, self.registry)
            task = to_htn_task(form, schema)
            ground = Task(task.name, (*task.args[:-1], anchor))
            plan_value = plan(ground, self.world, self.repo)
        except NoRoomError:
            effects.append(Say(REPLIES["plan_no_room"]))
            self.state = AwaitingInstruction()
            return
        except UnknownReferenceError:
            effects.append(Say(REPLIES["no_reference"]))
            self.state = AwaitingInstruction()
            return
        except PlanFailure as failure:
            key = {
                PlanFailure.UNSUPPORTED: "plan_unsupported",
                PlanFailure.OUT_OF_BOUNDS: "plan_out_of_bounds",
                PlanFailure.COLLISION: "plan_collision",
                PlanFailure.NO_METHOD: "plan_no_method",
            }[failure.reason]
            effects.append(Say(REPLIES[key]))
            self.state = AwaitingInstruction()
            return
        group_id = self.world.new_group()
        execute(plan_value, self.world, group_id, self.registry)
        effects.append(WorldChanged(
            placed=tuple((op.pos, op.color) for op in plan_value.ops), removed=()))
        effects.append(Say(REPLIES["built"].format(
            color=plan_value.color.value, kind=plan_value.kind)))
        effects.append(Say(REPLIES["offer_save"]))
        self.state = OfferingSave(dict(self.world.cells))

    def _on_slot_answer(self, message: SlotAnswer, effects: list[Effect]) -> None:
        if not isinstance(self.state, AwaitingSlot):
            self._say_unknown(effects)
            return
        state = self.state
        slot = message.slot or state.missing[0]
        question = self._slot_question(state.missing[0], state.form.kind)
        if slot not in state.missing:
            # a typed value aimed at the wrong slot, e.g. a color while a
            # dimension is pending: name the expected type and re-ask
            if isinstance(message.value, Color) and state.missing[0] != "color":
                effects.append(Say(REPLIES["need_number"].format(slot=state.missing[0])))
                effects.append(Say(REPLIES["repeat_question"].format(question=question)))
            else:
                self._say_unknown(effects)
            return
        if slot == "color":
            if not isinstance(message.value, Color):
                effects.append(Say(REPLIES["need_color"]))
                effects.append(Say(REPLIES["repeat_question"].format(question=question)))
                return
        else:
            if isinstance(message.value, Color):
                effects.append(Say(REPLIES["need_number"].format(slot=slot)))
                effects.append(Say(REPLIES["repeat_question"].format(question=question)))
                return
            if message.value < 1:
                effects.append(Say(REPLIES["positive_dims"]))
                effects.append(Say(REPLIES["repeat_question"].format(question=question)))
                return
        form = fill_slot(state.form, slot, message.value)
        missing = check_completeness(form, self.repo.schema(form.kind))
        if missing:
            self.state = AwaitingSlot(form, tuple(missing))
            effects.append(Say(self._slot_question(missing[0], form.kind)))
            return
        self._execute_form(form, effects)

    # --- undo ------------------------------------------------------------------

    def _on_undo(self, effects: list[Effect]) -> None:
        if isinstance(self.state, (AwaitingName, AwaitingDims, AwaitingQueryAnswer)):
            effects.append(Say(REPLIES["finish_first"]))
            question = self._pending_question()
            if question:
                effects.append(Say(REPLIES["repeat_question"].format(question=question)))
            return
        try:
            group = self.world.undo_group()
        except NothingToUndoError:
            effects.append(Say(REPLIES["nothing_to_undo"]))
            return
        self.registry.drop_group(group.group_id)
        placed = []
        removed = []
        for action in reversed(group.actions):
            if isinstance(action, Place):
                removed.append((action.pos, action.color))
            else:
                placed.append((action.pos, action.color))
        effects.append(WorldChanged(placed=tuple(placed), removed=tuple(removed)))
        effects.append(Say(REPLIES["undone"]))
        self.state = AwaitingInstruction()

    # --- save / learn flow --------------------------------------------------------

    def _on_save_accept(self, effects: list[Effect]) -> None:
        if isinstance(self.state, OfferingSave):
            self.state = AwaitingName(self.state.cells)
            effects.append(Say(REPLIES["ask_name"]))
            return
        if isinstance(self.state, AwaitingInstruction):
            if not self.world.cells:
                effects.append(Say(REPLIES["nothing_to_save"]))
                return
            self.state = AwaitingName(dict(self.world.cells))
            effects.append(Say(REPLIES["ask_name"]))
            return
        self._say_unknown(effects)

    def _on_name(self, name: str, effects: list[Effect]) -> None:
        if not isinstance(self.state, AwaitingName):
            self._say_unknown(effects)
            return
        if name in self.repo or name in RESERVED_NAMES:
            effects.append(Say(REPLIES["name_taken"].format(name=name)))
            return
        self.state = AwaitingDims(name, self.state.cells)
        effects.append(Say(REPLIES["ask_dims"]))

    def _on_dims(self, dims: tuple[tuple[str, int], ...], effects: list[Effect]) -> None:
        if not isinstance(self.state, AwaitingDims):
            self._say_unknown(effects)
            return
        names = [p for p, _ in dims]
        if len(names) != len(set(names)) or any(v < 1 for _, v in dims):
            effects.append(Say(REPLIES["positive_dims"]))
            effects.append(Say(REPLIES["repeat_question"].format(
                question=REPLIES["ask_dims"])))
            return
        try:
            instance = TrainingInstance.from_cells(self.state.name, self.state.cells, dims)
            covers = induction.decompose(instance.cells)
            hypotheses = induction.generalize(covers, instance)
        except induction.InductionError:
            effects.append(Say(REPLIES["disconnected"]
                               if not induction.connected(self.state.cells)
                               else REPLIES["learn_failed"]))
            self.state = AwaitingInstruction()
            return
        episode = InductionEpisode(instance, hypotheses)
        self._advance_episode(episode, effects)

    def _on_yes_no(self, answer: bool, effects: list[Effect]) -> None:
        if not isinstance(self.state, AwaitingQueryAnswer):
            self._say_unknown(effects)
            return
        episode = self.state.episode
        if not episode.update(self.state.query, answer):
            effects.append(Say(REPLIES["contradiction"]))
        self._advance_episode(episode, effects)

    def _advance_episode(self, episode: InductionEpisode, effects: list[Effect]) -> None:
        query = episode.next_query()
        if query is not None:
            self.state = AwaitingQueryAnswer(episode, query)
            effects.append(Say(query.text))
            return
        definition = induction.finalize(episode.chosen(), episode.instance)
        try:
            self.repo.add(definition)
        except ValueError:
            effects.append(Say(REPLIES["name_taken"].format(name=definition.name)))
            self.state = AwaitingInstruction()
            return
        effects.append(RepositoryChanged(definition.name))
        effects.append(Say(definition.explanation))
        effects.append(Say(REPLIES["learned"].format(name=definition.name)))
        self.state = AwaitingInstruction()
