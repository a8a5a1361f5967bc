"""Structure geometry and a total-order HTN planner over the structure repository.

Compound tasks (``build-<kind>``) decompose through repository methods down to the
single primitive operator ``place-block``; block emission within any structure is
ordered by (y, x, z) so grounded structures build bottom-up without floating steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

from .concepts import ConceptDefinition, eval_expr
from .forms import (
    Absolute,
    BUILTIN_SCHEMAS,
    Default,
    Placement,
    SlotSchema,
    Task,
    UnknownKindError,
)
from .world import Color, Position, World, neighbors

DIRECTIONS: dict[str, tuple[int, int, int]] = {
    "left": (-1, 0, 0),
    "right": (1, 0, 0),
    "up": (0, 1, 0),
    "down": (0, -1, 0),
    "front": (0, 0, -1),
    "back": (0, 0, 1),
}

CORNER_INDICATORS = tuple(
    f"{y}-{x}-{z}"
    for y in ("bottom", "top")
    for x in ("left", "right")
    for z in ("front", "back")
)


class PlannerError(Exception):
    pass


class NonPositiveDimensionError(PlannerError):
    def __init__(self, kind: str, dims):
        super().__init__(f"{kind} dimensions must all be >= 1, got {dims}")


class InvalidIndicatorError(PlannerError):
    def __init__(self, kind: str, name: str):
        super().__init__(f"{name!r} is not a block indicator of a {kind}")


class UnknownReferenceError(PlannerError):
    def __init__(self, ref):
        super().__init__(f"no such structure instance: {ref}")


class NoRoomError(PlannerError):
    def __init__(self):
        super().__init__("no free spot in the build region fits that structure")


class PlanFailure(PlannerError):
    """Planning failed; the world is untouched. ``reason`` names the first violation."""

    OUT_OF_BOUNDS = "out-of-bounds"
    COLLISION = "collision"
    UNSUPPORTED = "unsupported"
    NO_METHOD = "no-method"

    def __init__(self, reason: str, pos: Optional[Position] = None, task: str = ""):
        at = f" at {tuple(pos)}" if pos is not None else ""
        super().__init__(f"cannot build {task}: {reason}{at}")
        self.reason = reason
        self.pos = pos


class StalePlanError(PlannerError):
    def __init__(self, pos: Position):
        super().__init__(f"world changed since planning; precondition fails at {tuple(pos)}")
        self.pos = pos


# --- geometry ----------------------------------------------------------------

def primitive_box(kind: str, dims: tuple[int, ...]) -> tuple[int, int, int]:
    """Bounding box (x, y, z extents) of a primitive structure."""
    if kind == "block":
        return (1, 1, 1)
    if kind == "tower":
        return (1, dims[0], 1)
    if kind == "row":
        return (dims[0], 1, 1)
    if kind == "column":
        return (1, 1, dims[0])
    if kind == "square":
        return (dims[0], dims[0], 1)
    if kind == "rectangle":
        return (dims[0], dims[1], 1)
    if kind == "cube":
        return (dims[0], dims[0], dims[0])
    if kind == "cuboid":
        return (dims[0], dims[1], dims[2])
    raise UnknownKindError(kind)


def extent(kind: str, dims: Mapping[str, int], anchor: Position,
           repo: "Repository | None" = None) -> set[Position]:
    """Exact cell set occupied by a structure anchored at its minimum corner."""
    anchor = Position(*anchor)
    if kind in BUILTIN_SCHEMAS:
        ordered = tuple(dims[p] for p in BUILTIN_SCHEMAS[kind].params)
        if any(d < 1 for d in ordered):
            raise NonPositiveDimensionError(kind, ordered)
        ex, ey, ez = primitive_box(kind, ordered)
        return {
            anchor.shifted(i, j, k)
            for j in range(ey)
            for i in range(ex)
            for k in range(ez)
        }
    if repo is None:
        raise UnknownKindError(kind)
    definition = repo.definition(kind)
    if definition is None:
        raise UnknownKindError(kind)
    return concept_extent(definition, dims, anchor, repo)


def concept_extent(definition: ConceptDefinition, valuation: Mapping[str, int],
                   anchor: Position, repo: "Repository | None" = None) -> set[Position]:
    cells: set[Position] = set()
    for part in definition.parts:
        part_anchor = anchor.shifted(*(eval_expr(e, valuation) for e in part.offset))
        values = tuple(eval_expr(e, valuation) for e in part.dims)
        if part.kind in BUILTIN_SCHEMAS:
            schema = BUILTIN_SCHEMAS[part.kind]
        elif repo is not None:
            schema = repo.schema(part.kind)
        else:
            raise UnknownKindError(part.kind)
        cells |= extent(part.kind, dict(zip(schema.params, values)), part_anchor, repo)
    return cells


def bounding_box(cells: Iterable[Position]) -> tuple[Position, Position]:
    cells = list(cells)
    lo = Position(min(c.x for c in cells), min(c.y for c in cells), min(c.z for c in cells))
    hi = Position(max(c.x for c in cells), max(c.y for c in cells), max(c.z for c in cells))
    return lo, hi


# --- structure instances ------------------------------------------------------

@dataclass(frozen=True)
class StructureInstance:
    id: int
    kind: str
    color: Color
    dims: tuple[tuple[str, int], ...]
    anchor: Position
    blocks: frozenset[Position]
    group_id: int


class InstanceRegistry:
    """Built structures in creation order, for anaphora and relative placement."""

    def __init__(self):
        self._items: list[StructureInstance] = []
        self._next_id = 1

    def add(self, kind: str, color: Color, dims: Mapping[str, int], anchor: Position,
            blocks: Iterable[Position], group_id: int) -> StructureInstance:
        instance = StructureInstance(
            id=self._next_id,
            kind=kind,
            color=color,
            dims=tuple(dims.items()),
            anchor=Position(*anchor),
            blocks=frozenset(blocks),
            group_id=group_id,
        )
        self._next_id += 1
        self._items.append(instance)
        return instance

    def get(self, instance_id: int) -> Optional[StructureInstance]:
        for item in self._items:
            if item.id == instance_id:
                return item
        return None

    def most_recent(self, kind: Optional[str] = None) -> Optional[StructureInstance]:
        for item in reversed(self._items):
            if kind is None or item.kind == kind:
                return item
        return None

    def drop_group(self, group_id: int) -> None:
        self._items = [i for i in self._items if i.group_id != group_id]

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)


# --- block indicators ----------------------------------------------------------

_LINE_INDICATORS = {
    "block": ("self",),
    "tower": ("top", "bottom"),
    "row": ("left-end", "right-end"),
    "column": ("front-end", "back-end"),
}


def valid_indicators(kind: str) -> tuple[str, ...]:
    return _LINE_INDICATORS.get(kind, CORNER_INDICATORS)


def indicator(instance: StructureInstance, name: str) -> Position:
    """Single component block named relative to the instance's bounding box."""
    if name not in valid_indicators(instance.kind):
        raise InvalidIndicatorError(instance.kind, name)
    lo, hi = bounding_box(instance.blocks)
    if name == "self":
        return lo
    if name == "top":
        return Position(lo.x, hi.y, lo.z)
    if name == "bottom":
        return lo
    if name == "left-end":
        return lo
    if name == "right-end":
        return Position(hi.x, lo.y, lo.z)
    if name == "front-end":
        return lo
    if name == "back-end":
        return Position(lo.x, lo.y, hi.z)
    y_word, x_word, z_word = name.split("-")
    return Position(
        hi.x if x_word == "right" else lo.x,
        hi.y if y_word == "top" else lo.y,
        hi.z if z_word == "back" else lo.z,
    )


def default_indicator(kind: str, direction: str) -> str:
    """Indicator implied by a bare direction phrase like "on top of the tower"."""
    if kind == "block":
        return "self"
    if kind == "tower":
        return "top" if direction == "up" else "bottom"
    if kind == "row":
        return "right-end" if direction == "right" else "left-end"
    if kind == "column":
        return "back-end" if direction == "back" else "front-end"
    y_word = "top" if direction == "up" else "bottom"
    x_word = "right" if direction == "right" else "left"
    z_word = "back" if direction == "back" else "front"
    return f"{y_word}-{x_word}-{z_word}"


# --- placement resolution -------------------------------------------------------

def resolve_placement(placement: Placement, size: tuple[int, int, int], world: World,
                      registry: Optional[InstanceRegistry] = None) -> Position:
    """Anchor position for a structure of the given bounding-box size."""
    ex, ey, ez = size
    if isinstance(placement, Absolute):
        return Position(*placement.pos)
    if isinstance(placement, Default):
        centered = Position((world.width - ex) // 2, 0, (world.depth - ez) // 2)
        if _fits(centered, size, world):
            return centered
        for ay in range(world.height - ey + 1):
            for ax in range(world.width - ex + 1):
                for az in range(world.depth - ez + 1):
                    candidate = Position(ax, ay, az)
                    if _fits(candidate, size, world):
                        return candidate
        raise NoRoomError()
    if registry is None:
        raise UnknownReferenceError(placement.ref_id)
    instance = registry.get(placement.ref_id)
    if instance is None:
        raise UnknownReferenceError(placement.ref_id)
    q = indicator(instance, placement.indicator)
    vector = DIRECTIONS[placement.direction]
    coords = [q.x, q.y, q.z]
    for axis, step in enumerate(vector):
        if step > 0:
            coords[axis] = coords[axis] + 1
        elif step < 0:
            coords[axis] = coords[axis] - size[axis]
    return Position(*coords)


def _fits(anchor: Position, size: tuple[int, int, int], world: World) -> bool:
    ex, ey, ez = size
    if not (0 <= anchor.x and anchor.x + ex <= world.width
            and 0 <= anchor.y and anchor.y + ey <= world.height
            and 0 <= anchor.z and anchor.z + ez <= world.depth):
        return False
    return not any(
        anchor.shifted(i, j, k) in world.cells
        for j in range(ey) for i in range(ex) for k in range(ez)
    )


# --- repository -------------------------------------------------------------------

@dataclass(frozen=True)
class Method:
    """Total-order decomposition of one build task into ordered ground subtasks."""

    kind: str
    definition: Optional[ConceptDefinition] = None

    def guard(self, dims: Mapping[str, int], anchor: Position, state: dict,
              world: World, repo: "Repository") -> Optional[tuple[str, Position]]:
        """Bounds/overlap precondition; returns the first violation or None."""
        cells = sorted(extent(self.kind, dims, anchor, repo), key=Position.yxz)
        for pos in cells:
            if not world.in_bounds(pos):
                return (PlanFailure.OUT_OF_BOUNDS, pos)
            if pos in state:
                return (PlanFailure.COLLISION, pos)
        return None

    def expand(self, color: Color, dims: Mapping[str, int], anchor: Position,
               repo: "Repository") -> list[Task]:
        if self.definition is None:
            cells = sorted(extent(self.kind, dims, anchor), key=Position.yxz)
            return [Task("place-block", (pos, color)) for pos in cells]
        subtasks = []
        for part in self.definition.parts:
            part_anchor = anchor.shifted(*(eval_expr(e, dims) for e in part.offset))
            part_schema = repo.schema(part.kind)
            part_dims = tuple(eval_expr(e, dims) for e in part.dims)
            if len(part_dims) != len(part_schema.params):
                raise PlannerError(f"part {part.kind} arity mismatch")
            part_color = part.color if part.color else color
            subtasks.append(
                Task(f"build-{part.kind}", (part_color, *part_dims, part_anchor))
            )
        return subtasks


@dataclass(frozen=True)
class RepositoryEntry:
    schema: SlotSchema
    method: Method
    definition: Optional[ConceptDefinition] = None


class Repository:
    """Ordered structure library: the 8 primitives, then learned kinds appended."""

    def __init__(self):
        self._entries: list[RepositoryEntry] = [
            RepositoryEntry(schema, Method(kind))
            for kind, schema in BUILTIN_SCHEMAS.items()
        ]

    def kinds(self) -> tuple[str, ...]:
        return tuple(e.schema.kind for e in self._entries)

    def __contains__(self, kind: str) -> bool:
        return any(e.schema.kind == kind for e in self._entries)

    def entry(self, kind: str) -> RepositoryEntry:
        for e in self._entries:
            if e.schema.kind == kind:
                return e
        raise UnknownKindError(kind)

    def schema(self, kind: str) -> SlotSchema:
        return self.entry(kind).schema

    def definition(self, kind: str) -> Optional[ConceptDefinition]:
        return self.entry(kind).definition

    def learned(self) -> list[ConceptDefinition]:
        return [e.definition for e in self._entries if e.definition is not None]

    def add(self, definition: ConceptDefinition) -> None:
        if definition.name in self:
            raise ValueError(f"kind {definition.name!r} already exists")
        self._entries.append(
            RepositoryEntry(definition.schema(), Method(definition.name, definition),
                            definition)
        )

    def methods_for(self, task_name: str) -> list[Method]:
        if not task_name.startswith("build-"):
            return []
        kind = task_name[len("build-"):]
        return [e.method for e in self._entries if e.schema.kind == kind]

    def box_size(self, kind: str, dims: Mapping[str, int]) -> tuple[int, int, int]:
        """Bounding-box extents for placement; learned kinds measure their cells."""
        if kind in BUILTIN_SCHEMAS:
            ordered = tuple(dims[p] for p in BUILTIN_SCHEMAS[kind].params)
            return primitive_box(kind, ordered)
        cells = extent(kind, dims, Position(0, 0, 0), self)
        lo, hi = bounding_box(cells)
        return (hi.x - lo.x + 1, hi.y - lo.y + 1, hi.z - lo.z + 1)


# --- planning ----------------------------------------------------------------------

@dataclass(frozen=True)
class PlaceOp:
    pos: Position
    color: Color


@dataclass(frozen=True)
class Plan:
    """Ordered place-block operators plus the provenance of the originating task."""

    ops: tuple[PlaceOp, ...]
    kind: str
    color: Color
    dims: tuple[tuple[str, int], ...]
    anchor: Position

    @property
    def blocks(self) -> frozenset[Position]:
        return frozenset(op.pos for op in self.ops)


def serialize_plan(plan: Plan) -> list[dict]:
    return [
        {"op": "place", "x": op.pos.x, "y": op.pos.y, "z": op.pos.z,
         "color": op.color.value}
        for op in plan.ops
    ]


def task_parts(task: Task, repo: Repository) -> tuple[str, Color, dict[str, int], Position]:
    """Split a ground build task into (kind, color, dims, anchor)."""
    if not task.name.startswith("build-"):
        raise PlannerError(f"not a build task: {task.name}")
    kind = task.name[len("build-"):]
    schema = repo.schema(kind)
    color, *rest = task.args
    if len(rest) != len(schema.params) + 1:
        raise PlannerError(f"{task.name} expects {len(schema.params) + 2} args")
    anchor = rest[-1]
    if not isinstance(anchor, (Position, tuple)):
        raise PlannerError("task anchor must be resolved to a position before planning")
    dims = dict(zip(schema.params, rest[:-1]))
    return kind, color, dims, Position(*anchor)


def plan(task: Task, world: World, repo: Repository) -> Plan:
    """Expand a ground build task into place-block operators against a simulated state."""
    kind, color, dims, anchor = task_parts(task, repo)
    state = dict(world.cells)
    ops: list[PlaceOp] = []
    _solve(task, state, ops, world, repo)
    return Plan(tuple(ops), kind, color, tuple(dims.items()), anchor)


def _solve(task: Task, state: dict, ops: list[PlaceOp], world: World,
           repo: Repository) -> None:
    if task.name == "place-block":
        pos, color = task.args
        pos = Position(*pos)
        if not world.in_bounds(pos):
            raise PlanFailure(PlanFailure.OUT_OF_BOUNDS, pos, task.name)
        if pos in state:
            raise PlanFailure(PlanFailure.COLLISION, pos, task.name)
        if pos.y != 0 and not any(n in state for n in neighbors(pos)):
            raise PlanFailure(PlanFailure.UNSUPPORTED, pos, task.name)
        state[pos] = color
        ops.append(PlaceOp(pos, color))
        return

    methods = repo.methods_for(task.name)
    if not methods:
        raise PlanFailure(PlanFailure.NO_METHOD, None, task.name)
    kind, color, dims, anchor = task_parts(task, repo)
    first_failure: Optional[PlanFailure] = None
    for method in methods:
        violation = method.guard(dims, anchor, state, world, repo)
        if violation is not None:
            failure = PlanFailure(violation[0], violation[1], task.name)
            first_failure = first_failure or failure
            continue
        saved_state = dict(state)
        saved_len = len(ops)
        try:
            for subtask in method.expand(color, dims, anchor, repo):
                _solve(subtask, state, ops, world, repo)
            return
        except PlanFailure as failure:
            # chronological backtracking: restore and try the next method
            state.clear()
            state.update(saved_state)
            del ops[saved_len:]
            first_failure = first_failure or failure
    raise first_failure if first_failure is not None \
        else PlanFailure(PlanFailure.NO_METHOD, None, task.name)


def execute(plan_value: Plan, world: World, group_id: int,
            registry: Optional[InstanceRegistry] = None) -> Optional[StructureInstance]:
    """Apply a plan atomically; fails without mutating if the world moved on."""
    sim = dict(world.cells)
    for op in plan_value.ops:
        if not world.in_bounds(op.pos) or op.pos in sim:
            raise StalePlanError(op.pos)
        if op.pos.y != 0 and not any(n in sim for n in neighbors(op.pos)):
            raise StalePlanError(op.pos)
        sim[op.pos] = op.color
    for op in plan_value.ops:
        world.place_block(op.pos, op.color, group_id)
    if registry is None:
        return None
    return registry.add(plan_value.kind, plan_value.color, dict(plan_value.dims),
                        plan_value.anchor, plan_value.blocks, group_id)
