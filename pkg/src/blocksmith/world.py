"""Bounded voxel grid holding colored blocks, with support rules and grouped undo.

Axis convention (all directions are from the architect's point of view):
x grows to the architect's right, y grows upward from the ground, z grows
away from the architect.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import NamedTuple, Union

DEFAULT_DIMS = (11, 9, 11)


class Color(Enum):
    RED = "red"
    BLUE = "blue"
    GREEN = "green"
    PURPLE = "purple"
    ORANGE = "orange"
    YELLOW = "yellow"

    def __str__(self) -> str:
        return self.value


COLOR_NAMES = tuple(c.value for c in Color)


class Position(NamedTuple):
    x: int
    y: int
    z: int

    def shifted(self, dx: int = 0, dy: int = 0, dz: int = 0) -> "Position":
        return Position(self.x + dx, self.y + dy, self.z + dz)

    def yxz(self) -> tuple[int, int, int]:
        """Sort key used everywhere blocks need a canonical order."""
        return (self.y, self.x, self.z)


NEIGHBOR_OFFSETS = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
)


def neighbors(pos: Position) -> list[Position]:
    return [pos.shifted(dx, dy, dz) for dx, dy, dz in NEIGHBOR_OFFSETS]


class WorldError(Exception):
    """Base class for grid mutation failures."""


class OutOfBoundsError(WorldError):
    def __init__(self, pos: Position):
        super().__init__(f"position {tuple(pos)} is outside the build region")
        self.pos = pos


class OccupiedError(WorldError):
    def __init__(self, pos: Position):
        super().__init__(f"position {tuple(pos)} already holds a block")
        self.pos = pos


class UnsupportedError(WorldError):
    def __init__(self, pos: Position):
        super().__init__(f"a block at {tuple(pos)} would float unsupported")
        self.pos = pos


class NothingToUndoError(WorldError):
    def __init__(self):
        super().__init__("there is no instruction left to undo")


@dataclass(frozen=True)
class Place:
    pos: Position
    color: Color

    def inverse(self) -> "Remove":
        return Remove(self.pos, self.color)


@dataclass(frozen=True)
class Remove:
    pos: Position
    color: Color

    def inverse(self) -> Place:
        return Place(self.pos, self.color)


Action = Union[Place, Remove]


@dataclass
class InstructionGroup:
    """All block actions caused by one architect instruction, undoable as a unit."""

    group_id: int
    actions: list[Action] = field(default_factory=list)
    undone: bool = False


class World:
    """Dense bounded grid; single writer, all mutations recorded in the group log."""

    def __init__(self, width: int = DEFAULT_DIMS[0], height: int = DEFAULT_DIMS[1],
                 depth: int = DEFAULT_DIMS[2]):
        if width <= 0 or height <= 0 or depth <= 0:
            raise ValueError("world dimensions must be positive")
        self.width = width
        self.height = height
        self.depth = depth
        self.cells: dict[Position, Color] = {}
        self.log: list[InstructionGroup] = []

    @property
    def dims(self) -> tuple[int, int, int]:
        return (self.width, self.height, self.depth)

    def in_bounds(self, pos: Position) -> bool:
        return (0 <= pos.x < self.width
                and 0 <= pos.y < self.height
                and 0 <= pos.z < self.depth)

    def is_supported(self, pos: Position) -> bool:
        """Ground level counts as supported, as does touching any existing block."""
        if pos.y == 0:
            return True
        return any(n in self.cells for n in neighbors(pos))

    def new_group(self) -> int:
        """Reserve the next instruction group id (the group itself is created lazily)."""
        return self.log[-1].group_id + 1 if self.log else 1

    def place_block(self, pos: Position, color: Color, group_id: int) -> None:
        pos = Position(*pos)
        if not self.in_bounds(pos):
            raise OutOfBoundsError(pos)
        if pos in self.cells:
            raise OccupiedError(pos)
        if not self.is_supported(pos):
            raise UnsupportedError(pos)
        self._group_for(group_id).actions.append(Place(pos, color))
        self.cells[pos] = color

    def undo_group(self) -> InstructionGroup:
        """Invert the most recent non-undone group, newest action first."""
        for group in reversed(self.log):
            if not group.undone:
                for action in reversed(group.actions):
                    self._apply(action.inverse())
                group.undone = True
                return group
        raise NothingToUndoError()

    def snapshot(self) -> list[tuple[Position, Color]]:
        """Canonical block list, sorted by (y, x, z); equal worlds give equal snapshots."""
        return sorted(self.cells.items(), key=lambda item: item[0].yxz())

    def snapshot_records(self) -> list[dict]:
        return [
            {"x": pos.x, "y": pos.y, "z": pos.z, "color": color.value}
            for pos, color in self.snapshot()
        ]

    def _group_for(self, group_id: int) -> InstructionGroup:
        if self.log and self.log[-1].group_id == group_id and not self.log[-1].undone:
            return self.log[-1]
        if self.log and group_id <= self.log[-1].group_id:
            raise ValueError(f"group id {group_id} is not newer than the latest group")
        group = InstructionGroup(group_id)
        self.log.append(group)
        return group

    def _apply(self, action: Action) -> None:
        if isinstance(action, Place):
            self.cells[action.pos] = action.color
        else:
            stored = self.cells.pop(action.pos, None)
            if stored is not action.color:
                raise WorldError(f"undo mismatch at {tuple(action.pos)}")


def snapshot_from_records(records: list[dict]) -> list[tuple[Position, Color]]:
    return [
        (Position(r["x"], r["y"], r["z"]), Color(r["color"]))
        for r in records
    ]
