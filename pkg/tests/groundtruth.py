"""Ground-truth concept suite for the induction tests.

Each entry carries: the reference ConceptDefinition, the training instance
(cells + declared parameter values + colors), and an extent function written
as plain set comprehensions, independent of the library's evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from blocksmith.concepts import (
    ConceptDefinition,
    ConceptPart,
    Const,
    Param,
    ParamMinus1,
    ParamPlus1,
    build_definition,
)
from blocksmith.world import Color, Position

RED, BLUE, GREEN, YELLOW, PURPLE, ORANGE = (
    Color.RED, Color.BLUE, Color.GREEN, Color.YELLOW, Color.PURPLE, Color.ORANGE)


@dataclass(frozen=True)
class GroundTruthConcept:
    definition: ConceptDefinition
    training: dict[str, int]
    training_cells: dict[Position, Color]
    extent_fn: Callable[..., Optional[set[tuple[int, int, int]]]]

    @property
    def name(self) -> str:
        return self.definition.name

    def reference_extent(self, valuation: dict[str, int]) -> Optional[set[tuple]]:
        return self.extent_fn(**valuation)


def _cells(positions, color) -> dict[Position, Color]:
    return {Position(*p): color for p in positions}


def _l_extent(height, width):
    if height < 1 or width - 1 < 1:
        return None
    return ({(0, j, 0) for j in range(height)}
            | {(i, 0, 0) for i in range(1, width)})


def _t_extent(width, length):
    # the stem sits at x=1, so the bar must be at least 2 wide to reach it
    if width < 2 or length < 1:
        return None
    return ({(i, 0, 0) for i in range(width)}
            | {(1, 0, 1 + k) for k in range(length)})


def _u_extent(height, width):
    # width 1 would fold the two walls onto each other; not a u at all
    if width < 2 or height - 1 < 1:
        return None
    return ({(i, 0, 0) for i in range(width)}
            | {(0, 1 + j, 0) for j in range(height - 1)}
            | {(width - 1, 1 + j, 0) for j in range(height - 1)})


def _plus_extent(width, length):
    # the long arm and the stub sit at x=1; a 1-wide bar cannot touch them
    if width < 2 or length < 1:
        return None
    return ({(i, 0, 1) for i in range(width)}
            | {(1, 0, 2 + k) for k in range(length)}
            | {(1, 0, 0)})


def _frame_extent(width, height):
    if width - 1 < 1 or height - 1 < 1:
        return None
    return ({(i, 0, 0) for i in range(width - 1)}
            | {(width - 1, j, 0) for j in range(height - 1)}
            | {(1 + i, height - 1, 0) for i in range(width - 1)}
            | {(0, 1 + j, 0) for j in range(height - 1)})


def _corner_extent(width, length):
    if width < 1 or length - 1 < 1:
        return None
    return ({(i, 0, 0) for i in range(width)}
            | {(0, 0, 1 + k) for k in range(length - 1)})


def _stairs_extent(height):
    if height - 1 < 1:
        return None
    return ({(0, j, 0) for j in range(height - 1)}
            | {(1, j, 0) for j in range(height)}
            | {(2, j, 0) for j in range(height + 1)})


def _arch_extent(height, width):
    # width 1 would fold the two legs onto each other
    if height < 1 or width < 2:
        return None
    return ({(0, j, 0) for j in range(height)}
            | {(width - 1, j, 0) for j in range(height)}
            | {(i, height, 0) for i in range(width)})


def _h_extent(height, gap):
    # the crossbar sits at y=1, so the towers must be at least 2 tall
    if height < 2 or gap < 1:
        return None
    return ({(0, j, 0) for j in range(height)}
            | {(gap + 1, j, 0) for j in range(height)}
            | {(1 + i, 1, 0) for i in range(gap)})


def _boxlid_extent(size):
    if size < 1:
        return None
    return ({(i, j, k) for i in range(size) for j in range(size) for k in range(size)}
            | {(i, size, k) for i in range(size) for k in range(size)})


ZERO = (Const(0), Const(0), Const(0))


def build_suite() -> list[GroundTruthConcept]:
    suite = []

    # l: a tower with a row off its bottom (the canonical two-part example)
    defn = build_definition("l", ("height", "width"), (
        ConceptPart("tower", (Param("height"),), ZERO),
        ConceptPart("row", (ParamMinus1("width"),), (Const(1), Const(0), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"height": 3, "width": 3},
        _cells(_l_extent(3, 3), RED), _l_extent))

    # t: lying flat on the ground, bar plus stem
    defn = build_definition("t", ("width", "length"), (
        ConceptPart("row", (Param("width"),), ZERO),
        ConceptPart("column", (Param("length"),), (Const(1), Const(0), Const(1))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"width": 4, "length": 3},
        _cells(_t_extent(4, 3), BLUE), _t_extent))

    # u: a base row with a wall rising from each end
    defn = build_definition("u", ("height", "width"), (
        ConceptPart("row", (Param("width"),), ZERO),
        ConceptPart("tower", (ParamMinus1("height"),), (Const(0), Const(1), Const(0))),
        ConceptPart("tower", (ParamMinus1("height"),),
                    (ParamMinus1("width"), Const(1), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"height": 3, "width": 5},
        _cells(_u_extent(3, 5), GREEN), _u_extent))

    # plus: flat cross with one long arm
    defn = build_definition("plus", ("width", "length"), (
        ConceptPart("row", (Param("width"),), (Const(0), Const(0), Const(1))),
        ConceptPart("column", (Param("length"),), (Const(1), Const(0), Const(2))),
        ConceptPart("block", (), (Const(1), Const(0), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"width": 4, "length": 5},
        _cells(_plus_extent(4, 5), YELLOW), _plus_extent))

    # frame: hollow upright rectangle, four pinwheel sides
    defn = build_definition("frame", ("width", "height"), (
        ConceptPart("row", (ParamMinus1("width"),), ZERO),
        ConceptPart("tower", (ParamMinus1("height"),),
                    (ParamMinus1("width"), Const(0), Const(0))),
        ConceptPart("row", (ParamMinus1("width"),),
                    (Const(1), ParamMinus1("height"), Const(0))),
        ConceptPart("tower", (ParamMinus1("height"),), (Const(0), Const(1), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"width": 6, "height": 4},
        _cells(_frame_extent(6, 4), PURPLE), _frame_extent))

    # corner: two floor arms meeting at a right angle
    defn = build_definition("corner", ("width", "length"), (
        ConceptPart("row", (Param("width"),), ZERO),
        ConceptPart("column", (ParamMinus1("length"),), (Const(0), Const(0), Const(1))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"width": 4, "length": 3},
        _cells(_corner_extent(4, 3), ORANGE), _corner_extent))

    # stairs: three towers of stepwise height
    defn = build_definition("stairs", ("height",), (
        ConceptPart("tower", (ParamMinus1("height"),), ZERO),
        ConceptPart("tower", (Param("height"),), (Const(1), Const(0), Const(0))),
        ConceptPart("tower", (ParamPlus1("height"),), (Const(2), Const(0), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"height": 4},
        _cells(_stairs_extent(4), RED), _stairs_extent))

    # arch: two legs and a lintel across the top
    defn = build_definition("arch", ("height", "width"), (
        ConceptPart("tower", (Param("height"),), ZERO),
        ConceptPart("tower", (Param("height"),),
                    (ParamMinus1("width"), Const(0), Const(0))),
        ConceptPart("row", (Param("width"),), (Const(0), Param("height"), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"height": 3, "width": 5},
        _cells(_arch_extent(3, 5), BLUE), _arch_extent))

    # h: two full towers joined by a low bar
    defn = build_definition("h", ("height", "gap"), (
        ConceptPart("tower", (Param("height"),), ZERO),
        ConceptPart("tower", (Param("height"),),
                    (ParamPlus1("gap"), Const(0), Const(0))),
        ConceptPart("row", (Param("gap"),), (Const(1), Const(1), Const(0))),
    ))
    suite.append(GroundTruthConcept(
        defn, {"height": 6, "gap": 3},
        _cells(_h_extent(6, 3), GREEN), _h_extent))

    # boxlid: a red solid cube wearing a blue slab; exercises fixed part colors
    defn = build_definition("boxlid", ("size",), (
        ConceptPart("cube", (Param("size"),), ZERO, color=RED),
        ConceptPart("cuboid", (Param("size"), Const(1), Param("size")),
                    (Const(0), Param("size"), Const(0)), color=BLUE),
    ))
    cells = _cells({(i, j, k) for i in range(3) for j in range(3) for k in range(3)}, RED)
    cells.update(_cells({(i, 3, k) for i in range(3) for k in range(3)}, BLUE))
    suite.append(GroundTruthConcept(defn, {"size": 3}, cells, _boxlid_extent))

    return suite
