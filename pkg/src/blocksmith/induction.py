"""One-shot induction of parameterized structure concepts from a built example.

Pipeline: decompose the example into minimal exact covers of primitive
structures, enumerate every parameter expression consistent with the declared
dimensions, prune geometrically broken hypotheses, then shrink the surviving
version space with count-based yes/no questions until one definition remains.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .concepts import (
    ConceptDefinition,
    ConceptPart,
    Const,
    DimExpr,
    Param,
    ParamMinus1,
    ParamPlus1,
    build_definition,
    eval_expr,
    expr_rank,
    expr_sort_key,
)
from .forms import BUILTIN_SCHEMAS
from .planner import extent
from .world import Color, Position, neighbors

MAX_INSTANCE_BLOCKS = 200
MAX_QUERIES = 5
QUERY_VALUE_RANGE = (1, 6)
PRUNE_VALUES = (2, 3, 4)

_KIND_INDEX = {kind: i for i, kind in enumerate(BUILTIN_SCHEMAS)}


class InductionError(Exception):
    pass


class TooLargeError(InductionError):
    def __init__(self, count: int):
        super().__init__(f"instance has {count} blocks; the limit is {MAX_INSTANCE_BLOCKS}")


class NoCoverError(InductionError):
    def __init__(self):
        super().__init__("no exact cover of primitive structures exists")


class NoConsistentHypothesisError(InductionError):
    def __init__(self):
        super().__init__("no parameterization is consistent with the example")


def connected(cells: Iterable[Position]) -> bool:
    cells = set(cells)
    if not cells:
        return False
    frontier = [next(iter(cells))]
    seen = {frontier[0]}
    while frontier:
        pos = frontier.pop()
        for n in neighbors(pos):
            if n in cells and n not in seen:
                seen.add(n)
                frontier.append(n)
    return len(seen) == len(cells)


@dataclass(frozen=True)
class TrainingInstance:
    """A built structure plus its declared name and dimension values."""

    name: str
    blocks: tuple[tuple[Position, Color], ...]
    params: tuple[tuple[str, int], ...]

    def __post_init__(self):
        if not self.blocks:
            raise InductionError("cannot learn from an empty structure")
        if not connected(pos for pos, _ in self.blocks):
            raise InductionError("cannot learn from a disconnected structure")
        if any(value < 1 for _, value in self.params):
            raise InductionError("declared dimensions must be >= 1")

    @classmethod
    def from_cells(cls, name: str, cells: Mapping[Position, Color],
                   params: Sequence[tuple[str, int]]) -> "TrainingInstance":
        blocks = tuple(sorted(cells.items(), key=lambda item: item[0].yxz()))
        return cls(name=name, blocks=blocks, params=tuple(params))

    @property
    def cells(self) -> dict[Position, Color]:
        return dict(self.blocks)

    @property
    def anchor(self) -> Position:
        xs, ys, zs = zip(*(pos for pos, _ in self.blocks))
        return Position(min(xs), min(ys), min(zs))


# --- decomposition into minimal exact covers -----------------------------------

@dataclass(frozen=True)
class CoverPart:
    kind: str
    dims: tuple[int, ...]
    anchor: Position
    color: Color

    def sort_key(self) -> tuple:
        return (_KIND_INDEX[self.kind], tuple(self.anchor), self.dims)


def box_kind(size: tuple[int, int, int]) -> tuple[str, tuple[int, ...]]:
    """Canonical primitive kind for a solid box of the given extents."""
    ex, ey, ez = size
    if (ex, ey, ez) == (1, 1, 1):
        return ("block", ())
    if ex == 1 and ez == 1:
        return ("tower", (ey,))
    if ey == 1 and ez == 1:
        return ("row", (ex,))
    if ex == 1 and ey == 1:
        return ("column", (ez,))
    if ez == 1 and ex == ey:
        return ("square", (ex,))
    if ez == 1:
        return ("rectangle", (ex, ey))
    if ex == ey == ez:
        return ("cube", (ex,))
    return ("cuboid", (ex, ey, ez))


def _solid_boxes(cells: frozenset[Position]) -> list[tuple[Position, tuple[int, int, int]]]:
    """Every axis-aligned box fully contained in the cell set."""
    boxes = []
    for p in sorted(cells):
        w = 1
        while p.shifted(w - 1, 0, 0) in cells:
            h = 1
            while all(p.shifted(i, h - 1, 0) in cells for i in range(w)):
                l = 1
                while all(p.shifted(i, j, l - 1) in cells
                          for i in range(w) for j in range(h)):
                    boxes.append((p, (w, h, l)))
                    l += 1
                h += 1
            w += 1
    return boxes


def _box_cells(anchor: Position, size: tuple[int, int, int]) -> frozenset[Position]:
    return frozenset(
        anchor.shifted(i, j, k)
        for i in range(size[0]) for j in range(size[1]) for k in range(size[2])
    )


def _min_exact_covers(cells: frozenset[Position]) -> list[list[tuple[Position, tuple]]]:
    """All minimum-cardinality exact covers of the cells by solid boxes."""
    boxes = _solid_boxes(cells)
    box_sets = [_box_cells(a, s) for a, s in boxes]
    by_cell: dict[Position, list[int]] = {c: [] for c in cells}
    for idx, cell_set in enumerate(box_sets):
        for c in cell_set:
            by_cell[c].append(idx)
    # largest boxes first makes the bound below bite sooner
    for lst in by_cell.values():
        lst.sort(key=lambda i: -len(box_sets[i]))
    max_size = max(len(s) for s in box_sets)

    for k in range(1, len(cells) + 1):
        found: list[list[int]] = []

        def search(uncovered: frozenset[Position], chosen: list[int]) -> None:
            if not uncovered:
                found.append(list(chosen))
                return
            remaining = k - len(chosen)
            if remaining <= 0 or remaining * max_size < len(uncovered):
                return
            pivot = min(uncovered, key=Position.yxz)
            for idx in by_cell[pivot]:
                if box_sets[idx] <= uncovered:
                    chosen.append(idx)
                    search(uncovered - box_sets[idx], chosen)
                    chosen.pop()

        search(cells, [])
        if found:
            return [[boxes[i] for i in cover] for cover in found]
    raise NoCoverError()


def decompose(blocks) -> list[tuple[CoverPart, ...]]:
    """Minimal exact covers of a block set by primitives, one color per part.

    ``blocks`` is a mapping position -> color, or a bare position collection
    (treated as a single color).
    """
    if not isinstance(blocks, Mapping):
        blocks = {Position(*p): Color.RED for p in blocks}
    if len(blocks) > MAX_INSTANCE_BLOCKS:
        raise TooLargeError(len(blocks))
    if not blocks:
        raise NoCoverError()

    by_color: dict[Color, set[Position]] = {}
    for pos, color in blocks.items():
        by_color.setdefault(color, set()).add(Position(*pos))

    per_color_covers = []
    for color in sorted(by_color, key=lambda c: c.value):
        covers = _min_exact_covers(frozenset(by_color[color]))
        parts_options = []
        for cover in covers:
            parts = tuple(sorted(
                (CoverPart(*box_kind(size), anchor=anchor, color=color)
                 for anchor, size in cover),
                key=CoverPart.sort_key,
            ))
            parts_options.append(parts)
        per_color_covers.append(parts_options)

    combined = []
    for combo in itertools.product(*per_color_covers):
        parts = tuple(sorted((p for group in combo for p in group),
                             key=CoverPart.sort_key))
        combined.append(parts)
    combined.sort(key=lambda cover: [p.sort_key() for p in cover])
    # different color interleavings can collapse to the same part list
    deduped = []
    for cover in combined:
        if not deduped or deduped[-1] != cover:
            deduped.append(cover)
    return deduped

# --- hypothesis enumeration -------------------------------------------------------

@dataclass(frozen=True)
class PartHypothesis:
    """A cover part with every numeric field lifted to a dimension expression."""

    kind: str
    dims: tuple[DimExpr, ...]
    offset: tuple[DimExpr, DimExpr, DimExpr]
    color: Optional[Color] = None


@dataclass(frozen=True)
class ConceptHypothesis:
    parts: tuple[PartHypothesis, ...]

    def preference_key(self) -> tuple:
        ranks = tuple(
            expr_rank(e)
            for part in self.parts
            for e in (*part.dims, *part.offset)
        )
        detail = tuple(
            (part.kind,
             tuple(expr_sort_key(e) for e in part.dims),
             tuple(expr_sort_key(e) for e in part.offset),
             part.color.value if part.color else "")
            for part in self.parts
        )
        return (ranks, detail)


def _candidates(value: int, params: tuple[tuple[str, int], ...],
                minimum: int) -> list[DimExpr]:
    """All expressions evaluating to ``value`` at the training valuation."""
    out: list[DimExpr] = []
    out.extend(Param(p) for p, t in params if t == value)
    out.extend(ParamMinus1(p) for p, t in params if t - 1 == value)
    out.extend(ParamPlus1(p) for p, t in params if t + 1 == value)
    if value >= minimum:
        out.append(Const(value))
    return out


def parts_extent(parts, valuation: Mapping[str, int],
                 repo=None) -> Optional[frozenset[Position]]:
    """Evaluated cell set of a part list; None when the geometry breaks down.

    Breaks down = a dimension below 1, overlapping parts, or a disconnected
    union. These are the admissibility rules of the hypothesis space, and
    learned definitions are read under the same rules.
    """
    cells: set[Position] = set()
    for part in parts:
        dims = tuple(eval_expr(e, valuation) for e in part.dims)
        if any(d < 1 for d in dims):
            return None
        anchor = Position(*(eval_expr(e, valuation) for e in part.offset))
        schema = BUILTIN_SCHEMAS.get(part.kind)
        if schema is not None:
            part_cells = extent(part.kind, dict(zip(schema.params, dims)), anchor)
        elif repo is not None:
            part_cells = extent(part.kind, dict(zip(repo.schema(part.kind).params, dims)),
                                anchor, repo)
        else:
            raise InductionError(f"unknown part kind {part.kind!r}")
        if cells & part_cells:
            return None
        cells |= part_cells
    if not connected(cells):
        return None
    return frozenset(cells)


def hypothesis_extent(hypothesis: ConceptHypothesis,
                      valuation: Mapping[str, int]) -> Optional[frozenset[Position]]:
    return parts_extent(hypothesis.parts, valuation)


def generalize(covers: Sequence[tuple[CoverPart, ...]],
               instance: TrainingInstance) -> list[ConceptHypothesis]:
    """Every parameterization of every cover that stays geometrically sane."""
    if not covers:
        raise NoConsistentHypothesisError()
    params = instance.params
    param_names = [p for p, _ in params]
    anchor0 = instance.anchor
    monochrome = len({color for _, color in instance.blocks}) == 1

    survivors: set[ConceptHypothesis] = set()
    grid = [dict(zip(param_names, values))
            for values in itertools.product(PRUNE_VALUES, repeat=len(param_names))]

    for cover in covers:
        field_options: list[list[DimExpr]] = []
        for part in cover:
            for value in part.dims:
                field_options.append(_candidates(value, params, minimum=1))
            offset = (part.anchor.x - anchor0.x, part.anchor.y - anchor0.y,
                      part.anchor.z - anchor0.z)
            for value in offset:
                field_options.append(_candidates(value, params, minimum=0))
        if any(not options for options in field_options):
            continue
        for combo in itertools.product(*field_options):
            cursor = 0
            parts = []
            for part in cover:
                n_dims = len(part.dims)
                dims = tuple(combo[cursor:cursor + n_dims])
                offset = tuple(combo[cursor + n_dims:cursor + n_dims + 3])
                cursor += n_dims + 3
                parts.append(PartHypothesis(
                    kind=part.kind, dims=dims, offset=offset,
                    color=None if monochrome else part.color,
                ))
            hypothesis = ConceptHypothesis(tuple(parts))
            if all(hypothesis_extent(hypothesis, v) is not None for v in grid):
                survivors.add(hypothesis)

    if not survivors:
        raise NoConsistentHypothesisError()
    return sorted(survivors, key=ConceptHypothesis.preference_key)


# --- yes/no query episodes ---------------------------------------------------------

@dataclass(frozen=True)
class YesNoQuery:
    """One membership question: at this valuation, is the block count exactly N?"""

    valuation: tuple[tuple[str, int], ...]
    text: str
    expected_count: int
    agree: tuple[ConceptHypothesis, ...]
    disagree: tuple[ConceptHypothesis, ...]


def query_text(valuation: tuple[tuple[str, int], ...], count: int) -> str:
    clause = " and its ".join(f"{p} were {v}" for p, v in valuation)
    noun = "block" if count == 1 else "blocks"
    return f"If its {clause}, would it contain exactly {count} {noun}?"


class InductionEpisode:
    """Version-space refinement over one training instance, budgeted to 5 queries."""

    def __init__(self, instance: TrainingInstance,
                 hypotheses: Sequence[ConceptHypothesis],
                 max_queries: int = MAX_QUERIES,
                 value_range: tuple[int, int] = QUERY_VALUE_RANGE):
        self.instance = instance
        self.live: list[ConceptHypothesis] = sorted(
            hypotheses, key=ConceptHypothesis.preference_key)
        self.max_queries = max_queries
        self.value_range = value_range
        self.queries_asked = 0
        self.contradictions = 0
        self._asked: set[tuple[tuple[str, int], ...]] = set()
        self._extents: dict[tuple, Optional[frozenset[Position]]] = {}

    def _extent(self, hypothesis: ConceptHypothesis,
                valuation: tuple[tuple[str, int], ...]) -> Optional[frozenset[Position]]:
        key = (hypothesis, valuation)
        if key not in self._extents:
            self._extents[key] = hypothesis_extent(hypothesis, dict(valuation))
        return self._extents[key]

    def predicted_count(self, hypothesis: ConceptHypothesis,
                        valuation: tuple[tuple[str, int], ...]) -> Optional[int]:
        cells = self._extent(hypothesis, valuation)
        return None if cells is None else len(cells)

    def _valuations(self):
        names = [p for p, _ in self.instance.params]
        training = dict(self.instance.params)
        lo, hi = self.value_range
        combos = itertools.product(range(lo, hi + 1), repeat=len(names))
        keyed = []
        for values in combos:
            distance = sum(abs(v - training[p]) for p, v in zip(names, values))
            keyed.append((distance, values))
        for _, values in sorted(keyed):
            yield tuple(zip(names, values))

    def next_query(self) -> Optional[YesNoQuery]:
        """The nearest valuation where live hypotheses disagree on block count."""
        if len(self.live) <= 1 or self.queries_asked >= self.max_queries:
            return None
        for valuation in self._valuations():
            if valuation in self._asked:
                continue
            counts = [self.predicted_count(h, valuation) for h in self.live]
            expected = next((c for c in counts if c is not None), None)
            if expected is None or all(c == expected for c in counts):
                continue
            agree = tuple(h for h, c in zip(self.live, counts) if c == expected)
            disagree = tuple(h for h, c in zip(self.live, counts) if c != expected)
            return YesNoQuery(
                valuation=valuation,
                text=query_text(valuation, expected),
                expected_count=expected,
                agree=agree,
                disagree=disagree,
            )
        return None  # indistinguishable within range: caller finalizes by preference

    def update(self, query: YesNoQuery, answer: bool) -> bool:
        """Prune by the answer; on a contradictory (empty) outcome keep the set."""
        self.queries_asked += 1
        self._asked.add(query.valuation)
        keep = set(query.agree if answer else query.disagree)
        remaining = [h for h in self.live if h in keep]
        if not remaining:
            self.contradictions += 1
            return False
        self.live = remaining
        return True

    def chosen(self) -> ConceptHypothesis:
        return self.live[0]


def finalize(chosen: ConceptHypothesis, instance: TrainingInstance) -> ConceptDefinition:
    """Freeze the surviving hypothesis into a repository-ready definition."""
    params = tuple(p for p, _ in instance.params)
    parts = tuple(
        ConceptPart(kind=p.kind, dims=p.dims, offset=p.offset, color=p.color)
        for p in chosen.parts
    )
    return build_definition(instance.name, params, parts)
