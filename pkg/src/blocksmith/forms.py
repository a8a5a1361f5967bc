"""Predicate-logic instruction forms: slot frames, schemas, completeness, horn clauses."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Union

from .world import Color, Position


class FormError(Exception):
    pass


class UnknownKindError(FormError):
    def __init__(self, kind: str):
        super().__init__(f"unknown structure kind: {kind!r}")
        self.kind = kind


class IncompleteFormError(FormError):
    def __init__(self, missing: list[str]):
        super().__init__(f"form is missing slots: {', '.join(missing)}")
        self.missing = missing


class _Missing:
    """Explicit sentinel for an unfilled slot (kept distinct from None)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "?"


MISSING = _Missing()


# --- placements -------------------------------------------------------------

@dataclass(frozen=True)
class Absolute:
    pos: Position


@dataclass(frozen=True)
class Relative:
    """Placement next to a named block of an existing structure instance."""

    ref_id: int
    ref_kind: str
    indicator: str
    direction: str


@dataclass(frozen=True)
class Default:
    """No stated location; the builder picks a spot (centered on the ground)."""


DEFAULT_PLACEMENT = Default()

Placement = Union[Absolute, Relative, Default]


# --- slot schemas -----------------------------------------------------------

@dataclass(frozen=True)
class SlotSchema:
    kind: str
    params: tuple[str, ...]
    color_required: bool = True


BUILTIN_SCHEMAS: dict[str, SlotSchema] = {
    "block": SlotSchema("block", ()),
    "tower": SlotSchema("tower", ("height",)),
    "row": SlotSchema("row", ("width",)),
    "column": SlotSchema("column", ("length",)),
    "square": SlotSchema("square", ("size",)),
    "rectangle": SlotSchema("rectangle", ("width", "height")),
    "cube": SlotSchema("cube", ("size",)),
    "cuboid": SlotSchema("cuboid", ("width", "height", "length")),
}

PRIMITIVE_KINDS = tuple(BUILTIN_SCHEMAS)


# --- instruction forms ------------------------------------------------------

@dataclass
class InstructionForm:
    """Slot frame for one build instruction; unfilled slots hold MISSING."""

    kind: str
    color: Union[Color, _Missing]
    dims: dict[str, Union[int, _Missing]]
    placement: Placement = DEFAULT_PLACEMENT


def make_form(kind: str, schema: SlotSchema, color=MISSING,
              dims: Mapping[str, int] | None = None,
              placement: Placement = DEFAULT_PLACEMENT) -> InstructionForm:
    """Build a form whose dims keys exactly match the schema parameter list."""
    dims = dict(dims or {})
    unknown = set(dims) - set(schema.params)
    if unknown:
        raise ValueError(f"parameters {sorted(unknown)} not valid for {kind}")
    filled = {p: dims.get(p, MISSING) for p in schema.params}
    return InstructionForm(kind=kind, color=color, dims=filled, placement=placement)


def check_completeness(form: InstructionForm, schema: SlotSchema) -> list[str]:
    """Missing slots in canonical order: color first, then params in schema order."""
    if form.kind != schema.kind:
        raise UnknownKindError(form.kind)
    missing = []
    if schema.color_required and form.color is MISSING:
        missing.append("color")
    missing.extend(p for p in schema.params if form.dims.get(p, MISSING) is MISSING)
    return missing


def fill_slot(form: InstructionForm, slot: str, value) -> InstructionForm:
    if slot == "color":
        return replace(form, color=value)
    dims = dict(form.dims)
    dims[slot] = value
    return replace(form, dims=dims)


def render_form(form: InstructionForm) -> str:
    """Canonical transcript rendering, e.g. ``tower(color=red, height=3, placement=default)``."""
    parts = [f"color={_render_value(form.color)}"]
    parts.extend(f"{p}={_render_value(v)}" for p, v in form.dims.items())
    parts.append(f"placement={render_placement(form.placement)}")
    return f"{form.kind}({', '.join(parts)})"


def render_placement(placement: Placement) -> str:
    if isinstance(placement, Default):
        return "default"
    if isinstance(placement, Absolute):
        p = placement.pos
        return f"absolute({p.x},{p.y},{p.z})"
    return (f"relative({placement.ref_kind}#{placement.ref_id}, "
            f"{placement.indicator}, {placement.direction})")


def _render_value(value) -> str:
    if value is MISSING:
        return "?"
    if isinstance(value, Color):
        return value.value
    return str(value)


# --- HTN task values --------------------------------------------------------

@dataclass(frozen=True)
class Task:
    """A ground planning task; compound tasks are named build-<kind>."""

    name: str
    args: tuple

    def __repr__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.args))})"


def to_htn_task(form: InstructionForm, schema: SlotSchema) -> Task:
    """build-<kind>(color, dims in schema order, placement) for a complete form."""
    missing = check_completeness(form, schema)
    if missing:
        raise IncompleteFormError(missing)
    args = (form.color, *(form.dims[p] for p in schema.params), form.placement)
    return Task(f"build-{form.kind}", args)


# --- horn clauses -----------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    name: str


@dataclass(frozen=True)
class IntConst:
    value: int


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Shift:
    """A variable offset by +-1, as appears in induced definitions (W-1, H+1)."""

    var: str
    delta: int


Term = Union[Constant, IntConst, Variable, Shift]


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class HornClause:
    head: Atom
    body: tuple[Atom, ...]


def term_variables(term: Term) -> set[str]:
    if isinstance(term, Variable):
        return {term.name}
    if isinstance(term, Shift):
        return {term.var}
    return set()


def clause_variables(clause: HornClause) -> tuple[set[str], set[str]]:
    """(head variables, body variables) of a clause."""
    head_vars = set().union(*(term_variables(t) for t in clause.head.args)) \
        if clause.head.args else set()
    body_vars = set()
    for atom in clause.body:
        for term in atom.args:
            body_vars |= term_variables(term)
    return head_vars, body_vars


def clause_is_well_formed(clause: HornClause, declared=()) -> bool:
    """Head variables must occur in the body or be declared parameters, and the
    body must not invent variables absent from the head."""
    head_vars, body_vars = clause_variables(clause)
    return head_vars <= body_vars | set(declared) and body_vars <= head_vars


def render_term(term: Term) -> str:
    if isinstance(term, Constant):
        return term.name
    if isinstance(term, IntConst):
        return str(term.value)
    if isinstance(term, Variable):
        return term.name
    sign = "+" if term.delta >= 0 else "-"
    return f"{term.var} {sign} {abs(term.delta)}"


def render_atom(atom: Atom) -> str:
    return f"{atom.predicate}({', '.join(render_term(t) for t in atom.args)})"


def render_clause(clause: HornClause) -> str:
    body = ", ".join(render_atom(a) for a in clause.body)
    return f"{render_atom(clause.head)} :- {body}"
