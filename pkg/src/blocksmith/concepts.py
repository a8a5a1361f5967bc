"""Parameterized structure definitions: dimension expressions, parts, serialization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .forms import (
    Atom,
    BUILTIN_SCHEMAS,
    Constant,
    HornClause,
    IntConst,
    Shift,
    SlotSchema,
    Variable,
    render_clause,
)
from .world import Color


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class ParamMinus1:
    name: str


@dataclass(frozen=True)
class ParamPlus1:
    name: str


DimExpr = Union[Const, Param, ParamMinus1, ParamPlus1]

# Preference order used when ranking hypotheses: generalize before specializing.
_EXPR_RANK = {Param: 0, ParamMinus1: 1, ParamPlus1: 2, Const: 3}


def expr_rank(expr: DimExpr) -> int:
    return _EXPR_RANK[type(expr)]


def eval_expr(expr: DimExpr, valuation: Mapping[str, int]) -> int:
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Param):
        return valuation[expr.name]
    if isinstance(expr, ParamMinus1):
        return valuation[expr.name] - 1
    return valuation[expr.name] + 1


def render_expr(expr: DimExpr) -> str:
    if isinstance(expr, Const):
        return str(expr.value)
    if isinstance(expr, Param):
        return expr.name
    if isinstance(expr, ParamMinus1):
        return f"{expr.name} - 1"
    return f"{expr.name} + 1"


def expr_sort_key(expr: DimExpr) -> tuple:
    if isinstance(expr, Const):
        return (expr_rank(expr), "", expr.value)
    return (expr_rank(expr), expr.name, 0)


def expr_term(expr: DimExpr, variables: Mapping[str, str]):
    """Horn-clause term for an expression, given the param -> variable naming."""
    if isinstance(expr, Const):
        return IntConst(expr.value)
    if isinstance(expr, Param):
        return Variable(variables[expr.name])
    if isinstance(expr, ParamMinus1):
        return Shift(variables[expr.name], -1)
    return Shift(variables[expr.name], +1)


def expr_to_record(expr: DimExpr) -> dict:
    if isinstance(expr, Const):
        return {"expr": "const", "value": expr.value}
    tag = {Param: "param", ParamMinus1: "param-1", ParamPlus1: "param+1"}[type(expr)]
    return {"expr": tag, "name": expr.name}


def expr_from_record(record: dict) -> DimExpr:
    tag = record["expr"]
    if tag == "const":
        return Const(record["value"])
    cls = {"param": Param, "param-1": ParamMinus1, "param+1": ParamPlus1}[tag]
    return cls(record["name"])


@dataclass(frozen=True)
class ConceptPart:
    """One component structure; color None means it inherits the concept color."""

    kind: str
    dims: tuple[DimExpr, ...]
    offset: tuple[DimExpr, DimExpr, DimExpr]
    color: Optional[Color] = None


@dataclass(frozen=True)
class ConceptDefinition:
    """A learned structure kind: schema params, component parts, and explanations."""

    name: str
    params: tuple[str, ...]
    parts: tuple[ConceptPart, ...]
    clause: HornClause
    clause_text: str
    explanation: str

    def schema(self) -> SlotSchema:
        return SlotSchema(self.name, self.params)

    @property
    def declared_variables(self) -> tuple[str, ...]:
        """Clause variables for the declared slots: the color plus each parameter."""
        names = _variable_names(self.params)
        return ("C", *(names[p] for p in self.params))

    def to_record(self) -> dict:
        return {
            "name": self.name,
            "params": list(self.params),
            "parts": [
                {
                    "kind": part.kind,
                    "color": part.color.value if part.color else None,
                    "dims": [expr_to_record(e) for e in part.dims],
                    "offset": [expr_to_record(e) for e in part.offset],
                }
                for part in self.parts
            ],
            "clause": self.clause_text,
            "explanation": self.explanation,
        }


def definition_from_record(record: dict) -> ConceptDefinition:
    parts = tuple(
        ConceptPart(
            kind=p["kind"],
            dims=tuple(expr_from_record(e) for e in p["dims"]),
            offset=tuple(expr_from_record(e) for e in p["offset"]),
            color=Color(p["color"]) if p["color"] else None,
        )
        for p in record["parts"]
    )
    return build_definition(record["name"], tuple(record["params"]), parts)


def _variable_names(params: tuple[str, ...]) -> dict[str, str]:
    """Map param names to clause variables: initial letter, full name on collision."""
    names: dict[str, str] = {}
    taken = {"C"}
    for p in params:
        candidate = p[0].upper()
        if candidate in taken:
            candidate = p.upper()
        taken.add(candidate)
        names[p] = candidate
    return names


def build_definition(name: str, params: tuple[str, ...],
                     parts: tuple[ConceptPart, ...]) -> ConceptDefinition:
    """Assemble the clause and explanation text for a chosen decomposition."""
    variables = _variable_names(params)
    head = Atom(name, (Variable("C"), *(Variable(variables[p]) for p in params)))
    body = []
    for part in parts:
        color_term = Constant(part.color.value) if part.color else Variable("C")
        args = (color_term,
                *(expr_term(e, variables) for e in part.dims),
                *(expr_term(e, variables) for e in part.offset))
        body.append(Atom(part.kind, args))
    clause = HornClause(head, tuple(body))

    descriptions = []
    for part in parts:
        color_text = f"{part.color.value} " if part.color else ""
        dims_text = ""
        if part.dims:
            schema = BUILTIN_SCHEMAS.get(part.kind)
            labels = schema.params if schema else tuple(f"d{i}" for i in range(len(part.dims)))
            dims_text = " of " + " and ".join(
                f"{label} = {render_expr(e)}" for label, e in zip(labels, part.dims))
        offset_text = ", ".join(render_expr(e) for e in part.offset)
        descriptions.append(f"a {color_text}{part.kind}{dims_text} at ({offset_text})")
    color_note = "" if any(p.color for p in parts) else ", all in one color,"
    explanation = (f"IF it is made of {' and '.join(descriptions)}{color_note} "
                   f"THEN this is a {name}")
    return ConceptDefinition(
        name=name,
        params=params,
        parts=parts,
        clause=clause,
        clause_text=render_clause(clause),
        explanation=explanation,
    )
