"""Template-grammar parser turning architect chat lines into structured messages.

Templates live in ``data/grammar.txt`` and are tried in file order; parsing is a
pure function of (utterance, context) and never raises on user input — anything
the grammar does not cover comes back as ``Unknown``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping, Optional, Union

from .forms import (
    Absolute,
    DEFAULT_PLACEMENT,
    BUILTIN_SCHEMAS,
    IncompleteFormError,
    InstructionForm,
    MISSING,
    Placement,
    PRIMITIVE_KINDS,
    Relative,
    SlotSchema,
    check_completeness,
    make_form,
    render_form,
)
from .planner import InstanceRegistry, default_indicator, valid_indicators
from .world import COLOR_NAMES, Color, Position

NUMBER_WORDS = {
    "one": 1, "two": 2, "three": 3, "four": 4, "five": 5,
    "six": 6, "seven": 7, "eight": 8, "nine": 9, "ten": 10,
}

PARAM_WORDS = ("height", "width", "length", "size", "depth", "gap")

UNIT_SLOTS = {
    "tall": "height",
    "high": "height",
    "wide": "width",
    "long": "length",
    "deep": "length",
}

DIRECTION_PHRASES = {
    "on top of": "up",
    "above": "up",
    "over": "up",
    "under": "down",
    "below": "down",
    "beneath": "down",
    "to the left of": "left",
    "to the right of": "right",
    "in front of": "front",
    "behind": "back",
}

CANONICAL_PHRASES = {
    "up": "on top of",
    "down": "under",
    "left": "to the left of",
    "right": "to the right of",
    "front": "in front of",
    "back": "behind",
}

_ALL_INDICATORS = (
    "left-end", "right-end", "front-end", "back-end", "self", "top", "bottom",
) + tuple(
    f"{y}-{x}-{z}"
    for y in ("bottom", "top")
    for x in ("left", "right")
    for z in ("front", "back")
)


# --- parsed messages ---------------------------------------------------------

@dataclass(frozen=True)
class BuildInstruction:
    form: InstructionForm


@dataclass(frozen=True)
class UndoCommand:
    pass


@dataclass(frozen=True)
class SaveAccept:
    pass


@dataclass(frozen=True)
class SaveDecline:
    pass


@dataclass(frozen=True)
class NameDeclaration:
    name: str


@dataclass(frozen=True)
class DimensionDeclaration:
    dims: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class YesNoAnswer:
    value: bool


@dataclass(frozen=True)
class SlotAnswer:
    slot: Optional[str]
    value: Union[int, Color]


@dataclass(frozen=True)
class Greeting:
    pass


@dataclass(frozen=True)
class Unknown:
    text: str


ParsedMessage = Union[
    BuildInstruction, UndoCommand, SaveAccept, SaveDecline, NameDeclaration,
    DimensionDeclaration, YesNoAnswer, SlotAnswer, Greeting, Unknown,
]


@dataclass
class ParseContext:
    """Dialogue context the parser needs: state tag, pending slot, vocab, referents."""

    state: str = "awaiting-instruction"
    pending_slot: Optional[str] = None
    known_kinds: tuple[str, ...] = PRIMITIVE_KINDS
    schemas: Mapping[str, SlotSchema] = field(default_factory=lambda: dict(BUILTIN_SCHEMAS))
    registry: Optional[InstanceRegistry] = None


class _Reject(Exception):
    """Template matched but its content cannot be resolved; message becomes Unknown."""


# --- grammar loading ----------------------------------------------------------

def _load_grammar() -> list[tuple[str, str]]:
    text = resources.files("blocksmith").joinpath("data/grammar.txt").read_text()
    templates = []
    for line in text.splitlines():
        line = line.rstrip()
        if not line or line.startswith("#"):
            continue
        name, _, pattern = line.partition("\t")
        templates.append((name, pattern))
    return templates


_GRAMMAR = _load_grammar()
_COMPILED: dict[tuple[str, ...], list[tuple[str, re.Pattern]]] = {}

_INT = r"(?:\d+|" + "|".join(NUMBER_WORDS) + r")"
_PARAM = "(?:" + "|".join(PARAM_WORDS) + ")"


def _macro_table(kinds: tuple[str, ...]) -> dict[str, str]:
    kind_alt = "|".join(re.escape(k) for k in sorted(kinds, key=len, reverse=True))
    dir_alt = "|".join(sorted(DIRECTION_PHRASES, key=len, reverse=True))
    ind_alt = "|".join(sorted(_ALL_INDICATORS, key=len, reverse=True))
    place = (
        r"(?P<place>"
        r"at (?P<px>\d+) (?P<py>\d+) (?P<pz>\d+)"
        rf"|(?P<dirph>{dir_alt})"
        rf"(?: the (?P<pind>{ind_alt}) of)?"
        rf" (?:(?:the|that) (?P<refkind>{kind_alt})|(?P<refit>it|that|this))"
        r")"
    )
    return {
        "color": r"(?P<color>" + "|".join(COLOR_NAMES) + r")",
        "kind": rf"(?P<kind>{kind_alt})",
        "int": rf"(?P<int>{_INT})",
        "name": r"(?P<name>[a-z][a-z0-9_-]*)",
        "word": r"(?P<word>[a-z0-9][a-z0-9_-]*)",
        "unit": r"(?P<unit>" + "|".join(UNIT_SLOTS) + r")",
        "dims": rf"(?P<dims>(?:of|with) {_PARAM} {_INT}(?: (?:and )?(?:its )?{_PARAM} {_INT})*)",
        "dimdecl": rf"(?P<dimdecl>its {_PARAM} is {_INT}(?: (?:and )?its {_PARAM} is {_INT})*)",
        "place": place,
    }


def _templates_for(kinds: tuple[str, ...]) -> list[tuple[str, re.Pattern]]:
    if kinds not in _COMPILED:
        macros = _macro_table(kinds)
        compiled = []
        for name, pattern in _GRAMMAR:
            expanded = pattern
            for macro, repl in macros.items():
                expanded = expanded.replace("{" + macro + "}", repl)
            compiled.append((name, re.compile(expanded)))
        _COMPILED[kinds] = compiled
    return _COMPILED[kinds]


def normalize(text: str) -> str:
    text = text.lower()
    text = re.sub(r"[.,!?;:'\"()]", " ", text)
    return re.sub(r"\s+", " ", text).strip()


def _int_value(token: str) -> int:
    return int(token) if token.isdigit() else NUMBER_WORDS[token]


# --- template builders ---------------------------------------------------------

def _pairs(span: str) -> list[tuple[str, int]]:
    found = re.findall(rf"({_PARAM}) (?:is )?({_INT})", span)
    return [(param, _int_value(value)) for param, value in found]


def _build_dims(span: Optional[str], schema: SlotSchema) -> dict[str, int]:
    if span is None:
        return {}
    dims: dict[str, int] = {}
    for param, value in _pairs(span):
        if param not in schema.params:
            if param == "size" and len(schema.params) == 1:
                param = schema.params[0]
            else:
                raise _Reject()
        if param in dims:
            raise _Reject()
        dims[param] = value
    return dims


def _build_placement(m: re.Match, ctx: ParseContext) -> Placement:
    if m.group("place") is None:
        return DEFAULT_PLACEMENT
    if m.group("px") is not None:
        return Absolute(Position(int(m.group("px")), int(m.group("py")),
                                 int(m.group("pz"))))
    direction = DIRECTION_PHRASES[m.group("dirph")]
    if ctx.registry is None:
        raise _Reject()
    ref = ctx.registry.most_recent(m.group("refkind"))
    if ref is None:
        raise _Reject()
    indicator_name = m.group("pind") or default_indicator(ref.kind, direction)
    if indicator_name not in valid_indicators(ref.kind):
        raise _Reject()
    return Relative(ref.id, ref.kind, indicator_name, direction)


def _on_build(m: re.Match, ctx: ParseContext, raw: str) -> ParsedMessage:
    kind = m.group("kind")
    schema = ctx.schemas.get(kind)
    if schema is None:
        raise _Reject()
    color = Color(m.group("color")) if m.group("color") else MISSING
    dims = _build_dims(m.group("dims"), schema)
    placement = _build_placement(m, ctx)
    form = make_form(kind, schema, color=color, dims=dims, placement=placement)
    return BuildInstruction(form)


def _on_affirm(m, ctx, raw):
    if ctx.state == "offering-save":
        return SaveAccept()
    return YesNoAnswer(True)


def _on_deny(m, ctx, raw):
    if ctx.state == "offering-save":
        return SaveDecline()
    return YesNoAnswer(False)


def _on_bare_word(m, ctx, raw):
    if ctx.state == "awaiting-name":
        return NameDeclaration(m.group("word"))
    return None


_BUILDERS = {
    "greeting": lambda m, ctx, raw: Greeting(),
    "undo": lambda m, ctx, raw: UndoCommand(),
    "affirm": _on_affirm,
    "deny": _on_deny,
    "save_request": lambda m, ctx, raw: SaveAccept(),
    "name_decl": lambda m, ctx, raw: NameDeclaration(m.group("name")),
    "name_decl_alt": lambda m, ctx, raw: NameDeclaration(m.group("name")),
    "dim_decl": lambda m, ctx, raw: DimensionDeclaration(tuple(_pairs(m.group("dimdecl")))),
    "slot_units": lambda m, ctx, raw: SlotAnswer(UNIT_SLOTS[m.group("unit")],
                                                 _int_value(m.group("int"))),
    "build": _on_build,
    "bare_color": lambda m, ctx, raw: SlotAnswer("color", Color(m.group("color"))),
    "bare_int": lambda m, ctx, raw: SlotAnswer(ctx.pending_slot, _int_value(m.group("int"))),
    "bare_word": _on_bare_word,
}


def parse(utterance: str, ctx: ParseContext) -> ParsedMessage:
    """Parse one chat line; deterministic, total, Unknown on anything uncovered."""
    text = normalize(utterance)
    if not text:
        return Unknown(utterance)
    for name, pattern in _templates_for(ctx.known_kinds):
        m = pattern.fullmatch(text)
        if m is None:
            continue
        try:
            message = _BUILDERS[name](m, ctx, utterance)
        except _Reject:
            return Unknown(utterance)
        if message is not None:
            return message
    return Unknown(utterance)


# --- canonical rendering ---------------------------------------------------------

def render_canonical(form: InstructionForm) -> str:
    """One grammar-covered utterance that parses back to exactly this form."""
    schema = SlotSchema(form.kind, tuple(form.dims))
    missing = check_completeness(form, schema)
    if missing:
        raise IncompleteFormError(missing)
    color = form.color.value
    article = "an" if color[0] in "aeiou" else "a"
    words = [f"build {article} {color} {form.kind}"]
    if form.dims:
        dims_text = " and ".join(f"{p} {v}" for p, v in form.dims.items())
        words.append(f"of {dims_text}")
    placement = form.placement
    if isinstance(placement, Absolute):
        words.append(f"at {placement.pos.x} {placement.pos.y} {placement.pos.z}")
    elif isinstance(placement, Relative):
        phrase = CANONICAL_PHRASES[placement.direction]
        if placement.indicator != default_indicator(placement.ref_kind,
                                                    placement.direction):
            phrase += f" the {placement.indicator} of"
        words.append(f"{phrase} the {placement.ref_kind}")
    return " ".join(words)


def render_message(message: ParsedMessage) -> str:
    """Compact canonical text for corpus files and transcripts."""
    if isinstance(message, BuildInstruction):
        return render_form(message.form)
    if isinstance(message, UndoCommand):
        return "undo"
    if isinstance(message, SaveAccept):
        return "save-accept"
    if isinstance(message, SaveDecline):
        return "save-decline"
    if isinstance(message, NameDeclaration):
        return f"name({message.name})"
    if isinstance(message, DimensionDeclaration):
        inner = ", ".join(f"{p}={v}" for p, v in message.dims)
        return f"dims({inner})"
    if isinstance(message, YesNoAnswer):
        return "yes" if message.value else "no"
    if isinstance(message, SlotAnswer):
        value = message.value.value if isinstance(message.value, Color) else message.value
        if message.slot is None:
            return f"answer({value})"
        return f"answer({message.slot}={value})"
    if isinstance(message, Greeting):
        return "greeting"
    return "unknown"
