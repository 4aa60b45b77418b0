"""Essence element types, the document container, and the dotted-id scheme.

Every declarable element is a frozen dataclass; a document is an ordered
tuple of top-level declarations. Source spans ride along for diagnostics
but never participate in equality, so two parses of the same text compare
equal regardless of origin.

Element identity is a lowercase dotted id derived from kind and slugged
name (``competency.governance``). Elements owned by a practice are
qualified by their containment path (``practice.phase_a/space.define_scope/
activity.define_the_breadth_of_coverage``), which doubles as the element
path in diagnostics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Iterator, Union

from .diagnostics import SourceSpan


class Area(Enum):
    """The three areas of concern; the name-to-color pairing is fixed."""

    CUSTOMER = "Customer"
    SOLUTION = "Solution"
    ENDEAVOR = "Endeavor"

    @property
    def color(self) -> str:
        return _AREA_COLORS[self]

    @classmethod
    def from_name(cls, name: str) -> "Area":
        try:
            return cls(name)
        except ValueError:
            raise KeyError(name) from None


_AREA_COLORS = {
    Area.CUSTOMER: "green",
    Area.SOLUTION: "yellow",
    Area.ENDEAVOR: "blue",
}


class WorkProductCategory(Enum):
    CATALOG = "catalog"
    MATRIX = "matrix"
    DIAGRAM = "diagram"
    OTHER = "other"


#: Competencies of the standard kernel; everything else is an extension.
KERNEL_COMPETENCIES = (
    "Stakeholder Representation",
    "Analysis",
    "Development",
    "Testing",
    "Leadership",
    "Management",
)

#: Tag vocabulary accepted on togaf_phase activity specifications.
ACTIVITY_TAGS = (
    "acquires_information",
    "understands_stakeholders",
    "processes_requirements",
    "endorses_requirements",
    "builds",
    "verifies",
    "leads",
    "coordinates",
    "governs",
)

#: The complete universe of ADM phase ids.
PHASE_IDS = ("P", "A", "B", "C", "D", "E", "F", "G", "H", "RM")

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slug(name: str) -> str:
    """Lowercase identifier fragment for a display name.

    Runs of non-alphanumerics collapse to a single underscore; a name that
    yields nothing (e.g. pure punctuation) is rejected.
    """
    out = _SLUG_RE.sub("_", name.lower()).strip("_")
    if not out:
        raise ValueError(f"cannot derive an identifier from name {name!r}")
    return out


def dotted_id(kind: str, name: str) -> str:
    return f"{kind}.{slug(name)}"


def _span_field():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class AreaDecl:
    """A kernel's declaration that an area of concern is in play."""

    kind: ClassVar[str] = "area"
    area: Area
    span: SourceSpan | None = _span_field()

    @property
    def name(self) -> str:
        return self.area.value


@dataclass(frozen=True)
class ChecklistItem:
    """One checklist entry; ``key`` is '<state-index>.<item-index>', 1-based."""

    text: str
    key: str


@dataclass(frozen=True)
class AlphaState:
    kind: ClassVar[str] = "state"
    name: str
    checklist: tuple[str, ...]
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Alpha:
    """An essential thing to work with, progressing through ordered states."""

    kind: ClassVar[str] = "alpha"
    name: str
    area: Area
    states: tuple[AlphaState, ...]
    span: SourceSpan | None = _span_field()

    def items(self) -> Iterator[tuple[AlphaState, ChecklistItem]]:
        """All checklist items with their positional keys, in ladder order."""
        for si, state in enumerate(self.states, 1):
            for ci, text in enumerate(state.checklist, 1):
                yield state, ChecklistItem(text=text, key=f"{si}.{ci}")

    def item_keys(self) -> tuple[str, ...]:
        return tuple(item.key for _, item in self.items())


@dataclass(frozen=True)
class Competency:
    kind: ClassVar[str] = "competency"
    name: str
    area: Area
    max_level: int = 5
    span: SourceSpan | None = _span_field()

    @property
    def kernel_builtin(self) -> bool:
        return self.name in KERNEL_COMPETENCIES


@dataclass(frozen=True)
class CompetencyGrade:
    """A (competency, level) pair: required by an activity or held by a role."""

    competency: str
    level: int


@dataclass(frozen=True)
class Contribution:
    """An activity's contribution to a work product, optionally naming the part."""

    work_product: str
    part: str | None = None

    def rendered_name(self) -> str:
        if self.part is not None:
            return f"{self.work_product}: {self.part}"
        return self.work_product

    @classmethod
    def from_text(cls, text: str) -> "Contribution":
        """Split 'Name: part' at the first ': '; no separator means no part."""
        name, sep, part = text.partition(": ")
        if sep:
            return cls(work_product=name, part=part)
        return cls(work_product=text)


@dataclass(frozen=True)
class WorkProduct:
    """A tangible output; doubles as a phase spec's output declaration."""

    kind: ClassVar[str] = "workproduct"
    name: str
    category: WorkProductCategory = WorkProductCategory.OTHER
    description: str | None = None
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Activity:
    """An atomic unit of work inside an activity space.

    ``requires``/``role`` reference competencies and roles by name;
    ``produces`` references work products in the owning practice's scope.
    ``tags`` is inert metadata the grammar allows on practice activities.
    """

    kind: ClassVar[str] = "activity"
    name: str
    requires: tuple[CompetencyGrade, ...] = ()
    produces: tuple[Contribution, ...] = ()
    role: str | None = None
    tags: tuple[str, ...] = ()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Space:
    """An activity space.

    Declared at kernel level it carries an explicit area and an optional
    by-name ``parent``; inside a practice it is a tree node whose
    ``members`` interleave child spaces and activities in source order and
    whose area defaults to the practice's.
    """

    kind: ClassVar[str] = "space"
    name: str
    area: Area | None = None
    parent: str | None = None
    goal: str | None = None
    members: tuple[Union["Space", Activity], ...] = ()
    span: SourceSpan | None = _span_field()

    def child_spaces(self) -> tuple["Space", ...]:
        return tuple(m for m in self.members if isinstance(m, Space))

    def activities(self) -> tuple[Activity, ...]:
        return tuple(m for m in self.members if isinstance(m, Activity))

    def subtree_activities(self) -> Iterator[Activity]:
        for member in self.members:
            if isinstance(member, Activity):
                yield member
            else:
                yield from member.subtree_activities()


@dataclass(frozen=True)
class Practice:
    """A goal-bearing, repeatable way of doing work.

    ``members`` normally holds only spaces; a bare Activity at practice
    level is constructible programmatically and is exactly what
    well-formedness rule V016 rejects.
    """

    kind: ClassVar[str] = "practice"
    name: str
    area: Area
    goals: tuple[str, ...]
    inputs: tuple[str, ...] = ()
    outputs: tuple[WorkProduct, ...] = ()
    members: tuple[Space | Activity, ...] = ()
    span: SourceSpan | None = _span_field()

    def spaces(self) -> tuple[Space, ...]:
        return tuple(m for m in self.members if isinstance(m, Space))

    def stray_activities(self) -> tuple[Activity, ...]:
        return tuple(m for m in self.members if isinstance(m, Activity))

    def all_activities(self) -> Iterator[Activity]:
        for member in self.members:
            if isinstance(member, Activity):
                yield member
            else:
                yield from member.subtree_activities()

    def output(self, name: str) -> WorkProduct | None:
        for wp in self.outputs:
            if wp.name == name:
                return wp
        return None


@dataclass(frozen=True)
class Role:
    kind: ClassVar[str] = "role"
    name: str
    competencies: tuple[CompetencyGrade, ...]
    span: SourceSpan | None = _span_field()

    def level_for(self, competency: str) -> int | None:
        for grade in self.competencies:
            if grade.competency == competency:
                return grade.level
        return None


@dataclass(frozen=True)
class Method:
    """A set of practices plus the shape of their enactment.

    ``preamble`` runs once before the first cycle; ``cycle`` repeats in
    order forever; ``concurrent`` practices are active alongside whatever
    is current. All references are practice names.
    """

    kind: ClassVar[str] = "method"
    name: str
    cycle: tuple[str, ...]
    preamble: str | None = None
    concurrent: tuple[str, ...] = ()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class ActivitySpec:
    """An action inside a TOGAF step: either tagged (atomic) or decomposed."""

    name: str
    tags: tuple[str, ...] = ()
    feeds: tuple[Contribution, ...] = ()
    role: str | None = None
    sub_activities: tuple["ActivitySpec", ...] = ()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class StepSpec:
    name: str
    goal: str | None = None
    activities: tuple[ActivitySpec, ...] = ()
    span: SourceSpan | None = _span_field()

    def spec_count(self) -> int:
        """Total activity specifications in the step, parents included."""
        count = 0
        stack = list(self.activities)
        while stack:
            spec = stack.pop()
            count += 1
            stack.extend(spec.sub_activities)
        return count


@dataclass(frozen=True)
class TogafPhase:
    """Structured input for one ADM phase: objective, steps, and outputs."""

    kind: ClassVar[str] = "phase"
    phase: str
    name: str
    objective: str
    steps: tuple[StepSpec, ...] = ()
    outputs: tuple[WorkProduct, ...] = ()
    span: SourceSpan | None = _span_field()

    def output(self, name: str) -> WorkProduct | None:
        for wp in self.outputs:
            if wp.name == name:
                return wp
        return None


KernelMember = Union[AreaDecl, Alpha, Competency, Space, WorkProduct]


@dataclass(frozen=True)
class Kernel:
    """A named grouping of kernel-level declarations."""

    kind: ClassVar[str] = "kernel"
    name: str
    members: tuple[KernelMember, ...] = ()
    span: SourceSpan | None = _span_field()

    def areas(self) -> tuple[AreaDecl, ...]:
        return tuple(m for m in self.members if isinstance(m, AreaDecl))

    def alphas(self) -> tuple[Alpha, ...]:
        return tuple(m for m in self.members if isinstance(m, Alpha))

    def competencies(self) -> tuple[Competency, ...]:
        return tuple(m for m in self.members if isinstance(m, Competency))

    def spaces(self) -> tuple[Space, ...]:
        return tuple(m for m in self.members if isinstance(m, Space))

    def work_products(self) -> tuple[WorkProduct, ...]:
        return tuple(m for m in self.members if isinstance(m, WorkProduct))


Declaration = Union[Kernel, Practice, Method, Role, TogafPhase]

Element = Union[
    Kernel, AreaDecl, Alpha, AlphaState, Competency, Space, WorkProduct,
    Activity, Practice, Role, Method, TogafPhase,
]


def element_name(element) -> str:
    return element.name


def walk_element(element, owner_id: str | None = None) -> Iterator[tuple[str, Element]]:
    """Yield (id, element) for an element and everything it contains, pre-order.

    Kernel members are document-level (their ids carry no kernel prefix);
    everything owned by a practice, space, alpha, or phase is qualified by
    the owner's id. Phases are identified by their letter, not their name.
    """
    own_id = element_id(element, owner_id)
    yield own_id, element
    if isinstance(element, Kernel):
        for member in element.members:
            yield from walk_element(member, None)
    elif isinstance(element, Alpha):
        for state in element.states:
            yield f"{own_id}/{dotted_id('state', state.name)}", state
    elif isinstance(element, (Space, Practice)):
        if isinstance(element, Practice):
            for wp in element.outputs:
                yield f"{own_id}/{dotted_id('workproduct', wp.name)}", wp
        for member in element.members:
            yield from walk_element(member, own_id)
    elif isinstance(element, TogafPhase):
        for wp in element.outputs:
            yield f"{own_id}/{dotted_id('workproduct', wp.name)}", wp


def element_id(element, owner_id: str | None = None) -> str:
    prefix = f"{owner_id}/" if owner_id else ""
    if isinstance(element, TogafPhase):
        return prefix + dotted_id("phase", element.phase)
    return prefix + dotted_id(element.kind, element_name(element))


class ModelDocument:
    """Parsed declarations in source order with a document-wide id index.

    Immutable once built; equality compares the declaration tuples (spans
    excluded by the element dataclasses), so structural round-trip checks
    are plain ``==``.
    """

    def __init__(self, declarations=()):
        self.declarations: tuple[Declaration, ...] = tuple(declarations)
        index: dict[str, Element] = {}
        order: dict[str, int] = {}
        collisions: list[tuple[str, Element, Element]] = []
        seq = 0
        for ident, element in self.walk():
            if ident in index:
                collisions.append((ident, index[ident], element))
            else:
                index[ident] = element
                order[ident] = seq
            seq += 1
        self._index = index
        self._order = order
        self._collisions = tuple(collisions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelDocument):
            return NotImplemented
        return self.declarations == other.declarations

    def __hash__(self) -> int:
        return hash(self.declarations)

    def __repr__(self) -> str:
        return f"ModelDocument({len(self.declarations)} declarations)"

    def walk(self) -> Iterator[tuple[str, Element]]:
        for declaration in self.declarations:
            yield from walk_element(declaration)

    def id_collisions(self) -> tuple[tuple[str, Element, Element], ...]:
        """Duplicate ids, as (id, first element, later element) triples."""
        return self._collisions

    def lookup(self, ident: str) -> Element | None:
        """The element with that id, or None; absence is a value, not an error."""
        return self._index.get(ident)

    def path_of(self, element) -> str | None:
        for ident, candidate in self._index.items():
            if candidate is element:
                return ident
        return None

    def order_of(self, ident: str) -> int:
        return self._order.get(ident, len(self._order))

    def iter_elements(self, kind: str) -> tuple[Element, ...]:
        """All elements of one kind in declaration order."""
        return tuple(e for _, e in self.walk() if getattr(e, "kind", None) == kind)

    # Convenience accessors over top-level declarations.

    def kernels(self) -> tuple[Kernel, ...]:
        return tuple(d for d in self.declarations if isinstance(d, Kernel))

    def practices(self) -> tuple[Practice, ...]:
        return tuple(d for d in self.declarations if isinstance(d, Practice))

    def methods(self) -> tuple[Method, ...]:
        return tuple(d for d in self.declarations if isinstance(d, Method))

    def roles(self) -> tuple[Role, ...]:
        return tuple(d for d in self.declarations if isinstance(d, Role))

    def phases(self) -> tuple[TogafPhase, ...]:
        return tuple(d for d in self.declarations if isinstance(d, TogafPhase))


def merge(*documents: ModelDocument) -> ModelDocument:
    """One document holding every input's declarations, in input order."""
    declarations: list[Declaration] = []
    for document in documents:
        declarations.extend(document.declarations)
    return ModelDocument(declarations)


def lookup(document: ModelDocument, ident: str) -> Element | None:
    return document.lookup(ident)


def iter_elements(document: ModelDocument, kind: str) -> tuple[Element, ...]:
    return document.iter_elements(kind)
