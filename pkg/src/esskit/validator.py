"""Reference resolution and well-formedness checking.

``resolve`` turns by-name references into element identities and fails with
V001 (dangling reference) or V002 (duplicate name within a kind, scoped the
same way ids are). ``check_wellformedness`` applies the structural rule
catalog V010-V016 to a resolved model and returns every violation; it never
raises. Both are pure, so two runs over the same model produce identical
diagnostic lists.

Area references are not subject to V001: the three areas of concern form a
closed enumeration the parser already enforces, so a dangling area is
unrepresentable.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, ResolveError, Severity
from .model import (
    Activity,
    ActivitySpec,
    Alpha,
    Area,
    Competency,
    Kernel,
    Method,
    ModelDocument,
    Practice,
    Role,
    Space,
    TogafPhase,
    WorkProduct,
    dotted_id,
    element_id,
)

DANGLING_REFERENCE = "V001"
DUPLICATE_NAME = "V002"
PRACTICE_WITHOUT_GOAL = "V010"
NESTING_TOO_DEEP = "V011"
NESTING_CYCLE = "V012"
LEVEL_OUT_OF_RANGE = "V013"
MISSING_PART_TEXT = "V014"
AREA_MISMATCH = "V015"
ACTIVITY_WITHOUT_SPACE = "V016"


@dataclass(frozen=True)
class CheckConfig:
    """Knobs for well-formedness; depth counts the root space as 1."""

    max_nesting_depth: int = 3


@dataclass
class AreaProfile:
    """Per-area element counts for one practice, and the winning area(s).

    Counts are the practice's top-level spaces (by effective area) plus one
    per activity competency requirement (by the competency's area). The
    plurality is the argmax set, empty when nothing was counted, which makes
    the modeler's declared-area choice auditable without overriding it.
    """

    counts: dict[Area, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for area in Area:
            self.counts.setdefault(area, 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def plurality(self) -> frozenset[Area]:
        if self.total == 0:
            return frozenset()
        best = max(self.counts.values())
        return frozenset(a for a, n in self.counts.items() if n == best)


class ResolvedModel:
    """A document whose cross-references all landed, plus lookup tables."""

    def __init__(self, document: ModelDocument) -> None:
        self.document = document
        self.areas = {d.name: d for k in document.kernels() for d in k.areas()}
        self.alphas = {a.name: a for k in document.kernels() for a in k.alphas()}
        self.competencies = {c.name: c for k in document.kernels()
                             for c in k.competencies()}
        self.kernel_spaces = {s.name: s for k in document.kernels()
                              for s in k.spaces()}
        self.kernel_work_products = {w.name: w for k in document.kernels()
                                     for w in k.work_products()}
        self.roles = {r.name: r for r in document.roles()}
        self.practices = {p.name: p for p in document.practices()}
        self.methods = {m.name: m for m in document.methods()}
        self.phases = {p.phase: p for p in document.phases()}
        self.competency_order = {name: i for i, name
                                 in enumerate(self.competencies)}

    def competency_area(self, name: str) -> Area:
        return self.competencies[name].area

    def lookup(self, ident: str):
        return self.document.lookup(ident)


def resolve(document: ModelDocument) -> ResolvedModel:
    """Resolve every by-name reference, case-sensitively, document-wide.

    Raises :class:`ResolveError` carrying V001/V002 diagnostics when any
    reference dangles or any id is declared twice.
    """
    model = ResolvedModel(document)
    diagnostics: list[Diagnostic] = []

    for ident, first, second in document.id_collisions():
        first_at = first.span.location() if first.span else "an earlier declaration"
        diagnostics.append(Diagnostic(
            rule=DUPLICATE_NAME, severity=Severity.ERROR, path=ident,
            message=f"duplicate {second.kind} {second.name!r}; "
                    f"first declared at {first_at}",
            span=second.span))

    def dangling(path: str, span, kind: str, name: str) -> None:
        diagnostics.append(Diagnostic(
            rule=DANGLING_REFERENCE, severity=Severity.ERROR, path=path,
            message=f"reference to undeclared {kind} {name!r}", span=span))

    for kernel in document.kernels():
        for alpha in kernel.alphas():
            alpha_id = element_id(alpha)
            for state in alpha.states:
                seen: set[str] = set()
                for text in state.checklist:
                    if text in seen:
                        diagnostics.append(Diagnostic(
                            rule=DUPLICATE_NAME, severity=Severity.ERROR,
                            path=f"{alpha_id}/{dotted_id('state', state.name)}",
                            message=f"duplicate checklist item {text!r}",
                            span=state.span))
                    seen.add(text)
        for space in kernel.spaces():
            if space.parent is not None and space.parent not in model.kernel_spaces:
                dangling(element_id(space), space.span, "space", space.parent)

    for role in document.roles():
        for grade in role.competencies:
            if grade.competency not in model.competencies:
                dangling(element_id(role), role.span, "competency", grade.competency)

    for practice in document.practices():
        practice_id = element_id(practice)
        local_wps = {wp.name for wp in practice.outputs}
        for owner_id, activity in _practice_activities(practice, practice_id):
            activity_id = element_id(activity, owner_id)
            for grade in activity.requires:
                if grade.competency not in model.competencies:
                    dangling(activity_id, activity.span, "competency",
                             grade.competency)
            if activity.role is not None and activity.role not in model.roles:
                dangling(activity_id, activity.span, "role", activity.role)
            for contribution in activity.produces:
                name = contribution.work_product
                if name not in local_wps and name not in model.kernel_work_products:
                    dangling(activity_id, activity.span, "work product", name)

    for method in document.methods():
        method_id = element_id(method)
        referenced = list(method.cycle) + list(method.concurrent)
        if method.preamble is not None:
            referenced.append(method.preamble)
        for name in referenced:
            if name not in model.practices:
                dangling(method_id, method.span, "practice", name)

    for phase in document.phases():
        phase_id = element_id(phase)
        declared = {wp.name for wp in phase.outputs}
        for step in phase.steps:
            step_path = f"{phase_id}/{dotted_id('step', step.name)}"
            for spec in step.activities:
                _check_spec_refs(spec, step_path, declared, model, dangling)

    if any(d.is_error for d in diagnostics):
        raise ResolveError(_ordered(document, diagnostics))
    return model


def _check_spec_refs(spec: ActivitySpec, owner: str, declared: set[str],
                     model: ResolvedModel, dangling) -> None:
    path = f"{owner}/{dotted_id('activity', spec.name)}"
    for contribution in spec.feeds:
        if contribution.work_product not in declared:
            dangling(path, spec.span, "output", contribution.work_product)
    if spec.role is not None and spec.role not in model.roles:
        dangling(path, spec.span, "role", spec.role)
    for sub in spec.sub_activities:
        _check_spec_refs(sub, path, declared, model, dangling)


def _practice_activities(practice: Practice, practice_id: str):
    """Yield (owner id, activity) for every activity in the practice tree."""

    def visit_space(space: Space, owner: str):
        space_id = element_id(space, owner)
        for member in space.members:
            if isinstance(member, Activity):
                yield space_id, member
            else:
                yield from visit_space(member, space_id)

    for member in practice.members:
        if isinstance(member, Activity):
            yield practice_id, member
        else:
            yield from visit_space(member, practice_id)


def _ordered(document: ModelDocument, diagnostics: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diagnostics,
                  key=lambda d: (document.order_of(d.path), d.rule, d.message))


def compute_area_profile(model: ResolvedModel, practice: Practice) -> AreaProfile:
    """Element counts per area for one practice of a resolved model."""
    profile = AreaProfile()
    for space in practice.spaces():
        effective = space.area or practice.area
        profile.counts[effective] += 1
    for _, activity in _practice_activities(practice, element_id(practice)):
        for grade in activity.requires:
            profile.counts[model.competency_area(grade.competency)] += 1
    return profile


def check_wellformedness(model: ResolvedModel,
                         config: CheckConfig | None = None) -> list[Diagnostic]:
    """Every V010-V016 violation in the model, in declaration order."""
    config = config or CheckConfig()
    document = model.document
    diagnostics: list[Diagnostic] = []

    def report(rule: str, severity: Severity, path: str, message: str, span) -> None:
        diagnostics.append(Diagnostic(rule=rule, severity=severity, path=path,
                                      message=message, span=span))

    _check_kernel_space_nesting(model, config, report)

    for kernel in document.kernels():
        for competency in kernel.competencies():
            if not 1 <= competency.max_level <= 5:
                report(LEVEL_OUT_OF_RANGE, Severity.ERROR, element_id(competency),
                       f"competency level bound {competency.max_level} "
                       "is outside 1..5", competency.span)

    for role in document.roles():
        for grade in role.competencies:
            if not 1 <= grade.level <= 5:
                report(LEVEL_OUT_OF_RANGE, Severity.ERROR, element_id(role),
                       f"level {grade.level} for competency "
                       f"{grade.competency!r} is outside 1..5", role.span)

    for practice in document.practices():
        practice_id = element_id(practice)
        if not practice.goals:
            report(PRACTICE_WITHOUT_GOAL, Severity.ERROR, practice_id,
                   "practice declares no goal", practice.span)

        for stray in practice.stray_activities():
            report(ACTIVITY_WITHOUT_SPACE, Severity.ERROR,
                   element_id(stray, practice_id),
                   f"activity {stray.name!r} is attached to no activity space",
                   stray.span)

        _check_tree_depth(practice, practice_id, config, report)

        for owner_id, activity in _practice_activities(practice, practice_id):
            for grade in activity.requires:
                if not 1 <= grade.level <= 5:
                    report(LEVEL_OUT_OF_RANGE, Severity.ERROR,
                           element_id(activity, owner_id),
                           f"required level {grade.level} for "
                           f"{grade.competency!r} is outside 1..5",
                           activity.span)

        _check_contribution_parts(practice, practice_id, report)

        profile = compute_area_profile(model, practice)
        if profile.plurality and practice.area not in profile.plurality:
            leaders = ", ".join(sorted(a.value for a in profile.plurality))
            report(AREA_MISMATCH, Severity.WARNING, practice_id,
                   f"declared area {practice.area.value} but element counts "
                   f"favor {leaders}", practice.span)

    return _ordered(document, diagnostics)


def _check_tree_depth(practice: Practice, practice_id: str,
                      config: CheckConfig, report) -> None:
    def visit(space: Space, owner: str, depth: int) -> None:
        space_id = element_id(space, owner)
        if depth > config.max_nesting_depth:
            report(NESTING_TOO_DEEP, Severity.ERROR, space_id,
                   f"space nested at depth {depth} exceeds the maximum of "
                   f"{config.max_nesting_depth}", space.span)
        for child in space.child_spaces():
            visit(child, space_id, depth + 1)

    for space in practice.spaces():
        visit(space, practice_id, 1)


def _check_kernel_space_nesting(model: ResolvedModel, config: CheckConfig,
                                report) -> None:
    spaces = model.kernel_spaces
    depths: dict[str, int] = {}
    in_cycle: set[str] = set()

    def depth_of(name: str, trail: tuple[str, ...]) -> int:
        if name in depths:
            return depths[name]
        if name in trail:
            for member in trail[trail.index(name):]:
                in_cycle.add(member)
            return 0
        space = spaces[name]
        if space.parent is None or space.parent not in spaces:
            depths[name] = 1
            return 1
        parent_depth = depth_of(space.parent, trail + (name,))
        if name in in_cycle:
            return 0
        depths[name] = parent_depth + 1
        return depths[name]

    for name, space in spaces.items():
        depth = depth_of(name, ())
        if name in in_cycle:
            report(NESTING_CYCLE, Severity.ERROR, element_id(space),
                   f"space {name!r} participates in a nesting cycle", space.span)
        elif depth > config.max_nesting_depth:
            report(NESTING_TOO_DEEP, Severity.ERROR, element_id(space),
                   f"space nested at depth {depth} exceeds the maximum of "
                   f"{config.max_nesting_depth}", space.span)


def _check_contribution_parts(practice: Practice, practice_id: str, report) -> None:
    contributions: dict[str, list[tuple[Activity, str | None]]] = {}
    for _, activity in _practice_activities(practice, practice_id):
        for contribution in activity.produces:
            contributions.setdefault(contribution.work_product, []).append(
                (activity, contribution.part))
    for wp in practice.outputs:
        feeders = contributions.get(wp.name, [])
        if len(feeders) < 2:
            continue
        wp_path = f"{practice_id}/{dotted_id('workproduct', wp.name)}"
        nameless = [a.name for a, part in feeders if not part]
        if nameless:
            report(MISSING_PART_TEXT, Severity.ERROR, wp_path,
                   f"work product {wp.name!r} has {len(feeders)} contributing "
                   "activities, so each contribution must name its part; "
                   "missing from: " + ", ".join(repr(n) for n in nameless),
                   wp.span)
            continue
        rendered = [f"{wp.name}: {part}" for _, part in feeders]
        if len(set(rendered)) != len(rendered):
            report(MISSING_PART_TEXT, Severity.ERROR, wp_path,
                   f"contributions to {wp.name!r} must be pairwise distinct",
                   wp.span)


def check(document: ModelDocument,
          config: CheckConfig | None = None) -> tuple[ResolvedModel | None,
                                                      list[Diagnostic]]:
    """Resolve then well-formedness-check; never raises.

    Returns the resolved model (None when resolution failed) and every
    diagnostic from both stages.
    """
    try:
        model = resolve(document)
    except ResolveError as failure:
        return None, list(failure.diagnostics)
    return model, check_wellformedness(model, config)
