"""ADM phase specifications: the bundled corpus and the practice mapper.

The mapping is deterministic and follows fixed rules: a phase becomes a
practice named for its position in the ADM (R1); each step becomes one
top-level activity space (R2); an atomic tagged action becomes an activity
(R3); a decomposed action becomes a nested space holding its sub-activities
(R4); outputs become the practice's work products and every feed becomes a
contribution, with the part text mandatory whenever an output has two or
more feeders (R5); tags select required competencies (R6) at level 3 unless
the named role grades that competency differently. Analysis is reserved for
endorsement: an activity tagged ``endorses_requirements`` requires Analysis
and never Stakeholder Representation, whatever its co-tags.

The declared area is the plurality of the mapped competency requirements'
areas; ties break toward Endeavor, then by kernel area order.
"""

from __future__ import annotations

import json
from importlib import resources

from . import dsl
from .model import (
    Activity,
    ActivitySpec,
    Area,
    CompetencyGrade,
    Contribution,
    ModelDocument,
    Practice,
    Space,
    StepSpec,
    TogafPhase,
    merge,
)
from .validator import CheckConfig, ResolvedModel

#: R1: the practice name for each phase position in the ADM.
PHASE_PRACTICE_NAMES = {
    "P": "Preliminary",
    "A": "Phase A",
    "B": "Phase B",
    "C": "Phase C",
    "D": "Phase D",
    "E": "Phase E",
    "F": "Phase F",
    "G": "Phase G",
    "H": "Phase H",
    "RM": "Requirements Management",
}

#: R6: which competency each activity tag demands.
TAG_COMPETENCIES = {
    "acquires_information": "Stakeholder Representation",
    "understands_stakeholders": "Stakeholder Representation",
    "processes_requirements": "Stakeholder Representation",
    "endorses_requirements": "Analysis",
    "builds": "Development",
    "verifies": "Testing",
    "leads": "Leadership",
    "coordinates": "Management",
    "governs": "Governance",
}

DEFAULT_REQUIREMENT_LEVEL = 3

_AREA_TIE_ORDER = (Area.CUSTOMER, Area.SOLUTION, Area.ENDEAVOR)

CORPUS_FILES = ("kernel.ess", "roles.ess", "phases.ess", "practices.ess",
                "method.ess")


class MappingError(Exception):
    """A phase specification cannot be mapped; the message names the chain."""


def _chain(names: tuple[str, ...]) -> str:
    return " > ".join(repr(n) for n in names)


def map_phase(spec: TogafPhase, model: ResolvedModel,
              config: CheckConfig | None = None) -> Practice:
    """Map one phase specification to a practice against a resolved kernel."""
    config = config or CheckConfig()

    missing = [name for name in TAG_COMPETENCIES.values()
               if name not in model.competencies]
    if missing:
        raise MappingError(
            "kernel is missing required competencies: "
            + ", ".join(sorted(set(missing))))

    declared_outputs = {wp.name for wp in spec.outputs}
    feeder_counts: dict[str, int] = {}
    for step in spec.steps:
        for activity in step.activities:
            _scan_feeds(spec, activity, declared_outputs, feeder_counts,
                        (step.name,))
    for step in spec.steps:
        for activity in step.activities:
            _require_parts(spec, activity, feeder_counts, (step.name,))

    requirement_areas: dict[Area, int] = {area: 0 for area in Area}
    members = tuple(
        _map_step(spec, step, model, config, requirement_areas)
        for step in spec.steps
    )
    area = _plurality_area(requirement_areas)
    return Practice(
        name=PHASE_PRACTICE_NAMES[spec.phase],
        area=area,
        goals=(spec.objective,),
        outputs=spec.outputs,
        members=members,
    )


def _scan_feeds(spec: TogafPhase, activity: ActivitySpec, declared: set[str],
                counts: dict[str, int], chain: tuple[str, ...]) -> None:
    chain = chain + (activity.name,)
    if activity.tags and activity.sub_activities:
        raise MappingError(
            f"phase {spec.phase}: activity {_chain(chain)} is decomposed and "
            "cannot also carry tags")
    for contribution in activity.feeds:
        if contribution.work_product not in declared:
            raise MappingError(
                f"phase {spec.phase}: activity {_chain(chain)} feeds "
                f"undeclared output {contribution.work_product!r}")
        counts[contribution.work_product] = counts.get(
            contribution.work_product, 0) + 1
    for sub in activity.sub_activities:
        _scan_feeds(spec, sub, declared, counts, chain)


def _require_parts(spec: TogafPhase, activity: ActivitySpec,
                   counts: dict[str, int], chain: tuple[str, ...]) -> None:
    chain = chain + (activity.name,)
    for contribution in activity.feeds:
        if counts[contribution.work_product] >= 2 and not contribution.part:
            raise MappingError(
                f"phase {spec.phase}: output {contribution.work_product!r} "
                f"has {counts[contribution.work_product]} feeders, so the "
                f"contribution from {_chain(chain)} must name its part")
    for sub in activity.sub_activities:
        _require_parts(spec, sub, counts, chain)


def _map_step(spec: TogafPhase, step: StepSpec, model: ResolvedModel,
              config: CheckConfig, areas: dict[Area, int]) -> Space:
    members = tuple(
        _map_activity(spec, activity, model, config, areas, 1, (step.name,))
        for activity in step.activities
    )
    return Space(name=step.name, goal=step.goal, members=members)


def _map_activity(spec: TogafPhase, activity: ActivitySpec,
                  model: ResolvedModel, config: CheckConfig,
                  areas: dict[Area, int], depth: int,
                  chain: tuple[str, ...]):
    chain = chain + (activity.name,)
    if activity.sub_activities:
        if depth + 1 > config.max_nesting_depth:
            raise MappingError(
                f"phase {spec.phase}: decomposing {_chain(chain)} would nest "
                f"spaces at depth {depth + 1}, beyond the maximum of "
                f"{config.max_nesting_depth}")
        members = tuple(
            _map_activity(spec, sub, model, config, areas, depth + 1, chain)
            for sub in activity.sub_activities
        )
        return Space(name=activity.name, members=members)

    if activity.role is not None and activity.role not in model.roles:
        raise MappingError(
            f"phase {spec.phase}: activity {_chain(chain)} names undeclared "
            f"role {activity.role!r}")
    for tag in activity.tags:
        if tag not in TAG_COMPETENCIES:
            raise MappingError(
                f"phase {spec.phase}: activity {_chain(chain)} carries "
                f"unknown tag {tag!r}")

    wanted = {TAG_COMPETENCIES[tag] for tag in activity.tags}
    if "endorses_requirements" in activity.tags:
        # Endorsement absorbs the stakeholder-facing tags: such an activity
        # demands Analysis, never Stakeholder Representation.
        wanted.discard("Stakeholder Representation")
    role = model.roles.get(activity.role) if activity.role else None
    requires = []
    for name in sorted(wanted, key=lambda n: model.competency_order[n]):
        level = DEFAULT_REQUIREMENT_LEVEL
        if role is not None:
            declared = role.level_for(name)
            if declared is not None:
                level = declared
        requires.append(CompetencyGrade(competency=name, level=level))
        areas[model.competency_area(name)] += 1

    return Activity(
        name=activity.name,
        requires=tuple(requires),
        produces=tuple(Contribution(work_product=c.work_product, part=c.part)
                       for c in activity.feeds),
        role=activity.role,
    )


def _plurality_area(counts: dict[Area, int]) -> Area:
    best = max(counts.values())
    leaders = {area for area, n in counts.items() if n == best}
    if Area.ENDEAVOR in leaders:
        return Area.ENDEAVOR
    for area in _AREA_TIE_ORDER:
        if area in leaders:
            return area
    return Area.ENDEAVOR


def map_all_phases(document: ModelDocument, model: ResolvedModel,
                   config: CheckConfig | None = None) -> ModelDocument:
    """One practice per phase specification, in declaration order."""
    practices = [map_phase(phase, model, config) for phase in document.phases()]
    return ModelDocument(practices)


# Bundled corpus ------------------------------------------------------------


def corpus_files() -> dict[str, str]:
    """Name-to-text mapping of every bundled corpus file, manifest included."""
    root = resources.files(__package__) / "corpus"
    out = {name: (root / name).read_text(encoding="utf-8")
           for name in CORPUS_FILES}
    out["manifest.json"] = (root / "manifest.json").read_text(encoding="utf-8")
    return out


def load_corpus() -> ModelDocument:
    """The bundled corpus as one document: kernel, roles, phases, the mapped
    practices, and the adm method."""
    files = corpus_files()
    documents = [dsl.parse(files[name], name) for name in CORPUS_FILES]
    return merge(*documents)


def load_manifest() -> dict:
    return json.loads(corpus_files()["manifest.json"])


def phase_labels(document: ModelDocument) -> dict[str, str]:
    """Practice id to phase id, for documents that carry phase specifications."""
    from .model import dotted_id

    labels = {}
    for phase in document.phases():
        practice = PHASE_PRACTICE_NAMES.get(phase.phase)
        if practice is not None:
            labels[dotted_id("practice", practice)] = phase.phase
    return labels
