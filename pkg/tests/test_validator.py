from __future__ import annotations

import pytest

from esskit import dsl, validator
from esskit.diagnostics import ResolveError
from esskit.model import (
    Activity,
    Area,
    CompetencyGrade,
    Contribution,
    ModelDocument,
    Practice,
    Space,
    WorkProduct,
)
from esskit.validator import AreaProfile, CheckConfig

from conftest import KERNEL_PRELUDE, parse_with_kernel


def _rules(diagnostics):
    return [d.rule for d in diagnostics]


def _check(source: str, config: CheckConfig | None = None):
    model, diagnostics = validator.check(dsl.parse(KERNEL_PRELUDE + source),
                                         config)
    return model, diagnostics


def test_empty_model_has_no_diagnostics():
    model, diagnostics = validator.check(ModelDocument())
    assert model is not None
    assert diagnostics == []


def test_corpus_resolves_clean(corpus):
    model, diagnostics = validator.check(corpus)
    assert model is not None
    assert diagnostics == []


def test_dangling_competency_is_v001():
    source = ('practice "P" area Customer { goal "g" space "S" {\n'
              '  activity "a" requires Alchemy @ 3\n} }')
    with pytest.raises(ResolveError) as failure:
        validator.resolve(dsl.parse(KERNEL_PRELUDE + source))
    diagnostics = failure.value.diagnostics
    assert _rules(diagnostics) == ["V001"]
    assert "Alchemy" in diagnostics[0].message
    assert diagnostics[0].path.endswith("activity.a")


def test_dangling_method_and_role_and_feed_references():
    source = ('method "m" { cycle "Ghost" }\n'
              'togaf_phase A "V" { objective "o"\n'
              '  step "S" { activity "a" tag builds feeds "Nothing" role "Nobody" } }')
    with pytest.raises(ResolveError) as failure:
        validator.resolve(dsl.parse(KERNEL_PRELUDE + source))
    messages = " | ".join(d.message for d in failure.value.diagnostics)
    assert "Ghost" in messages
    assert "Nothing" in messages
    assert "Nobody" in messages


def test_duplicate_work_product_names_are_v002():
    practice = Practice(
        name="P", area=Area.CUSTOMER, goals=("g",),
        outputs=(WorkProduct(name="Architecture Vision"),
                 WorkProduct(name="Architecture Vision")))
    with pytest.raises(ResolveError) as failure:
        validator.resolve(ModelDocument([practice]))
    diagnostics = failure.value.diagnostics
    assert _rules(diagnostics) == ["V002"]
    assert "Architecture Vision" in diagnostics[0].message


def test_practice_without_goal_is_v010():
    practice = Practice(name="P", area=Area.CUSTOMER, goals=())
    model = validator.resolve(ModelDocument([practice]))
    diagnostics = validator.check_wellformedness(model)
    assert _rules(diagnostics) == ["V010"]


def test_nesting_depth_boundary():
    source = ('practice "P" area Customer { goal "g"\n'
              '  space "d1" { space "d2" { space "d3" { space "d4" {\n'
              '  } } } } }')
    _, diagnostics = _check(source)
    assert _rules(diagnostics) == ["V011"]
    assert "depth 4" in diagnostics[0].message

    _, relaxed = _check(source, CheckConfig(max_nesting_depth=4))
    assert relaxed == []


def test_kernel_space_cycle_is_v012():
    source = ('kernel "K2" {\n'
              '  space "A" area Customer in "B"\n'
              '  space "B" area Customer in "A"\n'
              '}')
    _, diagnostics = _check(source)
    assert set(_rules(diagnostics)) == {"V012"}
    assert len(diagnostics) == 2


def test_kernel_space_chain_depth_counts_from_root():
    source = ('kernel "K2" {\n'
              '  space "A" area Customer\n'
              '  space "B" area Customer in "A"\n'
              '  space "C" area Customer in "B"\n'
              '  space "D" area Customer in "C"\n'
              '}')
    _, diagnostics = _check(source)
    assert _rules(diagnostics) == ["V011"]


def test_level_out_of_range_is_v013():
    source = ('role "R" { competency Analysis @ 6 }\n'
              'practice "P" area Customer { goal "g" space "S" {\n'
              '  activity "a" requires Analysis @ 0\n} }')
    _, diagnostics = _check(source)
    assert _rules(diagnostics).count("V013") == 2


def test_multi_feeder_missing_part_is_v014():
    source = ('practice "P" area Customer { goal "g"\n'
              '  output "Statement of Architecture Work"\n'
              '  space "S" {\n'
              '    activity "one" produces "Statement of Architecture Work"\n'
              '    activity "two" produces "Statement of Architecture Work"\n'
              '  } }')
    _, diagnostics = _check(source)
    assert _rules(diagnostics) == ["V014"]
    assert "one" in diagnostics[0].message and "two" in diagnostics[0].message


def test_multi_feeder_duplicate_parts_are_v014():
    source = ('practice "P" area Customer { goal "g"\n'
              '  output "W"\n'
              '  space "S" {\n'
              '    activity "one" produces "W: scope"\n'
              '    activity "two" produces "W: scope"\n'
              '  } }')
    _, diagnostics = _check(source)
    assert _rules(diagnostics) == ["V014"]
    assert "distinct" in diagnostics[0].message


def test_multi_feeder_with_parts_is_clean():
    source = ('practice "P" area Customer { goal "g"\n'
              '  output "W"\n'
              '  space "S" {\n'
              '    activity "one" produces "W: scope"\n'
              '    activity "two" produces "W: schedule"\n'
              '  } }')
    _, diagnostics = _check(source)
    assert diagnostics == []


def test_area_mismatch_is_v015_warning():
    source = ('practice "P" area Endeavor { goal "g" space "S" {\n'
              '  activity "a" requires Stakeholder_Representation @ 3\n'
              '  activity "b" requires Stakeholder_Representation @ 3\n'
              '  activity "c" requires Stakeholder_Representation @ 3\n'
              '} }')
    _, diagnostics = _check(source)
    assert _rules(diagnostics) == ["V015"]
    assert not diagnostics[0].is_error
    assert "Customer" in diagnostics[0].message


def test_declared_area_in_plurality_tie_is_silent():
    # One Endeavor space (inherited) against one Customer requirement: tied,
    # and the declared area is in the tie, so no warning.
    source = ('practice "P" area Endeavor { goal "g" space "S" {\n'
              '  activity "a" requires Stakeholder_Representation @ 3\n'
              '} }')
    _, diagnostics = _check(source)
    assert diagnostics == []


def test_stray_activity_is_v016():
    practice = Practice(name="P", area=Area.CUSTOMER, goals=("g",),
                        members=(Activity(name="loose"),))
    model = validator.resolve(ModelDocument([practice]))
    diagnostics = validator.check_wellformedness(model)
    assert _rules(diagnostics) == ["V016"]
    assert diagnostics[0].path == "practice.p/activity.loose"


def test_area_profile_single_area_example(kernel_model):
    document = parse_with_kernel(
        'practice "P" area Customer { goal "g"\n'
        '  space "S1" { activity "a" requires Stakeholder_Representation @ 3\n'
        '               activity "b" requires Stakeholder_Representation @ 3 }\n'
        '  space "S2" { activity "c" requires Stakeholder_Representation @ 3 }\n'
        '}')
    model = validator.resolve(document)
    profile = validator.compute_area_profile(model, model.practices["P"])
    assert profile.counts == {Area.CUSTOMER: 5, Area.SOLUTION: 0,
                              Area.ENDEAVOR: 0}
    assert profile.plurality == {Area.CUSTOMER}


def test_area_profile_empty_practice():
    document = parse_with_kernel('practice "P" area Customer { goal "g" }')
    model = validator.resolve(document)
    profile = validator.compute_area_profile(model, model.practices["P"])
    assert profile.total == 0
    assert profile.plurality == frozenset()


# Hand counts over the corpus files, recorded before the implementation ran:
# Preliminary has 6 top-level spaces and requirement areas C6/S6/E2; Phase A
# has 11 top-level spaces and requirement areas C11/S10/E4. Spaces inherit
# the practice area (Customer for both).
PRELIMINARY_PROFILE = {Area.CUSTOMER: 12, Area.SOLUTION: 6, Area.ENDEAVOR: 2}
PHASE_A_PROFILE = {Area.CUSTOMER: 22, Area.SOLUTION: 10, Area.ENDEAVOR: 4}


def test_corpus_area_profiles_match_hand_count(corpus_model):
    preliminary = validator.compute_area_profile(
        corpus_model, corpus_model.practices["Preliminary"])
    assert preliminary.counts == PRELIMINARY_PROFILE
    assert preliminary.plurality == {Area.CUSTOMER}

    phase_a = validator.compute_area_profile(
        corpus_model, corpus_model.practices["Phase A"])
    assert phase_a.counts == PHASE_A_PROFILE
    assert phase_a.plurality == {Area.CUSTOMER}


def test_plurality_invariant_under_duplication(kernel_model):
    base = parse_with_kernel(
        'practice "P" area Endeavor { goal "g"\n'
        '  space "S1" { activity "a" requires Analysis @ 3 }\n'
        '  space "S2" { activity "b" requires Stakeholder_Representation @ 3\n'
        '               activity "c" requires Stakeholder_Representation @ 3 }\n'
        '}')
    model = validator.resolve(base)
    practice = model.practices["P"]
    profile = validator.compute_area_profile(model, practice)

    doubled = Practice(
        name="P doubled", area=practice.area, goals=practice.goals,
        members=practice.members + tuple(
            Space(name=s.name + " copy", goal=s.goal, members=s.members)
            for s in practice.spaces()))
    doubled_model = validator.resolve(
        ModelDocument(base.declarations + (doubled,)))
    doubled_profile = validator.compute_area_profile(doubled_model, doubled)

    assert doubled_profile.counts == {a: 2 * n for a, n in profile.counts.items()}
    assert doubled_profile.plurality == profile.plurality


def test_validation_is_idempotent(corpus):
    first = validator.check(corpus)[1]
    second = validator.check(corpus)[1]
    assert first == second


def test_diagnostic_paths_resolve(corpus):
    source = ('practice "Q" area Endeavor { goal "g" space "S" {\n'
              '  activity "a" requires Stakeholder_Representation @ 3\n'
              '  activity "b" requires Stakeholder_Representation @ 3\n'
              '  activity "c" requires Stakeholder_Representation @ 3\n'
              '} }')
    document = parse_with_kernel(source)
    model, diagnostics = validator.check(document)
    assert diagnostics
    for diagnostic in diagnostics:
        assert document.lookup(diagnostic.path) is not None


def test_area_profile_defaults_all_areas():
    profile = AreaProfile()
    assert profile.counts == {a: 0 for a in Area}
