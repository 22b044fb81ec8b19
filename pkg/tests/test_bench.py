import os

import pytest

from loopnav import resolve_program
from loopnav.bench import (
    CORPUS, FEASIBLE, INFEASIBLE, analyze_file, analyze_source, prepare, run_case,
    select_cases, validate_witness,
)
from loopnav.config import NavConfig
from loopnav.errors import ValidationFailure
from loopnav.nav_executor import FeasiblePath, NavStats


def test_corpus_split():
    expected = [case.expected for case in CORPUS]
    assert expected.count(FEASIBLE) == 6
    assert expected.count(INFEASIBLE) == 3
    assert all(os.path.exists(case.path) for case in CORPUS)


def test_select_cases():
    assert [c.name for c in select_cases("loop")] == ["OneLoop", "TwoLoops"]
    assert [c.name for c in select_cases("EQCNT")] == ["EQCNT", "EQCNTex"]
    names = [c.name for c in select_cases()]
    assert names == sorted(names)
    assert len(names) == len(CORPUS)
    assert select_cases("nothing-like-this") == ()


def test_prepare_tallies(fig1_source):
    prepared = prepare(fig1_source)
    stats = prepared.stats
    assert (stats.chains_root, stats.chains_all) == (1, 5)
    assert stats.elim == 0
    assert stats.constraints == 6


def test_analyze_running_example(fig1_source):
    report = analyze_source(fig1_source, name="fig1")
    assert report.outcome == FEASIBLE
    assert len(report.pc) == 30
    assert report.witness["A[0]"] == 1
    data = report.to_dict()
    assert set(data) == {"program", "outcome", "expected", "evidence", "pc", "witness", "stats"}
    assert data["stats"]["pc_len"] == 30


@pytest.mark.parametrize("name", ["OneLoop", "TwoLoops"])
def test_stride_loops_need_no_states(name):
    (case,) = [c for c in CORPUS if c.name == name]
    report = run_case(case)
    assert report.outcome == INFEASIBLE
    assert report.evidence == "eliminated-roots"
    assert report.stats.sstat == 0
    assert report.matches_expected


@pytest.mark.parametrize("case", CORPUS, ids=lambda c: c.name)
def test_corpus_outcomes(case):
    report = run_case(case, NavConfig())
    assert report.outcome == case.expected


def test_validation_rejects_a_bad_witness(fig1_source):
    prepared = prepare(fig1_source)
    fake = FeasiblePath((), {}, 0, {}, NavStats())
    with pytest.raises(ValidationFailure):
        validate_witness(prepared.program, fake)


def test_shipped_programs_resolve(tmp_path):
    shipped = resolve_program("fig1.ln")
    assert os.path.exists(shipped)
    assert analyze_file(shipped).outcome == FEASIBLE

    own = tmp_path / "own.ln"
    own.write_text("input int n; if (n == 4) { target; }")
    assert resolve_program(str(own)) == str(own)
    report = analyze_file(own)
    assert report.name == "own.ln"
    assert report.witness == {"n": 4}
