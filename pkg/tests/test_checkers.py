import pytest

from reqlint.catalog import Accuracy
from reqlint.checkers import REGISTRY, Resources, registry_lookup
from reqlint.docmodel import BlockKind, parse_document
from reqlint.errors import BadParams, ResourceError, UnknownChecker
from reqlint.nlp import annotate_block

DOCS = Resources(document_list={"D-17": "Signal Interface Spec"})


def run(checker_id, text, params=None, resources=None):
    block = parse_document(text).blocks[0] if text else None
    if block is None:
        from reqlint.docmodel import Block, Span
        block = Block(0, BlockKind.Requirement, Span(0, 0), "")
    return registry_lookup(checker_id)(block, annotate_block(block), params, resources)


def texts(findings, text):
    block = parse_document(text).blocks[0]
    return [block.text[f.span.start:f.span.end] for f in findings]


def test_registry():
    assert set(REGISTRY) == {"forbidden_term", "regex", "reference_style", "definition_marker",
                             "subject_first", "explicit_subject", "clarification_split"}
    assert registry_lookup("regex").id == "regex"
    with pytest.raises(UnknownChecker):
        registry_lookup("topic_model")


def test_forbidden_term():
    p = {"functionality": "function"}
    got = run("forbidden_term", "The functionality restarts.", p)
    assert len(got) == 1 and got[0].suggestion == "function"
    assert run("forbidden_term", "The function restarts.", p) == []
    text = "Functionalities and functionality are listed."
    got = run("forbidden_term", text, p)
    assert texts(got, text) == ["Functionalities", "functionality"]
    with pytest.raises(BadParams):
        registry_lookup("forbidden_term").validate_params({})


def test_forbidden_multiword_and_list_form():
    text = "Each user interfaces screen and the user interface."
    got = run("forbidden_term", text, {"terms": ["user interface"]})
    assert texts(got, text) == ["user interfaces", "user interface"]
    assert got[0].suggestion is None


def test_regex():
    assert len(run("regex", "Value is TBD", {"pattern": r"\bTBD\b", "message": "tbd"})) == 1
    inv = {"pattern": "^Definition:", "message": "m", "invert": True}
    assert run("regex", "Definition: A is a B.", inv) == []
    assert len(run("regex", "A is a B.", inv)) == 1
    assert run("regex", "", {"pattern": "x", "message": "m"}) == []
    assert run("regex", "", inv) == []
    with pytest.raises(BadParams):
        registry_lookup("regex").validate_params({"pattern": "(["})


def test_regex_non_overlapping_and_no_empty_matches():
    assert len(run("regex", "aaaa", {"pattern": "aa", "message": "m"})) == 2
    assert run("regex", "abc", {"pattern": "x*", "message": "m"}) == []


def test_reference_style():
    assert len(run("reference_style", "REQ-1: as defined in D-17.", resources=DOCS)) == 1
    assert run("reference_style", "REQ-1: as defined in D-17, Signal Interface Spec.",
               resources=DOCS) == []
    assert run("reference_style", "REQ-1: no ids here.", resources=DOCS) == []
    two = "REQ-1: Signal Interface Spec is cited. See D-17."
    assert len(run("reference_style", two, resources=DOCS)) == 1
    with pytest.raises(ResourceError):
        run("reference_style", "D-17 here.", resources=Resources())


def test_definition_marker():
    assert len(run("definition_marker", "A consist is a set of coupled vehicles.")) == 1
    assert run("definition_marker", "Definition: A consist is a set of coupled vehicles.") == []
    assert run("definition_marker", "The system is available.") == []
    got = run("definition_marker", "REQ-3: A consist is a set of coupled vehicles.")
    assert got[0].accuracy is Accuracy.HeuristicMedium


def test_subject_first():
    assert len(run("subject_first", "REQ-2: If the door is open, the train shall not move.")) == 1
    assert run("subject_first", "REQ-3: The train shall not move while the door is open.") == []
    assert run("subject_first", "REQ-9:") == []
    assert run("subject_first", "") == []
    got = run("subject_first", "REQ-2: Shall start the system.")
    assert len(got) == 1 and got[0].accuracy is Accuracy.HeuristicHigh


def test_explicit_subject():
    assert len(run("explicit_subject", "REQ-4: Shall be logged within 5 s.")) == 1
    assert len(run("explicit_subject", "REQ-5: It shall be logged within 5 s.")) == 1
    assert run("explicit_subject", "REQ-6: The event shall be logged within 5 s.") == []


def test_clarification_split():
    got = run("clarification_split",
              "REQ-7: The brake shall engage, i.e. pads contact the disc within 100 ms.")
    assert len(got) == 1 and "low-confidence" in got[0].message
    assert run("clarification_split", "REQ-8: The brake shall engage within 100 ms.") == []
    assert run("clarification_split", "REQ-9: The brake (disc type) shall engage.") == []
    long_paren = "REQ-10: The brake shall engage (pads contact the disc within 100 ms)."
    assert len(run("clarification_split", long_paren)) == 1


def test_heuristics_ignore_other_block_kinds():
    for cid in ("subject_first", "explicit_subject", "clarification_split"):
        assert run(cid, "- If the door is open, it shall be logged, i.e. quickly.") == []


def test_spans_inside_block_and_pure():
    text = "REQ-1: If it is TBD, the functionality in D-17 means a mess, e.g. this."
    block = parse_document(text).blocks[0]
    ann = annotate_block(block)
    params = {"forbidden_term": {"functionality": "function"},
              "regex": {"pattern": "TBD", "message": "m"}}
    for cid, checker in REGISTRY.items():
        first = checker(block, ann, params.get(cid), DOCS)
        again = checker(block, ann, params.get(cid), DOCS)
        assert first == again
        for f in first:
            assert 0 <= f.span.start <= f.span.end <= len(block.text)
            assert f.accuracy is not Accuracy.NotDetectable
