"""Generators for the bundled example catalogs.

``example_rules_dict`` holds seven worked example rules with checker
bindings. ``reference_catalog_dict`` builds a 192-entry raw catalog around them
whose synthetic rules hit fixed target marginals: 63 unapproved ideas, 129
approved rules, 37 extra sub-rules, and set accuracy, required-information
and reason counts for the classified rules.

Run ``python -m reqlint.fixtures OUTDIR`` to rewrite the bundled JSON files.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .catalog import Accuracy, InfoKind, Reason

DATA_DIR = Path(__file__).parent / "data" / "catalogs"
EXAMPLE_RULES_PATH = DATA_DIR / "example_rules.json"
REFERENCE_CATALOG_PATH = DATA_DIR / "reference_catalog.json"

D, H, M, L, N = (Accuracy.Deterministic, Accuracy.HeuristicHigh, Accuracy.HeuristicMedium,
                 Accuracy.HeuristicLow, Accuracy.NotDetectable)
I = InfoKind


def _rule(rid, text, rtype, context, scope, info, accuracy, reason=None, checker=None):
    d = {
        "id": rid,
        "status": "Approved",
        "text": text,
        "type": rtype,
        "context": context,
        "scope": scope,
        "required_info": [k.value for k in info],
        "accuracy": accuracy.value,
    }
    if reason is not None:
        d["reason"] = reason.value
    if checker is not None:
        d["checker"] = {"id": checker[0], "params": checker[1]}
    return d


def example_rules(with_checkers: bool = True) -> list[dict]:
    def chk(cid, params=None):
        return (cid, params or {}) if with_checkers else None

    return [
        _rule("160", 'The term "function" shall be used instead of the term "functionality".',
              "Lexical", "Anywhere", "WordPhrase", [I.LemmasDictionaries], D,
              checker=chk("forbidden_term", {"functionality": "function"})),
        _rule("56", "Requirements shall start with the subject.",
              "Grammatical", "Requirement", "Sentence", [I.ParseTrees], H,
              checker=chk("subject_first")),
        _rule("78", 'Text consisting of a definition shall be preceded with the identifier "Definition:".',
              "Structural", "Requirement", "Section", [I.LemmasDictionaries], M,
              checker=chk("definition_marker")),
        _rule("81", "If a functional requirement is supplemented with additional information to "
                    "clarify how the requirement can be met, the additional information must be "
                    "formulated as a separate requirement.",
              "Semantic", "Requirement", "Section", [I.DomainModels], L,
              checker=chk("clarification_split")),
        _rule("24", "References to other documents in the specification are done by reference "
                    "to the document title.",
              "Structural", "Anywhere", "Global", [I.PureTextRegex, I.ListsOfX], D,
              checker=chk("reference_style")),
        _rule("50", "Requirements must be understandable independently, i.e. the subject must be "
                    "indicated in the respective requirements (the subject must not be only "
                    "defined in the section title).",
              "Semantic", "Requirement", "Sentence", [I.PosTags], H,
              checker=chk("explicit_subject")),
        _rule("54", "The introductory section of the specification shall not contain any requirements.",
              "Unclassified", "Unclassified", "Unclassified", [], N, reason=Reason.R1_UnclearRule),
    ]


def example_rules_dict() -> dict:
    return {"rules": example_rules()}


# (count, type, accuracy, primary info kind) for the synthetic detectable rules
_DETECTABLE_GROUPS = [
    (30, "Lexical", D, I.LemmasDictionaries),
    (20, "Structural", D, I.PureTextRegex),
    (14, "Structural", D, I.Formatting),
    (2, "Structural", D, I.ListsOfX),
    (6, "Lexical", H, I.LemmasDictionaries),
    (5, "Structural", H, I.Formatting),
    (3, "Grammatical", H, I.PosTags),
    (2, "Structural", H, I.PureTextRegex),
    (2, "Grammatical", H, I.Morphology),
    (4, "Grammatical", M, I.PosTags),
    (2, "Grammatical", M, I.ParseTrees),
    (2, "Grammatical", M, I.TokensSentences),
    (3, "Lexical", M, I.LemmasDictionaries),
    (2, "Structural", M, I.Formatting),
    (2, "Semantic", M, I.DomainModels),
    (2, "Grammatical", M, I.WordStems),
    (8, "Semantic", L, I.DomainModels),
    (3, "Semantic", L, I.LemmasDictionaries),
    (2, "Grammatical", L, I.PosTags),
    (1, "Semantic", L, I.NamedEntities),
    (1, "Structural", L, I.Formatting),
    (1, "Grammatical", L, I.WordStems),
    (1, "Grammatical", L, I.Morphology),
]

# (group index, members within the group, secondary info kind)
_SECONDARY = [
    (0, range(0, 20), I.PureTextRegex),
    (1, range(0, 14), I.LemmasDictionaries),
    (3, range(0, 2), I.Formatting),
    (1, range(14, 17), I.Formatting),
    (0, range(20, 25), I.ListsOfX),
    (8, range(0, 1), I.PosTags),
    (9, range(0, 2), I.Morphology),
    (10, range(0, 1), I.TokensSentences),
]

_NOT_DETECTABLE = [
    (33, "Semantic", Reason.R1_UnclearRule),
    (1, "Semantic", Reason.R2_DeepSemantics),
    (5, "Semantic", Reason.R3_DomainKnowledge),
    (1, "Structural", Reason.R4_SystemScope),
    (1, "Structural", Reason.R5_ProcessStatus),
]

_FORMATTING_CONTEXTS = ["Heading", "Figure", "Table", "Reference", "Enumeration", "Requirement", "Comment"]


def _context_scope(rtype: str, info: InfoKind, k: int) -> tuple[str, str]:
    if info is I.Formatting:
        return _FORMATTING_CONTEXTS[k % len(_FORMATTING_CONTEXTS)], "Section" if k % 3 == 0 else "WordPhrase"
    if info is I.ListsOfX:
        return "Anywhere", "Global"
    if rtype == "Lexical":
        return ("Anywhere" if k % 4 else "Requirement"), "WordPhrase"
    if rtype == "Structural":
        return ("Anywhere" if k % 2 else "Requirement"), ("Sentence" if k % 3 == 0 else "WordPhrase")
    if rtype == "Grammatical":
        return "Requirement", "Sentence"
    return "Requirement", ("Document" if k % 2 else "Section")


def _synthetic_rules() -> list[dict]:
    """159 classified synthetic rules (ids assigned later)."""
    extra: dict[tuple[int, int], InfoKind] = {}
    for group, members, kind in _SECONDARY:
        for k in members:
            extra[(group, k)] = kind

    out = []
    for g, (count, rtype, acc, info) in enumerate(_DETECTABLE_GROUPS):
        for k in range(count):
            kinds = [info] + ([extra[(g, k)]] if (g, k) in extra else [])
            context, scope = _context_scope(rtype, info, k)
            text = f"Synthetic {rtype.lower()} rule checked with {' and '.join(x.value for x in kinds)}."
            out.append(_rule("", text, rtype, context, scope, kinds, acc))
    for count, rtype, reason in _NOT_DETECTABLE:
        for k in range(count):
            text = f"Synthetic {rtype.lower()} rule that resists automation ({reason.short})."
            out.append(_rule("", text, rtype, "Requirement", "Document", [], N, reason=reason))
    return out


def reference_catalog_dict() -> dict:
    examples = {r["id"]: r for r in example_rules(with_checkers=False)}
    ids = [str(i) for i in range(1, 193)]
    unapproved = {str(i) for i in range(1, 193, 3) if str(i) not in examples}
    assert len(unapproved) == 63
    synthetic = iter(_synthetic_rules())

    approved_synthetic = [i for i in ids if i not in unapproved and i not in examples]
    compound_sizes = {}
    for n, rid in enumerate(approved_synthetic[::4][:30]):
        compound_sizes[rid] = 3 if n % 4 == 3 and sum(v == 3 for v in compound_sizes.values()) < 7 else 2
    # top up so exactly 7 compounds have three parts
    for rid in list(compound_sizes)[::-1]:
        if sum(v == 3 for v in compound_sizes.values()) >= 7:
            break
        compound_sizes[rid] = 3

    entries = []
    for rid in ids:
        if rid in unapproved:
            entries.append({"id": rid, "status": "Unapproved",
                            "text": f"Unapproved rule idea {rid}."})
        elif rid in examples:
            entries.append(examples[rid])
        elif rid in compound_sizes:
            subs = []
            for part in range(1, compound_sizes[rid] + 1):
                sub = dict(next(synthetic))
                sub["id"] = f"{rid}.{part}"
                del sub["status"]
                subs.append(sub)
            entries.append({"id": rid, "status": "Approved",
                            "text": f"Compound rule {rid} with {len(subs)} discernible parts.",
                            "subrules": subs})
        else:
            rule = dict(next(synthetic))
            rule["id"] = rid
            entries.append(rule)
    leftover = list(synthetic)
    assert not leftover, f"{len(leftover)} synthetic rules unassigned"
    return {"rules": entries}


_SUBJECTS = ["The train", "The door controller", "Each coach", "The driver", "The functionality",
             "The brake system", "It", "The on-board unit", "All alarms", "The user interface"]
_PREDICATES = ["shall stop at red signals", "shall log every fault", "shall be tested daily",
               "shall report the speed to D-17", "is TBD", "shall open within 3 s",
               "shall comply with D-21, Brake Control Spec", "shall not exceed 80 km/h"]
_OPENERS = ["", "", "", "If the door is open, ", "After a power loss, ", "During shunting, "]
_TAILS = ["", "", "", ", i.e. without delay", ", e.g. at night"]


def synthetic_document(sentences: int, seed: int = 0) -> str:
    """A deterministic pseudo-random document with every block kind.

    The text is built from a small phrase grammar so that all checkers have
    something to find. Exactly *sentences* sentences are produced.
    """
    import random

    rng = random.Random(seed)
    out: list[str] = []
    made = 0
    section = req = fig = 0

    def sentence() -> str:
        opener, subject = rng.choice(_OPENERS), rng.choice(_SUBJECTS)
        if opener:
            subject = subject[0].lower() + subject[1:]
        return opener + subject + " " + rng.choice(_PREDICATES) + rng.choice(_TAILS) + "."

    sentences -= 2  # the closing references section
    while made < sentences:
        if made % 40 == 0:
            section += 1
            out.append(f"# Section {section}: functionality overview\n")
            made += 1
            continue
        kind = rng.randrange(10)
        if kind < 5:
            req += 1
            count = min(rng.choice((1, 1, 2)), sentences - made)
            out.append(f"REQ-{req}: " + " ".join(sentence() for _ in range(count)) + "\n")
            made += count
        elif kind == 5:
            out.append("- " + sentence() + "\n")
            made += 1
        elif kind == 6:
            fig += 1
            out.append(f"Figure {fig}: The TBD user interface layout.\n")
            made += 1
        elif kind == 7:
            out.append("| " + sentence() + "\n")
            made += 1
        elif kind == 8:
            out.append("// " + sentence() + "\n")
            made += 1
        else:
            count = min(2, sentences - made)
            out.append(" ".join(sentence() for _ in range(count)) + "\n")
            made += count
    out.append("# References\n")
    out.append("D-17 Signal Interface Spec\n")
    return "\n".join(out)


def write_fixtures(outdir: Path = DATA_DIR) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, payload in (("example_rules.json", example_rules_dict()),
                          ("reference_catalog.json", reference_catalog_dict())):
        (outdir / name).write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n",
                                   encoding="utf-8")


if __name__ == "__main__":
    write_fixtures(Path(sys.argv[1]) if len(sys.argv) > 1 else DATA_DIR)
