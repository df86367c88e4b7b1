"""Bracket scoring and corpus-level reporting.

Scoring is unlabeled-span PARSEVAL: a candidate constituent is correct
when an identical span occurs in the gold bracketing; recall divides
correct by the gold count, precision by the candidate count; a candidate
span crosses gold when it strictly overlaps some gold span without
containment either way.  Spans under two tokens are excluded and the
whole-sentence span is kept, both configurable.

Because the engine's primary structure is the derivation tree, a more
direct measure is also provided: exact match and unlabeled dependency
arc accuracy between derivation trees (each derivation doubles as a
dependency graph over the anchoring words).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .trees import ANCHOR, TERMINAL


@dataclass(frozen=True)
class Bracketing:
    """Constituent spans of one sentence; optionally labeled."""

    length: int
    spans: frozenset          # {(i, j)} with j - i >= min_width
    labels: tuple = ()        # ((label, i, j), ...) informational

    def __len__(self):
        return len(self.spans)


@dataclass
class ParsevalResult:
    """Aggregatable bracket-scoring counts."""

    correct: int = 0
    candidate_count: int = 0
    gold_count: int = 0
    crossings: int = 0
    sentences: int = 0
    zero_crossing_sentences: int = 0

    @property
    def recall(self):
        return self.correct / self.gold_count if self.gold_count else 0.0

    @property
    def precision(self):
        return self.correct / self.candidate_count if self.candidate_count else 0.0

    @property
    def crossing_rate(self):
        """Share of sentences whose candidate has zero crossing brackets."""
        return self.zero_crossing_sentences / self.sentences if self.sentences else 0.0

    @property
    def mean_crossings(self):
        return self.crossings / self.sentences if self.sentences else 0.0

    def __add__(self, other):
        return ParsevalResult(
            self.correct + other.correct,
            self.candidate_count + other.candidate_count,
            self.gold_count + other.gold_count,
            self.crossings + other.crossings,
            self.sentences + other.sentences,
            self.zero_crossing_sentences + other.zero_crossing_sentences,
        )


def brackets(tree, min_width=2, include_whole=True):
    """Bracketing of a derived tree: one span per internal node.

    Duplicate spans collapse (unlabeled mode); spans narrower than
    ``min_width`` tokens are dropped, and ``include_whole=False`` also
    drops the whole-sentence span.
    """
    spans = set()
    labels = []
    length = 0

    def walk(node, pos):
        nonlocal length
        if node.kind == ANCHOR or (node.kind == TERMINAL and node.label):
            length = max(length, pos + 1)
            return pos + 1
        end = pos
        for child in node.children:
            end = walk(child, end)
        if end - pos >= min_width:
            spans.add((pos, end))
            labels.append((node.label, pos, end))
        return end

    root = tree.root if hasattr(tree, "root") else tree
    n = walk(root, 0)
    if not include_whole:
        spans.discard((0, n))
        labels = [rec for rec in labels if (rec[1], rec[2]) != (0, n)]
    return Bracketing(length=n, spans=frozenset(spans), labels=tuple(labels))


def crosses(a, b):
    """Strict overlap without containment, in either direction."""
    (i, j), (k, l) = a, b
    return (i < k < j < l) or (k < i < l < j)


def parseval(candidate, gold):
    """Score one candidate bracketing against the gold bracketing."""
    if candidate.length != gold.length:
        raise ValueError("sentence lengths differ: %d vs %d"
                         % (candidate.length, gold.length))
    correct = len(candidate.spans & gold.spans)
    crossing = sum(1 for c in candidate.spans
                   if any(crosses(c, g) for g in gold.spans))
    return ParsevalResult(
        correct=correct,
        candidate_count=len(candidate.spans),
        gold_count=len(gold.spans),
        crossings=crossing,
        sentences=1,
        zero_crossing_sentences=1 if crossing == 0 else 0,
    )


# ---------------------------------------------------------------------------
# Bracketed-tree files (gold standard input)

_SEXPR_TOKEN = re.compile(r"\(|\)|[^\s()]+")


class _Leaf:
    __slots__ = ("word",)

    def __init__(self, word):
        self.word = word


class _Node:
    __slots__ = ("label", "children")

    def __init__(self, label, children):
        self.label = label
        self.children = children


def parse_bracketed(line):
    """One s-expression tree, e.g. ``(S (NP I) (VP (V had) (NP a map)))``."""
    tokens = _SEXPR_TOKEN.findall(line)
    pos = 0

    def node():
        nonlocal pos
        if tokens[pos] != "(":
            word = tokens[pos]
            pos += 1
            return _Leaf(word)
        pos += 1
        label = tokens[pos]
        pos += 1
        children = []
        while tokens[pos] != ")":
            children.append(node())
        pos += 1
        return _Node(label, children)

    tree = node()
    if pos != len(tokens):
        raise ValueError("trailing content in bracketed tree: %s" % line)
    return tree


def bracketing_from_line(line, min_width=2, include_whole=True):
    tree = parse_bracketed(line)
    spans = set()
    labels = []

    def walk(node, pos):
        if isinstance(node, _Leaf):
            return pos + 1
        end = pos
        for child in node.children:
            end = walk(child, end)
        if end - pos >= min_width:
            spans.add((pos, end))
            labels.append((node.label, pos, end))
        return end

    n = walk(tree, 0)
    if not include_whole:
        spans.discard((0, n))
    return Bracketing(length=n, spans=frozenset(spans), labels=tuple(labels))


def read_gold_file(text, min_width=2, include_whole=True):
    out = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        out.append(bracketing_from_line(line, min_width, include_whole))
    return out


# ---------------------------------------------------------------------------
# Derivation-level measures


def derivation_exact_match(candidate, gold):
    return candidate.serialize() == gold.serialize()


def dependency_accuracy(candidate, gold):
    """Unlabeled arc accuracy between two derivations' dependency graphs."""
    cand = set(candidate.arcs())
    ref = set(gold.arcs())
    if not ref:
        return 1.0 if not cand else 0.0
    return len(cand & ref) / len(ref)


# ---------------------------------------------------------------------------
# Corpus reporting


@dataclass
class SentenceOutcome:
    sentence: str
    parsed: bool
    parse_count: int = 0
    error: str = ""


@dataclass
class CorpusReport:
    corpus: str
    outcomes: list = field(default_factory=list)

    @property
    def sentence_count(self):
        return len(self.outcomes)

    @property
    def parsed_count(self):
        return sum(1 for o in self.outcomes if o.parsed)

    @property
    def percent_parsed(self):
        if not self.outcomes:
            return None
        return 100.0 * self.parsed_count / self.sentence_count

    @property
    def average_parses(self):
        parsed = [o.parse_count for o in self.outcomes if o.parsed]
        if not parsed:
            return None
        return sum(parsed) / len(parsed)


def _fmt_avg(value):
    text = "%.2f" % value
    if text.endswith("0"):
        text = text[:-1]
    return text


def format_report(report):
    """Fixed-format table row, e.g. ``WSJ  6364  39.09%  7.53``."""
    header = "Corpus\t# of Sents\t% Parsed\tAv. # of parses/sent"
    if report.sentence_count == 0:
        row = "%s\t0\tn/a\tn/a" % report.corpus
    else:
        pct = "%.2f%%" % report.percent_parsed
        avg = _fmt_avg(report.average_parses) if report.average_parses is not None else "n/a"
        row = "%s\t%d\t%s\t%s" % (report.corpus, report.sentence_count, pct, avg)
    return header + "\n" + row


def corpus_report(sentences, run_sentence, corpus_name="corpus"):
    """Run the pipeline over a corpus and tally the Table-2-style row.

    ``run_sentence`` maps a sentence string to the number of parses (0
    for a reject).  Per-sentence errors are recorded as non-parses with
    a diagnostic and never abort the run.
    """
    report = CorpusReport(corpus=corpus_name)
    for sentence in sentences:
        try:
            count = run_sentence(sentence)
            report.outcomes.append(SentenceOutcome(
                sentence=sentence, parsed=count > 0, parse_count=count))
        except Exception as e:  # noqa: BLE001 - per-sentence isolation is the contract
            report.outcomes.append(SentenceOutcome(
                sentence=sentence, parsed=False, parse_count=0, error=str(e)))
    return report
