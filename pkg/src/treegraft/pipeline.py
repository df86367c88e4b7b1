"""End-to-end sentence pipeline.

Flow per sentence: morphological lookup (with default part-of-speech
assignment for unknown words) and N-best tagging feed the blender, which
narrows each token's POS set; tree selection maps tokens to anchored
elementary trees; the span filter and the top-k statistics filter prune
them; the chart parser grafts the survivors; derivations are extracted,
ranked, and replayed into derived trees.

Tagger modes: ``on`` always blends, ``off`` never does, and
``retry-on-failure`` re-runs an empty parse without blending.

Responses serialize deterministically: for fixed configuration and
input, ``canonical_json`` is byte-stable (timing is reported separately
so it cannot perturb the canonical form).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources

from .evaluation import (
    CorpusReport,
    ParsevalResult,
    brackets,
    corpus_report,
    format_report,
    parseval,
    read_gold_file,
)
from .features import EMPTY, FeatureStructure
from .grammar import load_grammar
from .lexicon import default_pos, load_lexicon, select_trees
from .parser import (
    ResourceLimitError,
    derived_tree,
    extract_derivations,
    parse,
    parse_with_retry,
    span_filter,
)
from .ranking import DEFAULT_WEIGHTS, rank
from .tagger import TrigramModel, blend, n_best

TAGGER_MODES = ("on", "off", "retry-on-failure")

START_CATEGORIES = {
    "S": ("S", FeatureStructure({"comp": "-", "mode": "ind"})),
    "embedded-S": ("S", FeatureStructure({"comp": "+"})),
    "NP": ("NP", EMPTY),
    "DetP": ("DetP", EMPTY),
}


class ConfigError(Exception):
    """Invalid pipeline configuration (bad enum value or unreadable file)."""


def data_path(name):
    """Path of a bundled English-fragment fixture file."""
    return str(resources.files("treegraft").joinpath("data/english", name))


@dataclass
class PipelineConfig:
    grammar_path: str = ""
    template_path: str = ""
    morph_path: str = ""
    syntax_path: str = ""
    stats_path: str = ""
    model_path: str = ""
    tagger_mode: str = "on"
    start_category: str = "S"
    nbest_n: int = 3
    stat_k: int = 3
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    max_parses: int = 5
    item_cap: int = 1_000_000

    @classmethod
    def bundled(cls, **overrides):
        """Configuration pointing at the packaged English fragment."""
        config = cls(
            grammar_path=data_path("english.trees"),
            template_path=data_path("english.templates"),
            morph_path=data_path("english.morph"),
            syntax_path=data_path("english.syntax"),
            stats_path=data_path("english.stats"),
            model_path=data_path("tagger.model"),
        )
        for key, value in overrides.items():
            if not hasattr(config, key):
                raise ConfigError("unknown configuration field %r" % key)
            setattr(config, key, value)
        return config

    def validate(self):
        if self.tagger_mode not in TAGGER_MODES:
            raise ConfigError("tagger mode must be one of %s" % (TAGGER_MODES,))
        if self.start_category not in START_CATEGORIES:
            raise ConfigError("start category must be one of %s"
                              % (tuple(START_CATEGORIES),))
        if self.nbest_n < 1:
            raise ConfigError("N-best N must be >= 1")
        if self.stat_k < 1:
            raise ConfigError("statistics filter k must be >= 1")
        if self.max_parses < 1:
            raise ConfigError("output parse count must be >= 1")
        for label, path in (("grammar", self.grammar_path),
                            ("templates", self.template_path),
                            ("morphology", self.morph_path),
                            ("syntax", self.syntax_path)):
            if not path:
                raise ConfigError("missing %s file path" % label)
        return self


@dataclass
class TokenAnalysis:
    word: str
    morph: list                 # [(root, pos, features-dict)]
    morph_pos: list             # POS codes from morphology (or defaults)
    blended_pos: list
    unknown: bool = False


@dataclass
class RankedParse:
    derivation: object
    penalties: object
    derived: object             # ParseTree


@dataclass
class ParseResponse:
    sentence: str
    tokens: list                # [TokenAnalysis]
    nbest: list                 # [TagSequence]
    parses: list                # [RankedParse]
    retried_stats: bool = False
    retried_tagger: bool = False
    diagnostics: list = field(default_factory=list)
    chart_items: int = 0
    derivation_count: int = 0
    anchored_count: int = 0
    timing_ms: float = 0.0

    @property
    def accepted(self):
        return bool(self.parses)


def _fs_to_plain(fs):
    out = {}
    for key, value in fs.items():
        if isinstance(value, FeatureStructure):
            out[key] = _fs_to_plain(value)
        elif isinstance(value, str):
            out[key] = value
        else:
            out[key] = repr(value)
    return out


def dnode_to_plain(node):
    return {
        "label": node.label,
        "kind": node.kind,
        "na": node.na,
        "word": node.word,
        "top": _fs_to_plain(node.top),
        "bottom": _fs_to_plain(node.bottom),
        "features": None if node.features is None else _fs_to_plain(node.features),
        "children": [dnode_to_plain(c) for c in node.children],
    }


def derivation_to_plain(derivation):
    return {
        "tree": derivation.tree_name,
        "anchors": [{"word": w, "position": p} for w, p in derivation.anchors],
        "children": [
            {"op": op, "address": address, "child": derivation_to_plain(child)}
            for op, address, child in derivation.children
        ],
    }


def response_to_plain(response):
    """JSON-ready dict; deterministic for fixed config and input."""
    return {
        "v": 1,
        "sentence": response.sentence,
        "accepted": response.accepted,
        "tokens": [
            {
                "word": t.word,
                "morph": [{"root": r, "pos": p, "features": f} for r, p, f in t.morph],
                "morph_pos": t.morph_pos,
                "blended_pos": t.blended_pos,
                "unknown": t.unknown,
            }
            for t in response.tokens
        ],
        "nbest": [{"tags": list(seq.tags), "logprob": round(seq.logprob, 9)}
                  for seq in response.nbest],
        "parses": [
            {
                "rank": i + 1,
                "derivation": p.derivation.serialize(),
                "derivation_tree": derivation_to_plain(p.derivation),
                "penalties": p.penalties.as_dict(),
                "penalty_total": p.penalties.total(),
                "derived_tree": dnode_to_plain(p.derived.root),
                "frontier": p.derived.tokens,
            }
            for i, p in enumerate(response.parses)
        ],
        "retried_stats": response.retried_stats,
        "retried_tagger": response.retried_tagger,
        "diagnostics": response.diagnostics,
        "stats": {
            "chart_items": response.chart_items,
            "derivations": response.derivation_count,
            "anchored_trees": response.anchored_count,
        },
    }


def canonical_json(response):
    return json.dumps(response_to_plain(response), sort_keys=True,
                      ensure_ascii=False, separators=(",", ":"))


class Pipeline:
    """Loaded resources plus the per-sentence run loop.

    All resources are immutable after construction, so one pipeline is
    safe to share across threads and requests.
    """

    def __init__(self, grammar, lexicon, model=None, config=None):
        self.grammar = grammar
        self.lexicon = lexicon
        self.model = model
        self.config = (config or PipelineConfig()).validate() if config else PipelineConfig()

    @classmethod
    def from_config(cls, config):
        config.validate()
        try:
            grammar = load_grammar(config.grammar_path, config.template_path)
            lexicon = load_lexicon(config.morph_path, config.syntax_path,
                                   config.stats_path or None)
            model = TrigramModel.load(config.model_path) if config.model_path else None
        except OSError as e:
            raise ConfigError(str(e)) from e
        return cls(grammar, lexicon, model, config)

    # -- per-sentence steps ---------------------------------------------

    def analyze_tokens(self, tokens):
        analyses = []
        for i, word in enumerate(tokens):
            entries = self.lexicon.morph_lookup(word)
            if entries:
                pos = sorted({e.pos for e in entries})
                analyses.append(TokenAnalysis(
                    word=word,
                    morph=[(e.root, e.pos, _fs_to_plain(e.features)) for e in entries],
                    morph_pos=pos,
                    blended_pos=list(pos),
                ))
            else:
                pos = list(default_pos(word, sentence_initial=(i == 0)))
                analyses.append(TokenAnalysis(
                    word=word, morph=[], morph_pos=pos,
                    blended_pos=list(pos), unknown=True))
        return analyses

    def run_tagger(self, tokens):
        if self.model is None:
            return []
        return n_best(self.model, tokens, self.config.nbest_n)

    def _blend(self, analyses, sequences):
        morph_pos = [set(t.morph_pos) for t in analyses]
        blended = blend(morph_pos, sequences)
        for analysis, pos in zip(analyses, blended):
            analysis.blended_pos = sorted(pos)
        return analyses

    def _graft(self, tokens, analyses):
        """Selection, filtering, parsing, and retry bookkeeping."""
        config = self.config
        label, start_features = START_CATEGORIES[config.start_category]
        posed = [(t.word, tuple(t.blended_pos)) for t in analyses]
        anchored = select_trees(posed, self.grammar, self.lexicon)
        anchored = span_filter(anchored, len(tokens))
        count = sum(len(lists) for lists in anchored)
        forest, retried = parse_with_retry(
            tokens, anchored, self.lexicon.stats, config.stat_k, label,
            start_features=start_features, item_cap=config.item_cap)
        return forest, retried, count

    def run(self, sentence):
        """Full pipeline for one sentence (string or token list)."""
        started = time.perf_counter()
        config = self.config
        tokens = sentence.split() if isinstance(sentence, str) else list(sentence)
        analyses = self.analyze_tokens(tokens)
        use_tagger = config.tagger_mode in ("on", "retry-on-failure") and self.model
        sequences = self.run_tagger(tokens) if use_tagger else []
        if sequences:
            self._blend(analyses, sequences)

        forest, retried_stats, anchored_count = self._graft(tokens, analyses)
        retried_tagger = False
        if not forest.accepted and config.tagger_mode == "retry-on-failure" and sequences:
            for analysis in analyses:
                analysis.blended_pos = list(analysis.morph_pos)
            retried_tagger = True
            forest, retried_stats, anchored_count = self._graft(tokens, analyses)

        derivations = extract_derivations(forest)
        ranked = rank(derivations, self.grammar, config.weights, config.max_parses)
        parses = [RankedParse(derivation=d, penalties=v,
                              derived=derived_tree(d, self.grammar))
                  for d, v in ranked]
        return ParseResponse(
            sentence=" ".join(tokens),
            tokens=analyses,
            nbest=sequences,
            parses=parses,
            retried_stats=retried_stats,
            retried_tagger=retried_tagger,
            diagnostics=list(forest.diagnostics),
            chart_items=forest.item_count,
            derivation_count=len(derivations),
            anchored_count=anchored_count,
            timing_ms=1000.0 * (time.perf_counter() - started),
        )

    # -- corpus evaluation ----------------------------------------------

    def evaluate(self, sentences, gold_lines=None, corpus_name="corpus"):
        """Corpus report, plus bracket scores when a gold file is given."""

        responses = {}

        def run_one(sentence):
            response = self.run(sentence)
            responses[sentence] = response
            return response.derivation_count

        report = corpus_report(sentences, run_one, corpus_name)
        scores = None
        if gold_lines is not None:
            golds = read_gold_file("\n".join(gold_lines)) \
                if isinstance(gold_lines, (list, tuple)) else read_gold_file(gold_lines)
            if len(golds) != len(sentences):
                raise ValueError("gold has %d trees for %d sentences"
                                 % (len(golds), len(sentences)))
            scores = ParsevalResult()
            for sentence, gold in zip(sentences, golds):
                response = responses[sentence]
                if not response.parses:
                    scores += ParsevalResult(
                        gold_count=len(gold.spans), sentences=1)
                    continue
                candidate = brackets(response.parses[0].derived)
                scores += parseval(candidate, gold)
        return report, scores
