"""Lexical databases and tree selection.

Three flat-file databases back the engine:

* morphology: ``<inflected> TAB <root> TAB <POS> TAB <feat>[,<feat>]*``
  where each feat is a ``path=value`` pair attached to the anchor node;
* syntax: Table-style record blocks (INDEX/ENTRY/POS/TREES|FAM/FS/EX)
  associating lexemes with trees or tree families plus feature templates;
* statistics: ``<tree> TAB <POS> TAB <count>`` tree-unigram frequencies.

Tree selection maps tagged tokens to anchored elementary-tree instances:
for every compatible syntactic entry it instantiates the listed trees
(or every tree of the listed families), binds anchors to sentence
positions, expands feature templates, and attaches the inflection
features of the word to the anchor node.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .features import EMPTY, FeatureStructure, UnificationFailure, Var, from_path, parse_value, resolve, unify_env
from .grammar import GrammarError, apply_equations
from .trees import ANCHOR, AUXILIARY

# The thirteen part-of-speech categories, by short code.
POS_CODES = ("N", "PropN", "Pron", "V", "PL", "Adv", "A", "P", "Comp", "D", "Conj", "Ij", "NVC")

POS_NAMES = {
    "N": "Noun",
    "PropN": "Proper Noun",
    "Pron": "Pronoun",
    "V": "Verb",
    "PL": "Verb Particle",
    "Adv": "Adverb",
    "A": "Adjective",
    "P": "Preposition",
    "Comp": "Complementizer",
    "D": "Determiner",
    "Conj": "Conjunction",
    "Ij": "Interjection",
    "NVC": "Noun/Verb Contraction",
}

# Open classes, in default priority order.
OPEN_CLASSES = ("N", "PropN", "V", "A", "Adv")

_POS_ORDER = {code: i for i, code in enumerate(POS_CODES)}


class LexiconError(Exception):
    """Malformed lexical database input."""


@dataclass(frozen=True)
class MorphEntry:
    form: str
    root: str
    pos: str
    features: FeatureStructure = EMPTY


@dataclass(frozen=True)
class SyntEntry:
    """One syntactic-database record.

    ``items`` is the full ENTRY token sequence (argument placeholders
    such as NP0 included); ``anchors`` pairs each anchor lexeme with its
    POS, in tree order.  Exactly one of ``trees``/``families`` is
    non-empty.
    """

    index: str
    items: tuple
    anchors: tuple  # ((lexeme, pos), ...)
    trees: tuple = ()
    families: tuple = ()
    templates: tuple = ()
    examples: tuple = ()


@dataclass
class Lexicon:
    morph: dict = field(default_factory=dict)     # form -> [MorphEntry]
    syn: dict = field(default_factory=dict)       # (root, pos) -> [SyntEntry]
    stats: dict = field(default_factory=dict)     # (tree, pos) -> count

    def morph_lookup(self, word):
        """All entries for the word, case-normalized.

        The exact form is tried first, then the lowercased form, so
        sentence-initial capitalized tokens match both ways.
        """
        entries = list(self.morph.get(word, ()))
        lowered = word.lower()
        if lowered != word:
            seen = set(entries)
            entries.extend(e for e in self.morph.get(lowered, ()) if e not in seen)
        return entries

    def syn_lookup(self, root, pos):
        """Syntactic entries anchored by (root, pos); possibly several."""
        return list(self.syn.get((root, pos), ()))

    def pos_of(self, word):
        return sorted({e.pos for e in self.morph_lookup(word)}, key=_POS_ORDER.get)


def default_pos(word, sentence_initial=False):
    """Fallback POS assignment for words missing from the morphology.

    Returns the open-class categories in priority order; a capitalized
    word that is not sentence-initial is ranked Proper Noun first.
    """
    if word[:1].isupper() and not sentence_initial:
        return ("PropN",) + tuple(c for c in OPEN_CLASSES if c != "PropN")
    return OPEN_CLASSES


# ---------------------------------------------------------------------------
# Database loaders


def parse_morph(text):
    morph = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) not in (3, 4):
            raise LexiconError("morph line %d: expected 3 or 4 tab fields" % lineno)
        form, root, pos = parts[0], parts[1], parts[2]
        if pos not in POS_CODES:
            raise LexiconError("morph line %d: unknown POS %r" % (lineno, pos))
        features = EMPTY
        if len(parts) == 4 and parts[3]:
            env = {}
            try:
                equations = []
                for feat in parts[3].split(","):
                    path, _, value = feat.partition("=")
                    equations.append((tuple(path.strip().split(".")), parse_value(value)))
                features, env = apply_equations(EMPTY, equations, env)
                features = resolve(features, env)
            except (ValueError, UnificationFailure) as e:
                raise LexiconError("morph line %d: %s" % (lineno, e)) from e
        morph.setdefault(form, []).append(MorphEntry(form, root, pos, features))
    return morph


def parse_syntax(text):
    records = []
    current = {}
    pending_index = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            if current:
                records.append((pending_index, current))
                current, pending_index = {}, None
            continue
        key, _, value = line.partition(":")
        key = key.strip().upper()
        value = value.strip()
        if key == "INDEX":
            if current:
                records.append((pending_index, current))
                current = {}
            pending_index = lineno
            current["INDEX"] = value
        elif key in ("ENTRY", "POS", "TREES", "FAM", "FS"):
            current[key] = value
        elif key == "EX":
            current.setdefault("EX", []).append(value)
        else:
            raise LexiconError("syntax line %d: unknown field %r" % (lineno, key))
    if current:
        records.append((pending_index, current))

    syn = {}
    for lineno, rec in records:
        entry = _build_syn_entry(rec, lineno)
        for lexeme, pos in entry.anchors[:1]:
            syn.setdefault((lexeme, pos), []).append(entry)
    return syn


def _build_syn_entry(rec, lineno):
    for required in ("INDEX", "ENTRY", "POS"):
        if required not in rec:
            raise LexiconError("syntax record at line %s: missing %s" % (lineno, required))
    items = tuple(rec["ENTRY"].split())
    pos_seq = tuple(rec["POS"].split())
    if len(items) != len(pos_seq):
        raise LexiconError("syntax record %s: ENTRY and POS lengths differ" % rec["INDEX"])
    anchors = []
    for item, pos in zip(items, pos_seq):
        if item == pos:  # argument placeholder such as NP0
            continue
        if pos not in POS_CODES:
            raise LexiconError("syntax record %s: unknown POS %r" % (rec["INDEX"], pos))
        anchors.append((item, pos))
    if not anchors:
        raise LexiconError("syntax record %s: no anchor" % rec["INDEX"])
    trees = tuple(t.strip() for t in rec.get("TREES", "").split(",") if t.strip())
    fams = tuple(t.strip() for t in rec.get("FAM", "").split(",") if t.strip())
    if bool(trees) == bool(fams):
        raise LexiconError(
            "syntax record %s: exactly one of TREES or FAM is required" % rec["INDEX"])
    templates = tuple(t.strip() for t in rec.get("FS", "").split(",") if t.strip())
    return SyntEntry(
        index=rec["INDEX"],
        items=items,
        anchors=tuple(anchors),
        trees=trees,
        families=fams,
        templates=templates,
        examples=tuple(rec.get("EX", ())),
    )


def parse_stats(text):
    stats = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise LexiconError("stats line %d: expected 3 tab fields" % lineno)
        tree, pos, count = parts
        if pos not in POS_CODES:
            raise LexiconError("stats line %d: unknown POS %r" % (lineno, pos))
        try:
            n = int(count)
        except ValueError as e:
            raise LexiconError("stats line %d: bad count %r" % (lineno, count)) from e
        if n < 0:
            raise LexiconError("stats line %d: negative count" % lineno)
        stats[(tree, pos)] = stats.get((tree, pos), 0) + n
    return stats


def load_lexicon(morph_file, syntax_file, stats_file=None):
    with open(morph_file, encoding="utf-8") as f:
        morph = parse_morph(f.read())
    with open(syntax_file, encoding="utf-8") as f:
        syn = parse_syntax(f.read())
    stats = {}
    if stats_file:
        with open(stats_file, encoding="utf-8") as f:
            stats = parse_stats(f.read())
    return Lexicon(morph=morph, syn=syn, stats=stats)


def check_lexicon(lexicon, grammar):
    """Cross-check syntactic entries against the grammar; returns problems."""
    problems = []
    for entries in lexicon.syn.values():
        for entry in entries:
            for name in entry.trees:
                if name not in grammar.trees:
                    problems.append("%s: unknown tree %s" % (entry.index, name))
            for fam in entry.families:
                if fam not in grammar.families:
                    problems.append("%s: unknown family %s" % (entry.index, fam))
            for template in entry.templates:
                if template not in grammar.templates:
                    problems.append("%s: unknown template %s" % (entry.index, template))
    return problems


# ---------------------------------------------------------------------------
# Anchored instances


@dataclass
class AnchoredTree:
    """An elementary tree bound to sentence positions.

    ``nodes`` maps each elementary address to its (top, bottom) features
    after variable scoping, template expansion, and attachment of the
    anchor's inflection features; the structures are static from the
    parser's point of view, variables bind only in item environments.
    """

    tree: object  # ElementaryTree
    pos: str
    bindings: dict           # anchor address -> (position, word)
    nodes: dict              # address -> (top, bottom)
    syn_index: str = ""
    key: str = ""

    @property
    def name(self):
        return self.tree.name

    @property
    def is_aux(self):
        return self.tree.kind == AUXILIARY

    @property
    def anchor_position(self):
        first = self.tree.anchor_addresses[0]
        return self.bindings[first][0]

    @property
    def anchor_word(self):
        first = self.tree.anchor_addresses[0]
        return self.bindings[first][1]

    def anchor_words(self):
        return [self.bindings[a][1] for a in self.tree.anchor_addresses]

    def __repr__(self):
        spots = ",".join("%s@%d" % (w, p) for p, w in sorted(self.bindings.values()))
        return "%s[%s]" % (self.tree.name, spots)


def instantiate(tree, grammar, bindings, anchor_features, templates, syn_index, scope):
    """Bind a tree's anchors and expand its features into an instance.

    Returns None when a template conflicts with the tree's own equations
    (same-side clash); top-versus-bottom conflicts are left for the
    parser, which prunes them at the anchor's own unification step.
    """
    env = {}
    scoped = {}
    for node in tree.nodes():
        top = _scope_vars(node.top, scope)
        bottom = _scope_vars(node.bottom, scope)
        scoped[node.address] = [top, bottom]
    try:
        for tname in templates:
            for eq in grammar.templates.get(tname, ()):
                address = eq.resolve_address(tree)
                if address not in scoped:
                    raise GrammarError("template %s: no node %s in %s" % (tname, address, tree.name))
                side = 0 if eq.side == "top" else 1
                value = eq.value.scoped(scope) if isinstance(eq.value, Var) else eq.value
                merged, env = unify_env(scoped[address][side], from_path(eq.path, value), env)
                scoped[address][side] = merged
        for address, feats in anchor_features.items():
            merged, env = unify_env(scoped[address][1], feats, env)
            scoped[address][1] = merged
    except UnificationFailure:
        return None
    nodes = {addr: (resolve(t, env), resolve(b, env)) for addr, (t, b) in scoped.items()}
    spots = ",".join("%s@%d" % (w, p) for p, w in sorted(bindings.values()))
    return AnchoredTree(
        tree=tree,
        pos="",
        bindings=dict(bindings),
        nodes=nodes,
        syn_index=syn_index,
        key="%s[%s]#%s" % (tree.name, spots, scope),
    )


def _scope_vars(fs, scope):
    if not fs:
        return fs
    out = {}
    for k, v in fs.items():
        if isinstance(v, Var):
            out[k] = v.scoped(scope)
        elif isinstance(v, FeatureStructure):
            out[k] = _scope_vars(v, scope)
        else:
            out[k] = v
    return FeatureStructure(out)


def select_trees(tokens, grammar, lexicon):
    """Map tagged tokens to anchored elementary-tree instances.

    ``tokens`` is a list of ``(word, pos_collection)`` pairs.  Returns a
    per-token list of AnchoredTree.  Multi-anchor entries bind only when
    every co-anchor appears later in the sentence, in tree order; such
    instances are listed under their first anchor's token.
    """
    words = [w for w, _ in tokens]
    root_cache = [lexicon.morph_lookup(w) for w in words]
    out = [[] for _ in tokens]
    counter = itertools.count()
    for i, (word, pos_set) in enumerate(tokens):
        ordered = sorted(set(pos_set), key=lambda p: _POS_ORDER.get(p, len(_POS_ORDER)))
        for pos in ordered:
            for morph in root_cache[i]:
                if morph.pos != pos:
                    continue
                for entry in lexicon.syn_lookup(morph.root, pos):
                    tree_names = list(entry.trees)
                    for fam in entry.families:
                        tree_names.extend(grammar.families.get(fam, ()))
                    combos = _co_anchor_positions(entry, i, words, root_cache)
                    for tree_name in tree_names:
                        tree = grammar.trees.get(tree_name)
                        if tree is None:
                            continue
                        addresses = tree.anchor_addresses
                        if len(addresses) != len(entry.anchors):
                            continue
                        for positions in combos:
                            bindings = {}
                            anchor_feats = {}
                            for addr, (lexeme, _apos), p in zip(addresses, entry.anchors, positions):
                                bindings[addr] = (p, words[p])
                            anchor_feats[addresses[0]] = morph.features
                            inst = instantiate(
                                tree, grammar, bindings, anchor_feats,
                                entry.templates, entry.index, next(counter))
                            if inst is not None:
                                inst.pos = pos
                                out[i].append(inst)
    return out


def _co_anchor_positions(entry, first_pos, words, root_cache):
    """All in-order position tuples satisfying the entry's co-anchors."""
    combos = [(first_pos,)]
    for lexeme, pos in entry.anchors[1:]:
        extended = []
        for combo in combos:
            for j in range(combo[-1] + 1, len(words)):
                if any(m.root == lexeme and m.pos == pos for m in root_cache[j]):
                    extended.append(combo + (j,))
        combos = extended
        if not combos:
            return []
    return combos


def stat_top_k(candidates, stats, k):
    """Keep, per part of speech, the k most frequent trees of one token.

    Trees missing from the statistics rank below all present ones; ties
    break lexicographically by tree name.  Output preserves input order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    keep = set()
    by_pos = {}
    for inst in candidates:
        by_pos.setdefault(inst.pos, []).append(inst)
    for pos, insts in by_pos.items():
        names = sorted({inst.name for inst in insts})
        ranked = sorted(names, key=lambda n: (-(stats.get((n, pos), -1)), n))
        for name in ranked[:k]:
            keep.add((name, pos))
    return [inst for inst in candidates if (inst.name, inst.pos) in keep]
