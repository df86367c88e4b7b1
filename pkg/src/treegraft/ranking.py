"""Structural-preference ranking of derivations.

Five heuristics, each a non-negative penalty (lower is better):

h1  adjunction count (prefer argument positions to adjunct positions);
h2  per prepositional modifier other than "of", the number of closer
    non-proper-noun attachment sites it skipped;
h3  non-right-branching links in chains of adjectives, adverbs, or PPs
    (a modifier of some class adjoined at the root of another modifier
    of the same class);
h4  non-left-branching links in noun compound sequences;
h5  low (narrow) attachment of a modifier against a coordination of
    same-type modifyees, where wide scope is preferred.

Derivations are ordered by the weighted sum of the vector, ties broken
by the derivation's text serialization, so ranking is a deterministic
total order.  The heuristic set is an open registry: entries added to
``HEURISTICS`` beyond the core five land in ``PenaltyVector.extras``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .parser import derived_tree
from .trees import ANCHOR, AUXILIARY, TERMINAL

DEFAULT_WEIGHTS = {"h1": 1.0, "h2": 1.0, "h3": 1.0, "h4": 1.0, "h5": 1.0}

# modifier classes by the anchor node's category label
_MOD_CLASS = {"A": "adj", "Adv": "adv", "P": "pp", "N": "ncomp", "Conj": "conj"}


@dataclass(frozen=True)
class PenaltyVector:
    h1: int = 0
    h2: int = 0
    h3: int = 0
    h4: int = 0
    h5: int = 0
    tie_break: str = ""
    extras: tuple = ()

    def as_dict(self):
        out = {"h1": self.h1, "h2": self.h2, "h3": self.h3, "h4": self.h4, "h5": self.h5}
        out.update(dict(self.extras))
        return out

    def total(self, weights=None):
        weights = weights or DEFAULT_WEIGHTS
        return sum(weights.get(name, 1.0) * value for name, value in self.as_dict().items())


@dataclass
class RankedParses:
    """Derivations sorted ascending by weighted penalty."""

    entries: list                      # [(Derivation, PenaltyVector)]
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    cutoff: int | None = None

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def derivations(self):
        return [d for d, _ in self.entries]


class _ScoreContext:
    """Replayed derived tree plus the bookkeeping the heuristics need."""

    def __init__(self, derivation, grammar):
        self.derivation = derivation
        self.grammar = grammar
        self.tree = derived_tree(derivation, grammar)
        self.spans = {}
        self._measure(self.tree.root, 0)
        # origin instance uid -> derivation node
        self.by_uid = self.tree.derivation_index
        self.uid_of = {id(d): uid for uid, d in self.by_uid.items()}
        # adjunction and substitution edges as (host uid, address, child uid)
        self.adjunctions = []
        self.substitutions = []
        for node, op, address, child in derivation.operations():
            record = (self.uid_of[id(node)], address, self.uid_of[id(child)])
            if op == "adjunction":
                self.adjunctions.append(record)
            else:
                self.substitutions.append(record)
        self.occupied = {(host, address) for host, address, _ in self.adjunctions}

    def _measure(self, node, pos):
        start = pos
        if node.kind == ANCHOR or (node.kind == TERMINAL and node.label):
            pos += 1
        for child in node.children:
            pos = self._measure(child, pos)
        self.spans[id(node)] = (start, pos)
        return pos

    def mod_class(self, uid):
        dnode = self.by_uid[uid]
        tree = self.grammar.trees.get(dnode.tree_name) if self.grammar else None
        if tree is None and dnode.instance is not None:
            tree = dnode.instance.tree
        if tree is None or tree.kind != AUXILIARY:
            return None
        anchor = tree.node_at(tree.anchor_addresses[0])
        return _MOD_CLASS.get(anchor.label)

    def anchor_position(self, uid):
        return self.by_uid[uid].anchor_position

    def anchor_is_proper(self, uid):
        dnode = self.by_uid[uid]
        inst = dnode.instance
        if inst is not None:
            return inst.pos == "PropN"
        tree = self.grammar.trees.get(dnode.tree_name) if self.grammar else None
        return bool(tree) and tree.node_at(tree.anchor_addresses[0]).label == "PropN"

    def is_foot_origin(self, uid, address):
        dnode = self.by_uid[uid]
        tree = self.grammar.trees.get(dnode.tree_name) if self.grammar else None
        if tree is None and dnode.instance is not None:
            tree = dnode.instance.tree
        return bool(tree) and tree.foot_address == address

    def pp_site_labels(self):
        """Root labels of auxiliary trees anchored by a preposition."""
        labels = set()
        trees = self.grammar.trees.values() if self.grammar else []
        for tree in trees:
            if tree.kind != AUXILIARY:
                continue
            anchor = tree.node_at(tree.anchor_addresses[0])
            if anchor.label == "P":
                labels.add(tree.root.label)
        return labels or {"NP", "VP"}


def _h1(ctx):
    return len(ctx.adjunctions)


def _h2(ctx):
    """Skipped closer attachment sites for non-"of" PP modifiers."""
    penalty = 0
    site_labels = ctx.pp_site_labels()
    for host, address, child in ctx.adjunctions:
        if ctx.mod_class(child) != "pp":
            continue
        if ctx.by_uid[child].anchor_word == "of":
            continue
        pp_start = ctx.anchor_position(child)
        # the detached site node keeps the pre-adjunction span
        chosen_head = ctx.anchor_position(host)
        for node in ctx.tree.nodes():
            if node.kind != "internal" or node.na or node.origin is None:
                continue
            uid, addr = node.origin
            if (uid, addr) == (host, address):
                continue
            if node.label not in site_labels:
                continue
            if ctx.is_foot_origin(uid, addr):
                continue  # a foot copy duplicates the node spliced below it
            if ctx.spans[id(node)][1] != pp_start:
                continue
            if (uid, addr) in ctx.occupied:
                continue
            if ctx.anchor_is_proper(uid):
                continue
            if ctx.anchor_position(uid) > chosen_head:
                penalty += 1
    return penalty


def _chain_links(ctx, classes):
    count = 0
    for host, address, child in ctx.adjunctions:
        cls = ctx.mod_class(child)
        if cls in classes and address == "0" and ctx.mod_class(host) == cls:
            count += 1
    return count


def _h3(ctx):
    return _chain_links(ctx, ("adj", "adv", "pp"))


def _h4(ctx):
    return _chain_links(ctx, ("ncomp",))


def _h5(ctx):
    """Narrow attachment against a coordination of same-type modifyees."""
    penalty = 0
    conj_edges = [(h, a, c) for h, a, c in ctx.adjunctions if ctx.mod_class(c) == "conj"]
    mod_edges = [(h, a, c) for h, a, c in ctx.adjunctions
                 if ctx.mod_class(c) in ("adj", "adv", "pp", "ncomp")]
    fillers = {}
    for host, address, child in ctx.substitutions:
        fillers.setdefault(host, set()).add(child)
    for c_host, c_addr, c_child in conj_edges:
        conj_fillers = fillers.get(c_child, set())
        for m_host, m_addr, m_child in mod_edges:
            # the coordination wrapped the modifier's own output
            if c_host == m_child and c_addr == "0":
                penalty += 1
            # the modifier sits inside the second conjunct
            elif m_host in conj_fillers:
                penalty += 1
            # the modifier sits below the coordinated node of the same host
            elif m_host == c_host and _is_under(m_addr, c_addr):
                penalty += 1
    return penalty


def _is_under(address, ancestor):
    if address == ancestor:
        return False
    if ancestor == "0":
        return True
    return address.startswith(ancestor + ".")


HEURISTICS = {
    "h1": _h1,
    "h2": _h2,
    "h3": _h3,
    "h4": _h4,
    "h5": _h5,
}


def score(derivation, grammar=None):
    """Penalty vector for one replayable derivation."""
    ctx = _ScoreContext(derivation, grammar)
    values = {}
    for name, fn in HEURISTICS.items():
        values[name] = fn(ctx)
    extras = tuple(sorted((k, v) for k, v in values.items()
                          if k not in ("h1", "h2", "h3", "h4", "h5")))
    return PenaltyVector(
        h1=values.get("h1", 0), h2=values.get("h2", 0), h3=values.get("h3", 0),
        h4=values.get("h4", 0), h5=values.get("h5", 0),
        tie_break=derivation.serialize(), extras=extras)


def rank(derivations, grammar=None, weights=None, n=None):
    """Stable sort by weighted penalty sum, ties by serialization order."""
    weights = dict(DEFAULT_WEIGHTS, **(weights or {}))
    scored = [(d, score(d, grammar)) for d in derivations]
    scored.sort(key=lambda pair: (pair[1].total(weights), pair[1].tie_break))
    if n is not None:
        scored = scored[:n]
    return RankedParses(entries=scored, weights=weights, cutoff=n)
