"""Chart parser for anchored tree-adjoining grammars.

Two-pass strategy: tree selection happens in the lexicon (plus the span
filter here); this module implements the tree-grafting pass as an
agenda-driven chart over dotted-node items.

An item records an instance, a node address, a position flag (``below``:
the node's bottom is recognized; ``above``: the node is complete,
including any adjunction), a main span, and an optional foot span for
auxiliary material.  Feature structures are checked incrementally at the
no-adjoin, adjoin, and substitute steps and carried as normalized
variable bindings; two items merge only when their bindings agree, which
keeps packing sound.  Worst case is O(n^6) in sentence length.

At most one adjunction applies per node per derivation: ``below`` items
become ``above`` either through the no-adjoin step (unifying that node's
top and bottom) or through exactly one adjunction.
"""

from __future__ import annotations

import itertools
import re
from collections import deque
from dataclasses import dataclass, field

from .features import (
    EMPTY,
    UnificationFailure,
    canon,
    canon_env,
    merge_envs,
    resolve,
    unify_env,
)
from .lexicon import AnchoredTree, instantiate, stat_top_k
from .trees import (
    ANCHOR,
    SUBST,
    TERMINAL,
    CompositionError,
    adjoin,
    finalize,
    from_elementary,
    substitute,
)

INTERNAL = "internal"

BELOW = -1
ABOVE = -2

_EXTRACT_CAP = 10000


class ResourceLimitError(Exception):
    """The per-sentence chart item cap was exceeded."""


class ReplayError(Exception):
    """An extracted derivation failed to replay; signals an engine bug."""


@dataclass(frozen=True)
class ChartItem:
    """Read-only view of a recognition state, for inspection."""

    instance: str
    address: str
    flag: str               # "below" | "above"
    span: tuple
    foot_span: tuple | None
    bindings: tuple


@dataclass(frozen=True)
class Derivation:
    """Derivation-tree node: an anchored elementary tree plus the
    operations that attached its children, by Gorn address."""

    tree_name: str
    anchors: tuple                       # ((word, position), ...)
    children: tuple = ()                 # ((op, address, Derivation), ...)
    instance: AnchoredTree | None = field(default=None, compare=False, repr=False)

    @property
    def anchor_word(self):
        return self.anchors[0][0]

    @property
    def anchor_position(self):
        return self.anchors[0][1]

    def serialize(self):
        """Text form, e.g. ``(αnx0Vnx1[had] (subst @1 αNXN[I]))``."""
        return "(%s)" % self._body()

    def _body(self):
        head = "%s[%s]" % (self.tree_name, ",".join(w for w, _ in self.anchors))
        parts = [head]
        for op, address, child in self.children:
            short = "subst" if op == "substitution" else "adjoin"
            parts.append("(%s @%s %s)" % (short, address, child._body()))
        return " ".join(parts)

    def walk(self):
        yield self
        for _, _, child in self.children:
            yield from child.walk()

    def operations(self):
        """All (host derivation node, op, address, child) records."""
        for node in self.walk():
            for op, address, child in node.children:
                yield node, op, address, child

    def adjunction_count(self):
        return sum(1 for _, op, _, _ in self.operations() if op == "adjunction")

    def arcs(self):
        """Dependency reading: (head anchor position, child anchor position)."""
        out = []
        for node, _, _, child in self.operations():
            out.append((node.anchor_position, child.anchor_position))
        return out


@dataclass
class ParseForest:
    """Packed chart of completed items plus backpointers."""

    tokens: list
    instances: list
    goal_ids: list
    diagnostics: list
    item_count: int
    anchored: list = field(default_factory=list)   # per-token instance lists used
    _chart: object = field(default=None, repr=False)

    @property
    def accepted(self):
        return bool(self.goal_ids)

    def items(self):
        """Public view of below/above items."""
        if self._chart is None:
            return
        for core, env in zip(self._chart.cores, self._chart.envs):
            inst, addr, state, i, j, fl, fr = core
            if state not in (BELOW, ABOVE):
                continue
            yield ChartItem(
                instance=self.instances[inst].key,
                address=addr,
                flag="below" if state == BELOW else "above",
                span=(i, j),
                foot_span=None if fl is None else (fl, fr),
                bindings=canon_env(env),
            )


class _INode:
    __slots__ = ("label", "kind", "na", "top", "bottom", "children", "word",
                 "anchor_pos", "parent", "child_index", "arity")

    def __init__(self, label, kind, na, top, bottom):
        self.label = label
        self.kind = kind
        self.na = na
        self.top = top
        self.bottom = bottom
        self.children = ()
        self.word = None
        self.anchor_pos = None
        self.parent = None
        self.child_index = 0
        self.arity = 0


def _instance_table(inst):
    """Flatten an AnchoredTree into per-address node records."""
    table = {}
    tree = inst.tree
    for node in tree.nodes():
        top, bottom = inst.nodes.get(node.address, (node.top, node.bottom))
        rec = _INode(node.label, node.kind, node.na, top, bottom)
        if node.kind == ANCHOR:
            pos, word = inst.bindings[node.address]
            rec.word = word
            rec.anchor_pos = pos
        elif node.kind == TERMINAL:
            rec.word = node.label
        table[node.address] = rec
    for node in tree.nodes():
        rec = table[node.address]
        rec.children = tuple(c.address for c in node.children)
        rec.arity = len(rec.children)
        for idx, child in enumerate(node.children, start=1):
            table[child.address].parent = node.address
            table[child.address].child_index = idx
    return table


_EMPTY_CANON = canon(EMPTY)


class _Chart:
    def __init__(self, item_cap):
        self.cores = []
        self.envs = []
        self.ifaces = []
        self.fifaces = []
        self.bps = []
        self.bp_seen = []
        self.index = {}
        self.agenda = deque()
        self.item_cap = item_cap

    def _canon_value(self, value, env):
        if value is None:
            return None
        if value is EMPTY:
            return _EMPTY_CANON
        return canon(resolve(value, env))

    def add(self, core, env, iface, fiface, bp):
        key = core + (canon_env(env),
                      self._canon_value(iface, env),
                      self._canon_value(fiface, env))
        item_id = self.index.get(key)
        if item_id is None:
            item_id = len(self.cores)
            if item_id >= self.item_cap:
                raise ResourceLimitError(
                    "chart item cap (%d) exceeded" % self.item_cap)
            self.index[key] = item_id
            self.cores.append(core)
            self.envs.append(env)
            self.ifaces.append(iface)
            self.fifaces.append(fiface)
            self.bps.append([])
            self.bp_seen.append(set())
            self.agenda.append(item_id)
        if bp is not None and bp not in self.bp_seen[item_id]:
            self.bp_seen[item_id].add(bp)
            self.bps[item_id].append(bp)
        return item_id


class _Parser:
    def __init__(self, tokens, instances, use_features, item_cap):
        self.tokens = tokens
        self.n = len(tokens)
        self.instances = instances
        self.use_features = use_features
        self.tables = [_instance_table(inst) for inst in instances]
        self.chart = _Chart(item_cap)
        # static indexes
        self.slots_by_label = {}
        self.aux_by_foot_label = {}
        for a, table in enumerate(self.tables):
            for addr, rec in table.items():
                if rec.kind == SUBST:
                    self.slots_by_label.setdefault(rec.label, []).append((a, addr))
            if instances[a].is_aux:
                foot_addr = instances[a].tree.foot_address
                label = table[foot_addr].label
                self.aux_by_foot_label.setdefault(label, []).append((a, foot_addr))
        # dynamic indexes
        self.above_by_start = {}
        self.dot_by_end = {}
        self.below_by_span = {}
        self.auxroot_by_span = {}
        self.initroot_by_span = {}
        self.foot_seen = set()

    # -- feature helpers ----------------------------------------------

    def _unify(self, a, b, env):
        """Unify without mutating env; returns (value, env) or None."""
        if not self.use_features:
            return EMPTY, env
        try:
            return unify_env(a, b, env)
        except UnificationFailure:
            return None

    def _merge(self, e1, e2):
        if not self.use_features:
            return {}
        return merge_envs(e1, e2)

    # -- seeding ------------------------------------------------------

    def seed(self):
        positions = {}
        for i, w in enumerate(self.tokens):
            positions.setdefault(w, []).append(i)
        for a, table in enumerate(self.tables):
            for addr in sorted(table, key=_addr_key):
                rec = table[addr]
                if rec.kind == ANCHOR:
                    pos = rec.anchor_pos
                    if 0 <= pos < self.n and self.tokens[pos] == rec.word:
                        self._leaf_item(a, addr, rec, pos, pos + 1, ("anchor",))
                elif rec.kind == TERMINAL:
                    if rec.word == "":
                        for i in range(self.n + 1):
                            self._leaf_item(a, addr, rec, i, i, ("eps",))
                    else:
                        for i in positions.get(rec.word, ()):
                            self._leaf_item(a, addr, rec, i, i + 1, ("scan",))

    def _leaf_item(self, a, addr, rec, i, j, bp):
        got = self._unify(rec.top, rec.bottom, {})
        if got is None:
            return
        iface, env = got
        self.chart.add((a, addr, ABOVE, i, j, None, None), env, iface, None, bp)

    # -- main loop ----------------------------------------------------

    def run(self, start_label, start_features):
        self.seed()
        chart = self.chart
        while chart.agenda:
            item_id = chart.agenda.popleft()
            inst, addr, state, i, j, fl, fr = chart.cores[item_id]
            rec = self.tables[inst][addr]
            if state == ABOVE:
                self._process_above(item_id, inst, addr, rec, i, j, fl, fr)
            elif state == BELOW:
                self._process_below(item_id, inst, addr, rec, i, j, fl, fr)
            else:
                self._process_dot(item_id, inst, addr, rec, state, j)
        return self._goals(start_label, start_features)

    def _goals(self, start_label, start_features):
        goals = []
        for item_id, core in enumerate(self.chart.cores):
            inst, addr, state, i, j, fl, fr = core
            if state != ABOVE or addr != "0" or (i, j) != (0, self.n) or fl is not None:
                continue
            instance = self.instances[inst]
            if instance.is_aux or instance.tree.root.label != start_label:
                continue
            if self.use_features and start_features:
                got = self._unify(self.chart.ifaces[item_id], start_features,
                                  self.chart.envs[item_id])
                if got is None:
                    continue
            goals.append(item_id)
        return goals

    def _process_above(self, item_id, inst, addr, rec, i, j, fl, fr):
        chart = self.chart
        if addr == "0":
            instance = self.instances[inst]
            if instance.is_aux:
                key = (rec.label, fl, fr)
                self.auxroot_by_span.setdefault(key, []).append(item_id)
                for below_id in list(self.below_by_span.get((rec.label, fl, fr), ())):
                    self._try_adjoin(below_id, item_id)
            else:
                self.initroot_by_span.setdefault((rec.label, i, j), []).append(item_id)
                for slot in self.slots_by_label.get(rec.label, ()):
                    self._try_subst(slot, item_id)
            return
        # child completion: combine into the parent's dotted items
        parent = rec.parent
        idx = rec.child_index
        prec = self.tables[inst][parent]
        if idx == 1:
            self._progress(inst, parent, prec, 1, i, j, fl, fr,
                           chart.envs[item_id], chart.fifaces[item_id],
                           ("part", (item_id,)))
        else:
            for left_id in list(self.dot_by_end.get((inst, parent, idx - 1, i), ())):
                self._combine(left_id, item_id)
        self.above_by_start.setdefault((inst, addr, i), []).append(item_id)

    def _process_dot(self, item_id, inst, addr, rec, state, j):
        self.dot_by_end.setdefault((inst, addr, state, j), []).append(item_id)
        child_addr = rec.children[state]  # next child; state counts done ones
        for right_id in list(self.above_by_start.get((inst, child_addr, j), ())):
            self._combine(item_id, right_id)

    def _combine(self, left_id, right_id):
        chart = self.chart
        inst, parent, r, i, _x, fl1, fr1 = chart.cores[left_id]
        _, _, _, _, j, fl2, fr2 = chart.cores[right_id]
        if fl1 is not None and fl2 is not None:
            return  # a node dominates at most one foot
        env = self._merge(chart.envs[left_id], chart.envs[right_id])
        if env is None:
            return
        fl, fr = (fl1, fr1) if fl1 is not None else (fl2, fr2)
        fiface = chart.fifaces[left_id] if fl1 is not None else chart.fifaces[right_id]
        prec = self.tables[inst][parent]
        self._progress(inst, parent, prec, r + 1, i, j, fl, fr, env, fiface,
                       ("dot", (left_id, right_id)))

    def _progress(self, inst, parent, prec, r, i, j, fl, fr, env, fiface, bp):
        state = BELOW if r == prec.arity else r
        self.chart.add((inst, parent, state, i, j, fl, fr), env, None, fiface, bp)

    def _process_below(self, item_id, inst, addr, rec, i, j, fl, fr):
        chart = self.chart
        # no-adjoin: rejoin top and bottom
        got = self._unify(rec.top, rec.bottom, chart.envs[item_id])
        if got is not None:
            iface, env = got
            chart.add((inst, addr, ABOVE, i, j, fl, fr), env, iface,
                      chart.fifaces[item_id], ("noadj", (item_id,)))
        if rec.kind != INTERNAL or rec.na:
            return
        # adjunction host
        self.below_by_span.setdefault((rec.label, i, j), []).append(item_id)
        for aux_id in list(self.auxroot_by_span.get((rec.label, i, j), ())):
            self._try_adjoin(item_id, aux_id)
        # hypothesize foot spans for auxiliaries that could adjoin here
        for b, foot_addr in self.aux_by_foot_label.get(rec.label, ()):
            fkey = (b, i, j)
            if fkey in self.foot_seen:
                continue
            self.foot_seen.add(fkey)
            frec = self.tables[b][foot_addr]
            got = self._unify(frec.top, frec.bottom, {})
            if got is None:
                continue
            fiface, env = got
            chart.add((b, foot_addr, ABOVE, i, j, i, j), env, None, fiface,
                      ("foot",))

    def _try_adjoin(self, below_id, aux_id):
        chart = self.chart
        h_inst, h_addr, _, _fl, _fr, h_fl, h_fr = chart.cores[below_id]
        a_inst, _, _, i, j, _afl, _afr = chart.cores[aux_id]
        if a_inst == h_inst:
            return
        rec = self.tables[h_inst][h_addr]
        env = self._merge(chart.envs[below_id], chart.envs[aux_id])
        if env is None:
            return
        got = self._unify(rec.top, chart.ifaces[aux_id], env)
        if got is None:
            return
        vtop, env = got
        got = self._unify(rec.bottom, chart.fifaces[aux_id], env)
        if got is None:
            return
        _, env = got
        chart.add((h_inst, h_addr, ABOVE, i, j, h_fl, h_fr), env, vtop,
                  chart.fifaces[below_id],
                  ("adjoin", (below_id, aux_id), h_addr))

    def _try_subst(self, slot, root_id):
        chart = self.chart
        s_inst, s_addr = slot
        r_inst, _, _, i, j, _, _ = chart.cores[root_id]
        if s_inst == r_inst:
            return
        rec = self.tables[s_inst][s_addr]
        got = self._unify(rec.top, chart.ifaces[root_id], chart.envs[root_id])
        if got is None:
            return
        vtop, env = got
        chart.add((s_inst, s_addr, ABOVE, i, j, None, None), env, vtop, None,
                  ("subst", (root_id,), s_addr))


def _addr_key(address):
    if address == "0":
        return ()
    return tuple(int(p) for p in address.split("."))


def span_filter(anchored, n):
    """Weed out instances that cannot fit the sentence.

    Drops any anchored tree whose minimum yield exceeds n, or whose
    count of obligatory frontier items (terminals and substitution
    slots; feet and epsilons excluded) strictly left or right of an
    anchor exceeds the tokens available on that side of its position.
    """
    out = []
    for lists in anchored:
        kept = []
        for inst in lists:
            # pre-order traversal hands back leaves left to right
            oblig = [node for node in inst.tree.nodes()
                     if node.kind in (ANCHOR, SUBST)
                     or (node.kind == TERMINAL and node.label != "")]
            if len(oblig) > n:
                continue
            ok = True
            for addr in inst.tree.anchor_addresses:
                pos = inst.bindings[addr][0]
                left = next(k for k, node in enumerate(oblig) if node.address == addr)
                right = len(oblig) - left - 1
                if left > pos or right > n - 1 - pos:
                    ok = False
                    break
            if ok:
                kept.append(inst)
        out.append(kept)
    return out


def parse(tokens, anchored, start, *, start_features=None, use_features=True,
          item_cap=1_000_000):
    """Recognize ``tokens`` from per-token anchored trees.

    ``start`` is the goal root label; ``start_features`` optionally
    constrains the goal root's final feature structure.  A no-parse is a
    normal empty forest; exceeding ``item_cap`` raises
    :class:`ResourceLimitError`.
    """
    tokens = list(tokens)
    instances = [inst for lists in anchored for inst in lists]
    diagnostics = []
    covered = set()
    for inst in instances:
        for pos, _ in inst.bindings.values():
            covered.add(pos)
        for node in inst.tree.nodes():
            if node.kind == TERMINAL and node.label:
                for i, w in enumerate(tokens):
                    if w == node.label:
                        covered.add(i)
    for i, w in enumerate(tokens):
        if i not in covered:
            diagnostics.append("no trees cover token %d (%r)" % (i, w))
    if diagnostics:
        return ParseForest(tokens=tokens, instances=instances, goal_ids=[],
                           diagnostics=diagnostics, item_count=0,
                           anchored=[list(lst) for lst in anchored])
    engine = _Parser(tokens, instances, use_features, item_cap)
    goals = engine.run(start, start_features)
    if not goals:
        diagnostics.append("no %s analysis spans the sentence" % start)
    return ParseForest(
        tokens=tokens,
        instances=instances,
        goal_ids=goals,
        diagnostics=diagnostics,
        item_count=len(engine.chart.cores),
        anchored=[list(lst) for lst in anchored],
        _chart=engine.chart,
    )


def parse_with_retry(tokens, anchored, stats, k, start, **kwargs):
    """Parse with the top-k statistics filter, retrying unfiltered.

    Returns ``(forest, retried)``.  The retry only happens when the
    filter actually removed candidates and the first attempt produced an
    empty forest, so the final accept/reject decision always matches
    unfiltered parsing.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    filtered = [stat_top_k(lists, stats, k) for lists in anchored]
    same = all(len(f) == len(a) for f, a in zip(filtered, anchored))
    forest = parse(tokens, filtered, start, **kwargs)
    if forest.accepted or same:
        return forest, False
    return parse(tokens, anchored, start, **kwargs), True


# ---------------------------------------------------------------------------
# Derivation extraction


def extract_derivations(forest, limit=None):
    """Enumerate distinct derivations from the packed chart.

    Deterministic order (chart construction order, before any ranking);
    every returned derivation replays successfully.  ``limit`` caps the
    number returned.
    """
    if not forest.goal_ids:
        return []
    chart = forest._chart
    cap = limit if limit is not None else _EXTRACT_CAP
    memo = {}

    def enum(item_id):
        cached = memo.get(item_id)
        if cached is not None:
            return cached
        results = []
        seen = set()
        for bp in sorted(chart.bps[item_id], key=_bp_key):
            op = bp[0]
            if op in ("anchor", "scan", "eps", "foot"):
                candidates = [()]
            elif op in ("part", "noadj"):
                candidates = enum(bp[1][0])
            elif op == "dot":
                left, right = bp[1]
                candidates = [le + re_ for le in enum(left) for re_ in enum(right)]
            elif op == "subst":
                root_id = bp[1][0]
                s_inst = chart.cores[item_id][0]
                r_inst = chart.cores[root_id][0]
                edge = ("substitution", s_inst, bp[2], r_inst)
                candidates = [ce + (edge,) for ce in enum(root_id)]
            else:  # adjoin
                below_id, aux_id = bp[1]
                h_inst = chart.cores[below_id][0]
                a_inst = chart.cores[aux_id][0]
                edge = ("adjunction", h_inst, bp[2], a_inst)
                candidates = [be + ae + (edge,)
                              for be in enum(below_id) for ae in enum(aux_id)]
            for cand in candidates:
                norm = tuple(sorted(cand))
                if norm not in seen:
                    seen.add(norm)
                    results.append(norm)
                    if len(results) >= cap:
                        break
            if len(results) >= cap:
                break
        memo[item_id] = results
        return results

    derivations = []
    seen = set()
    for goal_id in forest.goal_ids:
        root_inst = chart.cores[goal_id][0]
        for edges in enum(goal_id):
            derivation = _build_derivation(forest, root_inst, edges)
            key = derivation.serialize()
            if key in seen:
                continue
            seen.add(key)
            derivations.append(derivation)
            if limit is not None and len(derivations) >= limit:
                return derivations
    return derivations


def _bp_key(bp):
    return (bp[0], bp[1] if len(bp) > 1 else (), bp[2] if len(bp) > 2 else "")


def _build_derivation(forest, root_inst, edges):
    children_of = {}
    for op, host, addr, child in edges:
        children_of.setdefault(host, []).append((op, addr, child))

    def build(inst_idx):
        inst = forest.instances[inst_idx]
        kids = []
        for op, addr, child_idx in sorted(
                children_of.get(inst_idx, ()),
                key=lambda e: (_addr_key(e[1]), e[0], e[2])):
            kids.append((op, addr, build(child_idx)))
        anchors = tuple((inst.bindings[a][1], inst.bindings[a][0])
                        for a in inst.tree.anchor_addresses)
        return Derivation(tree_name=inst.name, anchors=anchors,
                          children=tuple(kids), instance=inst)

    return build(root_inst)


_DERIV_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_derivation(text):
    """Parse the textual derivation form back into a Derivation.

    Instances are not reattached; replaying through
    :func:`derived_tree` then requires the grammar.
    """
    tokens = _DERIV_TOKEN.findall(text)
    pos = 0

    def expect(tok):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            raise ValueError("expected %r at token %d" % (tok, pos))
        pos += 1

    def body():
        nonlocal pos
        head = tokens[pos]
        pos += 1
        m = re.fullmatch(r"(.+)\[(.*)\]", head)
        if not m:
            raise ValueError("bad derivation head %r" % head)
        name = m.group(1)
        anchors = tuple((w, -1) for w in m.group(2).split(","))
        children = []
        while pos < len(tokens) and tokens[pos] == "(":
            expect("(")
            op = {"subst": "substitution", "adjoin": "adjunction"}.get(tokens[pos])
            if op is None:
                raise ValueError("unknown operation %r" % tokens[pos])
            pos += 1
            address = tokens[pos].lstrip("@")
            pos += 1
            child = body()
            children.append((op, address, child))
            expect(")")
        return Derivation(tree_name=name, anchors=anchors, children=tuple(children))

    expect("(")
    result = body()
    expect(")")
    if pos != len(tokens):
        raise ValueError("trailing content in derivation text")
    return result


@dataclass
class ParseTree:
    """Derived phrase-structure tree with final unified features.

    ``derivation_index`` maps each node's origin instance key back to the
    derivation node that contributed it (used by the parse ranker).
    """

    root: object       # DNode
    tokens: list
    derivation_index: dict = field(default_factory=dict)

    def nodes(self):
        stack = [self.root]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))


def derived_tree(derivation, grammar=None):
    """Replay a derivation bottom-up into its derived tree.

    The final pass unifies every node's top with its bottom and stores
    the result on the node.  Raises :class:`ReplayError` when the replay
    fails, which signals an extraction bug for parser-produced
    derivations.
    """
    counter = itertools.count()
    env = {}
    derivation_index = {}

    def build(dnode):
        nonlocal env
        uid = next(counter)
        derivation_index[uid] = dnode
        inst = dnode.instance
        if inst is not None:
            tree = inst.tree
            node_features = dict(inst.nodes)
            words = {a: w for a, (p, w) in inst.bindings.items()}
        else:
            if grammar is None or dnode.tree_name not in grammar.trees:
                raise ReplayError("no instance and no grammar tree for %s"
                                  % dnode.tree_name)
            tree = grammar.trees[dnode.tree_name]
            from .lexicon import _scope_vars
            node_features = {
                node.address: (_scope_vars(node.top, uid), _scope_vars(node.bottom, uid))
                for node in tree.nodes()
            }
            words = dict(zip(tree.anchor_addresses, (w for w, _ in dnode.anchors)))
        state = from_elementary(tree, instance_key=uid, anchor_words=words,
                                node_features=node_features)
        for op, address, child in dnode.children:
            sub = build(child)
            gorn = _locate(state, uid, address)
            if gorn is None:
                raise ReplayError("lost track of %s node %s" % (dnode.tree_name, address))
            try:
                if op == "substitution":
                    state, env = substitute(state, gorn, sub, env)
                elif op == "adjunction":
                    state, env = adjoin(state, gorn, sub, env)
                else:
                    raise ReplayError("unknown operation %r" % op)
            except CompositionError as e:
                raise ReplayError("replaying %s at %s of %s: %s"
                                  % (op, address, dnode.tree_name, e)) from e
        return state

    state = build(derivation)
    try:
        finalize(state, env)
    except CompositionError as e:
        raise ReplayError("final unification failed: %s" % e) from e
    return ParseTree(root=state.root, tokens=state.frontier(),
                     derivation_index=derivation_index)


def _locate(state, uid, address):
    addresses = state.addresses()
    for node in state.nodes():
        if node.origin == (uid, address):
            return addresses[id(node)]
    return None


def anchor_for_tokens(grammar, tokens):
    """Anchor a grammar directly against a token string.

    For formal test grammars without a lexicon: every tree whose anchor
    label equals a token is instantiated at that position (plain
    terminals match during scanning).
    """
    out = []
    counter = itertools.count()
    names = sorted(grammar.trees)
    for i, word in enumerate(tokens):
        row = []
        for name in names:
            tree = grammar.trees[name]
            addresses = tree.anchor_addresses
            if len(addresses) != 1:
                continue
            anchor = tree.node_at(addresses[0])
            if anchor.label != word:
                continue
            inst = instantiate(tree, grammar, {addresses[0]: (i, word)},
                               {addresses[0]: EMPTY}, (), "", next(counter))
            if inst is not None:
                inst.pos = anchor.label
                row.append(inst)
        out.append(row)
    return out
