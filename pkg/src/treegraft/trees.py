"""Elementary trees, derived trees, and the composition operations.

An elementary tree is either initial (substitutes into a slot) or
auxiliary (adjoins at an internal node, wrapping material around that
node's subtree).  Every tree is lexicalized: at least one frontier
position is an anchor to be bound to a word.  Nodes carry two feature
structures, top and bottom, which adjunction separates and which are
rejoined by a final top-bottom unification when a derivation completes.

Gorn addressing: the root is "0"; the i-th child of the root is "i";
the i-th child of a node at address a (a != "0") is "a.i".
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .features import (
    EMPTY,
    FeatureStructure,
    UnificationFailure,
    check_depth,
    resolve,
    unify_env,
)

INTERNAL = "internal"
ANCHOR = "anchor"
SUBST = "subst"
FOOT = "foot"
TERMINAL = "terminal"

LEAF_KINDS = (ANCHOR, SUBST, FOOT, TERMINAL)

INITIAL = "initial"
AUXILIARY = "auxiliary"


class CompositionError(Exception):
    """Substitution or adjunction rejected: bad site, bad labels, or a
    feature clash.  ``reason`` is a short machine-readable tag and
    ``path`` the failing feature path, when one exists."""

    def __init__(self, reason, message, path=None):
        self.reason = reason
        self.path = path
        super().__init__(message)


@dataclass
class TreeNode:
    label: str
    kind: str = INTERNAL
    children: list = field(default_factory=list)
    top: FeatureStructure = EMPTY
    bottom: FeatureStructure = EMPTY
    na: bool = False
    address: str = "0"

    def is_leaf(self):
        return self.kind in LEAF_KINDS

    def __repr__(self):
        marks = {ANCHOR: "<>", SUBST: "!", FOOT: "*", TERMINAL: '"'}
        return "<%s%s @%s>" % (self.label, marks.get(self.kind, ""), self.address)


def child_address(parent_address, index):
    """1-based Gorn address of a child."""
    if parent_address == "0":
        return str(index)
    return "%s.%d" % (parent_address, index)


def assign_addresses(root):
    root.address = "0"
    stack = [root]
    while stack:
        node = stack.pop()
        for i, child in enumerate(node.children, start=1):
            child.address = child_address(node.address, i)
            stack.append(child)
    return root


def iter_nodes(root):
    """Pre-order, document order."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


@dataclass
class ElementaryTree:
    name: str
    kind: str
    root: TreeNode
    family: str | None = None

    def __post_init__(self):
        self._by_address = {n.address: n for n in iter_nodes(self.root)}

    def nodes(self):
        return iter_nodes(self.root)

    def node_at(self, address):
        return self._by_address.get(address)

    @property
    def anchor_addresses(self):
        return [n.address for n in self.nodes() if n.kind == ANCHOR]

    @property
    def foot_address(self):
        for n in self.nodes():
            if n.kind == FOOT:
                return n.address
        return None

    def __repr__(self):
        return "<ElementaryTree %s (%s)>" % (self.name, self.kind)


def validate_tree(tree):
    """Check well-formedness; returns a list of violations (empty = ok)."""
    problems = []
    feet = [n for n in tree.nodes() if n.kind == FOOT]
    anchors = tree.anchor_addresses
    if tree.kind == INITIAL and feet:
        problems.append("foot in initial tree")
    if tree.kind == AUXILIARY and len(feet) != 1:
        problems.append("auxiliary tree must have exactly one foot (found %d)" % len(feet))
    for f in feet:
        if f.label != tree.root.label:
            problems.append("foot label %s differs from root label %s" % (f.label, tree.root.label))
    if not anchors:
        problems.append("tree has no anchor")
    for node in tree.nodes():
        if node.is_leaf() and node.children:
            problems.append("%s node %s has children" % (node.kind, node.address))
        if not node.is_leaf() and not node.children:
            problems.append("internal node %s has no children" % node.address)
        for fs in (node.top, node.bottom):
            try:
                check_depth(fs)
            except ValueError:
                problems.append("feature depth > 2 at %s" % node.address)
    # address consistency with tree shape
    for node in tree.nodes():
        for i, child in enumerate(node.children, start=1):
            expected = child_address(node.address, i)
            if child.address != expected:
                problems.append("address %s should be %s" % (child.address, expected))
    if tree.root.address != "0":
        problems.append("root address must be 0")
    return problems


# ---------------------------------------------------------------------------
# Derived trees


@dataclass
class DNode:
    """Node of a derived tree under construction or on display."""

    label: str
    kind: str
    children: list = field(default_factory=list)
    top: FeatureStructure = EMPTY
    bottom: FeatureStructure = EMPTY
    na: bool = False
    origin: tuple | None = None  # (instance key, elementary address)
    word: str | None = None
    features: FeatureStructure | None = None  # set by finalize()


@dataclass
class DerivedTree:
    """A (partially) derived phrase-structure tree.

    Composition functions are pure: they deep-copy their inputs and
    return fresh states, so grammar trees stay shareable across
    concurrent derivations.
    """

    root: DNode
    kind: str = INITIAL  # kind of the base elementary tree

    def copy(self):
        return DerivedTree(_copy_dnode(self.root), self.kind)

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(reversed(n.children))

    def node_at(self, address):
        """Resolve a Gorn address against the current shape."""
        if address == "0":
            return self.root
        node = self.root
        for part in address.split("."):
            i = int(part) - 1
            if i < 0 or i >= len(node.children):
                return None
            node = node.children[i]
        return node

    def addresses(self):
        """Current-shape Gorn address for every node."""
        out = {}

        def walk(node, addr):
            out[id(node)] = addr
            for i, child in enumerate(node.children, start=1):
                walk(child, child_address(addr, i))

        walk(self.root, "0")
        return out

    def foot_node(self):
        for n in self.nodes():
            if n.kind == FOOT:
                return n
        return None

    def frontier(self):
        """Left-to-right lexical yield.  Epsilon leaves contribute nothing;
        unbound anchors contribute their category label."""
        out = []

        def walk(node):
            if node.kind == ANCHOR:
                out.append(node.word if node.word is not None else node.label)
            elif node.kind == TERMINAL:
                if node.label:
                    out.append(node.word if node.word is not None else node.label)
            elif node.kind == SUBST:
                out.append(node.label + "!")
            elif node.kind == FOOT:
                out.append(node.label + "*")
            else:
                for child in node.children:
                    walk(child)

        walk(self.root)
        return out

    def count_nodes(self):
        return sum(1 for _ in self.nodes())


def _copy_dnode(node):
    return DNode(
        label=node.label,
        kind=node.kind,
        children=[_copy_dnode(c) for c in node.children],
        top=node.top,
        bottom=node.bottom,
        na=node.na,
        origin=node.origin,
        word=node.word,
        features=node.features,
    )


def from_elementary(tree, instance_key=None, anchor_words=None, node_features=None):
    """Build a DerivedTree from an elementary tree.

    ``anchor_words`` maps elementary addresses to words; ``node_features``
    maps addresses to (top, bottom) overrides (used by anchored
    instances, whose features carry scoped variables and morphology).
    """
    anchor_words = anchor_words or {}
    node_features = node_features or {}

    def build(tnode):
        top, bottom = node_features.get(tnode.address, (tnode.top, tnode.bottom))
        return DNode(
            label=tnode.label,
            kind=tnode.kind,
            children=[build(c) for c in tnode.children],
            top=top,
            bottom=bottom,
            na=tnode.na,
            origin=(instance_key, tnode.address),
            word=anchor_words.get(tnode.address),
        )

    return DerivedTree(build(tree.root), tree.kind)


def _as_derived(obj):
    if isinstance(obj, DerivedTree):
        return obj
    if isinstance(obj, ElementaryTree):
        return from_elementary(obj)
    raise TypeError("expected DerivedTree or ElementaryTree, got %r" % (obj,))


def substitute(host, address, filler, env=None):
    """Fill the substitution slot at ``address`` with an initial tree.

    The slot's top unifies with the filler root's top; the slot node and
    the filler root merge into one node.  Returns ``(state, env)``.
    """
    host = _as_derived(host)
    filler = _as_derived(filler)
    env = dict(env or {})
    site = host.node_at(address)
    if site is None:
        raise CompositionError("no-such-node", "no node at address %s" % address)
    if site.kind != SUBST:
        raise CompositionError("not-a-slot", "node at %s is not a substitution slot" % address)
    if filler.kind != INITIAL:
        raise CompositionError("not-initial", "only initial trees substitute")
    froot = filler.root
    if froot.label != site.label:
        raise CompositionError(
            "label-mismatch", "slot %s cannot take %s" % (site.label, froot.label))
    try:
        top, env = unify_env(site.top, froot.top, env)
    except UnificationFailure as f:
        raise CompositionError("unification", str(f), path=f.path) from f

    result = host.copy()
    new_site = result.node_at(address)
    new_froot = _copy_dnode(froot)
    new_site.label = new_froot.label
    new_site.kind = new_froot.kind
    new_site.children = new_froot.children
    new_site.top = top
    new_site.bottom = new_froot.bottom
    new_site.na = new_froot.na
    new_site.origin = new_froot.origin
    new_site.word = new_froot.word
    return result, env


def adjoin(host, address, aux, env=None):
    """Adjoin an auxiliary tree at the internal node at ``address``.

    The host subtree detaches and reattaches under the auxiliary's foot;
    the auxiliary root takes over the site.  Features follow the standard
    splitting: site top unifies with the auxiliary root's top, site
    bottom with the foot's bottom.  Returns ``(state, env)``.
    """
    host = _as_derived(host)
    aux = _as_derived(aux)
    env = dict(env or {})
    site = host.node_at(address)
    if site is None:
        raise CompositionError("no-such-node", "no node at address %s" % address)
    if site.kind != INTERNAL:
        raise CompositionError("not-internal", "node at %s cannot host adjunction" % address)
    if site.na:
        raise CompositionError("null-adjunction", "null-adjunction constraint at %s" % address)
    if aux.kind != AUXILIARY:
        raise CompositionError("not-auxiliary", "only auxiliary trees adjoin")
    aroot = aux.root
    foot = aux.foot_node()
    if foot is None:
        raise CompositionError("no-foot", "auxiliary tree has no foot")
    if aroot.label != site.label:
        raise CompositionError(
            "label-mismatch", "cannot adjoin %s at %s node" % (aroot.label, site.label))
    try:
        top, env = unify_env(site.top, aroot.top, env)
        foot_bottom, env = unify_env(foot.bottom, site.bottom, env)
    except UnificationFailure as f:
        raise CompositionError("unification", str(f), path=f.path) from f

    result = host.copy()
    new_site = result.node_at(address)
    detached = _copy_dnode(new_site)
    # the detached node's features moved to the splice points
    detached.top = EMPTY
    detached.bottom = EMPTY

    aux_copy = _copy_dnode(aroot)
    new_foot = None
    for n in DerivedTree(aux_copy).nodes():
        if n.kind == FOOT:
            new_foot = n
            break
    new_foot.kind = INTERNAL
    new_foot.bottom = foot_bottom
    new_foot.children = [detached]

    new_site.label = aux_copy.label
    new_site.kind = aux_copy.kind
    new_site.children = aux_copy.children
    new_site.top = top
    new_site.bottom = aux_copy.bottom
    new_site.na = aux_copy.na
    new_site.origin = aux_copy.origin
    new_site.word = aux_copy.word
    return result, env


def finalize(state, env=None):
    """End-of-derivation pass: unify every node's top with its bottom and
    store the result on the node.  Raises CompositionError on clash."""
    env = dict(env or {})
    for node in state.nodes():
        if node.kind == SUBST:
            raise CompositionError("open-slot", "unfilled substitution slot %s" % node.label)
        if node.kind == FOOT:
            raise CompositionError("open-foot", "auxiliary tree was never adjoined")
        try:
            merged, env = unify_env(node.top, node.bottom, env)
        except UnificationFailure as f:
            raise CompositionError("unification", str(f), path=f.path) from f
        node.features = merged
    for node in state.nodes():
        node.features = resolve(node.features, env)
    return env
