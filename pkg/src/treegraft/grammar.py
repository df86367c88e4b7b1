"""Grammar files: tree database and feature templates.

Tree file format, one tree per block::

    tree αnx0Vnx1 family Tnx0Vnx1
      (S (NP!) (VP (V<>) (NP!)))
      feat 0 bot mode=?m
      feat 2 top mode=?m

Markers on a node label: ``!`` substitution slot, ``*`` foot, ``<>``
anchor, ``@NA`` null adjunction.  Quoted leaves are literal terminals;
``""`` is the empty string.  Feature lines attach a path to the top or
bottom structure of the node at a Gorn address.

Template file, one equation per line (names may repeat to accumulate)::

    template #N_plur: anchor.top.agr.num = plur

Template addresses may be Gorn addresses or the selectors ``root``,
``foot``, ``anchor`` and ``anchor2``/``anchor3``... for later anchors.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field

from .features import FeatureStructure, UnificationFailure, Var, from_path, parse_value, resolve, unify_env
from .trees import (
    ANCHOR,
    AUXILIARY,
    FOOT,
    INITIAL,
    INTERNAL,
    SUBST,
    TERMINAL,
    ElementaryTree,
    TreeNode,
    assign_addresses,
    validate_tree,
)


class GrammarError(Exception):
    """Malformed grammar input; the message carries line numbers."""


@dataclass(frozen=True)
class FeatureEquation:
    """One ``<selector>.<top|bot>.<path> = <value>`` equation."""

    selector: str
    side: str  # "top" | "bot"
    path: tuple
    value: object  # atom str or Var

    def resolve_address(self, tree):
        """Map the selector to a Gorn address within ``tree``."""
        sel = self.selector
        if sel == "root":
            return "0"
        if sel == "foot":
            addr = tree.foot_address
            if addr is None:
                raise GrammarError("template addresses foot, but %s has none" % tree.name)
            return addr
        m = re.fullmatch(r"anchor(\d*)", sel)
        if m:
            idx = int(m.group(1)) - 1 if m.group(1) else 0
            anchors = tree.anchor_addresses
            if idx >= len(anchors):
                raise GrammarError("template addresses anchor %d of %s" % (idx + 1, tree.name))
            return anchors[idx]
        return sel


@dataclass
class Grammar:
    """Immutable after load; safely shared across concurrent parses."""

    trees: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    templates: dict = field(default_factory=dict)

    @property
    def tree_count(self):
        return len(self.trees)

    @property
    def family_count(self):
        return len(self.families)

    @property
    def individual_tree_count(self):
        return sum(1 for t in self.trees.values() if t.family is None)

    def family_trees(self, family):
        return [self.trees[name] for name in self.families.get(family, ())]

    def describe(self):
        return "%d trees, %d tree families, %d individually selected trees" % (
            self.tree_count, self.family_count, self.individual_tree_count)


_TOKEN_RE = re.compile(r'\(|\)|"[^"]*"|[^\s()"]+')
_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_'-]*")


def _tokenize_expr(text, lineno):
    tokens = _TOKEN_RE.findall(text)
    if not tokens:
        raise GrammarError("line %d: empty tree expression" % lineno)
    return tokens


def _parse_node(tokens, pos, lineno):
    tok = tokens[pos]
    if tok.startswith('"'):
        word = tok[1:-1]
        return TreeNode(label=word, kind=TERMINAL), pos + 1
    if tok != "(":
        raise GrammarError("line %d: expected '(' or terminal, got %r" % (lineno, tok))
    pos += 1
    if pos >= len(tokens):
        raise GrammarError("line %d: unexpected end of tree expression" % lineno)
    head = tokens[pos]
    pos += 1
    na = False
    if head.endswith("@NA"):
        na = True
        head = head[:-3]
    kind = INTERNAL
    if head.endswith("<>"):
        kind = ANCHOR
        head = head[:-2]
    elif head.endswith("!"):
        kind = SUBST
        head = head[:-1]
    elif head.endswith("*"):
        kind = FOOT
        head = head[:-1]
    if not _LABEL_RE.fullmatch(head):
        raise GrammarError("line %d: bad node label %r" % (lineno, head))
    node = TreeNode(label=head, kind=kind, na=na)
    children = []
    while pos < len(tokens) and tokens[pos] != ")":
        child, pos = _parse_node(tokens, pos, lineno)
        children.append(child)
    if pos >= len(tokens):
        raise GrammarError("line %d: missing ')' in tree expression" % lineno)
    pos += 1  # consume ")"
    if children and kind != INTERNAL:
        raise GrammarError("line %d: %s node %s cannot have children" % (lineno, kind, head))
    node.children = children
    return node, pos


_FEAT_RE = re.compile(r"feat\s+(\S+)\s+(top|bot)\s+([A-Za-z][\w.]*)\s*=\s*(\S+)")


def _parse_feat_line(line, lineno):
    m = _FEAT_RE.fullmatch(line.strip())
    if not m:
        raise GrammarError("line %d: bad feature line: %s" % (lineno, line.strip()))
    address, side, path, value = m.groups()
    try:
        val = parse_value(value)
    except ValueError as e:
        raise GrammarError("line %d: %s" % (lineno, e)) from e
    return address, side, tuple(path.split(".")), val


def apply_equations(base, equations, env):
    """Fold path equations into a feature structure under a shared env."""
    fs = base
    for path, value in equations:
        fs, env = unify_env(fs, from_path(path, value), env)
    return fs, env


def parse_grammar(tree_text, template_text=""):
    """Parse grammar text into a validated Grammar."""
    trees = {}
    families = {}
    blocks = _split_blocks(tree_text)
    for lineno, header, body in blocks:
        name, family = _parse_header(header, lineno)
        expr_lines = []
        feats = []
        for ln, line in body:
            if line.strip().startswith("feat "):
                feats.append((ln, line))
            else:
                expr_lines.append((ln, line))
        if not expr_lines:
            raise GrammarError("line %d: tree %s has no tree expression" % (lineno, name))
        expr = " ".join(line for _, line in expr_lines)
        tokens = _tokenize_expr(expr, expr_lines[0][0])
        root, pos = _parse_node(tokens, 0, expr_lines[0][0])
        if pos != len(tokens):
            raise GrammarError("line %d: trailing tokens after tree %s" % (expr_lines[0][0], name))
        assign_addresses(root)
        kind = AUXILIARY if any(n.kind == FOOT for n in _walk(root)) else INITIAL
        tree = ElementaryTree(name=name, kind=kind, root=root, family=family)
        _attach_features(tree, feats)
        problems = validate_tree(tree)
        if problems:
            raise GrammarError("tree %s: %s" % (name, "; ".join(problems)))
        if name in trees:
            raise GrammarError("line %d: duplicate tree %s" % (lineno, name))
        trees[name] = tree
        if family:
            families.setdefault(family, []).append(name)
    templates = parse_templates(template_text)
    grammar = Grammar(trees=trees, families=families, templates=templates)
    for fam, members in grammar.families.items():
        for member in members:
            if member not in grammar.trees:
                raise GrammarError("family %s references missing tree %s" % (fam, member))
    return grammar


def _walk(root):
    stack = [root]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(n.children)


def _split_blocks(text):
    blocks = []
    current = None
    for lineno, raw in enumerate(io.StringIO(text), start=1):
        line = raw.rstrip("\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("tree "):
            current = (lineno, stripped, [])
            blocks.append(current)
        else:
            if current is None:
                raise GrammarError("line %d: content before first 'tree' header" % lineno)
            current[2].append((lineno, stripped))
    return blocks


def _parse_header(header, lineno):
    parts = header.split()
    if len(parts) == 2:
        return parts[1], None
    if len(parts) == 4 and parts[2] == "family":
        return parts[1], parts[3]
    raise GrammarError("line %d: bad tree header: %s" % (lineno, header))


def _attach_features(tree, feat_lines):
    env = {}
    per_node = {}
    for lineno, line in feat_lines:
        address, side, path, value = _parse_feat_line(line, lineno)
        node = tree.node_at(address)
        if node is None:
            raise GrammarError("line %d: tree %s has no node %s" % (lineno, tree.name, address))
        per_node.setdefault((address, side), []).append((path, value))
    for (address, side), equations in per_node.items():
        node = tree.node_at(address)
        base = node.top if side == "top" else node.bottom
        try:
            fs, env = apply_equations(base, equations, env)
        except UnificationFailure as f:
            raise GrammarError("tree %s: conflicting features at %s.%s: %s"
                               % (tree.name, address, side, f)) from f
        if side == "top":
            node.top = fs
        else:
            node.bottom = fs
    # fold any load-time bindings back into the stored structures
    if env:
        for node in tree.nodes():
            node.top = resolve(node.top, env)
            node.bottom = resolve(node.bottom, env)


_TEMPLATE_RE = re.compile(
    r"template\s+#([\w+-]+)\s*:\s*(\S+?)\.(top|bot)\.([A-Za-z][\w.]*)\s*=\s*(\S+)")


def parse_templates(text):
    templates = {}
    for lineno, raw in enumerate(io.StringIO(text or ""), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = _TEMPLATE_RE.fullmatch(line)
        if not m:
            raise GrammarError("line %d: bad template line: %s" % (lineno, line))
        name, selector, side, path, value = m.groups()
        try:
            val = parse_value(value)
        except ValueError as e:
            raise GrammarError("line %d: %s" % (lineno, e)) from e
        templates.setdefault("#" + name, []).append(
            FeatureEquation(selector=selector, side=side, path=tuple(path.split(".")), value=val))
    return templates


def load_grammar(tree_file, template_file=None):
    """Load and validate a grammar from file paths."""
    with open(tree_file, encoding="utf-8") as f:
        tree_text = f.read()
    template_text = ""
    if template_file:
        with open(template_file, encoding="utf-8") as f:
            template_text = f.read()
    return parse_grammar(tree_text, template_text)
