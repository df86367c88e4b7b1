"""Independent brute-force derivation enumerator.

Computes the string language of a tree-adjoining grammar by exhaustive
substitution/adjunction over plain tuples, sharing no code with the
chart parser.  Auxiliary trees contribute (left, right) yield pairs
around their foot; initial trees contribute strings.  A Kleene-style
fixpoint grows both tables until no new yield at or under the length
bound appears, so every derivable string up to the bound is generated.

Constraints honored, matching standard TAG and the engine's policy:
null-adjunction nodes host nothing, feet and leaves host nothing, and
each node hosts at most one adjunction.  Feature structures are ignored
(the formal test grammars carry none).
"""

from treegraft.trees import ANCHOR, FOOT, INITIAL, SUBST, TERMINAL


def _simplify(node):
    return (node.label, node.kind, node.na, tuple(_simplify(c) for c in node.children))


def _node_yields(node, initial_by_label, aux_by_label, bound):
    """Yield set of a node's subtree: strings, or (l, r) pairs when the
    foot is inside.  Returns (kind, set) with kind in {"s", "p"}."""
    label, kind, na, children = node
    if kind == TERMINAL:
        return "s", {() if label == "" else (label,)}
    if kind == ANCHOR:
        return "s", {(label,)}
    if kind == SUBST:
        return "s", {s for s in initial_by_label.get(label, ()) if len(s) <= bound}
    if kind == FOOT:
        return "p", {((), ())}
    # internal: concatenate children, at most one side holding the foot
    acc_kind, acc = "s", {()}
    for child in children:
        ckind, cset = _node_yields(child, initial_by_label, aux_by_label, bound)
        new = set()
        if acc_kind == "s" and ckind == "s":
            for a in acc:
                for b in cset:
                    s = a + b
                    if len(s) <= bound:
                        new.add(s)
        elif acc_kind == "p" and ckind == "s":
            for (l, r) in acc:
                for b in cset:
                    if len(l) + len(r) + len(b) <= bound:
                        new.add((l, r + b))
        elif acc_kind == "s" and ckind == "p":
            for a in acc:
                for (l, r) in cset:
                    if len(a) + len(l) + len(r) <= bound:
                        new.add((a + l, r))
            acc_kind = "p"
        else:  # two feet under one node never happens in a valid tree
            raise AssertionError("multiple feet")
        acc = new
    # optional adjunction at this node (zero or one)
    if not na:
        wrapped = set()
        for (wl, wr) in aux_by_label.get(label, ()):
            if acc_kind == "s":
                for a in acc:
                    s = wl + a + wr
                    if len(s) <= bound:
                        wrapped.add(s)
            else:
                for (l, r) in acc:
                    if len(wl) + len(l) + len(r) + len(wr) <= bound:
                        wrapped.add((wl + l, r + wr))
        acc = acc | wrapped
    return acc_kind, acc


def _fixpoint(grammar, max_len):
    initials = {}
    auxiliaries = {}
    for name, tree in sorted(grammar.trees.items()):
        simple = _simplify(tree.root)
        (initials if tree.kind == INITIAL else auxiliaries)[name] = simple

    strings = {name: set() for name in initials}
    pairs = {name: set() for name in auxiliaries}
    while True:
        initial_by_label = {}
        for name, simple in initials.items():
            initial_by_label.setdefault(simple[0], set()).update(strings[name])
        aux_by_label = {}
        for name, simple in auxiliaries.items():
            aux_by_label.setdefault(simple[0], set()).update(pairs[name])
        grew = False
        for table, trees in ((strings, initials), (pairs, auxiliaries)):
            for name, simple in trees.items():
                _, got = _node_yields(simple, initial_by_label, aux_by_label, max_len)
                if not got <= table[name]:
                    table[name].update(got)
                    grew = True
        if not grew:
            return initials, strings, pairs


def language(grammar, start_label, max_len):
    """All strings of length <= max_len derivable from initial trees whose
    root label is ``start_label``.  Returns a set of token tuples."""
    initials, strings, _ = _fixpoint(grammar, max_len)
    accepted = set()
    for name, simple in initials.items():
        if simple[0] == start_label:
            accepted.update(strings[name])
    return accepted


def aux_pairs(grammar, max_len):
    """(left, right) wrap pairs per auxiliary tree, for splice checks."""
    _, _, pairs = _fixpoint(grammar, max_len)
    return pairs


def all_strings(alphabet, max_len):
    """Every string over the alphabet up to the length bound."""
    out = [()]
    frontier = [()]
    for _ in range(max_len):
        frontier = [s + (a,) for s in frontier for a in alphabet]
        out.extend(frontier)
    return out
