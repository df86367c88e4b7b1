"""Feature structures and unification.

A feature structure is an immutable attribute-value map of depth at most
two (paths like ``agr.num``).  Values are atoms (plain strings), nested
feature structures, or variables.  A variable is scoped to the nodes of a
single anchored elementary tree; composition operations are the only
place where bindings cross tree boundaries.

Unification runs under a binding environment (a plain dict mapping
variable names to values).  Because structure depth is capped and atom
sets are closed over the grammar, unification always terminates and
failure is decidable.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass

MAX_DEPTH = 2


class UnificationFailure(Exception):
    """Raised internally when two values cannot be unified.

    ``path`` is the attribute path at which the clash occurred, e.g.
    ``("agr", "num")``; ``left`` and ``right`` are the clashing values.
    """

    def __init__(self, path, left, right):
        self.path = path
        self.left = left
        self.right = right
        where = ".".join(path) if path else "<root>"
        super().__init__("cannot unify %r with %r at %s" % (left, right, where))


@dataclass(frozen=True)
class Var:
    """A named variable, written ``?name`` in grammar files."""

    name: str

    def __repr__(self):
        return "?" + self.name

    def scoped(self, scope):
        """Return a copy whose name is tagged with an instance scope."""
        return Var("%s#%s" % (self.name, scope))


class FeatureStructure(Mapping):
    """Immutable attribute-value map.  Hashable; equality is structural."""

    __slots__ = ("_map", "_hash")

    def __init__(self, mapping=()):
        m = dict(mapping)
        for key, value in m.items():
            if not isinstance(key, str):
                raise TypeError("attribute names must be strings: %r" % (key,))
            if not isinstance(value, (str, Var, FeatureStructure)):
                raise TypeError("bad feature value %r for %s" % (value, key))
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_hash", None)

    def __getitem__(self, key):
        return self._map[key]

    def __iter__(self):
        return iter(sorted(self._map))

    def __len__(self):
        return len(self._map)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(tuple(sorted(self._map.items(), key=lambda kv: kv[0])))
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if isinstance(other, FeatureStructure):
            return self._map == other._map
        return NotImplemented

    def __repr__(self):
        inner = ", ".join("%s:%s" % (k, _fmt(self._map[k])) for k in sorted(self._map))
        return "{%s}" % inner

    def set(self, key, value):
        m = dict(self._map)
        m[key] = value
        return FeatureStructure(m)

    @classmethod
    def _make(cls, m):
        # internal fast constructor: values already validated
        self = object.__new__(cls)
        object.__setattr__(self, "_map", m)
        object.__setattr__(self, "_hash", None)
        return self


EMPTY = FeatureStructure()


def _fmt(value):
    if isinstance(value, str):
        return value
    return repr(value)


def depth(value):
    """Nesting depth: atoms and variables are 0, ``{a: x}`` is 1, etc."""
    if not isinstance(value, FeatureStructure):
        return 0
    if not value:
        return 1
    return 1 + max(depth(v) for v in value.values())


def check_depth(fs, limit=MAX_DEPTH):
    if depth(fs) > limit:
        raise ValueError("feature structure exceeds depth %d: %r" % (limit, fs))
    return fs


def _deref(value, env):
    """Follow variable bindings.  Returns (value, last_bound_var_or_None)."""
    last = None
    while isinstance(value, Var):
        bound = env.get(value.name)
        if bound is None:
            return value, last
        last = value
        value = bound
    return value, last


def _occurs(var, value, env):
    value, _ = _deref(value, env)
    if isinstance(value, Var):
        return value.name == var.name
    if isinstance(value, FeatureStructure):
        return any(_occurs(var, v, env) for v in value.values())
    return False


def _unify_value(x, y, env, path):
    """Unify two values, mutating ``env``.  Raises UnificationFailure."""
    x, xsrc = _deref(x, env)
    y, ysrc = _deref(y, env)
    if isinstance(x, Var) and isinstance(y, Var):
        if x.name == y.name:
            return x
        # deterministic representative: smaller name wins
        keep, drop = (x, y) if x.name < y.name else (y, x)
        env[drop.name] = keep
        return keep
    if isinstance(x, Var):
        if _occurs(x, y, env):
            raise UnificationFailure(path, x, y)
        env[x.name] = y
        return y
    if isinstance(y, Var):
        if _occurs(y, x, env):
            raise UnificationFailure(path, y, x)
        env[y.name] = x
        return x
    if isinstance(x, str) and isinstance(y, str):
        if x == y:
            return x
        raise UnificationFailure(path, x, y)
    if isinstance(x, FeatureStructure) and isinstance(y, FeatureStructure):
        merged = dict(x._map)
        for key, yv in y._map.items():
            if key in merged:
                merged[key] = _unify_value(merged[key], yv, env, path + (key,))
            else:
                merged[key] = yv
        result = FeatureStructure._make(merged)
        # refine stale bindings so later derefs see the merged structure
        if xsrc is not None:
            env[xsrc.name] = result
        if ysrc is not None:
            env[ysrc.name] = result
        return result
    raise UnificationFailure(path, x, y)


def unify_env(a, b, env):
    """Unify ``a`` with ``b`` under ``env``.

    Returns ``(merged, new_env)``; the input environment is never
    mutated.  Raises :class:`UnificationFailure` on clash.
    """
    if type(a) is FeatureStructure and type(b) is FeatureStructure:
        if not a._map:
            return b, env
        if not b._map:
            return a, env
    e = dict(env)
    merged = _unify_value(a, b, e, ())
    return merged, e


def merge_envs(a, b):
    """Combine two binding environments, or return None on conflict.

    Environments are treated as immutable once handed out; callers may
    freely share the result."""
    if not a:
        return b
    if not b:
        return a
    env = dict(a)
    try:
        for name, value in b.items():
            if name in env:
                _unify_value(Var(name), value, env, ())
            else:
                env[name] = value
    except UnificationFailure:
        return None
    return env


def resolve(value, env):
    """Substitute bindings into ``value``; unbound variables remain."""
    if not env:
        return value
    value, _ = _deref(value, env)
    if isinstance(value, FeatureStructure):
        return FeatureStructure._make({k: resolve(v, env) for k, v in value._map.items()})
    return value


def unify(a, b):
    """Most general unifier of two feature structures, or None on failure.

    Atoms unify iff equal, structures unify attribute-wise, a variable
    unifies with anything.  The result is independent of argument order
    up to variable renaming.
    """
    try:
        merged, env = unify_env(a, b, {})
    except UnificationFailure:
        return None
    return resolve(merged, env)


def canon(value):
    """Canonical hashable encoding of a (resolved) value, for item keys."""
    if isinstance(value, str):
        return ("a", value)
    if isinstance(value, Var):
        return ("v", value.name)
    return ("f", tuple((k, canon(v)) for k, v in sorted(value._map.items(), key=lambda kv: kv[0])))


def canon_env(env):
    """Canonical encoding of an environment with bindings fully resolved."""
    if not env:
        return ()
    return tuple(sorted((name, canon(resolve(Var(name), env))) for name in env))


def alpha_equal(a, b, _bij=None):
    """Structural equality up to a consistent renaming of variables."""
    if _bij is None:
        _bij = ({}, {})
    fwd, bwd = _bij
    if isinstance(a, Var) and isinstance(b, Var):
        if a.name in fwd:
            return fwd[a.name] == b.name
        if b.name in bwd:
            return False
        fwd[a.name] = b.name
        bwd[b.name] = a.name
        return True
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, FeatureStructure) and isinstance(b, FeatureStructure):
        if sorted(a) != sorted(b):
            return False
        return all(alpha_equal(a[k], b[k], _bij) for k in a)
    return False


def parse_value(text):
    """Parse an atom or ``?var`` token from grammar files."""
    text = text.strip()
    if not text:
        raise ValueError("empty feature value")
    if text.startswith("?"):
        if len(text) == 1:
            raise ValueError("variable needs a name: %r" % text)
        return Var(text[1:])
    return text


def from_path(path, value):
    """Build a nested structure from an attribute path, e.g. agr.num=pl."""
    for key in reversed(path):
        value = FeatureStructure({key: value})
    return value
