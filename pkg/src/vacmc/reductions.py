"""Single-proposition hardness encodings: ez(K), the f and g translations,
and decoding a single-proposition model back.

Index convention: the ordering maps propositions onto 1..n, layer i >= 2 of
ez(K) encodes the proposition with index i-1, and the probes use exactly
o(p) next-steps after the marker.  Verified by the round-trip tests.
"""

from . import formula as F
from .errors import EncodingError, EvalError, KripkeError
from .kripke import KripkeStructure
from .mc import eval_mask


class PropOrdering:
    """A bijection from proposition names onto 1..n."""

    def __init__(self, mapping):
        values = sorted(mapping.values())
        if values != list(range(1, len(mapping) + 1)):
            raise ValueError(f"ordering must be a bijection onto 1..{len(mapping)}: {mapping}")
        self.mapping = dict(mapping)

    @classmethod
    def from_props(cls, props):
        return cls({p: i + 1 for i, p in enumerate(props)})

    def __call__(self, prop):
        try:
            return self.mapping[prop]
        except KeyError:
            raise KeyError(f"proposition {prop!r} not in ordering") from None

    def prop_at(self, index):
        for p, i in self.mapping.items():
            if i == index:
                return p
        raise KeyError(index)

    @property
    def props(self):
        return tuple(sorted(self.mapping, key=self.mapping.get))

    def __len__(self):
        return len(self.mapping)


def ez_encode(k, o, z="z"):
    """Attach per-state marker chains so a single proposition z encodes labels."""
    if not k.is_classical:
        raise KripkeError("ez_encode expects a classical structure")
    if z in k.props:
        raise KripkeError(f"encoding proposition {z!r} collides with a proposition of {k.name}")
    if set(o.props) != set(k.props):
        raise ValueError("ordering domain must equal the structure's propositions")
    n = len(o)
    states = [f"({s},{i})" for s in k.states for i in range(n + 2)]
    init = [f"({s},0)" for s in k.init]
    trans = [(f"({s},0)", f"({t},0)") for s, t in k.trans]
    for s in k.states:
        for i in range(n + 1):
            trans.append((f"({s},{i})", f"({s},{i + 1})"))
        trans.append((f"({s},{n + 1})", f"({s},{n + 1})"))
    labels = {}
    for s in k.states:
        for i in range(n + 2):
            if i == 0:
                val = False
            elif i == 1:
                val = True
            else:
                val = k.label3(s, o.prop_at(i - 1)).value == "true"
            labels[f"({s},{i})"] = {z: val}
    return KripkeStructure(f"ez({k.name})", (z,), states, init, trans, labels)


# -- formula translations ---------------------------------------------------


def _neg_literal(a):
    return a.child if isinstance(a, F.Not) else F.Not(a)


def _imp(a, b):
    if isinstance(b, F.FalseConst):
        return _neg_literal(a)
    if isinstance(b, F.TrueConst) or isinstance(a, F.TrueConst):
        return b
    return F.Implies(a, b)


def _flatten_and(f, out):
    if isinstance(f, F.And):
        _flatten_and(f.left, out)
        _flatten_and(f.right, out)
    else:
        out.append(f)


def _conj(items):
    """Conjunction with constant folding and absorption of a conjunct that a
    sibling EG conjunct entails (EG c implies c at the same state)."""
    ordered = []
    for f in items:
        _flatten_and(f, ordered)
    eg_bodies = {
        g.child.child
        for g in ordered
        if isinstance(g, F.PathE) and isinstance(g.child, F.Globally)
    }
    return F.conj([g for g in ordered if g not in eg_bodies])


def _ax_pow(body, n):
    for _ in range(n):
        body = F.PathA(F.Next(body))
    return body


def _x_pow(body, n):
    for _ in range(n):
        body = F.Next(body)
    return body


def f_translate_ctl(psi, o, z="z"):
    """CTL formula over o's domain to an equisatisfiable CTL formula over z."""
    if not F.is_ctl(psi):
        raise EvalError("f translation is defined for CTL formulas")
    zat = F.Atom(z)
    nz = F.Not(zat)
    eg_nz = F.PathE(F.Globally(nz))

    def probe(p, positive):
        tail = zat if positive else F.Not(zat)
        return F.And(F.PathE(F.Next(zat)), F.PathA(F.Next(_imp(zat, _ax_pow(tail, o(p))))))

    def go(f):
        if isinstance(f, F.Atom):
            return probe(f.name, True)
        if isinstance(f, F.Not) and isinstance(f.child, F.Atom):
            return probe(f.child.name, False)
        if isinstance(f, (F.TrueConst, F.FalseConst)):
            return f
        if isinstance(f, F.Not):
            return F.Not(go(f.child))
        if isinstance(f, (F.And, F.Or, F.Implies)):
            return type(f)(go(f.left), go(f.right))
        if isinstance(f, (F.PathA, F.PathE)):
            c = f.child
            if isinstance(c, F.Future):
                c = F.Until(F.TRUE, c.child)
            elif isinstance(c, F.Globally):
                c = F.Release(F.FALSE, c.child)
            if isinstance(c, F.Next):
                if isinstance(f, F.PathE):
                    return F.PathE(F.Next(_conj([nz, go(c.child)])))
                return F.And(F.PathE(F.Next(nz)), F.PathA(F.Next(_imp(nz, go(c.child)))))
            node = type(c)
            if isinstance(f, F.PathE):
                return F.PathE(node(_conj([nz, go(c.left)]), _conj([nz, go(c.right)])))
            return F.And(eg_nz, F.PathA(node(_imp(nz, go(c.left)), _imp(nz, go(c.right)))))
        raise EvalError("f translation hit a non-CTL node")

    return go(psi)


def g_translate_ctl_star(psi, o, z="z"):
    """CTL* state formula over o's domain to one over z alone."""
    if not F.is_state_formula(psi) or isinstance(psi, F.QUANTIFIED):
        raise EvalError("g translation is defined for quantifier-free CTL* state formulas")
    zat = F.Atom(z)
    nz = F.Not(zat)

    def probe(p, positive):
        tail = zat if positive else F.Not(zat)
        return F.And(F.PathE(F.Next(zat)), F.PathA(F.Next(_imp(zat, _x_pow(tail, o(p))))))

    def state(f):
        if isinstance(f, F.Atom):
            return probe(f.name, True)
        if isinstance(f, F.Not) and isinstance(f.child, F.Atom):
            return probe(f.child.name, False)
        if isinstance(f, (F.TrueConst, F.FalseConst)):
            return f
        if isinstance(f, F.Not):
            return F.Not(state(f.child))
        if isinstance(f, (F.And, F.Or, F.Implies)):
            return type(f)(state(f.left), state(f.right))
        if isinstance(f, F.PathE):
            return F.PathE(F.And(F.Globally(nz), path(f.child)))
        if isinstance(f, F.PathA):
            return F.And(F.PathE(F.Globally(nz)), F.PathA(F.Implies(F.Globally(nz), path(f.child))))
        raise EvalError("g translation hit an unsupported node")

    def path(f):
        if F.is_state_formula(f):
            return state(f)
        if isinstance(f, F.Not):
            return F.Not(path(f.child))
        if isinstance(f, (F.And, F.Or, F.Implies)):
            return type(f)(path(f.left), path(f.right))
        if isinstance(f, (F.Next, F.Future, F.Globally)):
            return type(f)(path(f.child))
        if isinstance(f, (F.Until, F.Release)):
            return type(f)(path(f.left), path(f.right))
        raise EvalError("g translation hit an unsupported path node")

    return state(psi)


def decode_single_prop(m, props, o, z="z"):
    """Read a structure over props back out of a single-proposition model."""
    if set(m.props) != {z}:
        raise EncodingError(f"decoding expects a structure over {{{z}}}, got {m.props}")
    zmask = m.true_mask(z)
    base = set(m.init)
    frontier = list(m.init)
    while frontier:
        s = frontier.pop()
        for t in m.successors(s):
            if not zmask >> m.index(t) & 1 and t not in base:
                base.add(t)
                frontier.append(t)
    if not base:
        raise EncodingError("empty base: no non-marker states reachable")
    zat = F.Atom(z)
    labels = {s: {} for s in base}
    for p in props:
        probe_t = eval_mask(m, F.PathA(F.Next(_imp(zat, _ax_pow(zat, o(p))))))
        probe_f = eval_mask(m, F.PathA(F.Next(_imp(zat, _ax_pow(F.Not(zat), o(p))))))
        for s in base:
            i = m.index(s)
            t, f = bool(probe_t >> i & 1), bool(probe_f >> i & 1)
            if t == f:
                raise EncodingError(f"inconsistent encoding: probe for {p!r} undetermined at {s!r}")
            labels[s][p] = t
    states = [s for s in m.states if s in base]
    init = [s for s in m.init if s in base]
    trans = [(s, t) for s, t in m.trans if s in base and t in base]
    try:
        return KripkeStructure(f"dec({m.name})", tuple(props), states, init, trans, labels)
    except KripkeError as e:
        raise EncodingError(f"decoded structure is ill-formed: {e}") from e
