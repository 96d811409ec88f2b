"""Shared generators and independent oracles for the test suite."""

import random

from vacmc import formula as F
from vacmc.kripke import KripkeStructure
from vacmc.mc import eval_mask


# ---------------------------------------------------------------------------
# Random structures


def rand_kripke(rng, max_states=4, props=("p", "q"), name="R", multi_init=True):
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    labels = {s: {p: rng.random() < 0.5 for p in props} for s in states}
    trans = []
    for s in states:
        succ = [t for t in states if rng.random() < 0.45]
        if not succ:
            succ = [rng.choice(states)]
        trans.extend((s, t) for t in succ)
    if multi_init:
        init = [s for s in states if rng.random() < 0.4] or [states[0]]
    else:
        init = [states[0]]
    return KripkeStructure(name, props, states, init, trans, labels)


def merge_abstraction(rng, k, name="A"):
    """Existential merging of label-equal states; the result simulates k."""
    groups = {}
    for s in k.states:
        sig = tuple(sorted((p, k.label3(s, p).value) for p in k.props))
        groups.setdefault(sig, []).append(s)
    block_of = {}
    blocks = []
    for members in groups.values():
        pool = members[:]
        rng.shuffle(pool)
        while pool:
            take = pool[: rng.randint(1, len(pool))]
            pool = pool[len(take):]
            for s in take:
                block_of[s] = len(blocks)
            blocks.append(take)
    states = [f"b{i}" for i in range(len(blocks))]
    labels = {f"b{i}": dict(k.labels_of(members[0])) for i, members in enumerate(blocks)}
    trans = sorted({(f"b{block_of[s]}", f"b{block_of[t]}") for s, t in k.trans})
    init = []
    for s in k.init:
        b = f"b{block_of[s]}"
        if b not in init:
            init.append(b)
    return KripkeStructure(name, k.props, states, init, trans, labels), {
        s: f"b{block_of[s]}" for s in k.states
    }


# ---------------------------------------------------------------------------
# Random formulas


def rand_ctl(rng, props, depth):
    if depth == 0 or rng.random() < 0.18:
        r = rng.random()
        if r < 0.8:
            return F.Atom(rng.choice(props))
        return F.TRUE if r < 0.9 else F.FALSE
    c = rng.randrange(9)
    if c == 0:
        return F.Not(rand_ctl(rng, props, depth - 1))
    if c == 1:
        return F.And(rand_ctl(rng, props, depth - 1), rand_ctl(rng, props, depth - 1))
    if c == 2:
        return F.Or(rand_ctl(rng, props, depth - 1), rand_ctl(rng, props, depth - 1))
    if c == 3:
        return F.Implies(rand_ctl(rng, props, depth - 1), rand_ctl(rng, props, depth - 1))
    quant = rng.choice([F.PathA, F.PathE])
    t = rng.randrange(5)
    if t == 0:
        return quant(F.Next(rand_ctl(rng, props, depth - 1)))
    if t == 1:
        return quant(F.Future(rand_ctl(rng, props, depth - 1)))
    if t == 2:
        return quant(F.Globally(rand_ctl(rng, props, depth - 1)))
    left = rand_ctl(rng, props, depth - 1)
    right = rand_ctl(rng, props, depth - 1)
    return quant((F.Until if t == 3 else F.Release)(left, right))


def rand_path(rng, props, depth):
    """A pure path formula in positive form with literal leaves."""
    if depth == 0 or rng.random() < 0.2:
        a = F.Atom(rng.choice(props))
        return F.Not(a) if rng.random() < 0.4 else a
    c = rng.randrange(7)
    if c == 0:
        return F.And(rand_path(rng, props, depth - 1), rand_path(rng, props, depth - 1))
    if c == 1:
        return F.Or(rand_path(rng, props, depth - 1), rand_path(rng, props, depth - 1))
    if c == 2:
        return F.Next(rand_path(rng, props, depth - 1))
    if c == 3:
        return F.Future(rand_path(rng, props, depth - 1))
    if c == 4:
        return F.Globally(rand_path(rng, props, depth - 1))
    left = rand_path(rng, props, depth - 1)
    right = rand_path(rng, props, depth - 1)
    return (F.Until if c == 5 else F.Release)(left, right)


def rand_actl_star(rng, props, depth):
    """NNF formula whose path quantifiers are all universal."""
    if depth == 0 or rng.random() < 0.25:
        a = F.Atom(rng.choice(props))
        return F.Not(a) if rng.random() < 0.4 else a
    c = rng.randrange(4)
    if c == 0:
        return F.And(rand_actl_star(rng, props, depth - 1), rand_actl_star(rng, props, depth - 1))
    if c == 1:
        return F.Or(rand_actl_star(rng, props, depth - 1), rand_actl_star(rng, props, depth - 1))
    t = rng.randrange(5)
    if t == 0:
        return F.PathA(F.Next(rand_actl_star(rng, props, depth - 1)))
    if t == 1:
        return F.PathA(F.Future(rand_actl_star(rng, props, depth - 1)))
    if t == 2:
        return F.PathA(F.Globally(rand_actl_star(rng, props, depth - 1)))
    left = rand_actl_star(rng, props, depth - 1)
    right = rand_actl_star(rng, props, depth - 1)
    return F.PathA((F.Until if t == 3 else F.Release)(left, right))


def proper_subformulas(phi):
    subs = [f for f in F.subformulas(phi) if f != phi]
    return subs or [phi]


# ---------------------------------------------------------------------------
# Lasso oracle: exact LTL evaluation on an ultimately periodic path


def eval_on_lasso(k, path, loop_start, phi, env=None):
    """Evaluate a path formula on path[0..] looping back to loop_start."""
    m = len(path)
    nxt = [i + 1 for i in range(m - 1)] + [loop_start]
    vals = {}

    def compute(f):
        got = vals.get(f)
        if got is not None:
            return got
        if F.is_state_formula(f):
            mask = eval_mask(k, f, env)
            v = [bool(mask >> k.index(path[i]) & 1) for i in range(m)]
        elif isinstance(f, F.Not):
            v = [not b for b in compute(f.child)]
        elif isinstance(f, F.And):
            l, r = compute(f.left), compute(f.right)
            v = [a and b for a, b in zip(l, r)]
        elif isinstance(f, F.Or):
            l, r = compute(f.left), compute(f.right)
            v = [a or b for a, b in zip(l, r)]
        elif isinstance(f, F.Implies):
            l, r = compute(f.left), compute(f.right)
            v = [(not a) or b for a, b in zip(l, r)]
        elif isinstance(f, F.Next):
            c = compute(f.child)
            v = [c[nxt[i]] for i in range(m)]
        elif isinstance(f, (F.Until, F.Future)):
            if isinstance(f, F.Until):
                l, r = compute(f.left), compute(f.right)
            else:
                l, r = [True] * m, compute(f.child)
            v = [False] * m
            changed = True
            while changed:
                changed = False
                for i in range(m):
                    nv = r[i] or (l[i] and v[nxt[i]])
                    if nv and not v[i]:
                        v[i] = True
                        changed = True
        elif isinstance(f, (F.Release, F.Globally)):
            if isinstance(f, F.Release):
                l, r = compute(f.left), compute(f.right)
            else:
                l, r = [False] * m, compute(f.child)
            v = [True] * m
            changed = True
            while changed:
                changed = False
                for i in range(m):
                    nv = r[i] and (l[i] or v[nxt[i]])
                    if not nv and v[i]:
                        v[i] = False
                        changed = True
        else:
            raise TypeError(f"not a path formula: {f!r}")
        vals[f] = v
        return v

    return compute(phi)[0]


def lassos(k, start, max_len):
    """All lasso shapes (path, loop_start) from start with |path| <= max_len."""
    stack = [(start,)]
    while stack:
        path = stack.pop()
        for t in k.successors(path[-1]):
            for l, s in enumerate(path):
                if s == t:
                    yield path, l
            if len(path) < max_len:
                stack.append(path + (t,))


def oracle_e_path(k, start, phi, max_len, env=None):
    """Exhaustive ultimately-periodic-path search for E phi at start."""
    return any(eval_on_lasso(k, path, l, phi, env) for path, l in lassos(k, start, max_len))
