"""Model checking on classical structures.

CTL-shaped nodes are evaluated by fixpoint iteration over state bitmasks
(EX/EU/EG and duals); genuine path formulas go through the closure/atom
("tableau") product with self-fulfilling-SCC acceptance.  Set atoms of a
foreign structure are resolved through a bisimulation computed on demand.
"""

from dataclasses import dataclass

from . import formula as F
from .errors import EvalError
from .kripke import KripkeStructure

_TEMPORAL = (F.Next, F.Until, F.Release, F.Future, F.Globally)


@dataclass(frozen=True)
class StateSet:
    """A subset of a named structure's states."""

    structure: str
    names: tuple

    def __contains__(self, state):
        return state in self.names


class _Leaf(F.Formula):
    """Internal tableau leaf: an already-evaluated state set (as a bitmask)."""

    __slots__ = ("mask",)
    _fields = ("mask",)


def _postorder(root):
    out = []
    seen = set()

    def go(f):
        if f in seen:
            return
        seen.add(f)
        for c in f.children():
            go(c)
        out.append(f)

    go(root)
    return out


class AtomGraph:
    """Closure/atom product of one path formula with one structure.

    Atoms pair a state with a guessed valuation of the temporal subformulas;
    edges enforce the one-step expansion laws; acceptance is reachability of
    a nontrivial SCC discharging every pending until-style obligation.
    """

    MAX_TEMPORAL = 14

    def __init__(self, k, pathform):
        self.k = k
        self.root = pathform
        self.order = _postorder(pathform)
        self.temporal = [n for n in self.order if isinstance(n, _TEMPORAL)]
        if len(self.temporal) > self.MAX_TEMPORAL:
            raise EvalError(f"path formula closure too large ({len(self.temporal)} temporal operators)")
        self._build()

    def _vals(self, si, sigma):
        vals = {}
        tix = self.tindex
        for n in self.order:
            if isinstance(n, _Leaf):
                v = bool(n.mask >> si & 1)
            elif isinstance(n, F.TrueConst):
                v = True
            elif isinstance(n, F.FalseConst):
                v = False
            elif isinstance(n, F.Not):
                v = not vals[n.child]
            elif isinstance(n, F.And):
                v = vals[n.left] and vals[n.right]
            elif isinstance(n, F.Or):
                v = vals[n.left] or vals[n.right]
            elif isinstance(n, F.Implies):
                v = (not vals[n.left]) or vals[n.right]
            else:
                v = bool(sigma >> tix[n] & 1)
            vals[n] = v
        return vals

    def _locally_consistent(self, vals):
        for n in self.temporal:
            v = vals[n]
            if isinstance(n, F.Until):
                if v and not (vals[n.right] or vals[n.left]):
                    return False
                if not v and vals[n.right]:
                    return False
            elif isinstance(n, F.Release):
                if v and not vals[n.right]:
                    return False
                if not v and vals[n.right] and vals[n.left]:
                    return False
            elif isinstance(n, F.Future):
                if not v and vals[n.child]:
                    return False
            elif isinstance(n, F.Globally):
                if v and not vals[n.child]:
                    return False
        return True

    def _edge_ok(self, va, vb):
        for n in self.temporal:
            if isinstance(n, F.Next):
                if va[n] != vb[n.child]:
                    return False
            elif isinstance(n, F.Until):
                if va[n] and not va[n.right] and not vb[n]:
                    return False
                if not va[n] and va[n.left] and vb[n]:
                    return False
            elif isinstance(n, F.Release):
                if va[n] and not va[n.left] and not vb[n]:
                    return False
                if not va[n] and va[n.right] and vb[n]:
                    return False
            elif isinstance(n, F.Future):
                if va[n] and not va[n.child] and not vb[n]:
                    return False
                if not va[n] and vb[n]:
                    return False
            elif isinstance(n, F.Globally):
                if va[n] and not vb[n]:
                    return False
                if not va[n] and va[n.child] and vb[n]:
                    return False
        return True

    def _obligations(self, vals):
        out = []
        for n in self.temporal:
            if isinstance(n, F.Until) and vals[n]:
                out.append((n.right, True))
            elif isinstance(n, F.Future) and vals[n]:
                out.append((n.child, True))
            elif isinstance(n, F.Release) and not vals[n]:
                out.append((n.right, False))
            elif isinstance(n, F.Globally) and not vals[n]:
                out.append((n.child, False))
        return out

    def _build(self):
        k = self.k
        self.tindex = {n: i for i, n in enumerate(self.temporal)}
        self.atoms = []        # (state index, sigma)
        self.vals = []         # valuation dict per atom
        index = {}
        per_state = [[] for _ in range(k.n)]
        for si in range(k.n):
            for sigma in range(1 << len(self.temporal)):
                vals = self._vals(si, sigma)
                if self._locally_consistent(vals):
                    index[(si, sigma)] = len(self.atoms)
                    per_state[si].append(len(self.atoms))
                    self.atoms.append((si, sigma))
                    self.vals.append(vals)
        self.adj = [[] for _ in self.atoms]
        for a, (si, _) in enumerate(self.atoms):
            va = self.vals[a]
            succ = k.succ_masks[si]
            for ti in range(k.n):
                if succ >> ti & 1:
                    for b in per_state[ti]:
                        if self._edge_ok(va, self.vals[b]):
                            self.adj[a].append(b)
        self._sccs()
        self._mark_good()

    def _sccs(self):
        n = len(self.atoms)
        index = [0] * n
        low = [0] * n
        on_stack = [False] * n
        visited = [False] * n
        self.scc_of = [-1] * n
        self.sccs = []
        counter = [0]
        stack = []
        for root in range(n):
            if visited[root]:
                continue
            work = [(root, 0)]
            while work:
                v, pi = work.pop()
                if pi == 0:
                    visited[v] = True
                    index[v] = low[v] = counter[0]
                    counter[0] += 1
                    stack.append(v)
                    on_stack[v] = True
                recurse = False
                for j in range(pi, len(self.adj[v])):
                    w = self.adj[v][j]
                    if not visited[w]:
                        work.append((v, j + 1))
                        work.append((w, 0))
                        recurse = True
                        break
                    if on_stack[w]:
                        low[v] = min(low[v], index[w])
                if recurse:
                    continue
                if low[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        self.scc_of[w] = len(self.sccs)
                        comp.append(w)
                        if w == v:
                            break
                    self.sccs.append(comp)
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[v])

    def _mark_good(self):
        good = []
        for comp in self.sccs:
            members = set(comp)
            nontrivial = len(comp) > 1 or any(w in members for w in self.adj[comp[0]])
            if not nontrivial:
                good.append(False)
                continue
            ok = True
            for a in comp:
                for target, needed in self._obligations(self.vals[a]):
                    if not any(self.vals[b][target] == needed for b in comp):
                        ok = False
                        break
                if not ok:
                    break
            good.append(ok)
        # Tarjan emits each SCC after all of its successors.
        self.can_reach_good = [False] * len(self.sccs)
        for ci, comp in enumerate(self.sccs):
            if good[ci]:
                self.can_reach_good[ci] = True
                continue
            for v in comp:
                if any(self.can_reach_good[self.scc_of[w]] for w in self.adj[v]):
                    self.can_reach_good[ci] = True
                    break
        self.good = good

    def _accepting_starts(self, si):
        for a, (sj, _) in enumerate(self.atoms):
            if sj == si and self.vals[a][self.root] and self.can_reach_good[self.scc_of[a]]:
                yield a

    def e_mask(self):
        """Bitmask of states with a path satisfying the formula."""
        mask = 0
        for si in range(self.k.n):
            if next(self._accepting_starts(si), None) is not None:
                mask |= 1 << si
        return mask

    def lasso(self, state_name):
        """A witness (stem, loop) of state names from `state_name`, or None."""
        si = self.k.index(state_name)
        start = next(self._accepting_starts(si), None)
        if start is None:
            return None
        # BFS to any node of a good SCC.
        parent = {start: None}
        frontier = [start]
        entry = None
        while frontier and entry is None:
            nxt = []
            for v in frontier:
                if self.good[self.scc_of[v]]:
                    entry = v
                    break
                for w in self.adj[v]:
                    if w not in parent:
                        parent[w] = v
                        nxt.append(w)
            frontier = nxt
        stem_nodes = []
        v = entry
        while v is not None:
            stem_nodes.append(v)
            v = parent[v]
        stem_nodes.reverse()
        comp = self.sccs[self.scc_of[entry]]
        loop_nodes = [entry]
        for target in comp:
            if target != loop_nodes[-1]:
                loop_nodes.extend(self._scc_path(comp, loop_nodes[-1], target))
        if loop_nodes[-1] != entry:
            loop_nodes.extend(self._scc_path(comp, loop_nodes[-1], entry))
        loop_nodes = loop_nodes[:-1] if len(loop_nodes) > 1 else loop_nodes
        if len(loop_nodes) == 1 and loop_nodes[0] not in self.adj[loop_nodes[0]]:
            loop_nodes.extend(self._scc_path(comp, loop_nodes[0], loop_nodes[0]))
            loop_nodes = loop_nodes[:-1]
        states = self.k.states
        stem = [states[self.atoms[v][0]] for v in stem_nodes[:-1]]
        loop = [states[self.atoms[v][0]] for v in loop_nodes]
        return stem, loop

    def _scc_path(self, comp, src, dst):
        """Nodes after src up to and including dst, inside the SCC."""
        members = set(comp)
        parent = {src: None}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for w in self.adj[v]:
                    if w in members and w not in parent:
                        parent[w] = v
                        nxt.append(w)
                        if w == dst:
                            frontier = []
                            nxt = []
                            break
            frontier = nxt
            if dst in parent:
                break
        path = []
        v = dst
        while v != src:
            path.append(v)
            v = parent[v]
        path.reverse()
        return path


class _Evaluator:
    def __init__(self, k, env=None, force_tableau=False):
        if not k.is_classical:
            raise EvalError(f"{k.name} is 3-valued; use three_valued.eval_compositional3")
        self.k = k
        self.env = dict(env or {})
        self.env.setdefault(k.name, k)
        self.force_tableau = force_tableau
        self.memo = {}
        self._foreign = {}

    def states(self, phi):
        got = self.memo.get(phi)
        if got is not None:
            return got
        mask = self._states(phi)
        self.memo[phi] = mask
        return mask

    def _states(self, phi):
        k = self.k
        full = k.full_mask
        if isinstance(phi, F.Atom):
            if phi.name not in k.props:
                raise EvalError(f"proposition {phi.name!r} not in structure {k.name!r}")
            return k.true_mask(phi.name)
        if isinstance(phi, F.TrueConst):
            return full
        if isinstance(phi, F.FalseConst):
            return 0
        if isinstance(phi, F.SetAtom):
            return self._setatom(phi)
        if isinstance(phi, F.Not):
            return full ^ self.states(phi.child)
        if isinstance(phi, F.And):
            return self.states(phi.left) & self.states(phi.right)
        if isinstance(phi, F.Or):
            return self.states(phi.left) | self.states(phi.right)
        if isinstance(phi, F.Implies):
            return (full ^ self.states(phi.left)) | self.states(phi.right)
        if isinstance(phi, (F.PathA, F.PathE)):
            return self._quantified_path(phi)
        if isinstance(phi, F.QUANTIFIED):
            raise EvalError("propositional quantifiers are handled by the qctl module")
        raise EvalError(f"not a state formula: {F.render_formula(phi)}")

    def _setatom(self, atom):
        k = self.k
        if atom.structure == k.name:
            return k.mask_of(atom.states)
        home = atom.ref if atom.ref is not None else self.env.get(atom.structure)
        if home is None:
            raise EvalError(f"set atom over unknown structure {atom.structure!r}")
        pairs = self._foreign.get(atom.structure)
        if pairs is None:
            from .bisim import bisimilar_over

            common = tuple(p for p in home.props if p in k.props)
            rel = bisimilar_over(home, k, common)
            if rel is None:
                raise EvalError(
                    f"set atom of {atom.structure!r} on {k.name!r}: no bisimulation over {common}"
                )
            pairs = {}
            for s, t in rel.pairs:
                pairs[s] = pairs.get(s, 0) | 1 << k.index(t)
            self._foreign[atom.structure] = pairs
        bad = [s for s in atom.states if s not in home.states]
        if bad:
            raise EvalError(f"set atom state {bad[0]!r} not in structure {atom.structure!r}")
        mask = 0
        for s in atom.states:
            mask |= pairs.get(s, 0)
        return mask

    # -- CTL fixpoints -------------------------------------------------------

    def _ex(self, mask):
        out = 0
        for i, sm in enumerate(self.k.succ_masks):
            if sm & mask:
                out |= 1 << i
        return out

    def _ax(self, mask):
        full = self.k.full_mask
        return full ^ self._ex(full ^ mask)

    def _lfp(self, step):
        z = 0
        while True:
            nz = step(z)
            if nz == z:
                return z
            z = nz

    def _gfp(self, step):
        z = self.k.full_mask
        while True:
            nz = step(z)
            if nz == z:
                return z
            z = nz

    def _ctl_shaped(self, phi):
        c = phi.child
        if F.is_state_formula(c):
            return True
        if isinstance(c, (F.Next, F.Future, F.Globally)):
            return F.is_state_formula(c.child)
        if isinstance(c, (F.Until, F.Release)):
            return F.is_state_formula(c.left) and F.is_state_formula(c.right)
        return False

    def _quantified_path(self, phi):
        if not self.force_tableau and self._ctl_shaped(phi):
            return self._fixpoint(phi)
        if isinstance(phi, F.PathE):
            return AtomGraph(self.k, self._pathform(phi.child)).e_mask()
        return self.k.full_mask ^ AtomGraph(self.k, self._pathform(F.Not(phi.child))).e_mask()

    def _fixpoint(self, phi):
        universal = isinstance(phi, F.PathA)
        c = phi.child
        if F.is_state_formula(c):
            return self.states(c)
        nxt = self._ax if universal else self._ex
        if isinstance(c, F.Next):
            return nxt(self.states(c.child))
        if isinstance(c, F.Future):
            r = self.states(c.child)
            return self._lfp(lambda z: r | nxt(z))
        if isinstance(c, F.Globally):
            r = self.states(c.child)
            return self._gfp(lambda z: r & nxt(z))
        if isinstance(c, F.Until):
            l, r = self.states(c.left), self.states(c.right)
            return self._lfp(lambda z: r | (l & nxt(z)))
        if isinstance(c, F.Release):
            l, r = self.states(c.left), self.states(c.right)
            return self._gfp(lambda z: r & (l | nxt(z)))
        raise EvalError("not a CTL-shaped formula")

    # -- tableau route -------------------------------------------------------

    def _pathform(self, f):
        if F.is_state_formula(f):
            return _Leaf(self.states(f))
        if isinstance(f, F.Not):
            return F.Not(self._pathform(f.child))
        if isinstance(f, (F.And, F.Or, F.Implies)):
            return type(f)(self._pathform(f.left), self._pathform(f.right))
        if isinstance(f, (F.Next, F.Future, F.Globally)):
            return type(f)(self._pathform(f.child))
        if isinstance(f, (F.Until, F.Release)):
            return type(f)(self._pathform(f.left), self._pathform(f.right))
        raise EvalError(f"not a path formula: {F.render_formula(f)}")


def eval_states(k, phi, env=None, force_tableau=False):
    """Exact set of states of k satisfying the quantifier-free state formula."""
    ev = _Evaluator(k, env, force_tableau)
    mask = ev.states(phi)
    return StateSet(k.name, k.names_of(mask))


def eval_mask(k, phi, env=None, force_tableau=False):
    return _Evaluator(k, env, force_tableau).states(phi)


def check_ctl_star(k, phi, env=None, force_tableau=False):
    """K |= phi: every initial state satisfies phi."""
    mask = _Evaluator(k, env, force_tableau).states(phi)
    return k.init_mask & mask == k.init_mask


def explain_path(k, phi, env=None):
    """Witness lasso for a top-level path quantifier, if one is relevant.

    For E psi true somewhere initial: a satisfying lasso.  For A psi false:
    a falsifying lasso (a witness of E !psi).  Otherwise None.
    """
    if not isinstance(phi, (F.PathA, F.PathE)):
        return None
    ev = _Evaluator(k, env)
    if isinstance(phi, F.PathE):
        target = ev._pathform(phi.child)
        wanted = True
    else:
        target = ev._pathform(F.Not(phi.child))
        wanted = False
    ag = AtomGraph(k, target)
    mask = ag.e_mask()
    for s in k.init:
        if mask >> k.index(s) & 1:
            got = ag.lasso(s)
            if got is not None:
                stem, loop = got
                kind = "witness" if wanted else "counterexample"
                return {"kind": kind, "state": s, "stem": stem, "loop": loop}
    return None
