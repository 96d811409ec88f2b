"""Simulation and bisimulation over a chosen proposition set, and quotients.

Bisimulations come from coarsest-partition refinement on the disjoint union
of the two structures; simulations from the naive greatest-fixpoint pair
elimination.  Both results replay against the definitions (see
is_simulation / is_bisimulation), which the tests exercise.
"""

from dataclasses import dataclass

from .errors import KripkeError
from .kripke import KripkeStructure


@dataclass(frozen=True)
class Relation:
    """A set of state pairs between two named structures."""

    left: str
    right: str
    pairs: frozenset

    def related(self, s, t):
        return (s, t) in self.pairs

    def inverse(self):
        return Relation(self.right, self.left, frozenset((t, s) for s, t in self.pairs))


def _check_common(k1, k2, over):
    over = tuple(over)
    missing = [p for p in over if p not in k1.props or p not in k2.props]
    if missing:
        raise KripkeError(f"propositions {missing} not common to {k1.name} and {k2.name}")
    return over


def greatest_bisimulation(k1, k2, over):
    """All pairs (s, t) equated by the coarsest bisimulation over `over`."""
    over = _check_common(k1, k2, over)
    union = [(0, s) for s in k1.states] + [(1, t) for t in k2.states]
    structs = (k1, k2)

    def successors(tag, s):
        k = structs[tag]
        return [(tag, t) for t in k.names_of(k.succ_masks[k.index(s)])]

    block = {}
    for tag, s in union:
        sig = tuple(structs[tag].label3(s, p) for p in over)
        block[(tag, s)] = sig
    while True:
        ids = {}
        for node in union:
            succ_blocks = frozenset(block[v] for v in successors(*node))
            ids[node] = (block[node], succ_blocks)
        renamed = {}
        fresh = {}
        for node in union:
            key = ids[node]
            if key not in fresh:
                fresh[key] = len(fresh)
            renamed[node] = fresh[key]
        if renamed == block:
            break
        block = renamed
    return {
        (s, t)
        for s in k1.states
        for t in k2.states
        if block[(0, s)] == block[(1, t)]
    }


def bisimilar_over(k1, k2, over):
    """Greatest bisimulation relating both initial-state sets, or None."""
    pairs = greatest_bisimulation(k1, k2, over)
    fwd = all(any((s, t) in pairs for t in k2.init) for s in k1.init)
    bwd = all(any((s, t) in pairs for s in k1.init) for t in k2.init)
    if not (fwd and bwd):
        return None
    return Relation(k1.name, k2.name, frozenset(pairs))


def greatest_simulation(k1, k2, over):
    """All pairs (s, t) with s (in k1) simulating t (in k2) over `over`."""
    over = _check_common(k1, k2, over)
    pairs = {
        (s, t)
        for s in k1.states
        for t in k2.states
        if all(k1.label3(s, p) == k2.label3(t, p) for p in over)
    }
    changed = True
    while changed:
        changed = False
        for s, t in list(pairs):
            for t2 in k2.successors(t):
                if not any((s2, t2) in pairs for s2 in k1.successors(s)):
                    pairs.discard((s, t))
                    changed = True
                    break
    return pairs


def simulates_over(k1, k2, over):
    """Greatest simulation of k2 by k1 covering k2's initial states, or None."""
    pairs = greatest_simulation(k1, k2, over)
    if not all(any((s, t) in pairs for s in k1.init) for t in k2.init):
        return None
    return Relation(k1.name, k2.name, frozenset(pairs))


def is_simulation(k1, k2, over, pairs):
    """Replay the simulation clauses: labels agree, k1 matches k2's steps."""
    for s, t in pairs:
        if any(k1.label3(s, p) != k2.label3(t, p) for p in over):
            return False
        for t2 in k2.successors(t):
            if not any((s2, t2) in pairs for s2 in k1.successors(s)):
                return False
    return True


def is_bisimulation(k1, k2, over, pairs):
    inverse = {(t, s) for s, t in pairs}
    return is_simulation(k1, k2, over, pairs) and is_simulation(k2, k1, over, inverse)


def quotient_bisim(k, over=None):
    """Quotient by the greatest auto-bisimulation; existential transition lift."""
    over = tuple(k.props) if over is None else tuple(over)
    pairs = greatest_bisimulation(k, k, over)
    blocks = []
    assigned = {}
    for s in k.states:
        if s in assigned:
            continue
        members = [t for t in k.states if (s, t) in pairs]
        for t in members:
            assigned[t] = len(blocks)
        blocks.append(members)

    def block_name(i):
        return "{" + ",".join(blocks[i]) + "}"

    states = [block_name(i) for i in range(len(blocks))]
    init = []
    for s in k.init:
        name = block_name(assigned[s])
        if name not in init:
            init.append(name)
    labels = {block_name(i): {p: k.label3(members[0], p) for p in over} for i, members in enumerate(blocks)}
    trans = set()
    for s, t in k.trans:
        trans.add((block_name(assigned[s]), block_name(assigned[t])))
    return KripkeStructure(f"{k.name}/~", over, states, init, sorted(trans), labels)
