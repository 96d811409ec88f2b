import pytest

from vacmc import formula as F
from vacmc.bisim import quotient_bisim
from vacmc.errors import EvalError
from vacmc.formula import parse_formula as p
from vacmc.kripke import duplicate_m, load_fixture
from vacmc.mc import StateSet, check_ctl_star, eval_states, eval_mask, explain_path

from helpers import eval_on_lasso, oracle_e_path, rand_ctl, rand_kripke, rand_actl_star, rand_path

P4 = p("AG ((AX p) | (AX !p))")


class TestEvalStates:
    def test_o_satisfies_p4_everywhere(self, fx):
        got = eval_states(fx("O"), P4)
        assert isinstance(got, StateSet)
        assert set(got.names) == {"o0", "o1"}
        assert check_ctl_star(fx("O"), P4)

    def test_o_refutes_p4_q(self, fx):
        got = eval_states(fx("O"), p("AG ((AX q) | (AX !q))"))
        assert "o0" not in got.names
        assert not check_ctl_star(fx("O"), p("AG ((AX q) | (AX !q))"))

    def test_ef_q_reachability(self, fx):
        k = fx("P")
        # independent oracle: explicit reachability closure to q-states
        reach = {s: {s} for s in k.states}
        changed = True
        while changed:
            changed = False
            for s in k.states:
                for t in k.successors(s):
                    if not reach[t] <= reach[s]:
                        reach[s] |= reach[t]
                        changed = True
        expect = {s for s in k.states if any(k.label3(t, "q").value == "true" for t in reach[s])}
        assert set(eval_states(k, p("EF q")).names) == expect == {"c0", "c1"}

    def test_unknown_prop_rejected(self, fx):
        with pytest.raises(EvalError, match="proposition"):
            eval_states(fx("L"), p("EF z"))

    def test_quantifier_rejected(self, fx):
        with pytest.raises(EvalError):
            eval_states(fx("L"), p("forall x . AG x"))

    def test_three_valued_rejected(self, fx):
        from vacmc.three_valued import lift_kx

        with pytest.raises(EvalError, match="3-valued"):
            eval_states(lift_kx(fx("L"), "x"), p("p"))


class TestCheckCtlStar:
    def test_p5_examples(self, fx):
        assert check_ctl_star(fx("P"), p("A((X q) -> X X q)"))
        assert not check_ctl_star(fx("P"), p("A(p -> X p)"))

    def test_propositional_path_tautology(self, fx):
        assert check_ctl_star(fx("L"), p("A((X p) | (X !p))"))

    def test_multiple_initial_states(self, fx):
        # chi has two initial states; x holds in only one of them
        assert not check_ctl_star(fx("chi"), p("x"))
        assert check_ctl_star(fx("chi"), p("x | !x"))


class TestCtlPathAgreement:
    def test_fixpoint_equals_tableau(self, rng, fx):
        pool = [rand_ctl(rng, ("p", "q"), 3) for _ in range(25)]
        structures = [fx("P"), fx("U"), fx("O")] + [rand_kripke(rng, 4) for _ in range(6)]
        for k in structures:
            for phi in pool:
                assert eval_mask(k, phi) == eval_mask(k, phi, force_tableau=True), F.render_formula(phi)


class TestBisimulationClosure:
    def test_verdicts_agree_on_bisimilar_pairs(self, rng, fx):
        pool = [rand_ctl(rng, ("p",), 3) for _ in range(30)] + [P4]
        l, m = fx("L"), fx("M")
        for phi in pool:
            assert check_ctl_star(l, phi) == check_ctl_star(m, phi)
        pool2 = [rand_ctl(rng, ("p", "q"), 3) for _ in range(30)]
        for name in ("O", "P", "U", "V"):
            k = fx(name)
            q = quotient_bisim(k)
            d = duplicate_m(k, 2)
            for phi in pool2:
                v = check_ctl_star(k, phi)
                assert check_ctl_star(q, phi) == v
                assert check_ctl_star(d, phi) == v


class TestSimulationPreservation:
    def test_never_sat_abstract_unsat_concrete(self, rng, fx):
        pairs = [(fx("M"), fx("L"), ("p",)), (fx("Valpha"), fx("V"), ("p", "q"))]
        for abstract, concrete, props in pairs:
            for _ in range(40):
                phi = rand_actl_star(rng, props, 3)
                if check_ctl_star(abstract, phi):
                    assert check_ctl_star(concrete, phi), F.render_formula(phi)


class TestPathChecker:
    def test_against_lasso_enumeration(self, rng, fx):
        structures = [fx("P"), fx("U"), fx("V")] + [rand_kripke(rng, 3) for _ in range(5)]
        pool = [rand_path(rng, ("p", "q"), 3) for _ in range(12)]
        for k in structures:
            for psi in pool:
                mask = eval_mask(k, F.PathE(psi), force_tableau=True)
                for s in k.init:
                    got = bool(mask >> k.index(s) & 1)
                    want = oracle_e_path(k, s, psi, max_len=8)
                    assert got == want, f"{k.name} {F.render_formula(psi)} at {s}"

    def test_witness_lasso_replays(self, rng, fx):
        cases = [
            (fx("P"), p("E(F q)")),
            (fx("U"), p("E(G (p | q))")),
            (fx("O"), p("A(G ((X q) | (X !q)))")),
            (fx("M"), p("A(G (X p))")),
        ]
        for k, phi in cases:
            w = explain_path(k, phi)
            if w is None:
                continue
            path, loop_start = tuple(w["stem"] + w["loop"]), len(w["stem"])
            body = phi.child
            value = eval_on_lasso(k, path, loop_start, body)
            assert value == (w["kind"] == "witness")


class TestSetAtoms:
    def test_local_set_atom(self, fx):
        k = fx("M")
        assert set(eval_states(k, p("EF {b1}@M")).names) == {"b0", "b1"}

    def test_foreign_set_atom_through_bisimulation(self, fx):
        # {a0}@L evaluated on the bisimilar M relates to both M-states
        k = fx("M")
        got = eval_states(k, p("{a0}@L"), env={"L": fx("L")})
        assert set(got.names) == {"b0", "b1"}

    def test_foreign_without_bisimulation_rejected(self, fx):
        with pytest.raises(EvalError, match="bisimulation"):
            eval_states(fx("V"), p("{a0}@L"), env={"L": fx("L")})

    def test_unknown_structure_rejected(self, fx):
        with pytest.raises(EvalError, match="unknown structure"):
            eval_states(fx("M"), p("{a0}@Z"))
