"""Clause templates: optimized evaluator and brute-force route, side by side."""

from __future__ import annotations

import pytest

from polydeclare.declare import (
    STAR,
    TRUE,
    BINARY_TEMPLATES,
    Clause,
    DataPredicate,
    Outcome,
    Template,
    TraceIndex,
    UNARY_TEMPLATES,
    evaluate,
    oracle_evaluate,
    render_clause,
    render_predicate,
)
from polydeclare.polylog import PolyadicTrace

from .conftest import mk_trace

SAT, VAC, VIOL = Outcome.SATISFIED, Outcome.VACUOUS, Outcome.VIOLATED

PX = DataPredicate(((("x", ">", 0.0),),))  # x > 0
PMISS = DataPredicate(((("y", "<=", 3.0),),))  # key never present


def both(clause, trace, **kw):
    """Run both evaluation routes and insist they agree."""
    fast = evaluate(clause, trace, **kw)
    slow = oracle_evaluate(clause, trace, **kw)
    assert fast == slow, (render_clause(clause), fast, slow)
    return fast


def U(template, label, pred=TRUE, all_variant=False):
    return Clause(template, (label, pred), all_variant=all_variant)


def B(template, a, b, pa=TRUE, pb=TRUE, poly=True):
    return Clause(template, (a, pa), ((b, pb)), poly=poly)


def test_predicate_semantics():
    assert TRUE.is_trivial and TRUE.holds({})
    assert PX.holds({"x": 1.0}) and not PX.holds({"x": 0.0})
    assert not PX.holds({})  # missing key is false
    assert not PX.holds({"x": "text"})  # ordering needs a number
    eq = DataPredicate(((("k", "=", "blue"),),))
    assert eq.holds({"k": "blue"}) and not eq.holds({"k": "red"})
    ne = DataPredicate(((("k", "!=", 5.0),),))
    assert ne.holds({"k": 4.0}) and not ne.holds({"k": 5.0})
    # disjunction of conjunctions
    dnf = DataPredicate(
        ((("x", ">", 0.0), ("x", "<=", 2.0)), (("k", "=", "z"),))
    )
    assert dnf.holds({"x": 1.0}) and dnf.holds({"k": "z"})
    assert not dnf.holds({"x": 3.0})


def test_predicate_validation():
    with pytest.raises(ValueError):
        DataPredicate(((("x", "~", 1.0),),))
    with pytest.raises(ValueError):
        DataPredicate(((("x", "<=", "one"),),))
    with pytest.raises(ValueError):
        DataPredicate(((("x", ">", True),),))
    with pytest.raises(ValueError):
        DataPredicate(((("", "=", 1.0),),))


def test_clause_arity_validation():
    with pytest.raises(ValueError):
        Clause(Template.INIT, ("a", TRUE), ("b", TRUE))
    with pytest.raises(ValueError):
        Clause(Template.RESPONSE, ("a", TRUE))
    with pytest.raises(ValueError):
        Clause(Template.RESPONSE, ("a", TRUE), ("b", TRUE), all_variant=True)
    assert Template.INIT in UNARY_TEMPLATES
    assert Template.RESPONSE in BINARY_TEMPLATES


def test_trace_index_resolution():
    t = mk_trace([[("IncreaseRapidly(dim_1^i)", 1)], [("DecreaseRapidly(dim_1^i)", 1)]])
    idx = TraceIndex(t)
    assert [j for j, _, _ in idx.occurrences("IncreaseRapidly(dim_1^i)")] == [1]
    assert [j for j, _, _ in idx.occurrences("dim_1^i")] == [1, 2]  # root
    assert [j for j, _, _ in idx.occurrences(STAR)] == [1, 2]
    assert idx.occurrences("nothing") == []
    # kappa payloads expose the reserved keys
    assert idx.all_occurrences[0][2]["__label"] == "IncreaseRapidly(dim_1^i)"
    assert idx.all_occurrences[0][2]["__span"] == 1


def test_init_and_end():
    assert both(U(Template.INIT, "a"), mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(U(Template.INIT, "a"), mk_trace([[("b", 1)], [("a", 1)]])) is VIOL
    assert both(U(Template.END, "a"), mk_trace([[("b", 1)], [("a", 1)]])) is SAT
    assert both(U(Template.END, "a"), mk_trace([[("a", 1)], [("b", 1)]])) is VIOL
    empty = PolyadicTrace("e", ())
    assert both(U(Template.INIT, "a"), empty) is VIOL
    assert both(U(Template.END, "a"), empty) is VIOL


def test_init_dataful_and_all_variant():
    t = mk_trace([[("a", 1, {"x": 1.0}), ("a", 2, {"x": -1.0})]])
    assert both(U(Template.INIT, "a", PX), t) is SAT  # some constituent passes
    assert both(U(Template.INIT, "a", PX, all_variant=True), t) is VIOL
    assert both(U(Template.INIT, "a", TRUE, all_variant=True), t) is SAT


def test_exists():
    t = mk_trace([[("a", 1, {"x": 2.0})], [("b", 1)]])
    assert both(U(Template.EXISTS, "a"), t) is SAT
    assert both(U(Template.EXISTS, "c"), t) is VIOL  # trivial predicate, absent
    assert both(U(Template.EXISTS, "c", PX), t) is VAC  # dataful de-activates
    assert both(U(Template.EXISTS, "a", PX), t) is SAT
    assert both(U(Template.EXISTS, "a", PMISS), t) is VIOL
    two = mk_trace([[("a", 1, {"x": 2.0}), ("a", 2, {"x": -2.0})]])
    assert both(U(Template.EXISTS, "a", PX, all_variant=True), two) is VIOL
    assert both(U(Template.EXISTS, "a", PX), two) is SAT


def test_absence():
    t = mk_trace([[("a", 1, {"x": 1.0})], [("b", 1)]])
    assert both(U(Template.ABSENCE, "c"), t) is SAT
    assert both(U(Template.ABSENCE, "a"), t) is VIOL
    assert both(U(Template.ABSENCE, "a", PMISS), t) is SAT  # no matching occurrence
    assert both(U(Template.ABSENCE, "a", PX), t) is VIOL
    # the All variant fires only on events whose every a-constituent matches
    mixed = mk_trace([[("a", 1, {"x": 1.0}), ("a", 2, {"x": -1.0})]])
    assert both(U(Template.ABSENCE, "a", PX, all_variant=True), mixed) is SAT
    pure = mk_trace([[("a", 1, {"x": 1.0}), ("a", 2, {"x": 2.0})]])
    assert both(U(Template.ABSENCE, "a", PX, all_variant=True), pure) is VIOL


def test_choice():
    assert both(B(Template.CHOICE, "a", "b"), mk_trace([[("a", 1)]])) is SAT
    assert both(B(Template.CHOICE, "a", "b"), mk_trace([[("b", 1)]])) is SAT
    assert both(B(Template.CHOICE, "a", "b"), mk_trace([[("c", 1)]])) is VIOL
    # dataful slots go vacuous when both labels are absent
    assert both(B(Template.CHOICE, "a", "b", pa=PX, pb=PX), mk_trace([[("c", 1)]])) is VAC
    assert both(B(Template.CHOICE, "a", "b", pa=PX, pb=PX), mk_trace([[("a", 1, {"x": 5.0})]])) is SAT


def test_exclusive_choice():
    xc = B(Template.EXCL_CHOICE, "a", "b")
    assert both(xc, mk_trace([[("a", 1)]])) is SAT
    assert both(xc, mk_trace([[("b", 1)], [("b", 1)]])) is SAT
    assert both(xc, mk_trace([[("a", 1)], [("b", 1)]])) is VIOL
    assert both(xc, mk_trace([[("c", 1)]])) is VIOL  # trivial slots: absent = violated
    dataful = B(Template.EXCL_CHOICE, "a", "b", pa=PX, pb=PX)
    assert both(dataful, mk_trace([[("c", 1)]])) is VAC
    # one side vacuous, other violated -> violated overall
    assert both(dataful, mk_trace([[("a", 1, {"x": -1.0})]])) is VIOL


def test_responded_and_co_existence():
    re = B(Template.RESP_EXISTENCE, "a", "b")
    assert both(re, mk_trace([[("c", 1)]])) is VAC
    assert both(re, mk_trace([[("b", 1)], [("a", 1)]])) is SAT  # order-free
    assert both(re, mk_trace([[("a", 1)]])) is VIOL
    co = B(Template.CO_EXISTENCE, "a", "b")
    assert both(co, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(co, mk_trace([[("a", 1)]])) is VIOL
    assert both(co, mk_trace([[("b", 1)]])) is VIOL
    assert both(co, mk_trace([[("c", 1)]])) is VAC


def test_response():
    r = B(Template.RESPONSE, "a", "b")
    assert both(r, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(r, mk_trace([[("b", 1)], [("a", 1)]])) is VIOL
    assert both(r, mk_trace([[("c", 1)]])) is VAC
    # every activation needs its own later target
    assert both(r, mk_trace([[("a", 1)], [("b", 1)], [("a", 1)]])) is VIOL
    assert both(r, mk_trace([[("a", 1)], [("a", 1)], [("b", 1)]])) is SAT
    # same-event target does not count even without spans
    assert both(r, mk_trace([[("a", 1), ("b", 2)]])) is VIOL


def test_response_span_awareness():
    t = mk_trace([[("a", 2)], [("b", 1)]])
    assert both(B(Template.RESPONSE, "a", "b", poly=False), t) is SAT
    assert both(B(Template.RESPONSE, "a", "b", poly=True), t) is VIOL  # b starts inside a
    t2 = mk_trace([[("a", 2)], [("c", 1)], [("b", 1)]])
    assert both(B(Template.RESPONSE, "a", "b", poly=True), t2) is SAT


def test_chain_response():
    cr = B(Template.CHAIN_RESPONSE, "a", "b")
    assert both(cr, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(cr, mk_trace([[("a", 1)], [("c", 1)], [("b", 1)]])) is VIOL
    assert both(cr, mk_trace([[("c", 1)]])) is VAC
    # span shifts the required adjacency point
    t = mk_trace([[("a", 3)], [("c", 1)], [("c", 1)], [("b", 1)]])
    assert both(B(Template.CHAIN_RESPONSE, "a", "b", poly=True), t) is SAT
    assert both(B(Template.CHAIN_RESPONSE, "a", "b", poly=False), t) is VIOL


def test_precedence():
    p = B(Template.PRECEDENCE, "a", "b")
    assert both(p, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(p, mk_trace([[("b", 1)], [("a", 1)]])) is VIOL
    assert both(p, mk_trace([[("a", 1)]])) is SAT  # no target at all
    assert both(p, mk_trace([[("b", 1)]])) is VIOL  # target without activation
    assert both(p, mk_trace([[("c", 1)]])) is VAC
    # a target tied to a later activation still violates
    assert both(p, mk_trace([[("a", 1)], [("b", 1)], [("a", 1)]])) is VIOL


def test_chain_precedence():
    cp = B(Template.CHAIN_PRECEDENCE, "a", "b")
    # activation at event 1 can have no predecessor: vacuous
    assert both(cp, mk_trace([[("a", 1)], [("c", 1)]])) is VAC
    assert both(cp, mk_trace([[("b", 1)], [("a", 1)]])) is SAT
    assert both(cp, mk_trace([[("b", 1)], [("c", 1)], [("a", 1)]])) is VIOL
    # target span must end exactly at the activation
    t = mk_trace([[("b", 2)], [("c", 1)], [("a", 1)]])
    assert both(B(Template.CHAIN_PRECEDENCE, "a", "b", poly=True), t) is SAT
    assert both(B(Template.CHAIN_PRECEDENCE, "a", "b", poly=False), t) is VIOL


def test_chain_precedence_leq_flag():
    cp = B(Template.CHAIN_PRECEDENCE, "a", "b")
    gap = mk_trace([[("b", 1)], [("c", 1)], [("c", 1)], [("a", 1)]])
    assert both(cp, gap) is VIOL
    assert both(cp, gap, chain_adjacency_leq=True) is SAT
    # leq still requires the target to end at or before the activation
    late = mk_trace([[("c", 1)], [("a", 1)], [("b", 1)]])
    assert both(cp, late, chain_adjacency_leq=True) is VIOL


def test_succession():
    s = B(Template.SUCCESSION, "a", "b")
    assert both(s, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(s, mk_trace([[("a", 1)]])) is VIOL  # response half fails
    assert both(s, mk_trace([[("b", 1)]])) is VIOL  # precedence half fails
    assert both(s, mk_trace([[("c", 1)]])) is VAC


def test_chain_succession():
    cs = B(Template.CHAIN_SUCCESSION, "a", "b")
    assert both(cs, mk_trace([[("a", 1)], [("b", 1)]])) is SAT
    assert both(cs, mk_trace([[("a", 1)], [("c", 1)], [("b", 1)]])) is VIOL
    # a b not immediately preceded by a violates the reverse half
    assert both(cs, mk_trace([[("c", 1)], [("b", 1)]])) is VIOL
    assert both(cs, mk_trace([[("c", 1)]])) is VAC


def test_dataful_binary_slots():
    r = B(Template.RESPONSE, "a", "b", pa=PX, pb=PX)
    t = mk_trace([[("a", 1, {"x": 1.0})], [("b", 1, {"x": -1.0})], [("b", 1, {"x": 2.0})]])
    assert both(r, t) is SAT
    t2 = mk_trace([[("a", 1, {"x": 1.0})], [("b", 1, {"x": -1.0})]])
    assert both(r, t2) is VIOL  # the only later b fails its predicate
    t3 = mk_trace([[("a", 1, {"x": -1.0})], [("b", 1)]])
    assert both(r, t3) is VAC  # activation predicate never fires


def test_root_and_star_labels():
    A1 = "IncreaseRapidly(dim_1^i)"
    B1 = "DecreaseRapidly(dim_1^i)"
    t = mk_trace([[(A1, 1, {"x": 1.0})], [(B1, 2, {"x": -1.0})]])
    assert both(U(Template.EXISTS, "dim_1^i"), t) is SAT
    assert both(U(Template.ABSENCE, "dim_2^i"), t) is SAT
    assert both(B(Template.RESPONSE, A1, "dim_1^i"), t) is SAT
    # wildcard with a span predicate reaches the reserved kappa keys
    span2 = DataPredicate(((("__span", ">", 1.5),),))
    assert both(U(Template.EXISTS, STAR, span2), t) is SAT
    span9 = DataPredicate(((("__span", ">", 8.5),),))
    assert both(U(Template.EXISTS, STAR, span9), t) is VIOL


def test_alphabet_validation():
    t = mk_trace([[("a", 1)]])
    clause = U(Template.EXISTS, "zzz")
    with pytest.raises(ValueError):
        evaluate(clause, t, alphabet={"a", "b"})
    with pytest.raises(ValueError):
        oracle_evaluate(clause, t, alphabet={"a", "b"})
    assert evaluate(U(Template.EXISTS, "a"), t, alphabet={"a"}) is SAT


def test_evaluate_accepts_prebuilt_index():
    t = mk_trace([[("a", 1)], [("b", 1)]])
    idx = TraceIndex(t)
    assert evaluate(B(Template.RESPONSE, "a", "b"), idx) is SAT


def test_random_traces_agree_across_routes():
    import itertools
    import random

    rng = random.Random(2024)
    preds = [TRUE, PX, PMISS]
    clauses = []
    for tpl in sorted(UNARY_TEMPLATES, key=lambda t: t.value):
        for pred in preds:
            for av in (False, True):
                clauses.append(Clause(tpl, ("a", pred), all_variant=av))
    for tpl in sorted(BINARY_TEMPLATES, key=lambda t: t.value):
        for pa, pb in itertools.product(preds[:2], preds):
            for poly in (True, False):
                clauses.append(Clause(tpl, ("a", pa), ("b", pb), poly=poly))
    for _ in range(60):
        n = rng.randint(1, 5)
        events = []
        for pos in range(n):
            k = rng.randint(1, 2)
            ev = []
            seen = set()
            for _ in range(k):
                lbl = rng.choice(["a", "b", "c"])
                span = rng.randint(1, min(2, n - pos))
                if (lbl, span) in seen:
                    continue
                seen.add((lbl, span))
                ev.append((lbl, span, {"x": rng.choice([-1.0, 1.0])}))
            events.append(ev or [("c", 1)])
        trace = mk_trace(events)
        for clause in clauses:
            for leq in (False, True):
                both(clause, trace, chain_adjacency_leq=leq)


def test_render_predicate():
    assert render_predicate(TRUE) == "true"
    assert render_predicate(PX) == "x > 0.0"
    two = DataPredicate(((("x", ">", 0.0), ("x", "<=", 2.5)),))
    assert render_predicate(two) == "x > 0.0 ∧ x ≤ 2.5"
    dnf = DataPredicate(((("x", ">", 0.0),), (("k", "=", "z"),)))
    assert render_predicate(dnf) == "(x > 0.0) ∨ (k = 'z')"


def test_render_clause():
    assert render_clause(U(Template.EXISTS, "a")) == "Exists(a)"
    assert render_clause(U(Template.EXISTS, "a", PX, all_variant=True)) == "AllExists(a, x > 0.0)"
    assert render_clause(B(Template.RESPONSE, "a", "b", pb=PX)) == "Response(a, b, x > 0.0)"
    assert render_clause(B(Template.RESPONSE, "a", "b", pa=PX)) == "Response(a, x > 0.0, b)"
