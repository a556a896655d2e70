"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines on the terminal.
"""

import itertools
import random
import sys
import time

import pytest

from conftest import target_atom
from genprog import brute_force_stable_models, random_ground_program
from ontorules import (
    HybridKB,
    compare,
    covers,
    learn,
    more_general,
    parse_bias,
    parse_examples,
    parse_kb,
)
from ontorules.datalog import stable_models
from ontorules.hybrid import GeneralityVerdict
from ontorules.learner import LearnerParams
from ontorules.model import Atom, Const, ExampleSet, Predicate, CONCEPT
from ontorules.refine import canonical_form, refine, seed_rule

LONER_EXAMPLES = ["LONER(Mary)", "LONER(Joe)", "LONER(Paul)"]
LIKES_EXAMPLES = ["LIKES(Mary,Italy)", "LIKES(Mary,Germany)", "LIKES(Joe,Italy)"]


def _report(num: int, name: str, ok: bool, elapsed: float) -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[acceptance {num}] {name}: {status} ({elapsed:.2f}s)"
    print(line, file=sys.__stdout__, flush=True)


def test_criterion_1_coverage_tables(kb, loner_rules, likes_rules):
    t0 = time.perf_counter()
    expected = {
        ("LONER", "h1"): [1, 1, 1],
        ("LONER", "h2"): [1, 1, 0],
        ("LONER", "h3"): [0, 1, 1],
        ("LIKES", "h1"): [1, 1, 1],
        ("LIKES", "h2"): [1, 1, 0],
        ("LIKES", "h3"): [1, 0, 1],
    }
    got = {}
    for name, h in loner_rules.items():
        got[("LONER", name)] = [int(covers(kb, h, target_atom(kb, h, e))) for e in LONER_EXAMPLES]
    for name, h in likes_rules.items():
        if name in ("h1", "h2", "h3"):
            got[("LIKES", name)] = [int(covers(kb, h, target_atom(kb, h, e))) for e in LIKES_EXAMPLES]
    elapsed = time.perf_counter() - t0
    cells_ok = sum(
        int(a == b) for key in expected for a, b in zip(expected[key], got[key])
    )
    ok = cells_ok == 18 and elapsed < 10.0
    _report(1, f"coverage tables ({cells_ok}/18 cells)", ok, elapsed)
    assert got == expected
    assert elapsed < 10.0


def test_criterion_2_generality_verdicts(kb, loner_rules, likes_rules):
    t0 = time.perf_counter()
    MG = GeneralityVerdict.STRICTLY_MORE_GENERAL
    INC = GeneralityVerdict.INCOMPARABLE
    cases = [
        (loner_rules["h1"], loner_rules["h2"], MG),
        (loner_rules["h1"], loner_rules["h3"], MG),
        (loner_rules["h2"], loner_rules["h3"], INC),
        (likes_rules["h1"], likes_rules["h2"], MG),
        (likes_rules["h1"], likes_rules["h3"], MG),
        (likes_rules["h2"], likes_rules["h3"], INC),
        (likes_rules["h1"], likes_rules["h4"], MG),
        (likes_rules["h1"], likes_rules["h5"], MG),
        (likes_rules["h4"], likes_rules["h5"], MG),
    ]
    results = [(compare(a, b, kb), want) for a, b, want in cases]
    elapsed = time.perf_counter() - t0
    n_ok = sum(int(got is want) for got, want in results)
    ok = n_ok == 9 and elapsed < 30.0
    _report(2, f"generality verdicts ({n_ok}/9)", ok, elapsed)
    assert n_ok == 9
    assert elapsed < 30.0


def test_criterion_3_refinement_sets(kb, loner_bias, likes_bias, loner_rules, likes_rules):
    t0 = time.perf_counter()
    ok = True

    steps = refine(seed_rule(loner_rules["h1"].head.pred), loner_bias, kb.tbox)
    ok &= {canonical_form(s.child) for s in steps} == {canonical_form(loner_rules["h1"])}
    ok &= all(s.rule_applied == "add-datalog-literal" for s in steps)

    steps = refine(loner_rules["h1"], loner_bias, kb.tbox)
    kids = {canonical_form(s.child) for s in steps}
    ok &= canonical_form(loner_rules["h2"]) in kids
    ok &= canonical_form(loner_rules["h3"]) in kids
    ok &= not any(s.rule_applied == "add-datalog-literal" for s in steps)

    steps = refine(likes_rules["h1"], likes_bias, kb.tbox)
    kids = {canonical_form(s.child) for s in steps}
    ok &= all(canonical_form(likes_rules[n]) in kids for n in ("h2", "h3", "h4", "h5"))

    steps = refine(likes_rules["h4"], likes_bias, kb.tbox)
    spec = {
        canonical_form(s.child) for s in steps if s.rule_applied == "specialize-ontology-literal"
    }
    ok &= spec == {canonical_form(likes_rules["h5"])}

    elapsed = time.perf_counter() - t0
    _report(3, "refinement set reproduction", bool(ok), elapsed)
    assert ok


def _depth3_edges(kb, bias, target):
    frontier = [seed_rule(target)]
    seen = {canonical_form(frontier[0])}
    edges = []
    for _ in range(3):
        nxt = []
        for parent in frontier:
            for step in refine(parent, bias, kb.tbox):
                edges.append((parent, step.child))
                key = canonical_form(step.child)
                if key not in seen:
                    seen.add(key)
                    nxt.append(step.child)
        frontier = nxt
    return edges


def test_criterion_4_refinement_correctness(kb, loner_bias, likes_bias, loner_rules, likes_rules):
    t0 = time.perf_counter()
    edges = _depth3_edges(kb, loner_bias, loner_rules["h1"].head.pred)
    edges += _depth3_edges(kb, likes_bias, likes_rules["h1"].head.pred)
    bad = [(p, c) for p, c in edges if not more_general(p, c, kb)]
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300.0
    _report(4, f"refinement correctness ({len(edges) - len(bad)}/{len(edges)} pairs)", ok, elapsed)
    assert bad == []
    assert elapsed < 300.0


def test_criterion_5_end_to_end_learning(kb, loner_examples, likes_examples, loner_bias, likes_bias, loner_rules, likes_rules):
    # Regression note: the narrative walkthrough of the LONER task adds the
    # NAF rule (famous + not happy) to the hypothesis, claiming it covers no
    # negatives.  Its own coverage table says otherwise: that rule covers the
    # negative example LONER(Paul).  Under the coverage semantics implemented
    # here the consistent result is the ontology-literal rule, and that is
    # what this criterion asserts.
    t0 = time.perf_counter()
    loner = learn(kb, loner_examples.target, loner_examples, loner_bias)
    likes = learn(kb, likes_examples.target, likes_examples, likes_bias)
    elapsed = time.perf_counter() - t0
    ok = (
        loner.success
        and list(loner.rules) == [loner_rules["h2"]]
        and likes.success
        and list(likes.rules) == [likes_rules["h3"]]
    )
    _report(5, "end-to-end learning", ok, elapsed)
    assert list(loner.rules) == [loner_rules["h2"]] and loner.success
    assert list(likes.rules) == [likes_rules["h3"]] and likes.success


def test_criterion_6_stable_model_oracle():
    t0 = time.perf_counter()
    rng = random.Random(20260823)
    mismatches = 0
    for _ in range(200):
        prog = random_ground_program(rng, max_atoms=12)
        got = {m.true_atoms for m in stable_models(prog)}
        if got != brute_force_stable_models(prog):
            mismatches += 1
    elapsed = time.perf_counter() - t0
    ok = mismatches == 0 and elapsed < 60.0
    _report(6, f"stable-model oracle ({200 - mismatches}/200 programs)", ok, elapsed)
    assert mismatches == 0
    assert elapsed < 60.0


def test_criterion_7_quasi_order_laws(kb, loner_bias, likes_bias, loner_rules, likes_rules):
    t0 = time.perf_counter()
    # full depth-3 space for the concept task; for the role task the space has
    # tens of thousands of rules, so transitivity is checked on the depth-1
    # neighbourhood of the named rules (reflexivity still covers everything
    # generated there)
    loner_space = {canonical_form(seed_rule(loner_rules["h1"].head.pred))}
    for p, c in _depth3_edges(kb, loner_bias, loner_rules["h1"].head.pred):
        loner_space.add(canonical_form(c))
    likes_space = {canonical_form(seed_rule(likes_rules["h1"].head.pred))}
    for s in refine(seed_rule(likes_rules["h1"].head.pred), likes_bias, kb.tbox):
        likes_space.add(canonical_form(s.child))
    for s in refine(likes_rules["h1"], likes_bias, kb.tbox):
        likes_space.add(canonical_form(s.child))
    likes_space.update(canonical_form(r) for r in likes_rules.values())

    violations = 0
    for space in (sorted(loner_space, key=str), sorted(likes_space, key=str)):
        rel = {}
        for a in space:
            for b in space:
                rel[(a, b)] = more_general(a, b, kb)
        violations += sum(int(not rel[(a, a)]) for a in space)
        for a, b, c in itertools.product(space, repeat=3):
            if rel[(a, b)] and rel[(b, c)] and not rel[(a, c)]:
                violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0
    _report(7, f"quasi-order laws ({violations} violations)", ok, elapsed)
    assert violations == 0


def _random_kb_from_template(rng: random.Random):
    people = ["Mary", "Joe", "Paul", "Ann", "Bob"]
    places = ["Italy", "Germany", "France"]
    lines = [
        "concept RICH/1.", "concept UNMARRIED/1.",
        "role WANTS-TO-MARRY/2.", "role LOVES/2.",
        "pred famous/1.", "pred scientist/1.", "pred happy/1.", "pred meets/3.",
        "#tbox",
        "RICH and UNMARRIED subclass some inv(WANTS-TO-MARRY) Top.",
        "WANTS-TO-MARRY subrole LOVES.",
        "#rules",
        "RICH(X) :- famous(X), not scientist(X).",
        "happy(X) :- famous(X), WANTS-TO-MARRY(Y,X).",
        "#facts",
    ]
    used = set()
    for p in people:
        if rng.random() < 0.7:
            lines.append(f"famous({p}).")
            used.add(p)
        if rng.random() < 0.3:
            lines.append(f"scientist({p}).")
            used.add(p)
        if rng.random() < 0.5:
            lines.append(f"UNMARRIED({p}).")
            used.add(p)
    for _ in range(rng.randint(1, 4)):
        a, b = rng.sample(people, 2)
        pl = rng.choice(places)
        lines.append(f"meets({a},{b},{pl}).")
        used.update((a, b))
    if not used:
        lines.append("famous(Mary).")
        used.add("Mary")
    return parse_kb("\n".join(lines)), sorted(used)


def test_criterion_8_learning_contract(kb, loner_bias):
    t0 = time.perf_counter()
    rng = random.Random(42)
    target = Predicate("LONER", 1, CONCEPT)
    successes = violations = 0
    for _ in range(50):
        rkb, people = _random_kb_from_template(rng)
        bias = parse_bias(
            "datalog+ = famous/1\ndatalog- = happy/1\nconcepts = RICH/1, UNMARRIED/1\n", rkb
        )
        atoms = [Atom(target, (Const(p),)) for p in people]
        rng.shuffle(atoms)
        split = rng.randint(0, len(atoms))
        examples = ExampleSet(target, tuple(atoms[:split]), tuple(atoms[split:]))
        result = learn(rkb, target, examples, bias, LearnerParams(max_body_len=3))
        if not result.success:
            continue
        successes += 1
        for e in examples.positives:
            if not any(covers(rkb, r, e) for r in result.rules):
                violations += 1
        for e in examples.negatives:
            if any(covers(rkb, r, e) for r in result.rules):
                violations += 1
    elapsed = time.perf_counter() - t0
    ok = violations == 0
    _report(
        8,
        f"learning contract ({successes}/50 runs succeeded, {violations} violations)",
        ok,
        elapsed,
    )
    assert violations == 0
    assert successes > 0  # the property must not hold vacuously
