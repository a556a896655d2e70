"""Sequential-covering rule learner with information-gain guided search.

The outer loop learns one rule at a time and removes the positives it covers;
the inner loop specializes the seed by hill climbing over the refinement
operator until no negative example is covered (or the guards trip).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .hybrid import covers
from .model import Atom, ExampleSet, HybridKB, LanguageBias, Predicate, Rule
from .refine import RefinementStep, refine, seed_rule


@dataclass(frozen=True)
class LearnerParams:
    max_body_len: int = 5
    beam_width: int = 1
    laplace: bool = True
    noise_tolerance: float = 0.0
    jobs: int = 1

    def __post_init__(self):
        if self.max_body_len < 1 or self.beam_width < 1 or self.jobs < 1:
            raise ValueError("max_body_len, beam_width and jobs must be positive")
        if not 0.0 <= self.noise_tolerance <= 1.0:
            raise ValueError("noise_tolerance must lie in [0, 1]")


@dataclass(frozen=True)
class CoverageStats:
    pos_covered: int
    neg_covered: int
    confidence: float


@dataclass(frozen=True)
class LearnedHypothesis:
    rules: tuple[Rule, ...]
    per_rule_stats: tuple[CoverageStats, ...]
    uncovered_positives: tuple[Atom, ...]

    @property
    def success(self) -> bool:
        return not self.uncovered_positives


def confidence(pos: int, neg: int, laplace: bool = True) -> float:
    if laplace:
        return (pos + 1) / (pos + neg + 2)
    return pos / (pos + neg) if pos + neg else 0.0


def _coverage(kb: HybridKB, rule: Rule, examples, jobs: int = 1):
    if jobs > 1 and len(examples) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            flags = list(ex.map(lambda e: covers(kb, rule, e), examples))
    else:
        flags = [covers(kb, rule, e) for e in examples]
    return frozenset(e for e, f in zip(examples, flags) if f)


@dataclass
class _Evaluated:
    rule: Rule
    pos: frozenset[Atom]
    neg: frozenset[Atom]
    step: RefinementStep | None = None

    def stats(self, laplace: bool) -> CoverageStats:
        return CoverageStats(len(self.pos), len(self.neg), confidence(len(self.pos), len(self.neg), laplace))


def gain(h_new: Rule, h_old: Rule, kb: HybridKB, examples: ExampleSet, laplace: bool = True) -> float:
    """p * (log2 cf(new) - log2 cf(old)), where p counts the positives covered
    by both rules.  Target examples are ground, so each contributes exactly
    one head binding."""
    new = _Evaluated(h_new, _coverage(kb, h_new, examples.positives), _coverage(kb, h_new, examples.negatives))
    old = _Evaluated(h_old, _coverage(kb, h_old, examples.positives), _coverage(kb, h_old, examples.negatives))
    return _gain(new, old, laplace)


def _gain(new: _Evaluated, old: _Evaluated, laplace: bool) -> float:
    p = len(new.pos & old.pos)
    cf_new = confidence(len(new.pos), len(new.neg), laplace)
    cf_old = confidence(len(old.pos), len(old.neg), laplace)
    if cf_new == 0.0:
        return float("-inf") if p else 0.0
    if cf_old == 0.0:
        return float("inf") if p else 0.0
    return p * (math.log2(cf_new) - math.log2(cf_old))


def _rank_key(cand: _Evaluated, current: _Evaluated, laplace: bool):
    # positive-coverage retention first, then gain: a gain-optimal but
    # narrow candidate must not beat one that keeps the covered positives
    return (
        -len(cand.pos),
        -_gain(cand, current, laplace),
        len(cand.rule.body),
        str(cand.rule),
    )


def choose_best(
    candidates,
    h_current: Rule,
    kb: HybridKB,
    examples: ExampleSet,
    laplace: bool = True,
    jobs: int = 1,
) -> Rule:
    """Deterministic argmax over the ranking used by the inner loop."""
    if not candidates:
        raise ValueError("choose_best needs a non-empty candidate set")
    current = _Evaluated(
        h_current,
        _coverage(kb, h_current, examples.positives, jobs),
        _coverage(kb, h_current, examples.negatives, jobs),
    )
    evaluated = [
        _Evaluated(c, _coverage(kb, c, examples.positives, jobs), _coverage(kb, c, examples.negatives, jobs))
        for c in candidates
    ]
    return min(evaluated, key=lambda e: _rank_key(e, current, laplace)).rule


def learn(
    kb: HybridKB,
    target: Predicate,
    examples: ExampleSet,
    bias: LanguageBias,
    params: LearnerParams = LearnerParams(),
) -> LearnedHypothesis:
    """Sequential covering: learn rules until every positive is covered or an
    inner search fails; the remainder is reported, never silently dropped."""
    remaining = list(examples.positives)
    negatives = tuple(examples.negatives)
    rules: list[Rule] = []
    stats: list[CoverageStats] = []

    while remaining:
        found = _learn_one(kb, target, tuple(remaining), negatives, bias, params)
        if found is None:
            break
        rules.append(found.rule)
        stats.append(found.stats(params.laplace))
        remaining = [e for e in remaining if e not in found.pos]

    return LearnedHypothesis(tuple(rules), tuple(stats), tuple(remaining))


def _consistent(ev: _Evaluated, params: LearnerParams) -> bool:
    total = len(ev.pos) + len(ev.neg)
    return len(ev.neg) <= params.noise_tolerance * total


def _learn_one(
    kb: HybridKB,
    target: Predicate,
    positives: tuple[Atom, ...],
    negatives: tuple[Atom, ...],
    bias: LanguageBias,
    params: LearnerParams,
) -> _Evaluated | None:
    seed = seed_rule(target)
    current = _Evaluated(
        seed,
        _coverage(kb, seed, positives, params.jobs),
        _coverage(kb, seed, negatives, params.jobs),
    )
    while True:
        if current.rule.body and _consistent(current, params) and current.pos:
            return current
        if len(current.rule.body) >= params.max_body_len:
            return None
        steps = refine(current.rule, bias, kb.tbox)
        if not steps:
            return None
        evaluated = [
            _Evaluated(
                s.child,
                _coverage(kb, s.child, positives, params.jobs),
                _coverage(kb, s.child, negatives, params.jobs),
                s,
            )
            for s in steps
        ]
        evaluated.sort(key=lambda e: _rank_key(e, current, params.laplace))
        best = evaluated[0]
        if not best.pos:
            return None  # nothing retains a positive example: dead end
        current = best
