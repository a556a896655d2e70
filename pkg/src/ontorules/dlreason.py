"""Subsumption and consistency checking for the supported ontology fragment.

The fragment is deliberately small: inclusions of the shape
``(C1 and ... and Cn) subclass D`` where ``D`` is an atomic concept or an
existential restriction with Top filler, plus atomic role inclusions.
Consistency is decided by saturation; existential right-hand sides never force
named role atoms (their witnesses may stay anonymous).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    Atom,
    Axiom,
    ConceptInclusion,
    Const,
    Existential,
    ModelError,
    Predicate,
    RoleInclusion,
    CONCEPT,
    ROLE,
)


@dataclass(frozen=True)
class DLGuess:
    """One open-world completion over ground ontology atoms with named
    arguments.  ``true_atoms`` and ``false_atoms`` must be disjoint."""

    true_atoms: frozenset[Atom] = frozenset()
    false_atoms: frozenset[Atom] = frozenset()

    def __post_init__(self):
        clash = self.true_atoms & self.false_atoms
        if clash:
            raise ModelError(f"guess assigns both polarities to {sorted(map(str, clash))}")
        for a in itertools.chain(self.true_atoms, self.false_atoms):
            if not a.pred.is_dl or not a.is_ground():
                raise ModelError(f"guess atom must be a ground ontology atom: {a}")


@dataclass(frozen=True)
class ExistsFact:
    """Derived fact "some individual is related to ``anchor`` via ``role``".

    ``anchor_pos`` is the argument position occupied by the named individual:
    0 for ``role(anchor, _)``, 1 for ``role(_, anchor)``.  The witness itself
    may be anonymous, so no ground role atom is implied.
    """

    role: str
    anchor: Const
    anchor_pos: int


@dataclass(frozen=True)
class Saturation:
    guess: DLGuess
    clashes: tuple[Atom, ...] = ()
    existentials: frozenset[ExistsFact] = frozenset()

    @property
    def consistent(self) -> bool:
        return not self.clashes


def role_closure(tbox: tuple[Axiom, ...]) -> dict[str, set[str]]:
    """Reflexive-transitive closure of the atomic role inclusions."""
    edges: dict[str, set[str]] = {}
    for ax in tbox:
        if isinstance(ax, RoleInclusion):
            edges.setdefault(ax.sub, set()).add(ax.sup)
    return _closure(edges)


def concept_closure(tbox: tuple[Axiom, ...]) -> dict[str, set[str]]:
    """Reflexive-transitive closure of the atomic concept inclusions.

    Conjunctive or existential axioms contribute nothing here: only
    single-atom left-hand sides with an atomic right-hand side count.
    """
    edges: dict[str, set[str]] = {}
    for ax in tbox:
        if isinstance(ax, ConceptInclusion) and len(ax.lhs) == 1 and isinstance(ax.rhs, str):
            edges.setdefault(ax.lhs[0], set()).add(ax.rhs)
    return _closure(edges)


def _closure(edges: dict[str, set[str]]) -> dict[str, set[str]]:
    out = {k: set(v) for k, v in edges.items()}
    changed = True
    while changed:
        changed = False
        for k, vs in out.items():
            extra = set()
            for v in vs:
                extra |= out.get(v, set())
            if not extra <= vs:
                vs |= extra
                changed = True
    return out


def subsumes(general: Predicate, specific: Predicate, tbox: tuple[Axiom, ...]) -> bool:
    """True iff ``specific`` is below ``general`` in the inclusion hierarchy.

    Reflexive by definition; both predicates must be of the same kind.
    """
    if general.kind != specific.kind or general.kind not in (CONCEPT, ROLE):
        raise ModelError(f"cannot compare {general.name} ({general.kind}) with {specific.name} ({specific.kind})")
    if general.name == specific.name:
        return True
    closure = role_closure(tbox) if general.kind == ROLE else concept_closure(tbox)
    return general.name in closure.get(specific.name, set())


def saturate(guess: DLGuess, tbox: tuple[Axiom, ...], abox: tuple[Atom, ...]) -> Saturation:
    """Close the guess under the assertions and axioms.

    Propagates role inclusions and conjunctive-LHS inclusions with atomic
    right-hand sides; existential right-hand sides only record an
    :class:`ExistsFact`.  Inconsistency is reported, not raised: the result
    lists every derived atom that the guess declares false.
    """
    preds = {a.pred.name: a.pred for a in itertools.chain(guess.true_atoms, guess.false_atoms, abox)}
    true: set[Atom] = set(guess.true_atoms) | set(abox)
    exists: set[ExistsFact] = set()
    role_sup = role_closure(tbox)

    changed = True
    while changed:
        changed = False
        for atom in list(true):
            if atom.pred.kind != ROLE:
                continue
            for sup in role_sup.get(atom.pred.name, set()):
                p = preds.setdefault(sup, Predicate(sup, 2, ROLE))
                derived = Atom(p, atom.args)
                if derived not in true:
                    true.add(derived)
                    changed = True
        for ax in tbox:
            if not isinstance(ax, ConceptInclusion):
                continue
            for ind in _individuals(true):
                if not all(_has_concept(true, c, ind) for c in ax.lhs):
                    continue
                if isinstance(ax.rhs, str):
                    p = preds.setdefault(ax.rhs, Predicate(ax.rhs, 1, CONCEPT))
                    derived = Atom(p, (ind,))
                    if derived not in true:
                        true.add(derived)
                        changed = True
                else:
                    fact = ExistsFact(ax.rhs.role, ind, 1 if ax.rhs.inverse else 0)
                    if fact not in exists:
                        exists.add(fact)
                        changed = True
        # a named role atom also witnesses the corresponding existential
        for fact in list(exists):
            for sup in role_sup.get(fact.role, set()):
                lifted = ExistsFact(sup, fact.anchor, fact.anchor_pos)
                if lifted not in exists:
                    exists.add(lifted)
                    changed = True

    clashes = tuple(sorted(true & set(guess.false_atoms), key=str))
    return Saturation(
        guess=DLGuess(frozenset(true), guess.false_atoms - true if clashes else guess.false_atoms),
        clashes=clashes,
        existentials=frozenset(exists),
    )


def _individuals(atoms: set[Atom]):
    out: dict[Const, None] = {}
    for a in atoms:
        for t in a.args:
            out.setdefault(t)  # type: ignore[arg-type]
    return sorted(out)


def _has_concept(true: set[Atom], concept: str, ind: Const) -> bool:
    return any(a.pred.name == concept and a.args == (ind,) for a in true)
