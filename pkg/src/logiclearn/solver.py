"""Exact entailment over normal logic programs.

Two independent inference routes are provided:

* :func:`entails` — goal-directed SLD resolution with negation by failure
  (leftmost literal selection, depth-first, rules renamed apart per use).
  This is the labeling authority for generated datasets.
* :func:`fixpoint_model` — a brute-force iterated fixpoint over the
  program's ground atoms (stratified negation). Used to cross-check
  ``entails`` exhaustively.

Both agree on every ground atom of a stratifiable program; the test suite
enforces this over large generated corpora.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .lp import Atom, Literal, Program, Rule, Term

Substitution = dict[str, Term]

# Internal values are either ("c", name) for constants or (name, frame)
# variable keys; frames make rule instances disjoint without rebuilding terms.
_CONST = "c"


class DepthExceeded(RuntimeError):
    """Proof search hit the resolution depth limit."""


class FloundersError(RuntimeError):
    """A negated subgoal was selected while still containing variables."""


class NotStratified(ValueError):
    """A predicate depends on its own negation; no iterated fixpoint exists."""


@dataclass(frozen=True)
class SolverLimits:
    max_depth: int = 64
    path_loop_check: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


DEFAULT_LIMITS = SolverLimits()


# ---------- substitution machinery ----------

def _walk(subst, val):
    """Follow variable bindings to a representative value."""
    while not isinstance(val, str) and val[0] != _CONST and val in subst:
        val = subst[val]
    return val


def _term_value(term: Term, frame: int):
    if term.is_variable:
        return (term.name, frame)
    return (_CONST, term.name)


def _unify_atoms(a: Atom, fa: int, b: Atom, fb: int, subst):
    """Extend ``subst`` so that a and b become equal, or return None."""
    if a.predicate != b.predicate or len(a.args) != len(b.args):
        return None
    for ta, tb in zip(a.args, b.args):
        va = _walk(subst, _term_value(ta, fa))
        vb = _walk(subst, _term_value(tb, fb))
        if va == vb:
            continue
        if va[0] != _CONST:
            subst = {**subst, va: vb}
        elif vb[0] != _CONST:
            subst = {**subst, vb: va}
        else:
            return None
    return subst


def unify(a: Atom, b: Atom, subst: Substitution | None = None) -> Substitution | None:
    """Most general unifier of two atoms, extending an optional substitution.

    Variables of the same name in ``a`` and ``b`` denote the same variable.
    Returns None when predicates, arities or bound constants conflict;
    repeated variables enforce equality (``p(X,X)`` semantics).
    """
    inner: dict = {}
    if subst:
        for name, term in subst.items():
            inner[(name, 0)] = _term_value(term, 0)
    result = _unify_atoms(a, 0, b, 0, inner)
    if result is None:
        return None
    out: Substitution = {}
    for key in result:
        val = _walk(result, key)
        if val == key:
            continue
        out[key[0]] = Term(val[1]) if val[0] == _CONST else Term(val[0])
    return out


def apply_subst(subst: Substitution, lit: Literal) -> Literal:
    """Replace every bound variable in a literal; unbound ones are unchanged."""
    args = []
    for t in lit.atom.args:
        seen = {t.name}
        while t.is_variable and t.name in subst:
            t = subst[t.name]
            if t.name in seen:  # defensive: cyclic substitution
                break
            seen.add(t.name)
        args.append(t)
    return Literal(Atom(lit.atom.predicate, tuple(args)), lit.negated)


# ---------- SLD resolution with negation by failure ----------

def _resolve_args(atom: Atom, frame: int, subst):
    """Resolve an atom's arguments to constants where bound.

    Returns (values, ground) where values are internal term values.
    """
    vals = []
    ground = True
    for t in atom.args:
        v = _walk(subst, _term_value(t, frame))
        if v[0] != _CONST:
            ground = False
        vals.append(v)
    return vals, ground


def _rule_index(program: Program):
    index: dict[tuple[str, int], list[Rule]] = {}
    for rule in program.rules:
        index.setdefault((rule.head.predicate, rule.head.arity), []).append(rule)
    return index


class _Search:
    """One entailment search over a fixed program."""

    def __init__(self, program: Program, limits: SolverLimits):
        self.index = _rule_index(program)
        self.limits = limits
        self.next_frame = 1

    def prove(self, goals, subst, depth) -> bool:
        """Depth-first proof of a goal list.

        Each goal is (literal, frame, path) where path is the tuple of
        ground ancestor goals used for the loop check.
        """
        if not goals:
            return True
        (lit, frame, path), rest = goals[0], goals[1:]
        vals, ground = _resolve_args(lit.atom, frame, subst)

        if lit.negated:
            if not ground:
                raise FloundersError(f"non-ground negated goal -{lit.atom.predicate}{vals}")
            sub_atom = Atom(lit.atom.predicate, tuple(Term(v[1]) for v in vals))
            # negation by failure: succeed iff the positive goal fails
            if self.prove([(Literal(sub_atom), 0, path)], {}, depth):
                return False
            return self.prove(rest, subst, depth)

        key = None
        if ground:
            key = (lit.atom.predicate, tuple(v[1] for v in vals))
            if self.limits.path_loop_check and key in path:
                return False
        if depth >= self.limits.max_depth:
            raise DepthExceeded(f"no proof within {self.limits.max_depth} resolution steps")

        for rule in self.index.get((lit.atom.predicate, lit.atom.arity), ()):
            frame_r = self.next_frame
            self.next_frame += 1
            extended = _unify_atoms(rule.head, frame_r, lit.atom, frame, subst)
            if extended is None:
                continue
            child_path = path + (key,) if key is not None else path
            new_goals = [(b, frame_r, child_path) for b in rule.body] + rest
            if self.prove(new_goals, extended, depth + 1):
                return True
        return False


def entails(program: Program, query: Atom, limits: SolverLimits = DEFAULT_LIMITS) -> int:
    """1 iff the program entails the ground query under SLD + NBF."""
    if not query.is_ground:
        raise ValueError(f"query must be ground: {query}")
    search = _Search(program, limits)
    return 1 if search.prove([(Literal(query), 0, ())], {}, 0) else 0


def solve_literal(program: Program, lit: Literal, limits: SolverLimits = DEFAULT_LIMITS) -> int:
    """Entailment of a ground literal; a negated literal flips the bit."""
    if not lit.atom.is_ground:
        raise ValueError(f"literal must be ground: {lit}")
    bit = entails(program, lit.atom, limits)
    return 1 - bit if lit.negated else bit


# ---------- brute-force stratified fixpoint ----------

GroundAtom = tuple[str, tuple[str, ...]]


def _strata(program: Program) -> dict[str, int]:
    """Assign stratum numbers so negative dependencies strictly descend."""
    preds = {r.head.predicate for r in program.rules}
    for r in program.rules:
        preds.update(l.atom.predicate for l in r.body)
    level = {p: 0 for p in preds}
    limit = len(preds) + 1
    changed = True
    while changed:
        changed = False
        for rule in program.rules:
            h = rule.head.predicate
            for lit in rule.body:
                need = level[lit.atom.predicate] + (1 if lit.negated else 0)
                if level[h] < need:
                    level[h] = need
                    if level[h] > limit:
                        raise NotStratified(f"negative cycle through {h!r}")
                    changed = True
    return level


def _match_fact(atom: Atom, fact_args: tuple[str, ...], binding: dict[str, str]):
    """Extend a variable->constant binding so atom matches a ground fact."""
    new = binding
    for t, c in zip(atom.args, fact_args):
        if t.is_constant:
            if t.name != c:
                return None
        else:
            bound = new.get(t.name)
            if bound is None:
                if new is binding:
                    new = dict(binding)
                new[t.name] = c
            elif bound != c:
                return None
    return new


def _ground_atom(atom: Atom, binding: dict[str, str]) -> GroundAtom:
    return (atom.predicate, tuple(binding[t.name] if t.is_variable else t.name for t in atom.args))


def _derive(rule: Rule, model: set[GroundAtom], by_pred, constants):
    """Yield ground heads derivable from a rule given the current model."""
    positive = [l.atom for l in rule.body if not l.negated]
    negative = [l.atom for l in rule.body if l.negated]
    rule_vars: list[str] = []
    seen = set()
    for at in [rule.head] + [l.atom for l in rule.body]:
        for t in at.args:
            if t.is_variable and t.name not in seen:
                seen.add(t.name)
                rule_vars.append(t.name)

    def finish(binding):
        free = [v for v in rule_vars if v not in binding]
        for combo in itertools.product(constants, repeat=len(free)):
            full = {**binding, **dict(zip(free, combo))}
            if any(_ground_atom(n, full) in model for n in negative):
                continue
            yield _ground_atom(rule.head, full)

    def join(i, binding):
        if i == len(positive):
            yield from finish(binding)
            return
        at = positive[i]
        for fact_args in by_pred.get((at.predicate, at.arity), ()):
            extended = _match_fact(at, fact_args, binding)
            if extended is not None:
                yield from join(i + 1, extended)

    yield from join(0, {})


def fixpoint_model(program: Program,
                   extra_constants: tuple[str, ...] = ()) -> frozenset[GroundAtom]:
    """All entailed ground atoms, as (predicate, arg names) pairs.

    Computed via forward chaining over the program's constants, one stratum
    at a time. ``extra_constants`` widens the Herbrand universe, e.g. with
    query constants that do not occur in the program itself. Raises
    NotStratified when a predicate depends on its own negation.
    """
    level = _strata(program)
    constants = sorted({t.name for r in program.rules
                        for at in [r.head] + [l.atom for l in r.body]
                        for t in at.args if t.is_constant} | set(extra_constants))
    model: set[GroundAtom] = set()
    by_pred: dict[tuple[str, int], set[tuple[str, ...]]] = {}
    max_level = max(level.values(), default=0)
    for stratum in range(max_level + 1):
        rules = [r for r in program.rules if level[r.head.predicate] == stratum]
        changed = True
        while changed:
            changed = False
            for rule in rules:
                for head in _derive(rule, model, by_pred, constants):
                    if head not in model:
                        model.add(head)
                        by_pred.setdefault((head[0], len(head[1])), set()).add(head[1])
                        changed = True
    return frozenset(model)


def ground_query_space(program: Program, extra_atoms: tuple[Atom, ...] = ()) -> list[Atom]:
    """Every ground atom over the program's predicate/arity pairs and constants.

    ``extra_atoms`` widens the universe with additional predicates and
    constants (e.g. the sample's query atoms).
    """
    sigs = set()
    consts = set()
    for rule in program.rules:
        for at in [rule.head] + [l.atom for l in rule.body]:
            sigs.add((at.predicate, at.arity))
            consts.update(t.name for t in at.args if t.is_constant)
    for at in extra_atoms:
        sigs.add((at.predicate, at.arity))
        consts.update(t.name for t in at.args if t.is_constant)
    consts_sorted = sorted(consts)
    space = []
    for pred, arity in sorted(sigs):
        for combo in itertools.product(consts_sorted, repeat=arity):
            space.append(Atom(pred, tuple(Term(c) for c in combo)))
    return space
