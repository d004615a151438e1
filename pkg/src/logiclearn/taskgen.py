"""Seeded generators for the 12 reasoning task classes.

Each task function draws one sample: a context program plus a paired
positive and negative query. Negative queries pick a failure mode uniformly
from the task's menu. Every emitted label is re-verified against the
symbolic solver before the sample is returned, and noise rules always use
fresh predicates so they can never change a query's label.

Samples are deterministic: each one is drawn from its own PCG64 stream
keyed by (seed, purpose, task, index), so parallel and sequential
generation produce identical bytes.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .lp import Atom, Literal, Program, QueryLine, Rule, Term, parse_program, parse_query_line, render
from .solver import DEFAULT_LIMITS, entails

GENERATOR_VERSION = 1

LOWER = string.ascii_lowercase
UPPER = string.ascii_uppercase

TASK_NAMES = {
    1: "facts", 2: "unification", 3: "deduction1", 4: "deduction2",
    5: "deduction3", 6: "and", 7: "or", 8: "transitivity",
    9: "nbf1", 10: "nbf2", 11: "and-nbf", 12: "or-nbf",
}

# Chain length used by the n-step tasks when GenConfig.chain_steps is unset.
DEFAULT_CHAIN_STEPS = {3: 1, 4: 2, 5: 3, 9: 1, 10: 2}

# Stream tags keep the per-sample RNG streams of different dataset roles
# disjoint under one seed.
PURPOSE_TRAIN = 0
PURPOSE_VAL = 1
PURPOSE_TEST = 2
PURPOSE_SWEEP_STEPS = 5
PURPOSE_SWEEP_LENGTH = 6


class CapacityExhausted(RuntimeError):
    """No unused symbol remains in the requested length range."""


class GenerationFailed(RuntimeError):
    """A task template kept violating its own label contract."""


@dataclass(frozen=True)
class GenConfig:
    task_id: int
    symbol_len_min: int = 1
    symbol_len_max: int = 2
    noise_rules: int = 2
    chain_steps: int | None = None
    seed: int = 0

    def __post_init__(self):
        if not 1 <= self.task_id <= 12:
            raise ValueError(f"task_id must be in 1..12, got {self.task_id}")
        if self.symbol_len_min < 1 or self.symbol_len_min > self.symbol_len_max:
            raise ValueError("need 1 <= symbol_len_min <= symbol_len_max")
        if self.noise_rules < 0:
            raise ValueError("noise_rules must be >= 0")
        if self.chain_steps is not None and self.chain_steps < 1:
            raise ValueError("chain_steps must be >= 1")

    @property
    def steps(self) -> int:
        return self.chain_steps or DEFAULT_CHAIN_STEPS.get(self.task_id, 1)


@dataclass(frozen=True)
class DifficultyTier:
    name: str
    max_symbol_len: int
    extra_noise: int


TIERS = {
    "validation": DifficultyTier("validation", 2, 2),
    "easy": DifficultyTier("easy", 4, 2),
    "medium": DifficultyTier("medium", 8, 4),
    "hard": DifficultyTier("hard", 12, 8),
}


def tier_config(task_id: int, tier: str | DifficultyTier, seed: int = 0) -> GenConfig:
    t = TIERS[tier] if isinstance(tier, str) else tier
    return GenConfig(task_id=task_id, symbol_len_min=1, symbol_len_max=t.max_symbol_len,
                     noise_rules=t.extra_noise, seed=seed)


@dataclass(frozen=True)
class Sample:
    task_id: int
    context: Program
    queries: tuple[QueryLine, ...]

    @property
    def positive(self) -> QueryLine:
        return next(q for q in self.queries if q.target == 1)

    @property
    def negative(self) -> QueryLine:
        return next(q for q in self.queries if q.target == 0)


def sample_rng(seed: int, purpose: int, task_id: int, index: int) -> np.random.Generator:
    """The dedicated RNG stream for one sample."""
    ss = np.random.SeedSequence(seed, spawn_key=(purpose, task_id, index))
    return np.random.Generator(np.random.PCG64(ss))


# ---------- symbol pool ----------

def gen_symbol(rng: np.random.Generator, len_range: tuple[int, int], used: set[str],
               alphabet: str = LOWER) -> str:
    """Fresh random symbol with uniform length in ``len_range``.

    Raises CapacityExhausted once every string in the range is taken.
    """
    lo, hi = len_range
    capacity = sum(len(alphabet) ** n for n in range(lo, hi + 1))
    in_range = sum(1 for s in used if lo <= len(s) <= hi and all(c in alphabet for c in s))
    if in_range >= capacity:
        raise CapacityExhausted(f"all {capacity} symbols of length {lo}..{hi} are used")
    for _ in range(200):
        n = int(rng.integers(lo, hi + 1))
        sym = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), size=n))
        if sym not in used:
            used.add(sym)
            return sym
    # dense pool: enumerate the free symbols of one feasible length
    for n in range(lo, hi + 1):
        free = _free_symbols(n, used, alphabet)
        if free:
            sym = free[int(rng.integers(0, len(free)))]
            used.add(sym)
            return sym
    raise CapacityExhausted(f"all symbols of length {lo}..{hi} are used")


def _free_symbols(n: int, used: set[str], alphabet: str) -> list[str]:
    import itertools
    return ["".join(t) for t in itertools.product(alphabet, repeat=n)
            if "".join(t) not in used]


class _Names:
    """Per-sample symbol pools. Predicates and constants are disjoint pools
    in the same lowercase alphabet (the surface syntax allows reuse across
    the two roles, as in a fact ``l(o).`` next to a predicate ``o``)."""

    def __init__(self, rng, len_range):
        self.rng = rng
        self.len_range = len_range
        self.preds: set[str] = set()
        self.consts: set[str] = set()

    def pred(self) -> str:
        return gen_symbol(self.rng, self.len_range, self.preds)

    def const(self) -> str:
        return gen_symbol(self.rng, self.len_range, self.consts)

    def variables(self, n: int) -> list[str]:
        used: set[str] = set()
        return [gen_symbol(self.rng, (1, 2), used, UPPER) for _ in range(n)]


def _choice(rng, items):
    return items[int(rng.integers(0, len(items)))]


def _pick(rng, items, n, replace=True) -> list[str]:
    return [str(x) for x in rng.choice(items, size=n, replace=replace)]


def _fact(pred: str, *consts: str) -> Rule:
    return Rule(Atom(pred, tuple(Term(c) for c in consts)))


def _atom(pred: str, names) -> Atom:
    return Atom(pred, tuple(Term(n) for n in names))


# ---------- task templates ----------
#
# Each template returns (rules, positive_query_atom, negative_query_atom).
# Labels are established by construction and re-checked by the solver in
# generate_sample.

def _gen_facts(rng, names: _Names):
    n_facts = int(rng.integers(3, 6))
    facts = []
    for _ in range(n_facts):
        arity = int(rng.integers(1, 3))
        facts.append(_fact(names.pred(), *[names.const() for _ in range(arity)]))
    target = _choice(rng, facts)
    positive = target.head

    mode = _choice(rng, ["wrong_constant", "wrong_predicate", "absent"])
    if mode == "wrong_constant":
        ref = _choice(rng, facts)
        pool = [c for f in facts for c in (t.name for t in f.head.args)]
        pool = [c for c in pool if c not in {t.name for t in ref.head.args}] or [names.const()]
        args = [t.name for t in ref.head.args]
        args[int(rng.integers(0, len(args)))] = _choice(rng, pool)
        negative = _atom(ref.head.predicate, args)
    elif mode == "wrong_predicate":
        ref = _choice(rng, facts)
        negative = _atom(names.pred(), [t.name for t in ref.head.args])
    else:
        arity = int(rng.integers(1, 3))
        negative = _atom(names.pred(), [names.const() for _ in range(arity)])
    return facts, positive, negative


def _gen_unification(rng, names: _Names):
    same_pred = names.pred()
    any_pred = names.pred()
    v1, v2 = names.variables(2)
    rules = [
        Rule(_atom(same_pred, [v1, v1])),
        Rule(_atom(any_pred, [v2] if rng.integers(0, 2) else names.variables(2))),
    ]
    consts = [names.const() for _ in range(3)]
    for _ in range(int(rng.integers(1, 3))):
        arity = int(rng.integers(1, 3))
        rules.append(_fact(names.pred(), *_pick(rng, consts, arity)))

    c_eq = _choice(rng, consts)
    if rng.integers(0, 2):
        positive = _atom(same_pred, [c_eq, c_eq])
    else:
        any_arity = rules[1].head.arity
        positive = _atom(any_pred, _pick(rng, consts, any_arity))

    mode = _choice(rng, ["same_var_mismatch", "missing_pred"])
    if mode == "same_var_mismatch":
        a, b = _pick(rng, consts, 2, replace=False)
        negative = _atom(same_pred, [a, b])
    else:
        negative = _atom(names.pred(), _pick(rng, consts, int(rng.integers(1, 3))))
    return rules, positive, negative


def _chain_rules(rng, names: _Names, steps: int, arity: int):
    """A chain q0 <- q1 <- ... <- q_steps with optional argument swaps.

    Returns (rules, preds, perms) where perms[k] maps the query argument
    order to rule k's body argument order.
    """
    preds = [names.pred() for _ in range(steps + 1)]
    rules = []
    perms = []
    for k in range(steps):
        head_vars = names.variables(arity)
        swap = arity == 2 and bool(rng.integers(0, 2))
        body_vars = list(reversed(head_vars)) if swap else head_vars
        rules.append(Rule(_atom(preds[k], head_vars), (Literal(_atom(preds[k + 1], body_vars)),)))
        perms.append(swap)
    return rules, preds, perms


def _net_order(consts: list[str], perms: list[bool]) -> list[str]:
    order = list(consts)
    for swap in perms:
        if swap:
            order = list(reversed(order))
    return order


def _gen_deduction(rng, names: _Names, steps: int):
    arity = int(rng.integers(1, 3))
    rules, preds, perms = _chain_rules(rng, names, steps, arity)
    query_consts = [names.const() for _ in range(arity)]
    fact_consts = _net_order(query_consts, perms)
    rules.append(_fact(preds[-1], *fact_consts))
    positive = _atom(preds[0], query_consts)

    menu = ["wrong_constant", "missing_pred"]
    if arity == 2 and _net_order(query_consts[::-1], perms) != fact_consts:
        menu.append("swap_mismatch")
    mode = _choice(rng, menu)
    if mode == "swap_mismatch":
        negative = _atom(preds[0], query_consts[::-1])
    elif mode == "wrong_constant":
        args = list(query_consts)
        args[int(rng.integers(0, arity))] = names.const()
        negative = _atom(preds[0], args)
    else:
        negative = _atom(names.pred(), [names.const() for _ in range(arity)])
    return rules, positive, negative


def _gen_and(rng, names: _Names):
    head_pred = names.pred()
    b1, b2 = names.pred(), names.pred()
    v1, v2 = names.variables(2)
    rule = Rule(_atom(head_pred, [v1, v2]),
                (Literal(_atom(b1, [v1])), Literal(_atom(b2, [v2]))))
    c1 = names.const()
    c2 = c1 if rng.integers(0, 2) else names.const()
    c3 = names.const()
    rules = [rule, _fact(b1, c1), _fact(b2, c2)]
    positive = _atom(head_pred, [c1, c2])

    # the failing constant gets a fact on the *other* body predicate so it
    # still appears in the context
    if rng.integers(0, 2):
        rules.append(_fact(b2, c3))
        negative = _atom(head_pred, [c3, c2])   # first literal fails
    else:
        rules.append(_fact(b1, c3))
        negative = _atom(head_pred, [c1, c3])   # second literal fails
    return rules, positive, negative


def _gen_or(rng, names: _Names, negate_one: bool = False):
    """Three-way branch on the query predicate: 2 implications + 1 ground rule."""
    head_pred = names.pred()
    arity = int(rng.integers(1, 3))
    s1, s2 = names.pred(), names.pred()
    rule_vars = [names.variables(arity), names.variables(arity)]
    neg_branch = int(rng.integers(0, 2)) if negate_one else -1
    branches = [
        Rule(_atom(head_pred, rule_vars[0]), (Literal(_atom(s1, rule_vars[0]), neg_branch == 0),)),
        Rule(_atom(head_pred, rule_vars[1]), (Literal(_atom(s2, rule_vars[1]), neg_branch == 1),)),
    ]
    ground_consts = [names.const() for _ in range(arity)]
    rules = branches + [_fact(head_pred, *ground_consts)]

    pos_consts = [names.const() for _ in range(arity)]
    options = ["branch1", "branch2", "ground"]
    success = _choice(rng, options)
    if success == "ground":
        positive = _atom(head_pred, ground_consts)
    else:
        idx = 0 if success == "branch1" else 1
        pred = (s1, s2)[idx]
        if idx == neg_branch:
            # negated branch succeeds because its atom is absent; plant a
            # decoy fact with other constants so the predicate exists
            rules.append(_fact(pred, *[names.const() for _ in range(arity)]))
        else:
            rules.append(_fact(pred, *pos_consts))
        positive = _atom(head_pred, pos_consts)

    neg_consts = [names.const() for _ in range(arity)]
    if neg_branch >= 0:
        # make the negated branch fail: its atom must be derivable
        rules.append(_fact((s1, s2)[neg_branch], *neg_consts))
    negative = _atom(head_pred, neg_consts)

    # near-miss distractor on a non-success branch (shorter arity or
    # mismatching constants), mirroring the task exemplars
    if arity == 2 and rng.integers(0, 2):
        other = _choice(rng, [s1, s2])
        rules.append(_fact(other, names.const()))
    return rules, positive, negative


def _gen_transitivity(rng, names: _Names):
    head_pred, q, d = names.pred(), names.pred(), names.pred()
    va, vp, vw = names.variables(3)
    rules = [Rule(_atom(head_pred, [va, vw]),
                  (Literal(_atom(q, [va, vp])), Literal(_atom(d, [vp, vw]))))]
    a1, mid, c1 = names.const(), names.const(), names.const()
    rules += [_fact(q, a1, mid), _fact(d, mid, c1)]
    positive = _atom(head_pred, [a1, c1])

    # non-joining pair: q(a2,b2) and d(b3,c3) with b2 != b3
    a2, b2, b3, c3 = names.const(), names.const(), names.const(), names.const()
    rules += [_fact(q, a2, b2), _fact(d, b3, c3)]
    negative = _atom(head_pred, [a2, c3])

    # structurally similar distractor rule over fresh predicates
    p1, p2, p3 = names.pred(), names.pred(), names.pred()
    w1, w2, w3 = names.variables(3)
    rules.append(Rule(_atom(p1, [w1, w3]),
                      (Literal(_atom(p2, [w1, w2])), Literal(_atom(p3, [w2, w3])))))
    return rules, positive, negative


def _gen_nbf_chain(rng, names: _Names, steps: int):
    """Negated first body literal, then a positive chain of steps-1 rules.

    The query succeeds when the inner chain fails and vice versa.
    """
    arity = int(rng.integers(1, 3))
    head_pred = names.pred()
    inner_rules, inner_preds, perms = ([], [names.pred()], []) if steps == 1 else \
        _chain_rules(rng, names, steps - 1, arity)
    head_vars = names.variables(arity)
    swap = arity == 2 and bool(rng.integers(0, 2))
    body_vars = list(reversed(head_vars)) if swap else head_vars
    top = Rule(_atom(head_pred, head_vars), (Literal(_atom(inner_preds[0], body_vars), True),))
    all_perms = [swap] + perms
    rules = [top] + inner_rules

    # negative query: inner chain succeeds on its constants
    neg_consts = [names.const() for _ in range(arity)]
    rules.append(_fact(inner_preds[-1], *_net_order(neg_consts, all_perms)))
    negative = _atom(head_pred, neg_consts)

    # positive query: inner chain fails
    menu = ["wrong_constant", "unseen_constants"]
    if arity == 2:
        menu.append("swap_mismatch")
    mode = _choice(rng, menu)
    if mode == "swap_mismatch" and _net_order(neg_consts, all_perms) != _net_order(neg_consts[::-1], all_perms):
        positive = _atom(head_pred, neg_consts[::-1])
    elif mode == "unseen_constants":
        # reuse the rule but with constants never seen by the chain's fact
        positive = _atom(head_pred, [names.const() for _ in range(arity)])
    else:
        args = list(neg_consts)
        args[int(rng.integers(0, arity))] = names.const()
        positive = _atom(head_pred, args)
    return rules, positive, negative


def _gen_and_nbf(rng, names: _Names):
    head_pred = names.pred()
    p1, p2 = names.pred(), names.pred()
    v1, v2 = names.variables(2)
    negate_first = bool(rng.integers(0, 2))
    lits = (Literal(_atom(p1, [v1]), negate_first), Literal(_atom(p2, [v2]), not negate_first))
    rules = [Rule(_atom(head_pred, [v1, v2]), lits)]

    neg_pred, pos_pred = (p1, p2) if negate_first else (p2, p1)
    c_ok = names.const()      # passes the negated literal (no fact on it)
    c_pos = names.const()     # satisfies the positive literal
    c_blocked = names.const() # fact on the negated predicate
    rules += [_fact(pos_pred, c_pos), _fact(neg_pred, c_blocked)]
    extra = names.const()
    rules.append(_fact(names.pred(), extra))

    def query(neg_c, pos_c):
        return _atom(head_pred, [neg_c, pos_c] if negate_first else [pos_c, neg_c])

    positive = query(c_ok, c_pos)
    if rng.integers(0, 2):
        negative = query(c_blocked, c_pos)   # negated literal's atom succeeds
    else:
        negative = query(c_ok, names.const())  # positive literal fails
    return rules, positive, negative


def _gen_noise(rng, names: _Names, count: int, allow_negation: bool):
    """Irrelevant rules over fresh predicates; they never interact with the
    task predicates, so deleting them cannot change any query label."""
    rules = []
    kinds = ["fact", "implication"] + (["negated"] if allow_negation else [])
    for _ in range(count):
        kind = _choice(rng, kinds)
        arity = int(rng.integers(1, 3))
        if kind == "fact":
            rules.append(_fact(names.pred(), *[names.const() for _ in range(arity)]))
        else:
            head_vars = names.variables(arity)
            body_vars = list(reversed(head_vars)) if arity == 2 and rng.integers(0, 2) else head_vars
            rules.append(Rule(_atom(names.pred(), head_vars),
                              (Literal(_atom(names.pred(), body_vars), kind == "negated"),)))
    return rules


_TEMPLATES = {
    1: lambda rng, names, cfg: _gen_facts(rng, names),
    2: lambda rng, names, cfg: _gen_unification(rng, names),
    3: lambda rng, names, cfg: _gen_deduction(rng, names, cfg.steps),
    4: lambda rng, names, cfg: _gen_deduction(rng, names, cfg.steps),
    5: lambda rng, names, cfg: _gen_deduction(rng, names, cfg.steps),
    6: lambda rng, names, cfg: _gen_and(rng, names),
    7: lambda rng, names, cfg: _gen_or(rng, names, negate_one=False),
    8: lambda rng, names, cfg: _gen_transitivity(rng, names),
    9: lambda rng, names, cfg: _gen_nbf_chain(rng, names, cfg.steps),
    10: lambda rng, names, cfg: _gen_nbf_chain(rng, names, cfg.steps),
    11: lambda rng, names, cfg: _gen_and_nbf(rng, names),
    12: lambda rng, names, cfg: _gen_or(rng, names, negate_one=True),
}

MAX_TEMPLATE_RETRIES = 50


def generate_sample(cfg: GenConfig, rng: np.random.Generator) -> Sample:
    """One sample of the configured task, labels verified by the solver."""
    len_range = (cfg.symbol_len_min, cfg.symbol_len_max)
    for _ in range(MAX_TEMPLATE_RETRIES):
        names = _Names(rng, len_range)
        rules, positive, negative = _TEMPLATES[cfg.task_id](rng, names, cfg)
        noise = _gen_noise(rng, names, cfg.noise_rules, allow_negation=cfg.task_id >= 9)
        all_rules = list(rules)
        for extra in noise:
            all_rules.insert(int(rng.integers(0, len(all_rules) + 1)), extra)
        program = Program(tuple(all_rules))
        if entails(program, positive, DEFAULT_LIMITS) != 1:
            continue
        if entails(program, negative, DEFAULT_LIMITS) != 0:
            continue
        return Sample(cfg.task_id, program,
                      (QueryLine(positive, 1), QueryLine(negative, 0)))
    raise GenerationFailed(f"task {cfg.task_id}: template violated its label contract")


def generate_samples(cfg: GenConfig, count: int, purpose: int = PURPOSE_TRAIN) -> list[Sample]:
    """``count`` deterministic samples, one RNG stream each."""
    return [generate_sample(cfg, sample_rng(cfg.seed, purpose, cfg.task_id, i))
            for i in range(count)]


# ---------- sweep program generation ----------

def generate_sweep_programs(kind: str, n_max: int, rng=None, *, seed: int = 0,
                            count_per_bucket: int = 1000) -> dict[int, list[Sample]]:
    """Programs for the multi-hop and symbol-length sweeps.

    ``kind="steps"``: single-body deduction chains of exactly n steps for
    n = 1..n_max. ``kind="length"``: 1-step chains whose predicate and
    constant symbols are exactly n characters long.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if kind not in ("steps", "length"):
        raise ValueError(f"kind must be 'steps' or 'length', got {kind!r}")
    purpose = PURPOSE_SWEEP_STEPS if kind == "steps" else PURPOSE_SWEEP_LENGTH
    buckets: dict[int, list[Sample]] = {}
    for n in range(1, n_max + 1):
        if kind == "steps":
            cfg = GenConfig(task_id=3, chain_steps=n, noise_rules=2, seed=seed)
        else:
            cfg = GenConfig(task_id=3, symbol_len_min=n, symbol_len_max=n,
                            noise_rules=2, seed=seed)
        buckets[n] = [generate_sample(cfg, sample_rng(seed, purpose, n, i))
                      for i in range(count_per_bucket)]
    return buckets


# ---------- on-disk dataset format ----------
#
# UTF-8 text. One sample = canonical rule lines, then one query line per
# query ("? atom. bit"), then one blank line. A sibling manifest
# (<dataset>.manifest) holds line-oriented key=value metadata.

def sample_to_text(sample: Sample) -> str:
    lines = [render(sample.context)] if sample.context.rules else []
    lines += [str(q) for q in sample.queries]
    return "\n".join(lines) + "\n\n"


def manifest_path(out_path: str | Path) -> Path:
    return Path(str(out_path) + ".manifest")


def generate_dataset(cfg_list: list[GenConfig], count_per_task: int,
                     out_path: str | Path, purpose: int = PURPOSE_TRAIN,
                     tier: str = "", threads: int = 1) -> dict[str, str]:
    """Write a dataset file plus its manifest; returns the manifest mapping.

    Output bytes depend only on (cfg_list, count_per_task); generation may
    be parallelized without changing them.
    """
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    manifest: dict[str, str] = {
        "generator_version": str(GENERATOR_VERSION),
        "tier": tier,
        "purpose": str(purpose),
        "count_per_task": str(count_per_task),
        "task_ids": ",".join(str(c.task_id) for c in cfg_list),
    }
    for cfg in cfg_list:
        manifest[f"seed_task_{cfg.task_id}"] = str(cfg.seed)

    with open(out_path, "w", encoding="utf-8") as fh:
        for cfg in cfg_list:
            for s in _iter_samples(cfg, count_per_task, purpose, threads):
                fh.write(sample_to_text(s))
    with open(manifest_path(out_path), "w", encoding="utf-8") as fh:
        for k, v in manifest.items():
            fh.write(f"{k}={v}\n")
    return manifest


def _iter_samples(cfg: GenConfig, count: int, purpose: int, threads: int):
    if threads <= 1:
        for i in range(count):
            yield generate_sample(cfg, sample_rng(cfg.seed, purpose, cfg.task_id, i))
        return
    from concurrent.futures import ProcessPoolExecutor
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(_gen_one, [(cfg, purpose, i) for i in range(count)],
                            chunksize=max(1, count // (threads * 4)))


def _gen_one(args):
    cfg, purpose, i = args
    return generate_sample(cfg, sample_rng(cfg.seed, purpose, cfg.task_id, i))


def read_manifest(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            k, _, v = line.partition("=")
            out[k] = v
    return out


def load_dataset(path: str | Path) -> list[Sample]:
    """Read a dataset file back into samples, task ids from the manifest."""
    text = Path(path).read_text(encoding="utf-8")
    manifest = read_manifest(manifest_path(path))
    task_ids = [int(t) for t in manifest["task_ids"].split(",") if t]
    count = int(manifest["count_per_task"])

    samples = []
    blocks = [b for b in text.split("\n\n") if b.strip()]
    for i, block in enumerate(blocks):
        rule_lines, query_lines = [], []
        for line in block.splitlines():
            (query_lines if line.lstrip().startswith("?") else rule_lines).append(line)
        task_id = task_ids[i // count] if task_ids else 0
        samples.append(Sample(
            task_id,
            parse_program("\n".join(rule_lines)),
            tuple(parse_query_line(q) for q in query_lines),
        ))
    return samples


def strip_noise(sample: Sample) -> Program:
    """The context without rules whose predicates never reach the queries.

    Used by tests to confirm noise rules are semantically inert.
    """
    reachable = {q.query.predicate for q in sample.queries}
    changed = True
    while changed:
        changed = False
        for rule in sample.context.rules:
            if rule.head.predicate in reachable:
                for lit in rule.body:
                    if lit.atom.predicate not in reachable:
                        reachable.add(lit.atom.predicate)
                        changed = True
    kept = tuple(r for r in sample.context.rules if r.head.predicate in reachable)
    return Program(kept)
