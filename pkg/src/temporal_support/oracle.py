"""Exhaustive reference implementations, used to cross-check the engines.

Everything here transcribes the definitions directly: enumerate every
candidate, filter by the defining conditions.  Guards keep inputs at desk
scale.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

from .catalog import EventTuple, NormalizedToI
from .constraints import eco_satisfies, tuple_temporally_satisfies
from .errors import OracleGuardError, UsageError
from .regexp import (Alternation, Automaton, Concatenation, Epsilon, Option,
                     Plus, Star, Symbol, compile_re, enumerate_strings,
                     parse_re)
from .sequences import (EcoList, MatchContext, SatisfyingListSet,
                        SequentialExpression, SupportResult, is_t_ordered)
from .timecore import contains

MAX_ECOS = 10
MAX_LENGTH = 4
MAX_EVENTS = 8


def brute_satisfying_lists(se: SequentialExpression,
                           ctx: MatchContext) -> SatisfyingListSet:
    ecos = ctx.ecos
    if len(ecos) > MAX_ECOS or len(se) > MAX_LENGTH:
        raise OracleGuardError(
            f"brute force limited to {MAX_ECOS} ECOs and length {MAX_LENGTH}")
    # satisfaction depends only on (position, eco): evaluate once per pair
    ok = [[c.attributes() <= {e.schema.id_attribute, *e.schema.attributes}
           and eco_satisfies(e, c, ctx.registry, ctx.granularity, now=ctx.now)
           for e in ecos] for c in se]
    lists = []
    for combo in itertools.product(range(len(ecos)), repeat=len(se)):
        if all(ok[i][j] for i, j in enumerate(combo)):
            chosen = [ecos[j] for j in combo]
            if is_t_ordered(chosen, ctx.now):
                lists.append(EcoList.of(chosen))
    return SatisfyingListSet(se, tuple(lists))


def brute_match(events: Sequence[EventTuple], se: SequentialExpression,
                ctx: MatchContext, kind: str,
                lists: SatisfyingListSet | None = None) -> bool:
    if len(events) > MAX_EVENTS:
        raise OracleGuardError(f"brute force limited to {MAX_EVENTS} events")
    if kind not in ("temporal", "total"):
        raise UsageError(f"unknown match kind {kind!r}")
    if lists is None:
        lists = brute_satisfying_lists(se, ctx)
    events = sorted(events, key=lambda ev: ev.t)
    k = len(se)
    for tuples in itertools.combinations(events, k):
        if any(a.t >= b.t for a, b in zip(tuples, tuples[1:])):
            continue
        for lst in lists:
            if not all(contains(e.interval, mu.t, ctx.now)
                       for mu, e in zip(tuples, lst)):
                continue
            if kind == "temporal":
                return True
            if all(mu.id == e.id for mu, e in zip(tuples, lst)) and all(
                    tuple_temporally_satisfies(mu, c, ctx.registry)
                    for mu, c in zip(tuples, se)):
                return True
    return False


def brute_re_support(re, ntoi: NormalizedToI, ctx: MatchContext) -> SupportResult:
    """Enumerate every accepted string up to each object's length and apply
    the SE definitions to each."""
    if isinstance(re, str):
        re = parse_re(re, ctx.registry)
    a = re if isinstance(re, Automaton) else compile_re(re)
    list_cache: dict[SequentialExpression, SatisfyingListSet] = {}
    total = temporal = 0
    for oid in ntoi.objects:
        events = ntoi.events(oid)
        if not events:
            continue
        strings = sorted(enumerate_strings(a, len(events)), key=len)
        is_temporal = is_total = False
        for se in strings:
            if se not in list_cache:
                list_cache[se] = brute_satisfying_lists(se, ctx)
            lists = list_cache[se]
            if not is_temporal and brute_match(events, se, ctx, "temporal", lists):
                is_temporal = True
            if not is_total and brute_match(events, se, ctx, "total", lists):
                is_total = True
            if is_temporal and is_total:
                break
        temporal += is_temporal
        total += is_total
    return SupportResult(total, temporal)


def brute_se_support(se: SequentialExpression, ntoi: NormalizedToI,
                     ctx: MatchContext) -> SupportResult:
    lists = brute_satisfying_lists(se, ctx)
    temporal = total = 0
    for oid in ntoi.objects:
        events = ntoi.events(oid)
        temporal += brute_match(events, se, ctx, "temporal", lists)
        total += brute_match(events, se, ctx, "total", lists)
    return SupportResult(total, temporal)


@lru_cache(maxsize=None)
def ast_accepts(node, word: tuple) -> bool:
    """Language membership straight from the syntax tree, by trying every
    split of the word."""
    if isinstance(node, Epsilon):
        return word == ()
    if isinstance(node, Symbol):
        return word == (node.constraint,)
    if isinstance(node, Alternation):
        return ast_accepts(node.left, word) or ast_accepts(node.right, word)
    if isinstance(node, Concatenation):
        return any(ast_accepts(node.left, word[:i]) and ast_accepts(node.right, word[i:])
                   for i in range(len(word) + 1))
    if isinstance(node, Option):
        return word == () or ast_accepts(node.child, word)
    if isinstance(node, Star):
        # non-empty first chunk so the recursion shrinks the word
        return word == () or any(
            ast_accepts(node.child, word[:i]) and ast_accepts(node, word[i:])
            for i in range(1, len(word) + 1))
    if isinstance(node, Plus):
        return any(ast_accepts(node.child, word[:i]) and ast_accepts(Star(node.child), word[i:])
                   for i in range(len(word) + 1))
    raise TypeError(f"not a regular-expression node: {node!r}")
