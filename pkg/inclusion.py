"""
Rule compliance by language inclusion, counterexamples and divergence paths
"""

import logging
import time
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple

from automata.buchi import BuchiAutomaton
from automata.emptiness import accepts_lasso, find_accepting_lasso
from automata.product import product, unify_alphabets
from automata.simulation import prune_with_simulation
from automata.translate import translate
from ltl.formula import TRUE, And, Formula, atomic_propositions, negate, render, to_nnf
from ltl.semantics import LassoWord, Symbol, eval_lasso
from models import (
    DivergencePath, DivergenceStep, InclusionStats, InclusionVerdict, Rule, RuleCheck,
    RuleSet, VerdictStatus,
)
from utils.helpers import format_ms
from utils.validators import InclusionEngineError, SafeLTLError

logger = logging.getLogger(__name__)

DIVERGENCE_BEYOND_REACH = "divergence beyond product reachability"


def validate_counterexample(phi: Formula, psi: Formula, word: LassoWord) -> bool:
    """Word satisfies phi and violates psi"""
    return eval_lasso(phi, word) and not eval_lasso(psi, word)


def relevant_atoms(phi: Formula, psi: Formula, word: LassoWord) -> Tuple[str, ...]:
    """
    Atoms of phi and psi the counterexample depends on. An atom counts when
    fixing it false everywhere, true everywhere, or flipping it at a single
    position stops the word from separating phi and psi.
    """
    symbols = word.symbols

    def separates(changed: List[Symbol]) -> bool:
        candidate = LassoWord(tuple(changed[:word.loop_start]), tuple(changed[word.loop_start:]))
        return validate_counterexample(phi, psi, candidate)

    def matters(ap: str) -> bool:
        variants = [[s.with_atom(ap, False) for s in symbols], [s.with_atom(ap, True) for s in symbols]]
        for index, symbol in enumerate(symbols):
            flipped = list(symbols)
            flipped[index] = symbol.with_atom(ap, not symbol.holds(ap))
            variants.append(flipped)
        return not all(separates(v) for v in variants)

    aps = sorted(set(atomic_propositions(phi)) | set(atomic_propositions(psi)))
    return tuple(ap for ap in aps if matters(ap))


def minimize_counterexample(phi: Formula, psi: Formula, word: LassoWord) -> LassoWord:
    """Greedily drop leading prefix symbols and halve the loop while the word still validates"""
    first = word.symbol_at(0).true_set

    def acceptable(candidate: LassoWord) -> bool:
        return (candidate.symbol_at(0).true_set <= first
                and validate_counterexample(phi, psi, candidate))

    changed = True
    while changed:
        changed = False
        while word.prefix:
            candidate = LassoWord(word.prefix[1:], word.loop)
            if not acceptable(candidate):
                break
            word = candidate
            changed = True
        loop_len = len(word.loop)
        if loop_len > 1:
            candidate = LassoWord(word.prefix, word.loop[:loop_len // 2])
            if acceptable(candidate):
                word = candidate
                changed = True
    return word


def extract_divergence_path(a1: BuchiAutomaton, a2: BuchiAutomaton,
                            maxdepth: Optional[int] = None,
                            stats: Optional[InclusionStats] = None) -> Optional[DivergencePath]:
    """BFS over state pairs for a symbol enabled in a1 and disabled in a2"""
    a1, a2 = unify_alphabets(a1, a2)
    if stats is None:
        stats = InclusionStats()
    if maxdepth is None:
        maxdepth = a1.num_states * a2.num_states
    symbols = a1.symbols()
    post1: Dict[Tuple[int, int], frozenset] = {}
    post2: Dict[Tuple[int, int], frozenset] = {}

    def successors(automaton, cache, state, index):
        key = (state, index)
        if key not in cache:
            cache[key] = automaton.post(state, symbols[index])
        return cache[key]

    parent: Dict[Tuple[int, int], Optional[Tuple[Tuple[int, int], int]]] = {}
    depth: Dict[Tuple[int, int], int] = {}
    queue = deque()
    for p in sorted(a1.initial):
        for q in sorted(a2.initial):
            parent[(p, q)] = None
            depth[(p, q)] = 0
            queue.append((p, q))

    found = None
    while queue and found is None:
        pair = queue.popleft()
        p, q = pair
        stats.expanded_pairs += 1
        for index in range(len(symbols)):
            stats.symbol_comparisons += 1
            next1 = successors(a1, post1, p, index)
            next2 = successors(a2, post2, q, index)
            if next1 and not next2:
                found = (pair, index)
                break
            if depth[pair] >= maxdepth:
                continue
            for p2 in sorted(next1):
                for q2 in sorted(next2):
                    if (p2, q2) not in parent:
                        parent[(p2, q2)] = (pair, index)
                        depth[(p2, q2)] = depth[pair] + 1
                        queue.append((p2, q2))

    # Complexity bound on the search
    n1, n2, m = a1.num_states, a2.num_states, len(symbols)
    if stats.expanded_pairs > n1 * n2 or stats.symbol_comparisons > n1 * n2 * m:
        raise InclusionEngineError(
            f"Divergence search exceeded its bound: {stats.expanded_pairs} pairs, "
            f"{stats.symbol_comparisons} comparisons for {n1}x{n2} states, {m} symbols")

    if found is None:
        return None

    terminal, failing_index = found
    steps: List[DivergenceStep] = []
    link = parent[terminal]
    while link is not None:
        previous, index = link
        steps.append(DivergenceStep(previous, symbols[index]))
        link = parent[previous]
    steps.reverse()
    return DivergencePath(tuple(steps), terminal, symbols[failing_index])


def check_inclusion(phi: Formula, psi: Formula, minimize: bool = True,
                    prune: bool = False, maxdepth: Optional[int] = None) -> InclusionVerdict:
    """Decide whether every word satisfying phi satisfies psi"""
    start = time.perf_counter()
    stats = InclusionStats()

    a_phi = translate(phi)
    a_psi = translate(psi)
    a_neg = translate(to_nnf(negate(psi)))
    if prune:
        a_phi, a_neg = prune_with_simulation(a_phi), prune_with_simulation(a_neg)

    witness = find_accepting_lasso(product(a_phi, a_neg))
    alphabet = tuple(sorted(set(a_phi.alphabet) | set(a_psi.alphabet)))

    if witness is None:
        stats.elapsed_ms = (time.perf_counter() - start) * 1000
        logger.info("Included: %s within %s", render(phi), render(psi))
        return InclusionVerdict(VerdictStatus.INCLUDED, stats=stats, alphabet=alphabet)

    _assert_witness(a_phi, a_psi, witness)
    if minimize:
        witness = minimize_counterexample(phi, psi, witness)
        _assert_witness(a_phi, a_psi, witness)
    elif not validate_counterexample(phi, psi, witness):
        raise InclusionEngineError(
            f"Counterexample {witness} does not separate {render(phi)} from {render(psi)}")

    unified_phi, unified_psi = unify_alphabets(a_phi, a_psi)
    divergence = extract_divergence_path(
        unified_phi, unified_psi,
        maxdepth if maxdepth is not None else unified_phi.num_states * unified_psi.num_states,
        stats)
    note = None if divergence is not None else DIVERGENCE_BEYOND_REACH

    stats.elapsed_ms = (time.perf_counter() - start) * 1000
    verdict = InclusionVerdict(VerdictStatus.NOT_INCLUDED, witness, divergence, stats, alphabet, note,
                               relevant_atoms(phi, psi, witness))
    logger.info("Not included: %s within %s, counterexample %s",
                render(phi), render(psi), verdict.render_counterexample())
    return verdict


def _assert_witness(a_phi: BuchiAutomaton, a_psi: BuchiAutomaton, word: LassoWord):
    if not accepts_lasso(a_phi, word) or accepts_lasso(a_psi, word):
        raise InclusionEngineError(f"Counterexample {word} fails the automaton witness check")


def _check_rule(phi: Formula, rule: Rule, minimize: bool, prune: bool) -> RuleCheck:
    try:
        return RuleCheck(rule.name, check_inclusion(phi, rule.formula, minimize=minimize, prune=prune))
    except SafeLTLError as e:
        logger.error("Inclusion check against rule %s failed: %s", rule.name, e)
        return RuleCheck(rule.name, error=str(e))
    except Exception as e:
        # Anything else escaping the engine (graph library, broken invariant) is an engine failure
        error = InclusionEngineError(f"{type(e).__name__}: {e}")
        logger.exception("Inclusion engine crashed on rule %s", rule.name)
        return RuleCheck(rule.name, error=str(error))


def check_against_rules(phi: Formula, rules: RuleSet, parallel: bool = False,
                        minimize: bool = True, prune: bool = False) -> List[RuleCheck]:
    """One check per rule in priority order; the first failure is the repair target"""
    if parallel and len(rules) > 1:
        with ThreadPoolExecutor(max_workers=len(rules)) as executor:
            futures = [executor.submit(_check_rule, phi, rule, minimize, prune) for rule in rules]
            checks = [f.result() for f in futures]
    else:
        checks = [_check_rule(phi, rule, minimize, prune) for rule in rules]

    for index, check in enumerate(checks):
        if check.failed:
            checks[index] = RuleCheck(check.rule_name, check.verdict, check.error, True)
            break
    return checks


def check_conjunction(phi: Formula, rules: RuleSet, minimize: bool = True) -> InclusionVerdict:
    """Check phi against the conjunction of every rule at once"""
    combined: Formula = TRUE
    for rule in rules:
        combined = rule.formula if combined == TRUE else And(combined, rule.formula)
    return check_inclusion(phi, combined, minimize=minimize)


def render_counterexample_report(verdict: InclusionVerdict, a1: BuchiAutomaton,
                                 a2: BuchiAutomaton) -> str:
    """Checker output handed to the critic"""
    if verdict.is_included:
        raise ValueError("Counterexample report requires a not-included verdict")

    lines = [
        f"Input automaton: {a1.num_states} states, {len(a1.transitions)} transitions",
        f"Comparison automaton: {a2.num_states} states, {len(a2.transitions)} transitions",
        f"Counterexample: {verdict.render_counterexample()}",
    ]
    if verdict.divergence is not None:
        lines.append(f"Divergence: {verdict.divergence.render(verdict.alphabet)}")
    elif verdict.divergence_note:
        lines.append(f"Divergence: {verdict.divergence_note}")
    lines.append("Not included.")
    lines.append(f"Time used (ms): {format_ms(verdict.stats.elapsed_ms)}")
    return "\n".join(lines) + "\n"

