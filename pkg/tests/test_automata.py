"""
Büchi automata: labels, text and DOT formats, translation, products and emptiness
"""

import pytest

from automata.buchi import BuchiAutomaton, SymbolicLabel, Transition
from automata.emptiness import accepting_cycle_states, accepts_lasso, find_accepting_lasso, is_empty
from automata.product import product, unify_alphabets
from automata.translate import translate
from ltl.parser import parse
from ltl.semantics import LassoWord, Symbol, enumerate_lassos, eval_lasso
from tests.conftest import random_formula
from utils.validators import ValidationError

PATTERNS = [
    "a", "!a", "X a", "F a", "G a", "G F a", "F G a", "a U b", "!(a U b)",
    "G(a -> F b)", "G(a -> X b)", "F a & G !b", "(a U b) | G a", "X X a", "a <-> F b",
]

WORDS = list(enumerate_lassos(["a", "b"], 2, 2))


def label(text):
    return SymbolicLabel.parse(text)


def two_state_gf_a():
    """Accepts words with infinitely many a"""
    return BuchiAutomaton(
        ("a",), 2, {0}, {1},
        {Transition(0, label("!a"), 0), Transition(0, label("a"), 1),
         Transition(1, label("!a"), 0), Transition(1, label("a"), 1)},
    )


class TestSymbolicLabel:
    def test_parse_and_render(self):
        parsed = label("b & !a")
        assert parsed.must_true == {"b"}
        assert parsed.must_false == {"a"}
        assert parsed.render() == "!a & b"
        assert label("t").is_universal
        assert SymbolicLabel().render() == "t"

    def test_clash_rejected(self):
        with pytest.raises(ValidationError):
            SymbolicLabel(frozenset({"a"}), frozenset({"a"}))

    def test_conjoin(self):
        assert label("a").conjoin(label("!b")) == label("a & !b")
        assert label("a").conjoin(label("!a")) is None

    def test_matches_and_concretize(self):
        assert label("a & !b").matches(Symbol.of("a", "c"))
        assert not label("a & !b").matches(Symbol.of("a", "b"))
        assert label("a & !b").concretize() == Symbol.of("a")

    def test_bad_literal(self):
        with pytest.raises(ValidationError):
            label("a & 2b")


class TestBuchiAutomaton:
    def test_state_ids_validated(self):
        with pytest.raises(ValidationError):
            BuchiAutomaton(("a",), 1, {0}, {1}, set())

    def test_label_alphabet_validated(self):
        with pytest.raises(ValidationError):
            BuchiAutomaton(("a",), 1, {0}, {0}, {Transition(0, label("b"), 0)})

    def test_post_and_size(self):
        automaton = two_state_gf_a()
        assert automaton.post(0, Symbol.of("a")) == {1}
        assert automaton.post(1, Symbol()) == {0}
        assert automaton.size == (2, 4)
        assert automaton.describe() == "2 states, 4 transitions"

    def test_text_format(self):
        automaton = two_state_gf_a()
        text = automaton.to_text()
        assert text.splitlines()[:4] == ["aps: a", "states: 2", "initial: 0", "accepting: 1"]
        assert '0 "!a" 0' in text
        assert BuchiAutomaton.from_text("# comment\n" + text) == automaton

    def test_text_format_errors(self):
        with pytest.raises(ValidationError):
            BuchiAutomaton.from_text("aps: a\ninitial: 0\n")
        with pytest.raises(ValidationError):
            BuchiAutomaton.from_text("states: 1\nbogus line\n")

    def test_dot(self):
        dot = two_state_gf_a().to_dot("gfa")
        assert dot.startswith('digraph "gfa" {')
        assert "1 [shape=doublecircle];" in dot
        assert "init0 -> 0;" in dot
        assert '0 -> 1 [label="a"];' in dot
        assert dot.rstrip().endswith("}")

    def test_canonical_drops_unreachable_states(self):
        automaton = BuchiAutomaton(
            ("a",), 3, {2}, {0, 2},
            {Transition(2, label("a"), 2), Transition(0, label("t"), 1)},
        )
        canonical = automaton.canonical()
        assert canonical.num_states == 1
        assert canonical.initial == {0}
        assert canonical.accepting == {0}

    def test_with_alphabet(self):
        widened = two_state_gf_a().with_alphabet(["b"])
        assert widened.alphabet == ("a", "b")
        assert len(widened.symbols()) == 4


class TestTranslate:
    @pytest.mark.parametrize("text", PATTERNS)
    def test_agrees_with_lasso_semantics(self, text):
        f = parse(text)
        automaton = translate(f)
        for word in WORDS:
            assert accepts_lasso(automaton, word) == eval_lasso(f, word), (text, str(word))

    def test_random_formulas_agree(self, rng):
        words = list(enumerate_lassos(["a", "b"], 1, 2))
        for _ in range(15):
            f = random_formula(rng, ["a", "b"], 3)
            automaton = translate(f)
            for word in words:
                assert accepts_lasso(automaton, word) == eval_lasso(f, word), str(f)

    def test_constants(self):
        assert is_empty(translate(parse("false")))
        assert accepts_lasso(translate(parse("true")), LassoWord((), (Symbol(),)))

    def test_output_is_canonical(self):
        automaton = translate(parse("G F a"))
        assert automaton.initial == {0}
        assert automaton.alphabet == ("a",)
        assert automaton == automaton.canonical()


class TestEmptiness:
    def test_accepting_cycle_states(self):
        assert accepting_cycle_states(two_state_gf_a()) == {1}

    def test_accepts_lasso(self):
        automaton = two_state_gf_a()
        assert accepts_lasso(automaton, LassoWord((), (Symbol.of("a"), Symbol())))
        assert not accepts_lasso(automaton, LassoWord((Symbol.of("a"),), (Symbol(),)))

    def test_no_accepting_states(self):
        automaton = BuchiAutomaton(("a",), 1, {0}, set(), {Transition(0, label("t"), 0)})
        assert is_empty(automaton)
        assert find_accepting_lasso(automaton) is None

    def test_extracted_lasso_is_accepted(self, rng):
        for _ in range(20):
            f = random_formula(rng, ["a", "b", "c"], 3)
            automaton = translate(f)
            word = find_accepting_lasso(automaton)
            if word is None:
                assert is_empty(automaton)
                continue
            assert accepts_lasso(automaton, word)
            assert eval_lasso(f, word)

    def test_prefix_prefers_fewer_asserted_atoms(self):
        word = find_accepting_lasso(translate(parse("F a")))
        assert word.symbol_at(0) == Symbol()


class TestProduct:
    def test_unify_alphabets(self):
        left, right = unify_alphabets(translate(parse("G a")), translate(parse("F b")))
        assert left.alphabet == right.alphabet == ("a", "b")

    def test_intersection_language(self):
        assert is_empty(product(translate(parse("G a")), translate(parse("F !a"))))
        both = product(translate(parse("G a")), translate(parse("G F b")))
        word = find_accepting_lasso(both)
        assert word is not None
        assert eval_lasso(parse("G a & G F b"), word)

    def test_product_agrees_with_conjunction(self):
        left, right = parse("G F a"), parse("F G !b")
        both = product(translate(left), translate(right))
        for word in WORDS:
            expected = eval_lasso(left, word) and eval_lasso(right, word)
            assert accepts_lasso(both, word) == expected

    def test_product_with_true_keeps_language(self):
        automaton = translate(parse("G F a"))
        both = product(automaton, translate(parse("true")))
        for word in WORDS:
            assert accepts_lasso(both, word) == accepts_lasso(automaton, word)

    def test_product_accepts_common_word(self):
        both = product(translate(parse("F a")), translate(parse("F b")))
        assert accepts_lasso(both, LassoWord((), (Symbol.of("a", "b"),)))
