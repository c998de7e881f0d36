import pytest

from rapid.data import PredicateVocabulary
from rapid.dsl import parse_rule, parse_ruleset, rulesets_equal
from rapid.learn import FeedbackConstraints
from rapid.oracle import (
    GoldSpec,
    apply_edit,
    constraints_from_edit,
    correct_labels,
    count_clause_differences,
    edit_rule,
)
from rapid.select import SelectionBatch


@pytest.fixture
def vocab():
    return PredicateVocabulary.base().with_sorts(["ACDR", "truck", "mountain", "rock"])


def gold_from(vocab, text, labels):
    rules = parse_ruleset(text, vocab)
    return GoldSpec(gold_rules=rules, gold_labels=labels)


def batch_of(ids):
    return SelectionBatch(ids=tuple(ids), scored={}, strategy="multi-criteria")


class TestCorrectLabels:
    @pytest.fixture
    def gold(self, vocab):
        return gold_from(
            vocab,
            "highway(X) :- object(X,truck).\ndowntown(X) :- !object(X,truck).",
            {"a": "highway", "b": "highway", "c": "downtown"},
        )

    def test_agreement_not_a_hit(self, gold):
        corrections, hits = correct_labels(batch_of(["a"]), {"a": "highway"}, gold)
        assert corrections == {"a": "highway"}
        assert hits == {"a": False}

    def test_disagreement_is_a_hit(self, gold):
        corrections, hits = correct_labels(batch_of(["a"]), {"a": "downtown"}, gold)
        assert corrections == {"a": "highway"}
        assert hits == {"a": True}

    def test_two_of_three_wrong(self, gold):
        decisions = {"a": "downtown", "b": "downtown", "c": "downtown"}
        corrections, hits = correct_labels(batch_of(["a", "b", "c"]), decisions, gold)
        assert sum(hits.values()) == 2
        assert sum(hits.values()) / len(hits) == pytest.approx(2 / 3)
        assert corrections["c"] == "downtown"

    def test_missing_gold_label_rejected(self, gold):
        with pytest.raises(KeyError):
            correct_labels(batch_of(["zz"]), {"zz": "highway"}, gold)

    def test_never_changes_correct_label(self, gold):
        decisions = {"a": "highway", "c": "downtown"}
        corrections, hits = correct_labels(batch_of(["a", "c"]), decisions, gold)
        assert corrections == decisions
        assert not any(hits.values())


class TestEditRule:
    def test_threshold_replacement(self, vocab):
        # First-iteration style rule with a bad cut is replaced by the
        # curated clause at index 0.
        current = parse_ruleset(
            "normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.17).\n"
            "glaucoma(X) :- ACDR(X,A), area(A,N), greater(N,0.62).",
            vocab,
        )
        gold = gold_from(
            vocab,
            "normal(X) :- ACDR(X,A), area(A,N), smaller(N,0.31).\n"
            "glaucoma(X) :- ACDR(X,A), area(A,N), greater(N,0.31).",
            {},
        )
        edit = edit_rule(current, gold)
        assert edit.label == "normal"
        assert edit.clause_index == 0
        assert "smaller" in str(edit.new_clause)
        assert edit.new_clause.atoms[2].args[1] == 0.31
        assert edit.replaced is not None

    def test_fixpoint_returns_none(self, vocab):
        text = "highway(X) :- object(X,truck).\ndowntown(X) :- !object(X,truck)."
        current = parse_ruleset(text, vocab)
        gold = gold_from(vocab, text, {})
        assert edit_rule(current, gold) is None

    def test_one_clause_per_iteration(self, vocab):
        current = parse_ruleset(
            "m(X) :- object(X,mountain).\nh(X) :- object(X,truck).", vocab
        )
        gold = gold_from(
            vocab,
            "m(X) :- object(X,mountain) ; object(X,rock) ; object(X,ACDR).\n"
            "h(X) :- object(X,truck).",
            {},
        )
        edit = edit_rule(current, gold)
        assert edit.label == "m"
        assert edit.clause_index == 1  # appended, exactly one clause
        assert edit.replaced is None
        after = apply_edit(current, edit)
        assert len(after.get("m").clauses) == 2

    def test_label_scan_order_is_ruleset_order(self, vocab):
        current = parse_ruleset(
            "b(X) :- object(X,truck).\na(X) :- object(X,mountain).", vocab
        )
        gold = gold_from(
            vocab,
            "b(X) :- object(X,rock).\na(X) :- object(X,rock).",
            {},
        )
        assert edit_rule(current, gold).label == "b"

    def test_missing_gold_label_rejected(self, vocab):
        current = parse_ruleset("b(X) :- object(X,truck).\nz(X) :- object(X,rock).", vocab)
        gold = gold_from(vocab, "b(X) :- object(X,truck).\nc(X) :- object(X,rock).", {})
        with pytest.raises(ValueError):
            edit_rule(current, gold)


class TestEditConvergence:
    def test_reaches_gold_in_exact_difference_count(self, vocab):
        current = parse_ruleset(
            "m(X) :- object(X,truck).\n"
            "h(X) :- object(X,rock) ; object(X,mountain).",
            vocab,
        )
        gold_rules = parse_ruleset(
            "m(X) :- object(X,mountain) ; object(X,rock).\n"
            "h(X) :- object(X,truck) ; object(X,mountain) ; object(X,ACDR).",
            vocab,
        )
        gold = GoldSpec(gold_rules=gold_rules, gold_labels={})
        expected = count_clause_differences(current, gold_rules)
        assert expected == 4  # m: replace 1, append 1; h: replace 1, append 1
        steps = 0
        rules = current
        while True:
            edit = edit_rule(rules, gold)
            if edit is None:
                break
            rules = apply_edit(rules, edit)
            steps += 1
            assert steps <= expected
        assert steps == expected
        assert rulesets_equal(rules, gold_rules)
        for _ in range(3):
            assert edit_rule(rules, gold) is None


class TestConstraints:
    def test_replacement_yields_include_and_exclude(self, vocab):
        current = parse_ruleset("m(X) :- object(X,truck).\nh(X) :- object(X,rock).", vocab)
        gold = gold_from(vocab, "m(X) :- object(X,mountain).\nh(X) :- object(X,rock).", {})
        edit = edit_rule(current, gold)
        constraints = constraints_from_edit(FeedbackConstraints(), edit)
        assert len(constraints.include) == 1
        assert len(constraints.exclude) == 1
        assert constraints.include[0][0] == "m"

    def test_append_yields_include_only(self, vocab):
        current = parse_ruleset("m(X) :- object(X,truck).\nh(X) :- object(X,rock).", vocab)
        gold = gold_from(
            vocab, "m(X) :- object(X,truck) ; object(X,mountain).\nh(X) :- object(X,rock).", {}
        )
        constraints = constraints_from_edit(FeedbackConstraints(), edit_rule(current, gold))
        assert len(constraints.include) == 1
        assert len(constraints.exclude) == 0

    def test_include_exclude_disjoint_enforced(self, vocab):
        clause = parse_rule("m(X) :- object(X,truck).", vocab).clauses[0]
        with pytest.raises(ValueError):
            FeedbackConstraints(include=(("m", clause),), exclude=(("m", clause),))


class TestGoldAudit:
    def test_audit_fraction(self, vocab):
        from conftest import make_record

        gold = gold_from(
            vocab,
            "highway(X) :- object(X,truck).\ndowntown(X) :- !object(X,truck).",
            {"a": "highway", "b": "downtown"},
        )
        good = make_record("a", [["object", "truck"]], vocab=vocab)
        bad = make_record("b", [["object", "truck"]], vocab=vocab)  # violates downtown
        assert gold.audit([good], vocab) == 1.0
        assert gold.audit([good, bad], vocab) == 0.5
