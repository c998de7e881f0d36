import json
import math

import pytest
from hypothesis import given, strategies as st

from rapid.data import (
    DatasetError,
    FeatureVector,
    PredicateAtom,
    PredicateVocabulary,
    cosine_similarity,
    featurize,
    parse_dataset,
    records_equivalent,
    serialize_dataset,
)

from conftest import make_record, record_line


class TestParseDataset:
    def test_single_record_transcription(self):
        ds = parse_dataset(
            '{"id":"img1","facts":[["object","truck"]],"num":{"truck":6},"label":"highway"}'
        )
        assert len(ds.records) == 1
        rec = ds.records[0]
        assert PredicateAtom("object", ("img1", "truck")) in rec.facts
        assert PredicateAtom("num", ("truck", 6.0)) in rec.facts
        assert rec.label == "highway"
        assert ds.labels == ("highway",)

    def test_empty_stream_rejected(self):
        with pytest.raises(DatasetError, match="empty dataset"):
            parse_dataset("")

    def test_duplicate_id_named(self):
        lines = [record_line("a", [["object", "x"]]), record_line("a", [["object", "y"]])]
        with pytest.raises(DatasetError, match="'a'"):
            parse_dataset("\n".join(lines))

    def test_malformed_line_reports_line_number(self):
        lines = [record_line("a", [["object", "x"]]), "{not json"]
        with pytest.raises(DatasetError, match="line 2"):
            parse_dataset("\n".join(lines))

    def test_unknown_predicate_rejected(self):
        with pytest.raises(DatasetError, match="unknown predicate"):
            parse_dataset(record_line("a", [["wibble", "x"]]))

    def test_arity_mismatch_rejected(self):
        with pytest.raises(DatasetError, match="expects"):
            parse_dataset(record_line("a", [["color", "x", "red", "extra"]]))

    def test_non_finite_number_rejected(self):
        with pytest.raises(DatasetError, match="non-finite"):
            parse_dataset('{"id":"a","facts":[],"num":{"truck":1e999}}')

    def test_extra_attr_registered(self):
        ds = parse_dataset('{"id":"a","facts":[],"extra":{"diameter":{"disk":11.0}}}')
        assert ds.vocabulary.has("diameter")
        assert ds.records[0].numeric_value("diameter", "disk") == 11.0

    def test_roundtrip_semantically_identical(self):
        lines = [
            record_line(
                "a",
                [["object", "truck#1"], ["object", "truck#2"], ["color", "truck#1", "red"]],
                num={"truck": 2},
                label="highway",
            ),
            record_line("b", [["object", "person"]], area={"person": 0.5}, label="downtown"),
        ]
        ds = parse_dataset("\n".join(lines))
        ds2 = parse_dataset(serialize_dataset(ds))
        assert len(ds2.records) == len(ds.records)
        for r1, r2 in zip(ds.records, ds2.records):
            assert records_equivalent(r1, r2)

    def test_serialization_deterministic(self):
        line = record_line("a", [["object", "x"], ["object", "y"]], num={"x": 3})
        ds = parse_dataset(line)
        assert serialize_dataset(ds) == serialize_dataset(parse_dataset(serialize_dataset(ds)))


class TestVocabulary:
    def test_json_roundtrip(self):
        vocab = PredicateVocabulary.from_json(
            json.dumps(
                {
                    "has_wing_color": {"arity": 2, "kinds": ["image", "symbol"]},
                    "people": {"arity": 2, "kinds": ["image", "object"], "alias_of": "person"},
                }
            )
        )
        assert vocab.kinds("has_wing_color") == ("image", "symbol")
        assert vocab.canonical_sort("people") == "person"
        again = PredicateVocabulary.from_json(vocab.to_json())
        assert again.entries["has_wing_color"] == ("image", "symbol")
        assert again.aliases == {"people": "person"}

    def test_unknown_kind_rejected(self):
        with pytest.raises(DatasetError, match="unknown kind"):
            PredicateVocabulary.from_json('{"p": {"arity": 1, "kinds": ["blob"]}}')

    def test_validate_atom(self):
        vocab = PredicateVocabulary.base()
        with pytest.raises(DatasetError):
            vocab.validate_atom(PredicateAtom("nope", ("a",)))
        with pytest.raises(DatasetError):
            vocab.validate_atom(PredicateAtom("object", ("a",)))


class TestFeaturize:
    def test_num_fact_wins(self):
        rec = make_record("r", [["object", "truck"]], num={"truck": 6})
        assert featurize(rec, ["truck", "person"]).counts == (6, 0)

    def test_no_facts_zero(self):
        rec = make_record("r")
        assert featurize(rec, ["car"]).counts == (0,)

    def test_two_instances_counted(self):
        # Derived by enumerating object facts: two distinct instance ids of
        # the same sort count as 2.
        rec = make_record("r", [["object", "car#1"], ["object", "car#2"]])
        assert featurize(rec, ["car"]).counts == (2,)

    def test_empty_dims_rejected(self):
        rec = make_record("r")
        with pytest.raises(ValueError):
            featurize(rec, [])

    @given(st.permutations([["object", "a"], ["object", "b#1"], ["object", "b#2"]]))
    def test_fact_order_irrelevant(self, facts):
        rec = make_record("r", facts)
        assert featurize(rec, ["a", "b"]).counts == (1, 2)


class TestCosineSimilarity:
    def test_identical_direction(self):
        v = FeatureVector(("a", "b"), (1, 0))
        assert cosine_similarity(v, v) == 1.0

    def test_orthogonal(self):
        a = FeatureVector(("a", "b"), (1, 0))
        b = FeatureVector(("a", "b"), (0, 1))
        assert cosine_similarity(a, b) == 0.0

    def test_hand_computed(self):
        # dot([3,4],[4,3]) / (5*5) = 24/25
        a = FeatureVector(("a", "b"), (3, 4))
        b = FeatureVector(("a", "b"), (4, 3))
        assert math.isclose(cosine_similarity(a, b), 24 / 25, rel_tol=0, abs_tol=1e-12)

    def test_zero_vector_scores_zero(self):
        a = FeatureVector(("a",), (0,))
        b = FeatureVector(("a",), (5,))
        assert cosine_similarity(a, b) == 0.0

    def test_dims_mismatch(self):
        with pytest.raises(ValueError):
            cosine_similarity(FeatureVector(("a",), (1,)), FeatureVector(("b",), (1,)))

    @given(
        st.lists(st.integers(min_value=0, max_value=9), min_size=3, max_size=3),
        st.lists(st.integers(min_value=0, max_value=9), min_size=3, max_size=3),
    )
    def test_symmetry_and_self_unit(self, xs, ys):
        dims = ("a", "b", "c")
        a, b = FeatureVector(dims, tuple(xs)), FeatureVector(dims, tuple(ys))
        assert cosine_similarity(a, b) == pytest.approx(cosine_similarity(b, a), abs=1e-12)
        if any(xs):
            assert cosine_similarity(a, a) == pytest.approx(1.0, abs=1e-12)
