import json

import pytest

from rapid.data import PredicateVocabulary, parse_dataset


@pytest.fixture
def traffic_vocab():
    return (
        PredicateVocabulary.base()
        .with_sorts(["truck", "person", "building", "mountain", "rock", "road", "car"])
        .with_aliases({"people": "person"})
    )


def record_line(rid, facts=(), num=None, area=None, extra=None, label=None):
    obj = {"id": rid, "facts": [list(f) for f in facts]}
    if num:
        obj["num"] = num
    if area:
        obj["area"] = area
    if extra:
        obj["extra"] = extra
    if label:
        obj["label"] = label
    return json.dumps(obj)


def make_record(rid, facts=(), num=None, area=None, extra=None, label=None, vocab=None):
    ds = parse_dataset(record_line(rid, facts, num, area, extra, label), vocab)
    return ds.records[0]


def make_dataset(lines, vocab=None):
    return parse_dataset("\n".join(lines), vocab)
