import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grayscale.corpus import Dialogue, Utterance, enumerate_samples, parse_corpus, render_input
from grayscale.errors import ConfigurationError, InputError, SchemaError


def rec(d, spk, text, emo="joy"):
    return {"dialogue_id": d, "speaker": spk, "text": text, "emotion": emo}


def dialogue(*turns):
    return Dialogue("d", tuple(Utterance(s, t, g) for s, t, g in turns))


HI = dialogue(("A", "hi", 0), ("B", "hello", 1))


def test_parse_groups_by_dialogue(jsonl, toy_inventory):
    path = jsonl([rec("d1", "A", "hi"), rec("d2", "A", "x", "sad"), rec("d1", "B", "hello", "angry")])
    corpus = parse_corpus(path, toy_inventory)
    assert [d.dialogue_id for d in corpus] == ["d1", "d2"]
    assert [(u.speaker_id, u.text, u.gold) for u in corpus[0].turns] == [("A", "hi", 0), ("B", "hello", 3)]


def test_parse_unknown_emotion_names_line(jsonl, toy_inventory):
    path = jsonl([rec("d1", "A", "hi"), rec("d1", "B", "yo", "bliss")])
    with pytest.raises(SchemaError, match="bliss") as info:
        parse_corpus(path, toy_inventory)
    assert info.value.line == 2


@pytest.mark.parametrize(
    "bad",
    [rec("d1", "A", "   "), {"dialogue_id": "d1", "speaker": "A", "text": "hi"}, ["not", "an", "object"]],
)
def test_parse_schema_errors(jsonl, toy_inventory, bad):
    with pytest.raises(SchemaError):
        parse_corpus(jsonl([bad]), toy_inventory)


def test_parse_invalid_json(tmp_path, toy_inventory):
    path = tmp_path / "c.jsonl"
    path.write_text('{"dialogue_id": "d1",\n')
    with pytest.raises(SchemaError):
        parse_corpus(path, toy_inventory)


def test_parse_empty_file_warns(tmp_path, toy_inventory, caplog):
    path = tmp_path / "c.jsonl"
    path.write_text("")
    with caplog.at_level(logging.WARNING):
        assert parse_corpus(path, toy_inventory) == []
    assert "empty" in caplog.text


def test_parse_missing_file(toy_inventory):
    with pytest.raises(ConfigurationError):
        parse_corpus("/nonexistent.jsonl", toy_inventory)


def test_parse_normalizes_newlines(jsonl, toy_inventory):
    corpus = parse_corpus(jsonl([rec("d1", "A", "hi\nthere  you")]), toy_inventory)
    assert corpus[0].turns[0].text == "hi there you"


def test_render_past_context():
    s = render_input(HI, 1, future_turns=0, window=8)
    assert s.rendered == "<cls> <spk:0> hi <spk:1> hello"
    assert s.gold == 1 and s.sample_id == "d:1" and s.future_turns_used == 0


def test_render_future_truncated_at_dialogue_end():
    s = render_input(HI, 0, future_turns=2, window=8)
    assert s.rendered == "<cls> <spk:0> hi <spk:1> hello"
    assert s.future_turns_used == 1 and s.gold == 0


def test_render_first_turn():
    assert render_input(HI, 0).rendered == "<cls> <spk:0> hi"


def test_render_window_and_slots():
    d = dialogue(("B", "one", 0), ("A", "two", 0), ("B", "three", 0), ("C", "four", 0), ("A", "five", 0))
    assert render_input(d, 4, window=2).rendered == "<cls> <spk:2> four <spk:1> five"
    assert render_input(d, 1, future_turns=2, window=1).rendered == "<cls> <spk:1> two <spk:0> three <spk:2> four"


@pytest.mark.parametrize("kwargs", [{"t": 2}, {"t": -1}, {"t": 0, "window": 0}, {"t": 0, "future_turns": 1}])
def test_render_errors(kwargs):
    t = kwargs.pop("t")
    with pytest.raises(InputError):
        render_input(HI, t, **kwargs)


def test_enumerate_order_and_ids():
    d = dialogue(("A", "a", 0), ("B", "b", 1), ("A", "c", 2))
    samples = enumerate_samples([d])
    assert [s.sample_id for s in samples] == ["d:0", "d:1", "d:2"]
    assert enumerate_samples([]) == []


def test_enumerate_deterministic(toy_splits):
    assert enumerate_samples(toy_splits["train"]) == enumerate_samples(toy_splits["train"])
    assert len(enumerate_samples(toy_splits["train"])) == 40


turns_strategy = st.lists(
    st.tuples(st.sampled_from("ABC"), st.text("abcxyz", min_size=1, max_size=5)), min_size=1, max_size=8
)


@settings(max_examples=150, deadline=None)
@given(turns_strategy, st.data())
def test_causality(turns, data):
    d = dialogue(*[(s, t, 0) for s, t in turns])
    t = data.draw(st.integers(0, len(turns) - 1))
    future = data.draw(st.sampled_from([0, 2]))
    window = data.draw(st.integers(1, 10))
    before = render_input(d, t, future_turns=future, window=window)
    horizon = t + future
    mutated = [(s, (x + "zz") if j > horizon else x, 0) for j, (s, x) in enumerate(turns)]
    after = render_input(dialogue(*mutated), t, future_turns=future, window=window)
    assert before == after
    assert before.rendered.startswith("<cls>")


@settings(max_examples=100, deadline=None)
@given(turns_strategy)
def test_speaker_slots_follow_first_appearance(turns):
    d = dialogue(*[(s, t, 0) for s, t in turns])
    rendered = render_input(d, len(turns) - 1, window=len(turns)).rendered
    seen = []
    for s, _ in turns:
        if s not in seen:
            seen.append(s)
    tokens = [tok for tok in rendered.split() if tok.startswith("<spk:")]
    assert tokens == [f"<spk:{seen.index(s)}>" for s, _ in turns]
