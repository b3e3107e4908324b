import pytest

from slatepoet.errors import UnknownWordError
from slatepoet.vocabulary import (
    Mode,
    Vocabulary,
    WordTile,
    default_vocabulary,
    load_vocabulary,
)


def markers_for_all_modes():
    return [
        WordTile(f"mode_{m.value}", m.value, kind="mode-marker", mode=m) for m in Mode
    ]


def test_default_vocabulary_shape(vocab):
    assert len(vocab.word_tiles) == 175
    assert set(vocab.mode_markers) == set(Mode)


def test_default_vocabulary_covers_shipped_fixture_words(vocab):
    needed = (
        "brain problem see over here each bad judge secret life insidious their "
        "obscene picture is already across from a good few hate delicious body "
        "beautiful anxious heart do promise radiant world forest animal same cry "
        "beyond science slow broken heaven shine water thought until flower soft "
        "human dead deception memory machine filth eat"
    ).split()
    for word in needed:
        assert word in vocab, word


def test_attach_left_suffixes_present(vocab):
    assert vocab["s"].attach_left is True
    assert vocab["comma"].text == ","
    assert vocab["comma"].attach_left is True


def test_unknown_word_raises(vocab):
    with pytest.raises(UnknownWordError):
        vocab["not-a-tile"]
    assert vocab.get("not-a-tile") is None


def test_mode_of(vocab):
    assert vocab.mode_of("mode_analogy") is Mode.ANALOGY
    assert vocab.mode_of("human") is None


def test_vocabulary_requires_all_four_markers():
    tiles = [WordTile("human", "human")] + markers_for_all_modes()[:3]
    with pytest.raises(ValueError):
        Vocabulary(tiles)


def test_vocabulary_rejects_duplicate_ids():
    tiles = [WordTile("human", "human"), WordTile("human", "human")] + markers_for_all_modes()
    with pytest.raises(ValueError):
        Vocabulary(tiles)


def test_word_tile_validation():
    with pytest.raises(ValueError):
        WordTile("x", "")
    with pytest.raises(ValueError):
        WordTile("x", "x", kind="mode-marker")  # marker without a mode
    with pytest.raises(ValueError):
        WordTile("x", "x", kind="sticker")


def test_load_vocabulary_file(tmp_path):
    path = tmp_path / "vocab.jsonl"
    lines = [
        '{"word_id": "tiny", "text": "tiny", "attach_left": false, "kind": "word"}',
        '{"word_id": "ly", "text": "ly", "attach_left": true, "kind": "word"}',
        '{"word_id": "mode_interpret", "text": "interpret", "kind": "mode-marker", "mode": "interpret"}',
        '{"word_id": "mode_collaborate", "text": "collaborate", "kind": "mode-marker", "mode": "collaborate"}',
        '{"word_id": "mode_ideate", "text": "ideate", "kind": "mode-marker", "mode": "ideate"}',
        '{"word_id": "mode_analogy", "text": "analogy", "kind": "mode-marker", "mode": "analogy"}',
    ]
    path.write_text("\n".join(lines) + "\n")
    v = load_vocabulary(path)
    assert len(v.word_tiles) == 2
    assert v["ly"].attach_left is True


def test_default_vocabulary_is_cached():
    assert default_vocabulary() is default_vocabulary()
