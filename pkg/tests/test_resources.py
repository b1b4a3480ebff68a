import shutil
from pathlib import Path

import pytest

from dualemo.resources import (
    ResourceBundle, ResourceError, fixture_dir, load_fixture, load_resources, validate_resources,
)


def write_minimal(root: Path) -> Path:
    files = {
        "emotions.txt": "happy\nangry\n",
        "lexicon.tsv": "# emotion\tword\nhappy\tglad\nhappy\tjoyful\nangry\tmad\n",
        "intensity.tsv": "joyful\thappy\t0.6\n",
        "sentiment.tsv": "glad\tpos\nmad\tneg\t-2\n",
        "negation.txt": "not\nnever\t-0.5\n",
        "degree.tsv": "very\t2\n",
        "emoticons.tsv": ":)\thappy\n",
        "pronouns.tsv": "i\tfirst\nyou\tsecond\nthey\tthird\n",
    }
    for name, body in files.items():
        (root / name).write_text(body, encoding="utf-8")
    return root


def test_minimal_directory(tmp_path):
    b = load_resources(write_minimal(tmp_path), "en")
    assert b.d_e == 2
    assert b.emotions == ("happy", "angry")
    assert b.emotion_lexicon["happy"] == {"glad", "joyful"}
    assert b.intensity["joyful"]["happy"] == 0.6
    assert b.sentiment_scores == {"glad": 1.0, "mad": -2.0}
    assert b.negation_words == {"not": -1.0, "never": -0.5}
    assert b.categories == ()


def test_shipped_fixture_sizes():
    assert load_fixture("en").d_e == 8
    assert load_fixture("zh").d_e == 21
    assert len(load_fixture("en").categories) == 16
    assert len(load_fixture("zh").categories) == 8


def test_deterministic_load():
    assert load_fixture("en") == load_fixture("en")
    assert load_fixture("zh") != load_fixture("en")


def test_bundle_is_immutable():
    b = load_fixture("en")
    with pytest.raises(TypeError):
        b.degree_words["very"] = 5
    with pytest.raises(AttributeError):
        b.emotions = ()


def test_missing_negation_file(tmp_path):
    write_minimal(tmp_path)
    (tmp_path / "negation.txt").unlink()
    with pytest.raises(ResourceError, match="negation word list not found"):
        load_resources(tmp_path, "en")


@pytest.mark.parametrize("name, body, fragment", [
    ("emotions.txt", "happy\nhappy\n", "duplicate emotion"),
    ("intensity.tsv", "glad\tangry\t0.5\n", "absent from lexicon"),
    ("intensity.tsv", "joyful\thappy\t1.5\n", "outside"),
    ("lexicon.tsv", "happy\n", "tab-separated"),
    ("degree.tsv", "very\t0\n", "degree multiplier"),
    ("sentiment.tsv", "glad\tmaybe\n", "polarity"),
    ("emoticons.tsv", ":)\tgiddy\n", "emoticon class"),
])
def test_malformed_rows_name_file_and_line(tmp_path, name, body, fragment):
    write_minimal(tmp_path)
    (tmp_path / name).write_text("# header\n" + body, encoding="utf-8")
    with pytest.raises(ResourceError, match=fragment) as info:
        load_resources(tmp_path, "en")
    assert name in str(info.value)
    assert info.value.line is not None and info.value.line >= 2


def test_english_casefold(tmp_path):
    write_minimal(tmp_path)
    (tmp_path / "lexicon.tsv").write_text("happy\tGlad\nhappy\tjoyful\nangry\tmad\n", encoding="utf-8")
    assert "glad" in load_resources(tmp_path, "en").emotion_lexicon["happy"]


def test_validation_report():
    assert len(validate_resources(load_fixture("en"))) == 0
    bad = ResourceBundle.build("en", ["happy"], {"happy": {"glad"}}, intensity={"nope": {"happy": 0.5}})
    report = validate_resources(bad)
    assert len(report) == 1 and "nope" in report.violations[0]
    bad = ResourceBundle.build("en", ["happy"], {"happy": {"glad"}}, degree_words={"very": 0})
    assert len(validate_resources(bad)) == 1


def test_fixture_copy_loads(tmp_path):
    shutil.copytree(fixture_dir("zh"), tmp_path / "zh")
    assert load_resources(tmp_path / "zh", "zh") == load_fixture("zh")
