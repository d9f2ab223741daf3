import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from tim.geoparse import (
    SpatialMention,
    TriggerLexicon,
    default_lexicon,
    detect_mentions,
    edit_distance,
    geocode_post,
    load_triggers,
    match_toponym,
    name_score,
)
from tim.ingest import Toponym, build_gazetteer, load_gazetteer

from conftest import FIXTURE, make_post
from oracles import naive_levenshtein


@pytest.fixture(scope="module")
def gazetteer():
    return build_gazetteer(load_gazetteer(FIXTURE / "gazetteer.csv"))


def mention(*tokens):
    return SpatialMention(tuple(tokens), (0, 1), ("ul",))


def test_edit_distance_examples():
    assert edit_distance("legnicka", "legnicka") == 0
    assert edit_distance("", "abc") == 3
    assert edit_distance("kasprowicza", "kasprowicz") == naive_levenshtein("kasprowicza", "kasprowicz") == 1


def test_edit_distance_code_points():
    assert edit_distance("żółć", "zolc") == 4
    assert edit_distance("😂a", "a") == 1


@pytest.mark.parametrize("a,b", [("kitten", "sitting"), ("flaw", "lawn"), ("legnickiej", "legnicka"), ("ulica", "ulicy")])
def test_edit_distance_against_naive(a, b):
    assert edit_distance(a, b) == naive_levenshtein(a, b)


def test_exhaustive_binary_alphabet_small():
    words = ["".join(p) for n in range(5) for p in itertools.product("ab", repeat=n)]
    for a in words:
        for b in words:
            assert edit_distance(a, b) == naive_levenshtein(a, b)


@settings(max_examples=300)
@given(st.text(max_size=12), st.text(max_size=12), st.text(max_size=12))
def test_metric_properties(a, b, c):
    d = edit_distance
    assert d(a, a) == 0
    assert d(a, b) == d(b, a)
    assert d(a, c) <= d(a, b) + d(b, c)
    assert (d(a, b) == 0) == (a == b)
    assert d(a, b) <= max(len(a), len(b))


def test_detect_single_mention():
    lex = TriggerLexicon.from_strings(["ul"])
    found = detect_mentions("Awaria na ul. Legnickiej", lex)
    assert len(found) == 1
    assert found[0].surface == ("legnickiej",)
    assert found[0].trigger == ("ul",)
    text = "Awaria na ul. Legnickiej"
    start, end = found[0].char_span
    assert text[start:end] == "Legnickiej"


def test_detect_no_trigger():
    assert detect_mentions("Tramwaje kursują normalnie", default_lexicon()) == []


def test_detect_intersection_span():
    text = "na skrzyżowaniu Legnicka / Milenijna"
    found = detect_mentions(text, TriggerLexicon.from_strings(["skrzyżowaniu"]))
    assert [m.surface for m in found] == [("legnicka", "milenijna")]
    start, end = found[0].char_span
    assert text[start:end] == "Legnicka / Milenijna"


def test_detect_respects_max_span():
    lex = TriggerLexicon.from_strings(["na"], max_span=2)
    found = detect_mentions("na Alfa Beta Gamma", lex)
    assert found[0].surface == ("alfa", "beta")


def test_detect_digit_tokens_are_candidates():
    found = detect_mentions("przy Pętli 33a", TriggerLexicon.from_strings(["przy"]))
    assert found[0].surface == ("pętli", "33a")


def test_overlapping_triggers_all_kept():
    lex = TriggerLexicon.from_strings(["na", "na placu"])
    found = detect_mentions("na placu Grunwaldzkim, na Rynku", lex)
    assert [m.trigger for m in found] == [("na", "placu"), ("na",)]
    lex = TriggerLexicon.from_strings(["przy", "przy ul"])
    found = detect_mentions("przy Ul. Legnickiej", lex)
    assert {m.surface for m in found} == {("ul", "legnickiej"), ("legnickiej",)}


def test_multiword_trigger_lexicon_file(tmp_path):
    path = tmp_path / "triggers.txt"
    path.write_text("# comment\nna wysokości\nul.\n", encoding="utf-8")
    lex = load_triggers(path)
    assert lex.triggers == (("na", "wysokości"), ("ul",))


def test_lexicon_validation():
    with pytest.raises(ValueError):
        TriggerLexicon(())
    with pytest.raises(ValueError):
        TriggerLexicon.from_strings(["..."])


def test_default_lexicon_contents():
    flat = {" ".join(t) for t in default_lexicon().triggers}
    assert flat == {"ul", "al", "pl", "na", "przy", "skrzyżowanie", "skrzyżowaniu", "pętla", "pętli"}
    assert default_lexicon().max_span == 4


def test_inflected_score_by_hand():
    # t=0: legnicka -> legnickiej is a->i plus two insertions: 3 / 10
    # t=1: legnick  -> legnickiej needs three insertions:      3 / 10
    # t=2: legnic   -> legnickiej needs four insertions:       4 / 10
    # t=3: legni    -> legnickiej needs five insertions:       5 / 10
    assert name_score("legnickiej", "legnicka") == pytest.approx(0.3, abs=0)


def test_match_identity(gazetteer):
    result = match_toponym(mention("legnicka"), gazetteer)
    assert result.toponym.name == "Legnicka"
    assert result.score == 0


def test_match_inflected(gazetteer):
    result = match_toponym(mention("legnickiej"), gazetteer, 0.3)
    assert result is not None
    assert result.toponym.name == "Legnicka"
    assert result.score <= 0.3


def test_match_garbage():
    gaz = build_gazetteer([Toponym("Legnicka", "street", 51.12, 16.99)])
    # best truncation still needs 5+ edits over at least 5 characters
    assert min(edit_distance("xyzqw", "legnicka"[:8 - t]) / max(5, 8 - t) for t in range(4)) > 0.3
    assert match_toponym(mention("xyzqw"), gaz, 0.3) is None


def test_tie_rule_prefers_stop_then_name():
    gaz = build_gazetteer([
        Toponym("Rynek", "street", 51.0, 17.0),
        Toponym("Rynek", "intersection", 51.1, 17.1),
        Toponym("Rynek", "stop", 51.2, 17.2),
    ])
    assert match_toponym(mention("rynek"), gaz).toponym.kind == "stop"
    gaz = build_gazetteer([Toponym("Abc", "street", 51.0, 17.0), Toponym("Abd", "street", 51.1, 17.1)])
    # "abx" is one substitution away from both
    assert match_toponym(mention("abx"), gaz, 0.5).toponym.name == "Abc"


def test_match_requires_gazetteer():
    with pytest.raises(ValueError):
        match_toponym(mention("a"), build_gazetteer([]))


@settings(max_examples=200, deadline=None)
@given(st.text(alphabet="abcdefghijklmnoprstuwyzłńśżć ", min_size=1, max_size=14),
       st.floats(min_value=0, max_value=1))
def test_match_never_exceeds_threshold(gazetteer, surface, threshold):
    result = match_toponym(mention(*surface.split() or ["a"]), gazetteer, threshold)
    if result is not None:
        assert result.score <= threshold


def test_geocode_post_street():
    gaz = build_gazetteer([Toponym("Legnicka", "street", 51.12, 16.99)])
    locs = geocode_post(make_post(text="Awaria na ul. Legnickiej"), gaz, default_lexicon())
    assert [(l.lat, l.lon, l.source_kind) for l in locs] == [(51.12, 16.99, "street")]
    assert locs[0].confidence == pytest.approx(0.7)


def test_geocode_post_without_mention(gazetteer):
    assert geocode_post(make_post(text="Tramwaje kursują normalnie"), gazetteer, default_lexicon()) == []


def test_geocode_two_streets(gazetteer):
    post = make_post(text="Awaria na ul. Powstańców Śląskich oraz na ul. Hallera.")
    names = [l.name for l in geocode_post(post, gazetteer, default_lexicon())]
    assert names == ["Powstańców Śląskich", "Hallera"]


def test_geocode_dedups_same_place(gazetteer):
    post = make_post(text="Awaria na ul. Legnickiej, objazd przez ul. Legnicką")
    assert len(geocode_post(post, gazetteer, default_lexicon())) == 1


def test_geocode_run_swallowing_next_sentence(gazetteer):
    post = make_post(text="Kolizja na ul. Ślężnej. Linie 9 i 17 kursują objazdem.")
    assert [l.name for l in geocode_post(post, gazetteer, default_lexicon())] == ["Ślężna"]


def test_geocode_stop_preferred_on_equal_score():
    gaz = build_gazetteer([Toponym("Kochanowskiego", "street", 51.0, 17.0),
                           Toponym("Kochanowskiego", "stop", 51.1, 17.1)])
    locs = geocode_post(make_post(text="Objazd przez ul. Kochanowskiego"), gaz, default_lexicon())
    assert [l.source_kind for l in locs] == ["stop"]


def test_geocode_within_bounding_box(gazetteer, data_dir):
    lo_lat, lo_lon, hi_lat, hi_lon = gazetteer.bounding_box()
    for item in json.loads((data_dir / "geoparse_posts.json").read_text(encoding="utf-8")):
        for loc in geocode_post(make_post(text=item["text"]), gazetteer, default_lexicon()):
            assert lo_lat <= loc.lat <= hi_lat and lo_lon <= loc.lon <= hi_lon


def test_geocode_deterministic(gazetteer, data_dir):
    items = json.loads((data_dir / "geoparse_posts.json").read_text(encoding="utf-8"))
    run = lambda: [geocode_post(make_post(text=i["text"]), gazetteer, default_lexicon()) for i in items]
    assert run() == run()
