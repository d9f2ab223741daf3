# Find street and stop mentions in notices and resolve them to coordinates.
"""
Uses the bundled 50-entry gazetteer.  Inflected forms such as "Legnickiej"
resolve to "Legnicka" because the gazetteer name may shed a few trailing
characters before the edit distance is taken.

    python3 demos/02_geoparse.py
"""

from importlib import resources
from pathlib import Path

from tim.geoparse import default_lexicon, detect_mentions, geocode_text, name_score
from tim.ingest import build_gazetteer, load_gazetteer

fixture = Path(str(resources.files("tim").joinpath("data/fixture")))
gaz = build_gazetteer(load_gazetteer(fixture / "gazetteer.csv"))
lexicon = default_lexicon()
print(f"gazetteer: {len(gaz)} entries, bounding box {gaz.bounding_box()}")

print("\nscore of an inflected mention against its base name:")
for mention, entry in [("legnickiej", "legnicka"), ("placu grunwaldzkim", "plac grunwaldzki"),
                       ("rynku", "rynek"), ("dworcu głównym", "dworzec główny")]:
    print(f"  {mention!r:22} vs {entry!r:20} {name_score(mention, entry):.3f}")

texts = [
    "Awaria zwrotnicy na ul. Legnickiej. Tramwaje linii 3, 10 i 20 kursują objazdem.",
    "Kolizja na skrzyżowaniu Legnicka / Milenijna, tramwaje linii 3 i 10 stoją.",
    "Zatrzymany ruch przy Dworcu Głównym, linie 2 i 8 kursują objazdem.",
    "Opóźnienia na Rynku.",
]
for text in texts:
    print(f"\n{text}")
    for m in detect_mentions(text, lexicon):
        print(f"  mention after {' '.join(m.trigger)!r}: {' '.join(m.surface)!r}")
    for r in geocode_text(text, gaz, lexicon):
        t = r.toponym
        print(f"  -> {t.name} ({t.kind}) at {t.lat:.4f}, {t.lon:.4f}, score {r.score:.3f}")
