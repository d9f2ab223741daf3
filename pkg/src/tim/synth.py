"""Synthetic corpora in the style of operator disruption notices.

The real annotated posts are not available, so tests, demos and the bundled
fixture use template-generated text.  Each incident class has its own set of
templates; slots are filled with inflected street and stop names and with
line numbers, which mirrors how operator posts reuse a fixed phrasing per
kind of event.
"""

import random
from datetime import datetime, timedelta, timezone

from tim.classifier import INCIDENT_LABELS, NON_DISRUPTION_LABELS, LabeledDoc

# (nominative as in the gazetteer, locative/genitive as used after "na ul.")
STREETS = [
    ("Legnicka", "Legnickiej"),
    ("Grabiszyńska", "Grabiszyńskiej"),
    ("Powstańców Śląskich", "Powstańców Śląskich"),
    ("Kazimierza Wielkiego", "Kazimierza Wielkiego"),
    ("Traugutta", "Traugutta"),
    ("Jedności Narodowej", "Jedności Narodowej"),
    ("Borowska", "Borowskiej"),
    ("Krakowska", "Krakowskiej"),
    ("Hallera", "Hallera"),
    ("Kasprowicza", "Kasprowicza"),
    ("Pomorska", "Pomorskiej"),
    ("Piłsudskiego", "Piłsudskiego"),
    ("Świdnicka", "Świdnickiej"),
    ("Kościuszki", "Kościuszki"),
    ("Strzegomska", "Strzegomskiej"),
    ("Żmigrodzka", "Żmigrodzkiej"),
]
STOPS = [
    ("Plac Grunwaldzki", "Placu Grunwaldzkim"),
    ("Rynek", "Rynku"),
    ("Dworzec Główny", "Dworcu Głównym"),
    ("Galeria Dominikańska", "Galerii Dominikańskiej"),
    ("Pl. Jana Pawła II", "Placu Jana Pawła II"),
    ("Leśnica", "Leśnicy"),
    ("Sępolno", "Sępolnie"),
    ("Biskupin", "Biskupinie"),
]
TRAM_LINES = ["0L", "0P", "1", "2", "3", "4", "5", "6", "7", "8", "9", "10", "11",
              "15", "16", "17", "20", "23", "31", "33"]
BUS_LINES = ["100", "103", "106", "110", "113", "114", "125", "126", "133", "142",
             "145", "146", "149", "250"]

INCIDENT_TEMPLATES = {
    "accident": [
        "Kolizja samochodu osobowego z tramwajem na ul. {street}. Tramwaje linii {line} kursują objazdem.",
        "Wypadek drogowy na ul. {street}, zderzenie pojazdów blokuje torowisko linii {line}.",
        "Po kolizji na skrzyżowaniu ul. {street} zablokowany przejazd dla linii {line} i {line2}.",
        "Samochód wjechał w autobus linii {line} przy ul. {street}. Trwa usuwanie skutków zderzenia.",
    ],
    "event": [
        "W związku z meczem na stadionie od godz. {hour} linie {line} i {line2} pojadą zmienioną trasą.",
        "Maraton w niedzielę: zamknięta ul. {street}, autobusy linii {line} kursują według specjalnego rozkładu.",
        "Z okazji święta obowiązuje świąteczny rozkład jazdy dla linii {line}.",
        "Koncert plenerowy na {stop_loc}: od godz. {hour} zmiany tras linii {line} i {line2}.",
    ],
    "fix": [
        "Przywrócono ruch tramwajowy na ul. {street}. Linie {line} i {line2} wracają na swoje stałe trasy.",
        "Koniec utrudnień na ul. {street}, tramwaje linii {line} kursują już normalnie.",
        "Usunięto przyczynę utrudnień przy {stop_loc}, komunikacja przywrócona dla linii {line}.",
        "Ruch został wznowiony na ul. {street}, linia {line} wraca na podstawową trasę.",
    ],
    "incident": [
        "Interwencja policji na ul. {street}, tramwaje linii {line} stoją w zatorze.",
        "Akcja straży pożarnej przy ul. {street}. Wstrzymany ruch linii {line} i {line2}.",
        "Pasażer potrzebował pomocy medycznej w tramwaju linii {line} na {stop_loc}. Pogotowie na miejscu.",
        "Agresywny pasażer w autobusie linii {line} przy ul. {street}, interweniuje policja.",
    ],
    "malfunction": [
        "Awaria zwrotnicy na ul. {street}. Tramwaje linii {line} i {line2} kursują objazdem.",
        "Awaria sieci trakcyjnej przy ul. {street}, brak zasilania, linia {line} zawieszona.",
        "Zepsuty pantograf w tramwaju linii {line} na {stop_loc}, awaria pojazdu blokuje torowisko.",
        "Wykolejenie tramwaju linii {line} na ul. {street}. Awaria torowiska, uruchomiono komunikację zastępczą.",
    ],
    "renovation": [
        "Od poniedziałku remont torowiska na ul. {street}, linie {line} i {line2} skierowane objazdem do odwołania.",
        "Planowana przebudowa przystanku {stop}: przez dwa tygodnie linia {line} ominie przystanek.",
        "W weekend prace modernizacyjne na ul. {street}, zamiast tramwajów linii {line} pojadą autobusy zastępcze.",
        "Z powodu planowanego remontu ul. {street} zmiana trasy linii {line} od soboty.",
    ],
    "unknown": [
        "Utrudnienia w ruchu na ul. {street}. Tramwaje linii {line} mają opóźnienia.",
        "Zatrzymany ruch tramwajów na ul. {street}, linie {line} i {line2} stoją.",
        "Duże opóźnienia linii {line} w rejonie {stop_gen}, przepraszamy za utrudnienia.",
        "Nieprzejezdna ul. {street}, tramwaje linii {line} kierowane są objazdem.",
    ],
}

SENTIMENT_TEMPLATES = {
    "positive": [
        "dziękujemy za szybką informację, świetna robota",
        "brawo dla motorniczego, super obsługa i szybka reakcja",
        "bardzo dobrze że tak szybko naprawiono, dziękuję serdecznie",
        "wielkie dzięki za sprawną akcję, jesteście najlepsi",
    ],
    "neutral": [
        "czy wiadomo o której godzinie linia wróci na trasę",
        "jak długo potrwa objazd przez to skrzyżowanie",
        "czy autobusy zastępcze zatrzymują się na przystanku przy rynku",
        "którędy teraz jedzie ta linia w stronę dworca",
    ],
    "negative": [
        "znowu awaria, skandal i kompletna porażka przewoźnika",
        "fatalnie, czekam godzinę i żadnego tramwaju, wstyd",
        "kolejny raz spóźniony do pracy przez ten beznadziejny tabor",
        "żenada, nikt nie informuje pasażerów co się dzieje",
    ],
}
SENTIMENT_FILLERS = ["dzisiaj", "rano", "znowu", "wieczorem", "naprawdę", "po prostu", "chyba", "serio"]


def _fill(template, rng):
    street = rng.choice(STREETS)
    stop = rng.choice(STOPS)
    lines = rng.sample(TRAM_LINES + BUS_LINES, 2)
    return template.format(
        street=street[1],
        stop=stop[0],
        stop_loc=stop[1],
        stop_gen=stop[1],
        line=lines[0],
        line2=lines[1],
        hour=f"{rng.randint(5, 22)}:00",
    )


def incident_corpus(per_class=200, seed=0, labels=INCIDENT_LABELS):
    """Shuffled labeled documents, ``per_class`` for each incident label."""
    rng = random.Random(seed)
    docs = [
        LabeledDoc(_fill(rng.choice(INCIDENT_TEMPLATES[label]), rng), label)
        for label in labels
        for _ in range(per_class)
    ]
    rng.shuffle(docs)
    return docs


def sentiment_corpus(per_class=200, seed=0):
    """Shuffled labeled comments with a few random filler words mixed in."""
    rng = random.Random(seed)
    docs = []
    for label, templates in SENTIMENT_TEMPLATES.items():
        for _ in range(per_class):
            words = rng.choice(templates).split()
            for _ in range(rng.randint(0, 2)):
                words.insert(rng.randrange(len(words) + 1), rng.choice(SENTIMENT_FILLERS))
            docs.append(LabeledDoc(" ".join(words), label))
    rng.shuffle(docs)
    return docs


def split(docs, train_fraction=0.8):
    cut = int(round(len(docs) * train_fraction))
    return docs[:cut], docs[cut:]


def post_corpus(n_posts=1680, n_tagged=622, n_analysis=482, seed=0,
                start=datetime(2017, 1, 1, tzinfo=timezone.utc), days=1096):
    """Post records with gold labels: ``n_tagged`` carry #AlertMPK, of which
    ``n_analysis`` describe disruptions and the rest planned changes or fixes.

    Returns a list of ``(record, label)``; untagged posts have label ``None``.
    """
    if not n_analysis <= n_tagged <= n_posts:
        raise ValueError("need n_analysis <= n_tagged <= n_posts")
    rng = random.Random(seed)
    disruption = [lab for lab in INCIDENT_LABELS if lab not in NON_DISRUPTION_LABELS]
    planned = sorted(NON_DISRUPTION_LABELS)
    labels = [rng.choice(disruption) for _ in range(n_analysis)]
    labels += [rng.choice(planned) for _ in range(n_tagged - n_analysis)]
    labels += [None] * (n_posts - n_tagged)
    rng.shuffle(labels)
    out = []
    for i, label in enumerate(labels):
        when = start + timedelta(seconds=rng.randrange(days * 86400))
        if label is None:
            text = rng.choice([
                "Zapraszamy na dni otwarte zajezdni tramwajowej!",
                "Nowe bilety okresowe już w sprzedaży w naszych punktach.",
                "Poznajcie historię wrocławskich tramwajów.",
            ])
            hashtags = []
        else:
            text = _fill(rng.choice(INCIDENT_TEMPLATES[label]), rng) + " #AlertMPK"
            hashtags = ["AlertMPK"]
        record = {
            "id": f"p{i:05d}",
            "platform": "facebook" if i % 3 else "twitter",
            "published_at": when.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": text,
            "hashtags": hashtags,
            "reactions": {"Like": rng.randint(0, 30)},
            "comments": [],
        }
        out.append((record, label))
    return out
