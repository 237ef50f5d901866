"""Random theme/story models and well-formed but non-canonical documents."""

import random

from ltokit import Annotation, StoryEntry, Theme
from ltokit.textio import serialize_story_document, serialize_theme_document

WORDS = (
    "vengeance sphere car alien robot love death power island war weapon star ship time "
    "mother daughter friend Venus Mars café über naïve 東京 ok"
).split()


def _phrase(rng, lo=1, hi=4):
    return " ".join(rng.choice(WORDS) for _ in range(rng.randint(lo, hi)))


def _text(rng):
    if rng.random() < 0.3:
        return ""
    return "\n".join(_phrase(rng, 1, 8) for _ in range(rng.randint(1, 3)))


def random_themes(rng: random.Random, size=None):
    size = size or rng.randint(1, 12)
    names = []
    while len(names) < size:
        n = _phrase(rng)
        if n not in names:
            names.append(n)
    themes = []
    for i, name in enumerate(names):
        others = [n for n in names if n != name]
        parents = rng.sample(others, min(len(others), rng.randint(0, 2)))
        aliases = []
        for _ in range(rng.randint(0, 2)):
            a = _phrase(rng) + " alias"
            if a not in aliases and a != name:
                aliases.append(a)
        refs = [f"https://example.org/{rng.randint(0, 999)}" for _ in range(rng.randint(0, 2))]
        themes.append(Theme(name, _text(rng), tuple(parents), tuple(aliases), tuple(refs), _text(rng), _text(rng)))
    return themes


def random_stories(rng: random.Random, theme_names, size=None):
    size = size or rng.randint(1, 8)
    stories = []
    for i in range(size):
        chosen = rng.sample(theme_names, min(len(theme_names), rng.randint(0, 5)))
        anns = tuple(
            Annotation(t, rng.choice(("choice", "major", "minor")), rng.choice([None, _phrase(rng)]))
            for t in chosen
        )
        stories.append(
            StoryEntry(
                f"story-{i:03d}",
                _phrase(rng) if rng.random() < 0.8 else "",
                rng.choice(["", "1951", "1966-09-22", "1966-1969"]),
                rng.choice(["", "Black Mirror", "Futurama"]),
                _text(rng),
                anns,
            )
        )
    return stories


def messy(rng: random.Random, canonical: str) -> str:
    """Re-format a canonical document without changing its meaning."""
    out = []
    for line in canonical.split("\n"):
        if line.startswith(":: ") and rng.random() < 0.3:
            line = "::  " + line[3:]
        if line.strip() and rng.random() < 0.2:
            line = line + rng.choice([" ", "\t", "  "])
        if line.strip() and not line.startswith("::") and rng.random() < 0.1:
            line = " " + line
        out.append(line)
        if not line.strip() and rng.random() < 0.3:
            out.append("")
    text = "\n".join(out)
    if rng.random() < 0.2:
        text = text.replace("\n", "\r\n")
    if rng.random() < 0.3:
        text = "\n\n" + text
    if rng.random() < 0.1:
        text = "\ufeff" + text
    return text


def random_theme_document(rng):
    return messy(rng, serialize_theme_document(random_themes(rng)))


def random_story_document(rng):
    names = [t.name for t in random_themes(rng)]
    return messy(rng, serialize_story_document(random_stories(rng, names)))
