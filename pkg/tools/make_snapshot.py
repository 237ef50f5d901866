"""Regenerate the bundled stand-in snapshot.

The stand-in keeps the published upper structure (one root, three branches),
every theme in the desk fixture, and a handful of other well-known themes,
then grows seeded filler classes until it reaches the published class count.
Drop a real release export at ``src/ltokit/data/lto-snapshot.lto.txt`` (and
update the manifest) to use real data instead.

    python tools/make_snapshot.py
"""

import json
import random
from pathlib import Path

from ltokit.ontology import Theme, build_ontology
from ltokit.textio import parse_theme_document, serialize_theme_document

DATA = Path(__file__).resolve().parents[1] / "src" / "ltokit" / "data"
CLASS_COUNT = 2656
SEED = 20190401

EXTRA = [
    ("human group", "the human condition thematic entity", "A story is about a small circle of people who all know one another."),
    ("mother and daughter", "human pair", "A story explores the bond between a mother and her daughter."),
    ("husband and wife", "human pair", "A story explores the bond between spouses."),
    ("friendship", "human pair", "A story explores the bond between friends."),
    ("romantic love", "human pair", "A character falls in love."),
    ("coping with death", "human individual", "A character comes to terms with the death of someone close."),
    ("the lust for power", "human individual", "A character craves control over others."),
    ("appearances can be deceiving", "the pursuit of knowledge thematic entity", "Something turns out to be other than it seemed."),
    ("a danger shared can bring people together", "human group", "Facing a threat together creates a bond between characters."),
    ("be careful of what you wish for", "the pursuit of knowledge thematic entity", "A wish comes true with unwelcome consequences."),
    ("astronomical-scale engineering", "speculative fiction thematic entity", "There is a construction project on the scale of planets or stars."),
    ("the occult", "speculative fiction thematic entity", "A story involves hidden supernatural forces or secret rites."),
    ("Martian extraterrestrial", "extraterrestrial being", "A story features a being from the planet Mars."),
    ("what if I were stranded on a deserted island", "speculative fiction thematic entity", "A character is marooned on an uninhabited island."),
]

ADJECTIVES = """
abandoned absent accidental ageless alien ancient artificial bitter blind borrowed
broken buried careless celestial chosen civic cloned cold collective common
corrupt cosmic cruel cursed dark dead desperate digital distant divided
doomed double dying electric endless engineered eternal exiled false fallen
fearful feral final first foreign forbidden forgotten fragile frozen future
gentle ghostly golden hidden hollow honest hostile human idle imaginary
immortal inherited inner invisible iron jealous last lawful lonely lost
loyal lunar machine mechanical mortal mutant mutual noble nuclear obsessive
orbital orphaned parallel perfect phantom planetary poisoned political primal private
public quiet radiant reckless rebel robotic rogue royal sacred savage
second secret selfish shared silent simulated solar solitary stolen strange
subterranean sudden synthetic temporal tragic twin unseen unwanted urban vanished
violent virtual wandering wild wounded young
""".split()

NOUNS = """
alliance ambition android archive arrogance assassin asylum bargain betrayal birth
blackmail bond bounty boundary brotherhood burden captivity ceremony child citadel
clone colony confession conquest conspiracy contagion covenant creation creature crime
crusade curse custody debt deception defiance delusion descent destiny devotion
dictator disguise doctrine dream duel duty dynasty empire envy epidemic
escape exile experiment faith famine feud fidelity forgery fortune frontier
generation gift grief guardian guilt harvest heir heresy homecoming honor
hope hunger identity illness imposter inheritance innocence invasion journey judgment
kinship labor legacy liberty longing loyalty machine madness marriage martyr
memory mercy migration mutiny myth nostalgia oath obsession oracle outcast
pact paradise pardon parenthood pilgrimage plague prophecy quarantine quest rebellion
redemption refuge regret rescue revolution ritual rivalry sacrifice sanctuary scandal
secret siege slavery solitude sovereignty spy succession surrender survival temptation
testament treason trial truce tyranny uprising utopia vigil voyage war
""".split()


def _article(word):
    return "an" if word[0] in "aeiou" else "a"


def main():
    seed_themes, diags = parse_theme_document((DATA / "fixture.lto.txt").read_text("utf-8"))
    assert not diags
    themes = {t.name: t for t in seed_themes}
    for name, parent, definition in EXTRA:
        themes[name] = Theme(name, definition, (parent,), references=("https://en.wikipedia.org/wiki/" + name.replace(" ", "_"),))
    themes["friendship"] = Theme(
        "friendship", themes["friendship"].definition, ("human pair",), ("friend and friend",), themes["friendship"].references
    )

    rng = random.Random(SEED)
    pool = [f"{a} {n}" for a in ADJECTIVES for n in NOUNS]
    rng.shuffle(pool)
    candidates = sorted(n for n in themes if n != "literary thematic entity")
    filler = iter(pool)
    while len(themes) < CLASS_COUNT:
        name = next(filler)
        if name in themes:
            continue
        parents = [rng.choice(candidates)]
        if rng.random() < 0.04:
            other = rng.choice(candidates)
            if other != parents[0]:
                parents.append(other)
        adj, noun = name.split(" ", 1)
        aliases = (f"{name} theme",) if rng.random() < 0.05 else ()
        references = () if rng.random() < 0.3 else (f"urn:lto:synthetic:{name.replace(' ', '-')}",)
        themes[name] = Theme(
            name,
            f"A story features {_article(adj)} {adj} {noun}.",
            tuple(parents),
            aliases,
            references,
        )
        candidates.append(name)

    ont = build_ontology(themes.values())
    assert len(ont) == CLASS_COUNT
    assert len(ont.children(ont.root)) == 3
    text = serialize_theme_document(themes.values())
    (DATA / "lto-snapshot.lto.txt").write_text(text, "utf-8")
    manifest = {
        "version": "synthetic-2019.04",
        "class_count": CLASS_COUNT,
        "root": ont.root,
        "synthetic": True,
        "generator": "tools/make_snapshot.py",
        "seed": SEED,
        "note": "Stand-in with the published class count and upper structure; not the released ontology.",
    }
    (DATA / "lto-snapshot.json").write_text(json.dumps(manifest, indent=2) + "\n", "utf-8")


if __name__ == "__main__":
    main()
