import random

import pytest
from hypothesis import strategies as st

import ltokit
from ltokit import Theme, build_ontology, load_corpus, parse_theme_document
from ltokit.textio import read_text


@pytest.fixture(scope="session")
def fixture_paths():
    return ltokit.fixture_theme_path(), ltokit.fixture_story_path()


@pytest.fixture(scope="session")
def fixture_themes(fixture_paths):
    themes, diags = parse_theme_document(read_text(fixture_paths[0]))
    assert diags == []
    return themes


@pytest.fixture(scope="session")
def fixture_corpus(fixture_paths):
    ont, corpus, diags = load_corpus([fixture_paths[0]], [fixture_paths[1]])
    assert diags == []
    return ont, corpus


@pytest.fixture(scope="session")
def ont(fixture_corpus):
    return fixture_corpus[0]


@pytest.fixture(scope="session")
def corpus(fixture_corpus):
    return fixture_corpus[1]


@pytest.fixture(scope="session")
def snapshot_themes():
    themes, diags = parse_theme_document(read_text(ltokit.snapshot_path()))
    assert not any(d.is_error for d in diags)
    return themes


@pytest.fixture(scope="session")
def snapshot(snapshot_themes):
    return build_ontology(snapshot_themes)


def random_dag_themes(rng: random.Random, size: int, multi_parent: float = 0.2):
    """A valid random theme list: node i picks parents among nodes < i."""
    names = [f"t{i:03d}" for i in range(size)]
    themes = [Theme(names[0], "root")]
    for i in range(1, size):
        count = 1 + (rng.random() < multi_parent) + (rng.random() < multi_parent / 2)
        parents = rng.sample(names[:i], min(i, count))
        themes.append(Theme(names[i], f"def {i}", tuple(parents)))
    return themes


@st.composite
def dag_themes(draw, max_size=100):
    size = draw(st.integers(min_value=1, max_value=max_size))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    themes = random_dag_themes(random.Random(seed), size)
    perm = draw(st.permutations(range(size)))
    return [themes[i] for i in perm]
