"""
Browsing a small theme hierarchy
================================

Load the bundled 20-theme fixture, walk up and down the is-a graph and
search it by name, alias or definition.
"""

import ltokit
from ltokit import load_corpus, search, stats

ont, corpus, diagnostics = load_corpus([ltokit.fixture_theme_path()], [ltokit.fixture_story_path()])
print(f"{len(ont)} themes rooted at {ont.root!r}; {len(corpus)} stories; {len(diagnostics)} diagnostics")

# Ancestors come back ordered by depth, so the root is first.
for name in ont.ancestors("Venusian extraterrestrial"):
    print(f"  depth {ont.depth(name)}: {name}")

# Aliases resolve wherever a theme name is accepted.
print("WMD ->", ont.resolve("WMD"))
print("descendants of WMD:", ont.descendants("WMD"))
print("alien subsumes Venusian?", ont.subsumes("alien", "Venusian extraterrestrial"))

# Exact matches rank before substring matches, names before aliases and definitions.
for hit in search(ont, "weapons")[:5]:
    print(f"  {hit.score:.3f}  {hit.match_field:<10}  {hit.theme}")

s = stats(ont)
print("branch sizes:", dict(s.root_branch_sizes))
