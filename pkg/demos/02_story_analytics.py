"""
Which themes set two stories apart?
===================================

Over-representation of themes in a query set, two-group comparison,
weighted similarity between stories and average-linkage clusters.
"""

import ltokit
from ltokit import agglomerative_cluster, differential_usage, enrich, load_corpus, recommend, stories_with_theme

ont, corpus, _ = load_corpus([ltokit.fixture_theme_path()], [ltokit.fixture_story_path()])
aliens = ["movie-day-earth-stood-still-1951", "sts-1x01"]

# A story tagged with a specific theme also counts for every ancestor.
print("stories about extraterrestrial beings:", stories_with_theme(corpus, ont, "extraterrestrial being"))

# Hypergeometric upper tail per theme, BH-adjusted.
for row in enrich(corpus, ont, aliens)[:4]:
    print(f"  p={row.p:.5f} q={row.q:.5f}  {row.k}/{row.n} vs {row.K}/{row.N}  {row.theme}")

# Two-sided Fisher test between the alien pair and everything else.
rest = [sid for sid in corpus.ids() if sid not in aliens]
top = differential_usage(corpus, ont, aliens, rest)[0]
print("most different theme:", top.theme, f"p={top.p:.5f}")

# Tier weights (choice 3, major 2, minor 1) propagate upwards by max.
for sid, sim in recommend(corpus, ont, aliens[0], k=3):
    print(f"  {sim:.3f}  {sid}")

# Merging stops once the closest clusters are more than 0.5 apart.
for members in agglomerative_cluster(corpus, ont, 0.5):
    if len(members) > 1:
        print("cluster:", members)
