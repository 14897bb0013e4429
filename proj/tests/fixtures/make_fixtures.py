#!/usr/bin/env python3
"""Regenerates the recorded OpenAlex-style payload corpus used by the test
suite. The corpus is deterministic: rerunning this script reproduces
openalex_works.json byte for byte.

The works are synthetic (DOIs under the reserved 10.9999 prefix) but follow
the live API's payload shape: ids and referenced_works are full
openalex.org URLs, sources/topics sit in nested objects, and fwci may be
null or absent.
"""

import json
import random
from pathlib import Path

OUT = Path(__file__).parent / "openalex_works.json"

URL = "https://openalex.org/{}"
DOI = "https://doi.org/{}"

DOMAINS = ["Physical Sciences", "Life Sciences", "Health Sciences", "Social Sciences"]
SOURCES = ["Science", "Nature", "Journal of Synthetic Data", "Annals of Fixture Studies"]


def work(wid, *, doi=None, title=None, year=2015, cited=0, fwci=None, authors=1,
         source=None, domain=None, refs=(), wtype="article"):
    payload = {
        "id": URL.format(wid),
        "title": title or f"Fixture work {wid}",
        "publication_year": year,
        "cited_by_count": cited,
        "type": wtype,
        "authorships": [{"author_position": i} for i in range(authors)],
        "referenced_works": [URL.format(r) for r in refs],
    }
    if doi:
        payload["doi"] = DOI.format(doi)
    if fwci is not None:
        payload["fwci"] = fwci
    if source:
        payload["primary_location"] = {"source": {"display_name": source}}
    if domain:
        payload["primary_topic"] = {"domain": {"display_name": domain}}
    return payload


def main():
    rng = random.Random(20240811)
    works = []

    # ------------------------------------------------------------------
    # Leaf pool: the references of every focal/cohort work. Each leaf cites
    # a few other leaves (intra-pool links) plus ids outside the pool.
    leaf_ids = [f"W81{i:02d}" for i in range(1, 41)]  # W8101..W8140
    leaf_refs = {}
    for i, lid in enumerate(leaf_ids):
        cited = set()
        for j, other in enumerate(leaf_ids):
            if other == lid:
                continue
            # sparse deterministic pattern
            if (i * 7 + j * 3) % 11 == 0:
                cited.add(other)
        if i % 3 == 0:
            cited.add(f"W77777{i:02d}")  # outside the pool, never fetched
        leaf_refs[lid] = sorted(cited)
    for i, lid in enumerate(leaf_ids):
        works.append(work(
            lid,
            year=2000 + (i % 10),
            cited=5 + i,
            fwci=round(0.2 + 0.1 * (i % 15), 2),
            authors=1 + (i % 6),
            source=SOURCES[i % 4],
            domain=DOMAINS[i % 4],
            refs=leaf_refs[lid],
        ))

    # ------------------------------------------------------------------
    # Focal fixtures for compute/batch.
    f1_refs = leaf_ids[:30]
    works.append(work(
        "W9001001", doi="10.9999/ke-fixture-001",
        title="Fixture focal with a fully resolvable neighborhood",
        year=2015, cited=120, fwci=3.4, authors=4,
        source="Science", domain="Physical Sciences", refs=f1_refs,
    ))
    f2_refs = ["W8101", "W8102", "W8103", "W8999998", "W8999999"]  # 2 dangling
    works.append(work(
        "W9001002", doi="10.9999/ke-fixture-002",
        title="Fixture focal with two dangling references",
        year=2016, cited=3, fwci=0.9, authors=2,
        source="Nature", domain="Life Sciences", refs=f2_refs,
    ))
    works.append(work(
        "W9001003", doi="10.9999/ke-fixture-003",
        title="Fixture focal with an empty reference list",
        year=2017, cited=0, fwci=0.0, authors=1,
        source="Journal of Synthetic Data", domain="Health Sciences", refs=[],
    ))
    works.append(work(
        "W9001004", doi="10.9999/ke-fixture-004",
        title="Fixture focal with a single reference",
        year=2018, cited=1, authors=3,
        source="Annals of Fixture Studies", domain="Social Sciences",
        refs=["W8101"],
    ))

    # ------------------------------------------------------------------
    # Cohort corpus: two years of honor / universe / zero-cited works.
    wid = 9002001
    for year in (2010, 2015):
        # honor candidates (Science/Nature articles); one has a single
        # reference so the cohort builder must exclude it.
        for i in range(6):
            refs = rng.sample(leaf_ids, rng.randint(4, 12)) if i != 4 else ["W8101"]
            works.append(work(
                f"W{wid}", year=year,
                cited=rng.randint(10, 400),
                fwci=round(rng.uniform(0.5, 8.0), 2),
                authors=rng.randint(1, 12),
                source=rng.choice(["Science", "Nature"]),
                domain=rng.choice(DOMAINS),
                refs=sorted(refs),
            ))
            wid += 1
        # universe sample for the influence percentile rule; a spread of
        # citation counts with a clear top end.
        for i in range(20):
            cited = [0, 1, 2, 3, 5, 8, 12, 15, 20, 25, 30, 40, 55, 70, 90, 120,
                     200, 350, 600, 1500][i]
            fwci = None if i == 7 else round(rng.uniform(0.0, 6.0), 2)
            authors = 0 if i == 11 else rng.randint(1, 15)
            works.append(work(
                f"W{wid}", year=year,
                cited=cited, fwci=fwci, authors=authors,
                source=rng.choice(SOURCES[2:]),
                domain=rng.choice(DOMAINS),
                refs=sorted(rng.sample(leaf_ids, rng.randint(3, 10))),
            ))
            wid += 1
        # zero-cited works; one with a single reference.
        for i in range(5):
            refs = rng.sample(leaf_ids, rng.randint(3, 9)) if i != 2 else ["W8102"]
            fwci = 0.0 if i < 3 else None
            works.append(work(
                f"W{wid}", year=year,
                cited=0, fwci=fwci, authors=rng.randint(1, 9),
                source=rng.choice(SOURCES[2:]),
                domain=rng.choice(DOMAINS),
                refs=sorted(refs),
            ))
            wid += 1

    # A year populated only by the citation ladder, so the percentile rule
    # has an unambiguous universe to sample.
    for i in range(20):
        cited = [0, 1, 2, 3, 5, 8, 12, 15, 20, 25, 30, 40, 55, 70, 90, 120,
                 200, 350, 600, 1500][i]
        works.append(work(
            f"W{wid}", year=2013,
            cited=cited, fwci=round(rng.uniform(0.1, 4.0), 2),
            authors=rng.randint(1, 10),
            source=rng.choice(SOURCES[2:]),
            domain=rng.choice(DOMAINS),
            refs=sorted(rng.sample(leaf_ids, rng.randint(3, 10))),
        ))
        wid += 1

    OUT.write_text(json.dumps(works, indent=1) + "\n")
    print(f"wrote {OUT} with {len(works)} works")


if __name__ == "__main__":
    main()
