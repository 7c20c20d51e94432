"""Synthetic corpus presets with planted hierarchical and link structure.

The "planted-tmd" preset builds a 400-document corpus over a three-level
topic hierarchy (4 domains x 4 subtopics x 3 subsubtopics) and 20
layered-compound materials. Topic-material associations follow a
Boolean rank-4 theme structure with 5% label noise on the background;
one domain is a "superconductivity" cluster whose four member materials
are shared with two sister leaves in another domain and with the whole
fourth domain, so that masked links remain recoverable from the retained
evidence. The planted truth ships alongside the corpus so evaluations
can name the true members and decoys without re-deriving them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import Document
from .errors import ArgumentError
from .seeding import rng_for

SUPERS = ("nbse2", "tas2", "mos2", "tase2")
COMPANIONS = ("ws2", "wse2", "tis2", "tise2")
THEME_B_MATERIALS = ("crs2", "mns2", "mnse2", "fes2", "nis2")
THEME_C_MATERIALS = ("mnte2", "crse2", "crte2", "vse2")
THEME_D_MATERIALS = ("cos2", "zrs2", "vs2")
MATERIALS = (
    SUPERS + COMPANIONS + THEME_B_MATERIALS + THEME_C_MATERIALS + THEME_D_MATERIALS
)
DECOYS = ("crs2", "mns2", "mnse2", "mnte2", "crse2", "crte2", "fes2")

DOMAIN_TOKENS = {
    0: (
        "layered exfoliation monolayer heterostructure stacking flake "
        "substrate interlayer crystal growth cleavage intercalation"
    ).split(),
    1: (
        "catalysis catalyst hydrogen evolution electrocatalysis overpotential "
        "adsorption faradaic electrode turnover electrolyte kinetics"
    ).split(),
    2: (
        "tribology friction lubricant wear sliding coating roughness "
        "adhesion shear lubrication asperity delamination"
    ).split(),
    3: (
        "photonics photoluminescence exciton bandgap emission absorption "
        "valleytronics photodetector waveguide polariton trion biexciton"
    ).split(),
}

# the planted cluster lives in one subtopic of domain 0; the token query
# that selects it during evaluation matches these by prefix
CLUSTER_SUBTOPIC_TOKENS = (
    "superconductivity superconductor superconducting pairing "
    "cooper vortex josephson meissner"
).split()

_SYLLABLES = (
    "ba be bi bo bu da de di do du fa fe fi fo fu ga ge gi go gu "
    "ka ke ki ko ku la le li lo lu ma me mi mo mu na ne ni no nu "
    "pa pe pi po pu ra re ri ro ru sa se si so su ta te ti to tu "
    "va ve vi vo vu za ze zi zo zu"
).split()


@dataclass(frozen=True)
class SynthPreset:
    name: str
    seed: int
    n_domains: int
    subtopics: int
    subsubs: int
    docs_per_leaf: int
    extra_docs: int
    subtopic_tokens: int
    subsub_tokens: int
    noise_tokens: int
    abstract_len: int
    label_noise: float
    singleton_rate: float
    materials: tuple
    sister_count: int = 6


PRESETS = {
    "planted-tmd": SynthPreset(
        name="planted-tmd",
        seed=7,
        n_domains=4,
        subtopics=4,
        subsubs=3,
        docs_per_leaf=8,
        extra_docs=16,
        subtopic_tokens=8,
        subsub_tokens=6,
        noise_tokens=30,
        abstract_len=36,
        label_noise=0.05,
        singleton_rate=0.03,
        materials=MATERIALS,
    ),
    "planted-mini": SynthPreset(
        name="planted-mini",
        seed=7,
        n_domains=3,
        subtopics=2,
        subsubs=2,
        docs_per_leaf=6,
        extra_docs=0,
        subtopic_tokens=6,
        subsub_tokens=5,
        noise_tokens=12,
        abstract_len=24,
        label_noise=0.04,
        singleton_rate=0.02,
        materials=MATERIALS[:12],
        sister_count=1,
    ),
}

COUNTRIES = ("usa", "japan", "germany", "china", "uk", "korea")
AFFILIATIONS = (
    "ridgecrest lab", "eastvale institute", "harborview university",
    "summitpeak college", "northgate center", "lakeshore academy",
)


def _pseudo_word(rng, used):
    while True:
        n = int(rng.integers(3, 5))
        word = "".join(rng.choice(_SYLLABLES) for _ in range(n))
        if word not in used and len(word) >= 4:
            used.add(word)
            return word


def _leaf_theme_rows(preset: SynthPreset):
    """Map each leaf cell (domain, subtopic, subsub) to its theme set.

    The "cluster" theme carries the planted member materials. Its rows
    are the superconductivity domain plus a sister domain that shares
    the same material mix under different vocabulary, so that masking
    the cluster's links leaves the columns anchored. The sister rows
    double as the "companions" theme, and two further themes (plus one
    reused-column block) give the background Boolean rank 4.
    """
    leaves = [
        (d, s, ss)
        for d in range(preset.n_domains)
        for s in range(preset.subtopics)
        for ss in range(preset.subsubs)
    ]
    last = preset.n_domains - 1
    sisters = [leaf for leaf in leaves if leaf[0] == last]
    if preset.n_domains == 2:
        sisters = sisters[: max(1, len(sisters) // 2)]
    themes = {}
    for leaf in leaves:
        domain = leaf[0]
        leaf_themes = set()
        if domain == 0 or leaf in sisters:
            leaf_themes.add("cluster")
            leaf_themes.add("companions")
        if domain == 1 and preset.n_domains > 2:
            leaf_themes.add("b")
        if domain == 2 and preset.n_domains > 3:
            leaf_themes.add("c")
        if domain in (1, 2) and leaf[1] in (0, 1) and preset.n_domains > 2:
            leaf_themes.add("d")
        if preset.n_domains == 2 and domain == 1 and leaf not in sisters:
            leaf_themes.add("b")
        themes[leaf] = leaf_themes
    return leaves, sisters, themes


def _theme_columns(preset: SynthPreset):
    materials = list(preset.materials)

    def cols(names):
        return tuple(m for m in names if m in materials)

    return {
        "cluster": cols(SUPERS),
        "companions": cols(COMPANIONS) or tuple(materials[4:8]),
        "b": cols(THEME_B_MATERIALS) or tuple(materials[-2:]),
        "c": cols(THEME_C_MATERIALS) or tuple(materials[-1:]),
        "d": cols(THEME_D_MATERIALS) or tuple(materials[-1:]),
    }


def generate_corpus(preset_name: str, seed: int | None = None):
    """Build (documents, planted-truth dict) for a preset.

    Deterministic for a fixed seed; the returned truth records the
    planted member materials, decoys, and suggested pipeline settings.
    """
    if preset_name not in PRESETS:
        raise ArgumentError(
            f"unknown preset {preset_name!r}; available: {sorted(PRESETS)}"
        )
    preset = PRESETS[preset_name]
    seed = preset.seed if seed is None else int(seed)

    word_rng = rng_for(seed, "words")
    used = set(t for toks in DOMAIN_TOKENS.values() for t in toks)
    used.update(CLUSTER_SUBTOPIC_TOKENS)
    domain_tokens = {
        d: list(DOMAIN_TOKENS[d])[: 12] for d in range(preset.n_domains)
    }
    sub_tokens = {
        (d, s): [_pseudo_word(word_rng, used) for _ in range(preset.subtopic_tokens)]
        for d in range(preset.n_domains)
        for s in range(preset.subtopics)
    }
    sub_tokens[(0, 0)] = list(CLUSTER_SUBTOPIC_TOKENS)[: preset.subtopic_tokens]
    subsub_tokens = {
        (d, s, ss): [_pseudo_word(word_rng, used) for _ in range(preset.subsub_tokens)]
        for d in range(preset.n_domains)
        for s in range(preset.subtopics)
        for ss in range(preset.subsubs)
    }
    noise_tokens = [_pseudo_word(word_rng, used) for _ in range(preset.noise_tokens)]

    leaves, sisters, leaf_themes = _leaf_theme_rows(preset)
    theme_cols = _theme_columns(preset)
    materials = list(preset.materials)

    # leaf-level truth with background label noise; the cluster/companion
    # block stays clean, and the cluster subtopic's leaves are kept fully
    # noise-free so the planted evaluation signal is unambiguous
    truth = {}
    weak = set()  # noise-added links get minimal (2-doc) support
    noise_rng = rng_for(seed, "labelnoise")
    protected = {
        (leaf, m)
        for leaf in leaves
        if "cluster" in leaf_themes[leaf]
        for m in theme_cols["cluster"] + theme_cols["companions"]
    }
    protected.update(
        (leaf, m) for leaf in leaves if leaf[:2] == (0, 0) for m in materials
    )
    for leaf in leaves:
        row = {m: False for m in materials}
        for theme in leaf_themes[leaf]:
            for m in theme_cols[theme]:
                row[m] = True
        for m in materials:
            if (leaf, m) in protected:
                continue
            if noise_rng.random() < preset.label_noise:
                row[m] = not row[m]
                if row[m]:
                    weak.add((leaf, m))
        truth[leaf] = row

    # documents: leaf cells in order, extra docs topping up the first cells
    doc_counts = {leaf: preset.docs_per_leaf for leaf in leaves}
    for i in range(preset.extra_docs):
        doc_counts[leaves[i % len(leaves)]] += 1

    docs = []
    mass = (0.40, 0.28, 0.22, 0.10)
    for leaf in leaves:
        d, s, ss = leaf
        pools = (
            domain_tokens[d],
            sub_tokens[(d, s)],
            subsub_tokens[(d, s, ss)],
            noise_tokens,
        )
        leaf_rng = rng_for(seed, "docs", d, s, ss)
        cell_docs = []
        for idx in range(doc_counts[leaf]):
            doc_id = f"doc-{d}{s}{ss}-{idx:02d}"
            title_tokens = [
                pools[0][int(leaf_rng.integers(len(pools[0])))],
                pools[1][int(leaf_rng.integers(len(pools[1])))],
                pools[2][int(leaf_rng.integers(len(pools[2])))],
                pools[0][int(leaf_rng.integers(len(pools[0])))],
            ]
            abstract_tokens = []
            for _ in range(preset.abstract_len):
                r = leaf_rng.random()
                if r < mass[0]:
                    pool = pools[0]
                elif r < mass[0] + mass[1]:
                    pool = pools[1]
                elif r < mass[0] + mass[1] + mass[2]:
                    pool = pools[2]
                else:
                    pool = pools[3]
                abstract_tokens.append(pool[int(leaf_rng.integers(len(pool)))])
            attributes = {
                "country": (COUNTRIES[int(leaf_rng.integers(len(COUNTRIES)))],),
                "affiliation": (AFFILIATIONS[int(leaf_rng.integers(len(AFFILIATIONS)))],),
                "author": (f"author-{int(leaf_rng.integers(40)):02d}",),
            }
            cell_docs.append(
                Document(
                    doc_id=doc_id,
                    title=" ".join(title_tokens),
                    abstract=" ".join(abstract_tokens),
                    attributes=attributes,
                )
            )

        # every document carries its cell's theme materials, so the
        # associations survive any sub-split of the cell's documents;
        # noise-added links get only a few supporting docs, and
        # occasional singleton tags create honestly-unknown cells
        tag_rng = rng_for(seed, "tags", d, s, ss)
        tags = {doc.doc_id: set() for doc in cell_docs}
        for m in materials:
            if not truth[leaf][m]:
                continue
            if (leaf, m) in weak:
                support = int(tag_rng.integers(2, 5))
                for doc in cell_docs[:support]:
                    tags[doc.doc_id].add(m)
            else:
                for doc in cell_docs:
                    tags[doc.doc_id].add(m)
        for doc in cell_docs:
            if tag_rng.random() < preset.singleton_rate:
                extra = materials[int(tag_rng.integers(len(materials)))]
                tags[doc.doc_id].add(extra)

        for doc in cell_docs:
            attrs = dict(doc.attributes)
            tagged = sorted(tags[doc.doc_id])
            if tagged:
                attrs["material"] = tuple(tagged)
            docs.append(
                Document(
                    doc_id=doc.doc_id,
                    title=doc.title,
                    abstract=doc.abstract,
                    attributes=attrs,
                )
            )

    truth_info = {
        "preset": preset.name,
        "seed": seed,
        "n_documents": len(docs),
        "materials": materials,
        "planted_members": [m for m in SUPERS if m in materials],
        "companions": [m for m in COMPANIONS if m in materials],
        "decoys": [m for m in DECOYS if m in materials],
        "cluster_query": "superconduct",
        "sister_leaves": ["{}_{}_{}".format(*leaf) for leaf in sisters],
        "expected_nodes": 1
        + preset.n_domains
        + preset.n_domains * preset.subtopics
        + len(leaves),
        "suggested": {
            "k_min": 1,
            "k_max": 6,
            "s_min": 5,
            "d_max": 3 if preset.subsubs > 1 else 2,
            "ensemble_size": 8,
            "min_df": 2,
            "assoc_min": 3,
            "coverage_floor": 5,
            "candidates": [2, 3],
            "ensemble_size_eval": 10,
            "restarts": 8,
            "lmf_lambda": 0.4,
            "lmf_learning_rate": 0.05,
            "lmf_epochs": 500,
            "query_top_n": 10,
            "folds": 3,
        },
    }
    return docs, truth_info


def write_corpus(preset_name: str, corpus_path, truth_path=None, seed=None):
    """Generate a preset corpus to disk; truth goes next to it by default."""
    from .corpus import save_corpus

    docs, truth = generate_corpus(preset_name, seed=seed)
    save_corpus(docs, corpus_path)
    if truth_path is None:
        truth_path = str(corpus_path) + ".truth.json"
    with open(truth_path, "w", encoding="utf-8") as fh:
        json.dump(truth, fh, indent=2, sort_keys=True)
    return docs, truth
