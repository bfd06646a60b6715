"""Synthetic news corpora for desk-scale experiments.

Each document plants three summary sentences, drawn from a content
vocabulary disjoint from the filler vocabulary, either at the head of the
article (lead_biased) or at uniformly random positions (scattered).  The
reference summary is the three planted sentences verbatim, in document
order, so gold labeling by cosine similarity recovers the planted
positions exactly.
"""

import numpy as np

PROFILES = ("lead_biased", "scattered")
DEFAULT_DOCS = 200
PLANTED = 3

SUMMARY_VOCAB = (
    "government", "announced", "policy", "economy", "minister", "budget",
    "parliament", "reform", "election", "senate", "treaty", "inflation",
    "tariff", "legislation", "diplomat", "summit", "council", "mandate",
    "sanction", "coalition", "referendum", "deficit", "chancellor", "envoy",
    "ministry", "quorum", "statute", "embargo", "subsidy", "fiscal",
    "delegation", "ratify", "amendment", "plenary", "communique", "accord",
    "protocol", "directive", "ordinance", "decree", "tribunal", "audit",
    "levy", "excise", "customs", "treasury", "bond", "currency",
    "exports", "imports", "surplus", "growth", "forecast", "quarter",
    "index", "shares", "markets", "investors", "dividend", "merger",
)

FILLER_VOCAB = (
    "river", "mountain", "valley", "forest", "meadow", "harbor",
    "lighthouse", "orchard", "garden", "bridge", "castle", "village",
    "trail", "canyon", "glacier", "lagoon", "prairie", "dune",
    "cliff", "waterfall", "island", "peninsula", "reef", "tide",
    "breeze", "thunder", "drizzle", "sunrise", "sunset", "twilight",
    "autumn", "winter", "spring", "summer", "harvest", "blossom",
    "sparrow", "falcon", "heron", "otter", "badger", "squirrel",
    "walnut", "maple", "cedar", "willow", "birch", "aspen",
    "kitchen", "recipe", "flour", "butter", "honey", "cinnamon",
    "kettle", "teapot", "saucer", "basket", "lantern", "candle",
    "violin", "cello", "trumpet", "melody", "rhythm", "chorus",
    "painter", "canvas", "gallery", "sculpture", "mosaic", "mural",
    "sailor", "voyage", "compass", "anchor", "mast", "rudder",
    "library", "novel", "poem", "chapter", "margin", "preface",
    "stadium", "referee", "inning", "goalpost", "paddle", "sprint",
    "torch", "ember", "hearth", "timber", "granite", "pebble",
    "wagon", "saddle", "stable", "pasture", "fence", "barn",
    "quilt", "loom", "thread", "needle", "ribbon", "button",
    "clock", "gear", "pendulum", "dial", "chime", "cogwheel",
    "puddle", "umbrella", "galoshes", "mitten", "scarf", "sleigh",
)

_MIN_SENTENCES = 8
_MAX_SENTENCES = 14
_MIN_WORDS = 6
_MAX_WORDS = 12


def _sentence(rng: np.random.Generator, vocab: tuple[str, ...]) -> str:
    n_words = int(rng.integers(_MIN_WORDS, _MAX_WORDS + 1))
    words = [vocab[int(i)] for i in rng.integers(0, len(vocab), size=n_words)]
    words[0] = words[0].capitalize()
    return " ".join(words) + "."


def generate_corpus(
    profile: str, n_docs: int = DEFAULT_DOCS, seed: int = 0
) -> list[dict]:
    """Build corpus records ready to serialize as JSON-Lines.

    The "planted" field records the ground-truth summary positions; the
    corpus loader ignores it, tests use it.
    """
    if profile not in PROFILES:
        raise ValueError(f"unknown profile {profile!r}; choose from {PROFILES}")
    rng = np.random.default_rng(seed)
    records = []
    for idx in range(n_docs):
        n_sentences = int(rng.integers(_MIN_SENTENCES, _MAX_SENTENCES + 1))
        if profile == "lead_biased":
            positions = list(range(PLANTED))
        else:
            positions = sorted(
                int(p) for p in rng.choice(n_sentences, size=PLANTED, replace=False)
            )
        planted = {pos: _sentence(rng, SUMMARY_VOCAB) for pos in positions}
        sentences = [
            planted.get(i, None) or _sentence(rng, FILLER_VOCAB)
            for i in range(n_sentences)
        ]
        records.append(
            {
                "doc_id": f"synth-{profile}-{idx:04d}",
                "text": " ".join(sentences),
                "summary": " ".join(planted[pos] for pos in positions),
                "density_bin": "extractive",
                "planted": positions,
            }
        )
    return records
