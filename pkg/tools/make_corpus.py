"""Generate the tagged training corpus for the trigram tagger.

Sentences are sampled from hand-written clause patterns over the
fragment lexicon, with subject-verb agreement realized during
generation, so every line both parses under the fragment grammar and
carries its gold tags.  Deterministic (fixed seed); run from the
repository root:

    python tools/make_corpus.py
"""

import os
import random

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "treegraft", "data", "english")
SEED = 31415
TRAIN = 500
HELDOUT = 50

NOUNS = {
    "map": "maps", "chart": "charts", "city": "cities", "drawer": "drawers",
    "archive": "archives", "collection": "collections", "shelf": "shelves",
    "atlas": "atlases", "library": "libraries", "scholar": "scholars",
    "sailor": "sailors", "captain": "captains", "harbor": "harbors",
    "coast": "coasts", "island": "islands", "mountain": "mountains",
    "river": "rivers", "road": "roads", "compass": "compasses",
    "legend": "legends", "border": "borders", "region": "regions",
    "village": "villages", "treasure": "treasures", "journey": "journeys",
    "story": "stories", "page": "pages", "book": "books", "desk": "desks",
    "route": "routes",
}
TRANS = {
    "map": "maps mapped mapped", "study": "studies studied studied",
    "draw": "draws drew drawn", "keep": "keeps kept kept",
    "find": "finds found found", "see": "sees saw seen",
    "explore": "explores explored explored", "store": "stores stored stored",
    "read": "reads read read", "copy": "copies copied copied",
    "mark": "marks marked marked", "trace": "traces traced traced",
    "fold": "folds folded folded", "open": "opens opened opened",
    "search": "searches searched searched",
}
INTRANS = {
    "sleep": "sleeps slept slept", "walk": "walks walked walked",
    "sail": "sails sailed sailed",
}
SENTENTIAL = {
    "think": "thinks thought thought", "say": "says said said",
    "know": "knows knew knew",
}
PRONOUNS_NOM = [("I", False), ("you", False), ("he", True), ("she", True),
                ("we", False), ("they", False)]
PRONOUNS_ACC = ["me", "him", "her", "us", "them"]
PROPER = ["Rome", "Peru", "Marco", "Elena", "Lisbon", "Atlantis"]
DETS_SING = ["a", "the", "every", "this", "that"]
DETS_PLUR = ["the", "these", "those", "some"]
ADJS = ["old", "ancient", "new", "rare", "faded", "large", "small",
        "detailed", "foreign", "golden"]
POST_ADVS = ["yesterday", "today", "here", "there"]
PRE_ADVS = ["often", "always"]
BOTH_ADVS = ["quickly", "carefully"]
PREPS_NP = ["of", "in", "on", "from", "with", "under", "near"]
PREPS_VP = ["in", "on", "from", "under", "near", "at", "by"]


def _verb(table, rng, root, form):
    s3, past, ppart = table[root].split()
    return {"s3": s3, "past": past, "ppart": ppart, "base": root}[form]


class Maker:
    def __init__(self, rng):
        self.rng = rng

    def noun_sing(self):
        return self.rng.choice(sorted(NOUNS))

    def noun_plur(self):
        return NOUNS[self.noun_sing()]

    def np(self, case="nom", allow_pron=True):
        """Returns (tokens, tags, third_singular)."""
        rng = self.rng
        roll = rng.random()
        if allow_pron and roll < 0.12:
            if case == "nom":
                word, third = rng.choice(PRONOUNS_NOM)
                return [word], ["Pron"], third
            return [rng.choice(PRONOUNS_ACC)], ["Pron"], True
        if roll < 0.22:
            return [rng.choice(PROPER)], ["PropN"], True
        if roll < 0.34:
            return [self.noun_plur()], ["N"], False
        if roll < 0.42:
            return [rng.choice(ADJS), self.noun_plur()], ["A", "N"], False
        if roll < 0.52:
            det = rng.choice(DETS_PLUR)
            return [det, self.noun_plur()], ["D", "N"], False
        if roll < 0.62:
            det = rng.choice(DETS_SING)
            return [det, rng.choice(ADJS), self.noun_sing()], ["D", "A", "N"], True
        if roll < 0.72:
            # noun-noun compound
            head_plural = rng.random() < 0.5
            mod = self.noun_sing()
            if head_plural:
                return [mod, self.noun_plur()], ["N", "N"], False
            det = rng.choice(DETS_SING)
            return [det, mod, self.noun_sing()], ["D", "N", "N"], True
        det = rng.choice(DETS_SING)
        return [det, self.noun_sing()], ["D", "N"], True

    def inflect(self, table, root, third):
        """Finite form agreeing with the subject; past half the time."""
        if self.rng.random() < 0.5:
            return _verb(table, self.rng, root, "past")
        return _verb(table, self.rng, root, "s3" if third else "base")

    def clause(self, allow_embedded=True):
        rng = self.rng
        roll = rng.random()
        subj, subj_tags, third = self.np("nom")
        if roll < 0.30:  # plain transitive
            verb = self.inflect(TRANS, rng.choice(sorted(TRANS)), third)
            obj, obj_tags, _ = self.np("acc")
            toks = subj + [verb] + obj
            tags = subj_tags + ["V"] + obj_tags
        elif roll < 0.40:  # transitive with "have"
            verb = "had" if rng.random() < 0.5 else ("has" if third else "have")
            obj, obj_tags, _ = self.np("acc")
            toks = subj + [verb] + obj
            tags = subj_tags + ["V"] + obj_tags
        elif roll < 0.52:  # intransitive, often with an adverb
            verb = self.inflect(INTRANS, rng.choice(sorted(INTRANS)), third)
            toks = subj + [verb]
            tags = subj_tags + ["V"]
            extra = rng.random()
            if extra < 0.35:
                toks += [rng.choice(POST_ADVS + BOTH_ADVS)]
                tags += ["Adv"]
            elif extra < 0.5:
                toks = subj + [rng.choice(PRE_ADVS)] + [verb]
                tags = subj_tags + ["Adv", "V"]
        elif roll < 0.62:  # perfect auxiliary
            aux = "had" if rng.random() < 0.4 else ("has" if third else "have")
            verb = _verb(TRANS, rng, rng.choice(sorted(TRANS)), "ppart")
            obj, obj_tags, _ = self.np("acc")
            toks = subj + [aux, verb] + obj
            tags = subj_tags + ["V", "V"] + obj_tags
        elif roll < 0.70:  # modal
            verb = rng.choice(sorted(TRANS))
            obj, obj_tags, _ = self.np("acc")
            toks = subj + ["will", verb] + obj
            tags = subj_tags + ["V", "V"] + obj_tags
        elif roll < 0.82:  # transitive plus prepositional phrase
            verb = self.inflect(TRANS, rng.choice(sorted(TRANS)), third)
            obj, obj_tags, _ = self.np("acc")
            prep = rng.choice(PREPS_NP)
            pobj, pobj_tags, _ = self.np("acc", allow_pron=False)
            toks = subj + [verb] + obj + [prep] + pobj
            tags = subj_tags + ["V"] + obj_tags + ["P"] + pobj_tags
        elif roll < 0.88:  # intransitive plus locative
            verb = self.inflect(INTRANS, rng.choice(sorted(INTRANS)), third)
            prep = rng.choice(PREPS_VP)
            pobj, pobj_tags, _ = self.np("acc", allow_pron=False)
            toks = subj + [verb, prep] + pobj
            tags = subj_tags + ["V", "P"] + pobj_tags
        elif roll < 0.94 and allow_embedded:  # sentential complement
            verb = self.inflect(SENTENTIAL, rng.choice(sorted(SENTENTIAL)), third)
            inner_toks, inner_tags = self.clause(allow_embedded=False)
            toks = subj + [verb, "that"] + inner_toks
            tags = subj_tags + ["V", "Comp"] + inner_tags
        elif allow_embedded:  # relative clause on the subject head
            head = self.noun_sing() if rng.random() < 0.5 else self.noun_plur()
            third_head = head in NOUNS
            inner_subj, inner_tags, inner_third = self.np("nom")
            rel_verb = self.inflect(TRANS, rng.choice(sorted(TRANS)), inner_third)
            main = self.inflect(INTRANS, rng.choice(sorted(INTRANS)), third_head)
            toks = ["the", head, "that"] + inner_subj + [rel_verb, main]
            tags = ["D", "N", "Comp"] + inner_tags + ["V", "V"]
        else:
            verb = self.inflect(TRANS, rng.choice(sorted(TRANS)), third)
            obj, obj_tags, _ = self.np("acc")
            toks = subj + [verb] + obj
            tags = subj_tags + ["V"] + obj_tags
        # light NP coordination on objects
        if rng.random() < 0.04 and tags[-1] == "N":
            extra = self.noun_plur()
            toks += ["and", extra]
            tags += ["Conj", "N"]
        return toks, tags


def main():
    rng = random.Random(SEED)
    maker = Maker(rng)
    seen = set()
    lines = []
    while len(lines) < TRAIN + HELDOUT:
        toks, tags = maker.clause()
        assert len(toks) == len(tags), (toks, tags)
        line = " ".join("%s_%s" % (w, t) for w, t in zip(toks, tags))
        if line in seen:
            continue
        seen.add(line)
        lines.append(line)
    with open(os.path.join(OUT, "tagger_corpus.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines[:TRAIN]) + "\n")
    with open(os.path.join(OUT, "tagger_heldout.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines[TRAIN:]) + "\n")
    print("wrote %d training and %d held-out sentences" % (TRAIN, HELDOUT))


if __name__ == "__main__":
    main()
