"""Regenerate the fragment's morphology and syntactic databases.

The word list is hand-picked; this script just spells out the regular
inflection paradigms so the flat files stay consistent.  Output is
deterministic; run from the repository root:

    python tools/gen_lexicon.py
"""

import os

OUT = os.path.join(os.path.dirname(__file__), "..", "src", "treegraft", "data", "english")

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

# root -> (3sg, past, ppart, gerund)
VERBS = {
    "map": ("maps", "mapped", "mapped", "mapping"),
    "study": ("studies", "studied", "studied", "studying"),
    "draw": ("draws", "drew", "drawn", "drawing"),
    "keep": ("keeps", "kept", "kept", "keeping"),
    "find": ("finds", "found", "found", "finding"),
    "see": ("sees", "saw", "seen", "seeing"),
    "sleep": ("sleeps", "slept", "slept", "sleeping"),
    "walk": ("walks", "walked", "walked", "walking"),
    "sail": ("sails", "sailed", "sailed", "sailing"),
    "explore": ("explores", "explored", "explored", "exploring"),
    "store": ("stores", "stored", "stored", "storing"),
    "read": ("reads", "read", "read", "reading"),
    "copy": ("copies", "copied", "copied", "copying"),
    "mark": ("marks", "marked", "marked", "marking"),
    "trace": ("traces", "traced", "traced", "tracing"),
    "fold": ("folds", "folded", "folded", "folding"),
    "open": ("opens", "opened", "opened", "opening"),
    "search": ("searches", "searched", "searched", "searching"),
    "think": ("thinks", "thought", "thought", "thinking"),
    "say": ("says", "said", "said", "saying"),
    "know": ("knows", "knew", "known", "knowing"),
    "look": ("looks", "looked", "looked", "looking"),
}

PRONOUNS = [
    ("I", "I", "case=nom,agr.num=sing,agr.p3=-"),
    ("you", "you", "case=nom,agr.p3=-"),
    ("he", "he", "case=nom,agr.num=sing,agr.p3=+"),
    ("she", "she", "case=nom,agr.num=sing,agr.p3=+"),
    ("it", "it", "case=nom,agr.num=sing,agr.p3=+"),
    ("we", "we", "case=nom,agr.num=plur,agr.p3=-"),
    ("they", "they", "case=nom,agr.num=plur,agr.p3=-"),
    ("me", "I", "case=acc,agr.num=sing,agr.p3=-"),
    ("him", "he", "case=acc,agr.num=sing,agr.p3=+"),
    ("her", "she", "case=acc,agr.num=sing,agr.p3=+"),
    ("us", "we", "case=acc,agr.num=plur,agr.p3=-"),
    ("them", "they", "case=acc,agr.num=plur,agr.p3=-"),
]

PROPER = ["Rome", "Peru", "Marco", "Elena", "Lisbon", "Atlantis"]

DETS = [
    ("a", "agr.num=sing"), ("an", "agr.num=sing"), ("the", ""),
    ("every", "agr.num=sing"), ("some", ""), ("this", "agr.num=sing"),
    ("these", "agr.num=plur"), ("that", "agr.num=sing"), ("those", "agr.num=plur"),
]

ADJECTIVES = ["old", "ancient", "new", "rare", "faded", "large", "small",
              "detailed", "foreign", "golden"]
POST_ADVERBS = ["yesterday", "today", "here", "there"]
BOTH_ADVERBS = ["quickly", "carefully"]
PRE_ADVERBS = ["often", "always"]
PREPOSITIONS = ["of", "in", "on", "from", "with", "under", "near", "at", "by"]
PARTICLES = ["out", "up", "down", "off"]
CONJUNCTIONS = ["and", "or", "but"]
INTERJECTIONS = ["oh", "alas"]
CONTRACTIONS = [("I've", "I've"), ("you've", "you've")]

TRANSITIVE = ["study", "draw", "keep", "find", "see", "explore", "store",
              "read", "copy", "mark", "trace", "fold", "open", "search"]
INTRANSITIVE = ["sleep", "walk", "sail"]
SENTENTIAL = ["think", "say", "know"]


def morph_lines():
    lines = []
    for root, plural in sorted(NOUNS.items()):
        lines.append("%s\t%s\tN\tagr.num=sing,agr.p3=+" % (root, root))
        lines.append("%s\t%s\tN\tagr.num=plur,agr.p3=-" % (plural, root))
    for root, (s3, past, ppart, ger) in sorted(VERBS.items()):
        lines.append("%s\t%s\tV\tmode=base" % (root, root))
        lines.append("%s\t%s\tV\tmode=ind,tense=pres,agr.p3=-" % (root, root))
        lines.append("%s\t%s\tV\tmode=ind,tense=pres,agr.num=sing,agr.p3=+" % (s3, root))
        lines.append("%s\t%s\tV\tmode=ind,tense=past" % (past, root))
        lines.append("%s\t%s\tV\tmode=ppart" % (ppart, root))
        lines.append("%s\t%s\tV\tmode=ger" % (ger, root))
    for form in ("have", "has", "had", "having"):
        pass
    lines.append("have\thave\tV\tmode=base")
    lines.append("have\thave\tV\tmode=ind,tense=pres,agr.p3=-")
    lines.append("has\thave\tV\tmode=ind,tense=pres,agr.num=sing,agr.p3=+")
    lines.append("had\thave\tV\tmode=ind,tense=past")
    lines.append("had\thave\tV\tmode=ppart")
    lines.append("having\thave\tV\tmode=ger")
    lines.append("will\twill\tV\tmode=ind")
    lines.append("can\tcan\tV\tmode=ind")
    for form, root, feats in PRONOUNS:
        lines.append("%s\t%s\tPron\t%s" % (form, root, feats))
    for name in PROPER:
        lines.append("%s\t%s\tPropN\tagr.num=sing,agr.p3=+" % (name, name))
    for det, feats in DETS:
        lines.append("%s\t%s\tD\t%s" % (det, det, feats) if feats else "%s\t%s\tD" % (det, det))
    for adj in ADJECTIVES:
        lines.append("%s\t%s\tA" % (adj, adj))
    for adv in POST_ADVERBS + BOTH_ADVERBS + PRE_ADVERBS:
        lines.append("%s\t%s\tAdv" % (adv, adv))
    for prep in PREPOSITIONS:
        lines.append("%s\t%s\tP" % (prep, prep))
    for part in PARTICLES:
        lines.append("%s\t%s\tPL" % (part, part))
    lines.append("that\tthat\tComp")
    lines.append("whether\twhether\tComp")
    for conj in CONJUNCTIONS:
        lines.append("%s\t%s\tConj" % (conj, conj))
    for ij in INTERJECTIONS:
        lines.append("%s\t%s\tIj" % (ij, ij))
    for form, root in CONTRACTIONS:
        lines.append("%s\t%s\tNVC" % (form, root))
    return lines


def syntax_blocks():
    blocks = []

    def block(index, entry, pos, trees=None, fam=None, fs=None, ex=None):
        lines = ["INDEX: %s" % index, "ENTRY: %s" % entry, "POS: %s" % pos]
        if trees:
            lines.append("TREES: %s" % ", ".join(trees))
        if fam:
            lines.append("FAM: %s" % ", ".join(fam))
        if fs:
            lines.append("FS: %s" % ", ".join(fs))
        for e in ex or ():
            lines.append("EX: %s" % e)
        blocks.append("\n".join(lines))

    # nouns follow the map/3 + map/4 pattern: modifier/determined uses,
    # then the bare (plural-only) noun phrase
    for root in sorted(NOUNS):
        i, j = ("3", "4") if root == "map" else ("1", "2")
        block("%s/%s" % (root, i), root, "N",
              trees=["αN", "αNXdxN", "βNn"], fs=["#N_wh-", "#N_refl-"])
        block("%s/%s" % (root, j), root, "N",
              trees=["αNXN"], fs=["#N_wh-", "#N_refl-", "#N_plur"])
    for name in PROPER:
        block("%s/1" % name, name, "PropN", trees=["αNXN"], fs=["#N_wh-"])
    for form, root, _ in PRONOUNS:
        if form == root:
            block("%s/1" % root, root, "Pron", trees=["αNXN"], fs=["#N_wh-"])

    block("have/26", "have", "V", trees=["βVvx"], fs=["#VP_ppart"],
          ex=["he had died; we had died"])
    block("have/69", "NP0 have NP1", "NP0 V NP1", fam=["Tnx0Vnx1"], fs=["#TRANS+"],
          ex=["John has a problem."])
    block("will/1", "will", "V", trees=["βVvx"], fs=["#VP_base"])
    block("can/1", "can", "V", trees=["βVvx"], fs=["#VP_base"])
    block("map/1", "NP0 map out NP1", "NP0 V PL NP1", fam=["Tnx0Vplnx1"])
    block("map/2", "NP0 map NP1", "NP0 V NP1", fam=["Tnx0Vnx1"], fs=["#TRANS+"])
    for root in TRANSITIVE:
        block("%s/1" % root, "NP0 %s NP1" % root, "NP0 V NP1",
              fam=["Tnx0Vnx1"], fs=["#TRANS+"])
    for root in INTRANSITIVE:
        block("%s/1" % root, "NP0 %s" % root, "NP0 V", fam=["Tnx0V"])
    block("sail/2", "NP0 sail NP1", "NP0 V NP1", fam=["Tnx0Vnx1"], fs=["#TRANS+"])
    for root in SENTENTIAL:
        block("%s/2" % root, "NP0 %s S1" % root, "NP0 V S1", fam=["Tnx0Vs1"])
    block("look/1", "NP0 look at NP1", "NP0 V P NP1", fam=["Tnx0Vpnx1"])
    block("look/2", "NP0 look", "NP0 V", fam=["Tnx0V"])

    for det, _ in DETS:
        block("%s/1" % det, det, "D", trees=["αDXD"])
    for adj in ADJECTIVES:
        block("%s/1" % adj, adj, "A", trees=["βAn"])
    for adv in POST_ADVERBS:
        block("%s/1" % adv, adv, "Adv", trees=["βvxARB"])
    for adv in BOTH_ADVERBS:
        block("%s/1" % adv, adv, "Adv", trees=["βvxARB", "βARBvx"])
    for adv in PRE_ADVERBS:
        block("%s/1" % adv, adv, "Adv", trees=["βARBvx"])
    block("of/1", "of", "P", trees=["βnxPnx"])
    for prep in PREPOSITIONS:
        if prep == "of":
            continue
        block("%s/1" % prep, prep, "P", trees=["βnxPnx", "βvxPnx"])
    block("that/1", "that", "Comp", trees=["αComp", "βCOMPs"])
    block("whether/1", "whether", "Comp", trees=["βCOMPs"])
    for conj in CONJUNCTIONS:
        block("%s/1" % conj, conj, "Conj", trees=["βnConjn", "βnxConjnx"])
    return blocks


def main():
    morph = "\n".join(morph_lines()) + "\n"
    with open(os.path.join(OUT, "english.morph"), "w", encoding="utf-8") as f:
        f.write("# inflected form, root, POS, inflection features\n")
        f.write(morph)
    syntax = "\n\n".join(syntax_blocks()) + "\n"
    with open(os.path.join(OUT, "english.syntax"), "w", encoding="utf-8") as f:
        f.write("# syntactic database: INDEX/ENTRY/POS/TREES|FAM/FS/EX records\n\n")
        f.write(syntax)
    print("morph entries:", morph.count("\n"))
    print("syntax records:", syntax.count("INDEX:"))


if __name__ == "__main__":
    main()
