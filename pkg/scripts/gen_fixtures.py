#!/usr/bin/env python3
"""Regenerate the checked-in test fixtures.

Produces the acquisition fixture corpus, its lexicon TSVs, the recorded
replay responses, and the golden prompt files. Run from the repo root:

    python3 scripts/gen_fixtures.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from ecrkit import load_corpus, resolve_nested_links  # noqa: E402
from ecrkit.llm import build_g1_prompt, build_g2_prompt, ReplayTransport  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "tests", "data")

S_HP = ("HP today announced that it has signed a definitive agreement to "
        "acquire EYP Mission Critical Facilities Inc.")
S_FIN = "Financial details of the acquisition were not disclosed."
S_STATE = "HP stated it agreed to acquire EYP this week."
S_EDS = ("Earlier this month Hewlett-Packard unveiled a bid of nearly $14 "
         "billion to purchase Electronic Data Systems.")


def mention(mid, topic, doc, sid, sentence, trigger, lemma, gold, ann,
            split="dev"):
    start = sentence.index(trigger)
    return {
        "mention_id": mid, "topic_id": topic, "doc_id": doc,
        "sentence_id": sid, "sentence": sentence, "trigger_text": trigger,
        "trigger_start": start, "trigger_end": start + len(trigger),
        "lemma": lemma, "gold_cluster": gold, "split": split,
        "annotations": ann,
    }


def both(ann):
    return {"A1": ann, "A2": json.loads(json.dumps(ann))}


CORPUS = [
    mention("m1", "t39", "d1", 0, S_HP, "acquire", "acquire", "ACQ", both({
        "roleset": "acquire.01", "arg0": "HP",
        "arg1": {"kind": "entity", "text": "EYP"},
        "arg_loc": "New York", "arg_time": "11-12-2007",
    })),
    mention("m4", "t39", "d1", 0, S_HP, "announced", "announce", "ANN", both({
        "roleset": "announce.01", "arg0": "HP",
        "arg1": {"kind": "event", "roleset": "sign.02"},
        "arg_time": "11-12-2007",
    })),
    mention("m4s", "t39", "d1", 0, S_HP, "signed", "sign", "SIGN", both({
        "roleset": "sign.02", "arg0": "HP",
        "arg1": {"kind": "event", "roleset": "acquire.01"},
    })),
    mention("m2", "t39", "d2", 0, S_FIN, "acquisition", "acquire", "ACQ", both({
        "roleset": "acquire.01", "arg0": "HP",
        "arg1": {"kind": "entity", "text": "EYP"},
        "arg_loc": "New York", "arg_time": "11-12-2007",
    })),
    mention("m5", "t39", "d2", 1, S_STATE, "stated", "state", "ANN", both({
        "roleset": "state.01", "arg0": "HP",
        "arg1": {"kind": "event", "roleset": "acquire.01"},
        "arg_time": "11-12-2007",
    })),
    mention("m2a", "t39", "d2", 1, S_STATE, "acquire", "acquire", "ACQ", both({
        "roleset": "acquire.01", "arg0": "HP",
        "arg1": {"kind": "entity", "text": "EYP"},
    })),
    mention("m3", "t39", "d3", 0, S_EDS, "purchase", "purchase", "PUR", both({
        "roleset": "purchase.01", "arg0": "Hewlett-Packard",
        "arg1": {"kind": "entity", "text": "Electronic Data Systems"},
        "arg_loc": "Palo Alto", "arg_time": "05-13-2008",
    })),
]

VN_TSV = """\
# roleset\tclass_id
acquire.01\t13.5.1
purchase.01\t13.5.1
announce.01\t37.7
state.01\t37.7
agree.01\t36.1
"""

ALIAS_TSV = """\
# surface\tcanonical_id
hewlett-packard\tHP
hp\tHP
eyp\tEYP
eyp mission critical facilities inc.\tEYP
electronic data systems\tEDS
eds\tEDS
"""


def write_corpus():
    path = os.path.join(DATA, "acquisition_corpus.jsonl")
    with open(path, "w", encoding="utf-8") as f:
        for record in CORPUS:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
    with open(os.path.join(DATA, "vn_map.tsv"), "w", encoding="utf-8") as f:
        f.write(VN_TSV)
    with open(os.path.join(DATA, "alias_map.tsv"), "w", encoding="utf-8") as f:
        f.write(ALIAS_TSV)
    return path


RESPONSE_TEMPLATES = {
    "m1": {
        "What is the event trigger?": "acquire",
        "Is it a Nested Event?": "No",
        "Roleset ID": "acquire.01",
        "ARG-0": "HP", "ARG-0 Coreference": "/wiki/Hewlett-Packard",
        "ARG-1": "EYP Mission Critical Facilities Inc.",
        "ARG-1 Coreference": "/wiki/EYP_Mission_Critical_Facilities",
        "ARG-Location": "/wiki/New_York_City", "ARG-Time": "11-12-2007",
        "Event Description": "HP (/wiki/Hewlett-Packard) acquired (acquire.01) "
                             "EYP (/wiki/EYP_Mission_Critical_Facilities) in "
                             "New York City on 11-12-2007.",
    },
    "m4": {
        "Is it a Nested Event?": "Yes",
        "Roleset ID": "announce.01",
        "ARG-0": "HP", "ARG-0 Coreference": "/wiki/Hewlett-Packard",
        "ARG-1": "that it has signed a definitive agreement",
        "ARG-1 Roleset ID": "sign.02",
        "ARG-Time": "11-12-2007",
        "Event Description": "HP announced (announce.01) the signing of an "
                             "acquisition agreement on 11-12-2007.",
    },
}


def response_for(mid):
    template = RESPONSE_TEMPLATES.get(mid)
    if template is None:
        template = dict(RESPONSE_TEMPLATES["m1"])
        template["Event Description"] += f" [{mid}]"
    return "```json\n" + json.dumps(template, indent=2) + "\n```"


def write_replay_and_golden(corpus_path):
    corpus = load_corpus(corpus_path)
    resolve_nested_links(corpus)
    records = []
    golden_dir = os.path.join(DATA, "golden")
    os.makedirs(golden_dir, exist_ok=True)
    for m in corpus.mentions:
        bundle = build_g1_prompt(m, corpus.document_text(m.doc_id))
        records.append({"request_hash": bundle.request_hash(),
                        "response_text": response_for(m.mention_id)})
        if m.mention_id == "m1":
            with open(os.path.join(golden_dir, "m1.G1.txt"), "w") as f:
                f.write(bundle.system_text + "\n---\n" + bundle.user_text)
    replay_path = os.path.join(DATA, "replay_g1.jsonl")
    with open(replay_path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")

    # G2 needs the G1 pool; record G2 requests reusing the same payloads.
    from ecrkit.llm import annotate_corpus, build_pool, dedupe_pool, G1
    from ecrkit.eid import EidConfig
    from ecrkit.corpus import Lexicons

    transport = ReplayTransport(replay_path)
    g1_run = annotate_corpus(corpus, transport, G1)
    pool = dedupe_pool(build_pool(corpus, g1_run), EidConfig(), Lexicons.empty())
    for m in corpus.mentions:
        bundle = build_g2_prompt(m, pool)
        records.append({"request_hash": bundle.request_hash(),
                        "response_text": response_for(m.mention_id)})
        if m.mention_id == "m1":
            with open(os.path.join(golden_dir, "m1.G2.txt"), "w") as f:
                f.write(bundle.system_text + "\n---\n" + bundle.user_text)
    with open(replay_path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec) + "\n")


def write_parse_fixtures():
    """20 recorded responses for the parse round-trip test."""
    fixtures = []
    for i in range(20):
        obj = {
            "Roleset ID": f"verb{i}.0{i % 9 + 1}",
            "ARG-0": f"Agent {i}",
            "ARG-0 Coreference": f"/wiki/Agent_{i}",
            "ARG-1": f"Theme {i}",
            "ARG-1 Coreference": f"/wiki/Theme_{i}",
            "ARG-Location": f"/wiki/Place_{i}",
            "ARG-Time": f"{i % 12 + 1}-{i % 28 + 1}-200{i % 10}",
            "Event Description": f"Agent {i} did verb{i} to Theme {i}.",
        }
        if i % 3 == 0:
            obj["ARG-1 Roleset ID"] = f"verb{i + 1}.01"
        if i % 4 == 0:
            obj["Best Matching Event Description"] = f"Description {i}"
        fixtures.append(json.dumps(obj, indent=2))
    with open(os.path.join(DATA, "parse_fixtures.json"), "w") as f:
        json.dump(fixtures, f, indent=1)


if __name__ == "__main__":
    os.makedirs(DATA, exist_ok=True)
    corpus_path = write_corpus()
    write_replay_and_golden(corpus_path)
    write_parse_fixtures()
    print("fixtures written to", DATA)
