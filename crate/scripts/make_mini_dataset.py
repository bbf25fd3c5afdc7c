#!/usr/bin/env python3
"""Writes the three-topic mini dataset under data/mini and the expected
dataset statistics to data/mini/expected_stats.json.

Dates are mentioned only in ISO form so the expected values can be counted
here without a date recognizer. Every sentence ends with a period followed
by a space and a capital letter, so sentence counts are len(sentences).

Statistics follow the runner's definitions:
  * SentNum, DocsNum, Duration are averaged per topic; Duration is
    last publication - first publication in days.
  * L, K, DurComp, SentComp, DateComp, DateCov are averaged per reference
    timeline. DurComp = L / max(duration, 1). K = N / L.
  * The date set of a topic is publication dates plus mentioned dates in
    [first publication - 3650 days, last publication].
"""

import json
import os
from datetime import date, timedelta

ROOT = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data", "mini")

TOPICS = {
    "harbor-strike": {
        "queries": [],
        "articles": [
            ("hs-1", "2021-04-01", "Dock workers walk out", [
                "Dock workers at the northern harbor walked out on 2021-04-01.",
                "The union cited unpaid overtime.",
                "Shipping lines diverted two vessels.",
            ]),
            ("hs-2", "2021-04-02", "Talks fail", [
                "Talks between the union and the port authority failed on 2021-04-02.",
                "Both sides blamed each other.",
            ]),
            ("hs-3", "2021-04-05", "Cargo piles up", [
                "Containers piled up after the walkout of 2021-04-01.",
                "Retailers warned of shortages.",
                "A mediator was appointed on 2021-04-05.",
                "Union leaders welcomed the mediator.",
            ]),
            ("hs-4", "2021-04-09", "Deal reached", [
                "A deal ending the strike was signed on 2021-04-09.",
                "Workers return on 2021-04-12 under the agreement.",
            ]),
            ("hs-5", "2021-04-09", "Markets react", [
                "Freight rates eased after the deal of 2021-04-09.",
                "Analysts recalled the harbor strike of 2019-06-03.",
            ]),
        ],
        "timelines": [
            ("hs-ref", [
                ("2021-04-01", ["Dock workers walk out over unpaid overtime."]),
                ("2021-04-05", ["A mediator is appointed.", "Cargo piles up at the harbor."]),
                ("2021-04-09", ["A deal ends the strike."]),
            ]),
        ],
    },
    "river-flood": {
        "queries": [],
        "articles": [
            ("rf-1", "2022-07-10", "Rain warning", [
                "Forecasters issued a heavy rain warning on 2022-07-10.",
                "Residents were told to prepare sandbags.",
            ]),
            ("rf-2", "2022-07-12", "River bursts banks", [
                "The river burst its banks on 2022-07-12.",
                "Hundreds of homes were flooded.",
                "Rescue boats reached the old town.",
            ]),
            ("rf-3", "2022-07-13", "Evacuations", [
                "Evacuations continued after the flood of 2022-07-12.",
                "Schools were turned into shelters.",
            ]),
            ("rf-4", "2022-07-13", "Dam inspected", [
                "Engineers inspected the upstream dam on 2022-07-13.",
                "The dam was declared safe.",
            ]),
            ("rf-5", "2022-07-20", "Waters recede", [
                "Waters receded by 2022-07-20.",
                "Cleanup crews moved in.",
                "Officials compared the damage with the flood of 2012-05-30.",
            ]),
            ("rf-6", "2022-07-25", "Aid package", [
                "Parliament approved an aid package on 2022-07-25.",
                "Payments start on 2022-08-01.",
            ]),
        ],
        "timelines": [
            ("rf-ref-a", [
                ("2022-07-12", ["The river bursts its banks."]),
                ("2022-07-13", ["Evacuations continue.", "Engineers inspect the dam."]),
                ("2022-07-20", ["Waters recede."]),
                ("2022-07-25", ["Parliament approves aid."]),
            ]),
            ("rf-ref-b", [
                ("2022-07-12", ["Flooding hits the old town."]),
                ("2022-07-25", ["An aid package is approved."]),
                ("2022-07-28", ["Insurers begin assessing claims."]),
            ]),
        ],
    },
    "tech-merger": {
        "queries": ["merger", "regulators"],
        "articles": [
            ("tm-1", "2023-01-15", "Merger announced", [
                "Two chip makers announced a merger on 2023-01-15.",
                "Shares of both companies rose.",
            ]),
            ("tm-2", "2023-02-20", "Regulators open review", [
                "Regulators opened a review of the merger on 2023-02-20.",
                "The review could take months.",
                "Rivals filed objections.",
            ]),
            ("tm-3", "2023-03-30", "Conditions set", [
                "Regulators set conditions on 2023-03-30.",
                "The companies must sell a testing unit.",
            ]),
            ("tm-4", "2023-04-03", "Merger closes", [
                "The merger closed on 2023-04-03.",
                "It was first rumored on 2022-11-02.",
                "Staff were told on 2023-04-03 about new roles.",
            ]),
        ],
        "timelines": [
            ("tm-ref", [
                ("2023-01-15", ["A merger is announced."]),
                ("2023-02-20", ["Regulators open a review."]),
                ("2023-04-03", ["The merger closes.", "Staff learn of new roles."]),
            ]),
        ],
    },
}


def iso_mentions(sentence):
    out = []
    for tok in sentence.replace(".", " ").split():
        if len(tok) == 10 and tok[4] == "-" and tok[7] == "-":
            out.append(date.fromisoformat(tok))
    return out


def write_topic(name, spec):
    d = os.path.join(ROOT, name)
    os.makedirs(d, exist_ok=True)
    with open(os.path.join(d, "articles.jsonl"), "w") as f:
        for aid, pub, title, sentences in spec["articles"]:
            rec = {"id": aid, "publish_date": pub, "title": title, "text": " ".join(sentences)}
            f.write(json.dumps(rec) + "\n")
    with open(os.path.join(d, "timelines.jsonl"), "w") as f:
        for tname, entries in spec["timelines"]:
            rec = {"name": tname, "entries": [{"date": dt, "summary": s} for dt, s in entries]}
            f.write(json.dumps(rec) + "\n")
    if spec["queries"]:
        with open(os.path.join(d, "keywords.json"), "w") as f:
            json.dump({"queries": spec["queries"]}, f, indent=2)
            f.write("\n")


def mean(xs):
    return sum(xs) / len(xs) if xs else 0.0


def stats():
    sent, docs, dur = [], [], []
    L, K, dur_comp, sent_comp, date_comp, date_cov = [], [], [], [], [], []
    tls = 0
    for name in sorted(TOPICS):
        spec = TOPICS[name]
        pubs = [date.fromisoformat(a[1]) for a in spec["articles"]]
        first, last = min(pubs), max(pubs)
        duration = (last - first).days
        n_sent = sum(len(a[3]) for a in spec["articles"])
        lo = first - timedelta(days=3650)
        dates = set(pubs)
        for a in spec["articles"]:
            for s in a[3]:
                dates.update(m for m in iso_mentions(s) if lo <= m <= last)
        sent.append(float(n_sent))
        docs.append(float(len(spec["articles"])))
        dur.append(float(duration))
        for _, entries in spec["timelines"]:
            tls += 1
            l = len(entries)
            n = sum(len(s) for _, s in entries)
            L.append(float(l))
            K.append(n / l)
            dur_comp.append(l / max(duration, 1))
            sent_comp.append(n / n_sent)
            date_comp.append(l / len(dates))
            covered = sum(1 for dt, _ in entries if date.fromisoformat(dt) in dates)
            date_cov.append(covered / l)
    return {
        "topics": len(TOPICS),
        "tls": tls,
        "avg_sent_num": mean(sent),
        "avg_docs_num": mean(docs),
        "avg_l": mean(L),
        "avg_k": mean(K),
        "avg_duration": mean(dur),
        "avg_dur_comp": mean(dur_comp),
        "avg_sent_comp": mean(sent_comp),
        "avg_date_comp": mean(date_comp),
        "avg_date_cov": mean(date_cov),
    }


def main():
    for name, spec in TOPICS.items():
        write_topic(name, spec)
    with open(os.path.join(ROOT, "expected_stats.json"), "w") as f:
        json.dump(stats(), f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
