#!/usr/bin/env python3
"""Regenerates tests/fixtures/oracle_200.jsonl.

The gold labels are constructed to equal what the deterministic mock backend
infers from each text, so end-to-end mock evaluation must score 100%.
Keyword map (first hit in this order wins):
  frustrat -> frustration, confus -> confusion, bored/boring -> boredom,
  worried/anxious -> anxiety, love/enjoy/excited -> joy, none -> neutral
Engagement: text longer than 400 chars or containing '?' -> high, else low.
Behavior: confusion iff 'confus' appears, frustration iff 'frustrat' appears.
"""

import json
import sys

TOPICS = [
    "algebra", "geometry", "statistics", "photosynthesis", "grammar",
    "thermodynamics", "recursion", "probability", "syntax trees", "the essay",
]

# (emotion label, text template). Templates must contain exactly the intended
# keywords and no stray ones.
TEMPLATES = [
    ("frustration", "I am really struggling with {t}, and it's making me feel frustrated."),
    ("frustration", "Week after week {t} keeps going wrong for me and the frustration is building."),
    ("confusion", "The section on {t} left me confused about the main idea."),
    ("confusion", "I keep mixing up the steps in {t}; the whole thing is confusing."),
    ("boredom", "Honestly the {t} lecture felt boring and I tuned out halfway."),
    ("boredom", "We repeated {t} again today and I was bored the entire time."),
    ("anxiety", "I get anxious whenever the {t} quiz timer starts counting down."),
    ("anxiety", "I'm worried that my {t} grade will drop after this unit."),
    ("joy", "I really enjoy working through the {t} exercises each evening."),
    ("joy", "I was excited to present my {t} project to the group."),
    ("neutral", "I submitted the {t} assignment before the deadline."),
    ("neutral", "Our group met twice this week to plan the {t} report."),
    # '?' in the text flips mock engagement to high.
    ("confusion", "Could someone walk me through {t} again? I am still confused by the notation."),
    ("frustration", "Why does {t} never work the way the notes say? It is frustrating."),
    ("neutral", "When is the {t} submission window open?"),
    ("joy", "Can we do more sessions like the {t} one? I really enjoy them."),
]

MODALITIES = ["written_response", "discussion_post", "chat_message"]
CONTEXTS = ["course-A", "course-B"]

KEYWORDS = ["frustrat", "confus", "bored", "boring", "worried", "anxious",
            "love", "enjoy", "excited"]
LABEL_OF = {"frustrat": "frustration", "confus": "confusion", "bored": "boredom",
            "boring": "boredom", "worried": "anxiety", "anxious": "anxiety",
            "love": "joy", "enjoy": "joy", "excited": "joy"}


def derive_gold(text):
    lower = text.lower()
    emotion = "neutral"
    for kw in KEYWORDS:
        if kw in lower:
            emotion = LABEL_OF[kw]
            break
    engagement = "high" if len(text) > 400 or "?" in text else "low"
    behavior = {"confusion": "confus" in lower, "frustration": "frustrat" in lower}
    return {"emotion": emotion, "engagement": engagement, "behavior": behavior}


def main(path):
    records = []
    i = 0
    while len(records) < 200:
        label, template = TEMPLATES[i % len(TEMPLATES)]
        topic = TOPICS[(i // len(TEMPLATES)) % len(TOPICS)]
        text = template.format(t=topic)
        gold = derive_gold(text)
        assert gold["emotion"] == label, (text, gold, label)
        records.append({
            "id": f"s{len(records) + 1:03d}",
            "text": text,
            "modality": MODALITIES[i % len(MODALITIES)],
            "context": CONTEXTS[i % len(CONTEXTS)],
            "gold": gold,
        })
        i += 1
    with open(path, "w") as f:
        for record in records:
            f.write(json.dumps(record) + "\n")
    print(f"wrote {len(records)} records to {path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures/oracle_200.jsonl")
