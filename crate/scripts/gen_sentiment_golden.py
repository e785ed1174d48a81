"""Regenerate crates/core/tests/fixtures/sentiment_golden.jsonl.

Requires vaderSentiment==3.3.2. Compound scores are stored unrounded.
"""
import json
import pathlib

import vaderSentiment.vaderSentiment as vs

vs.round = lambda x, n=None: x

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "core" / "tests" / "fixtures"

analyzer = vs.SentimentIntensityAnalyzer()
sentences = (FIXTURES / "sentiment_sentences.txt").read_text(encoding="utf-8").splitlines()
with open(FIXTURES / "sentiment_golden.jsonl", "w", encoding="utf-8") as out:
    for s in sentences:
        out.write(json.dumps({"text": s, "compound": analyzer.polarity_scores(s)["compound"]}, ensure_ascii=False) + "\n")
