#!/usr/bin/env python3
"""Generate the bundled mini corpus under fixtures/mini/.

Three taxa (lion, pangolin, elephant) from the mammal name list, fifty
stored news articles with their pages, and a small post archive. Every
article is built with a declared fate (queried by which taxa, relevant or
not, where its full text comes from, original or copy), and the expected
funnel is summed from those declarations into expected_funnel.json.

The script also checks its own copies: TF-IDF cosine of every planted copy
to its source is above 0.95 and every pair of originals is well below it.

Usage: python3 scripts/gen_mini_corpus.py
"""

import json
import math
import random
import re
import shutil
from collections import Counter
from datetime import datetime, timedelta, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "fixtures" / "mini"
STOPWORDS = set(
    w.strip().lower()
    for w in (ROOT / "crates" / "core" / "data" / "stopwords.txt").read_text().splitlines()
    if w.strip() and not w.startswith("#")
)
TAXA = ["elephant", "lion", "pangolin"]
START = datetime(2021, 1, 1, tzinfo=timezone.utc)
END = datetime(2022, 1, 1, tzinfo=timezone.utc)

rng = random.Random(20240301)

PLACES = [
    "Kruger", "Serengeti", "Etosha", "Okavango", "Hwange", "Masai Mara", "Gorongosa", "Luangwa", "Kafue",
    "Selous", "Tsavo", "Amboseli", "Chobe", "Ruaha", "Samburu", "Laikipia", "Kaziranga", "Periyar",
    "Sabah", "Palawan", "Zambezi", "Kidepo", "Mana Pools", "Akagera", "Niassa",
]
PEOPLE = [
    "Amara Okafor", "Daniel Mwangi", "Priya Raman", "Lucia Fernandes", "Tomas Berg", "Grace Achieng",
    "Hannah Lindqvist", "Samuel Osei", "Mei Tanaka", "Carlos Rivera", "Fatima Diallo", "Jonas Weber",
    "Nadia Haddad", "Peter Kamau", "Sofia Rossi", "Ibrahim Bello", "Aiko Sato", "Ruth Njeri",
]
ROLES = ["ranger", "ecologist", "veterinarian", "guide", "researcher", "warden", "photographer", "farmer"]
NEUTRAL = [
    "Officials in {place} said the survey covered {n} square kilometres over {m} weeks.",
    "{person}, a {role} who has worked in {place} for {m} years, described the count in detail.",
    "Data from {n} camera traps were reviewed by a team based near {place}.",
    "The report will be presented to the regional council in {month}.",
    "Local radio stations in {place} carried the announcement on {weekday} morning.",
    "A second survey is planned for {month}, weather permitting.",
    "The district has roughly {n} residents, many of whom depend on cattle and maize.",
    "{person} noted that the dry season started {m} weeks later than usual this year.",
]
POSITIVE = [
    "Rangers were delighted to record {n} healthy {animal}s near {place}, a wonderful result.",
    "{person} called the recovery of the {animal} population a great success for the whole community.",
    "Tourism operators in {place} are thrilled and say visitors love seeing the {animal}s.",
    "The new corridor has been a remarkable help, and the {animal}s are thriving.",
    "Villagers praised the team and said they feel hopeful and proud.",
    "It is an excellent year, and the calves look strong and playful.",
]
NEGATIVE = [
    "Rangers were horrified to find {n} dead {animal}s near {place}, a terrible loss.",
    "{person} said the killing of the {animal}s was a tragic and devastating blow.",
    "Poachers remain a serious threat, and officials fear the worst for the {animal}s.",
    "Farmers in {place} are angry after losing livestock, and conflict with the {animal}s is worsening.",
    "The drought has been cruel, and several {animal}s died of starvation.",
    "Critics blamed the ministry for a shameful failure to stop the trafficking.",
]
MONTHS = ["January", "March", "May", "July", "September", "November"]
WEEKDAYS = ["Monday", "Tuesday", "Wednesday", "Thursday", "Friday"]
DOMAINS = [
    "dailywire.example", "savannahpost.example", "earthdesk.example", "nationtimes.example",
    "greenledger.example", "coastherald.example", "fieldnotes.example", "worldbeat.example",
]
COUNTRIES = ["KE", "ZA", "TZ", "IN", "GB", "US", "NA", "BW"]


def fill(template, animal):
    return template.format(
        place=rng.choice(PLACES), person=rng.choice(PEOPLE), role=rng.choice(ROLES),
        n=rng.randint(3, 480), m=rng.randint(2, 30), month=rng.choice(MONTHS),
        weekday=rng.choice(WEEKDAYS), animal=animal,
    )


def body(animal, tone, sentences=9, mention=True):
    pool = POSITIVE if tone > 0 else NEGATIVE
    lines = []
    for i in range(sentences):
        if mention and i == 0:
            lines.append(fill(rng.choice([t for t in pool if "{animal}" in t]), animal))
        elif mention and i % 3 == 0:
            lines.append(fill(rng.choice(pool), animal))
        else:
            lines.append(fill(rng.choice(NEUTRAL), animal))
    text = " ".join(lines)
    assert mention or animal not in text.lower()
    return text


def when(day_of_year, hour=9):
    return START + timedelta(days=day_of_year, hours=hour)


def page_html(title, text, charset="utf-8", short=False):
    paras = re.split(r"(?<=[.!?]) (?=[A-Z])", text)
    chunks = [" ".join(paras[i:i + 3]) for i in range(0, len(paras), 3)]
    article = "\n".join(f"    <p>{c}</p>" for c in chunks)
    if short:
        article = "    <p>Subscribe to read this story.</p>"
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
  <meta charset="{charset}">
  <title>{title}</title>
</head>
<body>
  <nav class="site-menu"><a href="/">Home</a> | <a href="/world">World</a> | <a href="/science">Science</a> | <a href="/sport">Sport</a> | <a href="/opinion">Opinion</a></nav>
  <div class="sidebar related"><ul><li><a href="/a">Markets close higher</a></li><li><a href="/b">Weekend weather outlook</a></li><li><a href="/c">Letters to the editor</a></li></ul></div>
  <header class="headline"><h1>{title}</h1></header>
  <article class="story-body">
{article}
  </article>
  <footer class="site-footer">Copyright 2021. All rights reserved. <a href="/privacy">Privacy</a> <a href="/terms">Terms</a></footer>
</body>
</html>
"""


articles = []   # stored articles, provider view
pages = []      # page index
expect = []     # declared fate per (taxon, url)
counter = Counter()


def slug(s):
    return re.sub(r"[^a-z0-9]+", "-", s.lower()).strip("-")[:48]


def add(title, text, at, *, taxa, relevant=True, fetch="live", mention=True, copy_of=None,
        language="english", charset="utf-8", domain=None, country=None):
    """fetch: live | archive | pdf-archive | offline-archive | dead | short"""
    counter["n"] += 1
    domain = domain or rng.choice(DOMAINS)
    url = f"https://{domain}/news/{at:%Y/%m/%d}/{slug(title)}-{counter['n']}"
    articles.append({
        "url": url, "title": title, "domain": domain, "published_at": at.strftime("%Y-%m-%dT%H:%M:%SZ"),
        "country": country or rng.choice(COUNTRIES), "language": language, "text": text,
    })
    stem = f"p{counter['n']:02d}"
    entry = {"url": url}
    html = page_html(title, text, charset=charset)
    data = html.encode(charset)
    if fetch == "live":
        entry.update(live_status=200, live_file=f"{stem}.html", content_type=f"text/html; charset={charset}")
        (OUT / "pages" / f"{stem}.html").write_bytes(data)
    elif fetch == "archive":
        entry.update(live_status=404, archive_file=f"{stem}.archive.html")
        (OUT / "pages" / f"{stem}.archive.html").write_bytes(data)
    elif fetch == "pdf-archive":
        entry.update(live_status=200, live_file=f"{stem}.pdf", content_type="application/pdf",
                     archive_file=f"{stem}.archive.html")
        (OUT / "pages" / f"{stem}.pdf").write_bytes(b"%PDF-1.4\n% not html\n")
        (OUT / "pages" / f"{stem}.archive.html").write_bytes(data)
    elif fetch == "offline-archive":
        entry.update(archive_file=f"{stem}.archive.html")
        (OUT / "pages" / f"{stem}.archive.html").write_bytes(data)
    elif fetch == "dead":
        entry.update(live_status=410)
    elif fetch == "short":
        entry.update(live_status=200, live_file=f"{stem}.html", content_type="text/html")
        (OUT / "pages" / f"{stem}.html").write_text(page_html(title, text, short=True))
    else:
        raise ValueError(fetch)
    pages.append(entry)
    for t in taxa:
        expect.append({
            "taxon_id": t, "url": url, "relevant": relevant,
            "scraped": relevant and fetch not in ("dead", "short"),
            "copy_of": copy_of, "mention": mention, "text": text, "at": at,
        })
    return url, text


def copy_text(text):
    words = text.split(" ")
    i = rng.randrange(len(words))
    while not words[i].isalpha():
        i = rng.randrange(len(words))
    words[i] = "reportedly"
    return " ".join(words)


def build_taxon(animal, n_orig, tone_switch_day, first_day, last_day):
    days = sorted(rng.sample(range(first_day, last_day), n_orig))
    made = []
    for d in days:
        tone = 1 if d >= tone_switch_day else -1
        title = rng.choice([
            f"{animal.capitalize()} numbers in focus after new survey",
            f"Rangers report on {animal}s in the reserve",
            f"What the latest count says about the {animal}",
            f"Conservation groups weigh in on {animal} protection",
            f"Wildlife officials release {animal} figures",
        ])
        made.append((title, body(animal, tone), when(d), tone))
    return made


def main():
    if OUT.exists():
        shutil.rmtree(OUT)
    (OUT / "pages").mkdir(parents=True)

    # Lion: sentiment turns positive mid-year, coverage rises with it.
    lion = build_taxon("lion", 12, 180, 5, 360)
    lion_urls = []
    for i, (title, text, at, _) in enumerate(lion):
        fetch = "archive" if i in (2, 7) else "live"
        lion_urls.append(add(title, text, at, taxa=["lion"], fetch=fetch))
    for src in (1, 5, 9):
        url, text = lion_urls[src]
        at = datetime.fromisoformat(next(a for a in articles if a["url"] == url)["published_at"].replace("Z", "+00:00"))
        add(lion[src][0] + " (syndicated)", copy_text(text), at + timedelta(days=3 + src), taxa=["lion"],
            copy_of=url, domain="wirefeed.example")
    add("Lion pride relocated to new reserve", body("lion", 1), when(200), taxa=["lion"], fetch="dead")
    add("Lion conservation effort wins award",
        body("lion", 1, mention=False), when(240), taxa=["lion"], mention=False)
    add("Detroit rookie quarterback leads team to season win",
        "The Detroit Lions beat Chicago in the season opener. " + body("quarterback", 1, mention=False),
        when(250), taxa=["lion"], relevant=False)
    add("Broadway musical revival sells out opening week",
        "The Lion King returns to the stage with a new cast. " + body("musical", 1, mention=False),
        when(120), taxa=["lion"], relevant=False)
    # Not retrieved: negative keywords, outside the window, other language.
    add("Sea lions haul out on the harbour pier", body("sea lion", 1), when(60), taxa=[])
    add("Mountain lion spotted near hiking trail", body("mountain lion", -1), when(90), taxa=[])
    add("Lion cubs born at sanctuary", body("lion", 1), START - timedelta(days=20), taxa=[])
    add("Nacen tres cachorros de lion en el parque", "Los cachorros de lion nacieron en el parque nacional.",
        when(100), taxa=[], language="spanish")

    # Pangolin: steady negative coverage about trafficking.
    pang = build_taxon("pangolin", 8, 400, 10, 330)
    pang_urls = []
    for i, (title, text, at, _) in enumerate(pang):
        fetch = "pdf-archive" if i == 3 else "live"
        pang_urls.append(add(title, text, at, taxa=["pangolin"], fetch=fetch))
    url, text = pang_urls[0]
    at0 = pang[0][2]
    add(pang[0][0] + " (wire)", copy_text(text), at0 + timedelta(days=12), taxa=["pangolin"], copy_of=url,
        domain="wirefeed.example")
    # Same text 90 days later: outside the syndication window, so an original.
    url, text = pang_urls[1]
    add(pang[1][0] + " (archive reprint)", text, pang[1][2] + timedelta(days=90), taxa=["pangolin"],
        domain="reprints.example")
    add("Pangolin scales seized at port", body("pangolin", -1), when(150), taxa=["pangolin"], fetch="short")
    add("Senate vote on trade bill delayed again",
        "Senators also debated the pangolin scale trade. " + body("senator", -1, mention=False),
        when(170), taxa=["pangolin"], relevant=False)

    # Elephant.
    ele = build_taxon("elephant", 9, 150, 3, 355)
    ele_urls = []
    for i, (title, text, at, _) in enumerate(ele):
        fetch = "offline-archive" if i == 4 else "live"
        charset = "windows-1252" if i == 6 else "utf-8"
        if charset != "utf-8":
            text = text + " The café owner in town said visitors returned."
        ele_urls.append(add(title, text, at, taxa=["elephant"], fetch=fetch, charset=charset))
    for src in (0, 3):
        url, text = ele_urls[src]
        add(ele[src][0] + " (syndicated)", copy_text(text), ele[src][2] + timedelta(days=5), taxa=["elephant"],
            copy_of=url, domain="wirefeed.example")
    both = body("elephant", 1) + " " + body("lion", 1)
    add("Elephant and lion populations recover in the park", both, when(300), taxa=["elephant", "lion"])
    add("Comedy film about a circus troupe tops the box office",
        "The film features an elephant named Rosie. " + body("actor", 1, mention=False),
        when(210), taxa=["elephant"], relevant=False)
    add("Elephant seals crowd the beach", body("elephant seal", 1), when(40), taxa=[])
    add("Elephant shrew rediscovered in Djibouti", body("elephant shrew", 1), when(200), taxa=[])

    assert len(articles) == 50, len(articles)
    check_similarity()

    with open(OUT / "articles.jsonl", "w") as f:
        for a in articles:
            f.write(json.dumps(a, ensure_ascii=False) + "\n")
    with open(OUT / "pages" / "index.jsonl", "w") as f:
        for p in pages:
            f.write(json.dumps(p) + "\n")
    write_posts()
    write_funnel()
    shutil.copy(ROOT / "fixtures" / "taxonomy" / "mammals.tsv", OUT / "species.tsv")
    (OUT / "edits.jsonl").write_text(
        '{"edit_kind": "remove_edge", "a": "sub:lion", "b": "sub:sea lion", '
        '"timestamp": "2024-03-01T10:00:00Z", "author": "curator"}\n'
        '{"edit_kind": "remove_edge", "a": "common:mountain lion", "b": "sub:lion", '
        '"timestamp": "2024-03-01T10:01:00Z", "author": "curator"}\n'
    )
    (OUT / "config.toml").write_text(CONFIG)


CONFIG = """# Offline configuration for the bundled mini corpus.
output_dir = "out"
seed = 42

[taxonomy]
species = "species.tsv"
edits = "edits.jsonl"
select = ["elephant", "lion", "pangolin"]

[retrieval]
language = "english"
start = "2021-01-01T00:00:00Z"
end = "2022-01-01T00:00:00Z"
max_records_per_call = 8
provider = { kind = "fixture", articles = "articles.jsonl" }
posts = "posts.jsonl"

[relevance]
backend = { kind = "fallback" }

[extraction]
pages = { kind = "fixture", dir = "pages" }

[http]
requests_per_second = 0.0
"""


def tokens(text):
    return [w for w in re.findall(r"[a-z0-9]+", text.lower()) if len(w) >= 2 and w not in STOPWORDS]


def check_similarity():
    for t in TAXA:
        docs = [e for e in expect if e["taxon_id"] == t and e["scraped"]]
        tfs = [Counter(tokens(e["text"])) for e in docs]
        df = Counter(w for tf in tfs for w in tf)
        n = len(docs)
        vecs = []
        for tf in tfs:
            v = {w: c * (math.log((1 + n) / (1 + df[w])) + 1) for w, c in tf.items()}
            norm = math.sqrt(sum(x * x for x in v.values()))
            vecs.append({w: x / norm for w, x in v.items()})
        cos = lambda a, b: sum(x * b.get(w, 0.0) for w, x in a.items())
        by_url = {e["url"]: i for i, e in enumerate(docs)}
        for i, e in enumerate(docs):
            if e["copy_of"]:
                c = cos(vecs[i], vecs[by_url[e["copy_of"]]])
                assert c > 0.97, (t, e["url"], c)
        for i in range(n):
            for j in range(i + 1, n):
                if docs[i]["copy_of"] or docs[j]["copy_of"] or docs[i]["text"] == docs[j]["text"]:
                    continue
                c = cos(vecs[i], vecs[j])
                assert c < 0.8, (t, docs[i]["url"], docs[j]["url"], c)


POSTS = []


def post(pid, text, day, taxon_id=None, geo=None, at=None):
    rec = {"post_id": pid, "text": text,
           "published_at": (at or when(day, 14)).strftime("%Y-%m-%dT%H:%M:%SZ")}
    if geo:
        rec["geo"] = {"latitude": geo[0], "longitude": geo[1]}
    if taxon_id:
        rec["taxon_id"] = taxon_id
    POSTS.append(json.dumps(rec, ensure_ascii=False))


def write_posts():
    expected = Counter()
    analyzed = Counter()
    lion_lines = [
        "Saw a lion at dawn, absolutely magical!", "The lions at the waterhole were stunning today.",
        "So sad to hear about the poisoned lions.", "Lion roar at night, terrifying and wonderful.",
        "Another lion killed by a snare. Heartbreaking.", "Best safari ever, three lions on a kill!",
        "Lion cubs playing near the road, adorable.", "Why is nobody stopping the lion bone trade?",
    ]
    for i, t in enumerate(lion_lines):
        post(f"l{i}", t, 20 + 40 * i, geo=(-2.3 + i * 0.1, 34.8))
        expected["lion"] += 1
        analyzed["lion"] += 1
    for i, t in enumerate(["Pangolins are the most trafficked mammal. Awful.",
                           "Rescued pangolin released back to the forest, great news!",
                           "A pangolin curled into a ball on the trail, so cute.",
                           "Pangolin scales are not medicine. Stop the trade."]):
        post(f"p{i}", t, 30 + 70 * i)
        expected["pangolin"] += 1
        analyzed["pangolin"] += 1
    for i, t in enumerate(["Elephant herd crossing the river, beautiful.",
                           "Ivory poaching is killing elephants. Terrible.",
                           "The baby elephant at the orphanage is doing well!",
                           "Elephants raided the maize field again, farmers furious."]):
        post(f"e{i}", t, 25 + 80 * i)
        expected["elephant"] += 1
        analyzed["elephant"] += 1
    post("b0", "A lion and an elephant at the same waterhole, incredible.", 222)
    for t in ("lion", "elephant"):
        expected[t] += 1
        analyzed[t] += 1
    post("x0", "What a great morning on the reserve, no animals yet.", 180, taxon_id="lion")
    expected["lion"] += 1
    post("x1", "Sea lions barking all night at the marina.", 190)
    post("x2", "Tigers are my favourite.", 200, taxon_id="tiger")
    post("x3", "Old lion photo from my trip.", 0, at=START - timedelta(days=3))
    POSTS.append('{"post_id": "bad0", "text": "truncated')
    post("bad1", "A lion far from land.", 210, geo=(95.0, 10.0))
    post("l0", "Duplicate id about a lion.", 211)
    (OUT / "posts.jsonl").write_text("\n".join(POSTS) + "\n")
    write_posts.expected = expected
    write_posts.analyzed = analyzed
    write_posts.rejected = 3


def write_funnel():
    rows = []
    for t in TAXA:
        es = [e for e in expect if e["taxon_id"] == t]
        scraped = [e for e in es if e["scraped"]]
        originals = [e for e in scraped if not e["copy_of"]]
        rows.append({
            "taxon_id": t,
            "queried": len(es),
            "relevant": sum(e["relevant"] for e in es),
            "irrelevant": sum(not e["relevant"] for e in es),
            "scraped": len(scraped),
            "full_text_unavailable": sum(e["relevant"] and not e["scraped"] for e in es),
            "original": len(originals),
            "syndicated": len(scraped) - len(originals),
            "analyzed": sum(e["mention"] for e in originals),
            "posts": write_posts.expected[t],
            "posts_analyzed": write_posts.analyzed[t],
        })
    doc = {"funnel": rows, "rejected_posts": write_posts.rejected}
    (OUT / "expected_funnel.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main()
