"""Fetch the public-domain test corpus from npm data packages.

Writes one plain-text book per file into ``tests/data/corpus``:

* ten books of the King James Bible (1769 text, ``kjv`` npm package), one
  verse per paragraph, chosen as the books holding 1000-2000 verses;
* Moby Dick (``@stdlib/datasets-moby-dick``), kept whole.

Run from the repository root::

    python tools/fetch_corpus.py
"""

import io
import json
import re
import tarfile
import urllib.request
from collections import OrderedDict
from pathlib import Path

KJV_URL = "https://registry.npmjs.org/kjv/-/kjv-1.0.0.tgz"
MOBY_URL = "https://registry.npmjs.org/@stdlib/datasets-moby-dick/-/datasets-moby-dick-0.2.3.tgz"
OUT = Path(__file__).resolve().parents[1] / "tests" / "data" / "corpus"


def _member(url, suffix):
    with urllib.request.urlopen(url, timeout=60) as resp:
        blob = resp.read()
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        for m in tar.getmembers():
            if m.name.endswith(suffix):
                return tar.extractfile(m).read().decode("utf-8")
    raise FileNotFoundError(suffix)


def kjv_books():
    verses = json.loads(_member(KJV_URL, "json/verses-1769.json"), object_pairs_hook=OrderedDict)
    books = OrderedDict()
    for ref, text in verses.items():
        book = ref.rsplit(" ", 1)[0]
        # '#' marks a pilcrow, brackets mark translators' italics
        text = text.lstrip("# ").replace("[", "").replace("]", "")
        books.setdefault(book, []).append(text.strip())
    return OrderedDict((b, v) for b, v in books.items() if 1000 <= len(v) <= 2000)


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for book, verses in kjv_books().items():
        name = "kjv_" + re.sub(r"\W+", "_", book.lower()) + ".txt"
        (OUT / name).write_text("\n\n".join(verses) + "\n", encoding="utf-8")
        print(name, len(verses))
    moby = _member(MOBY_URL, "data/data.txt")
    (OUT / "moby_dick.txt").write_text(moby, encoding="utf-8")
    print("moby_dick.txt", len(moby))


if __name__ == "__main__":
    main()
