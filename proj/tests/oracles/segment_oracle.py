#!/usr/bin/env python3
"""Token-stream sentence/citation oracle used to freeze tests/fixtures/segment_cases.jsonl.

Independent of the C++ scanner: the answer is tokenized with one regex into
markers, whitespace, terminal-punctuation runs, closers and other characters,
and sentences are assembled from the token stream.
"""
import json
import re
import sys

TOKEN = re.compile(r"(?P<marker>\[[0-9]+\])|(?P<space>\s+)|(?P<term>[.!?]+)|(?P<closer>[\"')\u201d\u2019\u00bb])|(?P<other>.)", re.S)
ABBREV = {"mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "cf", "fig", "approx", "e.g", "i.e", "no"}


def tokens(s):
    out = []
    for m in TOKEN.finditer(s):
        kind = m.lastgroup
        text = m.group()
        if kind == "marker" and int(text[1:-1]) < 1:
            # "[0]" is plain text; re-tokenize its characters
            for ch in text:
                out.append(("other", ch))
            continue
        if kind == "term" and len(text) > 1 and text[0] == ".":
            # split so a guarded leading period can be examined alone
            out.append(("term", "."))
            out.append(("term", text[1:]))
            continue
        out.append((kind, text))
    return out


def last_word(chars):
    w = []
    for ch in reversed(chars):
        if ch.isspace() or ch in "(\"":
            break
        w.append(ch)
    return "".join(reversed(w)).lower()


def initialism(w):
    return bool(re.fullmatch(r"[a-z](\.[a-z])*", w))


def segment(answer):
    toks = tokens(answer)
    stmts = []
    cur_text, cur_cites = "", []
    i = 0

    def flush():
        nonlocal cur_text, cur_cites
        text = cur_text.strip()
        if text:
            stmts.append({"text": text, "citations": cur_cites})
        elif stmts:
            stmts[-1]["citations"] += cur_cites
        cur_text, cur_cites = "", []

    while i < len(toks):
        kind, t = toks[i]
        if kind == "marker":
            cur_text = cur_text.rstrip()
            cur_cites.append(int(t[1:-1]))
            i += 1
            continue
        if kind == "term":
            prev_char = cur_text[-1] if cur_text else ""
            nxt = toks[i + 1][1] if i + 1 < len(toks) else ""
            guarded = False
            if t == ".":
                if prev_char.isdigit() and nxt[:1].isdigit():
                    guarded = True
                w = last_word(cur_text)
                if w in ABBREV or initialism(w):
                    guarded = True
            if guarded:
                cur_text += t
                i += 1
                continue
            # absorb the rest of the punctuation run and closers
            run = t
            j = i + 1
            while j < len(toks) and toks[j][0] in ("term", "closer"):
                if toks[j][0] == "term" and run and run[-1] not in ".!?":
                    break
                run += toks[j][1]
                j += 1
            after = toks[j] if j < len(toks) else None
            if after is None or after[0] in ("space", "marker"):
                cur_text += run
                # trailing markers, possibly separated by whitespace
                k = j
                while True:
                    m = k
                    while m < len(toks) and toks[m][0] == "space":
                        m += 1
                    if m < len(toks) and toks[m][0] == "marker":
                        cur_cites.append(int(toks[m][1][1:-1]))
                        k = m + 1
                    else:
                        break
                flush()
                i = k
                continue
            cur_text += t
            i += 1
            continue
        cur_text += t
        i += 1
    flush()
    return stmts


if __name__ == "__main__":
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        case = json.loads(line)
        case["expected"] = segment(case["answer"])
        print(json.dumps(case, ensure_ascii=False))
