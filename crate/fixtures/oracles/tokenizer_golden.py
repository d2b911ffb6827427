#!/usr/bin/env python3
"""Reference tokenizer oracle.

Runs the tweet word pattern through Python's `re` engine and freezes the
result as a JSON-lines golden file:

    {"text": ..., "tokens": [{"text", "kind", "start", "end"}, ...]}

Offsets are code-point offsets. Regenerate with:

    python3 fixtures/oracles/tokenizer_golden.py > fixtures/tokenizer_golden.jsonl
"""
import json
import re
import sys

# Word characters: Unicode letters, digits, underscore. Python's `\w` for
# str patterns is exactly isalnum() plus underscore.
BRANCHES = [
    ("Abbreviation", r"c/o|b/c|w/o|w/|\+/-"),
    ("NumberLike", r"\d+(?:[.,:/-]\d+)+"),
    ("Smiley", r"(?:[:;][-=]?|=)[Dp(|)][D()]*|<3+"),
    ("Url", r"(?:https?\:\/\/|www\.)[a-zA-Z0-9/.?=&\-#]*[a-zA-Z0-9/]"),
    ("Tag", r"[#@]\w+"),
    ("Word", r"\w+(?:-\w+)*(?:'\w+)?"),
    ("Symbol", r"[$£€¥¢§@&#]"),
]
PATTERN = re.compile("|".join("(%s)" % body for _, body in BRANCHES))

TWEETS = [
    "@merazindagi Thanks! Will make more 4 U. Live performances in #boulder area will be on http://saxy.us :) #jazz",
    "@merazindagi Thanks! Will make more 4 U. Live performances in\n#boulder area will be on http://saxy.us :) #jazz #rock #funk\n#dance #livemusic",
    "b/c 12.5/3 <33 :-D",
    "",
    "no tags here",
    "#Jazz and #jazz",
    "4",
    "c/o w/o w/ +/- b/c",
    "w/out the b/c-thing",
    "meet me at 10:30 on 11/05/2009, ok?",
    "price is $5 or £4 or €3.50 & ¥ ¢ § # @",
    "3.14159 vs 3,000,000 vs 2009-11-01",
    "I <3 you <333 :( ;) =D :-p ;-( :|",
    ":D:D:D",
    "=) =( =| :) :P",
    "check www.example.com/path?q=1&x=2 now",
    "https://twitter.com/#!/search?q=%23jazz",
    "http://bit.ly/abc123.",
    "link:http://foo.org/bar/ end",
    "www. is not a url",
    "#obama #tcot #teaparty #tlot #politics",
    "RT @user: #iphone #mac #apple rock!",
    "Wahl 2009 #btw09 #duell09 #schröder",
    "Göteborg är fin #göteborg #sverige",
    "#bigapple NYC rocks #NYC",
    "don't can't won't o'clock rock'n'roll",
    "state-of-the-art well-known re-tweet",
    "snake_case_word and __dunder__",
    "emails like me@example.com are split",
    "multiple   spaces\tand\ttabs\nnewlines",
    "#123 #a1 #_ # #",
    "@ @@ @_ @@user",
    "Ünïcödé wörds ñandú café",
    "Σ αβγ #ελλάδα",
    "日本語のテキスト #東京",
    "emoji 😀 are skipped #happy",
    "A1 btw09 N900 y2000 SLK300a lower UPPER Sverige eBay",
    "what?!?! really... yes!!!",
    "1/2 cup + 3/4 cup = 5/4",
    "at 5 pm, 17:00:00 sharp",
    "win7 vs windows7 vs #windows7",
    "#microsoft #mac #linux #vista #win7 #software #xp #ubuntu",
    "x-y-z-- and -dash- words",
    "it's Obama's plan",
    "http://saxy.us :) #jazz #rock #funk #dance #livemusic",
    "Live performances in #boulder area",
    "(parenthetical #tag) [bracket] {brace}",
    "quotes \"#quoted\" and 'single'",
    "#tag1,#tag2;#tag3.#tag4",
    "semi;colon; and colon: usage :-)",
    ";-D ;D ;p ;(",
    "<3 <3333 <4",
    "c/o and C/O differ",
    "B/C uppercase",
    "www.x.co",
    "http://",
    "https://a",
    "12-13-14 1.2.3.4 10/10",
    "ends with hashtag #end",
    "@start of tweet",
    "tab\t#tag\tnext",
]


def tokenize(text):
    out = []
    for m in PATTERN.finditer(text):
        idx = m.lastindex
        kind = BRANCHES[idx - 1][0]
        tok = m.group(0)
        if kind == "Tag":
            kind = "Hashtag" if tok[0] == "#" else "AtReply"
        out.append({"text": tok, "kind": kind, "start": m.start(), "end": m.end()})
    return out


def main():
    w = sys.stdout
    for t in TWEETS:
        w.write(json.dumps({"text": t, "tokens": tokenize(t)}, ensure_ascii=False))
        w.write("\n")


if __name__ == "__main__":
    main()
