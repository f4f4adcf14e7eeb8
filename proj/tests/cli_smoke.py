#!/usr/bin/env python3
"""End-to-end smoke test of the secidx command line binary."""

import os
import shutil
import subprocess
import sys
import tempfile

BINARY = sys.argv[1]
STOPWORDS = sys.argv[2]

WORDS = [
    "kelamo", "rizuno", "boketa", "lusemi", "navodi", "petalu", "gorime", "sidofa",
    "melura", "tibeko", "zofani", "dukemi", "ravelo", "nimodu", "sabeti", "lokuna",
]


def run(*args, expect=0):
    result = subprocess.run([BINARY, *args], capture_output=True, text=True)
    if result.returncode != expect:
        print("command failed:", args)
        print(result.stdout)
        print(result.stderr)
        sys.exit(1)
    return result.stdout


def make_fixture(root):
    corpus = os.path.join(root, "corpus")
    pages = os.path.join(root, "pages")
    os.makedirs(corpus)
    os.makedirs(pages)
    topics = [WORDS[i : i + 4] for i in range(0, len(WORDS) - 3, 2)]
    for t, words in enumerate(topics):
        with open(os.path.join(pages, f"topic{t}.txt"), "w") as f:
            f.write(" ".join(words * 6))
    for d in range(12):
        words = topics[d % len(topics)]
        with open(os.path.join(corpus, f"doc{d:02}.txt"), "w") as f:
            f.write(" ".join(words * 5) + " " + " ".join(topics[(d + 1) % len(topics)][:2]))
    users = os.path.join(root, "users.tsv")
    with open(users, "w") as f:
        for d in range(0, 12, 2):
            f.write(f"alice\tdoc{d:02}\n")
    return corpus, pages, users, topics


def main():
    root = tempfile.mkdtemp(prefix="secidx_cli_")
    try:
        corpus, pages, users, topics = make_fixture(root)
        ws = os.path.join(root, "ws")

        run("init", "--root", ws, "--seed", "7", "--NC", "4", "--V", "2",
            "--block_size", "64", "--scramble_y", "1", "--X", "8",
            "--x_concepts", "2", "--y_concepts", "3", "--min_page_terms", "1",
            "--stopwords", STOPWORDS)
        run("keygen", "--root", ws)

        # vector scheme
        run("build", "--root", ws, "--scheme", "sse", "--corpus", corpus,
            "--onto-corpus", pages)
        out = run("search", "--root", ws, "--scheme", "sse", "--k", "3",
                  "--oracle", *topics[0][:2])
        lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert len(lines) >= 2, out
        run("leak-check", "--root", ws)

        # qrels evaluation against the scheme's own top answer
        top_doc = lines[0].split("\t")[1]
        queries = os.path.join(root, "queries.tsv")
        qrels = os.path.join(root, "qrels.tsv")
        with open(queries, "w") as f:
            f.write("q1\t" + " ".join(topics[0][:2]) + "\n")
        with open(qrels, "w") as f:
            f.write(f"q1\t{top_doc}\n")
        out = run("eval", "--root", ws, "--scheme", "sse", "--k", "1",
                  "--queries", queries, "--qrels", qrels)
        assert "q1\t1\t1" in out, out

        # inverted-index scheme with fetch
        ws2 = os.path.join(root, "ws2")
        run("init", "--root", ws2, "--seed", "7", "--NC", "4", "--V", "2",
            "--block_size", "64", "--scramble_y", "1", "--X", "8",
            "--x_concepts", "2", "--y_concepts", "3", "--min_page_terms", "1",
            "--stopwords", STOPWORDS)
        run("keygen", "--root", ws2)
        run("build", "--root", ws2, "--scheme", "siis", "--corpus", corpus,
            "--onto-corpus", pages, "--users", users)
        run("search", "--root", ws2, "--scheme", "siis", "--user", "alice",
            "--k", "5", *topics[0][:2])
        out = run("fetch", "--root", ws2, "doc00")
        fetched = out.strip().splitlines()[0]
        with open(fetched) as f, open(os.path.join(corpus, "doc00.txt")) as g:
            assert f.read() == g.read(), "fetch did not reconstruct the document"
        run("leak-check", "--root", ws2)

        # leak-check must fail when a secret lands in the cloud
        with open(os.path.join(ws2, "cloud", "aliases.sealed"), "w") as f:
            f.write("boom")
        run("leak-check", "--root", ws2, expect=2)

        # file-level vector-scheme commands
        flat = os.path.join(root, "flat")
        os.makedirs(flat)
        run("sse", "build-index", "--corpus", corpus, "--onto-corpus", pages,
            "--key", os.path.join(flat, "key.json"),
            "--onto-out", os.path.join(flat, "onto.jsonl"),
            "--out", os.path.join(flat, "index.bin"),
            "--min_page_terms", "1", "--seed", "7")
        run("sse", "trapdoor", "--key", os.path.join(flat, "key.json"),
            "--onto", os.path.join(flat, "onto.jsonl"),
            "--out", os.path.join(flat, "trap.bin"), "--seed", "7", *topics[0][:2])
        out = run("sse", "search", "--index", os.path.join(flat, "index.bin"),
                  "--trapdoor", os.path.join(flat, "trap.bin"), "--k", "3")
        assert len(out.strip().splitlines()) == 3, out

        # bench emits one csv row
        out = run("bench", "--docs", "300", "--queries", "3", "--workers", "2",
                  "--strategy", "partitioned", "--partitions", "2", "--k", "5")
        assert out.splitlines()[0] == "strategy,workers,partitions,docs,queries,wall_ms", out
        assert out.splitlines()[1].startswith("partitioned,2,2,300,3,"), out

        print("cli smoke ok")
    finally:
        shutil.rmtree(root, ignore_errors=True)


if __name__ == "__main__":
    main()
