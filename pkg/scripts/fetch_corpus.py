"""Download a coding-vs-intergenomic sequence corpus and convert it to CSV.

The source location is a placeholder: point CORPUS_URL at a copy of a
demo coding vs. intergenomic dataset (one FASTA or CSV per class) before
running. Nothing is downloaded by default.
"""
import argparse
import sys

CORPUS_URL = "https://example.org/REPLACE-ME/coding_vs_intergenomic.csv"


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--url", default=CORPUS_URL)
    p.add_argument("--out", default="corpus.csv")
    a = p.parse_args()
    if "REPLACE-ME" in a.url:
        sys.exit("set --url to the corpus location; the default is a placeholder")
    import urllib.request

    urllib.request.urlretrieve(a.url, a.out)
    print(f"saved {a.url} to {a.out}; load it with dataset.format = csv")


if __name__ == "__main__":
    main()
