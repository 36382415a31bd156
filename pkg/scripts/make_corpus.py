"""Regenerate the packaged synthetic stand-in corpus."""
import argparse

from qgenomic.synthetic import BUNDLED, BUNDLED_PARAMS, synthetic_corpus, write_corpus


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=BUNDLED)
    for k, v in BUNDLED_PARAMS.items():
        p.add_argument(f"--{k.replace('_', '-')}", type=type(v), default=v)
    a = p.parse_args()
    seqs, labels = synthetic_corpus(a.n, a.length, a.signal, a.n_rate, a.seed)
    write_corpus(a.out, seqs, labels)
    print(f"wrote {len(seqs)} sequences to {a.out}")


if __name__ == "__main__":
    main()
