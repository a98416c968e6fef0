"""Export a frequency lexicon TSV (form<TAB>count) from the wordfreq package.

Counts are occurrences per billion tokens, rounded to integers.

    python3 scripts/export_lexicon.py es 8000 > data/es_freq.tsv
"""
import re
import sys

import wordfreq

ALPHABETS = {
    "es": re.compile(r"^[a-zñáéíóúü]+$"),
    "en": re.compile(r"^[a-z]+$"),
}


def main() -> None:
    lang, size = sys.argv[1], int(sys.argv[2])
    pattern = ALPHABETS[lang]
    print(f"# {lang} frequency lexicon exported from wordfreq {wordfreq.__version__ if hasattr(wordfreq, '__version__') else ''}".rstrip())
    print("# form<TAB>count per billion tokens")
    written = 0
    for word in wordfreq.top_n_list(lang, size * 4):
        if not pattern.match(word):
            continue
        count = round(wordfreq.word_frequency(word, lang) * 1e9)
        if count <= 0:
            continue
        print(f"{word}\t{count}")
        written += 1
        if written == size:
            break


if __name__ == "__main__":
    main()
