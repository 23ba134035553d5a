"""Converter from Open Multilingual Wordnet tab files to the lexicon TSV.

OMW distributes one ``wn-data-<lang>.tab`` per language with lines
``<offset>-<pos>\\t<lang>:<type>\\t<value>``; only ``lemma`` rows carry
lexicalizations. Synsets and relations come from the pivot wordnet's own
export, so this converter produces the lexicon file only and reports what
it saw, letting callers cross-check lemma counts after loading.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .errors import DataError


@dataclass
class ConversionReport:
    lemma_entries: int = 0      # (lemma, synset) pairs written
    distinct_lemmas: int = 0
    distinct_synsets: int = 0
    skipped_rows: int = 0       # def/exe/other non-lemma rows


def convert_omw_tab(tab_path, lexicon_out, pos_filter: str | None = None,
                    lowercase: bool = True) -> ConversionReport:
    """Write ``<lemma>\\t<synset_id>`` lines for every OMW lemma row.

    ``pos_filter`` keeps only synsets whose id ends in that pos tag.
    Output is canonically sorted and deduplicated.
    """
    tab_path = Path(tab_path)
    pairs: set[tuple[str, str]] = set()
    skipped = 0
    with open(tab_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 3:
                raise DataError(f"{tab_path}:{lineno}: expected 3 tab fields")
            synset_id, typed, value = fields[0], fields[1], fields[2]
            row_type = typed.split(":", 1)[-1]
            if row_type != "lemma":
                skipped += 1
                continue
            if "-" not in synset_id:
                raise DataError(f"{tab_path}:{lineno}: bad synset id {synset_id!r}")
            if pos_filter and not synset_id.endswith("-" + pos_filter):
                skipped += 1
                continue
            lemma = value.strip().replace(" ", "_")
            if lowercase:
                lemma = lemma.lower()
            if lemma:
                pairs.add((lemma, synset_id))
            else:
                skipped += 1

    rows = sorted(pairs)
    with open(lexicon_out, "w", encoding="utf-8") as fh:
        for lemma, synset_id in rows:
            fh.write(f"{lemma}\t{synset_id}\n")
    return ConversionReport(
        lemma_entries=len(rows),
        distinct_lemmas=len({lemma for lemma, _ in rows}),
        distinct_synsets=len({sid for _, sid in rows}),
        skipped_rows=skipped,
    )
