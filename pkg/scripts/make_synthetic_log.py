#!/usr/bin/env python3
"""Build the synthetic 413-record session log used by the statistics checks.

The log reproduces the published usage shape: mode counts
collaborate 244 / ideate 78 / interpret 58 / analogy 33 (-> 59/19/14/8 %),
exactly 111 distinct word tiles out of the 175-tile vocabulary, and 14
participant tags. Records are deterministic, so the emitted file is stable.

    python scripts/make_synthetic_log.py synthetic413.jsonl
    slatepoet stats synthetic413.jsonl
"""

import argparse
import sys
from pathlib import Path

from slatepoet.analytics import SessionRecord, append_record
from slatepoet.chains import run_chain
from slatepoet.backends import StubBackend
from slatepoet.vocabulary import Mode, default_vocabulary

MODE_COUNTS = {
    Mode.COLLABORATE: 244,
    Mode.IDEATE: 78,
    Mode.INTERPRET: 58,
    Mode.ANALOGY: 33,
}
DISTINCT_WORDS = 111
PARTICIPANTS = 14
WORDS_PER_POEM = 3


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output", help="log file to write (existing file is appended)")
    parser.add_argument("--chains", action="store_true",
                        help="run each poem through the stub chain for realistic stage texts")
    args = parser.parse_args(argv)

    vocab = default_vocabulary()
    word_ids = sorted(t.word_id for t in vocab.word_tiles)[:DISTINCT_WORDS]
    out = Path(args.output)
    stub = StubBackend()

    i = 0
    for mode, count in MODE_COUNTS.items():
        for _ in range(count):
            words = tuple(word_ids[(WORDS_PER_POEM * i + j) % DISTINCT_WORDS]
                          for j in range(WORDS_PER_POEM))
            poem = " ".join(vocab[w].text for w in words)
            if args.chains:
                result = run_chain(mode, poem, stub)
                stage1, stage2 = result.stage1_text, result.stage2_text
            else:
                stage1, stage2 = f"stage one for poem {i}", f"stage two for poem {i}"
            append_record(
                out,
                SessionRecord(
                    ts_ms=60_000 * i,
                    mode=mode,
                    poem_text=poem,
                    word_ids=words,
                    stage1_text=stage1,
                    stage2_text=stage2,
                    latency_ms=40.0,
                    participant=f"p{i % PARTICIPANTS:02d}",
                ),
            )
            i += 1

    print(f"wrote {i} records to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
