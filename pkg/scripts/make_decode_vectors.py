#!/usr/bin/env python3
"""Regenerate the shared decoding conformance vectors.

The file pins truncation semantics (top-k / top-p, tie handling,
renormalization) for any serving backend; tests in both packages consume it.

Usage: python scripts/make_decode_vectors.py [--out fixtures/decode_conformance.json]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from tsnarrate.decode import conformance_vectors  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="fixtures/decode_conformance.json")
    args = parser.parse_args()
    payload = conformance_vectors()
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                   encoding="utf-8")
    print(f"wrote {len(payload['cases'])} conformance cases to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
