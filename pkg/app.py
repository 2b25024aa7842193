#!/usr/bin/env python3
"""
Launcher for the relnet command-line tools.

    python app.py synth --out data/movies
    python app.py cv --types data/movies/types.txt --facts data/movies/facts.txt \
        --pos data/movies/pos.txt --out runs/movies
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "src"))

from relnet.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
