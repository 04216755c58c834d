"""Small file-output helpers."""

from __future__ import annotations

import os


def atomic_write_text(path, text):
    """Write via a sibling temp file and rename, so readers never see a
    partially written file."""
    path = os.fspath(path)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)
