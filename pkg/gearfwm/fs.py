from __future__ import annotations

import os
import uuid
from pathlib import Path


def write_bytes_atomic(dest: Path, data: bytes) -> Path:
    """Write to a temp file beside ``dest`` then atomically replace it.

    Readers never see a half-written image or CSV.
    """
    dest = Path(dest)
    dest.parent.mkdir(parents=True, exist_ok=True)
    tmp = dest.with_name(f".tmp-{dest.name}-{uuid.uuid4().hex}")
    try:
        tmp.write_bytes(data)
        os.replace(tmp, dest)
    finally:
        tmp.unlink(missing_ok=True)
    return dest


def write_text_atomic(dest: Path, text: str) -> Path:
    # LF only, regardless of platform
    return write_bytes_atomic(dest, text.encode("utf-8"))
