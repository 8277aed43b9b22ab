"""Reading and writing of scenario, profile, trace and table files.

Notes
-----
Written tables start with a `# schema: N` line, readers skip it as a
comment. If character coding detection is enabled, optional
dependencies need to be installed, try:

```sh
pip install ergoalloc[all]
```
"""

import json
import os
import warnings
from io import BytesIO, TextIOBase, TextIOWrapper
from typing import IO, Any, Dict, Literal, Optional

import pandas as pd

__all__ = [
    "PathOrIO",
    "OUTPUT_DIR_ENV",
    "FileReader",
    "read_json",
    "write_json",
    "write_csv",
    "get_output_dir",
]

PathOrIO = str | os.PathLike | BytesIO | TextIOBase

OUTPUT_DIR_ENV = "ERGOALLOC_OUTPUT_DIR"


class FileReader:
    """Open a path or wrap a stream as text.

    Streams are left open on exit, only files opened here are closed.

    Parameters
    ----------
    fname : PathOrIO
    encoding : str | 'detect', default `utf-8`
        If `detect`, the character encoding is guessed from the content.
    low_confidence : float, default `0.9`
        A guess below this confidence raises a warning.
    """

    def __init__(
        self,
        fname: PathOrIO,
        *,
        encoding: Literal["detect"] | str = "utf-8",
        low_confidence: float = 0.9,
    ) -> None:
        self.source = fname
        if encoding == "detect":
            encoding = detect_encoding(fname, low_confidence=low_confidence)
        self.encoding = encoding
        self._opened: Optional[IO[str]] = None
        self._wrapper: Optional[TextIOWrapper] = None

    def __enter__(self) -> IO[str]:
        match self.source:
            case TextIOBase():
                return self.source  # type: ignore[return-value]
            case BytesIO():
                # detach on exit so the caller keeps its buffer
                self._wrapper = TextIOWrapper(self.source, encoding=self.encoding)
                return self._wrapper
            case _:
                self._opened = open(self.source, "r", encoding=self.encoding)
                return self._opened

    def __exit__(self, exc_type, exc_val, exc_tb) -> None:
        if self._opened is not None:
            self._opened.close()
        if self._wrapper is not None:
            self._wrapper.detach()
        self._opened, self._wrapper = None, None


def detect_encoding(fname: PathOrIO, *, low_confidence: float = 0.9) -> str:
    import chardet

    match fname:
        case TextIOBase():
            return getattr(fname, "encoding", None) or "utf-8"
        case BytesIO():
            data = fname.getvalue()
        case _:
            with open(fname, "rb") as f:
                data = f.read()

    result = chardet.detect(data)
    encoding = result["encoding"] or "utf-8"
    if result["confidence"] < low_confidence:
        warnings.warn(
            f"parse as `{encoding}` with low confidence "
            f"{result['confidence']} in `{fname}`"
        )
    return encoding


def read_json(
    fname: PathOrIO, *, encoding: Literal["detect"] | str = "utf-8"
) -> Any:
    """Parse a JSON document.

    Raises
    ------
    json.JSONDecodeError
    OSError
    """
    with FileReader(fname, encoding=encoding) as f:
        return json.load(f)


def write_json(d: Dict[str, Any], fname: str) -> None:
    """Write a JSON document with sorted keys, parent folders created."""
    _make_parent(fname)
    with open(fname, "w", encoding="utf-8") as f:
        json.dump(d, f, indent=2, sort_keys=True)
        f.write("\n")


def write_csv(
    df: pd.DataFrame,
    fname: str | IO[str],
    *,
    schema: int = 1,
    float_format: str = "%.6f",
) -> None:
    """Write a table behind its schema line, with `\\n` line endings."""
    if not isinstance(fname, str):
        fname.write(f"# schema: {schema}\n")
        df.to_csv(fname, index=False, float_format=float_format, lineterminator="\n")
        return

    _make_parent(fname)
    with open(fname, "w", encoding="utf-8", newline="") as f:
        write_csv(df, f, schema=schema, float_format=float_format)


def get_output_dir(out: Optional[str] = None) -> str:
    """Output directory, `out` first, then `$ERGOALLOC_OUTPUT_DIR`, else cwd."""
    out = out or os.environ.get(OUTPUT_DIR_ENV) or os.getcwd()
    os.makedirs(out, exist_ok=True)
    return out


def _make_parent(fname: str) -> None:
    if parent := os.path.dirname(fname):
        os.makedirs(parent, exist_ok=True)
