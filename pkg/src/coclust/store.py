"""File persistence for the link registry and matrices.

Link store layout (UTF-8)::

    coclust-links 1
    next_id <int> clock <int> count <int>
    <id> <registered_seq> <last_visit_seq> <visit_count> <len>:<name> <len>:<description> <len>:<keywords>
    ...

String fields are length-prefixed (length in characters), so commas and even
newlines inside a description are stored verbatim.

Matrices are CSV: a ``rows,cols`` header line then one line per row.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

import numpy as np

from .corpus import CorrelationMatrix
from .errors import CorruptStore, DimensionMismatch, FieldTooLong, InvalidMatrix, LimitViolation
from .search_index import LinkRecord, SearchIndex, parse_keywords, validate_fields

STORE_MAGIC = "coclust-links"
STORE_VERSION = 1
DATA_DIR_ENV = "COCLUST_DATA_DIR"
DEFAULT_DATA_DIR = ".coclust"

LINKS_FILE = "links.txt"
MATRIX_FILE = "matrix.csv"
VOCAB_FILE = "vocab.txt"
DOCS_FILE = "documents.txt"
U_FILE = "U.csv"
V_FILE = "V.csv"
TRACE_FILE = "trace.csv"


def data_dir(override=None) -> Path:
    if override:
        return Path(override)
    return Path(os.environ.get(DATA_DIR_ENV) or DEFAULT_DATA_DIR)


def atomic_write(path, data: bytes):
    """Write to a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def _field(s: str) -> str:
    return f"{len(s)}:{s}"


def dumps_store(index: SearchIndex) -> str:
    next_id, clock, records = index.state()
    out = [f"{STORE_MAGIC} {STORE_VERSION}\n", f"next_id {next_id} clock {clock} count {len(records)}\n"]
    for r in records:
        out.append(
            f"{r.id} {r.registered_seq} {r.last_visit_seq} {r.visit_count} "
            f"{_field(r.name)} {_field(r.description)} {_field(r.keywords)}\n"
        )
    return "".join(out)


def save_store(path, index: SearchIndex):
    atomic_write(path, dumps_store(index).encode("utf-8"))


class _Reader:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    @property
    def line(self):
        return self.text.count("\n", 0, self.pos) + 1

    def fail(self, reason):
        raise CorruptStore(self.line, reason)

    def token(self):
        end = self.pos
        while end < len(self.text) and self.text[end] not in " \n":
            end += 1
        if end == self.pos:
            self.fail("expected a field")
        tok = self.text[self.pos : end]
        self.pos = end
        return tok

    def integer(self):
        tok = self.token()
        if not tok.isdigit():
            self.fail(f"expected a nonnegative integer, got {tok!r}")
        return int(tok)

    def expect(self, ch):
        if self.text[self.pos : self.pos + 1] != ch:
            found = self.text[self.pos : self.pos + 1] or "end of file"
            self.fail(f"expected {ch!r}, found {found!r}")
        self.pos += 1

    def string(self):
        colon = self.text.find(":", self.pos)
        if colon < 0:
            self.fail("expected a length-prefixed string")
        length = self.text[self.pos : colon]
        if not length.isdigit():
            self.fail(f"bad string length {length!r}")
        start = colon + 1
        end = start + int(length)
        if end > len(self.text):
            self.fail("string runs past end of file")
        self.pos = end
        return self.text[start:end]


def loads_store(text: str, stoplist=None) -> SearchIndex:
    rd = _Reader(text)
    if rd.token() != STORE_MAGIC:
        rd.fail("not a coclust link store")
    rd.expect(" ")
    version = rd.integer()
    if version != STORE_VERSION:
        rd.fail(f"unsupported store version {version}")
    rd.expect("\n")
    values = {}
    for key in ("next_id", "clock", "count"):
        if rd.token() != key:
            rd.fail(f"expected {key!r}")
        rd.expect(" ")
        values[key] = rd.integer()
        rd.expect(" " if key != "count" else "\n")

    records = []
    seen = set()
    for _ in range(values["count"]):
        if rd.pos >= len(text):
            rd.fail(f"expected {values['count']} records, found {len(records)}")
        line = rd.line
        try:
            nums = []
            for _ in range(4):
                nums.append(rd.integer())
                rd.expect(" ")
            name = rd.string()
            rd.expect(" ")
            description = rd.string()
            rd.expect(" ")
            keywords = rd.string()
            rd.expect("\n")
        except CorruptStore as exc:
            # report the line the broken record starts on
            raise CorruptStore(line, exc.reason) from None
        link_id, registered_seq, last_visit_seq, visit_count = nums
        try:
            validate_fields(name, description, keywords)
        except FieldTooLong as exc:
            raise LimitViolation(line, str(exc)) from None
        keyword_set = parse_keywords(keywords, stoplist)
        if not keyword_set:
            raise CorruptStore(line, "link has no keywords")
        if link_id in seen:
            raise CorruptStore(line, f"duplicate link id {link_id}")
        if link_id >= values["next_id"] or max(registered_seq, last_visit_seq) > values["clock"]:
            raise CorruptStore(line, "record is newer than the store counters")
        seen.add(link_id)
        records.append(
            LinkRecord(
                id=link_id,
                name=name,
                description=description,
                keywords=keywords,
                keyword_set=keyword_set,
                visit_count=visit_count,
                registered_seq=registered_seq,
                last_visit_seq=last_visit_seq,
            )
        )
    if rd.pos != len(text):
        rd.fail("trailing data after last record")
    index = SearchIndex(stoplist=stoplist)
    index._restore(records, values["next_id"], values["clock"])
    return index


def load_store(path, stoplist=None) -> SearchIndex:
    with open(path, encoding="utf-8", newline="") as fh:
        return loads_store(fh.read(), stoplist)


def load_or_create_store(path, stoplist=None) -> SearchIndex:
    if not Path(path).exists():
        return SearchIndex(stoplist=stoplist)
    return load_store(path, stoplist)


# -- matrices ---------------------------------------------------------------


def dumps_grid(values) -> str:
    arr = np.asarray(values, dtype=float)
    rows, cols = arr.shape
    lines = [f"{rows},{cols}"]
    lines.extend(",".join(repr(float(x)) for x in row) for row in arr)
    return "\n".join(lines) + "\n"


def loads_grid(text: str) -> np.ndarray:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DimensionMismatch("empty matrix file")
    try:
        rows, cols = (int(x) for x in lines[0].split(","))
    except ValueError:
        raise DimensionMismatch(f"bad matrix header {lines[0]!r}") from None
    body = lines[1:]
    if len(body) != rows:
        raise DimensionMismatch(f"header says {rows} rows, file has {len(body)}")
    arr = np.empty((rows, cols))
    for r, line in enumerate(body):
        parts = line.split(",")
        if len(parts) != cols:
            raise DimensionMismatch(f"row {r} has {len(parts)} values, header says {cols}")
        try:
            arr[r] = [float(p) for p in parts]
        except ValueError:
            raise InvalidMatrix(f"row {r} contains a non-numeric value") from None
    return arr


def save_matrix(path, matrix):
    values = matrix.values if isinstance(matrix, CorrelationMatrix) else matrix
    atomic_write(path, dumps_grid(values).encode("ascii"))


def load_matrix(path) -> CorrelationMatrix:
    return CorrelationMatrix(loads_grid(Path(path).read_text("ascii")))


def save_memberships(path, matrix):
    """U (header ``C,N``) or V (header ``C,K``)."""
    atomic_write(path, dumps_grid(matrix).encode("ascii"))


def load_memberships(path) -> np.ndarray:
    arr = loads_grid(Path(path).read_text("ascii"))
    if np.any(arr < 0) or np.any(arr > 1):
        raise InvalidMatrix("memberships must lie in [0, 1]")
    return arr
