"""Keyword search over registered links with priority frames.

Links carry a visit counter that acts as their priority. A query returns at
most five high-priority frames, filled from matches that have been visited at
least once, plus a separate zero-priority frame holding every match that was
never visited, so those pages are surfaced instead of being lost as outliers.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

from .corpus import normalize
from .errors import EmptyKeywords, FieldTooLong, UnknownLink

NAME_LIMIT = 45
DESCRIPTION_LIMIT = 450
KEYWORDS_LIMIT = 400
FRAME_CAPACITY = 5

LIMITS = {"name": NAME_LIMIT, "description": DESCRIPTION_LIMIT, "keywords": KEYWORDS_LIMIT}


class ReplacementPolicy(str, enum.Enum):
    PRIORITY = "priority"
    FIFO = "fifo"
    LRU = "lru"


def parse_keywords(keywords: str, stoplist=None) -> frozenset[str]:
    """Comma-separated keywords -> set of normalized tokens."""
    terms = set()
    for part in keywords.split(","):
        terms.update(normalize(part, stoplist))
    return frozenset(terms)


def validate_fields(name: str, description: str, keywords: str):
    for field_name, value in (("name", name), ("description", description), ("keywords", keywords)):
        limit = LIMITS[field_name]
        if len(value) > limit:
            raise FieldTooLong(field_name, limit, len(value))


@dataclass(frozen=True)
class LinkRecord:
    id: int
    name: str
    description: str
    keywords: str
    keyword_set: frozenset[str]
    visit_count: int = 0
    registered_seq: int = 0
    last_visit_seq: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "keywords": sorted(self.keyword_set),
            "visit_count": self.visit_count,
            "registered_seq": self.registered_seq,
            "last_visit_seq": self.last_visit_seq,
        }


@dataclass(frozen=True)
class FrameEntry:
    link: LinkRecord
    match_level: int

    def to_dict(self) -> dict:
        d = self.link.to_dict()
        d["match_level"] = self.match_level
        return d


@dataclass(frozen=True)
class QueryFrameSet:
    query_terms: tuple[str, ...]
    policy: ReplacementPolicy
    high_frames: tuple[FrameEntry, ...]
    zero_frame: tuple[FrameEntry, ...]
    total_matches: int
    page: int = 0

    def to_dict(self) -> dict:
        return {
            "query_terms": list(self.query_terms),
            "policy": self.policy.value,
            "page": self.page,
            "high_frames": [e.to_dict() for e in self.high_frames],
            "zero_frame": [e.to_dict() for e in self.zero_frame],
            "total_matches": self.total_matches,
        }


def policy_key(policy: ReplacementPolicy):
    """Sort key for matched links, best first, under ``policy``."""
    policy = ReplacementPolicy(policy)
    if policy is ReplacementPolicy.PRIORITY:
        return lambda e: (-e.match_level, -e.link.visit_count, e.link.registered_seq)
    if policy is ReplacementPolicy.FIFO:
        return lambda e: (-e.match_level, e.link.registered_seq)
    return lambda e: (-e.match_level, -e.link.last_visit_seq, e.link.registered_seq)


def apply_replacement(
    frames: Sequence[LinkRecord],
    incoming: LinkRecord,
    policy: ReplacementPolicy = ReplacementPolicy.PRIORITY,
    capacity: int = FRAME_CAPACITY,
) -> tuple[LinkRecord, ...]:
    """Admit ``incoming`` into a frame list kept in admission order.

    A link already in the frames is a hit: its record is refreshed in place.
    On a miss with free capacity the link is appended. Otherwise a victim is
    evicted: FIFO takes the earliest admitted, LRU the smallest
    ``last_visit_seq``, PRIORITY the smallest ``visit_count`` but only when the
    incoming count is strictly larger. Ties go to the lowest ``registered_seq``.
    """
    policy = ReplacementPolicy(policy)
    frames = list(frames)
    for k, rec in enumerate(frames):
        if rec.id == incoming.id:
            frames[k] = incoming
            return tuple(frames)
    if len(frames) < capacity:
        return tuple(frames + [incoming])

    if policy is ReplacementPolicy.FIFO:
        victim = 0
    elif policy is ReplacementPolicy.LRU:
        victim = min(range(len(frames)), key=lambda k: (frames[k].last_visit_seq, frames[k].registered_seq))
    else:
        victim = min(range(len(frames)), key=lambda k: (frames[k].visit_count, frames[k].registered_seq))
        if incoming.visit_count <= frames[victim].visit_count:
            return tuple(frames)
    del frames[victim]
    frames.append(incoming)
    return tuple(frames)


class SearchIndex:
    """In-memory link registry.

    Writers are serialized by a lock; records are immutable, so a query works
    on a consistent snapshot of the registry taken under that lock.
    """

    def __init__(self, stoplist=None):
        self._links: dict[int, LinkRecord] = {}
        self._next_id = 1
        self._clock = 0
        self._lock = threading.Lock()
        self.stoplist = stoplist

    def __len__(self):
        return len(self._links)

    def __iter__(self):
        return iter(self.links())

    def __eq__(self, other):
        if not isinstance(other, SearchIndex):
            return NotImplemented
        return self.state() == other.state()

    def state(self):
        """Everything that must survive a save/load round trip."""
        with self._lock:
            return (self._next_id, self._clock, tuple(self._links.values()))

    @property
    def clock(self) -> int:
        return self._clock

    @property
    def next_id(self) -> int:
        return self._next_id

    def links(self) -> list[LinkRecord]:
        with self._lock:
            return list(self._links.values())

    def get(self, link_id: int) -> LinkRecord:
        try:
            return self._links[link_id]
        except KeyError:
            raise UnknownLink(link_id) from None

    def register_link(self, name: str, description: str, keywords: str) -> int:
        validate_fields(name, description, keywords)
        keyword_set = parse_keywords(keywords, self.stoplist)
        if not keyword_set:
            raise EmptyKeywords("no keyword survives normalization")
        with self._lock:
            self._clock += 1
            link_id = self._next_id
            self._next_id += 1
            self._links[link_id] = LinkRecord(
                id=link_id,
                name=name,
                description=description,
                keywords=keywords,
                keyword_set=keyword_set,
                registered_seq=self._clock,
            )
        return link_id

    def record_visit(self, link_id: int) -> int:
        with self._lock:
            rec = self._links.get(link_id)
            if rec is None:
                raise UnknownLink(link_id)
            self._clock += 1
            rec = replace(rec, visit_count=rec.visit_count + 1, last_visit_seq=self._clock)
            self._links[link_id] = rec
        return rec.visit_count

    def _restore(self, records: Iterable[LinkRecord], next_id: int, clock: int):
        """Replace the whole state; used by the store loader."""
        with self._lock:
            self._links = {r.id: r for r in sorted(records, key=lambda r: r.id)}
            self._next_id = next_id
            self._clock = clock

    def match(self, text: str) -> tuple[tuple[str, ...], list[FrameEntry]]:
        """Query terms and every link sharing at least one of them.

        Each link gets its highest match level: the loop over k = n .. 1
        assigns level k to a link with at least k query keywords, which is the
        size of the intersection.
        """
        terms = tuple(dict.fromkeys(normalize(text, self.stoplist)))
        query = frozenset(terms)
        matched = []
        if query:
            for rec in self.links():
                level = len(rec.keyword_set & query)
                if level:
                    matched.append(FrameEntry(rec, level))
        return terms, matched

    def query(
        self,
        text: str,
        policy: ReplacementPolicy = ReplacementPolicy.PRIORITY,
        page: int = 0,
    ) -> QueryFrameSet:
        policy = ReplacementPolicy(policy)
        if page < 0:
            raise ValueError("page must be >= 0")
        terms, matched = self.match(text)
        visited = sorted((e for e in matched if e.link.visit_count > 0), key=policy_key(policy))
        zero = sorted(
            (e for e in matched if e.link.visit_count == 0),
            key=lambda e: (-e.match_level, e.link.registered_seq),
        )
        start = page * FRAME_CAPACITY
        return QueryFrameSet(
            query_terms=terms,
            policy=policy,
            high_frames=tuple(visited[start : start + FRAME_CAPACITY]),
            zero_frame=tuple(zero),
            total_matches=len(matched),
            page=page,
        )
