"""Core temporal schema: entities, lifecycles, and static dictionaries.

Every node and edge carries a lifecycle, a half-open interval
[creation, deletion): an entity is visible at its creation instant and
invisible from its deletion instant onward.  deletion is None for
entities that are never removed inside the simulation window.

Entities are immutable after creation; the only mutations the workload
performs are inserts and (cascading) deletes.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .errors import CycleDetected

POST = "Post"
COMMENT = "Comment"

# Typed update-operation codes used on the wire.  Inserts and deletes pair
# up by entity kind; DEL6/DEL7 cascade through reply trees, DEL1/DEL4
# cascade through everything a person or forum owns.
INS_PERSON = "INS1"
INS_LIKE_POST = "INS2"
INS_LIKE_COMMENT = "INS3"
INS_FORUM = "INS4"
INS_MEMBER = "INS5"
INS_POST = "INS6"
INS_COMMENT = "INS7"
INS_KNOWS = "INS8"
DEL_PERSON = "DEL1"
DEL_LIKE_POST = "DEL2"
DEL_LIKE_COMMENT = "DEL3"
DEL_FORUM = "DEL4"
DEL_MEMBER = "DEL5"
DEL_POST = "DEL6"
DEL_COMMENT = "DEL7"
DEL_KNOWS = "DEL8"

INSERT_OPS = frozenset({INS_PERSON, INS_LIKE_POST, INS_LIKE_COMMENT, INS_FORUM,
                        INS_MEMBER, INS_POST, INS_COMMENT, INS_KNOWS})
DELETE_OPS = frozenset({DEL_PERSON, DEL_LIKE_POST, DEL_LIKE_COMMENT, DEL_FORUM,
                        DEL_MEMBER, DEL_POST, DEL_COMMENT, DEL_KNOWS})


@dataclass(frozen=True)
class Lifecycle:
    """Half-open validity interval [creation, deletion)."""

    creation: int
    deletion: int | None = None

    def __post_init__(self):
        if self.deletion is not None and self.deletion <= self.creation:
            raise ValueError(f"deletion {self.deletion} must be after creation {self.creation}")

    def alive_at(self, t: int) -> bool:
        return self.creation <= t and (self.deletion is None or t < self.deletion)

    def alive_throughout(self, start: int, end: int) -> bool:
        """Alive at every instant of [start, end)."""
        return self.creation <= start and (self.deletion is None or self.deletion >= end)


def is_alive(lifecycle: Lifecycle, t: int) -> bool:
    """Whether an entity exists at instant t (creation inclusive, deletion exclusive)."""
    return lifecycle.alive_at(t)


@dataclass(frozen=True)
class Person:
    id: int
    first_name: str
    last_name: str
    country_id: int
    university_id: int | None
    tag_interests: frozenset[int]
    lifecycle: Lifecycle


@dataclass(frozen=True)
class KnowsEdge:
    """Undirected friendship, stored canonically with person1_id < person2_id."""

    person1_id: int
    person2_id: int
    lifecycle: Lifecycle

    def __post_init__(self):
        if self.person1_id >= self.person2_id:
            raise ValueError("knows edge endpoints must satisfy person1_id < person2_id")

    @staticmethod
    def make(a: int, b: int, lifecycle: Lifecycle) -> "KnowsEdge":
        lo, hi = (a, b) if a < b else (b, a)
        return KnowsEdge(lo, hi, lifecycle)

    @property
    def pair(self) -> tuple[int, int]:
        return (self.person1_id, self.person2_id)


@dataclass(frozen=True)
class Forum:
    id: int
    moderator_person_id: int
    lifecycle: Lifecycle


@dataclass(frozen=True)
class Message:
    """A post or a comment.

    Posts live in a forum and root their own reply tree; comments reply to
    exactly one earlier message and inherit that tree's root post id.
    root_post_id is denormalized so thread lookups need no chain walk.
    """

    id: int
    kind: str
    creator_person_id: int
    container_forum_id: int | None
    reply_to_message_id: int | None
    country_id: int
    creation_tag_ids: frozenset[int]
    lifecycle: Lifecycle
    root_post_id: int

    def __post_init__(self):
        if self.kind == POST:
            if self.container_forum_id is None or self.reply_to_message_id is not None:
                raise ValueError("a post needs a forum and must not reply to anything")
            if self.root_post_id != self.id:
                raise ValueError("a post is its own thread root")
        elif self.kind == COMMENT:
            if self.reply_to_message_id is None or self.container_forum_id is not None:
                raise ValueError("a comment replies to a message and has no forum")
        else:
            raise ValueError(f"unknown message kind {self.kind!r}")


@dataclass(frozen=True)
class LikesEdge:
    person_id: int
    message_id: int
    lifecycle: Lifecycle


@dataclass(frozen=True)
class HasMemberEdge:
    forum_id: int
    person_id: int
    lifecycle: Lifecycle


@dataclass(frozen=True)
class UpdateOperation:
    """One typed stream event.

    scheduled_time is the simulation instant the operation takes effect
    (the entity's creation instant for inserts, the deletion instant for
    deletes).  dependency_time is the latest creation instant over every
    entity the operation touches; the replay driver refuses to start the
    operation before that instant is confirmed.
    """

    op_type: str
    scheduled_time: int
    dependency_time: int
    payload: dict

    def __post_init__(self):
        if self.op_type not in INSERT_OPS and self.op_type not in DELETE_OPS:
            raise ValueError(f"unknown op type {self.op_type!r}")

    @property
    def is_insert(self) -> bool:
        return self.op_type in INSERT_OPS


def root_post_of(message_id: int, messages: Mapping[int, "Message"]) -> int:
    """Walk reply edges up to the thread's post.

    messages maps message id to Message.  Raises CycleDetected when the
    chain revisits a message, and KeyError when a link is dangling.
    """
    seen = set()
    current = message_id
    while True:
        if current in seen:
            raise CycleDetected(f"reply chain starting at {message_id} loops at {current}")
        seen.add(current)
        msg = messages[current]
        if msg.kind == POST:
            return msg.id
        current = msg.reply_to_message_id


@dataclass
class TemporalGraph:
    """All generated entities with their full lifecycles, keyed by id."""

    persons: dict[int, Person] = field(default_factory=dict)
    knows: dict[tuple[int, int], KnowsEdge] = field(default_factory=dict)
    forums: dict[int, Forum] = field(default_factory=dict)
    messages: dict[int, Message] = field(default_factory=dict)
    likes: dict[tuple[int, int], LikesEdge] = field(default_factory=dict)
    members: dict[tuple[int, int], HasMemberEdge] = field(default_factory=dict)

    def entity_count(self) -> int:
        return (len(self.persons) + len(self.knows) + len(self.forums)
                + len(self.messages) + len(self.likes) + len(self.members))

    def counts(self) -> dict[str, int]:
        return {
            "persons": len(self.persons),
            "knows": len(self.knows),
            "forums": len(self.forums),
            "messages": len(self.messages),
            "likes": len(self.likes),
            "members": len(self.members),
        }


def check_temporal_invariants(graph: TemporalGraph) -> list[str]:
    """Structural audit of a temporal graph; returns human-readable violations.

    Checks reference integrity, lifecycle containment (no entity outlives
    what it depends on), reply-forest shape, and edge canonicality.
    """
    bad: list[str] = []

    def deletion(lc: Lifecycle) -> float:
        return float("inf") if lc.deletion is None else lc.deletion

    for pair, edge in graph.knows.items():
        if pair != edge.pair:
            bad.append(f"knows {pair}: stored under wrong key")
        for pid in pair:
            p = graph.persons.get(pid)
            if p is None:
                bad.append(f"knows {pair}: missing person {pid}")
                continue
            if edge.lifecycle.creation < p.lifecycle.creation:
                bad.append(f"knows {pair}: created before person {pid}")
            if deletion(edge.lifecycle) > deletion(p.lifecycle):
                bad.append(f"knows {pair}: outlives person {pid}")

    for fid, forum in graph.forums.items():
        mod = graph.persons.get(forum.moderator_person_id)
        if mod is None:
            bad.append(f"forum {fid}: missing moderator")
        elif not mod.lifecycle.alive_at(forum.lifecycle.creation):
            bad.append(f"forum {fid}: moderator not alive at forum creation")

    for mid, msg in graph.messages.items():
        creator = graph.persons.get(msg.creator_person_id)
        if creator is None:
            bad.append(f"message {mid}: missing creator")
        else:
            if msg.lifecycle.creation < creator.lifecycle.creation:
                bad.append(f"message {mid}: created before its creator")
            if deletion(msg.lifecycle) > deletion(creator.lifecycle):
                bad.append(f"message {mid}: outlives its creator")
        if msg.kind == POST:
            forum = graph.forums.get(msg.container_forum_id)
            if forum is None:
                bad.append(f"post {mid}: missing forum")
            else:
                if msg.lifecycle.creation < forum.lifecycle.creation:
                    bad.append(f"post {mid}: created before its forum")
                if deletion(msg.lifecycle) > deletion(forum.lifecycle):
                    bad.append(f"post {mid}: outlives its forum")
        else:
            parent = graph.messages.get(msg.reply_to_message_id)
            if parent is None:
                bad.append(f"comment {mid}: missing parent")
            else:
                if msg.lifecycle.creation <= parent.lifecycle.creation:
                    bad.append(f"comment {mid}: not created after its parent")
                if deletion(msg.lifecycle) > deletion(parent.lifecycle):
                    bad.append(f"comment {mid}: outlives its parent")
            try:
                root = root_post_of(mid, graph.messages)
            except (CycleDetected, KeyError):
                bad.append(f"comment {mid}: reply chain does not reach a post")
            else:
                if root != msg.root_post_id:
                    bad.append(f"comment {mid}: stored root {msg.root_post_id}, actual {root}")

    for (pid, mid), like in graph.likes.items():
        person = graph.persons.get(pid)
        msg = graph.messages.get(mid)
        if person is None or msg is None:
            bad.append(f"like ({pid},{mid}): dangling endpoint")
            continue
        if like.lifecycle.creation < max(person.lifecycle.creation, msg.lifecycle.creation):
            bad.append(f"like ({pid},{mid}): created before an endpoint")
        if deletion(like.lifecycle) > min(deletion(person.lifecycle), deletion(msg.lifecycle)):
            bad.append(f"like ({pid},{mid}): outlives an endpoint")

    for (fid, pid), mem in graph.members.items():
        forum = graph.forums.get(fid)
        person = graph.persons.get(pid)
        if forum is None or person is None:
            bad.append(f"member ({fid},{pid}): dangling endpoint")
            continue
        if mem.lifecycle.creation < max(forum.lifecycle.creation, person.lifecycle.creation):
            bad.append(f"member ({fid},{pid}): created before an endpoint")
        if deletion(mem.lifecycle) > min(deletion(forum.lifecycle), deletion(person.lifecycle)):
            bad.append(f"member ({fid},{pid}): outlives an endpoint")

    return bad


# --- static dictionaries -------------------------------------------------
#
# Small closed-world lookup tables.  Country name pools drive the
# name/location correlation in the generator; universities belong to a
# country and seed the friendship homophily.

@dataclass(frozen=True)
class Country:
    id: int
    name: str
    first_names: tuple[str, ...]
    last_names: tuple[str, ...]


@dataclass(frozen=True)
class University:
    id: int
    name: str
    country_id: int


@dataclass(frozen=True)
class Tag:
    id: int
    name: str


COUNTRIES: tuple[Country, ...] = (
    Country(1, "India", ("Arjun", "Priya", "Rahul", "Ananya", "Vikram", "Deepa"),
            ("Sharma", "Patel", "Singh", "Gupta", "Iyer", "Khan")),
    Country(2, "China", ("Wei", "Jing", "Hao", "Yan", "Li", "Fang"),
            ("Wang", "Li", "Zhang", "Chen", "Liu", "Yang")),
    Country(3, "Germany", ("Lukas", "Anna", "Felix", "Lena", "Jonas", "Marie"),
            ("Mueller", "Schmidt", "Fischer", "Weber", "Wagner", "Becker")),
    Country(4, "France", ("Louis", "Camille", "Hugo", "Chloe", "Jules", "Manon"),
            ("Martin", "Bernard", "Dubois", "Moreau", "Laurent", "Petit")),
    Country(5, "Brazil", ("Joao", "Maria", "Pedro", "Ana", "Lucas", "Beatriz"),
            ("Silva", "Santos", "Oliveira", "Souza", "Costa", "Pereira")),
    Country(6, "United States", ("James", "Emily", "Michael", "Sarah", "David", "Ashley"),
            ("Smith", "Johnson", "Brown", "Davis", "Miller", "Wilson")),
    Country(7, "Japan", ("Haruto", "Yui", "Sota", "Aoi", "Ren", "Hina"),
            ("Sato", "Suzuki", "Takahashi", "Tanaka", "Watanabe", "Ito")),
    Country(8, "Spain", ("Alejandro", "Lucia", "Pablo", "Sofia", "Diego", "Carmen"),
            ("Garcia", "Rodriguez", "Fernandez", "Lopez", "Martinez", "Sanchez")),
    Country(9, "Italy", ("Leonardo", "Giulia", "Francesco", "Aurora", "Matteo", "Elena"),
            ("Rossi", "Russo", "Ferrari", "Esposito", "Bianchi", "Romano")),
    Country(10, "Mexico", ("Santiago", "Valentina", "Mateo", "Regina", "Emiliano", "Camila"),
            ("Hernandez", "Gonzalez", "Ramirez", "Torres", "Flores", "Vargas")),
    Country(11, "Poland", ("Jakub", "Zuzanna", "Szymon", "Maja", "Filip", "Oliwia"),
            ("Nowak", "Kowalski", "Wisniewski", "Wojcik", "Kaminski", "Zielinski")),
    Country(12, "Egypt", ("Omar", "Nour", "Youssef", "Salma", "Karim", "Mariam"),
            ("Hassan", "Mohamed", "Ahmed", "Mahmoud", "Ali", "Ibrahim")),
    Country(13, "Nigeria", ("Chinedu", "Amara", "Emeka", "Ngozi", "Tunde", "Folake"),
            ("Okafor", "Adeyemi", "Okonkwo", "Balogun", "Eze", "Abubakar")),
    Country(14, "Sweden", ("Erik", "Elsa", "Oscar", "Astrid", "Nils", "Freja"),
            ("Andersson", "Johansson", "Karlsson", "Nilsson", "Larsson", "Lindberg")),
    Country(15, "Turkey", ("Mehmet", "Zeynep", "Mustafa", "Elif", "Emre", "Ayse"),
            ("Yilmaz", "Kaya", "Demir", "Celik", "Sahin", "Aydin")),
    Country(16, "Vietnam", ("Minh", "Linh", "Duc", "Mai", "Quang", "Thao"),
            ("Nguyen", "Tran", "Le", "Pham", "Hoang", "Vu")),
)

UNIVERSITIES: tuple[University, ...] = (
    University(101, "Indian Institute of Science", 1),
    University(102, "University of Delhi", 1),
    University(103, "Tsinghua University", 2),
    University(104, "Fudan University", 2),
    University(105, "TU Muenchen", 3),
    University(106, "Universitaet Heidelberg", 3),
    University(107, "Sorbonne", 4),
    University(108, "Universite de Lyon", 4),
    University(109, "Universidade de Sao Paulo", 5),
    University(110, "UFRJ", 5),
    University(111, "MIT", 6),
    University(112, "UC Berkeley", 6),
    University(113, "University of Tokyo", 7),
    University(114, "Kyoto University", 7),
    University(115, "Universidad de Barcelona", 8),
    University(116, "Politecnico di Milano", 9),
    University(117, "UNAM", 10),
    University(118, "University of Warsaw", 11),
    University(119, "Cairo University", 12),
    University(120, "University of Lagos", 13),
    University(121, "KTH", 14),
    University(122, "Bogazici University", 15),
    University(123, "Vietnam National University", 16),
)

TAGS: tuple[Tag, ...] = (
    Tag(201, "photography"), Tag(202, "hiking"), Tag(203, "jazz"),
    Tag(204, "football"), Tag(205, "cooking"), Tag(206, "astronomy"),
    Tag(207, "chess"), Tag(208, "cinema"), Tag(209, "gardening"),
    Tag(210, "cycling"), Tag(211, "poetry"), Tag(212, "robotics"),
    Tag(213, "sailing"), Tag(214, "opera"), Tag(215, "basketball"),
    Tag(216, "painting"), Tag(217, "history"), Tag(218, "climbing"),
    Tag(219, "electronics"), Tag(220, "tennis"), Tag(221, "anime"),
    Tag(222, "running"), Tag(223, "board games"), Tag(224, "street food"),
)

COUNTRIES_BY_ID = {c.id: c for c in COUNTRIES}
UNIVERSITIES_BY_ID = {u.id: u for u in UNIVERSITIES}
UNIVERSITIES_BY_COUNTRY: dict[int, tuple[University, ...]] = {}
for _u in UNIVERSITIES:
    UNIVERSITIES_BY_COUNTRY.setdefault(_u.country_id, ())
    UNIVERSITIES_BY_COUNTRY[_u.country_id] = UNIVERSITIES_BY_COUNTRY[_u.country_id] + (_u,)
TAGS_BY_ID = {t.id: t for t in TAGS}
