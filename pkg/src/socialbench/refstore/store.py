"""Versioned in-memory graph store with snapshot-isolated reads.

Every entity and edge is held in a record carrying the version interval
during which it is visible.  Writers serialize on a single commit lock,
stage their records, and publish them by bumping the store version as
the very last step; readers pin the version once and evaluate the whole
query against that instant, so concurrent commits never leak into a
running traversal.  Nothing is ever physically removed: deletion writes
a closing version into the record, which keeps every adjacency list
append-only and therefore safe to iterate while writers run.

Delete operations remove the full dependent closure of their target
(reply trees, likes, memberships, and so on) in one commit, so no
reader version ever observes a comment without its ancestors or an
edge without its endpoints.
"""

from __future__ import annotations

import heapq
import math
import threading
from bisect import bisect_right
from dataclasses import dataclass, field

from ..errors import DependencyMissing, IntegrityError, UnknownEntity
from ..model import (
    COMMENT,
    DEL_COMMENT,
    DEL_FORUM,
    DEL_KNOWS,
    DEL_LIKE_COMMENT,
    DEL_LIKE_POST,
    DEL_MEMBER,
    DEL_PERSON,
    DEL_POST,
    INS_COMMENT,
    INS_FORUM,
    INS_KNOWS,
    INS_LIKE_COMMENT,
    INS_LIKE_POST,
    INS_MEMBER,
    INS_PERSON,
    INS_POST,
    POST,
    Forum,
    HasMemberEdge,
    KnowsEdge,
    Lifecycle,
    LikesEdge,
    Message,
    Person,
    UpdateOperation,
)

SR2_LIMIT = 10


def edge_weight(interactions: int) -> int:
    """Path cost of a friendship with the given interaction count.

    40 minus the square root, rounded half away from zero, floored at 1
    so heavily interacting pairs stay cheap but never free.
    """
    x = 40.0 - math.sqrt(interactions)
    rounded = math.floor(x + 0.5) if x >= 0 else -math.floor(-x + 0.5)
    return max(rounded, 1)


@dataclass
class _Rec:
    """One entity or edge with its visibility interval [created_v, deleted_v)."""

    value: object
    created_v: int
    deleted_v: int | None = None

    def visible_at(self, version: int) -> bool:
        if self.created_v > version:
            return False
        deleted = self.deleted_v
        return deleted is None or deleted > version


def _pair(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


class Snapshot:
    """Read view pinned to one store version."""

    def __init__(self, store: "ReferenceStore", version: int):
        self.store = store
        self._pinned = version

    @property
    def version(self) -> int:
        return self._pinned

    def _live(self, table: dict, key) -> object | None:
        rec = table.get(key)
        if rec is not None and rec.visible_at(self.version):
            return rec.value
        return None

    def person(self, person_id: int) -> Person | None:
        return self._live(self.store._persons, person_id)

    def forum(self, forum_id: int) -> Forum | None:
        return self._live(self.store._forums, forum_id)

    def message(self, message_id: int) -> Message | None:
        return self._live(self.store._messages, message_id)

    def friend_ids(self, person_id: int) -> list[int]:
        version = self.version
        out = []
        for rec in self.store._knows_by_person.get(person_id, []):
            if rec.visible_at(version):
                edge = rec.value
                out.append(edge.person2_id if edge.person1_id == person_id
                           else edge.person1_id)
        return out

    def messages_of(self, person_id: int) -> list[Message]:
        version = self.version
        return [rec.value for rec in self.store._messages_by_creator.get(person_id, [])
                if rec.visible_at(version)]

    def interaction_count(self, person_a: int, person_b: int) -> int:
        history = self.store._interactions.get(_pair(person_a, person_b))
        if not history:
            return 0
        idx = bisect_right(history, (self.version, float("inf")))
        return history[idx - 1][1] if idx else 0


class ReferenceStore:
    """The system under test: snapshot reads, serialized atomic writes."""

    def __init__(self, delete_forums_of_deleted_moderator: bool = True):
        self.delete_forums_of_deleted_moderator = delete_forums_of_deleted_moderator
        self._lock = threading.Lock()
        self._version = 0
        self._persons: dict[int, _Rec] = {}
        self._forums: dict[int, _Rec] = {}
        self._messages: dict[int, _Rec] = {}
        self._knows: dict[tuple[int, int], _Rec] = {}
        self._likes: dict[tuple[int, int], _Rec] = {}
        self._members: dict[tuple[int, int], _Rec] = {}
        # Append-only adjacency; records are shared with the dicts above.
        self._knows_by_person: dict[int, list[_Rec]] = {}
        self._likes_by_person: dict[int, list[_Rec]] = {}
        self._likes_by_message: dict[int, list[_Rec]] = {}
        self._members_by_person: dict[int, list[_Rec]] = {}
        self._members_by_forum: dict[int, list[_Rec]] = {}
        self._messages_by_creator: dict[int, list[_Rec]] = {}
        self._posts_by_forum: dict[int, list[_Rec]] = {}
        self._children: dict[int, list[_Rec]] = {}
        self._forums_by_moderator: dict[int, list[_Rec]] = {}
        # (person, person) -> [(version, count), ...], versions ascending.
        self._interactions: dict[tuple[int, int], list[tuple[int, int]]] = {}

    @property
    def version(self) -> int:
        return self._version

    def begin_read(self) -> Snapshot:
        return Snapshot(self, self._version)

    # -- loading ---------------------------------------------------------

    def bulk_load(self, data) -> int:
        """Load an initial state (anything with the six entity mappings).

        Everything becomes visible at version 1.  Referential integrity is
        checked up front; interaction counts are derived from the loaded
        comment threads.
        """
        with self._lock:
            if self._version != 0:
                raise IntegrityError("store already loaded")
            for person in data.persons.values():
                self._add_person(person, 1)
            for forum in data.forums.values():
                if forum.moderator_person_id not in data.persons:
                    raise IntegrityError(
                        f"forum {forum.id} moderated by unknown person")
                self._add_forum(forum, 1)
            for message in sorted(data.messages.values(), key=lambda m: m.id):
                self._check_message_refs(message, data)
                self._add_message(message, 1)
            for edge in data.knows.values():
                self._check_endpoints(edge.person1_id in data.persons
                                      and edge.person2_id in data.persons,
                                      f"knows edge {edge.pair}")
                self._add_knows(edge, 1)
            for like in data.likes.values():
                self._check_endpoints(like.person_id in data.persons
                                      and like.message_id in data.messages,
                                      f"like ({like.person_id}, {like.message_id})")
                self._add_like(like, 1)
            for member in data.members.values():
                self._check_endpoints(member.person_id in data.persons
                                      and member.forum_id in data.forums,
                                      f"membership ({member.forum_id}, {member.person_id})")
                self._add_member(member, 1)
            for rec in self._messages.values():
                message = rec.value
                if message.kind == COMMENT:
                    self._bump_interactions_unlocked(message, +1, 1)
            self._version = 1
        return 1

    @staticmethod
    def _check_endpoints(ok: bool, what: str) -> None:
        if not ok:
            raise IntegrityError(f"{what} references a missing entity")

    @staticmethod
    def _check_message_refs(message: Message, data) -> None:
        if message.creator_person_id not in data.persons:
            raise IntegrityError(f"message {message.id} has unknown creator")
        if message.kind == POST:
            if message.container_forum_id not in data.forums:
                raise IntegrityError(f"post {message.id} in unknown forum")
        elif message.reply_to_message_id not in data.messages:
            raise IntegrityError(f"comment {message.id} replies to unknown message")

    # -- record helpers (commit lock must be held) -------------------------

    def _add_person(self, person: Person, version: int) -> _Rec:
        if person.id in self._persons:
            raise IntegrityError(f"duplicate person {person.id}")
        rec = _Rec(person, version)
        self._persons[person.id] = rec
        return rec

    def _add_forum(self, forum: Forum, version: int) -> _Rec:
        if forum.id in self._forums:
            raise IntegrityError(f"duplicate forum {forum.id}")
        rec = _Rec(forum, version)
        self._forums[forum.id] = rec
        self._forums_by_moderator.setdefault(forum.moderator_person_id, []).append(rec)
        return rec

    def _add_message(self, message: Message, version: int) -> _Rec:
        if message.id in self._messages:
            raise IntegrityError(f"duplicate message {message.id}")
        rec = _Rec(message, version)
        self._messages[message.id] = rec
        self._messages_by_creator.setdefault(message.creator_person_id, []).append(rec)
        if message.kind == POST:
            self._posts_by_forum.setdefault(message.container_forum_id, []).append(rec)
        else:
            self._children.setdefault(message.reply_to_message_id, []).append(rec)
        return rec

    def _add_knows(self, edge: KnowsEdge, version: int) -> _Rec:
        if edge.pair in self._knows:
            raise IntegrityError(f"duplicate knows edge {edge.pair}")
        rec = _Rec(edge, version)
        self._knows[edge.pair] = rec
        self._knows_by_person.setdefault(edge.person1_id, []).append(rec)
        self._knows_by_person.setdefault(edge.person2_id, []).append(rec)
        return rec

    def _add_like(self, like: LikesEdge, version: int) -> _Rec:
        key = (like.person_id, like.message_id)
        if key in self._likes:
            raise IntegrityError(f"duplicate like {key}")
        rec = _Rec(like, version)
        self._likes[key] = rec
        self._likes_by_person.setdefault(like.person_id, []).append(rec)
        self._likes_by_message.setdefault(like.message_id, []).append(rec)
        return rec

    def _add_member(self, member: HasMemberEdge, version: int) -> _Rec:
        key = (member.forum_id, member.person_id)
        if key in self._members:
            raise IntegrityError(f"duplicate membership {key}")
        rec = _Rec(member, version)
        self._members[key] = rec
        self._members_by_person.setdefault(member.person_id, []).append(rec)
        self._members_by_forum.setdefault(member.forum_id, []).append(rec)
        return rec

    def _bump_interactions_unlocked(self, comment: Message, delta: int,
                                    version: int) -> None:
        parent = self._messages[comment.reply_to_message_id].value
        if parent.creator_person_id == comment.creator_person_id:
            return
        key = _pair(parent.creator_person_id, comment.creator_person_id)
        history = self._interactions.setdefault(key, [])
        current = history[-1][1] if history else 0
        if history and history[-1][0] == version:
            history[-1] = (version, current + delta)
        else:
            history.append((version, current + delta))

    def _live_now(self, table: dict, key) -> _Rec | None:
        rec = table.get(key)
        if rec is not None and rec.deleted_v is None:
            return rec
        return None

    def _require(self, table: dict, key, what: str) -> _Rec:
        rec = self._live_now(table, key)
        if rec is None:
            raise DependencyMissing(f"{what} {key} is absent or deleted")
        return rec

    # -- updates -----------------------------------------------------------

    def execute_update(self, op: UpdateOperation) -> dict:
        if op.is_insert:
            version = self._apply_insert(op)
            return {"version": version}
        version, nodes = self._apply_delete(op)
        return {"version": version, "cascadeNodes": nodes}

    def _apply_insert(self, op: UpdateOperation) -> int:
        p = op.payload
        t = op.scheduled_time
        life = Lifecycle(creation=t)
        with self._lock:
            version = self._version + 1
            kind = op.op_type
            if kind == INS_PERSON:
                self._add_person(Person(
                    id=p["id"], first_name=p["firstName"], last_name=p["lastName"],
                    country_id=p["countryId"], university_id=p["universityId"],
                    tag_interests=frozenset(p["tagInterests"]), lifecycle=life), version)
            elif kind in (INS_LIKE_POST, INS_LIKE_COMMENT):
                self._require(self._persons, p["personId"], "person")
                message = self._require(self._messages, p["messageId"], "message").value
                expected = POST if kind == INS_LIKE_POST else COMMENT
                if message.kind != expected:
                    raise IntegrityError(
                        f"like op {kind} targets a {message.kind} message")
                self._add_like(LikesEdge(person_id=p["personId"],
                                         message_id=p["messageId"], lifecycle=life),
                               version)
            elif kind == INS_FORUM:
                self._require(self._persons, p["moderatorPersonId"], "person")
                self._add_forum(Forum(id=p["id"],
                                      moderator_person_id=p["moderatorPersonId"],
                                      lifecycle=life), version)
            elif kind == INS_MEMBER:
                self._require(self._forums, p["forumId"], "forum")
                self._require(self._persons, p["personId"], "person")
                self._add_member(HasMemberEdge(forum_id=p["forumId"],
                                               person_id=p["personId"], lifecycle=life),
                                 version)
            elif kind == INS_POST:
                self._require(self._persons, p["creatorPersonId"], "person")
                self._require(self._forums, p["containerForumId"], "forum")
                self._add_message(Message(
                    id=p["id"], kind=POST, creator_person_id=p["creatorPersonId"],
                    container_forum_id=p["containerForumId"], reply_to_message_id=None,
                    country_id=p["countryId"], creation_tag_ids=frozenset(p["tagIds"]),
                    lifecycle=life, root_post_id=p["id"]), version)
            elif kind == INS_COMMENT:
                self._require(self._persons, p["creatorPersonId"], "person")
                parent = self._require(self._messages, p["replyToMessageId"],
                                       "message").value
                comment = Message(
                    id=p["id"], kind=COMMENT, creator_person_id=p["creatorPersonId"],
                    container_forum_id=None, reply_to_message_id=p["replyToMessageId"],
                    country_id=p["countryId"], creation_tag_ids=frozenset(p["tagIds"]),
                    lifecycle=life, root_post_id=parent.root_post_id)
                self._add_message(comment, version)
                self._bump_interactions_unlocked(comment, +1, version)
            elif kind == INS_KNOWS:
                self._require(self._persons, p["person1Id"], "person")
                self._require(self._persons, p["person2Id"], "person")
                self._add_knows(KnowsEdge.make(p["person1Id"], p["person2Id"], life),
                                version)
            else:
                raise IntegrityError(f"unknown insert op {kind}")
            self._version = version
        return version

    _DELETE_TARGET = {
        DEL_PERSON: ("persons", lambda p: p["personId"]),
        DEL_LIKE_POST: ("likes", lambda p: (p["personId"], p["messageId"])),
        DEL_LIKE_COMMENT: ("likes", lambda p: (p["personId"], p["messageId"])),
        DEL_FORUM: ("forums", lambda p: p["forumId"]),
        DEL_MEMBER: ("members", lambda p: (p["forumId"], p["personId"])),
        DEL_POST: ("messages", lambda p: p["messageId"]),
        DEL_COMMENT: ("messages", lambda p: p["messageId"]),
        DEL_KNOWS: ("knows", lambda p: _pair(p["person1Id"], p["person2Id"])),
    }

    def _apply_delete(self, op: UpdateOperation) -> tuple[int, int]:
        kind, key_of = self._DELETE_TARGET.get(op.op_type, (None, None))
        if kind is None:
            raise IntegrityError(f"unknown delete op {op.op_type}")
        key = key_of(op.payload)
        with self._lock:
            closure = self._closure_unlocked(kind, key)
            table = {"persons": self._persons, "forums": self._forums,
                     "messages": self._messages, "knows": self._knows,
                     "likes": self._likes, "members": self._members}
            target = table[kind].get(key)
            if target is None or target.deleted_v is not None:
                raise UnknownEntity(f"{kind} {key} is absent or already deleted")
            expected = {POST: DEL_POST, COMMENT: DEL_COMMENT}
            if kind == "messages" and expected[target.value.kind] != op.op_type:
                raise IntegrityError(
                    f"delete op {op.op_type} targets a {target.value.kind} message")
            version = self._version + 1
            nodes = self._tombstone_all(closure, version)
            self._version = version
        return version, nodes

    def _tombstone_all(self, closure: list[tuple[str, object, _Rec]],
                       version: int) -> int:
        """Close every record in the cascade at the same version."""
        nodes = 0
        for coll, _key, rec in closure:
            rec.deleted_v = version
            if coll in ("persons", "forums", "messages"):
                nodes += 1
            if coll == "messages" and rec.value.kind == COMMENT:
                self._bump_interactions_unlocked(rec.value, -1, version)
        return nodes

    def cascade_preview(self, kind: str, key) -> list[tuple[str, object]]:
        """The (collection, key) pairs a delete of this entity would remove."""
        with self._lock:
            return sorted((coll, k) for coll, k, _rec in
                          self._closure_unlocked(kind, key))

    def _closure_unlocked(self, kind: str, key) -> list[tuple[str, object, _Rec]]:
        """Live dependent closure of one entity, the target included."""
        out: list[tuple[str, object, _Rec]] = []
        seen: set[tuple[str, object]] = set()

        def live(table, k):
            return self._live_now(table, k)

        def visit_person(pid: int) -> None:
            rec = live(self._persons, pid)
            if rec is None or ("persons", pid) in seen:
                return
            seen.add(("persons", pid))
            out.append(("persons", pid, rec))
            for edge_rec in self._knows_by_person.get(pid, []):
                if edge_rec.deleted_v is None:
                    edge = edge_rec.value
                    if ("knows", edge.pair) not in seen:
                        seen.add(("knows", edge.pair))
                        out.append(("knows", edge.pair, edge_rec))
            for like_rec in self._likes_by_person.get(pid, []):
                if like_rec.deleted_v is None:
                    k = (like_rec.value.person_id, like_rec.value.message_id)
                    if ("likes", k) not in seen:
                        seen.add(("likes", k))
                        out.append(("likes", k, like_rec))
            for member_rec in self._members_by_person.get(pid, []):
                if member_rec.deleted_v is None:
                    k = (member_rec.value.forum_id, member_rec.value.person_id)
                    if ("members", k) not in seen:
                        seen.add(("members", k))
                        out.append(("members", k, member_rec))
            for msg_rec in self._messages_by_creator.get(pid, []):
                if msg_rec.deleted_v is None:
                    visit_message(msg_rec.value.id)
            if self.delete_forums_of_deleted_moderator:
                for forum_rec in self._forums_by_moderator.get(pid, []):
                    if forum_rec.deleted_v is None:
                        visit_forum(forum_rec.value.id)

        def visit_forum(fid: int) -> None:
            rec = live(self._forums, fid)
            if rec is None or ("forums", fid) in seen:
                return
            seen.add(("forums", fid))
            out.append(("forums", fid, rec))
            for member_rec in self._members_by_forum.get(fid, []):
                if member_rec.deleted_v is None:
                    k = (member_rec.value.forum_id, member_rec.value.person_id)
                    if ("members", k) not in seen:
                        seen.add(("members", k))
                        out.append(("members", k, member_rec))
            for post_rec in self._posts_by_forum.get(fid, []):
                if post_rec.deleted_v is None:
                    visit_message(post_rec.value.id)

        def visit_message(mid: int) -> None:
            rec = live(self._messages, mid)
            if rec is None or ("messages", mid) in seen:
                return
            seen.add(("messages", mid))
            out.append(("messages", mid, rec))
            for like_rec in self._likes_by_message.get(mid, []):
                if like_rec.deleted_v is None:
                    k = (like_rec.value.person_id, like_rec.value.message_id)
                    if ("likes", k) not in seen:
                        seen.add(("likes", k))
                        out.append(("likes", k, like_rec))
            for child_rec in self._children.get(mid, []):
                if child_rec.deleted_v is None:
                    visit_message(child_rec.value.id)

        if kind == "persons":
            visit_person(key)
        elif kind == "forums":
            visit_forum(key)
        elif kind == "messages":
            visit_message(key)
        else:
            table = {"knows": self._knows, "likes": self._likes,
                     "members": self._members}[kind]
            rec = self._live_now(table, key)
            if rec is not None:
                seen.add((kind, key))
                out.append((kind, key, rec))
        return out

    # -- queries -----------------------------------------------------------

    def execute_query(self, variant: str, params: dict,
                      snapshot: Snapshot | None = None):
        snap = snapshot or self.begin_read()
        base = variant.rstrip("ab")
        if base == "CR3":
            return self._cr3(snap, params)
        if base == "CR13":
            return self._cr13(snap, params)
        if base == "CR14":
            return self._cr14(snap, params)
        if variant == "SR2":
            return self._sr2(snap, params)
        if variant == "SR6":
            return self._sr6(snap, params)
        raise IntegrityError(f"unknown query variant {variant}")

    @staticmethod
    def _two_hop(snap: Snapshot, person_id: int) -> set[int]:
        ring1 = set(snap.friend_ids(person_id))
        ring2: set[int] = set()
        for friend in ring1:
            ring2.update(snap.friend_ids(friend))
        ring2 |= ring1
        ring2.discard(person_id)
        return ring2

    def _cr3(self, snap: Snapshot, params: dict) -> list[dict]:
        """Friends within two hops that posted from both countries in a window."""
        if snap.person(params["personId"]) is None:
            return []
        cx, cy = params["countryXId"], params["countryYId"]
        start = params["startDate"]
        end = start + params["durationDays"] * 86_400_000
        rows = []
        for pid in self._two_hop(snap, params["personId"]):
            candidate = snap.person(pid)
            if candidate is None or candidate.country_id in (cx, cy):
                continue
            x_count = y_count = 0
            for message in snap.messages_of(pid):
                if not start <= message.lifecycle.creation < end:
                    continue
                if message.country_id == cx:
                    x_count += 1
                if message.country_id == cy:
                    y_count += 1
            if x_count and y_count:
                rows.append({"personId": pid, "xCount": x_count,
                             "yCount": y_count, "totalCount": x_count + y_count})
        rows.sort(key=lambda r: (-r["totalCount"], r["personId"]))
        return rows

    def _cr13(self, snap: Snapshot, params: dict) -> dict:
        source, target = params["person1Id"], params["person2Id"]
        if snap.person(source) is None or snap.person(target) is None:
            return {"shortestPathLength": -1}
        if source == target:
            return {"shortestPathLength": 0}
        dist = {source: 0}
        frontier = [source]
        while frontier:
            nxt = []
            for node in frontier:
                for peer in snap.friend_ids(node):
                    if peer not in dist:
                        dist[peer] = dist[node] + 1
                        if peer == target:
                            return {"shortestPathLength": dist[peer]}
                        nxt.append(peer)
            frontier = nxt
        return {"shortestPathLength": -1}

    def _cr14(self, snap: Snapshot, params: dict) -> dict | None:
        """Cheapest path where each hop costs more the less the pair interacted."""
        source, target = params["person1Id"], params["person2Id"]
        if snap.person(source) is None or snap.person(target) is None:
            return None
        if source == target:
            return {"path": [source], "weight": 0}
        dist: dict[int, int] = {source: 0}
        parent: dict[int, int] = {}
        heap = [(0, source)]
        while heap:
            d, node = heapq.heappop(heap)
            if d > dist.get(node, float("inf")):
                continue
            if node == target:
                path = [node]
                while path[-1] != source:
                    path.append(parent[path[-1]])
                return {"path": path[::-1], "weight": d}
            for peer in snap.friend_ids(node):
                count = snap.interaction_count(node, peer)
                if count < 1:
                    continue
                nd = d + edge_weight(count)
                if nd < dist.get(peer, float("inf")):
                    dist[peer] = nd
                    parent[peer] = node
                    heapq.heappush(heap, (nd, peer))
        return None

    def _sr2(self, snap: Snapshot, params: dict) -> list[dict]:
        messages = snap.messages_of(params["personId"])
        messages.sort(key=lambda m: (-m.lifecycle.creation, -m.id))
        rows = []
        for message in messages[:SR2_LIMIT]:
            root = snap.message(message.root_post_id)
            rows.append({"messageId": message.id,
                         "creationDate": message.lifecycle.creation,
                         "rootPostId": message.root_post_id,
                         "rootAuthorId": root.creator_person_id})
        return rows

    def _sr6(self, snap: Snapshot, params: dict) -> dict | None:
        message = snap.message(params["messageId"])
        if message is None:
            return None
        root = snap.message(message.root_post_id)
        forum = snap.forum(root.container_forum_id)
        return {"forumId": forum.id, "moderatorPersonId": forum.moderator_person_id}

    # -- audits (single-threaded use) ---------------------------------------

    def state_at(self, version: int | None = None) -> dict[str, dict]:
        """Live values per collection at a version (default: latest)."""
        v = self._version if version is None else version
        out: dict[str, dict] = {}
        for name, table in (("persons", self._persons), ("forums", self._forums),
                            ("messages", self._messages), ("knows", self._knows),
                            ("likes", self._likes), ("members", self._members)):
            out[name] = {key: rec.value for key, rec in table.items()
                         if rec.visible_at(v)}
        return out

    def counts(self, version: int | None = None) -> dict[str, int]:
        return {name: len(values) for name, values in self.state_at(version).items()}
