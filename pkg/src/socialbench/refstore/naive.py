"""Brute-force twin of the reference store.

Same interface, deliberately different internals: plain dicts of live
entities, full scans instead of adjacency indexes, reply chains walked
instead of stored root pointers, interaction counts recomputed from the
live comments on every query, and an O(V^2) cheapest-path loop instead
of a heap.  Slow on purpose; it exists so the two implementations can
disagree only when one of them is wrong.
"""

from __future__ import annotations

import math
import threading
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


def _naive_weight(interactions: int) -> int:
    # Same contract as the reference implementation, written differently:
    # round-half-away-from-zero via the sign-split of the builtin floor.
    x = 40.0 - math.sqrt(interactions)
    sign = 1 if x >= 0 else -1
    return max(sign * math.floor(abs(x) + 0.5), 1)


@dataclass
class _State:
    persons: dict[int, Person] = field(default_factory=dict)
    forums: dict[int, Forum] = field(default_factory=dict)
    messages: dict[int, Message] = field(default_factory=dict)
    knows: dict[tuple[int, int], KnowsEdge] = field(default_factory=dict)
    likes: dict[tuple[int, int], LikesEdge] = field(default_factory=dict)
    members: dict[tuple[int, int], HasMemberEdge] = field(default_factory=dict)

    def copy(self) -> "_State":
        return _State(dict(self.persons), dict(self.forums), dict(self.messages),
                      dict(self.knows), dict(self.likes), dict(self.members))


class NaiveStore:
    """Full-scan oracle store; snapshot reads are literal state copies."""

    def __init__(self, delete_forums_of_deleted_moderator: bool = True):
        self.delete_forums_of_deleted_moderator = delete_forums_of_deleted_moderator
        self._lock = threading.Lock()
        self._state = _State()
        self._version = 0

    @property
    def version(self) -> int:
        return self._version

    def begin_read(self) -> _State:
        with self._lock:
            return self._state.copy()

    def bulk_load(self, data) -> int:
        with self._lock:
            if self._version != 0:
                raise IntegrityError("store already loaded")
            state = self._state
            state.persons.update(data.persons)
            state.forums.update(data.forums)
            state.messages.update(data.messages)
            state.knows.update(data.knows)
            state.likes.update(data.likes)
            state.members.update(data.members)
            for forum in state.forums.values():
                if forum.moderator_person_id not in state.persons:
                    raise IntegrityError(f"forum {forum.id} has unknown moderator")
            for message in state.messages.values():
                if message.creator_person_id not in state.persons:
                    raise IntegrityError(f"message {message.id} has unknown creator")
                if message.kind == POST and message.container_forum_id not in state.forums:
                    raise IntegrityError(f"post {message.id} in unknown forum")
                if message.kind == COMMENT and message.reply_to_message_id not in state.messages:
                    raise IntegrityError(f"comment {message.id} has unknown parent")
            for (p1, p2) in state.knows:
                if p1 not in state.persons or p2 not in state.persons:
                    raise IntegrityError(f"knows edge ({p1}, {p2}) dangling")
            for (pid, mid) in state.likes:
                if pid not in state.persons or mid not in state.messages:
                    raise IntegrityError(f"like ({pid}, {mid}) dangling")
            for (fid, pid) in state.members:
                if fid not in state.forums or pid not in state.persons:
                    raise IntegrityError(f"membership ({fid}, {pid}) dangling")
            self._version = 1
        return 1

    # -- updates -----------------------------------------------------------

    def execute_update(self, op: UpdateOperation) -> dict:
        with self._lock:
            if op.is_insert:
                self._insert(op)
                self._version += 1
                return {"version": self._version}
            nodes = self._delete(op)
            self._version += 1
            return {"version": self._version, "cascadeNodes": nodes}

    def _insert(self, op: UpdateOperation) -> None:
        state = self._state
        p = op.payload
        life = Lifecycle(creation=op.scheduled_time)
        kind = op.op_type

        def need(cond, what):
            if not cond:
                raise DependencyMissing(what)

        if kind == INS_PERSON:
            if p["id"] in state.persons:
                raise IntegrityError(f"duplicate person {p['id']}")
            state.persons[p["id"]] = Person(
                id=p["id"], first_name=p["firstName"], last_name=p["lastName"],
                country_id=p["countryId"], university_id=p["universityId"],
                tag_interests=frozenset(p["tagInterests"]), lifecycle=life)
        elif kind in (INS_LIKE_POST, INS_LIKE_COMMENT):
            need(p["personId"] in state.persons, f"person {p['personId']}")
            need(p["messageId"] in state.messages, f"message {p['messageId']}")
            expected = POST if kind == INS_LIKE_POST else COMMENT
            if state.messages[p["messageId"]].kind != expected:
                raise IntegrityError(f"{kind} targets wrong message kind")
            key = (p["personId"], p["messageId"])
            if key in state.likes:
                raise IntegrityError(f"duplicate like {key}")
            state.likes[key] = LikesEdge(person_id=key[0], message_id=key[1],
                                         lifecycle=life)
        elif kind == INS_FORUM:
            need(p["moderatorPersonId"] in state.persons,
                 f"person {p['moderatorPersonId']}")
            if p["id"] in state.forums:
                raise IntegrityError(f"duplicate forum {p['id']}")
            state.forums[p["id"]] = Forum(id=p["id"],
                                          moderator_person_id=p["moderatorPersonId"],
                                          lifecycle=life)
        elif kind == INS_MEMBER:
            need(p["forumId"] in state.forums, f"forum {p['forumId']}")
            need(p["personId"] in state.persons, f"person {p['personId']}")
            key = (p["forumId"], p["personId"])
            if key in state.members:
                raise IntegrityError(f"duplicate membership {key}")
            state.members[key] = HasMemberEdge(forum_id=key[0], person_id=key[1],
                                               lifecycle=life)
        elif kind == INS_POST:
            need(p["creatorPersonId"] in state.persons, f"person {p['creatorPersonId']}")
            need(p["containerForumId"] in state.forums, f"forum {p['containerForumId']}")
            if p["id"] in state.messages:
                raise IntegrityError(f"duplicate message {p['id']}")
            state.messages[p["id"]] = Message(
                id=p["id"], kind=POST, creator_person_id=p["creatorPersonId"],
                container_forum_id=p["containerForumId"], reply_to_message_id=None,
                country_id=p["countryId"], creation_tag_ids=frozenset(p["tagIds"]),
                lifecycle=life, root_post_id=p["id"])
        elif kind == INS_COMMENT:
            need(p["creatorPersonId"] in state.persons, f"person {p['creatorPersonId']}")
            need(p["replyToMessageId"] in state.messages,
                 f"message {p['replyToMessageId']}")
            if p["id"] in state.messages:
                raise IntegrityError(f"duplicate message {p['id']}")
            parent = state.messages[p["replyToMessageId"]]
            state.messages[p["id"]] = Message(
                id=p["id"], kind=COMMENT, creator_person_id=p["creatorPersonId"],
                container_forum_id=None, reply_to_message_id=p["replyToMessageId"],
                country_id=p["countryId"], creation_tag_ids=frozenset(p["tagIds"]),
                lifecycle=life, root_post_id=parent.root_post_id)
        elif kind == INS_KNOWS:
            need(p["person1Id"] in state.persons, f"person {p['person1Id']}")
            need(p["person2Id"] in state.persons, f"person {p['person2Id']}")
            edge = KnowsEdge.make(p["person1Id"], p["person2Id"], life)
            if edge.pair in state.knows:
                raise IntegrityError(f"duplicate knows edge {edge.pair}")
            state.knows[edge.pair] = edge
        else:
            raise IntegrityError(f"unknown insert op {kind}")

    def _delete(self, op: UpdateOperation) -> int:
        state = self._state
        p = op.payload
        kind = op.op_type
        if kind == DEL_PERSON:
            if p["personId"] not in state.persons:
                raise UnknownEntity(f"person {p['personId']}")
            return self._delete_person(p["personId"])
        if kind in (DEL_LIKE_POST, DEL_LIKE_COMMENT):
            key = (p["personId"], p["messageId"])
            if key not in state.likes:
                raise UnknownEntity(f"like {key}")
            del state.likes[key]
            return 0
        if kind == DEL_FORUM:
            if p["forumId"] not in state.forums:
                raise UnknownEntity(f"forum {p['forumId']}")
            return self._delete_forum(p["forumId"])
        if kind == DEL_MEMBER:
            key = (p["forumId"], p["personId"])
            if key not in state.members:
                raise UnknownEntity(f"membership {key}")
            del state.members[key]
            return 0
        if kind in (DEL_POST, DEL_COMMENT):
            message = state.messages.get(p["messageId"])
            if message is None:
                raise UnknownEntity(f"message {p['messageId']}")
            expected = POST if kind == DEL_POST else COMMENT
            if message.kind != expected:
                raise IntegrityError(f"{kind} targets wrong message kind")
            return self._delete_message(p["messageId"])
        if kind == DEL_KNOWS:
            a, b = p["person1Id"], p["person2Id"]
            key = (a, b) if a <= b else (b, a)
            if key not in state.knows:
                raise UnknownEntity(f"knows edge {key}")
            del state.knows[key]
            return 0
        raise IntegrityError(f"unknown delete op {kind}")

    def _delete_person(self, pid: int) -> int:
        state = self._state
        nodes = 1
        del state.persons[pid]
        for key in [k for k in state.knows if pid in k]:
            del state.knows[key]
        for key in [k for k in state.likes if k[0] == pid]:
            del state.likes[key]
        for key in [k for k in state.members if k[1] == pid]:
            del state.members[key]
        for mid in [m.id for m in state.messages.values()
                    if m.creator_person_id == pid]:
            if mid in state.messages:
                nodes += self._delete_message(mid)
        if self.delete_forums_of_deleted_moderator:
            for fid in [f.id for f in state.forums.values()
                        if f.moderator_person_id == pid]:
                if fid in state.forums:
                    nodes += self._delete_forum(fid)
        return nodes

    def _delete_forum(self, fid: int) -> int:
        state = self._state
        nodes = 1
        del state.forums[fid]
        for key in [k for k in state.members if k[0] == fid]:
            del state.members[key]
        for mid in [m.id for m in state.messages.values()
                    if m.kind == POST and m.container_forum_id == fid]:
            if mid in state.messages:
                nodes += self._delete_message(mid)
        return nodes

    def _delete_message(self, mid: int) -> int:
        state = self._state
        nodes = 1
        del state.messages[mid]
        for key in [k for k in state.likes if k[1] == mid]:
            del state.likes[key]
        for child in [m.id for m in state.messages.values()
                      if m.reply_to_message_id == mid]:
            if child in state.messages:
                nodes += self._delete_message(child)
        return nodes

    def cascade_preview(self, kind: str, key) -> list[tuple[str, object]]:
        """Dry-run of a delete: run it on a copy, diff what disappeared."""
        with self._lock:
            saved = self._state
            self._state = saved.copy()
            try:
                if kind == "persons":
                    self._delete_person(key)
                elif kind == "forums":
                    self._delete_forum(key)
                elif kind == "messages":
                    self._delete_message(key)
                else:
                    getattr(self._state, kind).pop(key)
            finally:
                after, self._state = self._state, saved
        gone = []
        for coll in ("persons", "forums", "messages", "knows", "likes", "members"):
            kept = getattr(after, coll)
            for k in getattr(saved, coll):
                if k not in kept:
                    gone.append((coll, k))
        return sorted(gone)

    # -- queries -----------------------------------------------------------

    def execute_query(self, variant: str, params: dict,
                      snapshot: _State | None = None):
        state = snapshot if snapshot is not None else self.begin_read()
        base = variant.rstrip("ab")
        if base == "CR3":
            return self._cr3(state, params)
        if base == "CR13":
            return self._cr13(state, params)
        if base == "CR14":
            return self._cr14(state, params)
        if variant == "SR2":
            return self._sr2(state, params)
        if variant == "SR6":
            return self._sr6(state, params)
        raise IntegrityError(f"unknown query variant {variant}")

    @staticmethod
    def _friends(state: _State, pid: int) -> set[int]:
        out = set()
        for (a, b) in state.knows:
            if a == pid:
                out.add(b)
            elif b == pid:
                out.add(a)
        return out

    def _cr3(self, state: _State, params: dict) -> list[dict]:
        root = params["personId"]
        if root not in state.persons:
            return []
        candidates = self._friends(state, root)
        for friend in list(candidates):
            candidates |= self._friends(state, friend)
        candidates.discard(root)
        cx, cy = params["countryXId"], params["countryYId"]
        start = params["startDate"]
        end = start + params["durationDays"] * 86_400_000
        rows = []
        for pid in candidates:
            if state.persons[pid].country_id in (cx, cy):
                continue
            x_count = sum(1 for m in state.messages.values()
                          if m.creator_person_id == pid and m.country_id == cx
                          and start <= m.lifecycle.creation < end)
            y_count = sum(1 for m in state.messages.values()
                          if m.creator_person_id == pid and m.country_id == cy
                          and start <= m.lifecycle.creation < end)
            if x_count > 0 and y_count > 0:
                rows.append({"personId": pid, "xCount": x_count, "yCount": y_count,
                             "totalCount": x_count + y_count})
        return sorted(rows, key=lambda r: (-r["totalCount"], r["personId"]))

    def _cr13(self, state: _State, params: dict) -> dict:
        source, target = params["person1Id"], params["person2Id"]
        if source not in state.persons or target not in state.persons:
            return {"shortestPathLength": -1}
        seen = {source}
        frontier = {source}
        hops = 0
        while frontier:
            if target in frontier:
                return {"shortestPathLength": hops}
            hops += 1
            frontier = {peer for node in frontier
                        for peer in self._friends(state, node)} - seen
            seen |= frontier
        return {"shortestPathLength": -1}

    @staticmethod
    def _interaction_counts(state: _State) -> dict[tuple[int, int], int]:
        counts: dict[tuple[int, int], int] = {}
        for message in state.messages.values():
            if message.kind != COMMENT:
                continue
            parent = state.messages.get(message.reply_to_message_id)
            if parent is None:
                continue
            a, b = message.creator_person_id, parent.creator_person_id
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            counts[key] = counts.get(key, 0) + 1
        return counts

    def _cr14(self, state: _State, params: dict) -> dict | None:
        source, target = params["person1Id"], params["person2Id"]
        if source not in state.persons or target not in state.persons:
            return None
        if source == target:
            return {"path": [source], "weight": 0}
        counts = self._interaction_counts(state)
        weights: dict[tuple[int, int], int] = {}
        for pair in state.knows:
            n = counts.get(pair, 0)
            if n >= 1:
                weights[pair] = _naive_weight(n)
        dist = {pid: math.inf for pid in state.persons}
        dist[source] = 0
        parent: dict[int, int] = {}
        unvisited = set(state.persons)
        while unvisited:
            node = min(unvisited, key=lambda v: (dist[v], v))
            if math.isinf(dist[node]) or node == target:
                break
            unvisited.discard(node)
            for (a, b), w in weights.items():
                peer = b if a == node else a if b == node else None
                if peer is None or peer not in unvisited:
                    continue
                if dist[node] + w < dist[peer]:
                    dist[peer] = dist[node] + w
                    parent[peer] = node
        if math.isinf(dist[target]):
            return None
        path = [target]
        while path[-1] != source:
            path.append(parent[path[-1]])
        return {"path": path[::-1], "weight": int(dist[target])}

    @staticmethod
    def _root_post(state: _State, message: Message) -> Message:
        while message.kind != POST:
            message = state.messages[message.reply_to_message_id]
        return message

    def _sr2(self, state: _State, params: dict) -> list[dict]:
        mine = [m for m in state.messages.values()
                if m.creator_person_id == params["personId"]]
        mine.sort(key=lambda m: (-m.lifecycle.creation, -m.id))
        rows = []
        for message in mine[:SR2_LIMIT]:
            root = self._root_post(state, message)
            rows.append({"messageId": message.id,
                         "creationDate": message.lifecycle.creation,
                         "rootPostId": root.id,
                         "rootAuthorId": root.creator_person_id})
        return rows

    def _sr6(self, state: _State, params: dict) -> dict | None:
        message = state.messages.get(params["messageId"])
        if message is None:
            return None
        root = self._root_post(state, message)
        forum = state.forums[root.container_forum_id]
        return {"forumId": forum.id, "moderatorPersonId": forum.moderator_person_id}

    # -- audits -------------------------------------------------------------

    def state_at(self, version: int | None = None) -> dict[str, dict]:
        if version is not None and version != self._version:
            raise IntegrityError("naive store only knows its latest state")
        state = self.begin_read()
        return {coll: dict(getattr(state, coll))
                for coll in ("persons", "forums", "messages", "knows", "likes",
                             "members")}

    def counts(self, version: int | None = None) -> dict[str, int]:
        return {name: len(values) for name, values in self.state_at(version).items()}
