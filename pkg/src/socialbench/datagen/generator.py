"""Deterministic temporal social-graph generator.

Entities are sampled in dependency order (persons, friendships, forums,
memberships, posts, comment trees, likes, then flashmob bursts) so that
every entity's final deletion instant is known before anything that hangs
off it is created.  That ordering lets the sampler enforce two temporal
rules up front:

  * creation(child) >= creation(parent) + t_safe for every reference, and
  * creation(child) <= deletion(parent) - t_safe whenever a parent will be
    deleted, so a parent's cascading delete never races anything it kills.

Deletions propagate at generation time: an entity's effective deletion is
the earliest of its own sampled removal and the deletions of everything it
depends on (its cascade ancestors), all at the same instant as the root.
"""

from __future__ import annotations

import numpy as np

from ..model import (
    COMMENT,
    COUNTRIES,
    POST,
    TAGS,
    UNIVERSITIES_BY_COUNTRY,
    Forum,
    HasMemberEdge,
    KnowsEdge,
    Lifecycle,
    LikesEdge,
    Message,
    Person,
    TemporalGraph,
)
from ..simtime import MS_PER_DAY, MS_PER_HOUR, MS_PER_MINUTE
from .config import GenConfig

# Content volume per person/forum/message; content_scale multiplies these.
FORUMS_PER_PERSON = 0.2
MEAN_MEMBERS_PER_FORUM = 5.0
MEAN_POSTS_PER_FORUM = 4.0
MEAN_COMMENTS_PER_POST = 1.6
MEAN_LIKES_PER_MESSAGE = 0.4
MAX_TARGET_DEGREE = 120

# Probability that an entity is removed for its own reasons (rather than by
# a cascade), and the mean lifetime of such removals.  Tuned so the update
# stream's delete/insert ratio sits near one percent.
OWN_DELETE = {
    "knows": (0.022, 60 * MS_PER_DAY),
    "forum": (0.007, 90 * MS_PER_DAY),
    "member": (0.019, 50 * MS_PER_DAY),
    "post": (0.019, 35 * MS_PER_DAY),
    "comment": (0.022, 25 * MS_PER_DAY),
    "like": (0.015, 30 * MS_PER_DAY),
}

# Mean delay between an entity becoming possible (all parents exist) and its
# creation.  Exponential offsets keep replies and likes close to what they
# react to instead of smearing them over the rest of the window.
CREATION_LAG = {
    "knows": 240 * MS_PER_DAY,
    "forum": 240 * MS_PER_DAY,
    "member": 150 * MS_PER_DAY,
    "post": 150 * MS_PER_DAY,
    "comment": 25 * MS_PER_DAY,
    "like": 30 * MS_PER_DAY,
}

_INF = float("inf")


def generate_temporal_graph(config: GenConfig) -> TemporalGraph:
    """Generate the full temporal graph for a config. Deterministic per seed."""
    config.validate()
    return _Builder(config).build()


class _Builder:
    def __init__(self, config: GenConfig):
        self.cfg = config
        self.rng = np.random.default_rng(config.seed)
        self.graph = TemporalGraph()
        self.start = config.simulation_start
        self.end = config.simulation_end
        self.t_safe = config.t_safe
        self.scale = config.content_scale
        self._next_forum_id = 1
        self._next_message_id = 1
        # deletion instant as float-inf-capable lookups, keyed like the graph
        self._person_del: dict[int, float] = {}
        self._forum_del: dict[int, float] = {}
        self._message_del: dict[int, float] = {}
        self._friends: dict[int, list[int]] = {}
        self._forum_members: dict[int, list[int]] = {}

    # -- small sampling helpers -------------------------------------------

    def _instant(self, lo: int, hi: int) -> int:
        return int(self.rng.integers(lo, hi + 1))

    def _lagged_instant(self, lo: int, hi: int, kind: str) -> int:
        """Draw a creation instant a decaying lag after its lower bound."""
        span = hi - lo
        offset = int(self.rng.exponential(CREATION_LAG[kind]))
        for _ in range(4):
            if offset <= span:
                return lo + offset
            offset = int(self.rng.exponential(CREATION_LAG[kind]))
        return lo + int(self.rng.integers(0, span + 1))

    def _window(self, creations: list[int], bounds: list[float]) -> tuple[int, int] | None:
        """Valid creation window for an entity referencing the given parents.

        creations are parent creation instants, bounds their deletion
        instants (inf when never deleted).  Returns None when no instant
        satisfies both safety margins.
        """
        lo = max(creations) + self.t_safe
        hi = min(min(bounds), float(self.end) + 1.0) - self.t_safe
        hi = min(hi, float(self.end))
        if lo > hi:
            return None
        return lo, int(hi)

    def _own_deletion(self, kind: str, creation: int, bound: float) -> int | None:
        """Sample an independent removal instant, or None."""
        prob, mean = OWN_DELETE[kind]
        if self.rng.random() >= prob:
            return None
        d = creation + max(self.t_safe, int(self.rng.exponential(mean)))
        if d >= min(bound, float(self.end)):
            return None
        return d

    @staticmethod
    def _resolve(own: int | None, bounds: list[float]) -> float:
        candidates = [b for b in bounds if b != _INF]
        if own is not None:
            candidates.append(own)
        return min(candidates) if candidates else _INF

    @staticmethod
    def _lifecycle(creation: int, deletion: float) -> Lifecycle:
        return Lifecycle(creation, None if deletion == _INF else int(deletion))

    # -- stages ------------------------------------------------------------

    def build(self) -> TemporalGraph:
        self._sample_persons()
        self._sample_knows()
        self._sample_forums()
        self._sample_members()
        self._sample_threads()
        self._sample_likes()
        self._sample_flashmobs()
        return self.graph

    def _sample_persons(self) -> None:
        n = self.cfg.num_persons
        if n == 0:
            return
        window = self.end - self.start
        ranks = np.arange(1, len(COUNTRIES) + 1, dtype=float)
        country_p = ranks**-0.7
        country_p /= country_p.sum()
        for pid in range(1, n + 1):
            country = COUNTRIES[int(self.rng.choice(len(COUNTRIES), p=country_p))]
            first = country.first_names[int(self.rng.integers(len(country.first_names)))]
            last = country.last_names[int(self.rng.integers(len(country.last_names)))]
            university = None
            unis = UNIVERSITIES_BY_COUNTRY.get(country.id, ())
            if unis and self.rng.random() < 0.55:
                university = unis[int(self.rng.integers(len(unis)))].id
            tag_count = min(5, 1 + int(self.rng.poisson(1.5)))
            tag_ranks = np.arange(1, len(TAGS) + 1, dtype=float) ** -0.6
            tag_p = tag_ranks / tag_ranks.sum()
            picks = self.rng.choice(len(TAGS), size=tag_count, replace=False, p=tag_p)
            tags = frozenset(TAGS[int(i)].id for i in picks)

            creation = self._instant(self.start, self.start + int(window * 0.85))
            deletion: float = _INF
            if self.rng.random() < self.cfg.person_deletion_rate:
                lifetime = max(4 * self.t_safe, int(self.rng.exponential(window * 0.5)))
                d = creation + lifetime
                if d < self.end:
                    deletion = float(d)
            self._person_del[pid] = deletion
            self._friends[pid] = []
            self.graph.persons[pid] = Person(
                id=pid, first_name=first, last_name=last, country_id=country.id,
                university_id=university, tag_interests=tags,
                lifecycle=self._lifecycle(creation, deletion))

    def _sample_knows(self) -> None:
        """Power-law friendship degrees realized by stub matching.

        Each person draws a target degree; a shuffled global stub list is
        consumed in order so heavy nodes fill proportionally to their
        remaining demand instead of being starved by iteration order.  With
        probability homophily_weight a stub looks for a partner among
        university, country, or shared-tag peers before falling back to a
        uniform stub.
        """
        persons = self.graph.persons
        n = len(persons)
        if n < 2:
            return
        ids = sorted(persons)
        cap = min(n - 1, MAX_TARGET_DEGREE)
        targets = np.minimum(self.rng.zipf(self.cfg.degree_exponent, size=n), cap)
        remaining = {pid: int(t) for pid, t in zip(ids, targets)}

        by_university: dict[int, list[int]] = {}
        by_country: dict[int, list[int]] = {}
        by_tag: dict[int, list[int]] = {}
        for pid in ids:
            p = persons[pid]
            if p.university_id is not None:
                by_university.setdefault(p.university_id, []).append(pid)
            by_country.setdefault(p.country_id, []).append(pid)
            for t in sorted(p.tag_interests):
                by_tag.setdefault(t, []).append(pid)

        stubs = np.repeat(np.array(ids, dtype=np.int64), targets)
        self.rng.shuffle(stubs)
        pair_keys: set[tuple[int, int]] = set()

        def eligible(me: int, cand: int) -> bool:
            return (cand != me and remaining.get(cand, 0) > 0
                    and (min(me, cand), max(me, cand)) not in pair_keys)

        def pick_from(pool: list[int], me: int, tries: int) -> int | None:
            for _ in range(tries):
                cand = pool[int(self.rng.integers(len(pool)))]
                if eligible(me, cand):
                    return cand
            return None

        for me in stubs:
            me = int(me)
            if remaining[me] <= 0:
                continue
            person = persons[me]
            partner = None
            if self.rng.random() < self.cfg.homophily_weight:
                pools = []
                if person.university_id is not None:
                    pools.append(by_university.get(person.university_id, []))
                pools.append(by_country.get(person.country_id, []))
                for t in sorted(person.tag_interests):
                    pools.append(by_tag.get(t, []))
                for pool in pools:
                    if len(pool) > 1:
                        partner = pick_from(pool, me, tries=8)
                        if partner is not None:
                            break
            if partner is None:
                for _ in range(15):
                    cand = int(stubs[int(self.rng.integers(len(stubs)))])
                    if eligible(me, cand):
                        partner = cand
                        break
            if partner is None:
                continue

            other = persons[partner]
            win = self._window(
                [person.lifecycle.creation, other.lifecycle.creation],
                [self._person_del[me], self._person_del[partner]])
            if win is None:
                # No instant satisfies the safety margins for this pair;
                # burn the stubs so the loop terminates.
                remaining[me] -= 1
                remaining[partner] -= 1
                continue
            creation = self._lagged_instant(*win, "knows")
            bound = min(self._person_del[me], self._person_del[partner])
            own = self._own_deletion("knows", creation, bound)
            deletion = self._resolve(own, [bound])
            edge = KnowsEdge.make(me, partner, self._lifecycle(creation, deletion))
            pair_keys.add(edge.pair)
            remaining[me] -= 1
            remaining[partner] -= 1
            self.graph.knows[edge.pair] = edge
            self._friends[me].append(partner)
            self._friends[partner].append(me)

    def _sample_forums(self) -> None:
        persons = self.graph.persons
        if not persons:
            return
        count = max(1, round(FORUMS_PER_PERSON * len(persons)))
        ids = sorted(persons)
        for _ in range(count):
            moderator = ids[int(self.rng.integers(len(ids)))]
            mod = persons[moderator]
            mod_bound = self._person_del[moderator] if self.cfg.delete_forums_of_deleted_moderator else _INF
            win = self._window([mod.lifecycle.creation], [mod_bound])
            if win is None:
                continue
            creation = self._lagged_instant(*win, "forum")
            own = self._own_deletion("forum", creation, mod_bound)
            deletion = self._resolve(own, [mod_bound])
            fid = self._next_forum_id
            self._next_forum_id += 1
            self._forum_del[fid] = deletion
            self._forum_members[fid] = []
            self.graph.forums[fid] = Forum(fid, moderator, self._lifecycle(creation, deletion))

    def _join(self, fid: int, pid: int) -> bool:
        """Try to add a membership edge; returns True when it was created."""
        if (fid, pid) in self.graph.members:
            return True
        forum = self.graph.forums[fid]
        person = self.graph.persons[pid]
        win = self._window(
            [forum.lifecycle.creation, person.lifecycle.creation],
            [self._forum_del[fid], self._person_del[pid]])
        if win is None:
            return False
        creation = self._lagged_instant(*win, "member")
        bound = min(self._forum_del[fid], self._person_del[pid])
        own = self._own_deletion("member", creation, bound)
        deletion = self._resolve(own, [bound])
        self.graph.members[(fid, pid)] = HasMemberEdge(fid, pid, self._lifecycle(creation, deletion))
        self._forum_members[fid].append(pid)
        return True

    def _sample_members(self) -> None:
        persons = self.graph.persons
        ids = sorted(persons)
        by_country: dict[int, list[int]] = {}
        for pid in ids:
            by_country.setdefault(persons[pid].country_id, []).append(pid)
        for fid in sorted(self.graph.forums):
            forum = self.graph.forums[fid]
            self._join(fid, forum.moderator_person_id)
            mod_country = persons[forum.moderator_person_id].country_id
            n = 1 + int(self.rng.poisson(MEAN_MEMBERS_PER_FORUM * self.scale))
            for _ in range(n):
                if self.rng.random() < 0.5:
                    pool = by_country[mod_country]
                else:
                    pool = ids
                pid = pool[int(self.rng.integers(len(pool)))]
                self._join(fid, pid)

    def _new_message_id(self) -> int:
        mid = self._next_message_id
        self._next_message_id += 1
        return mid

    def _message_country(self, author: Person) -> int:
        # Mostly the author's home country; sometimes written while abroad.
        if self.rng.random() < 0.75:
            return author.country_id
        return COUNTRIES[int(self.rng.integers(len(COUNTRIES)))].id

    def _message_tags(self, author: Person, extra: int | None = None) -> frozenset[int]:
        interests = sorted(author.tag_interests)
        k = min(len(interests), int(self.rng.integers(0, 3)))
        picks = set(int(interests[i]) for i in self.rng.choice(len(interests), size=k, replace=False)) if k else set()
        if extra is not None:
            picks.add(extra)
        return frozenset(picks)

    def _create_post(self, fid: int, author_id: int, window: tuple[int, int],
                     tag: int | None = None) -> Message | None:
        author = self.graph.persons[author_id]
        creation = self._lagged_instant(*window, "post")
        bound = min(self._forum_del[fid], self._person_del[author_id])
        own = self._own_deletion("post", creation, bound)
        deletion = self._resolve(own, [bound])
        mid = self._new_message_id()
        msg = Message(
            id=mid, kind=POST, creator_person_id=author_id, container_forum_id=fid,
            reply_to_message_id=None, country_id=self._message_country(author),
            creation_tag_ids=self._message_tags(author, tag),
            lifecycle=self._lifecycle(creation, deletion), root_post_id=mid)
        self.graph.messages[mid] = msg
        self._message_del[mid] = deletion
        return msg

    def _create_comment(self, parent: Message, author_id: int,
                        window: tuple[int, int], tag: int | None = None) -> Message | None:
        author = self.graph.persons[author_id]
        creation = self._lagged_instant(*window, "comment")
        bound = min(self._message_del[parent.id], self._person_del[author_id])
        own = self._own_deletion("comment", creation, bound)
        deletion = self._resolve(own, [bound])
        mid = self._new_message_id()
        msg = Message(
            id=mid, kind=COMMENT, creator_person_id=author_id, container_forum_id=None,
            reply_to_message_id=parent.id, country_id=self._message_country(author),
            creation_tag_ids=self._message_tags(author, tag),
            lifecycle=self._lifecycle(creation, deletion), root_post_id=parent.root_post_id)
        self.graph.messages[mid] = msg
        self._message_del[mid] = deletion
        return msg

    def _comment_window(self, parent: Message, author_id: int) -> tuple[int, int] | None:
        author = self.graph.persons[author_id]
        return self._window(
            [parent.lifecycle.creation, author.lifecycle.creation],
            [self._message_del[parent.id], self._person_del[author_id]])

    def _sample_threads(self) -> None:
        for fid in sorted(self.graph.forums):
            members = self._forum_members[fid]
            if not members:
                continue
            forum = self.graph.forums[fid]
            n_posts = int(self.rng.poisson(MEAN_POSTS_PER_FORUM * self.scale))
            for _ in range(n_posts):
                author_id = members[int(self.rng.integers(len(members)))]
                author = self.graph.persons[author_id]
                win = self._window(
                    [forum.lifecycle.creation, author.lifecycle.creation],
                    [self._forum_del[fid], self._person_del[author_id]])
                if win is None:
                    continue
                post = self._create_post(fid, author_id, win)
                if post is None:
                    continue
                thread: list[Message] = [post]
                n_comments = int(self.rng.poisson(MEAN_COMMENTS_PER_POST * self.scale))
                for _ in range(n_comments):
                    parent = thread[int(self.rng.integers(len(thread)))]
                    commenter_pool = members + self._friends.get(parent.creator_person_id, [])
                    author_id = commenter_pool[int(self.rng.integers(len(commenter_pool)))]
                    cwin = self._comment_window(parent, author_id)
                    if cwin is None:
                        continue
                    comment = self._create_comment(parent, author_id, cwin)
                    if comment is not None:
                        thread.append(comment)

    def _sample_likes(self) -> None:
        for mid in sorted(self.graph.messages):
            msg = self.graph.messages[mid]
            n = int(self.rng.poisson(MEAN_LIKES_PER_MESSAGE * self.scale))
            if n == 0:
                continue
            root = self.graph.messages[msg.root_post_id]
            pool = list(self._forum_members.get(root.container_forum_id, []))
            pool += self._friends.get(msg.creator_person_id, [])
            pool = [p for p in pool if p != msg.creator_person_id]
            if not pool:
                continue
            for _ in range(n):
                pid = pool[int(self.rng.integers(len(pool)))]
                if (pid, mid) in self.graph.likes:
                    continue
                person = self.graph.persons[pid]
                win = self._window(
                    [msg.lifecycle.creation, person.lifecycle.creation],
                    [self._message_del[mid], self._person_del[pid]])
                if win is None:
                    continue
                creation = self._lagged_instant(*win, "like")
                bound = min(self._message_del[mid], self._person_del[pid])
                own = self._own_deletion("like", creation, bound)
                deletion = self._resolve(own, [bound])
                self.graph.likes[(pid, mid)] = LikesEdge(pid, mid, self._lifecycle(creation, deletion))

    def _sample_flashmobs(self) -> None:
        """Short bursts of themed activity that spike the hourly message rate."""
        if not self.graph.forums or self.cfg.flashmob_count == 0:
            return
        window = self.end - self.start
        forum_ids = sorted(self.graph.forums)
        for _ in range(self.cfg.flashmob_count):
            center = self._instant(self.start + int(window * 0.1), self.end - int(window * 0.1))
            tag = TAGS[int(self.rng.integers(len(TAGS)))].id
            forum = None
            for _ in range(30):
                fid = forum_ids[int(self.rng.integers(len(forum_ids)))]
                f = self.graph.forums[fid]
                lo = center - 2 * MS_PER_HOUR
                hi = center + 2 * MS_PER_HOUR
                if f.lifecycle.alive_throughout(lo, hi) and len(self._forum_members[fid]) >= 2:
                    forum = f
                    break
            if forum is None:
                continue
            members = self._forum_members[forum.id]
            size = 15 + int(self.rng.poisson(20 * self.scale))
            burst: list[Message] = []
            for i in range(size):
                at = int(self.rng.normal(center, 35 * MS_PER_MINUTE))
                author_id = members[int(self.rng.integers(len(members)))]
                author = self.graph.persons[author_id]
                if burst and self.rng.random() < 0.6:
                    parent = burst[int(self.rng.integers(len(burst)))]
                    win = self._comment_window(parent, author_id)
                    if win is None:
                        continue
                    lo, hi = win
                    instant = min(max(at, lo), hi)
                    msg = self._create_comment(parent, author_id, (instant, instant), tag)
                else:
                    win = self._window(
                        [forum.lifecycle.creation, author.lifecycle.creation],
                        [self._forum_del[forum.id], self._person_del[author_id]])
                    if win is None:
                        continue
                    lo, hi = win
                    instant = min(max(at, lo), hi)
                    msg = self._create_post(forum.id, author_id, (instant, instant), tag)
                if msg is not None:
                    burst.append(msg)
