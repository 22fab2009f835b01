"""Message-passing simulation of secure cluster formation.

Formation runs in four synchronous rounds over the proximity graph:

1. every ordinary sensor local-broadcasts a join request under its
   individual key;
2. every dominator that heard a request from a sensor on its access list
   broadcasts a join approval under the group key;
3. sensors left without an approval flood an error report toward the base
   station (relayed blindly, with duplicate suppression), while dominators
   adjacent to such sensors file their own reports;
4. the base station matches the reports and either assigns an adopter
   dominator, promotes the sensor to a one-node group (GDos), or gives up
   on nodes with no radio path at all.

After formation the network is live: nodes can join (group key rotates,
delivered to the newcomer under its individual key and to the old members
under the previous group key) or leave (group key rotates, delivered to
each remaining member under its individual key so the leaver learns
nothing).  An adversary can be injected to measure what the key discipline
actually leaks.

Everything is deterministic: ties break toward smaller node ids, rounds
are processed in sorted order, and key material comes from the plan's
seeded factory.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .keying import (
    DecryptError,
    DeploymentPlan,
    Key,
    decrypt,
    encrypt,
)
from .udg import UnitDiskGraph, Point, from_positions

BS_ID = -1  # the base station is a logical entity, not a graph node


class Kind(Enum):
    JOIN_REQ = "JOIN_REQ"
    JOIN_APRV = "JOIN_APRV"
    GD_ERR = "GD_ERR"
    ORP_ERR = "ORP_ERR"
    REKEY_TO_NEW = "REKEY_TO_NEW"
    REKEY_BCAST = "REKEY_BCAST"
    LEAVE = "LEAVE"


class Rank(Enum):
    GD = "GD"
    OS = "Os"
    GDOS = "GDos"
    BS = "BS"


class PlacementMode(Enum):
    UNIFORM = "UNIFORM"
    CLUSTERED = "CLUSTERED"


@dataclass(frozen=True)
class Placement:
    """How the sensors were dropped onto the field.

    For CLUSTERED, `rho` is the landing dispersion in meters; None means
    "one transmission range", resolved against the graph radius at
    deployment time.
    """

    mode: PlacementMode
    rho: Optional[float] = None

    @classmethod
    def uniform(cls) -> "Placement":
        return cls(PlacementMode.UNIFORM)

    @classmethod
    def clustered(cls, rho: Optional[float] = None) -> "Placement":
        if rho is not None and rho <= 0:
            raise ValueError("rho must be > 0")
        return cls(PlacementMode.CLUSTERED, rho)

    def describe(self) -> str:
        if self.mode is PlacementMode.CLUSTERED:
            rho = "radius" if self.rho is None else f"{self.rho:g}"
            return f"CLUSTERED(rho={rho})"
        return "UNIFORM"


@dataclass(frozen=True)
class Envelope:
    """One encrypted transmission.

    A receiver can open the payload iff it holds the key whose fingerprint
    is `key_fingerprint`; with any other key, authenticated decryption
    fails detectably.
    """

    sender: int
    kind: Kind
    key_fingerprint: str
    payload: bytes


@dataclass(frozen=True)
class TraceEvent:
    round: int
    envelope: Envelope
    receivers: tuple[int, ...]
    group_id: Optional[int]  # group context of the encrypting key
    transmitter: int = BS_ID  # who put it on the air (relays differ from sender)


@dataclass(frozen=True)
class OrphanEvent:
    node: int
    resolution: str  # ADOPTED | PROMOTED | UNREACHABLE
    adopter: Optional[int] = None

    def describe(self) -> str:
        if self.resolution == "ADOPTED":
            return f"ADOPTED({self.adopter})"
        return self.resolution


@dataclass(frozen=True)
class RekeyEvent:
    group_id: int
    old_key_id: str
    new_key_id: str
    cause: str  # join | leave
    round: int = 0  # trace round of the rekey transaction


@dataclass
class ClusterMap:
    """Outcome of cluster formation plus the membership-change history."""

    ranks: dict[int, Rank]
    dominator_of: dict[int, int]  # absent for UNREACHABLE nodes
    mediators: dict[int, frozenset[int]]  # node -> foreign dominators bridged
    orphan_events: list[OrphanEvent]
    rekey_log: list[RekeyEvent]
    placement: str

    def dominator_set(self) -> frozenset[int]:
        return frozenset(v for v, r in self.ranks.items()
                         if r in (Rank.GD, Rank.GDOS))

    def unreachable(self) -> frozenset[int]:
        return frozenset(e.node for e in self.orphan_events
                         if e.resolution == "UNREACHABLE")

    def active_nodes(self) -> frozenset[int]:
        return frozenset(self.ranks) - self.unreachable()


def dominator_set(cm: ClusterMap) -> frozenset[int]:
    """All nodes holding dominator rank (planned GDs plus promoted GDos)."""
    return cm.dominator_set()


@dataclass(frozen=True)
class AdversaryProfile:
    """What the attacker starts with: nothing, one sensor, or one dominator."""

    mode: str  # OUTSIDER | COMPROMISED_OS | COMPROMISED_GD
    node: Optional[int] = None
    group: Optional[int] = None
    held_keys: frozenset[str] = frozenset()

    @classmethod
    def outsider(cls) -> "AdversaryProfile":
        return cls(mode="OUTSIDER")

    @classmethod
    def compromised_os(cls, state: "NetworkState", node: int) -> "AdversaryProfile":
        ring = state.rings.get(node)
        if ring is None or state.cluster_map.ranks.get(node) is not Rank.OS:
            raise ValueError(f"node {node} is not an ordinary sensor")
        return cls(mode="COMPROMISED_OS", node=node,
                   group=state.group_of_node(node),
                   held_keys=frozenset(ring))

    @classmethod
    def compromised_gd(cls, state: "NetworkState", group: int) -> "AdversaryProfile":
        gd = state.group_dominator[group]
        return cls(mode="COMPROMISED_GD", node=gd, group=group,
                   held_keys=frozenset(state.rings[gd]))


@dataclass(frozen=True)
class AttackAttempt:
    claimed_id: int
    target_group: int
    admitted: bool


@dataclass
class AttackReport:
    profile_mode: str
    attempts: list[AttackAttempt]
    # one (kind, group, key fingerprint) entry per trace envelope the
    # adversary could open
    decrypted: list[tuple[str, Optional[int], str]]

    @property
    def admissions(self) -> int:
        return sum(1 for a in self.attempts if a.admitted)

    @property
    def decryption_count(self) -> int:
        return len(self.decrypted)


def _key_payload(key: Key, note: str) -> bytes:
    return b"KEY|" + key.key_id.encode() + b"|" + key.secret.hex().encode() + b"|" + note.encode()


def _parse_key_payload(plaintext: bytes) -> Optional[Key]:
    if not plaintext.startswith(b"KEY|"):
        return None
    _, kid, secret_hex, _note = plaintext.split(b"|", 3)
    secret = bytes.fromhex(secret_hex.decode())
    return Key(key_id=kid.decode(), bits=len(secret) * 8, secret=secret)


class NetworkState:
    """Live network: key rings, group membership, and the message trace."""

    def __init__(self, graph: UnitDiskGraph, plan: DeploymentPlan,
                 placement: Placement, seed: int,
                 deployed: Optional[Iterable[int]] = None):
        if plan.n != graph.n:
            raise ValueError(
                f"plan covers {plan.n} nodes but graph has {graph.n}")
        self.graph = graph
        self.plan = plan
        self.placement = placement
        self.seed = seed
        self.rng = random.Random(seed)
        self.deployed: set[int] = (set(range(graph.n)) if deployed is None
                                   else set(deployed))
        for v in self.deployed:
            if not 0 <= v < graph.n:
                raise ValueError(f"deployed node {v} not in graph")
        self.left: set[int] = set()

        # key rings: node -> {fingerprint: Key}; mutated only through _grant
        self.rings: dict[int, dict[str, Key]] = {}
        self.grant_log: list[tuple[int, str, str]] = []  # (node, key_id, cause)

        # current (post-formation) group structure; access lists stay in plan
        self.group_dominator: dict[int, int] = {}
        self._gid_of_dominator: dict[int, int] = {}
        self.group_members: dict[int, set[int]] = {}
        self.group_key: dict[int, Key] = {}
        self.revoked_groups: set[int] = set()
        self.revoked_key_ids: set[str] = set()
        self._rekey_counter: dict[int, int] = {}
        self._next_group_id = len(plan.groups)

        self.trace: list[TraceEvent] = []
        self.audit_log: list[str] = []
        self._round = 0
        self._nonce_counter = 0

        self.cluster_map = ClusterMap(
            ranks={}, dominator_of={}, mediators={},
            orphan_events=[], rekey_log=[], placement=placement.describe(),
        )

        self._predistribute()

    # -- key plumbing ------------------------------------------------------

    def _grant(self, node: int, key: Key, cause: str) -> None:
        ring = self.rings.setdefault(node, {})
        if key.key_id not in ring:
            ring[key.key_id] = key
            self.grant_log.append((node, key.key_id, cause))

    def _nonce(self) -> bytes:
        self._nonce_counter += 1
        return self._nonce_counter.to_bytes(8, "big")

    def _predistribute(self) -> None:
        # Offline phase: every node in the plan gets its keys, deployed or not.
        for g in self.plan.groups:
            self._grant(g.dominator, g.group_key, "plan")
            for m in g.members:
                self._grant(m, g.individual_keys[m], "plan")
                self._grant(m, g.group_key, "plan")
                self._grant(g.dominator, g.individual_keys[m], "plan")
            self.group_dominator[g.group_id] = g.dominator
            self._gid_of_dominator[g.dominator] = g.group_id
            self.group_members[g.group_id] = set()
            self.group_key[g.group_id] = g.group_key
            self._rekey_counter[g.group_id] = 0

    def _send(self, kind: Kind, sender: int, key: Key, plaintext: bytes,
              receivers: Iterable[int], group_id: Optional[int]) -> Envelope:
        env = Envelope(
            sender=sender, kind=kind, key_fingerprint=key.key_id,
            payload=encrypt(key, self._nonce(), plaintext),
        )
        self.trace.append(TraceEvent(
            round=self._round, envelope=env,
            receivers=tuple(sorted(receivers)), group_id=group_id,
            transmitter=sender,
        ))
        return env

    def can_decrypt(self, node: int, env: Envelope) -> bool:
        key = self.rings.get(node, {}).get(env.key_fingerprint)
        if key is None:
            return False
        try:
            decrypt(key, env.payload)
            return True
        except DecryptError:
            return False

    def group_of_node(self, node: int) -> Optional[int]:
        """Group the node currently belongs to (dominators map to their own)."""
        dom = self.cluster_map.dominator_of.get(node)
        if dom is None:
            return None
        return self._gid_of_dominator.get(dom)

    def current_group_key(self, group_id: int) -> Key:
        return self.group_key[group_id]

    def individual_key(self, node: int) -> Optional[Key]:
        for g in self.plan.groups:
            if node in g.individual_keys:
                return g.individual_keys[node]
        return None

    def _deployed_neighbors(self, node: int) -> list[int]:
        return sorted(self.graph.neighbors(node) & self.deployed)

    # -- formation ---------------------------------------------------------

    def form(self) -> ClusterMap:
        cm = self.cluster_map
        plan = self.plan

        deployed_gds = {g.dominator: g for g in plan.groups
                        if g.dominator in self.deployed}
        for gd, grec in deployed_gds.items():
            cm.ranks[gd] = Rank.GD
            cm.dominator_of[gd] = gd

        # round 1: join requests
        self._round = 1
        approvals: dict[int, list[int]] = {gid: [] for gid in self.group_dominator}
        for s in sorted(self.deployed):
            if s in deployed_gds:
                continue
            cm.ranks[s] = Rank.OS
            ind = self.individual_key(s)
            self._send(Kind.JOIN_REQ, s, ind, f"JOIN_REQ|{s}".encode(),
                       self._deployed_neighbors(s), plan.group_of(s).group_id)
            for nb in self._deployed_neighbors(s):
                grec = deployed_gds.get(nb)
                if grec is not None and s in grec.individual_keys:
                    approvals[grec.group_id].append(s)

        # round 2: join approvals under the group key
        self._round = 2
        neighbor_dominators: dict[int, list[int]] = {}
        for gid in sorted(approvals):
            approved = approvals[gid]
            if not approved:
                continue
            gd = self.group_dominator[gid]
            plaintext = ("JOIN_APRV|" + ",".join(str(v) for v in sorted(approved))).encode()
            self._send(Kind.JOIN_APRV, gd, self.group_key[gid], plaintext,
                       self._deployed_neighbors(gd), gid)
            for s in sorted(approved):
                cm.dominator_of[s] = gd
                self.group_members[gid].add(s)
            for nb in self._deployed_neighbors(gd):
                # an Os that hears an approval it cannot open has found a
                # foreign dominator in range
                if (cm.ranks.get(nb) is Rank.OS
                        and self.group_key[gid].key_id not in self.rings.get(nb, {})):
                    neighbor_dominators.setdefault(nb, []).append(gd)

        # round 3: orphan error floods and dominator reports
        self._round = 3
        orphans = sorted(s for s in self.deployed
                         if cm.ranks.get(s) is Rank.OS and s not in cm.dominator_of)
        bs_orphan_reports: dict[int, list[int]] = {}
        bs_gd_reports: dict[int, list[int]] = {}
        for s in orphans:
            ind = self.individual_key(s)
            seen_gds = sorted(neighbor_dominators.get(s, []))
            plaintext = ("GD_ERR|" + str(s) + "|"
                         + ",".join(str(g) for g in seen_gds)).encode()
            self._flood(Kind.GD_ERR, s, ind, plaintext,
                        plan.group_of(s).group_id)
            if self._deployed_neighbors(s):
                bs_orphan_reports[s] = seen_gds
            for nb in self._deployed_neighbors(s):
                grec = deployed_gds.get(nb)
                if grec is not None:
                    self._send(Kind.ORP_ERR, nb, self.group_key[grec.group_id],
                               f"ORP_ERR|{s}".encode(), [BS_ID], grec.group_id)
                    bs_gd_reports.setdefault(s, []).append(nb)

        # round 4: base-station verdicts
        self._round = 4
        for s in orphans:
            candidates = sorted(set(bs_gd_reports.get(s, []))) if s in bs_orphan_reports else []
            if candidates:
                gid_of = {self.group_dominator[g]: g for g in self.group_dominator}
                adopter = min(candidates,
                              key=lambda g: (len(self.group_members[gid_of[g]]), g))
                gid = gid_of[adopter]
                ind = self.individual_key(s)
                # The adopter command names the orphan but never carries its
                # individual key: raw key material inside group-keyed traffic
                # would be readable by every group member.  The key itself is
                # provisioned over the protected BS channel (bookkeeping).
                self._send(Kind.REKEY_TO_NEW, BS_ID, self.group_key[gid],
                           f"ADOPT|{s}".encode(), [adopter], gid)
                self._grant(adopter, ind, "adoption")
                self._send(Kind.REKEY_TO_NEW, BS_ID, ind,
                           _key_payload(self.group_key[gid], f"group:{gid}"),
                           [s], gid)
                self._grant(s, self.group_key[gid], "adoption")
                cm.dominator_of[s] = adopter
                self.group_members[gid].add(s)
                cm.orphan_events.append(OrphanEvent(s, "ADOPTED", adopter))
            elif self._deployed_neighbors(s):
                gid = self._next_group_id
                self._next_group_id += 1
                new_key = self.plan.factory.derive(f"group:{gid}")
                self.plan.vault.record_group(gid, new_key)
                self.group_dominator[gid] = s
                self._gid_of_dominator[s] = gid
                self.group_members[gid] = set()
                self.group_key[gid] = new_key
                self._rekey_counter[gid] = 0
                ind = self.individual_key(s)
                self._send(Kind.REKEY_TO_NEW, BS_ID, ind,
                           _key_payload(new_key, f"group:{gid}"), [s], gid)
                self._grant(s, new_key, "promotion")
                cm.ranks[s] = Rank.GDOS
                cm.dominator_of[s] = s
                cm.orphan_events.append(OrphanEvent(s, "PROMOTED"))
            else:
                cm.orphan_events.append(OrphanEvent(s, "UNREACHABLE"))

        self._record_mediators()
        return cm

    def _flood(self, kind: Kind, origin: int, key: Key, plaintext: bytes,
               group_id: Optional[int]) -> None:
        # BFS flood with duplicate suppression; relayers rebroadcast the
        # envelope unopened.  Every local broadcast lands in the trace.
        env_receivers = self._deployed_neighbors(origin)
        self._send(kind, origin, key, plaintext, env_receivers, group_id)
        env = self.trace[-1].envelope
        reached = {origin}
        queue = list(env_receivers)
        for r in queue:
            reached.add(r)
        idx = 0
        while idx < len(queue):
            relay = queue[idx]
            idx += 1
            nbrs = self._deployed_neighbors(relay)
            self.trace.append(TraceEvent(
                round=self._round, envelope=env,
                receivers=tuple(nbrs), group_id=group_id,
                transmitter=relay,
            ))
            for nb in nbrs:
                if nb not in reached:
                    reached.add(nb)
                    queue.append(nb)

    def _record_mediators(self) -> None:
        # A mediator is a dominated node that additionally hears at least one
        # foreign dominator.  Ground-truth adjacency is equivalent to the
        # overheard-request bookkeeping for planned GDs and extends it to
        # nodes promoted during adjudication.
        cm = self.cluster_map
        doms = cm.dominator_set()
        for s in sorted(cm.ranks):
            if cm.ranks[s] is not Rank.OS or s not in cm.dominator_of:
                continue
            own = cm.dominator_of[s]
            foreign = frozenset(d for d in self.graph.neighbors(s) & doms
                                if d != own)
            if foreign:
                cm.mediators[s] = foreign

    # -- membership dynamics -----------------------------------------------

    def _audit(self, message: str) -> None:
        self.audit_log.append(message)

    def _gid_valid(self, group_id: int) -> bool:
        return (group_id in self.group_dominator
                and group_id not in self.revoked_groups
                and self.group_dominator[group_id] in self.deployed)

    def join_node(self, new_node: int, target_group: int) -> bool:
        """Deploy a pre-provisioned node into a group.  True iff admitted."""
        self._round += 1
        cm = self.cluster_map
        if not self._gid_valid(target_group):
            self._audit(f"join denied: group {target_group} not operational")
            return False
        gd = self.group_dominator[target_group]
        if new_node in self.deployed:
            self._audit(f"join denied: node {new_node} already deployed")
            return False
        ind = self.individual_key(new_node)
        if ind is None:
            # unknown id or a node provisioned as a dominator; nothing to verify
            self._audit(f"join denied: node {new_node} has no individual key")
            return False
        if new_node not in self.graph.neighbors(gd):
            self._audit(f"join denied: node {new_node} out of range of GD {gd}")
            return False

        self.deployed.add(new_node)
        self.left.discard(new_node)
        self._send(Kind.JOIN_REQ, new_node, ind,
                   f"JOIN_REQ|{new_node}".encode(),
                   self._deployed_neighbors(new_node), target_group)

        on_access_list = new_node in self.plan.groups[target_group].individual_keys
        if not on_access_list:
            # GD escalates the unknown id; BS confirms legitimacy and supplies
            # the individual key (rejecting revoked material).  The over-the-air
            # confirmation only names the node; the key itself moves over the
            # protected BS channel, never inside group-keyed traffic.
            self._send(Kind.ORP_ERR, gd, self.group_key[target_group],
                       f"ORP_ERR|{new_node}".encode(), [BS_ID], target_group)
            if ind.key_id in self.revoked_key_ids or not self.plan.vault.holds(ind.key_id):
                self.deployed.discard(new_node)
                self._audit(f"join denied: BS rejected node {new_node}")
                return False
            self._send(Kind.REKEY_TO_NEW, BS_ID, self.group_key[target_group],
                       f"CONFIRM|{new_node}".encode(), [gd], target_group)
            self._grant(gd, ind, "bs-supply")
        elif ind.key_id in self.revoked_key_ids:
            self.deployed.discard(new_node)
            self._audit(f"join denied: node {new_node} key revoked")
            return False

        old_key = self.group_key[target_group]
        new_key = self._mint_group_key(target_group)
        self._send(Kind.REKEY_TO_NEW, gd, ind,
                   _key_payload(new_key, f"group:{target_group}"),
                   [new_node], target_group)
        self._grant(new_node, new_key, "join-rekey")
        members = sorted(self.group_members[target_group])
        self._send(Kind.REKEY_BCAST, gd, old_key,
                   _key_payload(new_key, f"group:{target_group}"),
                   members, target_group)
        for m in members:
            self._grant(m, new_key, "join-rekey")
        self._grant(gd, new_key, "join-rekey")

        self.group_members[target_group].add(new_node)
        cm.ranks[new_node] = Rank.OS
        cm.dominator_of[new_node] = gd
        cm.rekey_log.append(RekeyEvent(target_group, old_key.key_id,
                                       new_key.key_id, "join", self._round))
        return True

    def leave_node(self, node: int) -> bool:
        """Withdraw a member from its group.  True iff a rekey happened."""
        self._round += 1
        cm = self.cluster_map
        rank = cm.ranks.get(node)
        if rank in (Rank.GD, Rank.GDOS):
            self._audit(f"leave denied: node {node} is a dominator")
            return False
        gid = self.group_of_node(node)
        if node not in self.deployed or gid is None:
            self._audit(f"leave ignored: node {node} is not a group member")
            return False
        if gid in self.revoked_groups:
            self._audit(f"leave ignored: group {gid} revoked")
            return False
        gd = self.group_dominator[gid]

        ind = self.individual_key(node)
        self._send(Kind.LEAVE, node, ind, f"LEAVE|{node}".encode(),
                   [gd], gid)

        self.group_members[gid].discard(node)
        del cm.dominator_of[node]
        self.deployed.discard(node)
        self.left.add(node)

        old_key = self.group_key[gid]
        new_key = self._mint_group_key(gid)
        for m in sorted(self.group_members[gid]):
            self._send(Kind.REKEY_TO_NEW, gd, self.individual_key(m),
                       _key_payload(new_key, f"group:{gid}"), [m], gid)
            self._grant(m, new_key, "leave-rekey")
        self._grant(gd, new_key, "leave-rekey")
        cm.rekey_log.append(RekeyEvent(gid, old_key.key_id,
                                       new_key.key_id, "leave", self._round))
        return True

    def _mint_group_key(self, group_id: int) -> Key:
        self._rekey_counter[group_id] += 1
        new_key = self.plan.factory.derive(
            f"rekey:{group_id}:{self._rekey_counter[group_id]}")
        self.group_key[group_id] = new_key
        self.plan.vault.record_group(group_id, new_key)
        return new_key

    def revoke_group(self, group_id: int) -> None:
        """BS bookkeeping after a dominator compromise: retire the group.

        The group key and every member individual key the dominator held are
        revoked; the group goes silent.  Re-forming the stranded members is a
        dominator-failure protocol and out of scope.
        """
        self._round += 1
        if group_id not in self.group_dominator:
            self._audit(f"revoke ignored: no group {group_id}")
            return
        self.revoked_groups.add(group_id)
        self.revoked_key_ids.add(self.group_key[group_id].key_id)
        gd = self.group_dominator[group_id]
        for fp in self.rings.get(gd, {}):
            self.revoked_key_ids.add(fp)
        for m in sorted(self.group_members[group_id]):
            ind = self.individual_key(m)
            if ind is not None:
                self.revoked_key_ids.add(ind.key_id)
            self.deployed.discard(m)
            self.cluster_map.dominator_of.pop(m, None)
        self.group_members[group_id].clear()
        self.deployed.discard(gd)
        self.cluster_map.dominator_of.pop(gd, None)
        self._audit(f"group {group_id} revoked by BS")

    # -- adversary ---------------------------------------------------------

    def simulate_adversary(self, profile: AdversaryProfile, attempts: int,
                           seed: int) -> AttackReport:
        """Replay the trace through the adversary's keys and try forged joins.

        The adversary observes every envelope sent so far, in order; when it
        can open a rekey message it learns the carried key, so a compromised
        member keeps up with its own group's rotations but nothing else.
        Each forged join claims a random identity the adversary does not
        legitimately control.
        """
        rng = random.Random(seed)
        held: dict[str, Key] = {}
        for fp in profile.held_keys:
            key = self._lookup_key(fp)
            if key is not None:
                held[fp] = key

        decrypted: list[tuple[str, Optional[int], str]] = []
        for ev in self.trace:
            key = held.get(ev.envelope.key_fingerprint)
            if key is None:
                continue
            try:
                plaintext = decrypt(key, ev.envelope.payload)
            except DecryptError:
                continue
            decrypted.append((ev.envelope.kind.value, ev.group_id,
                              ev.envelope.key_fingerprint))
            learned = _parse_key_payload(plaintext)
            if learned is not None:
                held[learned.key_id] = learned

        attempt_log: list[AttackAttempt] = []
        group_ids = sorted(gid for gid in self.group_dominator
                           if self._gid_valid(gid))
        for _ in range(attempts):
            target = rng.choice(group_ids) if group_ids else 0
            claimed = rng.randrange(self.graph.n)
            if profile.node is not None and claimed == profile.node:
                claimed = (claimed + 1) % self.graph.n
            admitted = self._forged_join_admitted(claimed, target, held, rng)
            attempt_log.append(AttackAttempt(claimed, target, admitted))
        return AttackReport(profile_mode=profile.mode,
                            attempts=attempt_log, decrypted=decrypted)

    def _lookup_key(self, key_id: str) -> Optional[Key]:
        for g in self.plan.groups:
            for k in g.individual_keys.values():
                if k.key_id == key_id:
                    return k
        for hist in self.plan.vault.group_key_history.values():
            for k in hist:
                if k.key_id == key_id:
                    return k
        return None

    def _forged_join_admitted(self, claimed: int, target_group: int,
                              held: dict[str, Key], rng: random.Random) -> bool:
        # The forgery spoofs the claimed node's public fingerprint but cannot
        # seal the payload under that key; the dominator's authenticated
        # decryption must therefore fail unless the adversary truly holds it.
        real = self.individual_key(claimed)
        spoofed_fp = real.key_id if real is not None else "0" * 16
        if spoofed_fp in held:
            sealing_key = held[spoofed_fp]  # genuinely compromised identity
        elif held:
            sealing_key = held[sorted(held)[rng.randrange(len(held))]]
        else:
            sealing_key = None
        plaintext = f"JOIN_REQ|{claimed}".encode()
        if sealing_key is not None:
            payload = encrypt(sealing_key, self._nonce(), plaintext)
        else:
            payload = bytes(rng.randrange(256) for _ in range(len(plaintext) + 24))
        env = Envelope(sender=claimed, kind=Kind.JOIN_REQ,
                       key_fingerprint=spoofed_fp, payload=payload)

        # dominator-side validation
        grec = self.plan.groups[target_group] if target_group < len(self.plan.groups) else None
        if grec is None or claimed not in grec.individual_keys:
            return False
        expected = grec.individual_keys[claimed]
        if env.key_fingerprint != expected.key_id:
            return False
        try:
            decrypt(expected, env.payload)
        except DecryptError:
            return False
        return True


# -- deployment ------------------------------------------------------------


def deploy_graph(plan: DeploymentPlan, width: float, height: float,
                 radius: float, placement: Placement, seed: int) -> UnitDiskGraph:
    """Drop the plan's sensors onto the field per the placement model.

    UNIFORM scatters every node i.i.d. over the rectangle.  CLUSTERED lands
    one group at a time: the dominator at a uniformly chosen anchor, its
    members uniform in a disk of radius rho around the anchor, everything
    clamped to the field (clamping only shrinks distances, so members stay
    within rho of their dominator).
    """
    rng = random.Random(seed)
    if placement.mode is PlacementMode.UNIFORM:
        pts = [Point(rng.uniform(0.0, width), rng.uniform(0.0, height))
               for _ in range(plan.n)]
        return from_positions(pts, radius)

    rho = placement.rho if placement.rho is not None else radius
    positions: list[Optional[Point]] = [None] * plan.n
    for g in plan.groups:
        ax = rng.uniform(0.0, width)
        ay = rng.uniform(0.0, height)
        positions[g.dominator] = Point(ax, ay)
        for m in g.members:
            dist = rho * math.sqrt(rng.random())
            theta = rng.uniform(0.0, 2.0 * math.pi)
            x = min(max(ax + dist * math.cos(theta), 0.0), width)
            y = min(max(ay + dist * math.sin(theta), 0.0), height)
            positions[m] = Point(x, y)
    return from_positions([p for p in positions], radius)


def form_network(g: UnitDiskGraph, plan: DeploymentPlan, placement: Placement,
                 seed: int, deployed: Optional[Iterable[int]] = None) -> NetworkState:
    """Run cluster formation and return the live network state."""
    state = NetworkState(g, plan, placement, seed, deployed)
    state.form()
    return state


def run_formation(g: UnitDiskGraph, plan: DeploymentPlan, placement: Placement,
                  seed: int) -> ClusterMap:
    """Run cluster formation and return just the resulting cluster map."""
    return form_network(g, plan, placement, seed).cluster_map


def join_node(state: NetworkState, new_node: int, target_group: int) -> NetworkState:
    state.join_node(new_node, target_group)
    return state


def leave_node(state: NetworkState, node: int) -> NetworkState:
    state.leave_node(node)
    return state


def simulate_adversary(state: NetworkState, profile: AdversaryProfile,
                       attempts: int, seed: int) -> AttackReport:
    return state.simulate_adversary(profile, attempts, seed)


# -- exports ----------------------------------------------------------------


def write_clustermap_csv(cm: ClusterMap, path: Path | str) -> None:
    resolution = {e.node: e.describe() for e in cm.orphan_events}
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["node_id", "rank", "dominator", "is_mediator",
                    "orphan_resolution"])
        for node in sorted(cm.ranks):
            w.writerow([
                node,
                cm.ranks[node].value,
                cm.dominator_of.get(node, -1),
                "true" if node in cm.mediators else "false",
                resolution.get(node, ""),
            ])


def write_trace_csv(events: Iterable[TraceEvent], path: Path | str) -> None:
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["round", "sender", "kind", "key_fingerprint", "receivers"])
        for ev in events:
            w.writerow([
                ev.round,
                ev.transmitter,
                ev.envelope.kind.value,
                ev.envelope.key_fingerprint,
                ";".join(str(r) for r in ev.receivers),
            ])
