"""Discrete-event overlay simulation with push and announcement propagation.

Messages carry a batch (tuple) of transactions and are admitted atomically at
the receiver.  Every directed link is FIFO.  An optional observer node (the
measurement vantage point) is attached to a subset of nodes: it never relays,
it is not part of the ground-truth topology, and deliveries addressed to it
are logged with their arrival time instead of being queued.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from ..mempool import Admission, Mempool, PolicyProfile, Status, Transaction
from .latency import LatencyModel
from .topology import Topology

DELIVER, ANNOUNCE, REQUEST, TIMER = range(4)
KIND_NAMES = ("deliver_tx", "announce", "announce_request", "timer")
ANNOUNCE_WINDOW = 5.0
RETIRED_NONCE = 1 << 62
_ACCEPTED = (Status.ADMITTED, Status.EVICTED, Status.REPLACED)


class UnknownNode(KeyError):
    pass


@dataclass(eq=False)
class SimNode:
    node_id: str
    profile: PolicyProfile
    pool: Mempool
    neighbors: list[str] = field(default_factory=list)
    announce_to: frozenset = frozenset()
    alive: bool = True
    observed: bool = False

    @property
    def announce_fraction(self) -> float:
        return len(self.announce_to) / len(self.neighbors) if self.neighbors else 0.0


def _subseed(*parts) -> int:
    digest = hashlib.blake2b("|".join(map(str, parts)).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


class SimNetwork:
    def __init__(
        self,
        topology: Topology,
        default_profile: PolicyProfile,
        *,
        overrides: Optional[Mapping[str, PolicyProfile]] = None,
        latency: Optional[LatencyModel] = None,
        seed: int = 0,
        announce_fraction: float = 0.0,
        trace: bool = False,
    ):
        if not 0.0 <= announce_fraction <= 1.0:
            raise ValueError("announce_fraction must lie in [0, 1]")
        self.topology = topology
        self.seed = seed
        self.latency = latency if latency is not None else LatencyModel(seed=seed)
        self.now = 0.0
        self.nonces: dict[str, int] = {}
        self.nodes: dict[str, SimNode] = {}
        overrides = overrides or {}
        for nid in topology.nodes:
            prof = overrides.get(nid, default_profile)
            nbrs = sorted(topology.neighbors(nid))
            k = round(announce_fraction * len(nbrs))
            ann = frozenset(random.Random(_subseed(seed, "announce", nid)).sample(nbrs, k)) if k else frozenset()
            self.nodes[nid] = SimNode(nid, prof, Mempool(prof, self.nonces), nbrs, ann)
        self.observer: Optional[str] = None
        self.events_processed = 0
        self._queue: list = []
        self._seq = itertools.count()
        # (a, b) -> [lo, draw or None, hi - lo, last arrival]; keeps each link FIFO
        self._links: dict[tuple[str, str], list] = {}
        self._observed: dict[str, dict[str, list[tuple[float, str]]]] = {}
        self._watch: dict[str, dict[str, float]] = {}
        self._accounts = itertools.count()
        self._windows: dict[tuple[str, str], float] = {}
        self.trace: Optional[list[str]] = [] if trace else None
        self._graveyard: dict[str, SimNode] = {}

    # -- setup -------------------------------------------------------------

    def node(self, node_id: str) -> SimNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def attach_observer(self, observer_id: str = "M", nodes: Optional[Iterable[str]] = None) -> None:
        if observer_id in self.nodes:
            raise ValueError(f"observer id {observer_id!r} collides with a node")
        self.observer = observer_id
        for nid in (self.nodes if nodes is None else nodes):
            self.node(nid).observed = True

    def kill(self, node_id: str) -> None:
        self.node(node_id).alive = False

    def add_node(self, node_id: str, profile: PolicyProfile, neighbors: Iterable[str] = (),
                 observed: bool = True) -> SimNode:
        """Attach a helper node under the operator's control."""
        if node_id in self.nodes or node_id == self.observer:
            raise ValueError(f"node id {node_id!r} already in use")
        for nb in neighbors:
            self.node(nb)
        node = SimNode(node_id, profile, Mempool(profile, self.nonces), sorted(neighbors), observed=observed)
        self.nodes[node_id] = node
        for nb in node.neighbors:
            peer = self.nodes[nb]
            peer.neighbors = sorted(set(peer.neighbors) | {node_id})
        return node

    def remove_node(self, node_id: str) -> None:
        node = self.nodes.pop(node_id)
        for nb in node.neighbors:
            peer = self.nodes[nb]
            peer.neighbors = [x for x in peer.neighbors if x != node_id]
        # queued messages addressed to it are dropped on arrival
        node.alive = False
        self._graveyard[node_id] = node

    # -- sending -----------------------------------------------------------

    def _arrival(self, a: str, b: str) -> float:
        link = self._links.get((a, b))
        if link is None:
            link = self._new_link(a, b)
        # same value as rng.uniform(lo, hi), without the call overhead
        t = self.now + (link[0] if link[1] is None else link[0] + link[2] * link[1]())
        if t < link[3]:
            t = link[3]
        link[3] = t
        return t

    def _new_link(self, a: str, b: str) -> list:
        lat = self.latency
        draw = None if lat.is_fixed else lat.link_rng(a, b).random
        link = self._links[(a, b)] = [lat.lo, draw, lat.hi - lat.lo, 0.0]
        return link

    def send(self, frm: str, to: str, txs: Sequence[Transaction]) -> float:
        """Ship a batch over the frm->to link; returns its arrival time."""
        if frm != self.observer:
            node = self.node(frm)
            if to not in node.neighbors and not (to == self.observer and node.observed):
                raise ValueError(f"no link {frm}-{to}")
        elif not self.node(to).observed:
            raise ValueError(f"observer is not attached to {to}")
        t = self._arrival(frm, to)
        batch = tuple(txs)
        if to == self.observer:
            self._record(t, frm, batch)
        else:
            heapq.heappush(self._queue, (t, next(self._seq), DELIVER, to, frm, batch))
        return t

    def announce(self, frm: str, to: str, tx: Transaction) -> float:
        """Send a hash announcement of ``tx`` over frm->to; returns its arrival time."""
        if to not in self.node(frm).neighbors:
            raise ValueError(f"no link {frm}-{to}")
        t = self._arrival(frm, to)
        heapq.heappush(self._queue, (t, next(self._seq), ANNOUNCE, to, frm, tx))
        return t

    def inject_tx(self, at_node: str, tx: Transaction) -> Admission:
        """Local submission (RPC): admitted now, propagated like any arrival."""
        out: list[Admission] = []
        self._admit(self.node(at_node), (tx,), None, out)
        return out[0]

    def schedule_timer(self, delay: float, tag: str, callback: Optional[Callable[["SimNetwork"], None]] = None) -> None:
        heapq.heappush(self._queue, (self.now + delay, next(self._seq), TIMER, None, tag, callback))

    # -- event handling ---------------------------------------------------

    def _admit(self, node: SimNode, txs: Sequence[Transaction], frm: Optional[str],
               out: Optional[list] = None) -> None:
        pool = node.pool
        held = pool._txs
        forwards = node.profile.forwards_futures
        watch = self._watch
        fwd = []
        for tx in txs:
            if out is None and tx.tx_id in held:
                continue
            res = pool.add(tx)
            if out is not None:
                out.append(res)
            if res.status in _ACCEPTED:
                if watch and tx.tx_id in watch:
                    watch[tx.tx_id].setdefault(node.node_id, self.now)
                if res.pending or forwards:
                    fwd.append(tx)
        if fwd and node.alive:
            self._propagate(node, tuple(fwd), frm)

    def _propagate(self, node: SimNode, txs: tuple, exclude: Optional[str]) -> None:
        nid = node.node_id
        queue, seq, links, now = self._queue, self._seq, self._links, self.now
        push = heapq.heappush
        ann = node.announce_to
        for nb in node.neighbors:
            if nb == exclude:
                continue
            link = links.get((nid, nb))
            if link is None:
                link = self._new_link(nid, nb)
            t = now + (link[0] if link[1] is None else link[0] + link[2] * link[1]())
            if t < link[3]:
                t = link[3]
            link[3] = t
            if ann and nb in ann:
                for i, tx in enumerate(txs):
                    # later announcements on the same link queue behind the first
                    push(queue, (t if i == 0 else self._arrival(nid, nb), next(seq), ANNOUNCE, nb, nid, tx))
            else:
                push(queue, (t, next(seq), DELIVER, nb, nid, txs))
        if node.observed and exclude != self.observer:
            self._record(self._arrival(nid, self.observer), nid, txs)

    def _record(self, t: float, frm: str, txs: tuple) -> None:
        obs = self._observed
        for tx in txs:
            by_id = obs.get(tx.sender)
            if by_id is None:
                by_id = obs[tx.sender] = {}
            seen = by_id.get(tx.tx_id)
            if seen is None:
                by_id[tx.tx_id] = [(t, frm)]
            else:
                seen.append((t, frm))
        if self.trace is not None:
            for tx in txs:
                self.trace.append(f"{t:.6f},deliver_tx,{frm},{self.observer},{tx.tx_id}")

    def step(self) -> Optional[tuple]:
        """Process the next queued event; returns it, or None when idle."""
        if not self._queue:
            return None
        ev = heapq.heappop(self._queue)
        self._dispatch(ev)
        return ev

    def _dispatch(self, ev: tuple) -> None:
        t, _, kind, to, frm, payload = ev
        self.now = t
        self.events_processed += 1
        trace = self.trace
        if kind == DELIVER:
            node = self.nodes.get(to) or self._graveyard[to]
            if trace is not None:
                for tx in payload:
                    trace.append(f"{t:.6f},deliver_tx,{frm},{to},{tx.tx_id}")
            if node.alive:
                self._admit(node, payload, frm)
        elif kind == TIMER:
            if trace is not None:
                trace.append(f"{t:.6f},timer,,,{frm}")
            if payload is not None:
                payload(self)
        elif kind == ANNOUNCE:
            self._on_announce(t, to, frm, payload)
        else:
            node = self.nodes.get(to) or self._graveyard[to]
            if trace is not None:
                trace.append(f"{t:.6f},announce_request,{frm},{to},{payload.tx_id}")
            if node.alive and payload.tx_id in node.pool:
                heapq.heappush(self._queue, (self._arrival(to, frm), next(self._seq), DELIVER, frm, to, (payload,)))

    def _on_announce(self, t: float, to: str, frm: str, tx: Transaction) -> None:
        if self.trace is not None:
            self.trace.append(f"{t:.6f},announce,{frm},{to},{tx.tx_id}")
        node = self.nodes.get(to) or self._graveyard[to]
        if not node.alive or tx.tx_id in node.pool:
            return
        key = (to, tx.tx_id)
        opened = self._windows.get(key)
        if opened is not None and t - opened < ANNOUNCE_WINDOW:
            return
        self._windows[key] = t
        heapq.heappush(self._queue, (self._arrival(to, frm), next(self._seq), REQUEST, frm, to, tx))

    def run_until(self, t: float) -> None:
        if t < self.now:
            raise ValueError(f"cannot run backwards: {t} < {self.now}")
        queue, dispatch, pop = self._queue, self._dispatch, heapq.heappop
        nodes, admit = self.nodes, self._admit
        while queue and queue[0][0] <= t:
            ev = pop(queue)
            # plain deliveries dominate; take them inline when not tracing
            if ev[2] == DELIVER and self.trace is None:
                node = nodes.get(ev[3])
                if node is not None:
                    self.now = ev[0]
                    self.events_processed += 1
                    if node.alive:
                        admit(node, ev[5], ev[4])
                    continue
            dispatch(ev)
        self.now = t

    def run_for(self, dt: float) -> None:
        self.run_until(self.now + dt)

    def run_until_idle(self, max_events: Optional[int] = None) -> None:
        count = 0
        while self._queue:
            self._dispatch(heapq.heappop(self._queue))
            count += 1
            if max_events is not None and count >= max_events:
                raise RuntimeError(f"event budget {max_events} exhausted at t={self.now}")

    def queued(self) -> list[tuple[float, str, Optional[str], Optional[str]]]:
        return [(e[0], KIND_NAMES[e[2]], e[4], e[3]) for e in sorted(self._queue)]

    # -- observation --------------------------------------------------------

    def snapshot_mempool(self, node_id: str) -> list[tuple[str, object, str]]:
        return self.node(node_id).pool.snapshot()

    def holds(self, node_id: str, tx_id: str) -> bool:
        return tx_id in self.node(node_id).pool

    def observations(self, tx: Transaction) -> list[tuple[float, str]]:
        """(arrival time, relaying node) for every copy of ``tx`` that reached the observer."""
        return sorted(self._observed.get(tx.sender, {}).get(tx.tx_id, ()))

    def watch(self, tx_id: str) -> None:
        self._watch.setdefault(tx_id, {})

    def holders(self, tx_id: str) -> set[str]:
        """Every node that admitted ``tx_id`` at any point since it was watched."""
        return set(self._watch.get(tx_id, ()))

    def admission_times(self, tx_id: str) -> dict[str, float]:
        return dict(self._watch.get(tx_id, {}))

    def unwatch(self, tx_id: str) -> set[str]:
        return set(self._watch.pop(tx_id, {}))

    def fresh_account(self, tag: str = "acct") -> str:
        """Deterministic, never-reused account id."""
        return f"{tag}-{next(self._accounts)}"

    def retire_accounts(self, senders: Iterable[str], nodes: Optional[Iterable[str]] = None) -> None:
        """Treat these accounts as settled on chain: purge them from pools.

        ``nodes`` limits the purge to where the accounts can be held (e.g.
        futures that no node forwards).  Late copies still in flight arrive
        stale and are dropped.
        """
        targets = list(self.nodes.values()) if nodes is None else [self.node(n) for n in nodes]
        for s in senders:
            self.nonces[s] = RETIRED_NONCE
            self._observed.pop(s, None)
            for node in targets:
                node.pool.remove_sender(s)

    @property
    def forwards_futures(self) -> bool:
        return any(n.profile.forwards_futures for n in self.nodes.values())

    def confirm(self, txs: Iterable[Transaction]) -> None:
        """Advance on-chain nonces past ``txs`` and resync every pool."""
        moved: dict[str, int] = {}
        for tx in txs:
            moved[tx.sender] = max(moved.get(tx.sender, 0), tx.nonce + 1)
        for s, n in moved.items():
            if n > self.nonces.get(s, 0):
                self.nonces[s] = n
        for node in self.nodes.values():
            for s in moved:
                node.pool.resync(s)

    def trace_text(self) -> str:
        return "".join(line + "\n" for line in self.trace or ())
