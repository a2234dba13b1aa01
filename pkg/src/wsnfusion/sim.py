"""Round-based simulation of the clustered, tree-routed, fused sensor network.

One round runs, in order: cluster-head election and member assignment over
alive nodes, per-cluster Prim trees, sensing, leaf-to-root forwarding with
Bernoulli link loss, fusion at each head, head-to-BS uplink, energy
decrement, death bookkeeping and optional replenishment.

Every random draw comes from one of five named substreams spawned from the
config seed, so changing one model (say link loss) never moves another
(say node placement).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import clustering, energy, routing
from .config import LatencyConfig, LossConfig, SensingConfig, SimConfig
from .errors import ConfigError, StateError
from .fusion import FusionModel, fit_fusion_model, pad_readings
from .metrics import RoundMetrics, RunSummary, fused_quality, summarize

STREAMS = ("placement", "sensing", "link_loss", "weight_init", "training")

SENSOR = "sensor"
RELAY = "relay"


@dataclass
class NodeState:
    id: int
    kind: str
    position: tuple[float, float]
    energy: float
    initial_energy: float

    @property
    def alive(self) -> bool:
        return self.energy > 0


def make_streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(STREAMS, children)}


def generate_topology(config: SimConfig, rng: np.random.Generator | None = None) -> list[NodeState]:
    """Uniform random placement; sensors take ids ``0..n_sensors-1``, relays follow."""
    width, height = config.field_size
    if not (width > 0 and height > 0):
        raise ConfigError("field must have positive area")
    if rng is None:
        rng = make_streams(config.seed)["placement"]
    xy = rng.uniform((0.0, 0.0), (width, height), size=(config.n_nodes, 2))
    nodes = []
    for i, (x, y) in enumerate(xy):
        sensor = i < config.n_sensors
        e0 = config.sensor_energy_j if sensor else config.relay_energy_j
        nodes.append(NodeState(i, SENSOR if sensor else RELAY, (float(x), float(y)), e0, e0))
    return nodes


def sense(field_model: SensingConfig, node: NodeState, round_index: int, rng) -> tuple[float, float]:
    """Return ``(reading, truth)`` for one node: the field value plus Gaussian noise."""
    if not node.alive:
        raise StateError(f"node {node.id} is dead and cannot sense")
    truth = field_model.truth(node.position, round_index)
    return truth + rng.normal(0.0, field_model.noise_sigma), truth


def latency_of_round(trees, ch_bs_distances, latency: LatencyConfig) -> float:
    """Deepest tree's hop delay, plus one hop and the longest uplink's distance delay.

    ``trees`` maps CH id to :class:`ClusterTree`; ``ch_bs_distances`` maps CH id
    to metres.
    """
    if not trees:
        return 0.0
    depth = max(t.depth for t in trees.values())
    far = max(ch_bs_distances.values())
    return depth * latency.per_hop_ms + latency.per_hop_ms + latency.per_meter_ms * far


def packet_loss_of_round(transmissions: int, losses: int) -> float:
    if losses < 0 or transmissions < 0:
        raise StateError("negative packet counts")
    if losses > transmissions:
        raise StateError(f"{losses} losses out of only {transmissions} transmissions")
    if transmissions == 0:
        return 0.0
    return 100.0 * losses / transmissions


def link_lost(loss: LossConfig, distance: float, rng) -> bool:
    return bool(rng.random() < loss.probability(distance))


@dataclass
class RoundLog:
    """What happened on the air in one round; enough to recompute the energy total."""

    schedules: dict[int, list[tuple[int, int, float]]] = field(default_factory=dict)
    delivered: dict[int, int] = field(default_factory=dict)  # receiver -> packets heard
    agg_bits: dict[int, int] = field(default_factory=dict)  # CH -> bits fused
    uplinks: list[int] = field(default_factory=list)  # CHs that sent to the BS
    control_receivers: list[int] = field(default_factory=list)
    idle_nodes: list[int] = field(default_factory=list)
    charges: dict[int, float] = field(default_factory=dict)
    drawn: dict[int, float] = field(default_factory=dict)
    direct_senders: list[int] = field(default_factory=list)


@dataclass
class SimState:
    config: SimConfig
    nodes: list[NodeState]
    streams: dict[str, np.random.Generator]
    last_log: RoundLog | None = None

    @property
    def positions(self) -> np.ndarray:
        return np.array([n.position for n in self.nodes], dtype=float)

    def dead_count(self) -> int:
        return sum(not n.alive for n in self.nodes)


def init_state(config: SimConfig) -> SimState:
    streams = make_streams(config.seed)
    return SimState(config, generate_topology(config, streams["placement"]), streams)


class _Ledger:
    def __init__(self):
        self.charges: dict[int, list[float]] = {}

    def charge(self, node_id, joules):
        self.charges.setdefault(node_id, []).append(joules)

    def totals(self) -> dict[int, float]:
        return {k: math.fsum(v) for k, v in sorted(self.charges.items())}


def _settle(state: SimState, ledger: _Ledger, log: RoundLog, round_index: int) -> float:
    """Decrement batteries, clamp at zero, replenish if due. Returns joules drawn."""
    log.charges = ledger.totals()
    for node_id, cost in log.charges.items():
        node = state.nodes[node_id]
        drawn = min(node.energy, cost)
        log.drawn[node_id] = drawn
        node.energy = node.energy - cost if cost < node.energy else 0.0
    r = state.config.r_replenish
    if r and round_index % r == 0:
        for node in state.nodes:
            node.energy = node.initial_energy
    return math.fsum(log.drawn.values())


def _dead_metrics(state: SimState, round_index: int) -> RoundMetrics:
    n = len(state.nodes)
    dead = state.dead_count()
    return RoundMetrics(round_index, dead, n - dead, 0.0, 0.0, 0.0, 0.0, 0)


def elect(state: SimState) -> tuple[clustering.ClusterLayout, list[clustering.NodeScore]]:
    """Score alive nodes and build this round's cluster layout."""
    cfg = state.config
    alive = [n for n in state.nodes if n.alive]
    pts = np.array([n.position for n in alive], dtype=float)
    nbrs = clustering.neighbor_sets(pts, cfg.r_cluster)
    centrality = [len(s) for s in nbrs]
    theta = clustering.convergence_metric(pts, nbrs, cfg.r_cluster)
    bs = np.asarray(cfg.bs_position, dtype=float)
    d_bs = np.hypot(*(pts - bs).T)
    scores = clustering.normalize_scores(
        [n.energy for n in alive], d_bs, centrality, theta, node_ids=[n.id for n in alive]
    )
    scores = [s.with_probability() for s in scores]
    heads = clustering.select_cluster_heads(scores, cfg.ch_percentile)
    layout = clustering.assign_members(
        state.positions, heads, cfg.r_cluster, strict=cfg.strict_radius, node_ids=[n.id for n in alive]
    )
    return layout, scores


def run_round(state: SimState, model: FusionModel, round_index: int) -> tuple[SimState, RoundMetrics]:
    """Advance ``state`` by one round in place and return it with the round's metrics."""
    if round_index < 1:
        raise StateError("rounds are numbered from 1")
    cfg = state.config
    radio = cfg.radio
    bits = radio.packet_bits
    log = RoundLog()
    state.last_log = log
    alive = [n for n in state.nodes if n.alive]
    if not alive:
        return state, _dead_metrics(state, round_index)

    layout, _ = elect(state)
    clusters = layout.clusters()
    pos = {n.id: n.position for n in alive}
    trees = {ch: routing.build_mst({i: pos[i] for i in [ch, *members]}, ch) for ch, members in clusters.items()}

    # sensing: every alive sensor draws once, in id order
    readings, truths = {}, {}
    for n in alive:
        if n.kind == SENSOR:
            readings[n.id], truths[n.id] = sense(cfg.sensing, n, round_index, state.streams["sensing"])

    ledger = _Ledger()
    loss_rng = state.streams["link_loss"]
    sent = lost = 0
    quality = []
    ch_bs_dist = {}

    for ch, tree in trees.items():
        schedule = routing.transmission_schedule(tree)
        log.schedules[ch] = schedule
        payload = {i: ([readings[i]] if i in readings else []) for i in tree.nodes}
        for sender, receiver, d in schedule:
            ledger.charge(sender, energy.mst_edge_tx_energy(bits, d, radio, cfg.energy_form))
            sent += 1
            if link_lost(cfg.loss_model, d, loss_rng):
                lost += 1
                continue
            ledger.charge(receiver, energy.rx_energy(bits, radio))
            log.delivered[receiver] = log.delivered.get(receiver, 0) + 1
            payload[receiver].extend(payload[sender])

        data = payload[ch]
        if not data:
            continue
        fused_in = data[: model.net.input_size]
        log.agg_bits[ch] = bits * len(fused_in)
        ledger.charge(ch, energy.proc_energy(bits * len(fused_in), radio))
        fd = model.fuse(fused_in)

        d_bs = routing.euclidean_distance(pos[ch], cfg.bs_position)
        ch_bs_dist[ch] = d_bs
        ledger.charge(ch, energy.tx_energy(bits, d_bs, radio))
        log.uplinks.append(ch)
        sent += 1
        if link_lost(cfg.loss_model, d_bs, loss_rng):
            lost += 1
            continue
        quality.append(fused_quality(fd, cfg.sensing.truth(pos[ch], round_index)))

    if cfg.control_bits:
        for member in sorted(layout.assignment):
            ledger.charge(member, energy.rx_energy(cfg.control_bits, radio))
            log.control_receivers.append(member)
    idle = energy.idle_energy(radio)
    if idle:
        for n in alive:
            ledger.charge(n.id, idle)
            log.idle_nodes.append(n.id)

    drawn = _settle(state, ledger, log, round_index)
    dead = state.dead_count()
    metrics = RoundMetrics(
        round=round_index,
        dead_cum=dead,
        alive_cum=len(state.nodes) - dead,
        latency_ms=latency_of_round({c: trees[c] for c in ch_bs_dist}, ch_bs_dist, cfg.latency),
        packet_loss_pct=packet_loss_of_round(sent, lost),
        fused_quality_pct=math.fsum(quality) / len(quality) if quality else 0.0,
        energy_consumed_j=drawn,
        ch_count=len(layout.ch_ids),
    )
    return state, metrics


def composed_round_energy(log: RoundLog, state: SimState) -> float:
    """Recompute a round's energy from its air log via the per-term formulas.

    Intra-cluster tree traffic (edge transmit + reception), aggregation,
    control and idle terms form the cluster part; head-to-BS transmissions form
    the uplink part (the BS itself is mains powered and not charged).
    """
    cfg = state.config
    radio = cfg.radio
    pos = {n.id: n.position for n in state.nodes}
    edges = [e for sched in log.schedules.values() for e in sched]
    intra = energy.cluster_transmission_energy(edges, log.delivered, radio, cfg.energy_form)
    extras = [energy.proc_energy(b, radio) for b in log.agg_bits.values()]
    extras += [energy.rx_energy(cfg.control_bits, radio) for _ in log.control_receivers]
    extras += [energy.idle_energy(radio) for _ in log.idle_nodes]
    uplink = [energy.ch_to_bs_energy(pos[ch], cfg.bs_position, radio, include_bs_rx=False) for ch in log.uplinks]
    uplink += [
        energy.tx_energy(radio.packet_bits, routing.euclidean_distance(pos[i], cfg.bs_position), radio)
        for i in log.direct_senders
    ]
    return energy.round_energy(math.fsum([intra, *extras]), math.fsum(uplink))


def run_direct_round(state: SimState, round_index: int) -> tuple[SimState, RoundMetrics]:
    """Baseline: every alive sensor sends its raw reading straight to the BS."""
    cfg = state.config
    radio = cfg.radio
    log = RoundLog()
    state.last_log = log
    alive = [n for n in state.nodes if n.alive]
    if not alive:
        return state, _dead_metrics(state, round_index)

    ledger = _Ledger()
    loss_rng = state.streams["link_loss"]
    sent = lost = 0
    quality = []
    far = 0.0
    for n in alive:
        if n.kind != SENSOR:
            continue
        reading, truth = sense(cfg.sensing, n, round_index, state.streams["sensing"])
        d = routing.euclidean_distance(n.position, cfg.bs_position)
        far = max(far, d)
        ledger.charge(n.id, energy.tx_energy(radio.packet_bits, d, radio))
        log.direct_senders.append(n.id)
        sent += 1
        if link_lost(cfg.loss_model, d, loss_rng):
            lost += 1
        else:
            quality.append(fused_quality(reading, truth))
    idle = energy.idle_energy(radio)
    if idle:
        for n in alive:
            ledger.charge(n.id, idle)
            log.idle_nodes.append(n.id)

    drawn = _settle(state, ledger, log, round_index)
    dead = state.dead_count()
    latency = cfg.latency.per_hop_ms + cfg.latency.per_meter_ms * far if sent else 0.0
    metrics = RoundMetrics(
        round=round_index,
        dead_cum=dead,
        alive_cum=len(state.nodes) - dead,
        latency_ms=latency,
        packet_loss_pct=packet_loss_of_round(sent, lost),
        fused_quality_pct=math.fsum(quality) / len(quality) if quality else 0.0,
        energy_consumed_j=drawn,
        ch_count=0,
    )
    return state, metrics


def lossless_arrival_order(tree: routing.ClusterTree) -> list[int]:
    """Node ids in the order their data sits in the head's buffer when no packet is lost."""
    buffers = {i: [i] for i in tree.nodes}
    for sender, receiver, _ in routing.transmission_schedule(tree):
        buffers[receiver].extend(buffers[sender])
    return buffers[tree.root]


def fusion_training_set(
    config: SimConfig, rng: np.random.Generator, nodes: list[NodeState] | None = None, layouts: int = 32
) -> tuple[np.ndarray, np.ndarray]:
    """Synthetic fusion examples drawn on the deployed topology.

    Each of ``layouts`` elections runs with residual energies scrambled to
    between half and all of the initial charge, so the head sets resemble
    those seen as batteries drain. A sample is one cluster at a random round:
    the head's own reading first, then members' readings in tree send order,
    truncated or mean-padded to the input width. The target is the
    noise-free field value at the head.
    """
    width = config.bpnn.input_width
    sensing = config.sensing
    rounds = max(config.rounds, 1)
    if nodes is None:
        nodes = generate_topology(config, make_streams(config.seed)["placement"])
    probe = SimState(config, [NodeState(n.id, n.kind, n.position, n.initial_energy, n.initial_energy) for n in nodes], {})
    pos = {n.id: n.position for n in nodes}
    sensor_ids = {n.id for n in nodes if n.kind == SENSOR}

    clusters = []
    for _ in range(layouts):
        for node, frac in zip(probe.nodes, rng.uniform(0.5, 1.0, len(nodes))):
            node.energy = node.initial_energy * frac
        layout, _ = elect(probe)
        for ch, members in layout.clusters().items():
            tree = routing.build_mst({i: pos[i] for i in [ch, *members]}, ch)
            order = [i for i in lossless_arrival_order(tree) if i in sensor_ids]
            if order:
                clusters.append((ch, order))

    n = config.bpnn.train_samples
    inputs = np.empty((n, width))
    targets = np.empty(n)
    for k in range(n):
        ch, order = clusters[int(rng.integers(len(clusters)))]
        r = int(rng.integers(1, rounds + 1))
        values = [sensing.truth(pos[i], r) for i in order] + rng.normal(0.0, sensing.noise_sigma, len(order))
        inputs[k] = pad_readings(values, width)
        targets[k] = sensing.truth(pos[ch], r)
    return inputs, targets


def train_fusion_model(config: SimConfig, streams=None, nodes=None) -> FusionModel:
    streams = streams or make_streams(config.seed)
    x, t = fusion_training_set(config, streams["training"], nodes)
    b = config.bpnn
    model, _ = fit_fusion_model(x, t, hidden=b.hidden, eta=b.eta, epochs=b.epochs, seed=streams["weight_init"])
    return model


@dataclass
class SimResult:
    metrics: list[RoundMetrics]
    summary: RunSummary
    model: FusionModel | None
    state: SimState
    round_energy_checks: list[tuple[float, float]] = field(default_factory=list)


def run_simulation(config: SimConfig, model: FusionModel | None = None, protocol: str = "proposed") -> SimResult:
    """Run ``config.rounds`` rounds of ``protocol`` ("proposed" or "direct").

    The fusion model is trained from the config's seed unless one is given.
    ``round_energy_checks`` pairs each round's summed per-node charges with the
    independently composed round energy.
    """
    if protocol not in ("proposed", "direct"):
        raise ConfigError(f"unknown protocol {protocol!r}")
    state = init_state(config)
    if protocol == "proposed" and model is None:
        model = train_fusion_model(config, state.streams, state.nodes)
    metrics, checks = [], []
    for r in range(1, config.rounds + 1):
        if protocol == "proposed":
            state, m = run_round(state, model, r)
        else:
            state, m = run_direct_round(state, r)
        metrics.append(m)
        log = state.last_log
        checks.append((math.fsum(log.charges.values()), composed_round_energy(log, state)))
    summary = summarize(metrics, config.n_nodes, config.digest())
    return SimResult(metrics, summary, model, state, checks)
