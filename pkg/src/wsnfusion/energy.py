"""First-order radio energy model and per-role round energy.

Every joule the simulator charges to a node is computed here. All functions
are pure; parameters travel in a :class:`RadioParams`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ConfigError, DomainError

FORMS = ("eq1", "eq24")


@dataclass(frozen=True)
class RadioParams:
    """Radio and processing constants.

    ``d0`` defaults to the free-space/multipath crossover ``sqrt(e_fs / e_mp)``
    so the two branches of :func:`tx_energy` meet. Pass an explicit ``d0`` to
    pin it to some other value.
    """

    e_elec: float = 50e-9
    e_fs: float = 10e-12
    e_mp: float = 1.3e-15
    e_cpu: float = 5e-9
    p_idle: float = 0.0
    t_idle: float = 1.0
    packet_bits: int = 1000
    d0: float | None = None

    def __post_init__(self):
        if self.d0 is None:
            object.__setattr__(self, "d0", math.sqrt(self.e_fs / self.e_mp))
        for name in ("e_elec", "e_fs", "e_mp", "e_cpu", "t_idle", "d0"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"radio.{name} must be > 0, got {value!r}")
        # p_idle = 0 switches the idle term off
        if self.p_idle < 0:
            raise ConfigError(f"radio.p_idle must be >= 0, got {self.p_idle!r}")
        if self.packet_bits <= 0:
            raise ConfigError(f"radio.packet_bits must be > 0, got {self.packet_bits!r}")

    @property
    def crossover_consistent(self) -> bool:
        return math.isclose(self.d0, math.sqrt(self.e_fs / self.e_mp), rel_tol=1e-12)


@dataclass(frozen=True)
class EnergyBreakdown:
    tx: float = 0.0
    rx: float = 0.0
    proc: float = 0.0
    idle: float = 0.0
    total: float = field(init=False)

    def __post_init__(self):
        for name in ("tx", "rx", "proc", "idle"):
            if getattr(self, name) < 0:
                raise DomainError(f"negative {name} energy")
        object.__setattr__(self, "total", self.tx + self.rx + self.proc + self.idle)

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(
            self.tx + other.tx,
            self.rx + other.rx,
            self.proc + other.proc,
            self.idle + other.idle,
        )


def _check_bits(bits):
    if bits < 0:
        raise DomainError(f"bit count must be >= 0, got {bits!r}")


def _check_distance(distance):
    if not distance >= 0:
        raise DomainError(f"distance must be >= 0, got {distance!r}")


def tx_energy(bits: int, distance: float, params: RadioParams) -> float:
    """Energy to transmit ``bits`` over ``distance`` metres.

    Free-space (d^2) amplifier up to ``d0``, multipath (d^4) beyond it.
    """
    _check_bits(bits)
    _check_distance(distance)
    if distance <= params.d0:
        return bits * params.e_elec + bits * params.e_fs * distance**2
    return bits * params.e_elec + bits * params.e_mp * distance**4


def rx_energy(bits: int, params: RadioParams) -> float:
    _check_bits(bits)
    return bits * params.e_elec


def proc_energy(bits: int, params: RadioParams) -> float:
    _check_bits(bits)
    return bits * params.e_cpu


def idle_energy(params: RadioParams) -> float:
    return params.p_idle * params.t_idle


def member_round_energy(dist_to_ch: float, control_bits: int, params: RadioParams) -> EnergyBreakdown:
    """One data packet sent to the cluster head plus received control traffic."""
    return EnergyBreakdown(
        tx=tx_energy(params.packet_bits, dist_to_ch, params),
        rx=rx_energy(control_bits, params),
    )


def ch_round_energy(
    member_count: int, agg_bits: int, dist_to_bs: float, params: RadioParams
) -> EnergyBreakdown:
    """Cluster-head cost: hear every member, aggregate, send one packet to the BS.

    Aggregation is charged as processing energy over ``agg_bits``.
    """
    if member_count < 0:
        raise DomainError(f"member_count must be >= 0, got {member_count!r}")
    return EnergyBreakdown(
        tx=tx_energy(params.packet_bits, dist_to_bs, params),
        rx=member_count * rx_energy(params.packet_bits, params),
        proc=proc_energy(agg_bits, params),
    )


def mst_edge_tx_energy(bits: int, d_ij: float, params: RadioParams, form: str = "eq1") -> float:
    """Transmit energy along one tree edge.

    ``form="eq1"`` uses the two-branch radio model. ``form="eq24"`` uses the
    distance-normalised free-space expression ``L*e_elec + L*e_fs*(d/d0)**2``.
    """
    if form == "eq1":
        return tx_energy(bits, d_ij, params)
    if form == "eq24":
        _check_bits(bits)
        _check_distance(d_ij)
        return bits * params.e_elec + bits * params.e_fs * (d_ij / params.d0) ** 2
    raise ConfigError(f"unknown energy form {form!r}; expected one of {FORMS}")


def cluster_transmission_energy(
    mst: Iterable[tuple[int, int, float]],
    receiver_counts: Mapping[int, int] | Sequence[int],
    params: RadioParams,
    form: str = "eq1",
) -> float:
    """Sum of edge transmit energy plus reception energy over a cluster tree.

    ``mst`` holds ``(sender, receiver, distance)`` triples; ``receiver_counts``
    maps node id to the number of packets it received.
    """
    bits = params.packet_bits
    terms = [mst_edge_tx_energy(bits, d, params, form) for _, _, d in mst]
    counts = receiver_counts.values() if isinstance(receiver_counts, Mapping) else receiver_counts
    terms.extend(n * rx_energy(bits, params) for n in counts)
    return math.fsum(terms)


def ch_to_bs_energy(ch_pos, bs_pos, params: RadioParams, include_bs_rx: bool = True) -> float:
    """Cluster head to base station: transmit term plus (optionally) BS reception.

    The simulator passes ``include_bs_rx=False`` because the base station has
    no battery to charge.
    """
    d = math.hypot(ch_pos[0] - bs_pos[0], ch_pos[1] - bs_pos[1])
    energy = tx_energy(params.packet_bits, d, params)
    if include_bs_rx:
        energy += rx_energy(params.packet_bits, params)
    return energy


def round_energy(intra: float, ch_bs: float) -> float:
    if intra < 0 or ch_bs < 0:
        raise DomainError("round energy terms must be >= 0")
    return intra + ch_bs
