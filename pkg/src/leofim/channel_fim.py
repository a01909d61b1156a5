"""Fisher information of the per-link channel parameters.

For every link the observable parameter vector is ordered as

    [delays (element-major, slot-minor), Doppler shifts, gain magnitude(s),
     clock offset, frequency offset]

with one Doppler per slot for links received by the antenna array (the shift
is common to all antennas) and one per (station, slot) for satellite-station
links.  Delay rows carry weight ``snr * omega``; Doppler rows carry
``snr * carrier**2 * rms_duration**2 / 2``.  A link's clock offset enters every
delay observation and its frequency offset every Doppler observation, so their
information accumulates across the link; gains are uncoupled from everything.

The assembled multi-link matrix is block diagonal across links, with one
exception: all station-receiver links share a single receiver-side
(clock, frequency) offset pair, so their per-link offset rows accumulate into
one shared coordinate pair.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .links import (
    LeoBsObservables,
    RxLinkObservables,
    bs_rx_observables,
    leo_bs_observables,
    leo_rx_observables,
)
from .scenario import Case, Scenario

TWO_PI_SQ = 2.0 * np.pi**2


class LinkKind(enum.Enum):
    LEO_RX = "leo_rx"
    BS_RX = "bs_rx"
    LEO_BS = "leo_bs"


@dataclass(frozen=True)
class ChannelLayout:
    """Index map of one link's parameter vector.

    ``n_rows`` counts receive elements (antennas, or stations for the
    satellite-station link); delays occupy a row-major (row, slot) grid.
    ``doppler_per_row`` distinguishes the per-(station, slot) Doppler grid of
    satellite-station links from the per-slot Doppler of array links.
    ``n_gain`` is 1 for a link-level gain or ``n_rows * n_slots`` when
    per-observation gains are requested.
    """

    n_rows: int
    n_slots: int
    doppler_per_row: bool = False
    n_gain: int = 1

    @property
    def n_delays(self) -> int:
        return self.n_rows * self.n_slots

    @property
    def n_dopplers(self) -> int:
        return self.n_rows * self.n_slots if self.doppler_per_row else self.n_slots

    @property
    def delays(self) -> slice:
        return slice(0, self.n_delays)

    @property
    def dopplers(self) -> slice:
        return slice(self.n_delays, self.n_delays + self.n_dopplers)

    @property
    def gains(self) -> slice:
        start = self.n_delays + self.n_dopplers
        return slice(start, start + self.n_gain)

    @property
    def time_offset(self) -> int:
        return self.n_delays + self.n_dopplers + self.n_gain

    @property
    def freq_offset(self) -> int:
        return self.time_offset + 1

    @property
    def dim(self) -> int:
        return self.n_delays + self.n_dopplers + self.n_gain + 2

    def delay_index(self, row: int, k: int) -> int:
        """Position of the (row, slot) delay within the link vector."""
        return row * self.n_slots + k

    def doppler_index(self, k: int, row: int = 0) -> int:
        """Position of the slot-``k`` Doppler (of ``row`` when per-row)."""
        base = self.n_delays
        return base + (row * self.n_slots + k if self.doppler_per_row else k)


@dataclass(frozen=True)
class LinkFim:
    """Fisher information of one link's channel parameters."""

    matrix: np.ndarray
    layout: ChannelLayout
    link_kind: LinkKind
    index: int


def _fill_link_fim(
    layout: ChannelLayout,
    snr: np.ndarray,
    omega: np.ndarray,
    carrier: float,
    rms_duration: float,
    gain: float,
) -> np.ndarray:
    """Common fill for all link kinds.

    ``snr`` has shape (n_rows, n_slots); ``omega`` is per slot (n_slots,) or
    per observation (n_rows, n_slots), matching the Doppler layout.
    """
    fim = np.zeros((layout.dim, layout.dim))
    dop_weight = 0.5 * carrier**2 * rms_duration**2
    cross_weight = -0.5 * carrier * rms_duration**2
    eps_weight = 0.5 * rms_duration**2
    i_delta = layout.time_offset
    i_eps = layout.freq_offset
    gain_info = 1.0 / (2.0 * TWO_PI_SQ * gain**2)

    for row in range(layout.n_rows):
        for k in range(layout.n_slots):
            s = snr[row, k]
            w = omega[row, k] if omega.ndim == 2 else omega[k]
            i_tau = layout.delay_index(row, k)
            fim[i_tau, i_tau] += s * w
            fim[i_tau, i_delta] += -s * w
            fim[i_delta, i_tau] += -s * w
            fim[i_delta, i_delta] += s * w

            i_nu = layout.doppler_index(k, row)
            fim[i_nu, i_nu] += s * dop_weight
            fim[i_nu, i_eps] += s * cross_weight
            fim[i_eps, i_nu] += s * cross_weight
            fim[i_eps, i_eps] += s * eps_weight

            i_gain = layout.gains.start + (
                row * layout.n_slots + k if layout.n_gain > 1 else 0
            )
            fim[i_gain, i_gain] += s * gain_info
    return fim


def _rx_link_fim(obs: RxLinkObservables, per_element_gain: bool) -> tuple[np.ndarray, ChannelLayout]:
    n_ant, n_slots = obs.snr.shape
    layout = ChannelLayout(
        n_rows=n_ant,
        n_slots=n_slots,
        doppler_per_row=False,
        n_gain=n_ant * n_slots if per_element_gain else 1,
    )
    matrix = _fill_link_fim(
        layout, obs.snr, obs.omega, obs.carrier_freq, obs.rms_duration, obs.gain
    )
    return matrix, layout


def link_fim_leo_rx(scenario: Scenario, b: int, per_element_gain: bool = False) -> LinkFim:
    """Channel FIM of satellite ``b``'s downlink to the receiver."""
    matrix, layout = _rx_link_fim(leo_rx_observables(scenario, b), per_element_gain)
    return LinkFim(matrix=matrix, layout=layout, link_kind=LinkKind.LEO_RX, index=b)


def link_fim_bs_rx(scenario: Scenario, q: int, per_element_gain: bool = False) -> LinkFim:
    """Channel FIM of station ``q``'s link to the receiver.

    The trailing (clock, frequency) offset coordinates are this link's view of
    the offsets shared by the whole station network; the assembler accumulates
    them into one global pair.
    """
    matrix, layout = _rx_link_fim(bs_rx_observables(scenario, q), per_element_gain)
    return LinkFim(matrix=matrix, layout=layout, link_kind=LinkKind.BS_RX, index=q)


def link_fim_leo_bs(scenario: Scenario, b: int, per_element_gain: bool = False) -> LinkFim:
    """Channel FIM of satellite ``b``'s links to all base stations."""
    obs: LeoBsObservables = leo_bs_observables(scenario, b)
    n_bs, n_slots = obs.snr.shape
    layout = ChannelLayout(
        n_rows=n_bs,
        n_slots=n_slots,
        doppler_per_row=True,
        n_gain=n_bs * n_slots if per_element_gain else 1,
    )
    matrix = _fill_link_fim(
        layout, obs.snr, obs.omega, obs.carrier_freq, obs.rms_duration, obs.gain
    )
    return LinkFim(matrix=matrix, layout=layout, link_kind=LinkKind.LEO_BS, index=b)


@dataclass(frozen=True)
class LinkSection:
    """Placement of one link inside the assembled parameter vector."""

    fim: LinkFim
    offset: int


@dataclass(frozen=True)
class GlobalChannelLayout:
    """Index map of the assembled multi-link channel parameter vector.

    Sections appear in assembly order: satellite-receiver links, then
    station-receiver links followed by their single shared offset pair, then
    (with station observations) satellite-station links.  For station-receiver
    sections the per-link offset columns do not own global coordinates;
    ``delta_index`` / ``epsilon_index`` of those sections resolve to the shared
    pair.
    """

    sections: tuple[LinkSection, ...]
    shared_bs_offsets: tuple[int, int] | None
    dim: int
    case: Case

    def section(self, kind: LinkKind, index: int) -> LinkSection:
        for sec in self.sections:
            if sec.fim.link_kind is kind and sec.fim.index == index:
                return sec
        raise KeyError(f"no section for {kind} #{index}")

    def delay_indices(self, sec: LinkSection) -> np.ndarray:
        lay = sec.fim.layout
        return sec.offset + np.arange(lay.delays.start, lay.delays.stop)

    def doppler_indices(self, sec: LinkSection) -> np.ndarray:
        lay = sec.fim.layout
        return sec.offset + np.arange(lay.dopplers.start, lay.dopplers.stop)

    def gain_indices(self, sec: LinkSection) -> np.ndarray:
        lay = sec.fim.layout
        return sec.offset + np.arange(lay.gains.start, lay.gains.stop)

    def delta_index(self, sec: LinkSection) -> int:
        if sec.fim.link_kind is LinkKind.BS_RX:
            assert self.shared_bs_offsets is not None
            return self.shared_bs_offsets[0]
        return sec.offset + sec.fim.layout.time_offset

    def epsilon_index(self, sec: LinkSection) -> int:
        if sec.fim.link_kind is LinkKind.BS_RX:
            assert self.shared_bs_offsets is not None
            return self.shared_bs_offsets[1]
        return sec.offset + sec.fim.layout.freq_offset


def assemble_channel_fim(
    scenario: Scenario, case: Case | None = None, per_element_gain: bool = False
) -> tuple[np.ndarray, GlobalChannelLayout]:
    """Assemble the channel FIM over every link the case observes.

    Returns the symmetric matrix and its layout.  Distinct links occupy
    disjoint blocks (their cross-information is exactly zero); the shared
    station-network offsets are the single exception, accumulating every
    station-receiver link's offset information on one coordinate pair.
    """
    case = scenario.case if case is None else case
    link_fims: list[LinkFim] = [
        link_fim_leo_rx(scenario, b, per_element_gain) for b in range(scenario.n_leo)
    ]
    bs_fims = [link_fim_bs_rx(scenario, q, per_element_gain) for q in range(scenario.n_bs)]
    link_fims.extend(bs_fims)
    leo_bs_fims: list[LinkFim] = []
    if case is Case.WITH_BS:
        leo_bs_fims = [
            link_fim_leo_bs(scenario, b, per_element_gain) for b in range(scenario.n_leo)
        ]
        link_fims.extend(leo_bs_fims)

    sections: list[LinkSection] = []
    offset = 0
    shared: tuple[int, int] | None = None
    for fim in link_fims:
        if fim.link_kind is LinkKind.BS_RX:
            sections.append(LinkSection(fim=fim, offset=offset))
            offset += fim.layout.dim - 2  # shared offsets placed once, below
            if fim.index == scenario.n_bs - 1:
                shared = (offset, offset + 1)
                offset += 2
        else:
            sections.append(LinkSection(fim=fim, offset=offset))
            offset += fim.layout.dim

    layout = GlobalChannelLayout(
        sections=tuple(sections), shared_bs_offsets=shared, dim=offset, case=case
    )

    matrix = np.zeros((offset, offset))
    for sec in layout.sections:
        lay = sec.fim.layout
        local = np.arange(lay.dim)
        global_idx = sec.offset + local
        if sec.fim.link_kind is LinkKind.BS_RX:
            global_idx = global_idx.copy()
            global_idx[lay.time_offset] = layout.delta_index(sec)
            global_idx[lay.freq_offset] = layout.epsilon_index(sec)
        matrix[np.ix_(global_idx, global_idx)] += sec.fim.matrix
    return matrix, layout
