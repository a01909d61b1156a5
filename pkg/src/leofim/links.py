"""Per-link observable bundles (internal).

Everything downstream — channel information matrices, parameter Jacobians,
information-loss terms — consumes links through these bundles, so the mapping
from scene geometry to delays, Doppler shifts and weights lives in exactly one
place.  Delays are evaluated per receive element (antenna, or station for the
satellite-station link); Doppler shifts are evaluated once per slot at the
array reference point for receiver links, and per station otherwise.

Satellite positions include the ephemeris offsets: the constant position error
plus the velocity-offset drift ``k*dt*vel_offset``.

Observations cover slot numbers 1..n_slots (times ``dt`` through
``n_slots*dt``); row ``i`` of every per-slot array holds slot number ``i+1``.
The epoch (slot 0), where all track parameters are defined, is not observed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    SPEED_OF_LIGHT_M_S,
    antenna_position,
    leo_position,
    receiver_reference,
    unit_direction,
)
from .scenario import Scenario
from .signals import effective_frequency, omega


@dataclass(frozen=True)
class RxLinkObservables:
    """Geometry and weights of one transmitter-to-receiver link.

    Shapes: ``ant_dirs (n_ant, n_slots, 3)``, ``ant_dists (n_ant, n_slots)``,
    ``cen_dir (n_slots, 3)``, ``cen_dist (n_slots)``, ``v_rel (n_slots, 3)``,
    per-slot ``nu`` / ``f_o`` / ``omega`` of shape ``(n_slots,)``, and
    ``snr (n_ant, n_slots)``.  ``v_rel`` is transmitter minus receiver
    velocity, the convention under which a closing link has positive Doppler.
    """

    ant_dirs: np.ndarray
    ant_dists: np.ndarray
    cen_dir: np.ndarray
    cen_dist: np.ndarray
    v_rel: np.ndarray
    nu: np.ndarray
    f_o: np.ndarray
    omega: np.ndarray
    snr: np.ndarray
    k_times: np.ndarray
    eff_bandwidth: float
    bcc: float
    rms_duration: float
    carrier_freq: float
    gain: float


@dataclass(frozen=True)
class LeoBsObservables:
    """Geometry and weights of one satellite's links to every base station.

    Station-indexed analogue of :class:`RxLinkObservables`: delays and Doppler
    shifts are both per (station, slot), so ``dirs (n_bs, n_slots, 3)``,
    ``dists / nu / f_o / omega / snr (n_bs, n_slots)``.
    """

    dirs: np.ndarray
    dists: np.ndarray
    v_rel: np.ndarray
    nu: np.ndarray
    f_o: np.ndarray
    omega: np.ndarray
    snr: np.ndarray
    k_times: np.ndarray
    eff_bandwidth: float
    bcc: float
    rms_duration: float
    carrier_freq: float
    gain: float


def _slot_times(scenario: Scenario) -> np.ndarray:
    return np.array([scenario.grid.time_of(k) for k in scenario.grid.slot_numbers()])


def leo_rx_observables(scenario: Scenario, b: int) -> RxLinkObservables:
    """Observables of satellite ``b``'s downlink to the receiver array."""
    leo = scenario.leos[b]
    props = scenario.leo_rx_signals[b]
    offsets = scenario.leo_rx_offsets[b]
    grid = scenario.grid
    n_ant, n_slots = scenario.n_ant, scenario.n_slots

    ant_dirs = np.zeros((n_ant, n_slots, 3))
    ant_dists = np.zeros((n_ant, n_slots))
    cen_dir = np.zeros((n_slots, 3))
    cen_dist = np.zeros(n_slots)
    v_rel = np.zeros((n_slots, 3))
    nu = np.zeros(n_slots)
    for i, k in enumerate(grid.slot_numbers()):
        tx = leo_position(leo, k, grid, include_offset=True)
        centroid = receiver_reference(scenario.receiver, k, grid)
        cen_dir[i] = unit_direction(tx, centroid)
        cen_dist[i] = np.linalg.norm(centroid - tx)
        v_rel[i] = leo.velocity_at(k, include_offset=True) - scenario.receiver.velocity
        nu[i] = cen_dir[i] @ v_rel[i] / SPEED_OF_LIGHT_M_S
        for u in range(n_ant):
            rx = antenna_position(scenario.receiver, u, k, grid)
            ant_dirs[u, i] = unit_direction(tx, rx)
            ant_dists[u, i] = np.linalg.norm(rx - tx)

    f_o = effective_frequency(props.carrier_freq, nu, offsets.freq_offset)
    om = omega(props.eff_bandwidth, props.bcc, f_o)
    return RxLinkObservables(
        ant_dirs=ant_dirs,
        ant_dists=ant_dists,
        cen_dir=cen_dir,
        cen_dist=cen_dist,
        v_rel=v_rel,
        nu=nu,
        f_o=f_o,
        omega=om,
        snr=props.snr_grid((n_ant, n_slots)),
        k_times=_slot_times(scenario),
        eff_bandwidth=props.eff_bandwidth,
        bcc=props.bcc,
        rms_duration=props.rms_duration,
        carrier_freq=props.carrier_freq,
        gain=scenario.leo_rx_gains[b],
    )


def bs_rx_observables(scenario: Scenario, q: int) -> RxLinkObservables:
    """Observables of station ``q``'s link to the receiver array."""
    bs = scenario.bss[q]
    props = scenario.bs_rx_signals[q]
    offsets = scenario.bs_rx_offset
    grid = scenario.grid
    n_ant, n_slots = scenario.n_ant, scenario.n_slots

    ant_dirs = np.zeros((n_ant, n_slots, 3))
    ant_dists = np.zeros((n_ant, n_slots))
    cen_dir = np.zeros((n_slots, 3))
    cen_dist = np.zeros(n_slots)
    v_rel = np.tile(-scenario.receiver.velocity, (n_slots, 1))
    nu = np.zeros(n_slots)
    for i, k in enumerate(grid.slot_numbers()):
        centroid = receiver_reference(scenario.receiver, k, grid)
        cen_dir[i] = unit_direction(bs.position, centroid)
        cen_dist[i] = np.linalg.norm(centroid - bs.position)
        nu[i] = cen_dir[i] @ v_rel[i] / SPEED_OF_LIGHT_M_S
        for u in range(n_ant):
            rx = antenna_position(scenario.receiver, u, k, grid)
            ant_dirs[u, i] = unit_direction(bs.position, rx)
            ant_dists[u, i] = np.linalg.norm(rx - bs.position)

    f_o = effective_frequency(props.carrier_freq, nu, offsets.freq_offset)
    om = omega(props.eff_bandwidth, props.bcc, f_o)
    return RxLinkObservables(
        ant_dirs=ant_dirs,
        ant_dists=ant_dists,
        cen_dir=cen_dir,
        cen_dist=cen_dist,
        v_rel=v_rel,
        nu=nu,
        f_o=f_o,
        omega=om,
        snr=props.snr_grid((n_ant, n_slots)),
        k_times=_slot_times(scenario),
        eff_bandwidth=props.eff_bandwidth,
        bcc=props.bcc,
        rms_duration=props.rms_duration,
        carrier_freq=props.carrier_freq,
        gain=scenario.bs_rx_gains[q],
    )


def leo_bs_observables(scenario: Scenario, b: int) -> LeoBsObservables:
    """Observables of satellite ``b``'s links to all base stations."""
    leo = scenario.leos[b]
    props = scenario.leo_bs_signals[b]
    offsets = scenario.leo_bs_offsets[b]
    grid = scenario.grid
    n_bs, n_slots = scenario.n_bs, scenario.n_slots

    dirs = np.zeros((n_bs, n_slots, 3))
    dists = np.zeros((n_bs, n_slots))
    v_rel = np.zeros((n_slots, 3))
    nu = np.zeros((n_bs, n_slots))
    for i, k in enumerate(grid.slot_numbers()):
        tx = leo_position(leo, k, grid, include_offset=True)
        v_rel[i] = leo.velocity_at(k, include_offset=True)
        for q in range(n_bs):
            dirs[q, i] = unit_direction(tx, scenario.bss[q].position)
            dists[q, i] = np.linalg.norm(scenario.bss[q].position - tx)
            nu[q, i] = dirs[q, i] @ v_rel[i] / SPEED_OF_LIGHT_M_S

    f_o = effective_frequency(props.carrier_freq, nu, offsets.freq_offset)
    om = omega(props.eff_bandwidth, props.bcc, f_o)
    return LeoBsObservables(
        dirs=dirs,
        dists=dists,
        v_rel=v_rel,
        nu=nu,
        f_o=f_o,
        omega=om,
        snr=props.snr_grid((n_bs, n_slots)),
        k_times=_slot_times(scenario),
        eff_bandwidth=props.eff_bandwidth,
        bcc=props.bcc,
        rms_duration=props.rms_duration,
        carrier_freq=props.carrier_freq,
        gain=scenario.leo_bs_gains[b],
    )
