"""Jacobians from channel parameters to location parameters.

The estimation target is ``kappa = [kappa1; kappa2]`` with

    kappa1 = [receiver position (3), receiver velocity (3),
              receiver orientation (3),
              satellite position offsets (3 per satellite),
              satellite velocity offsets (3 per satellite)]
    kappa2 = per-link gains and synchronization offsets, mirroring the
             assembled channel-vector ordering.

Delays and Doppler shifts relate to ``kappa1`` through the link geometry; the
transformation matrix ``Upsilon`` collects those partials so that
``J_kappa = Upsilon @ J_eta @ Upsilon.T``.

Differentiation convention: delays are differentiated through the full
position dependence (a velocity perturbs slot-k positions by ``k*dt``), while
Doppler shifts treat the propagation direction as a function of position-type
parameters only — velocity partials act on the relative-velocity argument at
a frozen direction.  All information matrices, the finite-difference checks,
and both bound routes share this convention.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel_fim import GlobalChannelLayout, LinkKind, LinkSection
from .geometry import SPEED_OF_LIGHT_M_S, rotation_matrix_partials
from .links import (
    LeoBsObservables,
    RxLinkObservables,
    bs_rx_observables,
    leo_bs_observables,
    leo_rx_observables,
)
from .linalg import sym
from .scenario import Case, Scenario

_C = SPEED_OF_LIGHT_M_S


@dataclass(frozen=True)
class LocationLayout:
    """Index map of the location-parameter vector ``kappa``.

    The interest block ``kappa1`` has dimension ``9 + 6*n_leo``; the nuisance
    block ``kappa2`` holds one coordinate per channel gain/offset, ordered as
    in the assembled channel vector (tracked by ``kappa2_channel_cols``, the
    channel-vector column of each nuisance coordinate).
    """

    n_leo: int
    kappa2_channel_cols: tuple[int, ...]

    @property
    def position(self) -> slice:
        return slice(0, 3)

    @property
    def velocity(self) -> slice:
        return slice(3, 6)

    @property
    def orientation(self) -> slice:
        return slice(6, 9)

    def pos_offset(self, b: int) -> slice:
        if not 0 <= b < self.n_leo:
            raise ValueError(f"satellite index {b} outside [0, {self.n_leo})")
        return slice(9 + 3 * b, 12 + 3 * b)

    def vel_offset(self, b: int) -> slice:
        if not 0 <= b < self.n_leo:
            raise ValueError(f"satellite index {b} outside [0, {self.n_leo})")
        start = 9 + 3 * self.n_leo + 3 * b
        return slice(start, start + 3)

    @property
    def dim_interest(self) -> int:
        return 9 + 6 * self.n_leo

    @property
    def dim(self) -> int:
        return self.dim_interest + len(self.kappa2_channel_cols)

    @property
    def kappa2(self) -> slice:
        return slice(self.dim_interest, self.dim)

    def interest_blocks(self) -> list[tuple[str, slice]]:
        """Named 3x3 interest blocks in layout order."""
        blocks = [
            ("position", self.position),
            ("velocity", self.velocity),
            ("orientation", self.orientation),
        ]
        blocks += [(f"pos_offset_{b}", self.pos_offset(b)) for b in range(self.n_leo)]
        blocks += [(f"vel_offset_{b}", self.vel_offset(b)) for b in range(self.n_leo)]
        return blocks


@dataclass(frozen=True)
class TransformationMatrix:
    """``Upsilon`` with the layouts of both of its sides."""

    matrix: np.ndarray
    location_layout: LocationLayout
    channel_layout: GlobalChannelLayout


@dataclass(frozen=True)
class LinkJacobians:
    """Partials of one link's delays/Dopplers w.r.t. the kappa1 blocks.

    Delay arrays have shape ``(n_rows, n_slots, 3)``; Doppler arrays are
    ``(n_slots, 3)`` for array links and ``(n_rows, n_slots, 3)`` for
    satellite-station links.  Entries are ``None`` where the link does not
    depend on that block.
    """

    kind: LinkKind
    dtau_dp: np.ndarray | None
    dtau_dvu: np.ndarray | None
    dtau_dphi: np.ndarray | None
    dtau_dpcheck: np.ndarray | None
    dtau_dvcheck: np.ndarray | None
    dnu_dp: np.ndarray | None
    dnu_dvu: np.ndarray | None
    dnu_dpcheck: np.ndarray | None
    dnu_dvcheck: np.ndarray | None


def _phi_partials(scenario: Scenario, ant_dirs: np.ndarray) -> np.ndarray:
    """Orientation partials of a link's delays: entry (u, k, i) is
    ``dirs[u,k] @ (dQ/dangle_i) @ offsets[u] / c``."""
    partials = rotation_matrix_partials(scenario.receiver.orientation)
    rotated = np.einsum("iab,ub->uia", partials, scenario.receiver.antenna_offsets)
    return np.einsum("uka,uia->uki", ant_dirs, rotated) / _C


def _doppler_position_partial(obs_dirs: np.ndarray, dists: np.ndarray, v_rel: np.ndarray) -> np.ndarray:
    """``(I - dir dir^T) @ v_rel / (c * dist)`` broadcast over leading axes."""
    proj = np.einsum("...i,...i->...", obs_dirs, v_rel)
    perp = v_rel - proj[..., None] * obs_dirs
    return perp / (_C * dists[..., None])


def link_jacobians(scenario: Scenario, kind: LinkKind, index: int) -> LinkJacobians:
    """All kappa1 partials of one link, from its observables."""
    if kind is LinkKind.LEO_RX:
        obs: RxLinkObservables = leo_rx_observables(scenario, index)
        k_fac = obs.k_times[None, :, None]
        dtau_dp = obs.ant_dirs / _C
        dtau_dvu = k_fac * obs.ant_dirs / _C
        dnu_dp = _doppler_position_partial(obs.cen_dir, obs.cen_dist, obs.v_rel)
        dnu_dvu = -obs.cen_dir / _C
        return LinkJacobians(
            kind=kind,
            dtau_dp=dtau_dp,
            dtau_dvu=dtau_dvu,
            dtau_dphi=_phi_partials(scenario, obs.ant_dirs),
            dtau_dpcheck=-dtau_dp,
            dtau_dvcheck=-dtau_dvu,
            dnu_dp=dnu_dp,
            dnu_dvu=dnu_dvu,
            dnu_dpcheck=-dnu_dp,
            dnu_dvcheck=-dnu_dvu,
        )
    if kind is LinkKind.BS_RX:
        obs = bs_rx_observables(scenario, index)
        k_fac = obs.k_times[None, :, None]
        dtau_dp = obs.ant_dirs / _C
        return LinkJacobians(
            kind=kind,
            dtau_dp=dtau_dp,
            dtau_dvu=k_fac * obs.ant_dirs / _C,
            dtau_dphi=_phi_partials(scenario, obs.ant_dirs),
            dtau_dpcheck=None,
            dtau_dvcheck=None,
            dnu_dp=_doppler_position_partial(obs.cen_dir, obs.cen_dist, obs.v_rel),
            dnu_dvu=-obs.cen_dir / _C,
            dnu_dpcheck=None,
            dnu_dvcheck=None,
        )
    if kind is LinkKind.LEO_BS:
        lobs: LeoBsObservables = leo_bs_observables(scenario, index)
        k_fac = lobs.k_times[None, :, None]
        dtau_dpcheck = -lobs.dirs / _C
        dnu_dpcheck = -_doppler_position_partial(
            lobs.dirs, lobs.dists, lobs.v_rel[None, :, :]
        )
        return LinkJacobians(
            kind=kind,
            dtau_dp=None,
            dtau_dvu=None,
            dtau_dphi=None,
            dtau_dpcheck=dtau_dpcheck,
            dtau_dvcheck=k_fac * dtau_dpcheck,
            dnu_dp=None,
            dnu_dvu=None,
            dnu_dpcheck=dnu_dpcheck,
            dnu_dvcheck=lobs.dirs / _C,
        )
    raise ValueError(f"unknown link kind {kind!r}")


def dtau_dpU(scenario: Scenario, kind: LinkKind, index: int, u: int, k: int) -> np.ndarray:
    """Receiver-position partial of one delay: ``direction / c``.

    Defined for links received by the array; the matching satellite-offset
    partial is its negation.
    """
    jac = link_jacobians(scenario, kind, index)
    if jac.dtau_dp is None:
        raise ValueError(f"{kind} delays do not depend on the receiver position")
    return jac.dtau_dp[u, k]


def dtau_dv(scenario: Scenario, kind: LinkKind, index: int, u: int, k: int) -> np.ndarray:
    """Receiver-velocity partial of one delay: ``k*dt*direction / c``.

    The satellite velocity-offset partial is the negation of the satellite
    link's value (for satellite-station links, of the station-row value).
    """
    jac = link_jacobians(scenario, kind, index)
    if jac.dtau_dvu is not None:
        return jac.dtau_dvu[u, k]
    return -jac.dtau_dvcheck[u, k]


def dnu_dpU(scenario: Scenario, kind: LinkKind, index: int, k: int, row: int | None = None) -> np.ndarray:
    """Receiver-position partial of one Doppler shift.

    ``(I - dir dir^T) v_rel / (c d)``: only the transverse part of the relative
    velocity contributes.  For satellite-station links (``row`` = station) the
    receiver plays no role and the returned value is the building block whose
    negation is the satellite position-offset partial.
    """
    jac = link_jacobians(scenario, kind, index)
    if jac.dnu_dp is not None:
        return jac.dnu_dp[k]
    return -jac.dnu_dpcheck[row if row is not None else 0, k]


def dnu_dv(scenario: Scenario, kind: LinkKind, index: int, k: int, row: int | None = None) -> np.ndarray:
    """Receiver-velocity partial of one Doppler shift: ``-direction / c``.

    The satellite velocity-offset partial is the negation (``+direction/c``).
    """
    jac = link_jacobians(scenario, kind, index)
    if jac.dnu_dvu is not None:
        return jac.dnu_dvu[k]
    return -jac.dnu_dvcheck[row if row is not None else 0, k]


def dtau_dPhi(scenario: Scenario, kind: LinkKind, index: int, u: int, k: int) -> np.ndarray:
    """Orientation partials of one delay: component i is
    ``dir @ (dQ/dangle_i) @ offset_u / c``."""
    jac = link_jacobians(scenario, kind, index)
    if jac.dtau_dphi is None:
        raise ValueError(f"{kind} delays do not depend on the receiver orientation")
    return jac.dtau_dphi[u, k]


def _place_rx_link(
    upsilon: np.ndarray,
    loc: LocationLayout,
    glob: GlobalChannelLayout,
    sec: LinkSection,
    jac: LinkJacobians,
) -> None:
    lay = sec.fim.layout
    delay_cols = glob.delay_indices(sec).reshape(lay.n_rows, lay.n_slots)
    doppler_cols = glob.doppler_indices(sec)
    for u in range(lay.n_rows):
        for k in range(lay.n_slots):
            col = delay_cols[u, k]
            upsilon[loc.position, col] = jac.dtau_dp[u, k]
            upsilon[loc.velocity, col] = jac.dtau_dvu[u, k]
            upsilon[loc.orientation, col] = jac.dtau_dphi[u, k]
            if jac.kind is LinkKind.LEO_RX:
                upsilon[loc.pos_offset(sec.fim.index), col] = jac.dtau_dpcheck[u, k]
                upsilon[loc.vel_offset(sec.fim.index), col] = jac.dtau_dvcheck[u, k]
    for k, col in enumerate(doppler_cols):
        upsilon[loc.position, col] = jac.dnu_dp[k]
        upsilon[loc.velocity, col] = jac.dnu_dvu[k]
        if jac.kind is LinkKind.LEO_RX:
            upsilon[loc.pos_offset(sec.fim.index), col] = jac.dnu_dpcheck[k]
            upsilon[loc.vel_offset(sec.fim.index), col] = jac.dnu_dvcheck[k]


def _place_leo_bs_link(
    upsilon: np.ndarray,
    loc: LocationLayout,
    glob: GlobalChannelLayout,
    sec: LinkSection,
    jac: LinkJacobians,
) -> None:
    lay = sec.fim.layout
    b = sec.fim.index
    delay_cols = glob.delay_indices(sec).reshape(lay.n_rows, lay.n_slots)
    doppler_cols = glob.doppler_indices(sec).reshape(lay.n_rows, lay.n_slots)
    for q in range(lay.n_rows):
        for k in range(lay.n_slots):
            upsilon[loc.pos_offset(b), delay_cols[q, k]] = jac.dtau_dpcheck[q, k]
            upsilon[loc.vel_offset(b), delay_cols[q, k]] = jac.dtau_dvcheck[q, k]
            upsilon[loc.pos_offset(b), doppler_cols[q, k]] = jac.dnu_dpcheck[q, k]
            upsilon[loc.vel_offset(b), doppler_cols[q, k]] = jac.dnu_dvcheck[q, k]


def location_layout(glob: GlobalChannelLayout, n_leo: int) -> LocationLayout:
    """Location layout matching an assembled channel layout."""
    is_nuisance = np.ones(glob.dim, dtype=bool)
    for sec in glob.sections:
        is_nuisance[glob.delay_indices(sec)] = False
        is_nuisance[glob.doppler_indices(sec)] = False
    cols = tuple(int(i) for i in np.flatnonzero(is_nuisance))
    return LocationLayout(n_leo=n_leo, kappa2_channel_cols=cols)


def build_transformation_matrix(
    scenario: Scenario, case: Case | None = None, glob: GlobalChannelLayout | None = None
) -> TransformationMatrix:
    """Build ``Upsilon`` for a scenario.

    Every delay/Doppler column carries that observable's partials with respect
    to the kappa1 blocks it depends on; gain and offset columns are unit
    selections of their kappa2 rows.  ``glob`` may be passed to reuse an
    already-assembled channel layout (it must match the scenario and case).
    """
    case = scenario.case if case is None else case
    if glob is None:
        from .channel_fim import assemble_channel_fim

        _, glob = assemble_channel_fim(scenario, case)
    loc = location_layout(glob, scenario.n_leo)

    upsilon = np.zeros((loc.dim, glob.dim))
    for sec in glob.sections:
        jac = link_jacobians(scenario, sec.fim.link_kind, sec.fim.index)
        if sec.fim.link_kind is LinkKind.LEO_BS:
            _place_leo_bs_link(upsilon, loc, glob, sec, jac)
        else:
            _place_rx_link(upsilon, loc, glob, sec, jac)
    for row, col in enumerate(loc.kappa2_channel_cols):
        upsilon[loc.dim_interest + row, col] = 1.0
    return TransformationMatrix(matrix=upsilon, location_layout=loc, channel_layout=glob)


def transform_fim(j_eta: np.ndarray, upsilon: TransformationMatrix | np.ndarray) -> np.ndarray:
    """Map a channel FIM to the location parameters: ``U @ J @ U.T``."""
    u = upsilon.matrix if isinstance(upsilon, TransformationMatrix) else upsilon
    if u.shape[1] != j_eta.shape[0] or j_eta.shape[0] != j_eta.shape[1]:
        raise ValueError(
            f"dimension mismatch: Upsilon {u.shape} against J_eta {j_eta.shape}"
        )
    return sym(u @ j_eta @ u.T)
