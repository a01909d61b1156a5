"""Fisher information of the location parameters, and the EFIM.

Two independent routes produce the equivalent FIM (EFIM) of the interest
parameters:

* the **closed-form route**: per-block formulas for the interest FIM plus
  rank-one information-loss terms per link, built from each link's delay and
  Doppler weights and the per-link offset normalizers;
* the **Schur route**: the assembled channel FIM is mapped through the
  transformation matrix and the nuisance block (gains and offsets of every
  link) is marginalized by a generic Schur complement.

They compute the same quantity through different structure, so disagreement
localizes transcription errors; both are exposed and tested against each
other.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel_fim import LinkKind, assemble_channel_fim
from .linalg import EIG_FLOOR_REL, balanced_eigvalsh, invert_psd, sym
from .links import (
    LeoBsObservables,
    bs_rx_observables,
    leo_bs_observables,
    leo_rx_observables,
)
from .scenario import Case, Scenario
from .transform import (
    LinkJacobians,
    LocationLayout,
    build_transformation_matrix,
    link_jacobians,
    transform_fim,
)


class EfimRoute(enum.Enum):
    LEMMA = "LemmaRoute"
    SCHUR = "SchurRoute"


@dataclass(frozen=True)
class InterestFim:
    """FIM of the interest parameters before accounting for nuisance."""

    matrix: np.ndarray
    layout: LocationLayout
    case: Case


@dataclass(frozen=True)
class LossMatrix:
    """Information lost to the unknown per-link gains and offsets."""

    matrix: np.ndarray
    layout: LocationLayout
    case: Case


@dataclass(frozen=True)
class Efim:
    """Equivalent FIM of the interest parameters.

    ``pseudo_inverse_used`` reports a degenerate nuisance block (some offset
    coordinate carried no information and was excluded); ``nuisance_condition``
    is the worst balanced condition number met while inverting the nuisance
    block on the Schur route.
    """

    matrix: np.ndarray
    layout: LocationLayout
    route: EfimRoute
    case: Case
    pseudo_inverse_used: bool = False
    nuisance_condition: float | None = None


def _delay_quad(w: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``sum_obs w_obs * x_obs y_obs^T`` over an (element, slot) grid."""
    return np.einsum("uk,uki,ukj->ij", w, x, y)


def _doppler_quad(w: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``sum_k w_k * x_k y_k^T`` over per-slot Doppler observations."""
    return np.einsum("k,ki,kj->ij", w, x, y)


def _link_weights(obs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Delay, Doppler and frequency-offset weights of one link.

    Returns ``(w_tau, w_nu, w_eps)``: the delay weight ``snr * omega`` per
    observation, and the Doppler / offset weights ``snr_k * f_c^2 * a_o^2 / 2``
    and ``snr_k * a_o^2 / 2`` per Doppler observation (for array links
    ``snr_k`` sums the slot's SNR over antennas, since the shift is common to
    the array).
    """
    if isinstance(obs, LeoBsObservables):  # per-(station, slot) Doppler grid
        w_tau = obs.snr * obs.omega
        snr_dop = obs.snr
    else:
        w_tau = obs.snr * obs.omega[None, :]
        snr_dop = obs.snr.sum(axis=0)
    half_ao2 = 0.5 * obs.rms_duration**2
    w_nu = snr_dop * obs.carrier_freq**2 * half_ao2
    w_eps = snr_dop * half_ao2
    return w_tau, w_nu, w_eps


def _rx_block_jacobians(
    layout: LocationLayout, jac: LinkJacobians, b: int | None
) -> list[tuple[slice, np.ndarray, np.ndarray | None]]:
    """(kappa1 slice, delay jacobian, Doppler jacobian) per block the link sees.

    Orientation has no Doppler jacobian (shifts are measured at the array
    reference point); offset blocks appear only for satellite links (``b``).
    """
    blocks = [
        (layout.position, jac.dtau_dp, jac.dnu_dp),
        (layout.velocity, jac.dtau_dvu, jac.dnu_dvu),
        (layout.orientation, jac.dtau_dphi, None),
    ]
    if b is not None:
        blocks.append((layout.pos_offset(b), jac.dtau_dpcheck, jac.dnu_dpcheck))
        blocks.append((layout.vel_offset(b), jac.dtau_dvcheck, jac.dnu_dvcheck))
    return blocks


def _accumulate_interest(
    matrix: np.ndarray,
    blocks: list[tuple[slice, np.ndarray, np.ndarray | None]],
    w_tau: np.ndarray,
    w_nu: np.ndarray,
    per_row_doppler: bool,
) -> None:
    """Add one link's ``w_tau``/``w_nu`` quadratic forms to every block pair."""
    dop_quad = _delay_quad if per_row_doppler else _doppler_quad
    for i, (sl_i, dtau_i, dnu_i) in enumerate(blocks):
        for sl_j, dtau_j, dnu_j in blocks[i:]:
            block = _delay_quad(w_tau, dtau_i, dtau_j)
            if dnu_i is not None and dnu_j is not None:
                block = block + dop_quad(w_nu, dnu_i, dnu_j)
            matrix[sl_i, sl_j] += block
            if sl_i != sl_j:
                matrix[sl_j, sl_i] += block.T


def assemble_interest_fim(scenario: Scenario, case: Case | None = None) -> InterestFim:
    """Closed-form FIM of the interest parameters.

    Receiver blocks (position / velocity / orientation and their couplings)
    sum delay and Doppler quadratic forms over the satellite-receiver links
    (indices b, u, k) and station-receiver links (q, u, k).  Offset blocks of
    satellite b add that satellite's receiver link and — with station
    observations — its station links (q, k).  Offsets of distinct satellites
    never couple, and station links never touch receiver blocks' offsets.
    """
    case = scenario.case if case is None else case
    layout = LocationLayout(n_leo=scenario.n_leo, kappa2_channel_cols=())
    matrix = np.zeros((layout.dim_interest, layout.dim_interest))

    for b in range(scenario.n_leo):
        obs = leo_rx_observables(scenario, b)
        jac = link_jacobians(scenario, LinkKind.LEO_RX, b)
        w_tau, w_nu, _ = _link_weights(obs)
        blocks = _rx_block_jacobians(layout, jac, b)
        _accumulate_interest(matrix, blocks, w_tau, w_nu, per_row_doppler=False)

    for q in range(scenario.n_bs):
        obs = bs_rx_observables(scenario, q)
        jac = link_jacobians(scenario, LinkKind.BS_RX, q)
        w_tau, w_nu, _ = _link_weights(obs)
        blocks = _rx_block_jacobians(layout, jac, None)
        _accumulate_interest(matrix, blocks, w_tau, w_nu, per_row_doppler=False)

    if case is Case.WITH_BS:
        for b in range(scenario.n_leo):
            obs = leo_bs_observables(scenario, b)
            jac = link_jacobians(scenario, LinkKind.LEO_BS, b)
            w_tau, w_nu, _ = _link_weights(obs)
            blocks = [
                (layout.pos_offset(b), jac.dtau_dpcheck, jac.dnu_dpcheck),
                (layout.vel_offset(b), jac.dtau_dvcheck, jac.dnu_dvcheck),
            ]
            _accumulate_interest(matrix, blocks, w_tau, w_nu, per_row_doppler=True)

    return InterestFim(matrix=sym(matrix), layout=layout, case=case)


def _delay_moment(w: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.einsum("uk,uki->i", w, x)


def _loss_outer(
    matrix: np.ndarray,
    moments: list[tuple[slice, np.ndarray]],
    normalizer: float,
) -> None:
    """Add ``a_i a_j^T / n`` to every block pair.

    A non-positive normalizer means the link carried no information about the
    offset at all, hence no ambiguity and no loss: the division is skipped
    (the moments are necessarily zero then too).
    """
    if normalizer <= 0.0:
        return
    for i, (sl_i, a_i) in enumerate(moments):
        for sl_j, a_j in moments[i:]:
            block = np.outer(a_i, a_j) / normalizer
            matrix[sl_i, sl_j] += block
            if sl_i != sl_j:
                matrix[sl_j, sl_i] += block.T


def assemble_information_loss(scenario: Scenario, case: Case | None = None) -> LossMatrix:
    """Information lost to the per-link clock and frequency offsets.

    Each link's unknown clock offset removes the rank-one component
    ``(sum w_tau dtau)(sum w_tau dtau)^T / (sum w_tau)`` from the blocks its
    delays inform; the frequency offset does the same on the Doppler side with
    carrier-weighted moments.  All station-receiver links share one offset
    pair, so their moments and normalizers accumulate over stations before the
    outer product is formed — which is what creates the printed cross-station
    coupling terms.  Gains are information-orthogonal and lose nothing.
    """
    case = scenario.case if case is None else case
    layout = LocationLayout(n_leo=scenario.n_leo, kappa2_channel_cols=())
    matrix = np.zeros((layout.dim_interest, layout.dim_interest))

    for b in range(scenario.n_leo):
        obs = leo_rx_observables(scenario, b)
        jac = link_jacobians(scenario, LinkKind.LEO_RX, b)
        w_tau, w_nu, w_eps = _link_weights(obs)
        blocks = _rx_block_jacobians(layout, jac, b)
        delta_moments = [(sl, _delay_moment(w_tau, dtau)) for sl, dtau, _ in blocks]
        eps_w = obs.carrier_freq * w_eps
        eps_moments = [
            (sl, np.einsum("k,ki->i", eps_w, dnu))
            for sl, _, dnu in blocks
            if dnu is not None
        ]
        _loss_outer(matrix, delta_moments, float(w_tau.sum()))
        _loss_outer(matrix, eps_moments, float(w_eps.sum()))

    if scenario.n_bs > 0:
        shared_delta: dict[int, np.ndarray] = {}
        shared_eps: dict[int, np.ndarray] = {}
        n_delta = 0.0
        n_eps = 0.0
        slices: dict[int, slice] = {}
        for q in range(scenario.n_bs):
            obs = bs_rx_observables(scenario, q)
            jac = link_jacobians(scenario, LinkKind.BS_RX, q)
            w_tau, w_nu, w_eps = _link_weights(obs)
            n_delta += float(w_tau.sum())
            n_eps += float(w_eps.sum())
            eps_w = obs.carrier_freq * w_eps
            for key, (sl, dtau, dnu) in enumerate(_rx_block_jacobians(layout, jac, None)):
                slices[key] = sl
                shared_delta[key] = shared_delta.get(key, 0.0) + _delay_moment(w_tau, dtau)
                if dnu is not None:
                    shared_eps[key] = shared_eps.get(key, 0.0) + np.einsum(
                        "k,ki->i", eps_w, dnu
                    )
        _loss_outer(matrix, [(slices[k], a) for k, a in shared_delta.items()], n_delta)
        _loss_outer(matrix, [(slices[k], a) for k, a in shared_eps.items()], n_eps)

    if case is Case.WITH_BS:
        for b in range(scenario.n_leo):
            obs = leo_bs_observables(scenario, b)
            jac = link_jacobians(scenario, LinkKind.LEO_BS, b)
            w_tau, w_nu, w_eps = _link_weights(obs)
            blocks = [
                (layout.pos_offset(b), jac.dtau_dpcheck, jac.dnu_dpcheck),
                (layout.vel_offset(b), jac.dtau_dvcheck, jac.dnu_dvcheck),
            ]
            delta_moments = [(sl, _delay_moment(w_tau, dtau)) for sl, dtau, _ in blocks]
            eps_w = obs.carrier_freq * w_eps
            eps_moments = [(sl, _delay_moment(eps_w, dnu)) for sl, _, dnu in blocks]
            _loss_outer(matrix, delta_moments, float(w_tau.sum()))
            _loss_outer(matrix, eps_moments, float(w_eps.sum()))

    return LossMatrix(matrix=sym(matrix), layout=layout, case=case)


def efim_lemma_route(scenario: Scenario, case: Case | None = None) -> Efim:
    """EFIM by the closed-form route: interest FIM minus information loss."""
    case = scenario.case if case is None else case
    interest = assemble_interest_fim(scenario, case)
    loss = assemble_information_loss(scenario, case)
    return Efim(
        matrix=sym(interest.matrix - loss.matrix),
        layout=interest.layout,
        route=EfimRoute.LEMMA,
        case=case,
    )


def _nuisance_components(j22: np.ndarray) -> list[np.ndarray]:
    """Connected components of the nuisance coupling graph (exact nonzeros)."""
    n = j22.shape[0]
    adjacency = j22 != 0.0
    seen = np.zeros(n, dtype=bool)
    components = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        members = []
        while stack:
            node = stack.pop()
            members.append(node)
            neighbors = np.flatnonzero(adjacency[node])
            for nb in neighbors:
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(int(nb))
        components.append(np.asarray(sorted(members), dtype=int))
    return components


def efim_schur_route(
    j_kappa: np.ndarray,
    layout: LocationLayout,
    case: Case = Case.WITH_BS,
    floor_rel: float = EIG_FLOOR_REL,
) -> Efim:
    """EFIM by the generic route: Schur complement over every nuisance
    coordinate of the location-parameter FIM.

    The nuisance block is marginalized per connected component of its exact
    sparsity pattern (uncoupled coordinates — gains in particular — cannot
    leak information across components, and zero-coupling components
    contribute exactly nothing, so dropping them leaves the result
    bit-identical).  Components are inverted by balanced eigendecomposition
    with the relative floor; flooring is reported via the pseudo-inverse flag.
    """
    dim = layout.dim
    if j_kappa.shape != (dim, dim):
        raise ValueError(f"J_kappa shape {j_kappa.shape} does not match layout dim {dim}")
    n1 = layout.dim_interest
    j11 = j_kappa[:n1, :n1]
    j12 = j_kappa[:n1, n1:]
    j22 = j_kappa[n1:, n1:]

    loss = np.zeros_like(j11)
    used_pseudo = False
    worst_cond = None
    for comp in _nuisance_components(j22):
        b = j12[:, comp]
        if not np.any(b != 0.0):
            continue
        c = j22[np.ix_(comp, comp)]
        c_inv, flagged = invert_psd(c, floor_rel)
        used_pseudo |= flagged
        eigvals = balanced_eigvalsh(c)
        top = float(eigvals[-1]) if eigvals.size else 0.0
        if top > 0.0:
            bottom = max(float(eigvals[0]), floor_rel * top)
            cond = top / bottom
            worst_cond = cond if worst_cond is None else max(worst_cond, cond)
        loss += b @ c_inv @ b.T

    return Efim(
        matrix=sym(j11 - loss),
        layout=layout,
        route=EfimRoute.SCHUR,
        case=case,
        pseudo_inverse_used=used_pseudo,
        nuisance_condition=worst_cond,
    )


def compute_efim(
    scenario: Scenario,
    case: Case | None = None,
    route: EfimRoute = EfimRoute.SCHUR,
) -> Efim:
    """Build the EFIM of a scenario by the requested route."""
    case = scenario.case if case is None else case
    if route is EfimRoute.LEMMA:
        return efim_lemma_route(scenario, case)
    j_eta, glob = assemble_channel_fim(scenario, case)
    upsilon = build_transformation_matrix(scenario, case, glob)
    j_kappa = transform_fim(j_eta, upsilon)
    return efim_schur_route(j_kappa, upsilon.location_layout, case)
