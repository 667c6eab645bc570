"""Receivers over the real equivalent model: ML, ZF, PIC, PIC-SIC.

PIC group decoding projects the received vector onto the orthogonal
complement of all interfering groups' columns, then searches the group's
real-symbol candidates jointly; PIC-SIC does the same stage by stage,
subtracting each decoded group before the next.  Every argmin scans
candidates in lexicographic index order, so exact metric ties resolve to
the lowest index vector and runs are fully deterministic.
"""

from dataclasses import dataclass
from functools import lru_cache
import itertools

import numpy as np

from .equivalent import matrix_of, unstack_symbols
from .linalg import numerical_rank, orthonormal_basis, least_squares_solve
from .stbc import encode

ML_BUDGET_DEFAULT = 2 ** 20

DECODER_NAMES = ("ml", "zf", "pic", "pic-sic")


class BudgetExceededError(Exception):
    """Exhaustive search would need more metric evaluations than allowed."""

    def __init__(self, required, budget):
        super().__init__(
            f"search needs {required} metric evaluations, budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass(frozen=True)
class DecodeResult:
    """Decision vector plus the search bookkeeping of one decode call."""
    s_hat_real: np.ndarray        # 2L sliced real symbols, (Re s; Im s) order
    s_hat: np.ndarray             # L complex symbols
    metric_evaluations: int
    per_group_residuals: tuple
    degenerate_groups: tuple = ()  # groups whose projected columns lost rank


def _check_grouping(grouping, n_cols):
    flat = sorted(i for g in grouping for i in g)
    if flat != list(range(n_cols)):
        raise ValueError("grouping must partition the real symbol indices")


def _axis_levels(constellation, idx, l):
    return constellation.real_levels if idx < l else constellation.imag_levels


@lru_cache(maxsize=None)
def _candidate_grid(level_sets):
    """(n_cand x g) array of level combinations, lexicographic in level index."""
    cols = np.meshgrid(*level_sets, indexing="ij")
    return np.stack([c.ravel() for c in cols], axis=1)


def group_candidates(grouping, constellation, l):
    """Candidate grids per group, built from the per-axis PAM level sets."""
    return [
        _candidate_grid(tuple(_axis_levels(constellation, i, l) for i in group))
        for group in grouping
    ]


def complexity_report(grouping, constellation):
    """Total per-group candidate counts: sum over groups of prod(level sizes)."""
    n_cols = sum(len(g) for g in grouping)
    l = n_cols // 2
    total = 0
    for group in grouping:
        n = 1
        for i in group:
            n *= len(_axis_levels(constellation, i, l))
        total += n
    return total


def _project_out(q, v):
    """Apply I - QQ^T without forming the projector."""
    if q.shape[1] == 0:
        return v
    return v - q @ (q.T @ v)


def _search_group(py, pg, cand, scale):
    """Best candidate of one group: argmin ||py - scale * pg z||^2."""
    resid = py[:, None] - scale * (pg @ cand.T)
    metrics = np.einsum("ij,ij->j", resid, resid)
    best = int(np.argmin(metrics))
    return cand[best], float(metrics[best])


def pic_group_decode(y_real, h_eq, grouping, constellation, snr, mu):
    """PIC group decoding: per group, zero-force the rest, search jointly.

    Groups are decoded independently; a group whose projected columns are
    rank-deficient is still searched (the metric stays well defined) but
    gets flagged in degenerate_groups.
    """
    h = matrix_of(h_eq)
    y = np.asarray(y_real, dtype=float)
    n_cols = h.shape[1]
    l = n_cols // 2
    _check_grouping(grouping, n_cols)
    scale = np.sqrt(snr.rho / mu)
    cands = group_candidates(grouping, constellation, l)

    x_hat = np.zeros(n_cols)
    evaluations = 0
    residuals = []
    degenerate = []
    all_idx = np.arange(n_cols)
    for gi, group in enumerate(grouping):
        group = list(group)
        others = np.setdiff1d(all_idx, group, assume_unique=True)
        q = orthonormal_basis(h[:, others])
        pg = _project_out(q, h[:, group])
        py = _project_out(q, y)
        if numerical_rank(pg) < len(group):
            degenerate.append(gi)
        z, metric = _search_group(py, pg, cands[gi], scale)
        x_hat[group] = z
        evaluations += cands[gi].shape[0]
        residuals.append(metric)
    return DecodeResult(x_hat, unstack_symbols(x_hat), evaluations,
                        tuple(residuals), tuple(degenerate))


def pic_sic_decode(y_real, h_eq, grouping, constellation, snr, mu,
                   order="sequential"):
    """PIC-SIC: decode groups in order, cancel each before the next stage.

    At each stage only the not-yet-decoded groups are zero-forced.  order
    is "sequential" (the grouping's own order, the certified default),
    "energy" (greedy largest projected group energy first), or an explicit
    sequence of group indices.
    """
    h = matrix_of(h_eq)
    y = np.asarray(y_real, dtype=float).copy()
    n_cols = h.shape[1]
    l = n_cols // 2
    _check_grouping(grouping, n_cols)
    scale = np.sqrt(snr.rho / mu)
    cands = group_candidates(grouping, constellation, l)

    n_groups = len(grouping)
    if order == "sequential":
        sequence = list(range(n_groups))
        greedy = False
    elif order == "energy":
        sequence = None
        greedy = True
    else:
        sequence = list(order)
        if sorted(sequence) != list(range(n_groups)):
            raise ValueError("order must visit every group exactly once")
        greedy = False

    x_hat = np.zeros(n_cols)
    evaluations = 0
    residuals = [0.0] * n_groups
    degenerate = []
    remaining = list(range(n_groups)) if greedy else list(sequence)
    for stage in range(n_groups):
        if greedy:
            gi = _pick_by_energy(h, grouping, remaining)
            remaining.remove(gi)
            interferers = remaining
        else:
            gi = remaining[stage]
            interferers = remaining[stage + 1:]
        group = list(grouping[gi])
        interf_cols = [i for g in interferers for i in grouping[g]]
        q = orthonormal_basis(h[:, interf_cols]) if interf_cols else \
            np.zeros((h.shape[0], 0))
        pg = _project_out(q, h[:, group])
        py = _project_out(q, y)
        if numerical_rank(pg) < len(group):
            degenerate.append(gi)
        z, metric = _search_group(py, pg, cands[gi], scale)
        x_hat[group] = z
        evaluations += cands[gi].shape[0]
        residuals[gi] = metric
        y -= scale * (h[:, group] @ z)
    return DecodeResult(x_hat, unstack_symbols(x_hat), evaluations,
                        tuple(residuals), tuple(degenerate))


def _pick_by_energy(h, grouping, remaining):
    best, best_score = remaining[0], -1.0
    for gi in remaining:
        others = [i for g in remaining if g != gi for i in grouping[g]]
        q = orthonormal_basis(h[:, others]) if others else \
            np.zeros((h.shape[0], 0))
        score = np.linalg.norm(_project_out(q, h[:, list(grouping[gi])]))
        if score > best_score:
            best, best_score = gi, score
    return best


def zf_decode(y_real, h_eq, constellation, snr, mu):
    """Zero forcing: unconstrained least squares, then per-symbol slicing.

    A tall rank-deficient system raises SingularSystemError (the caller
    may redraw the channel).  With fewer observations than real symbols
    (possible at small receive-antenna counts) no full-column-rank
    solution exists at all; the minimum-norm least-squares solution is
    sliced instead, which keeps the decoder runnable and shows its
    interference-limited error floor.
    """
    h = matrix_of(h_eq)
    y = np.asarray(y_real, dtype=float)
    n_cols = h.shape[1]
    l = n_cols // 2
    scale = np.sqrt(snr.rho / mu)
    if h.shape[0] >= n_cols:
        x_ls = least_squares_solve(h, y) / scale
    else:
        x_ls = np.linalg.lstsq(h, y, rcond=None)[0] / scale
    x_hat = np.empty(n_cols)
    evaluations = 0
    for i in range(n_cols):
        levels = np.asarray(_axis_levels(constellation, i, l))
        x_hat[i] = levels[np.argmin(np.abs(levels - x_ls[i]))]
        evaluations += levels.size
    return DecodeResult(x_hat, unstack_symbols(x_hat), evaluations, ())


_CODEWORD_BANKS = {}


def codeword_bank(spec, constellation):
    """All |A|^L candidate frames and their codewords, cached per code.

    Candidates are ordered lexicographically by symbol point index, which
    fixes the ML tie-break.
    """
    key = (spec.m, spec.p, spec.theta_a.tobytes(), spec.theta_b.tobytes(),
           constellation)
    bank = _CODEWORD_BANKS.get(key)
    if bank is None:
        pts = np.asarray(constellation.points)
        indices = np.array(list(itertools.product(range(pts.size),
                                                  repeat=spec.l)), dtype=np.int64)
        frames = pts[indices]
        codewords = np.stack([encode(f, spec) for f in frames])
        bank = (indices, frames, codewords)
        _CODEWORD_BANKS[key] = bank
    return bank


def ml_decode(y, h, spec, constellation, snr, mu, budget=ML_BUDGET_DEFAULT):
    """Exhaustive ML over all frames: argmin ||Y - sqrt(rho/mu) X(s) H||_F^2.

    Works on the complex matrix model directly (no equivalent-channel
    step), so it doubles as an independent reference for the group
    decoders.  Refuses up front when |A|^L exceeds the budget.
    """
    n_cand = constellation.order ** spec.l
    if n_cand > budget:
        raise BudgetExceededError(n_cand, budget)
    _, frames, codewords = codeword_bank(spec, constellation)
    y = np.asarray(y, dtype=complex)
    scale = np.sqrt(snr.rho / mu)
    best_idx, best_metric = 0, np.inf
    chunk = 8192
    for start in range(0, n_cand, chunk):
        block = codewords[start:start + chunk]
        resid = y[None, :, :] - scale * (block @ h)
        metrics = np.einsum("kij,kij->k", resid, resid.conj()).real
        k = int(np.argmin(metrics))
        if metrics[k] < best_metric:
            best_idx, best_metric = start + k, float(metrics[k])
    s_hat = frames[best_idx]
    x_hat = np.concatenate([s_hat.real, s_hat.imag])
    return DecodeResult(x_hat, s_hat, n_cand, (best_metric,))
