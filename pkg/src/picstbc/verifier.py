"""Numerical certification of the code's diversity machinery.

Exact statements ("the difference codeword has full rank", "no nonzero
combination lies in the interferers' span") become thresholded residual
tests, sampled over difference frames and channel draws.  A clean report
certifies "no counterexample found at this sample size", never a proof.
"""

from dataclasses import dataclass, field
import itertools

import numpy as np

from .channel import sample_channel
from .constellation import difference_alphabet
from .equivalent import build_equivalent_channel, default_grouping
from .linalg import numerical_rank, orthonormal_basis
from .stbc import encode

SPAN_TOL = 1e-8
ORTHOGONALITY_TOL = 1e-12
VIOLATION_LIST_CAP = 50


class BudgetExceededError(Exception):
    """Exhaustive enumeration would need more samples than allowed."""

    def __init__(self, required, budget):
        super().__init__(f"exhaustive sweep needs {required} samples,"
                         f" budget is {budget}")
        self.required = required
        self.budget = budget


@dataclass
class DiversityReport:
    """Outcome of one certification sweep.

    Rank sweeps fill min_rank_observed; span-condition sweeps fill
    min_residual (the smallest relative residual seen) and the violation
    list, truncated to VIOLATION_LIST_CAP entries with the full count in
    violation_count.
    """
    min_rank_observed: int
    rank_samples: int
    condition_violations: list = field(default_factory=list)
    min_residual: float = np.inf
    violation_count: int = 0

    @property
    def ok(self):
        return self.violation_count == 0


@dataclass
class OrthogonalityReport:
    """Largest cross-group inner product seen over sampled channels."""
    max_abs_cross: float
    samples: int
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _per_axis_diff_sets(constellation, l):
    d = difference_alphabet(constellation)
    return d.real_values, d.imag_values


def _case_of(ds):
    re_nz = bool(np.any(ds.real))
    im_nz = bool(np.any(ds.imag))
    return ("mixed" if re_nz and im_nz else
            "real-only" if re_nz else
            "imag-only" if im_nz else "zero")


def check_difference_rank(spec, constellation, mode="random", budget=10000,
                          rng=None):
    """Minimum rank of the difference codeword over difference frames.

    mode="exhaustive" enumerates every nonzero frame over the per-axis
    difference grids (refused when that exceeds budget); mode="random"
    draws `budget` frames stratified over the three sign cases (real and
    imaginary difference, real only, imaginary only).
    """
    real_set, imag_set = _per_axis_diff_sets(constellation, spec.l)
    counts = {"mixed": 0, "real-only": 0, "imag-only": 0}
    min_rank = spec.m
    samples = 0

    def visit(ds):
        nonlocal min_rank, samples
        samples += 1
        case = _case_of(ds)
        if case != "zero":
            counts[case] = counts.get(case, 0) + 1
        min_rank = min(min_rank, numerical_rank(encode(ds, spec)))

    if mode == "exhaustive":
        total = (len(real_set) * len(imag_set)) ** spec.l
        if total > budget:
            raise BudgetExceededError(total, budget)
        per_symbol = [complex(r, i) for r in real_set for i in imag_set]
        for combo in itertools.product(per_symbol, repeat=spec.l):
            ds = np.asarray(combo)
            if ds.any():
                visit(ds)
    elif mode == "random":
        if rng is None:
            rng = np.random.default_rng(0)
        real_arr = np.asarray(real_set)
        imag_arr = np.asarray(imag_set)
        imag_can_be_nonzero = bool(np.any(imag_arr))
        cases = ["mixed", "real-only", "imag-only"] if imag_can_be_nonzero \
            else ["real-only"]
        for k in range(budget):
            case = cases[k % len(cases)]
            while True:
                re = real_arr[rng.integers(0, real_arr.size, spec.l)]
                im = imag_arr[rng.integers(0, imag_arr.size, spec.l)]
                if case == "real-only":
                    im = np.zeros(spec.l)
                elif case == "imag-only":
                    re = np.zeros(spec.l)
                ds = re + 1j * im
                if _case_of(ds) == case:
                    break
            visit(ds)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return DiversityReport(min_rank_observed=min_rank, rank_samples=samples)


def _group_diff_combos(group, constellation, l):
    """All nonzero per-axis difference combinations for one group."""
    real_set, imag_set = _per_axis_diff_sets(constellation, l)
    sets = [real_set if i < l else imag_set for i in group]
    combos = np.array(list(itertools.product(*sets)))
    return combos[np.any(combos != 0, axis=1)]


def structured_channels(m, rng, n_rx=1):
    """Channel draws exercising the degenerate proof cases.

    Standard basis columns (real part only), their imaginary twins, one
    real-only and one imaginary-only random draw; multi-antenna variants
    use distinct basis vectors per antenna so the channel keeps full
    column rank.
    """
    out = []
    for k in range(m):
        e = np.zeros((m, n_rx), dtype=complex)
        for n in range(n_rx):
            e[(k + n) % m, n] = 1.0
        out.append(e)
        out.append(1j * e)
    out.append(rng.standard_normal((m, n_rx)) + 0j)
    out.append(1j * rng.standard_normal((m, n_rx)))
    return out


def _span_residual_sweep(spec, h_list, grouping, constellation,
                         interferers_of, tol):
    """Shared core: project group difference combos out of interferer spans."""
    l = spec.l
    combos = {gi: _group_diff_combos(g, constellation, l)
              for gi, g in enumerate(grouping)}
    report = DiversityReport(min_rank_observed=0, rank_samples=0)
    min_res = np.inf
    for ci, h in enumerate(h_list):
        h_eq = build_equivalent_channel(spec, h).h_eq
        for gi, group in enumerate(grouping):
            a = combos[gi]
            if a.size == 0:
                continue
            interf = interferers_of(gi)
            report.rank_samples += a.shape[0]
            v = h_eq[:, list(group)] @ a.T
            if interf:
                q = orthonormal_basis(h_eq[:, interf])
                pv = v - q @ (q.T @ v)
            else:
                pv = v
            vnorm = np.linalg.norm(v, axis=0)
            resid = np.linalg.norm(pv, axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                ratio = np.where(vnorm > 0, resid / np.maximum(vnorm, 1e-300), 0.0)
            min_res = min(min_res, float(ratio.min()))
            bad = np.flatnonzero(resid <= tol * vnorm)
            for b in bad:
                report.violation_count += 1
                if len(report.condition_violations) < VIOLATION_LIST_CAP:
                    report.condition_violations.append(
                        (ci, gi, tuple(a[b]), float(ratio[b])))
    report.min_residual = min_res
    return report


def check_pic_condition(spec, constellation, grouping=None, channel_samples=100,
                        rng=None, tol=SPAN_TOL, n_rx=1,
                        include_structured=True):
    """PIC full-diversity condition: for every sampled channel and every
    group, no nonzero difference combination of the group's columns may
    fall inside the span of all remaining groups' columns."""
    if rng is None:
        rng = np.random.default_rng(0)
    if grouping is None:
        grouping = default_grouping(spec)
    h_list = []
    if include_structured:
        h_list += structured_channels(spec.m, rng, n_rx)
    h_list += [sample_channel(rng, spec.m, n_rx) for _ in range(channel_samples)]
    all_groups = range(len(grouping))

    def interferers_of(gi):
        return [i for g2 in all_groups if g2 != gi for i in grouping[g2]]

    return _span_residual_sweep(spec, h_list, grouping, constellation,
                                interferers_of, tol)


def check_pic_sic_condition(spec, constellation, grouping=None,
                            order="sequential", channel_samples=100, rng=None,
                            tol=SPAN_TOL, n_rx=1, include_structured=True):
    """Stage-wise PIC-SIC condition: at each stage, the current group's
    nonzero difference combinations must avoid the span of the groups not
    yet decoded."""
    if rng is None:
        rng = np.random.default_rng(0)
    if grouping is None:
        grouping = default_grouping(spec)
    n_groups = len(grouping)
    sequence = list(range(n_groups)) if order == "sequential" else list(order)
    if sorted(sequence) != list(range(n_groups)):
        raise ValueError("order must visit every group exactly once")
    position = {gi: k for k, gi in enumerate(sequence)}
    h_list = []
    if include_structured:
        h_list += structured_channels(spec.m, rng, n_rx)
    h_list += [sample_channel(rng, spec.m, n_rx) for _ in range(channel_samples)]

    def interferers_of(gi):
        later = sequence[position[gi] + 1:]
        return [i for g2 in later for i in grouping[g2]]

    return _span_residual_sweep(spec, h_list, grouping, constellation,
                                interferers_of, tol)


def check_group_orthogonality(spec, channel_samples=100, rng=None, n_rx=1,
                              tol=ORTHOGONALITY_TOL):
    """Cross products between same-layer column groups must vanish.

    For two diagonal layers the groups split into the two quadruples
    (1,3,5,7) and (2,4,6,8); each quadruple is internally orthogonal for
    every channel, independent of the transforms.
    """
    if spec.p != 2:
        raise ValueError("orthogonality quadruples are defined for P=2")
    if rng is None:
        rng = np.random.default_rng(0)
    half = spec.half
    quadruples = ((0, 2, 4, 6), (1, 3, 5, 7))
    worst = 0.0
    violations = []
    for ci in range(channel_samples):
        h = sample_channel(rng, spec.m, n_rx)
        h_eq = build_equivalent_channel(spec, h).h_eq
        blocks = [h_eq[:, g * half:(g + 1) * half] for g in range(8)]
        for quad in quadruples:
            for a, b in itertools.combinations(quad, 2):
                cross = float(np.abs(blocks[a].T @ blocks[b]).max())
                worst = max(worst, cross)
                if cross > tol:
                    violations.append((ci, a, b, cross))
    return OrthogonalityReport(worst, channel_samples, violations)
