"""Exact minimum-cost bipartite assignment and the set-matching cost.

The solver is the classical O(n^3) potentials (Kuhn/Jonker-Volgenant style)
algorithm. Rectangular inputs are padded to square with a finite sentinel
(max entry + 1), which shifts every maximum-size assignment's total by the
same constant. Ties between equally cheap assignments are broken
lexicographically: the lowest prediction index wins, then the lowest
ground-truth index. That is implemented as a second pass over the graph of
reduced-cost-zero edges, so results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DataError
from .geometry import Box, NormBox, box_to_norm, giou
from .records import Detection, GtInstance

# Relative tolerance for deciding that an edge is tight (reduced cost zero).
_TIGHT_RTOL = 1e-9


@dataclass(frozen=True)
class MatchWeights:
    """Coefficients of the matching cost: classification, L1, and GIoU terms."""

    w_cls: float = 2.0
    w_l1: float = 5.0
    w_giou: float = 2.0

    def __post_init__(self):
        if min(self.w_cls, self.w_l1, self.w_giou) < 0:
            raise ValueError("matching weights must be nonnegative")
        if self.w_cls == self.w_l1 == self.w_giou == 0:
            raise ValueError("at least one matching weight must be positive")


DEFAULT_MATCH_WEIGHTS = MatchWeights()


@dataclass(frozen=True)
class Assignment:
    """A one-to-one pairing between prediction and ground-truth indices.

    ``pairs`` is sorted by prediction index; together with the two unmatched
    index tuples it partitions both index ranges.
    """

    pairs: tuple[tuple[int, int], ...]
    unmatched_preds: tuple[int, ...]
    unmatched_gts: tuple[int, ...]

    def gt_for_pred(self) -> dict[int, int]:
        return dict(self.pairs)


def _solve_square(c: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Potentials-method assignment on a square cost matrix.

    Returns (col_of_row, u, v) where u, v are the dual potentials with
    c[i, j] - u[i] - v[j] >= 0 everywhere and == 0 on the matching.
    """
    n = c.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.intp)  # p[j]: 1-based row matched to column j
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        way = np.zeros(n + 1, dtype=np.intp)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            cur = c[i0 - 1] - u[i0] - v[1:]
            free = ~used[1:]
            minv1 = minv[1:]
            way1 = way[1:]
            upd = free & (cur < minv1)
            minv1[upd] = cur[upd]
            way1[upd] = j0
            masked = np.where(free, minv1, np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            used_cols = np.flatnonzero(used)
            u[p[used_cols]] += delta
            v[used_cols] -= delta
            minv1[free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.intp)
    for j in range(1, n + 1):
        col_of_row[p[j] - 1] = j - 1
    return col_of_row, u[1:], v[1:]


def _matching_extends(adj: list[np.ndarray], n: int,
                      fixed: dict[int, int]) -> bool:
    """True if a perfect matching of the tight graph contains ``fixed``."""
    col_owner = [-1] * n
    for r, c in fixed.items():
        col_owner[c] = r
    fixed_cols = set(fixed.values())

    def augment(r: int, visited: list[bool]) -> bool:
        for c in adj[r]:
            if c in fixed_cols or visited[c]:
                continue
            visited[c] = True
            if col_owner[c] == -1 or augment(col_owner[c], visited):
                col_owner[c] = r
                return True
        return False

    for r in range(n):
        if r in fixed:
            continue
        if not augment(r, [False] * n):
            return False
    return True


def _lexicographic_pairs(tight: np.ndarray, rows: int, cols: int) -> Optional[list[tuple[int, int]]]:
    """Lexicographically smallest optimal pairing over the tight-edge graph.

    Fixes real rows in ascending order to their smallest feasible real
    column; a row whose every real column breaks feasibility is left to the
    padding side (i.e., unmatched).
    """
    n = tight.shape[0]
    adj = [np.flatnonzero(tight[r]) for r in range(n)]
    if not _matching_extends(adj, n, {}):
        return None
    fixed: dict[int, int] = {}
    for r in range(rows):
        for c in adj[r]:
            if c >= cols or int(c) in fixed.values():
                continue
            trial = dict(fixed)
            trial[r] = int(c)
            if _matching_extends(adj, n, trial):
                fixed[r] = int(c)
                break
    return sorted(fixed.items())


def _pair_total(c: np.ndarray, pairs: Sequence[tuple[int, int]]) -> float:
    total = 0.0
    for i, j in pairs:
        total += float(c[i, j])
    return total


def hungarian(cost) -> Assignment:
    """Minimum-cost assignment of size min(rows, cols) for a finite cost matrix.

    Deterministic under ties: among all minimum-cost assignments the one
    whose (pred, gt) pair sequence is lexicographically smallest is returned.
    An empty matrix yields an empty assignment.
    """
    c = np.asarray(cost, dtype=np.float64)
    if c.ndim != 2:
        raise ValueError(f"cost matrix must be 2-dimensional, got shape {c.shape}")
    rows, cols = c.shape
    if rows == 0 or cols == 0:
        return Assignment((), tuple(range(rows)), tuple(range(cols)))
    if not np.isfinite(c).all():
        raise ValueError("cost matrix entries must all be finite")

    n = max(rows, cols)
    sentinel = float(c.max()) + 1.0
    sq = np.full((n, n), sentinel)
    sq[:rows, :cols] = c
    col_of_row, u, v = _solve_square(sq)

    baseline = sorted(
        (i, int(col_of_row[i])) for i in range(rows) if col_of_row[i] < cols
    )
    reduced = sq - u[:, None] - v[None, :]
    tight = reduced <= _TIGHT_RTOL * max(1.0, float(np.abs(sq).max()))
    tight[np.arange(n), col_of_row] = True

    pairs = baseline
    if int(tight.sum()) > n:  # more tight edges than the matching: possible ties
        refined = _lexicographic_pairs(tight, rows, cols)
        # Numerical near-ties can admit spurious tight edges; never trade
        # optimality for tie-break preference.
        if refined is not None and _pair_total(c, refined) <= _pair_total(c, baseline):
            pairs = refined

    matched_r = {i for i, _ in pairs}
    matched_c = {j for _, j in pairs}
    return Assignment(
        tuple(pairs),
        tuple(i for i in range(rows) if i not in matched_r),
        tuple(j for j in range(cols) if j not in matched_c),
    )


def _norm_corners(b: NormBox) -> Box:
    return Box(b.cx - 0.5 * b.w, b.cy - 0.5 * b.h, b.cx + 0.5 * b.w, b.cy + 0.5 * b.h)


def match_cost(pred: Detection, gt: GtInstance, weights: MatchWeights,
               img_w: float, img_h: float) -> float:
    """Set-matching cost: -w_cls*p(class) + w_l1*L1(center form) - w_giou*giou.

    The L1 and GIoU terms are computed on image-normalized boxes so costs are
    comparable across image sizes.
    """
    p = pred.prob_of(gt.category_id)
    if p is None:
        raise DataError(
            f"malformed prediction: no class probability for category {gt.category_id} "
            f"(image {pred.image_id})"
        )
    pn = box_to_norm(pred.box, img_w, img_h)
    gn = box_to_norm(gt.box, img_w, img_h)
    l1 = (abs(pn.cx - gn.cx) + abs(pn.cy - gn.cy)
          + abs(pn.w - gn.w) + abs(pn.h - gn.h))
    g = giou(_norm_corners(pn), _norm_corners(gn))
    return weights.w_cls * (-p) + weights.w_l1 * l1 + weights.w_giou * (-g)


def match_image(preds: Sequence[Detection], gts: Sequence[GtInstance],
                weights: MatchWeights, img_w: float, img_h: float) -> Assignment:
    """Hungarian pairing of one image's predictions with its ground truths."""
    ids = {d.image_id for d in preds} | {g.image_id for g in gts}
    if len(ids) > 1:
        raise DataError(f"match_image requires records from one image, got ids {sorted(ids)}")
    if not preds or not gts:
        return Assignment((), tuple(range(len(preds))), tuple(range(len(gts))))
    c = np.empty((len(preds), len(gts)))
    for i, d in enumerate(preds):
        for j, g in enumerate(gts):
            c[i, j] = match_cost(d, g, weights, img_w, img_h)
    return hungarian(c)
