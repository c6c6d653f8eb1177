"""A-posteriori verification of transform hypotheses.

A hypothesis survives two gates.  Sequential probing walks the most
confident reference edges, checks for a probe-side correspondent of each
under the inverse transform, and multiplies the branch confidence by a miss
factor on every failure, so poor hypotheses die after a handful of probes.
Full coincidence counting then greedily matches every probe edge against
the reference set one-to-one, yielding the symmetric score
2 m / (|ref| + |probe visible|).

The top-level `match` drives both gates over ranked basis hypotheses and
refines the best surviving transform with a least-squares fit over its
matched pairs: a basis couple pins the transform from just two edges and
inherits their jitter, while the refit averages it over every coincidence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basis import (
    BasisPair,
    HypothesisConfig,
    Transform,
    enumerate_basis_pairs,
    find_compatible_pairs,
)
from .edges import EdgeSet, SpatialIndex, _query_near_arr, build_index


@dataclass(frozen=True)
class VerifyConfig:
    """Verification tolerances and budgets.

    eps_pos is measured in reference-frame pixels.  seed is carried for
    interface stability; the implementation is fully deterministic and does
    not consume randomness.
    """

    eps_pos: float = 3.0
    eps_theta: float = 0.2
    probe_count: int = 20
    miss_factor: float = 0.8
    prune_threshold: float = 0.3
    accept_score: float = 0.4
    max_branches: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.eps_pos <= 0.0 or self.eps_theta <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.probe_count < 1:
            raise ValueError("probe_count must be at least 1")
        if not (0.0 < self.miss_factor < 1.0):
            raise ValueError("miss_factor must lie in (0, 1)")
        if not (0.0 <= self.prune_threshold < 1.0):
            raise ValueError("prune_threshold must lie in [0, 1)")
        if not (0.0 < self.accept_score <= 1.0):
            raise ValueError("accept_score must lie in (0, 1]")
        if self.max_branches < 1:
            raise ValueError("max_branches must be at least 1")


@dataclass
class MatchResult:
    """Outcome of matching a probe edge set against a reference edge set.

    counts is (matched, reference total, probe edges visible in the
    reference frame); score = 2 * matched / (counts[1] + counts[2]) under
    the reported transform.  basis records the accepted reference and probe
    couples when a surviving branch exists.
    """

    decided: bool
    score: float
    transform: Transform | None
    matched_pairs: list[tuple[int, int]] = field(default_factory=list)
    counts: tuple[int, int, int] = (0, 0, 0)
    branches_tried: int = 0
    confidence: float = 0.0
    basis: tuple[tuple[int, int], tuple[int, int]] | None = None

    def to_json_dict(self) -> dict:
        return {
            "version": 1,
            "decided": self.decided,
            "score": self.score,
            "transform": (
                {"s": self.transform.s, "tx": self.transform.tx, "ty": self.transform.ty}
                if self.transform is not None
                else None
            ),
            "matched_pairs": [[a, n] for a, n in self.matched_pairs],
            "counts": list(self.counts),
            "branches_tried": self.branches_tried,
            "confidence": self.confidence,
            "basis": (
                {"ref": list(self.basis[0]), "probe": list(self.basis[1])}
                if self.basis is not None
                else None
            ),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "MatchResult":
        if d.get("version") != 1:
            raise ValueError(f"unsupported match result version {d.get('version')!r}")
        t = d.get("transform")
        b = d.get("basis")
        return cls(
            decided=bool(d["decided"]),
            score=float(d["score"]),
            transform=Transform(s=t["s"], tx=t["tx"], ty=t["ty"]) if t else None,
            matched_pairs=[(int(a), int(n)) for a, n in d.get("matched_pairs", [])],
            counts=tuple(int(c) for c in d.get("counts", (0, 0, 0))),
            branches_tried=int(d.get("branches_tried", 0)),
            confidence=float(d.get("confidence", 0.0)),
            basis=(
                ((int(b["ref"][0]), int(b["ref"][1])), (int(b["probe"][0]), int(b["probe"][1])))
                if b
                else None
            ),
        )


def _mapped_positions(probe: EdgeSet, transform: Transform):
    arr = probe.arrays()
    return transform.s * arr.x + transform.tx, transform.s * arr.y + transform.ty


def _visible_mask(ref: EdgeSet, probe: EdgeSet, transform: Transform) -> np.ndarray:
    mx, my = _mapped_positions(probe, transform)
    return (mx >= 0.0) & (mx < ref.width) & (my >= 0.0) & (my < ref.height)


def count_coincidences(
    ref: EdgeSet,
    ref_index: SpatialIndex,
    probe: EdgeSet,
    transform: Transform,
    cfg: VerifyConfig | None = None,
) -> tuple[list[tuple[int, int]], float]:
    """Greedy one-to-one coincidence match of the mapped probe against the
    reference set.

    Probe edges mapped outside the reference frame are invisible: they are
    excluded from matching and from the score denominator.  Visible probe
    edges are processed in descending confidence (ties by lower index); each
    claims its nearest reference edge within eps_pos and eps_theta that is
    still unclaimed (distance ties by lower reference index).  Returns the
    matched (ref_index, probe_index) pairs and 2m / (|ref| + |visible|),
    defined as 0 when both counts are zero.
    """
    if cfg is None:
        cfg = VerifyConfig()
    arr_n = probe.arrays()
    arr_a = ref.arrays()
    n_probe = len(probe)
    mx, my = (np.empty(0),) * 2 if n_probe == 0 else _mapped_positions(probe, transform)
    if n_probe == 0:
        visible = np.zeros(0, dtype=bool)
    else:
        visible = (mx >= 0.0) & (mx < ref.width) & (my >= 0.0) & (my < ref.height)
    n_visible = int(visible.sum())
    denominator = len(ref) + n_visible
    if denominator == 0:
        return [], 0.0
    order = np.lexsort((np.arange(n_probe), -arr_n.confidence))
    order = order[visible[order]]
    claimed = np.zeros(len(ref), dtype=bool)
    pairs: list[tuple[int, int]] = []
    eps2 = cfg.eps_pos * cfg.eps_pos
    for n in order:
        cand = _query_near_arr(
            ref_index, ref, float(mx[n]), float(my[n]), cfg.eps_pos,
            float(arr_n.theta[n]), cfg.eps_theta,
        )
        cand = cand[~claimed[cand]]
        if cand.size == 0:
            continue
        dx = arr_a.x[cand] - mx[n]
        dy = arr_a.y[cand] - my[n]
        d2 = dx * dx + dy * dy
        ok = d2 <= eps2
        if not ok.any():
            continue
        cand, d2 = cand[ok], d2[ok]
        a = int(cand[int(np.argmin(d2))])
        claimed[a] = True
        pairs.append((a, int(n)))
    score = 2.0 * len(pairs) / denominator
    return pairs, score


def sequential_verify(
    ref: EdgeSet,
    probe: EdgeSet,
    probe_index: SpatialIndex,
    transform: Transform,
    initial_confidence: float,
    cfg: VerifyConfig | None = None,
) -> tuple[float, bool]:
    """Cheap sequential screen of one hypothesis.

    Visits the probe_count most confident reference edges (ties by lower
    index), looks for a probe edge within eps_pos / s of the inverse-mapped
    position with a compatible orientation, and multiplies the confidence by
    miss_factor on each failure.  Hits leave it unchanged.  Returns the final
    confidence and whether it fell below prune_threshold (early exit).
    """
    if cfg is None:
        cfg = VerifyConfig()
    confidence = initial_confidence
    if confidence < cfg.prune_threshold:
        return confidence, True
    arr_a = ref.arrays()
    order = np.lexsort((np.arange(len(ref)), -arr_a.confidence))[: cfg.probe_count]
    radius = cfg.eps_pos / transform.s
    for a in order:
        px, py = transform.invert(float(arr_a.x[a]), float(arr_a.y[a]))
        hits = _query_near_arr(
            probe_index, probe, px, py, radius, float(arr_a.theta[a]), cfg.eps_theta
        )
        if hits.size == 0:
            confidence *= cfg.miss_factor
            if confidence < cfg.prune_threshold:
                return confidence, True
    return confidence, False


def _refit_transform(
    ref: EdgeSet,
    probe: EdgeSet,
    pairs: list[tuple[int, int]],
    s_min: float,
    s_max: float,
) -> Transform | None:
    """Least-squares scale+translation over matched pairs.

    Minimizes sum |s * p_probe + t - p_ref|^2.  Returns None when the system
    is degenerate (fewer than two pairs, or no positional spread) or the
    fitted scale leaves [s_min, s_max].
    """
    if len(pairs) < 2:
        return None
    arr_a = ref.arrays()
    arr_n = probe.arrays()
    ai = np.array([a for a, _ in pairs], dtype=np.int64)
    ni = np.array([n for _, n in pairs], dtype=np.int64)
    px = arr_n.x[ni]
    py = arr_n.y[ni]
    qx = arr_a.x[ai]
    qy = arr_a.y[ai]
    pxm, pym = px.mean(), py.mean()
    qxm, qym = qx.mean(), qy.mean()
    dpx, dpy = px - pxm, py - pym
    dqx, dqy = qx - qxm, qy - qym
    denom = float((dpx * dpx + dpy * dpy).sum())
    if denom <= 0.0:
        return None
    s = float((dpx * dqx + dpy * dqy).sum()) / denom
    if not (s_min <= s <= s_max):
        return None
    return Transform(s=s, tx=float(qxm - s * pxm), ty=float(qym - s * pym))


def match(
    ref: EdgeSet,
    probe: EdgeSet,
    hyp_cfg: HypothesisConfig | None = None,
    ver_cfg: VerifyConfig | None = None,
) -> MatchResult:
    """Search for the transform registering the probe onto the reference.

    Walks reference basis couples in quality order; each compatible probe
    couple opens a branch with initial confidence equal to the basis quality.
    Branches are screened by sequential_verify, counted by
    count_coincidences, refined once by least squares (keeping whichever of
    the raw and refined transforms counts better), and the search stops at
    max_branches or as soon as a branch reaches accept_score.  The best
    surviving branch is reported; with no surviving branch the result is an
    undecided reject with no transform.  Deterministic for fixed inputs.
    """
    if hyp_cfg is None:
        hyp_cfg = HypothesisConfig()
    if ver_cfg is None:
        ver_cfg = VerifyConfig()
    bases = enumerate_basis_pairs(ref, hyp_cfg)
    probe_index = build_index(probe, ver_cfg.eps_pos) if len(probe) else None
    ref_index = build_index(ref, ver_cfg.eps_pos) if len(ref) else None
    branches = 0
    best = None
    done = False
    for bp in bases:
        if done or branches >= ver_cfg.max_branches or probe_index is None:
            break
        e1 = ref.edges[bp.i]
        e2 = ref.edges[bp.j]
        for n_pair, t_raw in find_compatible_pairs(
            probe, probe_index, bp, e1, e2, hyp_cfg
        ):
            if branches >= ver_cfg.max_branches:
                break
            branches += 1
            confidence, pruned = sequential_verify(
                ref, probe, probe_index, t_raw, bp.quality, ver_cfg
            )
            if pruned:
                continue
            pairs, score = count_coincidences(ref, ref_index, probe, t_raw, ver_cfg)
            t_best, pairs_best, score_best = t_raw, pairs, score
            t_ref = _refit_transform(ref, probe, pairs, hyp_cfg.s_min, hyp_cfg.s_max)
            if t_ref is not None:
                pairs_r, score_r = count_coincidences(ref, ref_index, probe, t_ref, ver_cfg)
                if score_r >= score:
                    t_best, pairs_best, score_best = t_ref, pairs_r, score_r
            if best is None or score_best > best[0]:
                best = (score_best, t_best, pairs_best, confidence, bp, n_pair)
            if score_best >= ver_cfg.accept_score:
                done = True
                break
    if best is None:
        return MatchResult(
            decided=False,
            score=0.0,
            transform=None,
            matched_pairs=[],
            counts=(0, len(ref), 0),
            branches_tried=branches,
            confidence=0.0,
            basis=None,
        )
    score, transform, pairs, confidence, bp, n_pair = best
    n_visible = int(_visible_mask(ref, probe, transform).sum()) if len(probe) else 0
    return MatchResult(
        decided=score >= ver_cfg.accept_score,
        score=score,
        transform=transform,
        matched_pairs=pairs,
        counts=(len(pairs), len(ref), n_visible),
        branches_tried=branches,
        confidence=confidence,
        basis=((bp.i, bp.j), n_pair),
    )
