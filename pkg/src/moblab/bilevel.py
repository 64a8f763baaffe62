"""Discrete bilevel solving over sampled graphs of the lower-level solution
mapping, existence diagnostics, and cross-concept comparison.

A solve enumerates the chosen concept's graph cloud over the parameter grid,
intersects it with the upper-level constraint set, and applies the finite
multiobjective kernel to the upper objective values.  Nonexistence is never
asserted from grids; a minimizer sitting at a flagged missing-limit point of
the sampled graph is the honest discrete signature.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import mo_core
from .cones import OrderingCone
from .mappings import (GraphCloud, closedness_probe, default_radius_schedule,
                       graph_sample, intermediate_closure, oracle_graph_sampler,
                       oracle_membership, _PSI_KEY)
from .parametric import FeasibilityDescriptor, GridSpec, ParametricMOP

__all__ = ["BilevelInstance", "SolveReport", "ExistenceVerdict",
           "ComparisonReport", "solve", "existence_check", "compare_concepts",
           "local_minimizer_probe", "BilevelError"]


class BilevelError(ValueError):
    pass


@dataclass
class BilevelInstance:
    """Upper-level data bound to a lower-level parametric problem."""

    name: str
    p: int
    F: Callable
    K: OrderingCone
    x_set: FeasibilityDescriptor
    lower: ParametricMOP
    F_batch: Callable | None = None

    def __post_init__(self):
        if self.K.dim != self.p:
            raise BilevelError("upper cone dimension must equal p")

    def upper_images(self, x: tuple, ys: np.ndarray) -> np.ndarray:
        if self.F_batch is not None:
            return np.asarray(self.F_batch(x, ys), dtype=float)
        return np.asarray([self.F(x, tuple(r)) for r in ys], dtype=float)


@dataclass
class ReportedPair:
    x: tuple
    y: tuple
    F: tuple
    weakly_only: bool = False
    locally_minimal: bool | None = None
    closedness: str | None = None


@dataclass
class SolveReport:
    concept: str
    instance: str
    efficient_pairs: list[ReportedPair]
    weakly_efficient_pairs: list[ReportedPair]
    existence: bool
    cloud_size: int
    grid_meta: dict
    flags: list[str]
    truncation_caveats: list[str]

    def to_json(self) -> str:
        def pair(p: ReportedPair):
            return {"x": list(p.x), "y": list(p.y), "F": list(p.F),
                    "locally_minimal": p.locally_minimal,
                    "closedness": p.closedness}
        return json.dumps({
            "concept": self.concept, "instance": self.instance,
            "existence": self.existence, "cloud_size": self.cloud_size,
            "grid": self.grid_meta, "flags": sorted(self.flags),
            "truncation_caveats": sorted(self.truncation_caveats),
            "efficient_pairs": [pair(p) for p in self.efficient_pairs],
            "weakly_efficient_pairs": [pair(p) for p in self.weakly_efficient_pairs],
        }, sort_keys=True)


def _x_grid_values(instance: BilevelInstance, x_grid: GridSpec) -> list[tuple]:
    pts = x_grid.points()
    keep = instance.x_set.mask((), pts) if instance.x_set.kind != "oracle" else \
        np.asarray([instance.x_set.contains((), tuple(p)) for p in pts])
    vals = [tuple(p) for p in pts[keep]]
    return [v for v in vals if _in_box(v, instance.lower.x_box)]


def _in_box(x, box) -> bool:
    return all(lo - 1e-9 <= t <= hi + 1e-9 for t, (lo, hi) in zip(x, box))


def _concept_cloud(instance: BilevelInstance, concept: str, xs, y_grid,
                   refinement_levels: int) -> GraphCloud:
    if concept == "bar":
        return intermediate_closure(instance.lower, xs, y_grid, refinement_levels)
    return graph_sample(instance.lower, xs, y_grid, concept)


def solve(instance: BilevelInstance, concept: str, x_grid: GridSpec,
          y_grid: GridSpec, refinement_levels: int = 2, probe: bool = True,
          _cloud: GraphCloud | None = None) -> SolveReport:
    """Discrete solve of the bilevel model for one lower-level solution
    concept ('eff' | 'weff' | 'bar').

    Minimizers are the exact discrete efficient pairs of the upper objective
    over the sampled graph; each is tagged with a 3-grid-step local-minimality
    probe and, when the lower problem carries the concept's analytic oracle,
    a closedness probe of the graph at the minimizer.
    """
    if concept not in ("eff", "weff", "bar"):
        raise BilevelError(f"unknown concept {concept!r}")
    if _cloud is not None:
        cloud = _cloud
    else:
        xs = _x_grid_values(instance, x_grid)
        cloud = _concept_cloud(instance, concept, xs, y_grid, refinement_levels)
    meta = {"x_steps": [a[2] for a in x_grid.axes],
            "y_steps": [a[2] for a in y_grid.axes],
            **cloud.grid_meta}
    caveats = [f for f in cloud.flags if "trunc" in f]
    if not cloud.records:
        return SolveReport(concept, instance.name, [], [], False, 0, meta,
                           list(cloud.flags), caveats)

    by_x: dict[tuple, list[int]] = {}
    for i, (x, _, _) in enumerate(cloud.records):
        by_x.setdefault(x, []).append(i)
    fvals = np.zeros((len(cloud.records), instance.p))
    for x, idxs in by_x.items():
        ys = np.asarray([cloud.records[i][1] for i in idxs], dtype=float)
        fvals[idxs] = instance.upper_images(x, ys)

    eff_idx = mo_core.nondominated(fvals, instance.K)
    weff_idx = mo_core.weakly_nondominated(fvals, instance.K)

    sampler = None
    member = None
    if probe:
        key = _PSI_KEY[concept]
        if instance.lower.oracle(key) is not None:
            member = oracle_membership(instance.lower, key)
            sampler = oracle_graph_sampler(instance.lower, key)
    # probe radii bottom out near half a grid step: below that resolution the
    # solve cannot place a minimizer anyway
    r0 = max(2.0, 512.0 * max(x_grid.max_step, y_grid.max_step))
    xy = np.asarray([tuple(x) + tuple(y) for x, y, _ in cloud.records])
    steps = np.asarray([a[2] for a in x_grid.axes] + [a[2] for a in y_grid.axes])
    dual = np.asarray([[float(t) for t in h] for h in instance.K.dual_generators])
    gvals = fvals @ dual.T
    effset = set(eff_idx)

    def report(i: int, weakly_only: bool) -> ReportedPair:
        x, y, _ = cloud.records[i]
        pr = ReportedPair(x, y, tuple(fvals[i]), weakly_only=weakly_only)
        pr.locally_minimal = _local_min(xy, steps, fvals, gvals, i)
        if sampler is not None:
            verdict = closedness_probe(member, sampler, x + y,
                                       default_radius_schedule(r0))
            pr.closedness = verdict.verdict
        return pr

    eff_pairs = [report(i, False) for i in eff_idx]
    weff_pairs = [report(i, i not in effset) for i in weff_idx]
    return SolveReport(concept, instance.name, eff_pairs, weff_pairs, True,
                       len(cloud.records), meta, list(cloud.flags), caveats)


def _local_min(xy: np.ndarray, steps: np.ndarray, fvals: np.ndarray,
               gvals: np.ndarray, i: int, radius_steps: int = 3) -> bool:
    near = (np.abs(xy - xy[i]) <= radius_steps * steps + 1e-12).all(axis=1)
    near[i] = False
    if not near.any():
        return True
    dg = gvals[i] - gvals[near]
    inK = (dg >= -1e-15).all(axis=1)
    nonzero = (fvals[near] != fvals[i]).any(axis=1)
    return not (inK & nonzero).any()


def local_minimizer_probe(instance: BilevelInstance, cloud: GraphCloud,
                          pair: tuple, x_grid: GridSpec, y_grid: GridSpec,
                          radius_steps: int = 3) -> bool:
    """True when no cloud record within `radius_steps` grid steps (infinity
    norm, jointly in x and y) strictly improves the upper objective in the
    cone order at the given (x, y) pair."""
    x0, y0 = tuple(pair[0]), tuple(pair[1])
    by_x: dict[tuple, list[int]] = {}
    for i, (x, _, _) in enumerate(cloud.records):
        by_x.setdefault(x, []).append(i)
    fvals = np.zeros((len(cloud.records), instance.p))
    for x, idxs in by_x.items():
        ys = np.asarray([cloud.records[i][1] for i in idxs], dtype=float)
        fvals[idxs] = instance.upper_images(x, ys)
    dual = np.asarray([[float(t) for t in h] for h in instance.K.dual_generators])
    gvals = fvals @ dual.T
    xy = np.asarray([tuple(x) + tuple(y) for x, y, _ in cloud.records])
    steps = np.asarray([a[2] for a in x_grid.axes] + [a[2] for a in y_grid.axes])
    target = np.asarray(x0 + y0)
    matches = np.nonzero((np.abs(xy - target) <= 1e-12).all(axis=1))[0]
    if len(matches) == 0:
        raise BilevelError(f"pair {pair!r} is not a record of the cloud")
    return _local_min(xy, steps, fvals, gvals, int(matches[0]),
                      radius_steps=radius_steps)


@dataclass
class ExistenceVerdict:
    instance: str
    concept: str
    feasible_nonempty: bool
    bounded_relative_to_box: bool
    probe_results: list[dict]
    minimizers_found: bool
    warnings: list[str]

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def existence_check(instance: BilevelInstance, concept: str, x_grid: GridSpec,
                    y_grid: GridSpec, refinement_levels: int = 2
                    ) -> ExistenceVerdict:
    """Desk-scale check of the existence hypotheses: nonemptiness and
    boundedness (relative to the truncation box, flagged, never asserted) of
    the sampled graph intersected with the upper constraint set, plus
    closedness probes at the problem's catalog probe cases."""
    xs = _x_grid_values(instance, x_grid)
    cloud = _concept_cloud(instance, concept, xs, y_grid, refinement_levels)
    nonempty = bool(cloud.records)
    bounded = True
    warnings = []
    if instance.lower.gamma.unbounded:
        box = instance.lower.gamma.box_for(xs[0] if xs else tuple(
            lo for lo, _ in instance.lower.x_box))
        step = y_grid.max_step
        for _, y, _ in cloud.records:
            if any(t >= hi - step - 1e-12 or t <= lo + 1e-12 - step
                   for t, (lo, hi) in zip(y, box)):
                bounded = False
                warnings.append("graph samples reach the truncation box; "
                                "boundedness holds relative to the box only")
                break
    probe_results = []
    key = _PSI_KEY[concept]
    cases = [c for c in getattr(instance.lower, "probe_cases", [])
             if c.concept == key]
    if instance.lower.oracle(key) is not None:
        member = oracle_membership(instance.lower, key)
        sampler = oracle_graph_sampler(instance.lower, key)
        for case in cases:
            v = closedness_probe(member, sampler, case.point)
            probe_results.append({"point": list(case.point),
                                  "verdict": v.verdict,
                                  "expected": case.expected})
            if v.verdict == "missing_limit_point":
                warnings.append(
                    f"graph is not closed at {case.point}: minimizers may "
                    "fail to exist for this concept")
    if not nonempty:
        warnings.append("empty feasible discrete set: no admissible pair in "
                        "the sampled graph intersected with the upper set")
    rep = solve(instance, concept, x_grid, y_grid, refinement_levels,
                probe=False) if nonempty else None
    return ExistenceVerdict(
        instance=instance.name, concept=concept, feasible_nonempty=nonempty,
        bounded_relative_to_box=bounded, probe_results=probe_results,
        minimizers_found=bool(rep and rep.efficient_pairs), warnings=warnings)


@dataclass
class ComparisonReport:
    instance: str
    reports: dict
    cloud_sizes: dict
    inclusion_violations: dict

    def to_json(self) -> str:
        return json.dumps({
            "instance": self.instance,
            "cloud_sizes": self.cloud_sizes,
            "inclusion_violations": self.inclusion_violations,
            "reports": {k: json.loads(v.to_json()) for k, v in self.reports.items()},
        }, sort_keys=True)


def compare_concepts(instance: BilevelInstance, x_grid: GridSpec,
                     y_grid: GridSpec, refinement_levels: int = 2,
                     probe: bool = True) -> ComparisonReport:
    """Run the three concept solves on shared grids and tabulate feasible-set
    sizes, minimizers, and violations of the record-inclusion chain
    eff <= bar <= weff."""
    xs = _x_grid_values(instance, x_grid)
    clouds = {c: _concept_cloud(instance, c, xs, y_grid, refinement_levels)
              for c in ("eff", "bar", "weff")}
    reports = {c: solve(instance, c, x_grid, y_grid, refinement_levels, probe,
                        _cloud=clouds[c])
               for c in ("eff", "bar", "weff")}
    steps = np.asarray([a[2] for a in x_grid.axes] + [a[2] for a in y_grid.axes])

    def missing(a: GraphCloud, b: GraphCloud) -> int:
        """Records of a with no record of b within one grid step."""
        if not a.records:
            return 0
        if not b.records:
            return len(a.records)
        pa = np.asarray([tuple(x) + tuple(y) for x, y, _ in a.records]) / steps
        pb = np.asarray([tuple(x) + tuple(y) for x, y, _ in b.records]) / steps
        from scipy.spatial import cKDTree
        dist, _ = cKDTree(pb).query(pa, p=np.inf, workers=-1)
        return int((dist > 1.0 + 1e-9).sum())

    violations = {
        "eff_not_in_bar": missing(clouds["eff"], clouds["bar"]),
        "bar_not_in_weff": missing(clouds["bar"], clouds["weff"]),
    }
    return ComparisonReport(
        instance=instance.name,
        reports=reports,
        cloud_sizes={c: len(clouds[c]) for c in clouds},
        inclusion_violations=violations)
