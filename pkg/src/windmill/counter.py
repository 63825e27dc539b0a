"""Approximate counting of Z_0 by self-reducibility over sampled marginals.

Edges are pinned one at a time in index order.  At each stage the chain on
Omega_0 u Omega_2 is sampled, Omega_2 samples are rejected, and the
Omega_0-conditional probability of the majority value of the current edge
is estimated.  The edge is pinned to that value and the next stage starts
from a retained sample that agrees with the pin.  The product of the
inverse marginals times the weight of the fully pinned instance
estimates Z_0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Sequence

import numpy as np

from .holant import (
    MAX_ENUM_HALF_EDGES,
    HolantInstance,
    b_edge_cover_instance,
    b_matching_instance,
    brute_Z_all,
    find_feasible_assignment,
    pin_edge,
    weight,
    weighted_transform,
)
from .mcmc import default_burn_in, make_rng, run_chains
from .symfunc import as_fraction
from .windability import is_windable

__all__ = [
    "CountJob",
    "CountEstimate",
    "Schedule",
    "PreconditionReport",
    "PreconditionError",
    "EstimationError",
    "desk_schedule",
    "theory_schedule",
    "check_preconditions",
    "estimate_Z0",
    "exact_marginals",
    "count_b_matching",
    "count_b_edge_cover",
    "MAX_MATCHING_B",
    "MAX_EDGE_COVER_B",
]

MAX_MATCHING_B = 7
MAX_EDGE_COVER_B = 2
_RATIO_CHECK_HALF_EDGES = 20


class PreconditionError(ValueError):
    pass


class EstimationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Schedule:
    """How many chain steps and samples each telescoping stage uses.

    ``omega0_target`` makes the stage adaptive: rounds of ``samples`` draws
    repeat until that many Omega_0 samples were kept or ``max_rounds`` is hit.
    With ``omega0_target = 0`` exactly one round of ``samples`` draws is made.
    """

    burn_in: int
    thin: int
    samples: int
    chains: int = 8
    omega0_target: int = 0
    max_rounds: int = 64
    name: str = "custom"


def desk_schedule(inst: HolantInstance, epsilon: Fraction, samples: int | None = None, burn_in: int | None = None) -> Schedule:
    """Small-instance schedule sized for relative error ``epsilon`` in practice.

    Each stage keeps about ``6 m / epsilon^2`` Omega_0 samples, which bounds
    the summed relative variance of ``m`` majority marginals (each >= 1/2) by
    roughly ``(epsilon/2)^2``.  Thinning and burn-in scale with ``n^2`` for
    ``n`` half-edges, the inverse of the per-step move probability.
    """
    m = max(inst.n_edges, 1)
    n = max(inst.n_half_edges, 2)
    eps = float(epsilon)
    target = math.ceil(6 * m / eps**2)
    chains = 8
    thin = max(4, n * n // 4)
    per_round = samples if samples is not None else max(chains, target // 2)
    return Schedule(
        burn_in=burn_in if burn_in is not None else 4 * n * n,
        thin=thin,
        samples=per_round,
        chains=chains,
        omega0_target=0 if samples is not None else target,
        name="desk",
    )


def theory_schedule(inst: HolantInstance, epsilon: Fraction, delta: Fraction, samples: int | None = None, burn_in: int | None = None) -> Schedule:
    """``ceil(64 m^2/eps^2 ln(4m/delta))`` samples per stage, each after a full burn-in."""
    m = max(inst.n_edges, 1)
    eps, dl = float(epsilon), float(delta)
    s = samples if samples is not None else math.ceil(64 * m * m / eps**2 * math.log(4 * m / dl))
    b = burn_in if burn_in is not None else default_burn_in(inst)
    return Schedule(burn_in=b, thin=b, samples=s, chains=8, omega0_target=0, name="theory")


@dataclass(frozen=True)
class CountJob:
    instance: HolantInstance
    epsilon: Fraction = Fraction(1, 10)
    delta: Fraction = Fraction(1, 20)
    seed: int = 0
    samples_per_ratio: int | None = None
    burn_in: int | None = None
    schedule: str = "desk"

    def __post_init__(self):
        eps = as_fraction(self.epsilon) if not isinstance(self.epsilon, float) else Fraction(self.epsilon)
        dl = as_fraction(self.delta) if not isinstance(self.delta, float) else Fraction(self.delta)
        if eps <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < dl < 1:
            raise ValueError("delta must lie in (0, 1)")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.schedule not in ("desk", "theory"):
            raise ValueError(f"unknown schedule {self.schedule!r}")
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", dl)

    def resolved_schedule(self) -> Schedule:
        if self.schedule == "theory":
            return theory_schedule(self.instance, self.epsilon, self.delta, self.samples_per_ratio, self.burn_in)
        return desk_schedule(self.instance, self.epsilon, self.samples_per_ratio, self.burn_in)


@dataclass(frozen=True)
class CountEstimate:
    estimate: Fraction
    log_estimate: Decimal | None
    per_edge_marginals: tuple[dict, ...]
    meta: dict = field(default_factory=dict)

    def to_json(self, epsilon=None, delta=None, oracle: Fraction | None = None) -> dict:
        out = {
            "estimate": str(self.estimate),
            "estimate_decimal": f"{float(self.estimate):.10g}",
            "log_estimate": None if self.log_estimate is None else str(self.log_estimate),
            "epsilon": None if epsilon is None else str(epsilon),
            "delta": None if delta is None else str(delta),
            "seed": self.meta.get("seed"),
            "marginals": [
                {"edge": r["edge"], "pinned_value": r["pinned_value"], "estimated_p": str(r["estimated_p"]),
                 "omega0_samples": r.get("omega0_samples")}
                for r in self.per_edge_marginals
            ],
            "meta": {k: self.meta[k] for k in sorted(self.meta)},
        }
        if oracle is not None:
            out["oracle"] = str(oracle)
            out["relative_error"] = f"{abs(float(self.estimate / oracle) - 1):.6g}" if oracle else None
        return out


@dataclass(frozen=True)
class PreconditionReport:
    ok: bool
    failures: tuple[dict, ...]
    start: tuple[int, ...] | None
    ratio: Fraction | None = None
    ratio_bound: Fraction | None = None

    def message(self) -> str:
        if self.ok:
            return "ok"
        parts = [f"vertex {f['vertex']!r} carries non-windable {f['function']} (first failing pinning {f['counterexample']})"
                 if "function" in f else f["reason"] for f in self.failures]
        return "; ".join(parts)


def check_preconditions(inst: HolantInstance, ratio_bound: Fraction | None = None) -> PreconditionReport:
    """Windability of every vertex function, a positive start, optional ratio check.

    ``ratio_bound`` is checked against the exact ``Z_2/Z_0`` when the
    instance is small enough to enumerate.
    """
    failures = []
    seen: dict = {}
    for vid, f in zip(inst.vertex_ids, inst.functions):
        if f.arity == 0:
            continue
        if f not in seen:
            seen[f] = is_windable(f)
        rep = seen[f]
        if not rep.windable:
            failures.append({"vertex": vid, "function": str(f), "counterexample": rep.counterexample})
    start = find_feasible_assignment(inst)
    if start is None:
        failures.append({"reason": "no positive-weight consistent start assignment"})
    ratio = None
    if not failures and ratio_bound is not None and inst.n_half_edges <= _RATIO_CHECK_HALF_EDGES:
        Z = brute_Z_all(inst)
        ratio = Z.get(2, Fraction(0)) / Z[0]
        if ratio > ratio_bound:
            failures.append({"reason": f"Z2/Z0 = {ratio} exceeds the bound {ratio_bound}"})
    return PreconditionReport(not failures, tuple(failures), start, ratio, ratio_bound)


def exact_marginals(inst: HolantInstance, edge_index: int = 0) -> tuple[int, Fraction]:
    """Majority value of an edge under the exact Omega_0 measure, and its probability."""
    if inst.n_half_edges > MAX_ENUM_HALF_EDGES:
        raise ValueError("instance too large for exact marginals")
    z = brute_Z_all(inst)[0]
    if z == 0:
        raise EstimationError("Z0 of the pinned instance is zero")
    z1 = brute_Z_all(pin_edge(inst, edge_index, 1))[0]
    p1 = z1 / z
    return (1, p1) if p1 > Fraction(1, 2) else (0, 1 - p1)


def _log_decimal(x: Fraction) -> Decimal | None:
    if x <= 0:
        return None
    with localcontext() as ctx:
        ctx.prec = 50
        return (Decimal(x.numerator).ln() - Decimal(x.denominator).ln()).normalize()


def _sample_stage(inst, state, sched: Schedule, seed: int, stage: int):
    """Omega_0 samples for one stage.  Returns (omega0_bits, drawn, steps)."""
    C = sched.chains
    rngs = [make_rng(seed, stage, c) for c in range(C)]
    starts = np.tile(np.array(state, dtype=np.uint8), (C, 1))
    per_chain = max(1, -(-sched.samples // C))
    kept = []
    drawn = 0
    steps = 0
    n0 = 0
    bits = starts
    for rnd in range(sched.max_rounds):
        burn = sched.burn_in if rnd == 0 else 0
        n_steps = burn + per_chain * sched.thin
        bits, rec = run_chains(inst, bits, n_steps, rngs, record_from=burn, thin=sched.thin, n_records=per_chain)
        steps += n_steps * C
        rec = rec.reshape(-1, inst.n_half_edges)
        drawn += rec.shape[0]
        ok = np.all(rec[:, 0::2] == rec[:, 1::2], axis=1)
        kept.append(rec[ok])
        n0 += int(ok.sum())
        if n0 >= sched.omega0_target:
            break
    return np.concatenate(kept, axis=0), drawn, steps


def estimate_Z0(job: CountJob, marginals: str = "mcmc", check: bool = True) -> CountEstimate:
    """Telescoping estimate of Z_0.

    ``marginals="exact"`` replaces the sampler by exact Omega_0 marginals from
    brute-force enumeration, which makes the estimate equal Z_0 exactly.
    """
    inst = job.instance
    if marginals not in ("mcmc", "exact"):
        raise ValueError(f"unknown marginal source {marginals!r}")
    if check:
        rep = check_preconditions(inst)
        if not rep.ok:
            raise PreconditionError(rep.message())
        state = rep.start
    else:
        state = find_feasible_assignment(inst)
        if state is None:
            raise PreconditionError("no positive-weight consistent start assignment")
    sched = job.resolved_schedule() if marginals == "mcmc" else None
    current = inst
    product = Fraction(1)
    records = []
    total_steps = 0
    drawn_total = 0
    kept_total = 0
    for e in range(inst.n_edges):
        if marginals == "exact":
            s, p = exact_marginals(current, 0)
            n0 = None
            nxt_state = None
        else:
            omega0, drawn, steps = _sample_stage(current, state, sched, int(job.seed), e)
            total_steps += steps
            drawn_total += drawn
            n0 = omega0.shape[0]
            kept_total += n0
            if n0 == 0:
                raise EstimationError(
                    f"every one of {drawn} samples at edge {e} fell in Omega_2; raise the burn-in or the sample count"
                )
            ones = int(omega0[:, 0].sum())
            s = 1 if 2 * ones > n0 else 0
            count = ones if s == 1 else n0 - ones
            p = Fraction(count, n0)
            agree = omega0[omega0[:, 0] == s]
            nxt_state = tuple(int(b) for b in agree[0, 2:])
        if p < Fraction(1, 4):
            raise EstimationError(f"majority marginal {p} at edge {e} is below 1/4")
        records.append({"edge": e, "pinned_value": s, "estimated_p": p, "omega0_samples": n0})
        product *= p
        current = pin_edge(current, 0, s)
        state = nxt_state
    final_w = weight(current, ())
    estimate = final_w / product
    meta = {
        "seed": int(job.seed),
        "total_steps": total_steps,
        "rejected_omega2_fraction": str(Fraction(drawn_total - kept_total, drawn_total)) if drawn_total else "0",
        "marginals": marginals,
    }
    if sched is not None:
        meta["schedule"] = {"name": sched.name, "burn_in": sched.burn_in, "thin": sched.thin,
                            "samples": sched.samples, "chains": sched.chains,
                            "omega0_target": sched.omega0_target}
    return CountEstimate(estimate, _log_decimal(estimate), tuple(records), meta)


def _normalise_edges(graph) -> tuple[list[tuple], list | None]:
    if isinstance(graph, dict):
        return [tuple(e) for e in graph["edges"]], [r["id"] if isinstance(r, dict) else r for r in graph.get("vertices", [])] or None
    return [tuple(e) for e in graph], None


def _run(inst, weights, epsilon, delta, seed, marginals, samples, burn_in, schedule) -> CountEstimate:
    if weights is not None:
        inst = weighted_transform(inst, weights)
    job = CountJob(inst, epsilon, delta, seed, samples, burn_in, schedule)
    return estimate_Z0(job, marginals=marginals)


def count_b_matching(graph, b: int, weights: Sequence | None = None, epsilon=Fraction(1, 10),
                     delta=Fraction(1, 20), seed: int = 0, *, marginals: str = "mcmc",
                     samples: int | None = None, burn_in: int | None = None,
                     schedule: str = "desk") -> CountEstimate:
    """Estimate the (weighted) number of b-matchings.

    ``graph`` is an edge list or a graph record with ``edges`` and optional
    ``vertices``.
    """
    if b < 0:
        raise ValueError("b must be nonnegative")
    if b > MAX_MATCHING_B:
        raise PreconditionError(
            f"b={b}: the at-most-{b} function is not windable at arity >= {b + 3}, "
            f"so the sampler has no guarantee; b-matching counting is supported for b <= {MAX_MATCHING_B}"
        )
    edges, vertices = _normalise_edges(graph)
    inst = b_matching_instance(edges, b, vertices)
    return _run(inst, weights, epsilon, delta, seed, marginals, samples, burn_in, schedule)


def count_b_edge_cover(graph, b: int, weights: Sequence | None = None, epsilon=Fraction(1, 10),
                       delta=Fraction(1, 20), seed: int = 0, *, marginals: str = "mcmc",
                       samples: int | None = None, burn_in: int | None = None,
                       schedule: str = "desk") -> CountEstimate:
    """Estimate the (weighted) number of b-edge-covers; 0 exactly when some degree is below b."""
    if b < 0:
        raise ValueError("b must be nonnegative")
    if b > MAX_EDGE_COVER_B:
        raise PreconditionError(
            f"b={b}: the at-least-{b} function is not windable at arity >= {b + 8}, "
            f"so the sampler has no guarantee; b-edge-cover counting is supported for b <= {MAX_EDGE_COVER_B}"
        )
    edges, vertices = _normalise_edges(graph)
    inst = b_edge_cover_instance(edges, b, vertices)
    if any(f.arity < b for f in inst.functions):
        return CountEstimate(Fraction(0), None, (), {"seed": int(seed), "total_steps": 0,
                                                    "rejected_omega2_fraction": "0",
                                                    "marginals": "none", "reason": "minimum degree below b"})
    return _run(inst, weights, epsilon, delta, seed, marginals, samples, burn_in, schedule)
