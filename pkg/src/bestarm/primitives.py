"""Reusable sampling subroutines: uniform sampling, median elimination,
fraction testing and batch elimination.

Every subroutine exists in two forms: a *plan* generator that yields
sampling requests (so callers may suspend execution at each draw batch) and
an eager function that drives the plan against an oracle directly.  Plans
receive the oracle only for its RNG stream and counters; all reward draws
flow through the yielded requests, which is what lets an outer scheduler
interleave several runs.

Ties are broken toward the arm listed first, so callers control tie order
through the member sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Estimates keyed by arm id, exactly the queried set.
EstimateMap = dict[int, float]


class BudgetExceededError(RuntimeError):
    """Raised by plan drivers when the next request would cross the sample cap."""


@dataclass(frozen=True)
class MeanRequest:
    """Ask for the empirical mean of ``draws`` fresh rewards from one arm."""

    arm: int
    draws: int

    @property
    def cost(self) -> int:
        return self.draws

    def fulfill(self, oracle) -> float:
        return oracle.sample_mean(self.arm, self.draws)


@dataclass(frozen=True)
class TallyRequest:
    """Ask how many of ``probes`` independent mean-of-``draws`` estimates
    from one arm fall strictly below ``cutoff``."""

    arm: int
    draws: int
    probes: int
    cutoff: float

    @property
    def cost(self) -> int:
        return self.draws * self.probes

    def fulfill(self, oracle) -> int:
        return oracle.count_means_below(self.arm, self.draws, self.probes, self.cutoff)


def run_plan(plan, oracle, budget: int | None = None):
    """Drive a sampling plan to completion against an oracle.

    If fulfilling the next request would push the oracle's total past
    ``budget``, the plan is closed and BudgetExceededError raised; the
    crossing request is never drawn.
    """
    reply = None
    while True:
        try:
            request = plan.send(reply)
        except StopIteration as stop:
            return stop.value
        if budget is not None and oracle.total + request.cost > budget:
            plan.close()
            raise BudgetExceededError(
                f"next request ({request.cost} draws) would exceed the cap of {budget}"
            )
        reply = request.fulfill(oracle)


def _count(value: float) -> int:
    # Ceiling with a tiny backoff so formulas that are exact integers in
    # real arithmetic do not round up on a one-ulp float excess.
    return int(math.ceil(value - 1e-9))


def unif_sample_size(eps: float, delta: float) -> int:
    """Per-arm draw count of uniform sampling: ceil(2 eps^-2 ln(2/delta))."""
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return _count(2.0 * eps**-2 * math.log(2.0 / delta))


def _check_members(members) -> list[int]:
    members = list(members)
    if not members:
        raise ValueError("arm set must not be empty")
    return members


def unif_sampl_plan(members, eps: float, delta: float):
    """Plan form of :func:`unif_sampl`."""
    members = _check_members(members)
    draws = unif_sample_size(eps, delta)
    estimates: EstimateMap = {}
    for arm in members:
        estimates[arm] = yield MeanRequest(arm, draws)
    return estimates


def unif_sampl(oracle, members, eps: float, delta: float) -> EstimateMap:
    """Sample every arm in ``members`` ceil(2 eps^-2 ln(2/delta)) times.

    Returns each arm's empirical mean; with probability 1 - delta a given
    arm's estimate is within eps of its true mean.
    """
    return run_plan(unif_sampl_plan(members, eps, delta), oracle)


def med_elim_plan(members, eps: float, delta: float):
    """Plan form of :func:`med_elim`."""
    members = _check_members(members)
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    active = list(members)
    eps_l = eps / 4.0
    delta_l = delta / 2.0
    while len(active) > 1:
        draws = _count(2.0 * (eps_l / 2.0) ** -2 * math.log(3.0 / delta_l))
        estimates: EstimateMap = {}
        for arm in active:
            estimates[arm] = yield MeanRequest(arm, draws)
        keep = (len(active) + 1) // 2
        # Stable sort: ties keep the earlier-listed arm in front.
        active = sorted(active, key=lambda a: -estimates[a])[:keep]
        eps_l *= 0.75
        delta_l /= 2.0
    return active[0]


def med_elim(oracle, members, eps: float, delta: float) -> int:
    """Median-elimination tournament returning an eps-optimal arm w.p. >= 1 - delta.

    Halves the field each round (keeping the ceil(|S|/2) arms with the
    highest empirical means) on the schedule eps_1 = eps/4, delta_1 =
    delta/2, eps_{l+1} = 0.75 eps_l, delta_{l+1} = delta_l / 2, with
    ceil(2 (eps_l/2)^-2 ln(3/delta_l)) draws per surviving arm per round.
    A singleton input is returned without sampling.
    """
    return run_plan(med_elim_plan(members, eps, delta), oracle)


def frac_test_probe_counts(c_lo, c_hi, theta_lo, theta_hi, delta) -> tuple[int, int]:
    """(number of probes m, draws per probe) used by the fraction test."""
    if not c_lo < c_hi:
        raise ValueError(f"need c_lo < c_hi, got {c_lo} >= {c_hi}")
    if not theta_lo < theta_hi:
        raise ValueError(f"need theta_lo < theta_hi, got {theta_lo} >= {theta_hi}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    spread = theta_hi - theta_lo
    probes = _count((spread / 6.0) ** -2 * math.log(2.0 / delta))
    per_probe = unif_sample_size((c_hi - c_lo) / 2.0, spread / 6.0)
    return probes, per_probe


def frac_test_plan(oracle, members, c_lo, c_hi, theta_lo, theta_hi, delta):
    """Plan form of :func:`frac_test`.

    Uses ``oracle.rng`` for the uniform arm picks; rewards flow through the
    yielded requests.
    """
    members = _check_members(members)
    probes, per_probe = frac_test_probe_counts(c_lo, c_hi, theta_lo, theta_hi, delta)
    cutoff = (c_lo + c_hi) / 2.0
    # Multinomial pick counts have exactly the law of `probes` uniform picks.
    picks = oracle.rng.multinomial(probes, np.full(len(members), 1.0 / len(members)))
    below = 0
    for arm, n_picked in zip(members, picks):
        if n_picked:
            below += yield TallyRequest(arm, per_probe, int(n_picked), cutoff)
    return below / probes > (theta_lo + theta_hi) / 2.0


def frac_test(oracle, members, c_lo, c_hi, theta_lo, theta_hi, delta) -> bool:
    """Randomized check whether a large fraction of arms have small means.

    Performs m = ceil((spread/6)^-2 ln(2/delta)) probes, spread = theta_hi -
    theta_lo.  Each probe picks an arm uniformly at random, estimates its
    mean to (c_hi - c_lo)/2 accuracy at confidence spread/6, and counts the
    estimate if it falls below the midpoint of (c_lo, c_hi).  Returns True
    iff the counted fraction exceeds the midpoint of (theta_lo, theta_hi).

    With probability 1 - delta: a True answer implies more than a theta_lo
    fraction of arms lie below c_hi, and a False answer implies fewer than a
    theta_hi fraction lie below c_lo.
    """
    return run_plan(frac_test_plan(oracle, members, c_lo, c_hi, theta_lo, theta_hi, delta), oracle)


def elimination_plan(oracle, members, d_lo: float, d_hi: float, delta: float):
    """Plan form of :func:`elimination`."""
    members = _check_members(members)
    if not d_lo < d_hi:
        raise ValueError(f"need d_lo < d_hi, got {d_lo} >= {d_hi}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    d_mid = (d_lo + d_hi) / 2.0
    keep_above = (d_mid + d_hi) / 2.0
    active = list(members)
    round_idx = 0
    while active:
        round_idx += 1
        delta_r = delta / (10.0 * 2.0**round_idx)
        crowded = yield from frac_test_plan(oracle, active, d_lo, d_mid, 0.05, 0.1, delta_r)
        if not crowded:
            return active
        estimates = yield from unif_sampl_plan(active, (d_hi - d_mid) / 2.0, delta_r)
        active = [arm for arm in active if estimates[arm] > keep_above]
    return active


def elimination(oracle, members, d_lo: float, d_hi: float, delta: float) -> list[int]:
    """Repeatedly purge arms whose means sit below the (d_lo, d_hi) band.

    Each pass runs a fraction test at thresholds (0.05, 0.1) on the lower
    half-band; while it reports a crowd of low arms, every survivor is
    re-estimated and arms at or below the upper quarter-point are dropped.
    Arms with means >= d_hi survive with probability >= 1 - delta/2, and
    with probability >= 1 - delta/2 at most a 0.1 fraction of the output
    sits below d_lo.
    """
    return run_plan(elimination_plan(oracle, members, d_lo, d_hi, delta), oracle)
