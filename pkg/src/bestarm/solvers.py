"""Top-level best-arm identification solvers.

Three gap-entropy-driven elimination solvers plus a classical baseline:

* ``known_complexity`` -- round-based elimination when the instance
  complexity H is supplied by the caller.
* ``entropy_elimination`` -- one complexity guess 100^t: either returns the
  best arm or rejects the guess, spending at most ~100 * 100^t planned
  samples on it.
* ``complexity_guessing`` -- tries guesses t = 1, 2, ... until one is
  accepted.
* ``baseline_successive_elimination`` -- textbook confidence-radius racing,
  for benchmarking only.

Each solver is written as a *plan* generator that suspends at every
sampling request (see :mod:`bestarm.primitives`); the public functions are
thin blocking drivers over the plans and package the result as a
:class:`RunOutcome`.  Solvers shuffle the arm order once at start from the
oracle's RNG so behaviour does not depend on storage order.

The statistical contracts hold for delta < 0.01; the implementation accepts
any delta in (0, 1) so cheaper exploratory runs are possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .instances import Instance
from .oracle import SamplingOracle
from .primitives import (
    BudgetExceededError,
    MeanRequest,
    elimination_plan,
    frac_test_plan,
    med_elim_plan,
    run_plan,
    unif_sampl_plan,
)

OK = "ok"
REJECTED = "rejected"
BUDGET_EXCEEDED = "budget_exceeded"

#: Default hard sample cap for every solver; pass ``budget=None`` to lift it.
DEFAULT_BUDGET = 10**9

#: Growth factor of the complexity guesses, and its log base 4 (the factor
#: that caps the number of rounds a guess may run).
GUESS_GROWTH = 100
C_ROUNDS = math.log(GUESS_GROWTH, 4)


@dataclass(frozen=True)
class RunOutcome:
    """Result of one solver run.

    ``arm`` is the original arm index when ``status == "ok"`` and None
    otherwise.  ``per_arm_samples`` always sums to ``total_samples``.
    ``accepted_guess_t`` is set only by the guessing solver on success.
    For budget-terminated runs ``rounds_executed`` counts completed rounds.
    """

    status: str
    arm: int | None
    total_samples: int
    per_arm_samples: tuple[int, ...]
    rounds_executed: int
    accepted_guess_t: int | None = None


@dataclass(frozen=True)
class RoundEvent:
    """One row of the structured per-round trace."""

    solver: str
    guess_t: int | None
    round_index: int
    eps: float
    n_active: int
    rejected: bool
    frac_true: bool | None
    h_estimate: float | None
    t_estimate: float | None
    theta_lo: float | None
    theta_hi: float | None
    delta_round: float | None
    delta_prime: float | None
    draws_med: int = 0
    draws_anchor: int = 0
    draws_frac: int = 0
    draws_elim: int = 0

    @property
    def draws_round(self) -> int:
        return self.draws_med + self.draws_anchor + self.draws_frac + self.draws_elim


@dataclass
class GuessState:
    """Loop state of one complexity guess."""

    t: int
    h_hat: float
    active: list[int]
    h_r: float = 0.0
    t_r: float = 0.0
    theta_prev: float = 0.3
    r: int = 0


@dataclass(frozen=True)
class SolveResult:
    """Internal plan return value, before RunOutcome packaging."""

    arm: int | None
    rounds: int
    rejected: bool = False
    accepted_t: int | None = None


# --- round schedules -------------------------------------------------------


def round_eps(r: int) -> float:
    """Accuracy target of round r."""
    return 2.0**-r


def kc_round_delta(delta: float, r: int) -> float:
    """Per-round confidence of the known-complexity solver."""
    return delta / (10.0 * r * r)


def ee_round_delta(delta: float, r: int, t: int) -> float:
    """Per-round confidence of guess t of the guessing solver."""
    return delta / (50.0 * r * r * t * t)


def theta_step(t: int, r: int) -> float:
    """Increment of the fraction-test threshold ladder at round r of guess t."""
    return (C_ROUNDS * t - r) ** -2 / 10.0


def frac_thresholds(mu_hat: float, eps: float) -> tuple[float, float]:
    """Mean band handed to the fraction test around the anchor estimate."""
    return mu_hat - 1.75 * eps, mu_hat - 1.125 * eps


def elim_thresholds(mu_hat: float, eps: float) -> tuple[float, float]:
    """Mean band handed to elimination around the anchor estimate."""
    return mu_hat - 0.75 * eps, mu_hat - 0.625 * eps


def _check_delta(delta: float) -> None:
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")


def _shuffled_arms(oracle: SamplingOracle, instance: Instance) -> list[int]:
    if oracle.n_arms != instance.n_arms:
        raise ValueError(
            f"oracle has {oracle.n_arms} arms but instance {instance.label!r} has {instance.n_arms}"
        )
    return [int(a) for a in oracle.rng.permutation(instance.n_arms)]


# --- known complexity ------------------------------------------------------


def known_complexity_plan(oracle, instance, H, delta, emit=None, _members=None):
    """Plan form of :func:`known_complexity`."""
    _check_delta(delta)
    if H <= 0.0:
        raise ValueError(f"H must be positive, got {H}")
    members = list(_members) if _members is not None else _shuffled_arms(oracle, instance)
    h_hat = 4096.0 * H
    r = 0
    while True:
        r += 1
        if len(members) == 1:
            return SolveResult(arm=members[0], rounds=r)
        n_start = len(members)
        eps_r = round_eps(r)
        delta_r = kc_round_delta(delta, r)
        mark = oracle.total

        anchor = yield from med_elim_plan(members, 0.125 * eps_r, 0.01)
        med_draws = oracle.total - mark
        mark = oracle.total
        estimates = yield from unif_sampl_plan([anchor], 0.125 * eps_r, delta_r)
        mu_hat = estimates[anchor]
        anchor_draws = oracle.total - mark

        c_lo, c_hi = frac_thresholds(mu_hat, eps_r)
        mark = oracle.total
        crowded = yield from frac_test_plan(oracle, members, c_lo, c_hi, 0.3, 0.5, delta_r)
        frac_draws = oracle.total - mark

        delta_prime = None
        elim_draws = 0
        if crowded:
            delta_prime = min(n_start * eps_r**-2 / h_hat * delta, delta)
            d_lo, d_hi = elim_thresholds(mu_hat, eps_r)
            mark = oracle.total
            survivors = yield from elimination_plan(oracle, members, d_lo, d_hi, delta_prime)
            elim_draws = oracle.total - mark
            # The anchor arm is the fallback should everything get purged.
            members = survivors if survivors else [anchor]
        if emit is not None:
            emit(
                RoundEvent(
                    solver="known_complexity",
                    guess_t=None,
                    round_index=r,
                    eps=eps_r,
                    n_active=n_start,
                    rejected=False,
                    frac_true=crowded,
                    h_estimate=None,
                    t_estimate=None,
                    theta_lo=0.3,
                    theta_hi=0.5,
                    delta_round=delta_r,
                    delta_prime=delta_prime,
                    draws_med=med_draws,
                    draws_anchor=anchor_draws,
                    draws_frac=frac_draws,
                    draws_elim=elim_draws,
                )
            )


# --- entropy elimination (one guess) ---------------------------------------


def entropy_elimination_plan(oracle, instance, delta, t, emit=None, _members=None):
    """Plan form of :func:`entropy_elimination`."""
    _check_delta(delta)
    if t < 1 or int(t) != t:
        raise ValueError(f"guess index t must be an integer >= 1, got {t}")
    members = list(_members) if _members is not None else _shuffled_arms(oracle, instance)
    state = GuessState(t=int(t), h_hat=float(GUESS_GROWTH) ** t, active=members)
    while True:
        state.r += 1
        r = state.r
        if len(state.active) == 1:
            return SolveResult(arm=state.active[0], rounds=r)
        n_start = len(state.active)
        eps_r = round_eps(r)
        delta_r = ee_round_delta(delta, r, state.t)
        weight = n_start * eps_r**-2  # |S_r| eps_r^-2
        delta_prime = 4.0 * weight / state.h_hat * delta * delta
        # Planned-sample ledger; the log factor is clamped at 1 so the
        # running total stays monotone even for far-too-small guesses.
        t_next = state.t_r + weight * max(math.log(state.h_hat / (weight * delta)), 1.0)
        if state.h_r + 4.0 * weight >= state.h_hat or t_next >= 100.0 * state.h_hat:
            if emit is not None:
                emit(
                    RoundEvent(
                        solver="entropy_elimination",
                        guess_t=state.t,
                        round_index=r,
                        eps=eps_r,
                        n_active=n_start,
                        rejected=True,
                        frac_true=None,
                        h_estimate=state.h_r,
                        t_estimate=t_next,
                        theta_lo=None,
                        theta_hi=None,
                        delta_round=delta_r,
                        delta_prime=None,
                    )
                )
            return SolveResult(arm=None, rounds=r, rejected=True)
        state.t_r = t_next

        mark = oracle.total
        anchor = yield from med_elim_plan(state.active, 0.125 * eps_r, 0.01)
        med_draws = oracle.total - mark
        mark = oracle.total
        estimates = yield from unif_sampl_plan([anchor], 0.125 * eps_r, delta_r)
        mu_hat = estimates[anchor]
        anchor_draws = oracle.total - mark

        theta_r = state.theta_prev + theta_step(state.t, r)
        c_lo, c_hi = frac_thresholds(mu_hat, eps_r)
        mark = oracle.total
        crowded = yield from frac_test_plan(
            oracle, state.active, c_lo, c_hi, state.theta_prev, theta_r, delta_r
        )
        frac_draws = oracle.total - mark

        elim_draws = 0
        if crowded:
            state.h_r += 4.0 * weight
            d_lo, d_hi = elim_thresholds(mu_hat, eps_r)
            mark = oracle.total
            survivors = yield from elimination_plan(
                oracle, state.active, d_lo, d_hi, delta_prime
            )
            elim_draws = oracle.total - mark
            state.active = survivors if survivors else [anchor]
        if emit is not None:
            emit(
                RoundEvent(
                    solver="entropy_elimination",
                    guess_t=state.t,
                    round_index=r,
                    eps=eps_r,
                    n_active=n_start,
                    rejected=False,
                    frac_true=crowded,
                    h_estimate=state.h_r,
                    t_estimate=state.t_r,
                    theta_lo=state.theta_prev,
                    theta_hi=theta_r,
                    delta_round=delta_r,
                    delta_prime=delta_prime if crowded else None,
                    draws_med=med_draws,
                    draws_anchor=anchor_draws,
                    draws_frac=frac_draws,
                    draws_elim=elim_draws,
                )
            )
        state.theta_prev = theta_r


# --- complexity guessing ----------------------------------------------------


def complexity_guessing_plan(oracle, instance, delta, emit=None):
    """Plan form of :func:`complexity_guessing`."""
    _check_delta(delta)
    members = _shuffled_arms(oracle, instance)
    rounds = 0
    t = 0
    while True:
        t += 1
        result = yield from entropy_elimination_plan(
            oracle, instance, delta, t, emit=emit, _members=members
        )
        rounds += result.rounds
        if not result.rejected:
            return SolveResult(arm=result.arm, rounds=rounds, accepted_t=t)


# --- baseline ----------------------------------------------------------------


def se_radius(r: int, n_arms: int, delta: float) -> float:
    """Confidence radius of the baseline after r draws per surviving arm."""
    return math.sqrt(2.0 * math.log(4.0 * n_arms * r * r / delta) / r)


def baseline_successive_elimination_plan(oracle, instance, delta, emit=None):
    """Plan form of :func:`baseline_successive_elimination`."""
    _check_delta(delta)
    members = _shuffled_arms(oracle, instance)
    n = instance.n_arms
    sums = {arm: 0.0 for arm in members}
    active = members
    r = 0
    while len(active) > 1:
        r += 1
        for arm in active:
            sums[arm] += yield MeanRequest(arm, 1)
        radius = se_radius(r, n, delta)
        means = {arm: sums[arm] / r for arm in active}
        best_lcb = max(means[arm] - radius for arm in active)
        active = [arm for arm in active if means[arm] + radius >= best_lcb]
    return SolveResult(arm=active[0], rounds=r)


# --- public drivers -----------------------------------------------------------


def _execute(plan_factory: Callable[[list], object], oracle: SamplingOracle, budget) -> RunOutcome:
    before = oracle.snapshot()
    events: list[RoundEvent] = []
    try:
        result = run_plan(plan_factory(events), oracle, budget=budget)
    except BudgetExceededError:
        spent = oracle.snapshot() - before
        return RunOutcome(
            status=BUDGET_EXCEEDED,
            arm=None,
            total_samples=int(spent.sum()),
            per_arm_samples=tuple(int(c) for c in spent),
            rounds_executed=len(events),
        )
    spent = oracle.snapshot() - before
    return RunOutcome(
        status=REJECTED if result.rejected else OK,
        arm=result.arm,
        total_samples=int(spent.sum()),
        per_arm_samples=tuple(int(c) for c in spent),
        rounds_executed=result.rounds,
        accepted_guess_t=result.accepted_t,
    )


def _compose_emit(events: list, trace) -> Callable:
    if trace is None:
        return events.append

    def emit(event: RoundEvent) -> None:
        events.append(event)
        trace(event)

    return emit


def known_complexity(
    oracle: SamplingOracle,
    instance: Instance,
    H: float,
    delta: float,
    *,
    budget: int | None = DEFAULT_BUDGET,
    trace=None,
) -> RunOutcome:
    """Identify the best arm given the instance complexity H.

    Runs rounds r = 1, 2, ... at accuracy 2^-r: a median-elimination pass
    picks an anchor arm, its mean is estimated, and when the fraction test
    reports that a (0.3, 0.5) fraction of arms sit well below the anchor an
    elimination pass purges them at confidence scaled by 4096 H.  Returns
    the last survivor; correct with probability >= 1 - delta for
    delta < 0.01.
    """
    return _execute(
        lambda events: known_complexity_plan(
            oracle, instance, H, delta, emit=_compose_emit(events, trace)
        ),
        oracle,
        budget,
    )


def entropy_elimination(
    oracle: SamplingOracle,
    instance: Instance,
    delta: float,
    t: int,
    *,
    budget: int | None = DEFAULT_BUDGET,
    trace=None,
) -> RunOutcome:
    """Run one complexity guess 100^t; returns the best arm or rejects.

    The guess is rejected -- before any sampling in that round -- once the
    running eliminated-complexity estimate or the planned-sample ledger
    outgrows the guess.
    """
    return _execute(
        lambda events: entropy_elimination_plan(
            oracle, instance, delta, t, emit=_compose_emit(events, trace)
        ),
        oracle,
        budget,
    )


def complexity_guessing(
    oracle: SamplingOracle,
    instance: Instance,
    delta: float,
    *,
    budget: int | None = DEFAULT_BUDGET,
    trace=None,
) -> RunOutcome:
    """Identify the best arm without knowing the instance complexity.

    Tries guesses 100^1, 100^2, ... until one is accepted; samples from
    rejected guesses accumulate into the outcome.  Correct with probability
    >= 1 - delta for delta < 0.01.
    """
    return _execute(
        lambda events: complexity_guessing_plan(
            oracle, instance, delta, emit=_compose_emit(events, trace)
        ),
        oracle,
        budget,
    )


def baseline_successive_elimination(
    oracle: SamplingOracle,
    instance: Instance,
    delta: float,
    *,
    budget: int | None = DEFAULT_BUDGET,
) -> RunOutcome:
    """Classical successive elimination, as a benchmarking baseline.

    Draws one sample per surviving arm per round; after r rounds an arm is
    dropped when its mean estimate plus the radius sqrt(2 ln(4 n r^2 /
    delta) / r) falls below another arm's estimate minus that radius.
    """
    return _execute(
        lambda events: baseline_successive_elimination_plan(oracle, instance, delta),
        oracle,
        budget,
    )
