"""Exact multi-shot success probabilities for three discrimination strategies.

All strategies get n+1 uses of the unknown channel (equal priors on the two
hypotheses) and guess which channel it was from the measurement record.

* global: one collective measurement on all n+1 outputs jointly. The
  benchmark; built from the sign partition of the eigensystem of the
  tensor-product difference operator.
* bayesian: one measurement per shot, each chosen from the posterior over
  the full outcome history.
* markovian: one measurement per shot, chosen from weights conditioned on
  the immediately preceding outcome only; histories are marginalized, so
  evaluation is linear in the shot count.

``eval_*`` return the full measurement tree; the ``*_value`` variants
compute only the success probability and are cheap enough to sit inside an
optimizer loop.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .channels import ChannelSpec, output_entries
from .helstrom import Povm, PovmCase, _build_povm, success_and_traces

__all__ = [
    "BAYES_SHOT_CAP",
    "GLOBAL_SHOT_CAP",
    "InputSchedule",
    "ScheduleError",
    "StrategyEval",
    "StrategyKind",
    "bayesian_value",
    "eval_bayesian",
    "eval_global",
    "eval_markovian",
    "global_value",
    "markovian_value",
    "simulate_protocol",
    "strategy_value",
]

GLOBAL_SHOT_CAP = 10
BAYES_SHOT_CAP = 14


class StrategyKind(str, enum.Enum):
    GLOBAL = "global"
    BAYESIAN = "bayesian"
    MARKOVIAN = "markovian"


class ScheduleError(ValueError):
    """Input schedule shape does not fit the strategy or shot count."""


class ScheduleMode(str, enum.Enum):
    FLAT = "flat"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class InputSchedule:
    """Input-state parameters r for each shot.

    Flat mode carries one r per shot. Adaptive mode carries one r per
    outcome-history node: level k (0-based) holds the values for shot k+1,
    either 2^k entries (full history tree, consumed by the Bayesian
    strategy) or a single entry at level 0 and two per later level (last
    outcome only, consumed by the Markovian strategy). The phase is one
    shared value, zero by default.
    """

    mode: ScheduleMode
    levels: tuple
    phi: float = 0.0

    @classmethod
    def flat(cls, r_values, phi: float = 0.0) -> "InputSchedule":
        vals = tuple(float(r) for r in r_values)
        if not vals:
            raise ScheduleError("schedule needs at least one shot")
        for r in vals:
            _check_r(r)
        return cls(ScheduleMode.FLAT, vals, phi)

    @classmethod
    def adaptive(cls, levels, phi: float = 0.0) -> "InputSchedule":
        lv = tuple(tuple(float(r) for r in level) for level in levels)
        if not lv:
            raise ScheduleError("schedule needs at least one shot")
        if len(lv[0]) != 1:
            raise ScheduleError("adaptive level 0 must hold exactly one value")
        for level in lv:
            for r in level:
                _check_r(r)
        return cls(ScheduleMode.ADAPTIVE, lv, phi)

    @property
    def shots(self) -> int:
        return len(self.levels)


def _check_r(r: float):
    if not 0.0 <= r <= 1.0:
        raise ScheduleError(f"r must be in [0, 1], got {r}")


@dataclass(frozen=True)
class StrategyEval:
    """Success probability plus the measurement tree that produced it.

    ``povm_tree`` keys: outcome-history tuples for the Bayesian strategy
    (root is the empty tuple), ``(shot, previous_bit)`` pairs for the
    Markovian strategy (shot 1 keyed ``(1, None)``), and the single label
    ``"global"`` for the collective measurement. ``posteriors`` maps the
    same keys to the weight placed on hypothesis 0 at that node.
    """

    p_succ: float
    povm_tree: dict = field(repr=False)
    posteriors: dict = field(repr=False)


def _require_pair(eta0: ChannelSpec, eta1: ChannelSpec):
    if eta0.family is not eta1.family:
        raise ValueError(
            f"channel families differ: {eta0.family.value} vs {eta1.family.value}"
        )


def _check_schedule(sched: InputSchedule, kind: StrategyKind):
    if sched.mode is ScheduleMode.FLAT:
        return
    if kind is StrategyKind.GLOBAL:
        raise ScheduleError("global strategy takes a flat schedule")
    for k, level in enumerate(sched.levels):
        want = 2**k if kind is StrategyKind.BAYESIAN else min(2**k, 2)
        if len(level) != want:
            raise ScheduleError(
                f"adaptive level {k} holds {len(level)} values, "
                f"{kind.value} needs {want}"
            )


def _matrix(s) -> np.ndarray:
    return np.array([[s[0], s[2]], [s[2].conjugate(), s[1]]], dtype=complex)


def _flat_pairs(eta0, eta1, sched):
    return [
        (output_entries(eta0, r, sched.phi), output_entries(eta1, r, sched.phi))
        for r in sched.levels
    ]


# ---------------------------------------------------------------------------
# global strategy


def _kron_chain(mats):
    out = mats[0]
    for m in mats[1:]:
        n = out.shape[0]
        out = (out[:, None, :, None] * m[None, :, None, :]).reshape(2 * n, 2 * n)
    return out


def _global_products(eta0, eta1, sched):
    pairs = _flat_pairs(eta0, eta1, sched)
    # phi = 0 keeps every entry real; the real eigensolver is much faster.
    if sched.phi == 0.0:
        def mat(s):
            return np.array([[s[0], s[2].real], [s[2].real, s[1]]])
    else:
        mat = _matrix
    r0 = _kron_chain([mat(s0) for s0, _ in pairs])
    r1 = _kron_chain([mat(s1) for _, s1 in pairs])
    return r0, r1


def _check_global(eta0, eta1, sched):
    _require_pair(eta0, eta1)
    _check_schedule(sched, StrategyKind.GLOBAL)
    if sched.shots > GLOBAL_SHOT_CAP:
        raise ValueError(
            f"global strategy capped at {GLOBAL_SHOT_CAP} shots, got {sched.shots}"
        )


def eval_global(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> StrategyEval:
    """Collective measurement on all shots jointly."""
    _check_global(eta0, eta1, sched)
    r0, r1 = _global_products(eta0, eta1, sched)
    delta = 0.5 * (r0 - r1)
    vals, vecs = np.linalg.eigh(delta)
    mask = vals >= 0.0
    dim = delta.shape[0]
    eye = np.eye(dim, dtype=delta.dtype)
    if mask.all():
        pi0, tag = eye, PovmCase.ALWAYS_GUESS_0
    elif not mask.any():
        pi0, tag = np.zeros((dim, dim), dtype=delta.dtype), PovmCase.ALWAYS_GUESS_1
    else:
        kept = vecs[:, mask]
        pi0, tag = kept @ kept.conj().T, PovmCase.PROJECTIVE
    pi1 = eye - pi0
    p = 0.5 * float((np.trace(r0 @ pi0) + np.trace(r1 @ pi1)).real)
    return StrategyEval(p, {"global": Povm(pi0, pi1, tag)}, {"global": 0.5})


def global_value(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> float:
    """Success probability of the collective measurement, eigenvalues only."""
    _check_global(eta0, eta1, sched)
    r0, r1 = _global_products(eta0, eta1, sched)
    vals = np.linalg.eigvalsh(0.5 * (r0 - r1))
    return 0.5 + float(vals[vals >= 0.0].sum())


# ---------------------------------------------------------------------------
# bayesian strategy


def _check_bayes(eta0, eta1, sched):
    _require_pair(eta0, eta1)
    _check_schedule(sched, StrategyKind.BAYESIAN)
    if sched.shots > BAYES_SHOT_CAP:
        raise ValueError(
            f"bayesian strategy capped at {BAYES_SHOT_CAP} shots, got {sched.shots}"
        )


def eval_bayesian(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> StrategyEval:
    """Full-history feedforward: one measurement node per outcome history.

    Walks the outcome tree depth first. Each node reweights the hypotheses
    by the likelihood of its history, takes the optimal one-shot
    measurement at that weight, and the leaves accumulate the probability
    that the final outcome names the true channel.
    """
    _check_bayes(eta0, eta1, sched)
    shots = sched.shots
    flat = sched.mode is ScheduleMode.FLAT
    pairs = _flat_pairs(eta0, eta1, sched) if flat else None
    tree: dict = {}
    posts: dict = {}
    total = 0.0
    stack = [((), 1.0, 1.0)]
    while stack:
        hist, l0, l1 = stack.pop()
        tot = l0 + l1
        if tot <= 0.0:
            continue
        k = len(hist)
        if flat:
            s0, s1 = pairs[k]
        else:
            idx = 0
            for b in hist:
                idx = (idx << 1) | b
            r = sched.levels[k][idx]
            s0 = output_entries(eta0, r, sched.phi)
            s1 = output_entries(eta1, r, sched.phi)
        p0 = l0 / tot
        case, _, t0, t1, _, _, v0 = success_and_traces(p0, s0, s1)
        tree[hist] = _build_povm(case, v0)
        posts[hist] = p0
        if k == shots - 1:
            total += l0 * t0 + l1 * (1.0 - t1)
        else:
            stack.append((hist + (0,), l0 * t0, l1 * t1))
            stack.append((hist + (1,), l0 * (1.0 - t0), l1 * (1.0 - t1)))
    return StrategyEval(0.5 * total, tree, posts)


def bayesian_value(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> float:
    """Success probability of the Bayesian strategy, no tree construction."""
    _check_bayes(eta0, eta1, sched)
    shots = sched.shots
    flat = sched.mode is ScheduleMode.FLAT
    pairs = _flat_pairs(eta0, eta1, sched) if flat else None
    last = shots - 1
    total = 0.0
    stack = [(0, 0, 1.0, 1.0)]
    while stack:
        k, idx, l0, l1 = stack.pop()
        tot = l0 + l1
        if tot <= 0.0:
            continue
        if flat:
            s0, s1 = pairs[k]
        else:
            r = sched.levels[k][idx]
            s0 = output_entries(eta0, r, sched.phi)
            s1 = output_entries(eta1, r, sched.phi)
        _, _, t0, t1, _, _, _ = success_and_traces(l0 / tot, s0, s1)
        if k == last:
            total += l0 * t0 + l1 * (1.0 - t1)
        else:
            stack.append((k + 1, idx << 1, l0 * t0, l1 * t1))
            stack.append((k + 1, (idx << 1) | 1, l0 * (1.0 - t0), l1 * (1.0 - t1)))
    return 0.5 * total


# ---------------------------------------------------------------------------
# markovian strategy


def _check_markov(eta0, eta1, sched):
    _require_pair(eta0, eta1)
    _check_schedule(sched, StrategyKind.MARKOVIAN)


def _markov_r(sched, k: int, prev_bit: int) -> float:
    if sched.mode is ScheduleMode.FLAT:
        return sched.levels[k]
    return sched.levels[k][prev_bit if k > 0 else 0]


def eval_markovian(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> StrategyEval:
    """Last-outcome feedforward, histories marginalized.

    Keeps one weight per (channel, last outcome) pair. Each shot after the
    first solves two one-shot problems, one per previous outcome, and the
    weights are pushed forward through the chosen measurements. The final
    outcome is the guess.
    """
    _check_markov(eta0, eta1, sched)
    shots = sched.shots
    phi = sched.phi
    tree: dict = {}
    posts: dict = {}
    r = _markov_r(sched, 0, 0)
    s0 = output_entries(eta0, r, phi)
    s1 = output_entries(eta1, r, phi)
    case, _, t0, t1, _, _, v0 = success_and_traces(0.5, s0, s1)
    tree[(1, None)] = _build_povm(case, v0)
    posts[(1, None)] = 0.5
    w00, w01 = t0, 1.0 - t0
    w10, w11 = t1, 1.0 - t1
    for k in range(1, shots):
        s0 = output_entries(eta0, _markov_r(sched, k, 0), phi)
        s1 = output_entries(eta1, _markov_r(sched, k, 0), phi)
        n00 = n01 = n10 = n11 = 0.0
        for prev, m0, m1 in ((0, w00, w10), (1, w01, w11)):
            if prev == 1:
                s0 = output_entries(eta0, _markov_r(sched, k, 1), phi)
                s1 = output_entries(eta1, _markov_r(sched, k, 1), phi)
            tot = m0 + m1
            if tot <= 0.0:
                continue
            p0 = m0 / tot
            case, _, t0, t1, _, _, v0 = success_and_traces(p0, s0, s1)
            tree[(k + 1, prev)] = _build_povm(case, v0)
            posts[(k + 1, prev)] = p0
            n00 += m0 * t0
            n01 += m0 * (1.0 - t0)
            n10 += m1 * t1
            n11 += m1 * (1.0 - t1)
        w00, w01, w10, w11 = n00, n01, n10, n11
    return StrategyEval(0.5 * (w00 + w11), tree, posts)


def markovian_value(eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> float:
    """Success probability of the Markovian strategy, no tree construction."""
    _check_markov(eta0, eta1, sched)
    shots = sched.shots
    phi = sched.phi
    s0 = output_entries(eta0, _markov_r(sched, 0, 0), phi)
    s1 = output_entries(eta1, _markov_r(sched, 0, 0), phi)
    _, _, t0, t1, _, _, _ = success_and_traces(0.5, s0, s1)
    w00, w01 = t0, 1.0 - t0
    w10, w11 = t1, 1.0 - t1
    for k in range(1, shots):
        pair0 = (
            output_entries(eta0, _markov_r(sched, k, 0), phi),
            output_entries(eta1, _markov_r(sched, k, 0), phi),
        )
        if sched.mode is ScheduleMode.FLAT:
            pair1 = pair0
        else:
            pair1 = (
                output_entries(eta0, _markov_r(sched, k, 1), phi),
                output_entries(eta1, _markov_r(sched, k, 1), phi),
            )
        n00 = n01 = n10 = n11 = 0.0
        for (s0k, s1k), m0, m1 in ((pair0, w00, w10), (pair1, w01, w11)):
            tot = m0 + m1
            if tot <= 0.0:
                continue
            _, _, t0, t1, _, _, _ = success_and_traces(m0 / tot, s0k, s1k)
            n00 += m0 * t0
            n01 += m0 * (1.0 - t0)
            n10 += m1 * t1
            n11 += m1 * (1.0 - t1)
        w00, w01, w10, w11 = n00, n01, n10, n11
    return 0.5 * (w00 + w11)


def strategy_value(kind, eta0: ChannelSpec, eta1: ChannelSpec, sched: InputSchedule) -> float:
    """Dispatch to the value-only evaluator for ``kind``."""
    kind = StrategyKind(kind)
    if kind is StrategyKind.GLOBAL:
        return global_value(eta0, eta1, sched)
    if kind is StrategyKind.BAYESIAN:
        return bayesian_value(eta0, eta1, sched)
    return markovian_value(eta0, eta1, sched)


# ---------------------------------------------------------------------------
# Monte Carlo check


def simulate_protocol(
    kind,
    eta0: ChannelSpec,
    eta1: ChannelSpec,
    sched: InputSchedule,
    trials: int,
    seed: int,
) -> float:
    """Sampled success frequency of a strategy's measurement tree.

    Draws the true channel uniformly per trial, samples each measurement
    outcome from its exact distribution, and scores the final outcome as
    the guess. Deterministic for a fixed seed.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    kind = StrategyKind(kind)
    rng = np.random.default_rng(seed)
    shots = sched.shots
    truth = rng.integers(0, 2, size=trials)

    if kind is StrategyKind.GLOBAL:
        ev = eval_global(eta0, eta1, sched)
        povm = ev.povm_tree["global"]
        r0, r1 = _global_products(eta0, eta1, sched)
        p_correct = np.array(
            [float(np.trace(r0 @ povm.pi0).real), float(np.trace(r1 @ povm.pi1).real)]
        )
        hit = rng.random(trials) < p_correct[truth]
        return float(hit.mean())

    if kind is StrategyKind.BAYESIAN:
        ev = eval_bayesian(eta0, eta1, sched)
        prob0 = [np.full((2, 2**k), 0.5) for k in range(shots)]
        for hist, povm in ev.povm_tree.items():
            k = len(hist)
            idx = 0
            for b in hist:
                idx = (idx << 1) | b
            r = sched.levels[k] if sched.mode is ScheduleMode.FLAT else sched.levels[k][idx]
            for c, spec in enumerate((eta0, eta1)):
                rho = _matrix(output_entries(spec, r, sched.phi))
                prob0[k][c, idx] = float(np.trace(rho @ povm.pi0).real)
        node = np.zeros(trials, dtype=np.int64)
        for k in range(shots):
            p0out = prob0[k][truth, node]
            bit = (rng.random(trials) >= p0out).astype(np.int64)
            node = (node << 1) | bit
        return float(((node & 1) == truth).mean())

    ev = eval_markovian(eta0, eta1, sched)
    prob0 = [np.full((2, 2), 0.5) for _ in range(shots)]
    for (shot, prev), povm in ev.povm_tree.items():
        k = shot - 1
        cols = (0, 1) if prev is None else (prev,)
        r = _markov_r(sched, k, 0 if prev is None else prev)
        for c, spec in enumerate((eta0, eta1)):
            rho = _matrix(output_entries(spec, r, sched.phi))
            val = float(np.trace(rho @ povm.pi0).real)
            for col in cols:
                prob0[k][c, col] = val
    last = np.zeros(trials, dtype=np.int64)
    for k in range(shots):
        p0out = prob0[k][truth, last]
        bit = (rng.random(trials) >= p0out).astype(np.int64)
        last = bit
    return float((last == truth).mean())
