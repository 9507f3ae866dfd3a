"""Evaluation under the four transition semantics.

Every evaluator walks the k*n levels in order.  Level j reads the bit of
the variable it tests and applies the matching transition:

* deterministic:   follow the successor entry of the current node
* nondeterministic: propagate the set of reachable nodes along edges
* probabilistic:   left-multiply the distribution by a stochastic matrix
* quantum:         left-multiply the amplitudes by a unitary, measure once
                   at the end; acceptance probability is the squared norm
                   of the amplitudes on the accepting sinks

Batch variants evaluate a whole (m, n) matrix of assignments in one pass;
they exist because exhaustive sweeps over 2^n inputs dominate the test
suite's runtime.
"""

from __future__ import annotations

import numpy as np

from .program import Assignment, Program, all_assignments_array


def _bits_of(x: Assignment | str | tuple | list, n: int) -> tuple[int, ...]:
    if isinstance(x, Assignment):
        bits = x.bits
    elif isinstance(x, str):
        bits = Assignment.from_string(x).bits
    else:
        bits = Assignment(tuple(x)).bits
    if len(bits) != n:
        raise ValueError(f"input has {len(bits)} bits, program reads {n}")
    return bits


def eval_det(p: Program, x) -> int:
    """Run a deterministic program; return 1 iff the reached sink accepts."""
    if p.semantics != "deterministic":
        raise ValueError(f"eval_det on a {p.semantics} program")
    bits = _bits_of(x, p.n)
    node = p.initial
    for lvl in p.levels:
        t = lvl.t1 if bits[lvl.variable - 1] else lvl.t0
        node = t[node - 1]
    return 1 if node in p.accept else 0


def eval_det_batch(p: Program, xs: np.ndarray) -> np.ndarray:
    """Deterministic evaluation of every row of an (m, n) uint8 matrix.

    Returns an (m,) uint8 vector of accept bits.
    """
    if p.semantics != "deterministic":
        raise ValueError(f"eval_det_batch on a {p.semantics} program")
    xs = np.asarray(xs)
    nodes = np.full(xs.shape[0], p.initial - 1, dtype=np.int64)
    for lvl in p.levels:
        t0 = np.asarray(lvl.t0, dtype=np.int64) - 1
        t1 = np.asarray(lvl.t1, dtype=np.int64) - 1
        b = xs[:, lvl.variable - 1]
        nodes = np.where(b == 1, t1[nodes], t0[nodes])
    accept = np.zeros(p.final_width, dtype=np.uint8)
    accept[[a - 1 for a in p.accept]] = 1
    return accept[nodes]


def eval_nondet(p: Program, x) -> int:
    """Return 1 iff some path through chosen edges reaches an accepting sink."""
    if p.semantics != "nondeterministic":
        raise ValueError(f"eval_nondet on a {p.semantics} program")
    bits = _bits_of(x, p.n)
    reach = {p.initial}
    for lvl in p.levels:
        t = lvl.t1 if bits[lvl.variable - 1] else lvl.t0
        reach = {d for s, d in t if s in reach}
        if not reach:
            return 0
    return 1 if reach & p.accept else 0


def eval_nondet_batch(p: Program, xs: np.ndarray) -> np.ndarray:
    """Nondeterministic batch evaluation via 0/1 reachability matrices."""
    if p.semantics != "nondeterministic":
        raise ValueError(f"eval_nondet_batch on a {p.semantics} program")
    xs = np.asarray(xs)
    m = xs.shape[0]
    reach = np.zeros((m, p.levels[0].width_in), dtype=bool)
    reach[:, p.initial - 1] = True
    for lvl in p.levels:
        a0 = np.zeros((lvl.width_in, lvl.width_out), dtype=bool)
        a1 = np.zeros((lvl.width_in, lvl.width_out), dtype=bool)
        for s, d in lvl.t0:
            a0[s - 1, d - 1] = True
        for s, d in lvl.t1:
            a1[s - 1, d - 1] = True
        b = xs[:, lvl.variable - 1] == 1
        nxt0 = reach @ a0
        nxt1 = reach @ a1
        reach = np.where(b[:, None], nxt1, nxt0)
    mask = np.zeros(p.final_width, dtype=bool)
    mask[[a - 1 for a in p.accept]] = True
    return (reach & mask).any(axis=1).astype(np.uint8)


def accept_prob(p: Program, x) -> float:
    """Acceptance probability of one input (probabilistic or quantum)."""
    bits = _bits_of(x, p.n)
    if p.semantics == "probabilistic":
        v = np.zeros(p.levels[0].width_in, dtype=np.float64)
        v[p.initial - 1] = 1.0
        for lvl in p.levels:
            t = lvl.t1 if bits[lvl.variable - 1] else lvl.t0
            v = t @ v
        return float(sum(v[a - 1] for a in p.accept))
    if p.semantics == "quantum":
        v = np.zeros(p.levels[0].width_in, dtype=np.complex128)
        v[p.initial - 1] = 1.0
        for lvl in p.levels:
            t = lvl.t1 if bits[lvl.variable - 1] else lvl.t0
            v = t @ v
        return float(sum(abs(v[a - 1]) ** 2 for a in p.accept))
    raise ValueError(f"accept_prob on a {p.semantics} program")


def accept_prob_batch(p: Program, xs: np.ndarray) -> np.ndarray:
    """Acceptance probabilities for every row of an (m, n) uint8 matrix."""
    if p.semantics not in ("probabilistic", "quantum"):
        raise ValueError(f"accept_prob_batch on a {p.semantics} program")
    xs = np.asarray(xs)
    m = xs.shape[0]
    dtype = np.complex128 if p.semantics == "quantum" else np.float64
    state = np.zeros((m, p.levels[0].width_in), dtype=dtype)
    state[:, p.initial - 1] = 1.0
    for lvl in p.levels:
        b = (xs[:, lvl.variable - 1] == 1)[:, None]
        nxt0 = state @ lvl.t0.T
        nxt1 = state @ lvl.t1.T
        state = np.where(b, nxt1, nxt0)
    idx = [a - 1 for a in p.accept]
    if p.semantics == "quantum":
        return np.abs(state[:, idx]) ** 2 @ np.ones(len(idx))
    return state[:, idx] @ np.ones(len(idx))


def state_trace(p: Program, x) -> list[np.ndarray]:
    """All intermediate state vectors, before level 1 through after level k*n.

    Useful for checking conservation step by step: probability mass for
    stochastic programs, Euclidean norm for quantum ones.
    """
    if p.semantics not in ("probabilistic", "quantum"):
        raise ValueError(f"state_trace on a {p.semantics} program")
    bits = _bits_of(x, p.n)
    dtype = np.complex128 if p.semantics == "quantum" else np.float64
    v = np.zeros(p.levels[0].width_in, dtype=dtype)
    v[p.initial - 1] = 1.0
    trace = [v]
    for lvl in p.levels:
        t = lvl.t1 if bits[lvl.variable - 1] else lvl.t0
        v = t @ v
        trace.append(v)
    return trace


def evaluate(p: Program, x):
    """Dispatch on semantics: 0/1 for det/nondet, a probability otherwise."""
    if p.semantics == "deterministic":
        return eval_det(p, x)
    if p.semantics == "nondeterministic":
        return eval_nondet(p, x)
    return accept_prob(p, x)


def computes_bounded_error(p: Program, f, epsilon: float,
                           slack: float = 1e-9) -> bool:
    """Exhaustively check the two-sided error condition against f.

    For every input x: f(x) = 1 demands acceptance probability at least
    1/2 + epsilon, f(x) = 0 demands at most 1/2 - epsilon.  The slack
    absorbs floating-point error in the probabilities themselves.
    Only meaningful for probabilistic and quantum programs, and only
    feasible for n <= 24.
    """
    if p.semantics not in ("probabilistic", "quantum"):
        raise ValueError("bounded error is about probability semantics")
    if not 0.0 < epsilon <= 0.5:
        raise ValueError(f"epsilon {epsilon!r} outside (0, 1/2]")
    if p.n > 24:
        raise ValueError(f"n = {p.n} too large for an exhaustive check")
    xs = all_assignments_array(p.n)
    probs = accept_prob_batch(p, xs)
    for m, pr in enumerate(probs):
        fx = f(Assignment.from_int(m, p.n))
        if fx == 1:
            if pr < 0.5 + epsilon - slack:
                return False
        elif pr > 0.5 - epsilon + slack:
            return False
    return True
