"""Subfunction counting and the width-bound inequality chains.

The counting side measures how many distinct restricted functions appear
when a prefix set of variables is fixed; the maximum over the cuts of an
order, minimized over orders, is the complexity measure the width bounds
are stated against.  Counts depend only on the prefix *set*, never on the
order within it, which is what lets a bottleneck dynamic program over the
subset lattice replace factorial enumeration.

The bound side evaluates, in log2 space, the per-model upper bounds on
that measure and the lower bounds of the two hard function families, and
combines them into named inequality chains.  Each chain's ``margin`` is
the exponent on the final line of its derivation: a strictly positive
margin certifies the claimed separation numerically at those parameters.
For every chain except hi-q the margin is exactly lhs_log2 - rhs_log2;
hi-q's derivation divides the gap by d at the last step, so its margin is
(lhs_log2 - rhs_log2) / d there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .functions import FunctionOracle
from .program import Assignment, Program, VariableOrder, width

CHAINS = ("hi-n", "hi-p", "hi-q", "s5-obdd", "s5-nobdd", "s5-pobdd",
          "h-kobdd")

MODELS = ("det", "nondet", "prob", "quantum")

LATTICE_GUARD = 16
FACTORIAL_GUARD = 6


class OutOfRegimeError(ValueError):
    """Chain parameters give a reduced width below 1."""


# ---------------------------------------------------------------------------
# counting distinct subfunctions


def truth_table_of(f: FunctionOracle) -> np.ndarray:
    """Materialize f as a uint8 array indexed by the integer encoding."""
    if f.n > LATTICE_GUARD:
        raise ValueError(f"n = {f.n} exceeds the 2^n materialization "
                         f"guard of {LATTICE_GUARD}")
    values = np.empty(1 << f.n, dtype=np.uint8)
    for m in range(values.size):
        values[m] = f(Assignment.from_int(m, f.n))
    return values


def _cost_factory(table: np.ndarray, n: int):
    """Maps a prefix-set bitmask to its distinct-subfunction count."""
    m = np.arange(table.size, dtype=np.uint32)
    bits = [((m >> j) & 1).astype(np.uint32) for j in range(n)]

    def cost(mask: int) -> int:
        a_vars = [j for j in range(n) if (mask >> j) & 1]
        b_vars = [j for j in range(n) if not (mask >> j) & 1]
        a_idx = np.zeros(table.size, dtype=np.uint32)
        for r, j in enumerate(a_vars):
            a_idx |= bits[j] << r
        b_idx = np.zeros(table.size, dtype=np.uint32)
        for r, j in enumerate(b_vars):
            b_idx |= bits[j] << r
        rows = np.zeros((1 << len(a_vars), 1 << len(b_vars)), dtype=np.uint8)
        rows[a_idx, b_idx] = table
        packed = np.packbits(rows, axis=1)
        return len({row.tobytes() for row in packed})

    return cost


def count_subfunctions_at_cut(f: FunctionOracle, subset_a) -> int:
    """Distinct restrictions of f over all assignments to subset_a.

    subset_a holds 1-based variable indices; it must be a nonempty
    proper subset of the variables.  The count is a property of the
    set alone.
    """
    subset = set(subset_a)
    if not subset or not subset <= set(range(1, f.n + 1)):
        raise ValueError(f"subset {sorted(subset)} is not a nonempty "
                         f"subset of 1..{f.n}")
    if len(subset) == f.n:
        raise ValueError("the complement of the cut must be nonempty")
    mask = 0
    for v in subset:
        mask |= 1 << (v - 1)
    return _cost_factory(truth_table_of(f), f.n)(mask)


def n_theta(f: FunctionOracle, order: VariableOrder) -> int:
    """Worst prefix-cut count of an order; cuts run over 1 < u < n."""
    if f.n < 3:
        raise ValueError("cut positions 1 < u < n need n >= 3")
    if len(order.perm) != f.n:
        raise ValueError(f"order over {len(order.perm)} variables, "
                         f"function has {f.n}")
    cost = _cost_factory(truth_table_of(f), f.n)
    best = 0
    mask = 1 << (order.perm[0] - 1)
    for u in range(2, f.n):
        mask |= 1 << (order.perm[u - 1] - 1)
        best = max(best, cost(mask))
    return best


@dataclass(frozen=True)
class SubfunctionProfile:
    """Per-cut counts of one order, with the worst cut called out."""

    n: int
    order: VariableOrder
    counts: tuple[int, ...]          # cut positions u = 2 .. n-1
    n_min: int | None = None

    @property
    def cuts(self) -> range:
        return range(2, self.n)

    @property
    def max_count(self) -> int:
        return max(self.counts)


def subfunction_profile(f: FunctionOracle, order: VariableOrder,
                        with_min: bool = False) -> SubfunctionProfile:
    if f.n < 3:
        raise ValueError("cut positions 1 < u < n need n >= 3")
    cost = _cost_factory(truth_table_of(f), f.n)
    counts = []
    mask = 1 << (order.perm[0] - 1)
    for u in range(2, f.n):
        mask |= 1 << (order.perm[u - 1] - 1)
        counts.append(cost(mask))
    minimum = n_min(f) if with_min else None
    return SubfunctionProfile(n=f.n, order=order, counts=tuple(counts),
                              n_min=minimum)


def _lattice_best(f: FunctionOracle) -> dict[int, int]:
    """Bottleneck value of every subset usable as a prefix (size 2..n-1).

    best(S) is the smallest achievable worst-cut count over orders whose
    cut chain ends at S; it satisfies
    best(S) = max(cost(S), min over x of best(S minus x)).
    """
    if not 3 <= f.n <= LATTICE_GUARD:
        raise ValueError(f"lattice method needs 3 <= n <= {LATTICE_GUARD}, "
                         f"got n = {f.n}")
    n = f.n
    cost = _cost_factory(truth_table_of(f), n)
    by_size: list[list[int]] = [[] for _ in range(n + 1)]
    for mask in range(1, 1 << n):
        size = mask.bit_count()
        if 2 <= size <= n - 1:
            by_size[size].append(mask)
    best: dict[int, int] = {}
    for mask in by_size[2]:
        best[mask] = cost(mask)
    for size in range(3, n):
        for mask in by_size[size]:
            reachable = min(best[mask & ~(1 << j)]
                            for j in range(n) if (mask >> j) & 1)
            best[mask] = max(cost(mask), reachable)
    return best


def n_min(f: FunctionOracle) -> int:
    """Exact minimum over orders of the worst prefix-cut count."""
    best = _lattice_best(f)
    n = f.n
    return min(v for mask, v in best.items()
               if mask.bit_count() == n - 1)


def optimal_order(f: FunctionOracle) -> tuple[int, VariableOrder]:
    """An order achieving n_min, reconstructed from the lattice values."""
    best = _lattice_best(f)
    n = f.n
    mask = min((m for m in best if m.bit_count() == n - 1),
               key=lambda m: best[m])
    value = best[mask]
    removed = []
    while mask.bit_count() > 2:
        j = min((j for j in range(n) if (mask >> j) & 1),
                key=lambda j: best[mask & ~(1 << j)])
        removed.append(j)
        mask &= ~(1 << j)
    prefix = [j + 1 for j in range(n) if (mask >> j) & 1]
    chain = [j + 1 for j in reversed(removed)]
    used = set(prefix) | set(chain)
    tail = [v for v in range(1, n + 1) if v not in used]
    return value, VariableOrder(tuple(prefix + chain + tail))


def n_min_by_enumeration(f: FunctionOracle) -> int:
    """Factorial-enumeration cross-check of n_min, for n <= 6 only."""
    if not 3 <= f.n <= FACTORIAL_GUARD:
        raise ValueError(f"enumeration needs 3 <= n <= {FACTORIAL_GUARD}, "
                         f"got n = {f.n}")
    n = f.n
    cost = _cost_factory(truth_table_of(f), n)
    memo: dict[int, int] = {}

    def cached(mask: int) -> int:
        if mask not in memo:
            memo[mask] = cost(mask)
        return memo[mask]

    result = None
    for perm in itertools.permutations(range(n)):
        mask = 1 << perm[0]
        worst = 0
        for u in range(2, n):
            mask |= 1 << perm[u - 1]
            worst = max(worst, cached(mask))
            if result is not None and worst >= result:
                break
        if result is None or worst < result:
            result = worst
    return result


# ---------------------------------------------------------------------------
# model bounds and lower bounds, in log2 space


@dataclass(frozen=True)
class Constants:
    """The bound lemmas' unspecified constants, explicit on every report.

    c1 defaults to 8 because the quantum chain fixes it at eight times
    the quantum lemma's constant, and c defaults to 1.
    """

    c: float = 1.0
    c1: float = 8.0
    c2: float = 1.0
    c3: float = 1.0

    def __post_init__(self) -> None:
        if min(self.c, self.c1, self.c2, self.c3) <= 0:
            raise ValueError("constants must be positive")

    def describe(self) -> str:
        def fmt(x: float) -> str:
            return str(int(x)) if x == int(x) else repr(x)
        return (f"C={fmt(self.c)};C1={fmt(self.c1)};"
                f"C2={fmt(self.c2)};C3={fmt(self.c3)}")


DEFAULT_CONSTANTS = Constants()


def bound_log2(model: str, k: int, w: int,
               constants: Constants = DEFAULT_CONSTANTS) -> float:
    """log2 of the model's upper bound on the subfunction count."""
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    if k < 1 or w < 2:
        raise ValueError(f"need k >= 1 and w >= 2, got k={k}, w={w}")
    lw = math.log2(w)
    if model == "det":
        return ((k - 1) * w + 1) * lw
    if model == "nondet":
        return w * ((k - 1) * w + 1)
    if model == "prob":
        inner = constants.c1 * k * (constants.c2 + lw + math.log2(k))
        return (k + 1) * w * w * math.log2(inner)
    return constants.c * (k * w) ** 2 * lw


LOWER_BOUNDS = ("saf", "saf_cor", "mxpj", "mxpj_cor")


def lower_log2(name: str, k: int, size: int) -> float:
    """log2 of a hard-function subfunction lower bound.

    ``size`` is w for the shuffled-addressing bounds and d for the
    pointer-jumping bounds.
    """
    if name not in LOWER_BOUNDS:
        raise ValueError(f"unknown lower bound {name!r}")
    if k < 1 or size < 2:
        raise ValueError(f"need k >= 1 and size >= 2, got k={k}, "
                         f"size={size}")
    lg = math.log2(size)
    if name == "saf":
        return (k - 1) * (size - 2) * lg
    if name == "saf_cor":
        return k * size / 6 * lg
    if name == "mxpj":
        return ((size - 3) // 3) * (k - 3) * lg
    return size * k / 16 * lg


# ---------------------------------------------------------------------------
# inequality chains


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality chain at one parameter point."""

    chain: str
    k: int
    w: int | None
    d: int | None
    constants: Constants
    reduced_width: float
    lhs_log2: float
    rhs_log2: float
    margin: float
    in_regime: bool
    note: str = ""


def _chain_hi_n(k: int, w: int, constants: Constants):
    r = math.sqrt(w) / 2
    lhs = lower_log2("saf_cor", k, w)
    rhs = r * (1 + (2 * k - 1) * r)
    return r, lhs, rhs, lhs - rhs, k >= 2 and w >= 8, "constant-free"


def _chain_hi_p(k: int, w: int, constants: Constants):
    if k < 2 or w < 2:
        raise ValueError("the probabilistic chain needs k >= 2 and w >= 2")
    lk, lw = math.log2(k), math.log2(w)
    r = math.sqrt(w) / (lk * lw)
    lhs = lower_log2("saf_cor", k, w)
    inner = constants.c1 * k * (constants.c2 + 0.5 * lw - math.log2(lk)
                                - math.log2(lw) + lk)
    rhs = (2 * k + 1) * (w / (lk * lw) ** 2) * math.log2(inner)
    return (r, lhs, rhs, lhs - rhs, k >= 2 and r >= 1,
            "depends on C1, C2")


def _chain_hi_q(k: int, d: int, constants: Constants):
    r = math.sqrt(d / (constants.c1 * k))
    lhs = lower_log2("mxpj_cor", k, d)
    rhs = constants.c * (k * r) ** 2 * math.log2(r)
    margin = k / 16 * math.log2(constants.c1 * k)
    return (r, lhs, rhs, margin, r >= 1,
            "margin is the final reduced exponent assuming C1 = 8C; "
            "the raw side gap is d times larger")


def _chain_s5_obdd(k: int, d: int, constants: Constants):
    r = d / 32
    lhs = lower_log2("mxpj_cor", k, d)
    rhs = k * d * (math.log2(d) - 5) / 16
    return r, lhs, rhs, lhs - rhs, r >= 1, "constant-free"


def _chain_s5_nobdd(k: int, d: int, constants: Constants):
    ld = math.log2(d)
    r = math.sqrt(d * ld / 33)
    lhs = lower_log2("mxpj_cor", k, d)
    rhs = 2 * k * d * ld / 33
    return r, lhs, rhs, lhs - rhs, r >= 1, "constant-free"


def _chain_s5_pobdd(k: int, d: int, constants: Constants):
    if k < 2:
        raise ValueError("the probabilistic chain needs k >= 2")
    lk, ld = math.log2(k), math.log2(d)
    r = math.sqrt(d / lk)
    lhs = lower_log2("mxpj_cor", k, d)
    rhs = 2 * k * d * lk * (constants.c3 + lk
                            + math.log2(constants.c2 + ld + lk))
    return r, lhs, rhs, lhs - rhs, r >= 1, "depends on C2, C3"


def _chain_h_kobdd(k: int, w: int, constants: Constants):
    kappa, omega = k // 2, (w - 1) // 3
    r = w // 16 - 3
    if kappa < 1 or omega < 2:
        raise ValueError("witness parameters collapse below k=2, w=7")
    lhs = max(lower_log2("saf_cor", kappa, omega),
              lower_log2("saf", kappa, omega))
    rhs = ((k - 1) * r + 1) * math.log2(r) if r > 1 else 0.0
    return (r, lhs, rhs, lhs - rhs, k >= 2 and w >= 64,
            "re-derived witness; can go negative for odd k")


_CHAIN_FNS = {
    "hi-n": (_chain_hi_n, "w"),
    "hi-p": (_chain_hi_p, "w"),
    "hi-q": (_chain_hi_q, "d"),
    "s5-obdd": (_chain_s5_obdd, "d"),
    "s5-nobdd": (_chain_s5_nobdd, "d"),
    "s5-pobdd": (_chain_s5_pobdd, "d"),
    "h-kobdd": (_chain_h_kobdd, "w"),
}


def check_chain(chain: str, *, k: int, w: int | None = None,
                d: int | None = None,
                constants: Constants = DEFAULT_CONSTANTS,
                strict: bool = True) -> BoundReport:
    """Evaluate one inequality chain at one parameter point.

    With strict=True a reduced width below 1 raises OutOfRegimeError;
    with strict=False the report still carries the margin and flags
    in_regime=False instead.
    """
    if chain not in _CHAIN_FNS:
        raise ValueError(f"unknown chain {chain!r}; "
                         f"choose from {', '.join(CHAINS)}")
    fn, size_name = _CHAIN_FNS[chain]
    size = w if size_name == "w" else d
    if size is None:
        raise ValueError(f"chain {chain} needs parameter {size_name}")
    if k < 1 or size < 2:
        raise ValueError(f"need k >= 1 and {size_name} >= 2")
    r, lhs, rhs, margin, in_regime, note = fn(k, size, constants)
    if r < 1:
        if strict:
            raise OutOfRegimeError(
                f"{chain} at k={k}, {size_name}={size}: reduced width "
                f"{r:.4f} < 1, outside the separation's regime")
        in_regime = False
    return BoundReport(chain=chain, k=k,
                       w=size if size_name == "w" else None,
                       d=size if size_name == "d" else None,
                       constants=constants, reduced_width=r,
                       lhs_log2=lhs, rhs_log2=rhs, margin=margin,
                       in_regime=in_regime, note=note)


def default_grid(chain: str) -> list[dict[str, int]]:
    """The documented parameter grid of a chain, in canonical order."""
    ks = range(2, 65)
    if chain in ("hi-n", "hi-p"):
        sizes, name = [1 << e for e in range(3, 11)], "w"
    elif chain == "h-kobdd":
        sizes, name = [1 << e for e in range(6, 11)], "w"
    elif chain in ("hi-q", "s5-obdd", "s5-nobdd", "s5-pobdd"):
        sizes, name = [1 << e for e in range(4, 21)], "d"
    else:
        raise ValueError(f"unknown chain {chain!r}")
    return [{name: size, "k": k} for size in sizes for k in ks]


# ---------------------------------------------------------------------------
# desk-scale consistency of programs, counts, and bounds


@dataclass(frozen=True)
class EmpiricalBoundReport:
    model: str
    k: int
    width: int
    n_subfunctions: int
    bound_text: str
    holds: bool


def empirical_bound_check(p: Program, f: FunctionOracle) -> EmpiricalBoundReport:
    """Check exact N(f) against the bound at p's layer count and width.

    The comparison is exact: integer exponentiation where the bound's
    base is integral, a log2 comparison otherwise.
    """
    if f.n > LATTICE_GUARD:
        raise ValueError(f"n = {f.n} exceeds the guard of {LATTICE_GUARD}")
    count = n_min(f)
    k, w = p.k, width(p)
    model = {"deterministic": "det", "nondeterministic": "nondet",
             "probabilistic": "prob", "quantum": "quantum"}[p.semantics]
    constants = DEFAULT_CONSTANTS
    if model == "det":
        bound = w ** ((k - 1) * w + 1)
        text = f"{w}^{(k - 1) * w + 1}"
        holds = count <= bound
    elif model == "nondet":
        exponent = w * ((k - 1) * w + 1)
        bound = 2 ** exponent
        text = f"2^{exponent}"
        holds = count <= bound
    elif model == "prob":
        base = constants.c1 * k * (constants.c2 + math.log2(w)
                                   + math.log2(k))
        exponent = (k + 1) * w * w
        if base == int(base):
            holds = count <= int(base) ** exponent
        else:
            holds = math.log2(count) <= exponent * math.log2(base)
        text = f"({base:g})^{exponent}"
    else:
        exponent = constants.c * (k * w) ** 2
        if exponent == int(exponent):
            holds = count <= w ** int(exponent)
        else:
            holds = math.log2(count) <= exponent * math.log2(w)
        text = f"{w}^{exponent:g}"
    return EmpiricalBoundReport(model=model, k=k, width=w,
                                n_subfunctions=count, bound_text=text,
                                holds=holds)
