"""Derived operators: directional derivatives, their iterates, the partition
formula, the tangent endofunctor, reindexings, and plain derivatives.

Slot conventions (flattened across groups):

* nabla F has two groups (direction; point), direction first, so values
  are read as nabla F(V; X).
* iterated partials nabla^n F prepend one direction per step:
  (V_n, ..., V_1; X).
* higher-order derivatives Delta_n F live on (V_n, ..., V_1; X) and are
  built by restricting nabla(Delta_{n-1}) along the diagonal
  (V_n, ..., V_1, X) |-> ((V_n, ..., V_1), (V_{n-1}, ..., V_1, X)).
* iterates nabla^{x n} F live on 2^n slots indexed by bitmasks: slot m of
  the k-th iterate is the direction copy when the top bit of m is set.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Sequence

from .chain import ChainComplex, TruncationWindow
from .errors import ArityMismatch, InvalidProfile, SlotOutOfRange
from .expr import FunctorExpr
from .fields import Field
from .functors import (
    ChainFunctor, _as_functor, comonad_functor, cross_effect_functor,
    direct_sum_functor, expr_functor, linearize_d1, merge_all_groups,
    presum_functor, regroup_functor, reindex_functor,
)

# -- multilinearization ---------------------------------------------------------


def partial_linearize(f: ChainFunctor, group: int) -> ChainFunctor:
    """D_1 in one variable (group), the others held as parameters."""
    if group >= len(f.groups):
        raise SlotOutOfRange(f"group {group} out of range")
    return linearize_d1(f, group)


def simultaneous_linearize(f: ChainFunctor, groups: Sequence[int]) -> ChainFunctor:
    """D_1 of the functor with the chosen groups merged into one variable.

    The merged groups must be adjacent in the given order; use reindex to
    arrange them first if needed.  The merged variable keeps the position
    of the first chosen group.
    """
    groups = sorted(set(groups))
    for g in groups:
        if g >= len(f.groups):
            raise SlotOutOfRange(f"group {g} out of range")
    if groups != list(range(groups[0], groups[-1] + 1)):
        raise SlotOutOfRange("simultaneous groups must be adjacent")
    merged = (f.groups[: groups[0]]
              + (sum(f.groups[g] for g in groups),)
              + f.groups[groups[-1] + 1:])
    return linearize_d1(regroup_functor(f, merged), groups[0])


def sequential_linearize(f: ChainFunctor, groups: Sequence[int]) -> ChainFunctor:
    """Iterated partial linearization, one group at a time."""
    out = f
    for g in groups:
        out = partial_linearize(out, g)
    return out


def multilinearize(f: ChainFunctor, mode: str, slots=None) -> ChainFunctor:
    """mode in {"partial", "simultaneous", "sequential"}."""
    if mode == "partial":
        return partial_linearize(f, int(slots))
    if mode == "simultaneous":
        return simultaneous_linearize(f, tuple(slots))
    if mode == "sequential":
        if slots is None:
            slots = range(len(f.groups))
        return sequential_linearize(f, tuple(slots))
    raise ArityMismatch(f"unknown multilinearization mode {mode!r}")


# -- the first directional derivative --------------------------------------------


def nabla(f: ChainFunctor, defn: str = "via-sum") -> ChainFunctor:
    """nabla F(V; X), with the domain treated as a single variable.

    "via-sum": D_1 F(X (+) -) in the direction slot.
    "via-kernel": D_1 of the split complement of F(X) inside F(X (+) V).
    Both have groups (s, s) with the direction group first.
    """
    g = merge_all_groups(f)
    pre = presum_functor(g, 0)
    if defn == "via-sum":
        return linearize_d1(pre, 0)
    if defn == "via-kernel":
        ker = cross_effect_functor(pre, 0, 1)
        return linearize_d1(ker, 0)
    raise ArityMismatch(f"unknown nabla definition {defn!r}")


def nabla_decomposition(f: ChainFunctor) -> ChainFunctor:
    """The split description D_1F(V) (+) D_1^V cr_2 F(X, V), as a functor
    of (V; X) with the same slot layout as nabla(f)."""
    g = merge_all_groups(f)
    s = g.slots
    d1 = linearize_d1(g, 0)
    # D_1 F composed with the direction projection
    part1 = reindex_functor(d1, tuple(range(s)), (s, s))
    cr2 = cross_effect_functor(g, 0, 2)  # slots: copy0 = first slot block
    # feed copy0 from the point block and copy1 from the direction block,
    # then linearize the direction copy
    slot_map = tuple(range(s, 2 * s)) + tuple(range(s))
    arranged = reindex_functor(cr2, slot_map, (s, s))
    part2 = linearize_d1(regroup_functor(arranged, (s, s)), 0)
    # arranged has groups (direction, point) with cr2's copy1 = direction?
    return direct_sum_functor([part1, part2])


def nabla_partial(f: ChainFunctor, group: int) -> ChainFunctor:
    """Directional derivative in one group only; the new direction group is
    prepended to the domain."""
    return linearize_d1(presum_functor(f, group), 0)


def nabla_iterated(f: ChainFunctor, n: int) -> ChainFunctor:
    """nabla^n F(V_n, ..., V_1; X): repeatedly differentiate in the point
    variable, holding previous directions as parameters."""
    if n < 0:
        raise ArityMismatch("n must be nonnegative")
    out = merge_all_groups(f)
    for _ in range(n):
        out = nabla_partial(out, len(out.groups) - 1)
    return out


def nabla_iterated_closed(f: ChainFunctor, n: int) -> ChainFunctor:
    """The closed form D_1^(n)(cr_{n+1}F(V_n,...,V_1,X) (+)
    cr_nF(V_n,...,V_1)), sequentially linearized in the n directions."""
    if n < 1:
        raise ArityMismatch("closed form needs n >= 1")
    g = merge_all_groups(f)
    s = g.slots
    crn1 = cross_effect_functor(g, 0, n + 1)
    crn1 = regroup_functor(crn1, (s,) * (n + 1))
    crn = cross_effect_functor(g, 0, n)
    # view cr_n(V_n, ..., V_1) as a functor of (V_n, ..., V_1, X), X unused
    slot_map = tuple(range(n * s))
    crn_wide = reindex_functor(crn, slot_map, (s,) * (n + 1))
    total = direct_sum_functor([crn1, crn_wide])
    return sequential_linearize(total, range(n))


def delta_n(f: ChainFunctor, n: int) -> ChainFunctor:
    """Delta_n F(V_n, ..., V_1; X), by the diagonal-restriction recursion."""
    if n < 0:
        raise ArityMismatch("n must be nonnegative")
    if n == 0:
        return merge_all_groups(f)
    if n == 1:
        return nabla(f)
    prev = delta_n(f, n - 1)  # n slots (V_{n-1}, ..., V_1; X), groups 1^n
    s = prev.slots
    grad = nabla(prev)        # 2s slots: (direction block; point block)
    slot_map = []
    for i in range(s):
        slot_map.append(i)          # direction block: (V_n, ..., V_1)
    for i in range(s):
        slot_map.append(i + 1)      # point block: (V_{n-1}, ..., V_1, X)
    return reindex_functor(grad, tuple(slot_map), (1,) * (n + 1))


def nabla_power(f: ChainFunctor, n: int) -> ChainFunctor:
    """nabla^{x n} F on 2^n slots indexed by bitmasks (slot index = mask).

    Each iteration reindexes so that the direction copy of the variable
    with mask m carries mask m | top, keeping slot index = mask."""
    out = merge_all_groups(f)
    for k in range(1, n + 1):
        out = nabla(out)
        half = 1 << (k - 1)
        size = 1 << k
        slot_map = tuple((j | half) if j < half else j - half
                         for j in range(size))
        out = reindex_functor(out, slot_map, (1,) * size)
    return out


def delta_n_diag(f: ChainFunctor, n: int) -> ChainFunctor:
    """Delta_n via the diagonal: restrict nabla^{x n} along mask |-> n-|mask|
    (variable V_{|mask|}, with X in the final slot)."""
    power = nabla_power(f, n)
    slot_map = tuple(n - bin(m).count("1") for m in range(1 << n))
    return reindex_functor(power, slot_map, (1,) * (n + 1))


# -- set partitions and the partition formula ------------------------------------


def set_partitions(n: int) -> list[tuple[tuple[int, ...], ...]]:
    """All partitions of {1, ..., n}, blocks sorted by minimum, canonical
    deterministic order."""
    if n == 0:
        return [()]
    out = []

    def rec(element: int, blocks: list[list[int]]):
        if element > n:
            out.append(tuple(tuple(b) for b in blocks))
            return
        for b in blocks:
            b.append(element)
            rec(element + 1, blocks)
            b.pop()
        blocks.append([element])
        rec(element + 1, blocks)
        blocks.pop()

    rec(1, [])
    return out


def bell_number(n: int) -> int:
    return len(set_partitions(n))


def partition_multiplicity(n: int, ks: Sequence[int]) -> int:
    """Number of set partitions of {1..n} with k_i blocks of size i:
    n! / (prod k_i! * prod (i!)^{k_i})."""
    ks = tuple(ks)
    if len(ks) != n or sum((i + 1) * k for i, k in enumerate(ks)) != n:
        raise InvalidProfile(f"profile {ks} does not partition {n}")
    denom = 1
    for i, k in enumerate(ks):
        denom *= factorial(k) * factorial(i + 1) ** k
    return factorial(n) // denom


def profile_of_partition(part) -> tuple[int, ...]:
    n = sum(len(b) for b in part)
    ks = [0] * n
    for b in part:
        ks[len(b) - 1] += 1
    return tuple(ks)


def faa_di_bruno_rhs(f: ChainFunctor, n: int) -> ChainFunctor:
    """(+) over set partitions pi = {S_1, ..., S_k} of {1..n} of
    nabla^{|pi|} F(V_{|S_1|}, ..., V_{|S_k|}; X), on slots (V_n,...,V_1;X)."""
    if n < 1:
        raise ArityMismatch("partition sum needs n >= 1")
    parts = []
    for pi in set_partitions(n):
        k = len(pi)
        grad = nabla_iterated(f, k)   # slots (W_k, ..., W_1; X)
        sizes = [len(s) for s in pi]
        slot_map = []
        for i in range(k):
            # direction slot i is W_{k-i}; it receives V_{|S_{i+1}|}
            slot_map.append(n - sizes[i])
        slot_map.append(n)            # the point slot reads X
        parts.append(reindex_functor(grad, tuple(slot_map), (1,) * (n + 1)))
    return direct_sum_functor(parts)


# -- tangent structure -----------------------------------------------------------


def tangent_components(f: ChainFunctor, n: int) -> dict[int, ChainFunctor]:
    """T^n F as its 2^n components, indexed by subset bitmasks S of n.

    The domain has 2^n slots (slot index = bitmask).  Component S reads
    nabla^{x |S|} F restricted along the subset inclusion.
    """
    comps = {0: merge_all_groups(f)}
    size = 1
    for k in range(1, n + 1):
        half = size
        size *= 2
        new: dict[int, ChainFunctor] = {}
        top = half
        for s_mask, comp in comps.items():
            # no top bit: precompose with the restriction to the low slots
            new[s_mask] = reindex_functor(comp, tuple(range(half)),
                                          (1,) * size)
            # with top bit: nabla, direction copies on the high slots
            grad = nabla(comp)
            slot_map = tuple(range(top, size)) + tuple(range(half))
            new[s_mask | top] = reindex_functor(grad, slot_map, (1,) * size)
        comps = new
    return comps


def tangent_T(f: ChainFunctor) -> dict[int, ChainFunctor]:
    """TF = (nabla F, F pi_R) as components indexed by {1: nabla F, 0: F}."""
    return tangent_components(f, 1)


def reindex(f: ChainFunctor, c: Sequence[int], out_slots: int) -> ChainFunctor:
    """Precompose with the reindexing functor of c : slots(f) -> out_slots."""
    c = tuple(int(i) for i in c)
    if len(c) != f.slots:
        raise ArityMismatch("reindexer must cover the domain slots")
    return reindex_functor(f, c, (1,) * out_slots)


def k_n(g: ChainFunctor, n: int) -> list[ChainFunctor]:
    """K_n G = (Delta_n G, Delta_{n-1} G o pi_R, ..., G o pi_R), all as
    functors on (V_n, ..., V_1; X)."""
    out = []
    for j in range(n, -1, -1):
        dj = delta_n(g, j)  # slots (V_j, ..., V_1; X)
        slot_map = tuple(n - j + i for i in range(j)) + (n,)
        out.append(reindex_functor(dj, slot_map, (1,) * (n + 1)))
    return out


def diagonal_function(n: int) -> tuple[int, ...]:
    """d_n : P(n) -> n+1, S |-> |S| (slot conventions of k_n/tangent)."""
    return tuple(bin(m).count("1") for m in range(1 << n))


def derivative_dR(f: ChainFunctor, n: int, x: int) -> ChainComplex:
    """d^n/dR^n F(X) = nabla^n F(R, ..., R; X) with R the free rank-one
    object."""
    grad = nabla_iterated(f, n)
    return grad.value((1,) * n + (x,))


# -- degree checks ----------------------------------------------------------------


def check_degree_n(f: ChainFunctor, n: int, samples) -> tuple[bool, list]:
    """Is f degree n?  Computes cr_{n+1} at the sampled tuples and tests
    for vanishing homology in the trusted range."""
    g = merge_all_groups(f)
    cr = cross_effect_functor(g, 0, n + 1)
    failures = []
    for args in samples:
        args = tuple(args)
        h = cr.value(args * (n + 1) if len(args) == g.slots
                     else args).homology_dims()
        if any(h):
            failures.append((args, h))
    return (not failures), failures


def expr_chain_functor(expr: FunctorExpr, field: Field,
                       window: TruncationWindow) -> ChainFunctor:
    return expr_functor(expr, field, window)
