"""Alert-zone token generation via boolean minimization.

An alert zone (a set of cells) becomes, under a given encoding, a set of
codeword minterms; unassigned (dummy) codewords may serve as don't-cares
because no user can ever encrypt under them.  The minimizer produces a
cover of {0,1,*} patterns whose cost is the total non-star bit count, the
quantity that drives pairing work at query time (2 per non-star plus 1).

Spaces up to 2^k = 4096 are minimized exactly: Quine-McCluskey prime
implicants followed by a minimum-cost cover search with essential and
dominance reductions and branch-and-bound (a deterministic node budget
keeps degenerate dense cores from stalling; exhausting it falls back to
the greedy incumbent and clears the `exact` flag).  Larger spaces go
straight to a deterministic greedy set cover over prime cubes grown on
demand from each minterm; those covers are flagged approximate as well.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, FrozenSet, IO, Iterable, List, Set, Tuple

from .grid import Grid, GridEncoding

EXACT_SPACE_LIMIT = 4096
BRANCH_NODE_BUDGET = 20_000

Implicant = Tuple[int, int]  # (star mask, value with star bits zeroed)


def implicant_pattern(imp: Implicant, k: int) -> str:
    mask, value = imp
    chars = []
    for pos in range(k - 1, -1, -1):
        if mask >> pos & 1:
            chars.append("*")
        else:
            chars.append("1" if value >> pos & 1 else "0")
    return "".join(chars)


def pattern_implicant(pattern: str) -> Implicant:
    mask = 0
    value = 0
    for ch in pattern:
        mask <<= 1
        value <<= 1
        if ch == "*":
            mask |= 1
        elif ch == "1":
            value |= 1
        elif ch != "0":
            raise ValueError(f"bad pattern symbol {ch!r}")
    return mask, value


def implicant_cost(imp: Implicant, k: int) -> int:
    """Non-star bit count."""
    return k - bin(imp[0]).count("1")


def expand_implicant(imp: Implicant) -> List[int]:
    """All codeword values covered by an implicant."""
    mask, value = imp
    out = [value]
    sub = mask
    while sub:
        out.append(value | sub)
        sub = (sub - 1) & mask
    return out


def covers(imp: Implicant, minterm: int) -> bool:
    mask, value = imp
    return minterm & ~mask == value


@dataclass(frozen=True)
class TokenSet:
    """Minimized pattern cover of one alert zone under one encoding."""

    patterns: Tuple[str, ...]
    covered: FrozenSet[int]     # codeword values the patterns expand to
    cost: int                   # total non-star bits
    exact: bool                 # False for greedy / budget-exhausted covers

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self) -> int:
        return len(self.patterns)


def pairing_cost(ts: TokenSet) -> int:
    """Query-side bilinear pairings: 2 per non-star bit plus 1 per token."""
    return 2 * ts.cost + len(ts.patterns)


def zone_probability(zone: Iterable[int], grid: Grid) -> float:
    """Mutual probability of the zone's cells, accumulated in log space."""
    probs = grid.probabilities()
    total = 0.0
    for cell in zone:
        p = probs[cell]
        if p <= 0.0:
            return 0.0
        total += math.log(p)
    return math.exp(total)


# --- prime implicant generation (exact path) ---

def prime_implicants(k: int, minterms: Set[int], dontcares: Set[int]) -> List[Implicant]:
    """All prime implicants of the (minterms | dontcares) function that
    cover at least one real minterm."""
    current: Set[Implicant] = {(0, m) for m in minterms | dontcares}
    primes: Set[Implicant] = set()
    while current:
        merged: Set[Implicant] = set()
        nxt: Set[Implicant] = set()
        by_mask: Dict[int, Set[int]] = defaultdict(set)
        for mask, value in current:
            by_mask[mask].add(value)
        for mask, values in by_mask.items():
            free_bits = [1 << b for b in range(k) if not mask >> b & 1]
            for value in values:
                for bit in free_bits:
                    if value & bit:
                        continue
                    if value | bit in values:
                        nxt.add((mask | bit, value))
                        merged.add((mask, value))
                        merged.add((mask, value | bit))
        primes |= current - merged
        current = nxt
    return [p for p in primes if any(covers(p, m) for m in minterms)]


# --- cover selection over minterm bitmasks ---

def _bit_positions(bits: int) -> List[int]:
    out = []
    pos = 0
    while bits:
        if bits & 1:
            out.append(pos)
        bits >>= 1
        pos += 1
    return out


def _greedy_pick(order: List[int], cover_bits: List[int], costs: List[int],
                 full: int) -> List[int]:
    """Deterministic greedy cover: most new minterms, then cheapest, then
    first in `order`."""
    chosen: List[int] = []
    left = full
    while left:
        best = -1
        best_key = None
        for idx in order:
            gain = (cover_bits[idx] & left).bit_count()
            if not gain:
                continue
            key = (-gain, costs[idx], idx)
            if best_key is None or key < best_key:
                best_key = key
                best = idx
        if best < 0:
            raise ValueError("cover is infeasible")
        chosen.append(best)
        left &= ~cover_bits[best]
    return chosen


def _prune_redundant(chosen: List[int], cover_bits: List[int], costs: List[int],
                     full: int, tie: List[str]) -> List[int]:
    """Drop patterns whose removal leaves the zone covered, costliest first."""
    kept = list(chosen)
    for idx in sorted(chosen, key=lambda i: (-costs[i], tie[i])):
        rest = 0
        for j in kept:
            if j != idx:
                rest |= cover_bits[j]
        if rest & full == full and len(kept) > 1:
            kept.remove(idx)
    return kept


def exact_cover(k: int, primes: List[Implicant],
                minterms: Set[int]) -> Tuple[List[Implicant], bool]:
    """Minimum-cost cover of the minterms by prime implicants.

    Ties prefer fewer patterns, then the lexicographically smaller sorted
    pattern list.  Returns (cover, certified); certified is False only if
    the branch-and-bound budget ran out and the incumbent was kept.
    """
    primes = sorted(primes, key=lambda p: (implicant_cost(p, k),
                                           implicant_pattern(p, k)))
    costs = [implicant_cost(p, k) for p in primes]
    patterns = [implicant_pattern(p, k) for p in primes]
    ms = sorted(minterms)
    pos_of = {m: i for i, m in enumerate(ms)}
    cover_bits = []
    for p in primes:
        bits = 0
        for v in expand_implicant(p):
            i = pos_of.get(v)
            if i is not None:
                bits |= 1 << i
        cover_bits.append(bits)
    full = (1 << len(ms)) - 1

    # the only zero-cost implicant is the all-star cube, unbeatable alone
    if costs and costs[0] == 0:
        return [primes[0]], True

    chosen: List[int] = []
    remaining = full
    active = set(range(len(primes)))

    # reductions to a cyclic core
    changed = True
    while changed and remaining:
        changed = False
        # essential implicants
        for pos in _bit_positions(remaining):
            if not remaining >> pos & 1:
                continue
            holders = [i for i in active if cover_bits[i] >> pos & 1]
            if not holders:
                raise ValueError("cover is infeasible")
            if len(holders) == 1:
                i = holders[0]
                chosen.append(i)
                remaining &= ~cover_bits[i]
                active.discard(i)
                changed = True
        if not remaining:
            break
        # implicant dominance: drop i when some no-costlier j covers at
        # least as much of what remains
        live = sorted(active)
        rem_cover = {i: cover_bits[i] & remaining for i in live}
        for i in live:
            ci = rem_cover[i]
            if ci == 0:
                active.discard(i)
                changed = True
                continue
            for j in active:
                if j == i or costs[j] > costs[i]:
                    continue
                cj = rem_cover[j]
                if ci & ~cj:
                    continue
                if ci != cj or (costs[j], j) < (costs[i], i):
                    active.discard(i)
                    changed = True
                    break
        # minterm dominance: covering b forces covering a when b's holder
        # set is contained in a's
        holder_mask: Dict[int, int] = {}
        for i in active:
            bits = cover_bits[i] & remaining
            for pos in _bit_positions(bits):
                holder_mask[pos] = holder_mask.get(pos, 0) | (1 << i)
        positions = sorted(holder_mask)
        for a in positions:
            if not remaining >> a & 1:
                continue
            ha = holder_mask[a]
            for b in positions:
                if a == b or not remaining >> b & 1:
                    continue
                hb = holder_mask[b]
                if hb & ~ha:
                    continue
                if hb != ha or b < a:
                    remaining &= ~(1 << a)
                    changed = True
                    break

    if not remaining:
        cover = sorted(set(chosen), key=lambda i: patterns[i])
        return [primes[i] for i in cover], True

    base_cost = sum(costs[i] for i in chosen)
    live_order = sorted(active, key=lambda i: (costs[i], patterns[i]))
    greedy = _greedy_pick(live_order, cover_bits, costs, remaining)
    greedy = _prune_redundant(greedy, cover_bits, costs, remaining, patterns)
    best = chosen + greedy
    best_key = (sum(costs[i] for i in best), len(best),
                tuple(sorted(patterns[i] for i in best)))

    holders_by_pos: Dict[int, List[int]] = {}
    for pos in _bit_positions(remaining):
        holders_by_pos[pos] = sorted(
            (i for i in active if cover_bits[i] >> pos & 1),
            key=lambda i: (costs[i], patterns[i]))

    state = {"nodes": 0, "exhausted": False, "best": best, "best_key": best_key}

    def branch(picked: List[int], left: int, cost_so_far: int) -> None:
        state["nodes"] += 1
        if state["nodes"] > BRANCH_NODE_BUDGET:
            state["exhausted"] = True
            return
        if left == 0:
            key = (cost_so_far, len(picked),
                   tuple(sorted(patterns[i] for i in picked)))
            if key < state["best_key"]:
                state["best_key"] = key
                state["best"] = list(picked)
            return
        if cost_so_far + 1 > state["best_key"][0]:
            return
        pivot = min(_bit_positions(left),
                    key=lambda pos: (len(holders_by_pos[pos]), pos))
        for i in holders_by_pos[pivot]:
            if state["exhausted"]:
                return
            if cost_so_far + costs[i] > state["best_key"][0]:
                continue
            picked.append(i)
            branch(picked, left & ~cover_bits[i], cost_so_far + costs[i])
            picked.pop()

    branch(list(chosen), remaining, base_cost)
    cover = sorted(set(state["best"]), key=lambda i: patterns[i])
    return [primes[i] for i in cover], not state["exhausted"]


# --- greedy path for wide codeword spaces ---

def _grow_prime_cube(minterm: int, k: int, allowed: Set[int]) -> Implicant:
    """Expand a minterm into a maximal cube inside `allowed`, trying star
    positions in ascending order; the result is a prime implicant."""
    mask = 0
    value = minterm
    for b in range(k):
        bit = 1 << b
        other = value ^ bit
        ok = True
        sub = mask
        while True:
            if other | sub not in allowed:
                ok = False
                break
            if sub == 0:
                break
            sub = (sub - 1) & mask
        if ok:
            mask |= bit
            value &= ~bit
    return mask, value


def greedy_cover(k: int, minterms: Set[int], dontcares: Set[int]) -> List[Implicant]:
    allowed = minterms | dontcares
    cubes = sorted({_grow_prime_cube(m, k, allowed) for m in minterms})
    costs = [implicant_cost(c, k) for c in cubes]
    pats = [implicant_pattern(c, k) for c in cubes]
    ms = sorted(minterms)
    pos_of = {m: i for i, m in enumerate(ms)}
    cover_bits = []
    for c in cubes:
        mask, value = c
        bits = 0
        for i, m in enumerate(ms):
            if m & ~mask == value:
                bits |= 1 << i
        cover_bits.append(bits)
    full = (1 << len(ms)) - 1
    order = sorted(range(len(cubes)), key=lambda i: (costs[i], pats[i]))
    chosen = _greedy_pick(order, cover_bits, costs, full)
    chosen = _prune_redundant(chosen, cover_bits, costs, full, pats)
    return [cubes[i] for i in sorted(chosen, key=lambda i: pats[i])]


def minimize(zone: Iterable[int], enc: GridEncoding,
             allow_dummy_cover: bool = True) -> TokenSet:
    """Minimize an alert zone into a pattern cover under an encoding.

    Dummy codewords are don't-cares by default; disabling that forces the
    cover to expand to exactly the zone's codewords.
    """
    cells = sorted(set(zone))
    if not cells:
        raise ValueError("alert zone must be non-empty")
    for cell in cells:
        if not 0 <= cell < enc.n:
            raise ValueError(f"cell {cell} is not encoded")
    minterms = {enc.value(c) for c in cells}
    dontcares = set(enc.dummies()) if allow_dummy_cover else set()
    k = enc.k

    if len(minterms | dontcares) == 1 << k:
        cover: List[Implicant] = [((1 << k) - 1, 0)]
        certified = True
    elif (1 << k) <= EXACT_SPACE_LIMIT:
        primes = prime_implicants(k, minterms, dontcares)
        cover, certified = exact_cover(k, primes, minterms)
    else:
        cover = greedy_cover(k, minterms, dontcares)
        certified = False

    patterns = tuple(sorted(implicant_pattern(c, k) for c in cover))
    covered = frozenset(v for c in cover for v in expand_implicant(c))
    cost = sum(implicant_cost(c, k) for c in cover)
    return TokenSet(patterns=patterns, covered=covered, cost=cost, exact=certified)


def write_token_set(fp: IO[str], ts: TokenSet, zone_size: int, encoder: str) -> None:
    """One msb-first pattern per line under a cost header."""
    fp.write(f"# cost={ts.cost} zone_size={zone_size} encoder={encoder}"
             f" exact={'yes' if ts.exact else 'no'}\n")
    for pattern in ts.patterns:
        fp.write(pattern + "\n")
