"""Exhaustive buffer-state progression model for one message.

A state is a tuple of ``eta + 1`` flit counts: element 0 is the source
core, element ``eta`` the destination, the others are router buffers.
Link ``j`` (0-based) moves one flit from element ``j`` to element ``j + 1``.
A link only forwards a flit that was already buffered at the start of the
cycle; there is no same-cycle pass-through.
"""
from __future__ import annotations

from itertools import product
from typing import Optional

DEFAULT_BUDGET = 1_000_000

State = tuple[int, ...]
Move = tuple[bool, ...]


class BudgetExhausted(RuntimeError):
    """The state-space search visited more states than allowed."""


def initial_state(flits: int, eta: int) -> State:
    return (flits,) + (0,) * eta


def terminal_state(flits: int, eta: int) -> State:
    return (0,) * eta + (flits,)


def apply_move(state: State, move: Move) -> State:
    out = list(state)
    for j, fire in enumerate(move):
        if fire:
            out[j] -= 1
            out[j + 1] += 1
    return tuple(out)


def is_valid_move(state: State, move: Move, capacity: Optional[int] = None) -> bool:
    if len(move) != len(state) - 1 or not any(move):
        return False
    if any(fire and state[j] < 1 for j, fire in enumerate(move)):
        return False
    nxt = apply_move(state, move)
    if min(nxt) < 0:
        return False
    if capacity is not None and any(x > capacity for x in nxt[1:-1]):
        return False
    return True


def valid_successors(state: State, capacity: Optional[int] = None) -> list[tuple[Move, State]]:
    """All (move, next state) pairs reachable in one progression."""
    eta = len(state) - 1
    if state[-1] == sum(state):
        return []
    # only links with an upstream flit may fire; enumerate subsets of those
    ready = [j for j in range(eta) if state[j] >= 1]
    out = []
    for bits in product((False, True), repeat=len(ready)):
        if not any(bits):
            continue
        move = [False] * eta
        for j, b in zip(ready, bits):
            move[j] = b
        move = tuple(move)
        nxt = apply_move(state, move)
        if capacity is not None and any(x > capacity for x in nxt[1:-1]):
            continue
        out.append((move, nxt))
    return out


def sp2_move(state: State) -> Move:
    """Under SP2 every link whose upstream buffer holds a flit fires together."""
    return tuple(state[j] >= 1 for j in range(len(state) - 1))


def replay_grants(flits: int, eta: int, grants: int) -> list[State]:
    """States visited when a message receives ``grants`` SP2 cycles."""
    state = initial_state(flits, eta)
    seq = [state]
    done = terminal_state(flits, eta)
    for _ in range(grants):
        if state == done:
            break
        state = apply_move(state, sp2_move(state))
        seq.append(state)
    return seq


def _explore(flits: int, eta: int, capacity: Optional[int], budget: int):
    """Iterative post-order DFS; yields (state, successor states) with successors first."""
    if flits < 1 or eta < 1:
        raise ValueError("need at least one flit and one link")
    if capacity is not None and capacity < 1:
        raise ValueError("capacity must be positive")
    start = initial_state(flits, eta)
    succ: dict[State, list[State]] = {}
    order: list[State] = []
    stack = [(start, False)]
    while stack:
        state, expanded = stack.pop()
        if expanded:
            order.append(state)
            continue
        if state in succ:
            continue
        nxt = [s for _, s in valid_successors(state, capacity)]
        succ[state] = nxt
        if len(succ) > budget:
            raise BudgetExhausted(f"more than {budget} states for C={flits}, eta={eta}")
        stack.append((state, True))
        stack.extend((s, False) for s in nxt if s not in succ)
    return start, succ, order


def series_bounds(flits: int, eta: int, capacity: Optional[int] = None,
                  budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """(shortest, longest) number of progressions from source-full to destination-full."""
    start, succ, order = _explore(flits, eta, capacity, budget)
    done = terminal_state(flits, eta)
    best: dict[State, tuple[float, float]] = {}
    inf = float("inf")
    for state in order:
        if state == done:
            best[state] = (0, 0)
            continue
        lo, hi = inf, -inf
        for s in succ[state]:
            a, b = best[s]
            lo, hi = min(lo, a + 1), max(hi, b + 1)
        best[state] = (lo, hi)
    lo, hi = best[start]
    if lo == inf:
        raise ValueError("destination is unreachable under the given capacity")
    return int(lo), int(hi)


def count_series(flits: int, eta: int, capacity: Optional[int] = None,
                 budget: int = DEFAULT_BUDGET) -> int:
    """Number of distinct progression sequences from source-full to destination-full."""
    start, succ, order = _explore(flits, eta, capacity, budget)
    done = terminal_state(flits, eta)
    ways: dict[State, int] = {}
    for state in order:
        ways[state] = 1 if state == done else sum(ways[s] for s in succ[state])
    return ways[start]
