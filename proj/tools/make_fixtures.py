#!/usr/bin/env python3
"""Regenerates the fixture replay buffers.

The dynamics here are written independently of the C++ fixtures so that the
buffers can serve as a cross-check of both. Buffers hold random-policy
episodes from the start state followed by every (state, action) pair once.
"""

import json
import random
import sys
from pathlib import Path


def lineworld_step(s, a, size=10, goal=9):
    s2 = max(s - 1, 0) if a == 0 else min(s + 1, size - 1)
    done = s2 == goal
    return s2, (1.0 if done else 0.0), done


def minicliff_step(s, a):
    row, col = divmod(s, 4)
    if a == 0:
        row = max(row - 1, 0)
    elif a == 1:
        col = min(col + 1, 3)
    elif a == 2:
        row = min(row + 1, 2)
    else:
        col = max(col - 1, 0)
    s2 = row * 4 + col
    if s2 in (9, 10):
        return 8, -100.0, False
    return s2, -1.0, s2 == 11


def build(step, n_states, n_actions, start, episodes, cap, seed):
    rng = random.Random(seed)
    rows = []
    for _ in range(episodes):
        s = start
        for _ in range(cap):
            a = rng.randrange(n_actions)
            s2, r, d = step(s, a)
            rows.append({"s": s, "a": a, "r": r, "s_next": s2, "d": d})
            if d:
                break
            s = s2
    for s in range(n_states):
        for a in range(n_actions):
            s2, r, d = step(s, a)
            rows.append({"s": s, "a": a, "r": r, "s_next": s2, "d": d})
    return rows


def write(path, rows):
    with open(path, "w") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")


def main(root):
    root = Path(root)
    write(root / "lineworld" / "buffer.jsonl", build(lineworld_step, 10, 2, 0, 3, 25, 7))
    write(root / "minicliff" / "buffer.jsonl", build(minicliff_step, 12, 4, 8, 3, 20, 11))


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures")
