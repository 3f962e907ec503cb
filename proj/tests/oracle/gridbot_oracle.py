"""Independent reference computations for the gridbot fixtures.

Interprets the exported scenario JSON directly (states as frozensets of true
predicates) and derives action counts from grid geometry alone. The C++ tests
freeze the values printed here.

    python3 tests/oracle/gridbot_oracle.py scenarios/
"""

import heapq
import json
import sys
from collections import deque
from pathlib import Path


class Model:
    def __init__(self, doc):
        self.doc = doc
        self.preds = doc["predicates"]
        self.actions = sorted(doc["actions"], key=lambda a: a["name"])
        self.by_name = {a["name"]: a for a in self.actions}
        self.hazards = doc["hazards"]
        self.initial = frozenset(doc["initial_state"])

    @staticmethod
    def lits(items):
        return [(s[1:], False) if s.startswith("!") else (s, True) for s in items]

    def holds(self, state, items):
        return all((p in state) == v for p, v in self.lits(items))

    def override(self, state, items):
        s = set(state)
        for p, v in self.lits(items):
            (s.add if v else s.discard)(p)
        return frozenset(s)

    def visible(self, state):
        return [a for a in self.actions if a["kind"] == "operational" and a["visible_if"] in state]

    def hidden(self, state):
        return [a for a in self.actions if a["kind"] == "operational" and a["visible_if"] not in state]

    def empowering(self):
        return [a for a in self.actions if a["kind"] == "empowering"]

    def successors(self, state, actions):
        for a in actions:
            if self.holds(state, a["pre"]):
                yield a, self.override(state, a["eff"])

    def is_source(self, state, hazards):
        return any(self.holds(state, h["source"]) for h in hazards)

    def bfs(self, start, goal, actions, blocked=lambda s: False):
        actions = sorted(actions, key=lambda a: a["name"])
        if blocked(start):
            return None
        parent = {start: None}
        q = deque([start])
        while q:
            s = q.popleft()
            if self.holds(s, goal):
                plan = []
                while parent[s] is not None:
                    s, name = parent[s]
                    plan.append(name)
                return plan[::-1]
            for a, t in self.successors(s, actions):
                if t not in parent and not blocked(t):
                    parent[t] = (s, a["name"])
                    q.append(t)
        return None

    def reachable(self, start, actions):
        seen = {start}
        q = deque([start])
        while q:
            s = q.popleft()
            for _, t in self.successors(s, actions):
                if t not in seen:
                    seen.add(t)
                    q.append(t)
        return seen

    def min_hidden(self, start, goal, visible, hidden, blocked=lambda s: False):
        hidden_names = {a["name"] for a in hidden}
        actions = sorted(visible + hidden, key=lambda a: a["name"])
        order = 0
        best = {start: (0, 0)}
        parent = {start: None}
        heap = [(0, 0, order, start)]
        done = set()
        while heap:
            h, n, _, s = heapq.heappop(heap)
            if s in done:
                continue
            done.add(s)
            if self.holds(s, goal):
                plan = []
                while parent[s] is not None:
                    s, name = parent[s]
                    plan.append(name)
                return plan[::-1], h
            for a, t in self.successors(s, actions):
                if blocked(t):
                    continue
                cost = (h + (a["name"] in hidden_names), n + 1)
                if t not in best or cost < best[t]:
                    best[t] = cost
                    parent[t] = (s, a["name"])
                    order += 1
                    heapq.heappush(heap, (cost[0], cost[1], order, t))
        return None

    def count_plans(self, start, goal, actions, bound):
        memo = {}

        def count(s, k):
            key = (s, k)
            if key in memo:
                return memo[key]
            total = 1 if self.holds(s, goal) else 0
            if k > 0:
                for _, t in self.successors(s, actions):
                    total += count(t, k - 1)
            memo[key] = total
            return total

        return count(start, bound)


def state_of(*names):
    return frozenset(names)


def geometry_counts(doc):
    r = doc["render"]
    cols, rows, f = r["cols"], r["rows"], r["fine_factor"]
    region = {tuple(c) for m in r["marks"] for c in m["cells"]}
    deltas = [(0, 1), (1, 0), (0, -1), (-1, 0)]
    inb = lambda x, y: 0 <= x < cols and 0 <= y < rows
    move = sum(1 for x in range(cols) for y in range(rows) for dx, dy in deltas if inb(x + dx, y + dy))
    enter = sum(
        1
        for x in range(cols)
        for y in range(rows)
        for dx, dy in deltas
        if (x, y) not in region and inb(x + dx, y + dy) and (x + dx, y + dy) in region
    )
    fine = 0
    for (x, y) in region:
        for i in range(f):
            for j in range(f):
                fx, fy = x * f + i, y * f + j
                for dx, dy in deltas:
                    if 0 <= fx + dx < cols * f and 0 <= fy + dy < rows * f:
                        fine += 1
    return {"MOVE": move, "TURN": 8, "smallTURN": 8, "smallMOVE_enter": enter, "smallMOVE_fine": fine,
            "empowering": 2, "total": move + 16 + enter + fine + 2}


def case_study(m):
    out = {"geometry": geometry_counts(m.doc)}
    s0 = m.initial
    vis0 = m.visible(s0)
    out["visible_initial"] = len(vis0)
    out["hidden_initial"] = len(m.hidden(s0))
    out["mission0_plain"] = m.bfs(s0, ["at_5_2"], vis0)
    out["achieve_small"] = m.bfs(s0, ["vis_smallMOVE", "vis_smallTURN"], vis0 + m.empowering())
    # Follow the plain plan; the first state matching a hazard source is the injection point.
    s, idx = s0, None
    for i, name in enumerate(out["mission0_plain"]):
        s = m.override(s, m.by_name[name]["eff"])
        hit = [h for h in m.hazards if m.holds(s, h["source"])]
        if hit:
            idx, rule, e = i + 1, hit[0], s
            break
    out["hazard_index"] = idx
    out["hazard_rule"] = rule["name"]
    c = m.override(e, rule["effect"])
    out["consequence"] = sorted(c)
    slippery = [h for h in m.hazards if "slippery" in h["tags"]]
    res = m.min_hidden(c, ["at_5_2"], m.visible(c), m.hidden(c), lambda t: m.is_source(t, slippery))
    out["min_hidden_robust"] = res[0]
    out["min_hidden_hidden_steps"] = res[1]
    # Mission 1 with small actions visible, robust w.r.t. the slippery class.
    s1 = state_of("at_5_2", "heading_N", "vis_move", "vis_smallMOVE", "vis_smallTURN", "sensorsCalibrated")
    out["mission1_robust_small"] = m.bfs(s1, ["at_0_4"], m.visible(s1), lambda t: m.is_source(t, slippery))
    return out


def mini(m, m_wall):
    out = {}
    s0 = m.initial
    vis0 = m.visible(s0)
    out["plain_0_0_to_2_0"] = m.bfs(s0, ["at_2_0"], vis0)
    out["robust_0_0_to_2_0"] = m.bfs(s0, ["at_2_0"], vis0, lambda t: m.is_source(t, m.hazards))
    small = s0 | {"vis_smallMOVE", "vis_smallTURN", "sensorsCalibrated"}
    out["reachable_initial_visible"] = len(m.reachable(s0, vis0))
    out["reachable_all"] = len(m.reachable(s0, m.actions))
    for label, model in (("mini", m), ("mini_wall", m_wall)):
        st = model.initial
        before = model.visible(st)
        st_small = st | {"vis_smallMOVE", "vis_smallTURN", "sensorsCalibrated"}
        after = model.visible(st_small)
        out[label + "_strength_L10"] = {
            "before": [model.count_plans(st, ["at_2_0"], before, 10),
                       model.count_plans(state_of("at_2_0", "heading_E", "vis_move"), ["at_0_2"], before, 10)],
            "after": [model.count_plans(st_small, ["at_2_0"], after, 10),
                      model.count_plans(state_of("at_2_0", "heading_E", "vis_move", "vis_smallMOVE",
                                                 "vis_smallTURN", "sensorsCalibrated"), ["at_0_2"], after, 10)],
        }
    return out


def main():
    root = Path(sys.argv[1] if len(sys.argv) > 1 else "scenarios")
    load = lambda n: Model(json.loads((root / n).read_text()))
    result = {
        "case_study": case_study(load("gridbot.json")),
        "mini": mini(load("mini.json"), load("mini-wall.json")),
    }
    print(json.dumps(result, indent=1))


if __name__ == "__main__":
    main()
