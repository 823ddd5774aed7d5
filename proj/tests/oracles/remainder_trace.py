"""Dense reference run of the counter-based synthesizer on a 2x3 domain.

Zero noise, argmax selection (lowest index on ties), k = 1, simple counters,
one MW pass. Prints the per-step selections, counters, remainders and
measurements frozen into the C++ trace test.
"""
import itertools
import math

CARDS = (2, 3)
POINTS = list(itertools.product(*[range(c) for c in CARDS]))
WORKLOADS = [(0,), (1,)]


def cells(w, d):
    size = math.prod(CARDS[c] for c in w)
    out = [0.0] * size
    for x, v in zip(POINTS, d):
        idx = 0
        for c in w:
            idx = idx * CARDS[c] + x[c]
        out[idx] += v
    return out


def cell_of(w, x):
    idx = 0
    for c in w:
        idx = idx * CARDS[c] + x[c]
    return idx


def mw_workload(h, w, measured, mass):
    h = list(h)
    for c, m in enumerate(measured):
        q = sum(v for x, v in zip(POINTS, h) if cell_of(w, x) == c)
        e = (m - q) / (2 * mass)
        h = [v * math.exp(e) if cell_of(w, x) == c else v
             for x, v in zip(POINTS, h)]
        s = sum(h)
        h = [v * mass / s for v in h]
    return h


def run(deltas):
    g = [1.0] * len(POINTS)
    counters, prev_r, trace = {}, {}, []
    for t, delta in enumerate(deltas, start=1):
        mass = sum(delta) + sum(g)
        surrogate = [[a + b for a, b in zip(cells(w, delta), cells(w, g))]
                     for w in WORKLOADS]
        h = [v * mass / sum(g) for v in g]
        util = []
        for i, w in enumerate(WORKLOADS):
            hc = cells(w, h)
            util.append(sum(abs(a - b) for a, b in zip(surrogate[i], hc)) /
                        len(hc) - len(hc))
        j = max(range(len(util)), key=lambda i: (util[i], -i))
        w = WORKLOADS[j]
        c_prev = counters.get(j, [0.0] * len(cells(w, delta)))
        if t == 1:
            r = [0.0] * len(c_prev)
        elif j in prev_r:
            r = prev_r[j]
        else:
            r = [a - b for a, b in zip(cells(w, g), c_prev)]
        q_g_prev = cells(w, g)
        counters[j] = [a + b for a, b in zip(c_prev, cells(w, delta))]
        m = [a + b for a, b in zip(counters[j], r)]
        h = mw_workload(h, w, m, mass)
        trace.append(dict(t=t, selected=j, c_prev=c_prev, q_g_prev=q_g_prev,
                          counter=counters[j], r=r, m=m, g=h))
        prev_r = {j: r}
        g = h
    return trace


def delta_of(points):
    d = [0.0] * len(POINTS)
    for p in points:
        d[POINTS.index(p)] += 1.0
    return d


if __name__ == "__main__":
    deltas = [
        delta_of([(0, 0)] * 6 + [(1, 1)] * 2),
        delta_of([(0, 2)] * 9 + [(1, 2)] * 9),
        delta_of([(1, 0)] * 7 + [(1, 1)]),
    ]
    for row in run(deltas):
        print(row["t"], "selected", row["selected"])
        for k in ("c_prev", "q_g_prev", "counter", "r", "m", "g"):
            print("  ", k, ", ".join(repr(v) for v in row[k]))
