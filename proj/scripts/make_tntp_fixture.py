#!/usr/bin/env python3
"""Generates the benchmark-scale TNTP fixture under data/anaheim/.

The layout mirrors the published Anaheim benchmark dimensions (38 zone
centroids, 416 nodes, 914 directed links, quartic BPR with B = 0.15)
with a deterministic synthetic topology: a snake cycle over an 18x21
grid of through nodes in both directions, 41 bidirectional cross
chords, and two connector links per zone centroid. The real benchmark
files from the TransportationNetworks repository are drop-in
replacements.
"""

import os

R, C = 18, 21
N_ZONES = 38
N_THRU = R * C
N_NODES = N_ZONES + N_THRU
FIRST_THRU = N_ZONES + 1
N_CHORDS = 41


def lcg_stream(seed):
    state = seed
    while True:
        state = (state * 6364136223846793005 + 1442695040888963407) % 2**64
        yield state / 2**64


def main():
    # snake order over the grid: node id FIRST_THRU + k sits at pos[k]
    pos = []
    for r in range(R):
        cols = range(C) if r % 2 == 0 else range(C - 1, -1, -1)
        for c in cols:
            pos.append((r, c))
    node_at = {rc: FIRST_THRU + k for k, rc in enumerate(pos)}
    snake_index = {FIRST_THRU + k: k for k in range(N_THRU)}

    links = []  # (tail, head)
    for k in range(N_THRU):
        a = FIRST_THRU + k
        b = FIRST_THRU + (k + 1) % N_THRU
        links.append((a, b))
        links.append((b, a))

    verticals = []
    for r in range(R - 1):
        for c in range(C):
            a, b = node_at[(r, c)], node_at[(r + 1, c)]
            gap = abs(snake_index[a] - snake_index[b])
            if gap != 1 and gap != N_THRU - 1:
                verticals.append((a, b))
    stride = len(verticals) // N_CHORDS
    chords = verticals[::stride][:N_CHORDS]
    assert len(chords) == N_CHORDS
    for a, b in chords:
        links.append((a, b))
        links.append((b, a))

    attach = {}
    for z in range(1, N_ZONES + 1):
        g = FIRST_THRU + round((z - 0.5) * N_THRU / N_ZONES)
        attach[z] = g
        links.append((z, g))
        links.append((g, z))

    assert len(links) == 914, len(links)
    assert max(max(a, b) for a, b in links) == N_NODES

    rnd = lcg_stream(20240817)
    rows = []
    for tail, head in links:
        if tail <= N_ZONES or head <= N_ZONES:
            cap, fft = 3000.0, 0.3
        else:
            cap = 800.0 + round(next(rnd) * 1200.0, 1)
            fft = round(0.6 + next(rnd) * 1.2, 4)
        rows.append((tail, head, cap, 1.0, fft, 0.15, 4, 0, 0, 1))

    out_dir = os.path.join(os.path.dirname(__file__), "..", "data", "anaheim")
    os.makedirs(out_dir, exist_ok=True)

    with open(os.path.join(out_dir, "anaheim_net.tntp"), "w") as f:
        f.write("<NUMBER OF ZONES> %d\n" % N_ZONES)
        f.write("<NUMBER OF NODES> %d\n" % N_NODES)
        f.write("<FIRST THRU NODE> %d\n" % FIRST_THRU)
        f.write("<NUMBER OF LINKS> %d\n" % len(rows))
        f.write("<END OF METADATA>\n\n")
        f.write("~ \tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n")
        for row in rows:
            f.write("\t" + "\t".join(str(v) for v in row) + "\t;\n")

    demands = {
        1: {20: 600.0, 33: 0.0},
        5: {30: 520.0},
        12: {2: 450.0},
        25: {38: 480.0},
        3: {3: 100.0},  # intrazonal, dropped by the parser
    }
    total = sum(v for block in demands.values() for v in block.values())
    with open(os.path.join(out_dir, "anaheim_trips.tntp"), "w") as f:
        f.write("<NUMBER OF ZONES> %d\n" % N_ZONES)
        f.write("<TOTAL OD FLOW> %s\n" % total)
        f.write("<END OF METADATA>\n\n")
        for origin in sorted(demands):
            f.write("Origin %d\n" % origin)
            for dest in sorted(demands[origin]):
                f.write("    %d :    %s;\n" % (dest, demands[origin][dest]))
            f.write("\n")

    jitter = lcg_stream(911)
    with open(os.path.join(out_dir, "anaheim_node.tntp"), "w") as f:
        f.write("node\tX\tY\t;\n")
        coords = {}
        for k, (r, c) in enumerate(pos):
            x = c + round(0.2 * (next(jitter) - 0.5), 3)
            y = r + round(0.2 * (next(jitter) - 0.5), 3)
            coords[FIRST_THRU + k] = (x, y)
        for z in range(1, N_ZONES + 1):
            gx, gy = coords[attach[z]]
            coords[z] = (round(gx + 0.35, 3), round(gy + 0.35, 3))
        for node in range(1, N_NODES + 1):
            x, y = coords[node]
            f.write("%d\t%s\t%s\t;\n" % (node, x, y))

    print("wrote 914-link fixture to", out_dir)


if __name__ == "__main__":
    main()
