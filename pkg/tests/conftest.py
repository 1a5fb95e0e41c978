"""Shared pytest hooks.

The acceptance tests are named ``test_criterion_NN_*``; after the run a
summary block prints one PASS/FAIL line per criterion so the gate can be
read at a glance without scrolling the full report.
"""

import re

CRITERIA = {
    1: "shortest_route matches exhaustive path enumeration on 100 random graphs",
    2: "connected_inundation matches a BFS oracle on 100 random 16x16 DEMs",
    3: "flood masks and blocked-edge sets grow monotonically (100 + 100 pairs)",
    4: "no returned route crosses a flooded cell (independent geometry checker)",
    5: "backup routes exclude newly closed edges and never beat the primary",
    6: "valley: 20 ft strictly contains 13 ft, an edge flips, a backup replaces",
    7: "color extraction marks exactly the (241,241,241) pixels; oracle-equal on 20 images",
    8: "grid, class grid, manifest, and route GeoJSON round-trip byte-identically",
    9: "CLI, HTTP handler, and library agree on routes and lodging",
    10: "100 concurrent reads during 5 reloads yield coherent single-version bodies",
}

_PATTERN = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    lines = {}
    for outcome, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL")):
        for report in terminalreporter.stats.get(outcome, []):
            location = getattr(report, "location", None)
            match = _PATTERN.search(location[2]) if location else None
            if match:
                number = int(match.group(1))
                lines[number] = f"{label} criterion {number}: {CRITERIA.get(number, location[2])}"
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
