#!/usr/bin/env python3
"""Generates the bundled office-style floorplans (env1.json ... env8.json).

Every building is a straight corridor with rooms on both sides. Walls are
emitted as axis-aligned rectangles on the 0.2 m grid, then (for the rotated
variant) turned about the building center. Run from any directory:

    python3 scenarios/generate.py
"""

import json
import math
import os

CELL = 0.2
EXT = 0.2        # exterior wall thickness
SEP = 0.4        # wall between neighbouring rooms
CORR_WALL = 0.2  # wall between a room and the corridor


def snap(v):
    return round(round(v / CELL) * CELL, 4)


class Plan:
    def __init__(self, name, top, bottom, depth_top, depth_bottom, corridor=2.0,
                 height=2.8, door=1.0, wall_scale=1.0):
        self.name = name
        self.top = top
        self.bottom = bottom
        self.depth_top = depth_top
        self.depth_bottom = depth_bottom
        self.corridor = corridor
        self.height = height
        self.door = door
        self.ext = EXT * wall_scale
        self.corr_wall = CORR_WALL * wall_scale
        self.rects = []      # (x0, y0, x1, y1, thickness axis)
        self.rooms = []      # list of polygons
        self.doors = []
        self.obstacles = []

    def row_width(self, widths):
        return sum(widths) + SEP * (len(widths) - 1)

    def build(self):
        wt = self.row_width(self.top)
        wb = self.row_width(self.bottom)
        assert abs(wt - wb) < 1e-9, (self.name, wt, wb)
        e, cw = self.ext, self.corr_wall
        X = snap(2 * e + wt)
        yb0 = e                                 # bottom rooms start
        yb1 = snap(yb0 + self.depth_bottom)     # bottom corridor wall starts
        yc0 = snap(yb1 + cw)                    # corridor interior
        yc1 = snap(yc0 + self.corridor)
        yt0 = snap(yc1 + cw)                    # top rooms start
        yt1 = snap(yt0 + self.depth_top)
        Y = snap(yt1 + e)
        self.size = (X, Y)
        self.corridor_y = (yc0, yc1)

        # exterior
        self.rects += [(0, 0, X, e), (0, Y - e, X, Y), (0, e, e, Y - e), (X - e, e, X, Y - e)]

        bottom_gaps = self._row(self.bottom, yb0, yb1, door_frac=0.3)
        top_gaps = self._row(self.top, yt0, yt1, door_frac=0.5)
        self._wall_with_gaps(yb1, yc0, bottom_gaps, X)
        self._wall_with_gaps(yc1, yt0, top_gaps, X)
        return self

    def _row(self, widths, y0, y1, door_frac):
        x = self.ext
        gaps = []
        for i, w in enumerate(widths):
            x0, x1 = snap(x), snap(x + w)
            self.rooms.append([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
            left = snap(max(x0 + 0.6, x0 + door_frac * w - self.door / 2))
            left = min(left, snap(x1 - 0.6 - self.door))
            gaps.append((left, snap(left + self.door)))
            if i + 1 < len(widths):
                self.rects.append((x1, y0, snap(x1 + SEP), y1))
            x = x1 + SEP
        return gaps

    def _wall_with_gaps(self, y0, y1, gaps, X):
        x = self.ext
        for g0, g1 in sorted(gaps):
            if g0 > x:
                self.rects.append((x, y0, g0, y1))
            self.doors.append([round((g0 + g1) / 2, 4), round((y0 + y1) / 2, 4)])
            x = g1
        if x < X - self.ext:
            self.rects.append((x, y0, X - self.ext, y1))

    def furnish(self):
        """Desks, shelves and cabinets placed against the walls of each room."""
        for k, poly in enumerate(self.rooms):
            (x0, y0), (x1, _), (_, y1) = poly[0], poly[1], poly[2]
            top = y0 > self.corridor_y[1]
            back = y1 if top else y0          # wall opposite the corridor
            sgn = -1 if top else 1
            # shelf along the back wall
            self.obstacles.append({"center": [snap((x0 + x1) / 2), back + sgn * 0.2],
                                   "size": [1.6, 0.4], "z": [0.0, 1.8]})
            # desk against a side wall
            side_x = x1 - 0.4 if k % 2 == 0 else x0 + 0.4
            self.obstacles.append({"center": [side_x, (y0 + y1) / 2],
                                   "size": [0.8, 1.2], "z": [0.0, 0.75]})
            # cabinet in the far corner
            cx = x1 - 0.3 if k % 2 else x0 + 0.3
            self.obstacles.append({"center": [cx, back + sgn * 0.3],
                                   "size": [0.6, 0.6], "z": [0.0, 1.2]})
        return self

    def to_doc(self, rotate_deg=0.0, margin=1.0):
        X, Y = self.size
        ang = math.radians(rotate_deg)
        c, s = math.cos(ang), math.sin(ang)
        cx, cy = X / 2, Y / 2

        def rot(p):
            dx, dy = p[0] - cx, p[1] - cy
            return [cx + c * dx - s * dy, cy + s * dx + c * dy]

        corners = [rot(p) for p in [(0, 0), (X, 0), (X, Y), (0, Y)]]
        minx = min(p[0] for p in corners)
        miny = min(p[1] for p in corners)
        maxx = max(p[0] for p in corners)
        maxy = max(p[1] for p in corners)
        off = (margin - minx, margin - miny) if rotate_deg else (0.0, 0.0)

        def tf(p):
            q = rot(p) if rotate_deg else list(p)
            return [round(q[0] + off[0], 3), round(q[1] + off[1], 3)]

        walls = []
        for (x0, y0, x1, y1) in self.rects:
            w, h = x1 - x0, y1 - y0
            if w >= h:   # horizontal: thickness is h
                a, b = (x0 + h / 2, (y0 + y1) / 2), (x1 - h / 2, (y0 + y1) / 2)
                t = h
            else:
                a, b = ((x0 + x1) / 2, y0 + w / 2), ((x0 + x1) / 2, y1 - w / 2)
                t = w
            walls.append({"start": tf(a), "end": tf(b), "thickness": round(t, 3)})

        obstacles = []
        for o in self.obstacles:
            d = dict(o)
            d["center"] = tf(o["center"])
            if rotate_deg:
                d["yaw"] = round(ang, 6)
            obstacles.append(d)

        if rotate_deg:
            ext = [snap(maxx - minx + 2 * margin + CELL), snap(maxy - miny + 2 * margin + CELL)]
        else:
            ext = [X, Y]
        yc = sum(self.corridor_y) / 2
        spawns = [tf((self.ext + 0.7, yc + dy)) + [1.0, round(ang, 6)] for dy in (-0.5, 0.0, 0.5)]
        return {
            "name": self.name,
            "cell_size": CELL,
            "extents": [ext[0], ext[1], self.height],
            "duration": 120.0,
            "walls": walls,
            "obstacles": obstacles,
            "rooms": [{"id": i + 1, "polygon": [tf(p) for p in poly]}
                      for i, poly in enumerate(self.rooms)],
            "spawns": spawns,
            "doors": [tf(d) for d in self.doors],
        }


def plans():
    yield "env1", Plan("env1", [5.8] * 3, [5.8] * 3, 5.0, 5.0).build().to_doc()
    yield "env2", Plan("env2", [5.0] * 4, [5.0] * 4, 5.6, 5.0, height=3.0).build().to_doc()
    yield "env3", Plan("env3", [5.0] * 3, [7.6, 7.8], 5.0, 6.0).build().to_doc()
    yield "env4", Plan("env4", [4.6] * 5, [5.8, 5.8, 6.0, 5.8], 4.8, 5.4).build().to_doc()
    yield "env5", Plan("env5", [4.6] * 6, [4.6] * 6, 4.6, 4.6, corridor=2.2).build().to_doc()
    yield "env6", Plan("env6", [7.0] * 5, [8.8, 8.8, 9.0, 8.8], 7.0, 8.0, corridor=2.4,
                       height=3.0, door=1.2).build().to_doc()
    yield "env7", Plan("env7", [5.4] * 5, [5.4] * 5, 5.2, 5.2).build().furnish().to_doc()
    yield "env8", Plan("env8", [4.6] * 6, [4.6] * 6, 4.6, 4.6, corridor=2.2,
                       wall_scale=2.0).build().to_doc(rotate_deg=30.0)


def main():
    here = os.path.dirname(os.path.abspath(__file__))
    for name, doc in plans():
        with open(os.path.join(here, name + ".json"), "w") as f:
            json.dump(doc, f, indent=1)
            f.write("\n")
        print(name, len(doc["rooms"]), "rooms", len(doc["doors"]), "doors",
              "extents", doc["extents"])


if __name__ == "__main__":
    main()
