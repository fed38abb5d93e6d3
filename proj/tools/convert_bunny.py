"""Convert the Stanford bunny from the npm `bunny` package (public domain)
into data/objects/bunny.obj: z up, 12 cm tall, resting on z = 0, centered in xy.

usage: python3 tools/convert_bunny.py path/to/bunny/index.js data/objects/bunny.obj
"""
import json
import re
import sys


def main(src, dst):
    text = open(src).read()
    positions = json.loads(re.search(r"exports\.positions\s*=\s*(\[.*?\]\])", text, re.S).group(1))
    cells = json.loads(re.search(r"exports\.cells\s*=\s*(\[.*?\]\])", text, re.S).group(1))
    # The source is y-up; a quarter turn about x maps y to z.
    pts = [(x, -z, y) for x, y, z in positions]
    zmin = min(p[2] for p in pts)
    zmax = max(p[2] for p in pts)
    scale = 0.12 / (zmax - zmin)
    cx = 0.5 * (min(p[0] for p in pts) + max(p[0] for p in pts))
    cy = 0.5 * (min(p[1] for p in pts) + max(p[1] for p in pts))
    with open(dst, "w") as out:
        out.write("# Stanford bunny (public domain), z up, 0.12 m tall\n")
        for x, y, z in pts:
            out.write("v %.9g %.9g %.9g\n" % ((x - cx) * scale, (y - cy) * scale, (z - zmin) * scale))
        for a, b, c in cells:
            out.write("f %d %d %d\n" % (a + 1, b + 1, c + 1))


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
