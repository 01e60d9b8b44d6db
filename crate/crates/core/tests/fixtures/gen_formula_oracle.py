"""Writes formula_oracle.json: random inputs and 50-digit reference outputs."""

import json
import random

from mpmath import mp, mpf, cos, sqrt, pi

mp.dps = 50
rng = random.Random(20240611)
N = 100


def f(x):
    return float(x)


def uni(a, b):
    return rng.uniform(a, b)


def signed(a, b):
    return uni(a, b) * rng.choice((-1.0, 1.0))


def rad(deg):
    return mpf(deg) * pi / 180


cases = {}

rows = []
for _ in range(N):
    fx, b, d = uni(100, 2000), uni(0.01, 0.5), uni(0.03125, 64)
    rows.append({"in": [fx, b, d], "out": [f(mpf(fx) * mpf(b) / mpf(d))]})
cases["disparity_to_depth"] = rows

rows = []
for _ in range(N):
    fx, b, z = uni(100, 2000), uni(0.01, 0.5), uni(0.1, 50)
    rows.append({"in": [fx, b, z], "out": [f(mpf(fx) * mpf(b) / mpf(z))]})
cases["depth_to_disparity"] = rows

rows = []
for _ in range(N):
    z, eps, fb = uni(0.1, 20), uni(0.01, 1), uni(5, 200)
    e = mpf(z) ** 2 * mpf(eps) / mpf(fb)
    rows.append({"in": [z, eps, fb], "out": [f(e), f(e / mpf(z))]})
cases["depth_rms"] = rows

rows = []
for _ in range(N):
    d = uni(1.5, 120)
    rows.append({"in": [d], "out": [f(-mpf(d) / (2 * mpf(d) ** 2 - 1))]})
cases["planar_bias"] = rows

rows = []
for _ in range(N):
    r95, a, tt, tf = uni(0.5, 20), uni(0.01, 1), uni(0, 85), uni(0, 85)
    r = mpf(r95) * sqrt(cos(rad(tt)) * mpf(a) * cos(rad(tf)) ** 7)
    rows.append({"in": [r95, a, tt, tf], "out": [f(r)]})
cases["expected_range"] = rows

rows = []
for _ in range(N):
    r, fr, fps = uni(0.5, 20), uni(5, 120), uni(5, 120)
    rows.append({"in": [r, fr, fps], "out": [f(mpf(r) * sqrt(mpf(fr) / mpf(fps)))]})
cases["framerate_range_scale"] = rows

rows = []
for _ in range(N):
    xn, yn = signed(0.05, 0.8), signed(0.05, 0.8)
    k1, k2, k3 = signed(0, 0.3), signed(0, 0.1), signed(0, 0.05)
    p1, p2 = signed(0, 0.01), signed(0, 0.01)
    X, Y = mpf(xn), mpf(yn)
    r2 = X * X + Y * Y
    rho = 1 + mpf(k1) * r2 + mpf(k2) * r2 ** 2 + mpf(k3) * r2 ** 3
    x, y = X * rho, Y * rho
    rr2 = x * x + y * y
    xd = x + 2 * mpf(p1) * x * y + mpf(p2) * (rr2 + 2 * x * x)
    yd = y + mpf(p1) * (rr2 + 2 * y * y) + 2 * mpf(p2) * x * y
    rows.append({"in": [xn, yn, k1, k2, k3, p1, p2], "out": [f(xd), f(yd)]})
cases["distort_point"] = rows

rows = []
for _ in range(N):
    fx, fy = uni(100, 2000), uni(100, 2000)
    cx, cy = uni(100, 400), uni(100, 300)
    x, y, z = uni(0, 640), uni(0, 480), uni(0.1, 20)
    X = (mpf(x) - mpf(cx)) * mpf(z) / mpf(fx)
    Y = (mpf(y) - mpf(cy)) * mpf(z) / mpf(fy)
    rows.append({"in": [x, y, z, fx, fy, cx, cy], "out": [f(X), f(Y), z]})
cases["deproject"] = rows

rows = []
for _ in range(N):
    fx, b = uni(100, 2000), uni(0.01, 0.5)
    fb = mpf(fx) * mpf(b)
    rows.append({"in": [fx, b], "out": [f(fb / (63 + mpf(31) / 32)), f(fb * 32)]})
cases["operating_range"] = rows

with open("formula_oracle.json", "w") as fh:
    json.dump(cases, fh, indent=1)
    fh.write("\n")
