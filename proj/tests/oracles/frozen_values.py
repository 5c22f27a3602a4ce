"""Independent exact-rational oracle for values frozen into the C++ tests.

Brute-force enumeration with fractions.Fraction; shares no code with the
library. Run with `python3 tests/oracles/frozen_values.py`.
"""
from fractions import Fraction as F
from itertools import product
from math import factorial


def rising(a, n):
    out = F(1)
    for i in range(n):
        out *= a + i
    return out


def compositions(N, L):
    if L == 1:
        yield (N,)
        return
    for n in range(N, -1, -1):
        for rest in compositions(N - n, L - 1):
            yield (n,) + rest


def stationary(N, L, theta):
    k = F(theta) / L
    w = {}
    for c in compositions(N, L):
        v = F(1)
        for n in c:
            v *= rising(k, n) / factorial(n)
        w[c] = v
    z = sum(w.values())
    return {c: v / z for c, v in w.items()}


def poly(coeffs, x):
    return sum(F(c) * x**a for a, c in enumerate(coeffs))


def moment_W(N, L, theta, factors):
    pi = stationary(N, L, theta)
    total = F(0)
    for c, p in pi.items():
        h = F(1)
        for g in factors:
            h *= sum(poly(g, F(i + 1, L)) * F(n, N) for i, n in enumerate(c))
        total += p * h
    return total


def set_partitions(elems):
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for p in set_partitions(rest):
        yield [[first]] + p
        for i in range(len(p)):
            yield p[:i] + [[first] + p[i]] + p[i + 1:]


def integrate(coeffs):
    return sum(F(c) / (a + 1) for a, c in enumerate(coeffs))


def polymul(a, b):
    out = [F(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += F(x) * F(y)
    return out


def moment_Z(theta, factors):
    theta = F(theta)
    k = len(factors)
    total = F(0)
    for p in set_partitions(list(range(k))):
        w = theta ** len(p) / rising(theta, k)
        for b in p:
            w *= factorial(len(b) - 1)
            g = [F(1)]
            for j in b:
                g = polymul(g, factors[j])
            w *= integrate(g)
        total += w
    return total


def shape(seq):
    counts = {}
    for s in seq:
        counts[s] = counts.get(s, 0) + 1
    return tuple(sorted(counts.values(), reverse=True))


def partition_law_W(N, L, theta, n):
    pi = stationary(N, L, theta)
    out = {}
    for c, p in pi.items():
        for seq in product(range(L), repeat=n):
            w = p
            for s in seq:
                w *= F(c[s], N)
            if w:
                key = shape(seq)
                out[key] = out.get(key, F(0)) + w
    return out


def esf(theta, n):
    theta = F(theta)
    out = {}
    for p in set_partitions(list(range(n))):
        w = theta ** len(p) / rising(theta, n)
        for b in p:
            w *= factorial(len(b) - 1)
        key = tuple(sorted((len(b) for b in p), reverse=True))
        out[key] = out.get(key, F(0)) + w
    return out


def show(name, v):
    print(f"{name} = {v} = {float(v)!r}")


if __name__ == "__main__":
    for c, p in sorted(stationary(3, 3, F(3, 2)).items()):
        show(f"stationary(3,3,1.5){c}", p)
    show("E<xy,W^2> (6,4,1)", moment_W(6, 4, 1, [[0, 1], [0, 1]]))
    show("E<x (x) x^2 (x) x, W^3> (4,3,1/2)", moment_W(4, 3, F(1, 2), [[0, 1], [0, 0, 1], [0, 1]]))
    show("E<x (x) x^2 (x) x, Z^3> theta=1/2", moment_Z(F(1, 2), [[0, 1], [0, 0, 1], [0, 1]]))
    show("E<(1+x) (x) x^2, Z^2> theta=2", moment_Z(2, [[1, 1], [0, 0, 1]]))
    show("E<x^{(x)4}, Z^4> theta=1", moment_Z(1, [[0, 1]] * 4))
    for key, v in sorted(partition_law_W(4, 3, 1, 3).items()):
        show(f"S_3(W) (4,3,1) {key}", v)
    w = partition_law_W(4, 3, 1, 3)
    z = esf(1, 3)
    show("TV (4,3,1) n=3", sum(abs(w.get(k, 0) - z.get(k, 0)) for k in set(w) | set(z)) / 2)
    for key, v in sorted(esf(F(1, 2), 4).items()):
        show(f"ESF(1/2, 4) {key}", v)
