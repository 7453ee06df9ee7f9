"""Brute-force reference implementations used as test oracles.

Pure Python loops over rows and pairs; nothing here touches the Gram cache
or the vectorized code paths under test.
"""

import math


def naive_scale(x, kind):
    if kind == "identity":
        return 1.0
    if kind == "l1":
        return sum(abs(v) for v in x)
    if kind == "l2":
        return math.sqrt(sum(v * v for v in x))
    if kind == "linf":
        return max(abs(v) for v in x)
    raise ValueError(kind)


def naive_signs(X, kind, eps):
    rows = []
    for x in X:
        x = [float(v) for v in x]
        if kind == "identity":
            rows.append(x)
            continue
        d = naive_scale(x, kind)
        rows.append([v / d for v in x] if d > eps else [0.0] * len(x))
    return rows


def dot(x, y):
    return math.fsum(a * b for a, b in zip(x, y))


def naive_kernel(u, kind, a=0.0, b=1):
    return u if kind == "linear" else (u + a) ** b


def naive_centered(u, kind, a=0.0, b=1):
    return naive_kernel(u, kind, a, b) - naive_kernel(0.0, kind, a, b)


def naive_one_sample(S, kind="linear", a=0.0, b=1):
    n = len(S)
    terms = [naive_centered(dot(S[i], S[j]), kind, a, b) for i in range(n) for j in range(i + 1, n)]
    return math.fsum(terms) * 2.0 / (n * (n - 1))


def naive_two_sample(S1, S2, kind="linear", a=0.0, b=1):
    n1, n2 = len(S1), len(S2)
    k = lambda x, y: naive_centered(dot(x, y), kind, a, b)  # noqa: E731
    w1 = math.fsum(k(S1[i], S1[j]) for i in range(n1) for j in range(i + 1, n1))
    w2 = math.fsum(k(S2[i], S2[j]) for i in range(n2) for j in range(i + 1, n2))
    x12 = math.fsum(k(x, y) for x in S1 for y in S2)
    return 2 * w1 / (n1 * (n1 - 1)) + 2 * w2 / (n2 * (n2 - 1)) - 2 * x12 / (n1 * n2)


def naive_gram(S):
    n = len(S)
    return [[sum(S[i][k] * S[j][k] for k in range(len(S[i]))) for j in range(n)] for i in range(n)]


def central_difference_grad(f, x, h=1e-5):
    g = []
    for k in range(len(x)):
        xp = list(x)
        xm = list(x)
        xp[k] += h
        xm[k] -= h
        g.append((f(xp) - f(xm)) / (2 * h))
    return g
