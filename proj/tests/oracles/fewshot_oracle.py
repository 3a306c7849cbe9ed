# Copyright 2026 The ptrkit Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent reimplementation of the seeded streams and the few-shot sampler.

Prints the values frozen in tests/unit/test_rng.cpp and
tests/unit/test_trainer.cpp. Pure Python; run with python3.
"""

import math

MASK64 = (1 << 64) - 1


class MT19937_64:
    n, m = 312, 156
    matrix_a = 0xB5026F5AA96619E9
    upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF

    def __init__(self, seed):
        self.mt = [0] * self.n
        self.mt[0] = seed & MASK64
        for i in range(1, self.n):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK64
        self.index = self.n

    def _twist(self):
        for i in range(self.n):
            x = (self.mt[i] & self.upper) | (self.mt[(i + 1) % self.n] & self.lower)
            xa = x >> 1
            if x & 1:
                xa ^= self.matrix_a
            self.mt[i] = self.mt[(i + self.m) % self.n] ^ xa
        self.index = 0

    def next(self):
        if self.index >= self.n:
            self._twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> 29) & 0x5555555555555555
        y ^= (y << 17) & 0x71D67FFFEDA60000
        y ^= (y << 37) & 0xFFF7EEE000000000
        y ^= y >> 43
        return y & MASK64


class Rng:
    def __init__(self, seed):
        self.engine = MT19937_64(seed)
        self.spare = None

    def uniform_index(self, n):
        if n <= 1:
            return 0
        threshold = (-n) % (1 << 64) % n
        while True:
            x = self.engine.next()
            if x >= threshold:
                return x % n

    def uniform01(self):
        return (self.engine.next() >> 11) * 2.0 ** -53

    def normal(self):
        if self.spare is not None:
            s, self.spare = self.spare, None
            return s
        u1 = self.uniform01()
        while u1 <= 0.0:
            u1 = self.uniform01()
        u2 = self.uniform01()
        r = math.sqrt(-2.0 * math.log(u1))
        a = 2.0 * math.pi * u2
        self.spare = r * math.sin(a)
        return r * math.cos(a)


def derive_seed(base, stream):
    z = (base + 0x9E3779B97F4A7C15 * (stream + 1)) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def pool(n, n_classes, prefix):
    """Instance i has id prefix+str(i) and class i % n_classes."""
    return [(prefix + str(i), "c%d" % (i % n_classes)) for i in range(n)]


def draw_per_class(data, classes, k, rng):
    out = []
    for label in classes:
        idx = [i for i, (_, lab) in enumerate(data) if lab == label]
        m = len(idx)
        draws = min(k, m)
        for i in range(draws):
            j = i + rng.uniform_index(m - i)
            idx[i], idx[j] = idx[j], idx[i]
        out.extend(data[idx[i]][0] for i in range(draws))
    return out


def two_pool(train, dev, classes, k, seed):
    return (draw_per_class(train, classes, k, Rng(derive_seed(seed, 0))),
            draw_per_class(dev, classes, k, Rng(derive_seed(seed, 1))))


def single_pool(data, classes, k, seed):
    rng = Rng(seed)
    tr, dv = [], []
    for label in classes:
        idx = [i for i, (_, lab) in enumerate(data) if lab == label]
        m = len(idx)
        draws = min(2 * k, m)
        for i in range(draws):
            j = i + rng.uniform_index(m - i)
            idx[i], idx[j] = idx[j], idx[i]
        for i in range(draws):
            (tr if i < k else dv).append(data[idx[i]][0])
    return tr, dv


def main():
    print("mt19937_64(5489) 10000th:", end=" ")
    e = MT19937_64(5489)
    for _ in range(9999):
        e.next()
    print(e.next())
    r = Rng(42)
    print("Rng(42).next x3:", [r.engine.next() for _ in range(3)])
    r = Rng(7)
    print("Rng(7).uniform_index(10) x8:", [r.uniform_index(10) for _ in range(8)])
    r = Rng(7)
    print("Rng(7).uniform01 x3:", [repr(r.uniform01()) for _ in range(3)])
    r = Rng(3)
    print("Rng(3).normal x4:", [repr(r.normal()) for _ in range(4)])
    print("derive_seed:", [derive_seed(13, 0), derive_seed(13, 1), derive_seed(13, 2), derive_seed(0, 0)])

    classes = ["c0", "c1", "c2"]
    train = pool(60, 3, "t")
    dev = pool(30, 3, "d")
    for seed in (13, 21, 42, 87, 100):
        for k in (2, 4):
            tr, dv = two_pool(train, dev, classes, k, seed)
            print("two_pool seed=%d k=%d train=%s dev=%s" % (seed, k, ",".join(tr), ",".join(dv)))
    for seed in (13, 21, 42, 87, 100):
        tr, dv = single_pool(train, classes, 3, seed)
        print("single_pool seed=%d k=3 train=%s dev=%s" % (seed, ",".join(tr), ",".join(dv)))


if __name__ == "__main__":
    main()
