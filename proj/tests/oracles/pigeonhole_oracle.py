"""Independent brute-force oracle for frozen test values.

Enumerates all assignments of small pigeonhole / pairwise models, scores them
directly from the clause definitions and computes orbits under the explicit
variable actions (pigeon permutations x hole permutations, or the wreath
product for the quantum variant). Nothing here touches the C++ code.
"""
import itertools
import math


def pigeonhole(n, m, w=2.0, hard=True):
    var = lambda i, j: j * n + i
    hard_cl = []
    soft_cl = []
    if hard:
        for i in range(n):
            for k, l in itertools.combinations(range(m), 2):
                hard_cl.append((var(i, k), var(i, l)))
    for j in range(m):
        for k, l in itertools.combinations(range(n), 2):
            soft_cl.append((var(k, j), var(l, j)))
    return n * m, hard_cl, soft_cl, w


def score(model, x):
    nv, hard_cl, soft_cl, w = model
    for a, b in hard_cl:
        if x[a] and x[b]:
            return -math.inf
    return sum(w for a, b in soft_cl if not (x[a] and x[b]))


def logsumexp(v):
    v = [t for t in v if t != -math.inf]
    mx = max(v)
    return mx + math.log(sum(math.exp(t - mx) for t in v))


def orbits(nv, perms):
    seen = {}
    classes = []
    for s in itertools.product([0, 1], repeat=nv):
        if s in seen:
            continue
        cls = set()
        for p in perms:
            t = [0] * nv
            for i in range(nv):
                t[p[i]] = s[i]
            cls.add(tuple(t))
        for t in cls:
            seen[t] = len(classes)
        classes.append(cls)
    return classes


def ph_group(n, m):
    perms = []
    for pp in itertools.permutations(range(n)):
        for hp in itertools.permutations(range(m)):
            img = [0] * (n * m)
            for i in range(n):
                for j in range(m):
                    img[j * n + i] = hp[j] * n + pp[i]
            perms.append(img)
    return perms


def quantum_group(n):
    # (S_n x S_n) x| S_2 on variables x_{i,j} = j*n+i
    perms = []
    for p0 in itertools.permutations(range(n)):
        for p1 in itertools.permutations(range(n)):
            for sw in (0, 1):
                img = [0] * (2 * n)
                for i in range(n):
                    img[i] = sw * n + p0[i]
                    img[n + i] = (1 - sw) * n + p1[i]
                perms.append(img)
    return perms


def pairwise_group(n):
    perms = []
    for p in itertools.permutations(range(1, n)):
        perms.append([0] + list(p))
    return perms


if __name__ == "__main__":
    m = pigeonhole(3, 2)
    cls = orbits(6, ph_group(3, 2))
    print("ph(3,2) orbits", len(cls), sorted(len(c) for c in cls))
    allx = list(itertools.product([0, 1], repeat=6))
    lz = logsumexp([score(m, x) for x in allx])
    print("ph(3,2) logZ %.17g Z %.17g" % (lz, math.exp(lz)))
    print("ph(3,2) P(0 true) %.17g" % math.exp(12 - lz))
    best = max(score(m, x) for x in allx)
    print("ph(3,2) max score", best, "argmax count", sum(1 for x in allx if score(m, x) == best))
    print("ph(3,2) score all-false", score(m, (0,) * 6))
    q = pigeonhole(3, 2, hard=False)
    lzq = logsumexp([score(q, x) for x in allx])
    print("qph(3,2) P(0 true) %.17g" % math.exp(12 - lzq))
    print("qph(3,2) orbits", len(orbits(6, quantum_group(3))))
    for n in (2, 3, 4, 5):
        print("ph(%d,2) orbits %d  qph orbits %d |G| %d |Gq| %d" % (
            n, len(orbits(2 * n, ph_group(n, 2))), len(orbits(2 * n, quantum_group(n))),
            len(ph_group(n, 2)), len(quantum_group(n))))
    for n in range(2, 9):
        print("pairwise(%d) orbits %d" % (n, len(orbits(n, pairwise_group(n)))))
    print("steps_for_epsilon(13, 0.01) =", math.ceil(math.log(100) * 13))
