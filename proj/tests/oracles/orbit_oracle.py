"""Independent orbit oracle for the frozen regression values.

Populations are reduced to skeletons (action, class tuple, terminal). Tags are
dropped because single-swap moves relabel tags freely, so every skeleton has
the same number of tagged preimages. One-point moves then act on skeletons.
With --merge-terminals, terminal copies are also reduced to their base label.
"""
import argparse
from fractions import Fraction


def moves(rows):
    sites = {}
    for r, (_, classes, _) in enumerate(rows):
        for k, c in enumerate(classes):
            sites.setdefault(c, []).append((r, k))
    for lst in sites.values():
        for x in range(len(lst)):
            for y in range(x + 1, len(lst)):
                (r, p), (s, q) = lst[x], lst[y]
                if r == s:
                    continue
                a1, c1, t1 = rows[r]
                a2, c2, t2 = rows[s]
                out = list(rows)
                out[r] = (a1, c1[:p] + c2[q:], t2)
                out[s] = (a2, c2[:q] + c1[p:], t1)
                yield tuple(out)


def orbit(p0):
    seen = {p0}
    frontier = [p0]
    while frontier:
        nxt = []
        for s in frontier:
            for n in moves(s):
                if n not in seen:
                    seen.add(n)
                    nxt.append(n)
        frontier = nxt
    return seen


def inflate(p, m, merge):
    return tuple((a, c, t if merge else (t, k)) for (a, c, t) in p for k in range(m))


def base(t):
    return t if isinstance(t, str) else t[0]


def frequency(members, b, action, classes, terminal):
    hits = sum(1 for s in members for (a, c, t) in s if a == action and c == classes and base(t) == terminal)
    return Fraction(hits, len(members) * b)


P_A = (("alpha", (1, 2), "f1"), ("alpha", (1, 2), "f2"), ("beta", (1, 2), "f3"))
P_B = (("alpha", (1, 2), "f1"), ("beta", (2, 1), "f2"))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--max-m", type=int, default=4)
    parser.add_argument("--merge-terminals", action="store_true")
    args = parser.parse_args()

    members = orbit(P_A)
    print("P_A skeletons", len(members), "(alpha,1,2,f1)", frequency(members, 3, "alpha", (1, 2), "f1"))
    for m in range(1, args.max_m + 1):
        members = orbit(inflate(P_B, m, args.merge_terminals))
        f = frequency(members, 2 * m, "alpha", (1, 2), "f1")
        print("inflate(P_B,%d)" % m, len(members), "skeletons", f, "gap", abs(f - Fraction(1, 8)), flush=True)


if __name__ == "__main__":
    main()
