"""Independent reference computations used to freeze expected values.

Nothing here imports the package's own algorithms.
"""

from fractions import Fraction


def godel_sum(word, digit_of, base):
    # literal sum over k of g(w_k) * b**k, w_0 being the last symbol
    return sum(digit_of[s] * base**k for k, s in enumerate(reversed(word)))


def simulate(rules, start, halting, blank, word, budget):
    """Dict-tape Turing machine. Returns [(state, tape_string, head), ...]."""
    cells = {i: s for i, s in enumerate(word)}
    state, head = start, 0
    out = []

    def snapshot():
        last = max([i for i, s in cells.items() if s != blank] + [head, 0])
        return (state, "".join(cells.get(i, blank) for i in range(last + 1)), head)

    out.append(snapshot())
    for _ in range(budget):
        if state in halting:
            break
        sym = cells.get(head, blank)
        if (state, sym) not in rules:
            state = halting[-1]
            out.append(snapshot())
            continue
        state, write, move = rules[(state, sym)]
        cells[head] = write
        head = head + 1 if move == "R" else (head - 1 if head > 0 else 0)
        out.append(snapshot())
    return out


def newton_pairs(n):
    # x = p/q, x' = (x + 2/x)/2 = (p*p + 2*q*q) / (2*p*q)
    p, q = 1, 1
    out = [Fraction(p, q)]
    for _ in range(n):
        p, q = p * p + 2 * q * q, 2 * p * q
        out.append(Fraction(p, q))
    return out


def all_pairs_cauchy_n(points, eps, min_tail=2):
    """Brute force over every N and every pair (m, n)."""
    last = len(points) - 1
    for N in range(0, last + 1):
        tail = list(range(N + 1, last + 1))
        if len(tail) < min_tail:
            return None
        if all(abs(points[m] - points[k]) < eps for m in tail for k in tail):
            return N
    return None


def in_intervals(x, intervals):
    return any(a <= x <= b for a, b in intervals)


def cantor_intervals(depth):
    """Triadic intervals with no digit 1 in their first `depth` ternary digits."""
    out = []
    for code in range(2**depth):
        lo = Fraction(0)
        for k in range(depth):
            if code >> (depth - 1 - k) & 1:
                lo += Fraction(2, 3 ** (k + 1))
        out.append((lo, lo + Fraction(1, 3**depth)))
    return sorted(out)


def brute_box_count(intervals, scale_power, base=3):
    """Check every box of width base**-s against every interval."""
    size = base**scale_power
    count = 0
    for j in range(size):
        a, b = Fraction(j, size), Fraction(j + 1, size)
        for lo, hi in intervals:
            if lo < hi:
                hit = max(a, lo) < min(b, hi)
            else:
                hit = a <= lo <= b
            if hit:
                count += 1
                break
    return count
