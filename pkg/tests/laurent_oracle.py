"""Hand-coded cohomology of line bundles on the projective line.

Sections of O(n) over U = Spec k[t] are polynomials in t, over V = Spec k[s]
(with s = 1/t) they are polynomials in s, and on the overlap k[t, 1/t] a
section b(s) of V is compared with t^n b(1/t).  The Cech complex is

    k[t] + k[s] --(a, b) -> t^n b(1/t) - a--> k[t, 1/t]

and H^0, H^1 are its kernel and cokernel.  Everything is written out as a
matrix on a finite window of Laurent exponents that contains all the action,
and ranks are computed with fractions by plain elimination.  Nothing from the
library is used.
"""
from fractions import Fraction


def _rank(rows: list[list[Fraction]]) -> int:
    rows = [r[:] for r in rows if any(r)]
    rk = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rk, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for i in range(len(rows)):
            if i != rk and rows[i][c]:
                f = rows[i][c] / rows[rk][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rk])]
        rk += 1
    return rk


def line_bundle_cohomology(n: int, width: int | None = None) -> tuple[int, int]:
    """``(dim H^0(O(n)), dim H^1(O(n)))`` on the projective line."""
    W = width if width is not None else abs(n) + 3
    # Laurent exponents m in [n - W, W]; t^a with 0 <= a <= W, s^b with 0 <= b <= W
    exps = list(range(n - W, W + 1))
    row = {m: i for i, m in enumerate(exps)}
    cols = []
    for a in range(W + 1):
        v = [Fraction(0)] * len(exps)
        v[row[a]] = Fraction(-1)
        cols.append(v)
    for b in range(W + 1):
        v = [Fraction(0)] * len(exps)
        v[row[n - b]] = Fraction(1)
        cols.append(v)
    mat = [[cols[j][i] for j in range(len(cols))] for i in range(len(exps))]
    r = _rank(mat)
    return len(cols) - r, len(exps) - r
