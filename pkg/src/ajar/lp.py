"""Small dense simplex for fractional edge covers.

The cover LP (minimize Σ x_F·c_F with every bag attribute covered) is solved
through its packing dual, which starts feasible from the all-slack basis.
Unit-cost mode runs over exact Fractions so widths compare bit-exactly;
data-aware mode runs over floats with a fixed tolerance.  Bland's rule
prevents cycling in both modes.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InternalError


def maximize(
    objective: Sequence, rows: Sequence[Sequence], rhs: Sequence, exact: bool
):
    """Maximize objective·y subject to rows·y <= rhs, y >= 0 (rhs >= 0).

    Returns the optimal objective value.
    """
    n = len(objective)
    m = len(rows)
    if exact:
        conv = Fraction
        tol = Fraction(0)
    else:
        conv = float
        tol = 1e-9
    # tableau rows: [coeffs | slacks | rhs]; objective row keeps -coeffs
    tab = [
        [conv(rows[i][j]) for j in range(n)]
        + [conv(1) if k == i else conv(0) for k in range(m)]
        + [conv(rhs[i])]
        for i in range(m)
    ]
    obj = [-conv(objective[j]) for j in range(n)] + [conv(0)] * (m + 1)
    basis = [n + i for i in range(m)]

    for _ in range(10_000):
        entering = next((j for j in range(n + m) if obj[j] < -tol), None)
        if entering is None:
            return obj[-1]
        pivot_row, best = None, None
        for i in range(m):
            coeff = tab[i][entering]
            if coeff > tol:
                ratio = tab[i][-1] / coeff
                if best is None or ratio < best or (ratio == best and basis[i] < basis[pivot_row]):
                    pivot_row, best = i, ratio
        if pivot_row is None:
            raise InternalError("unbounded cover LP: bag attribute in no edge")
        coeff = tab[pivot_row][entering]
        tab[pivot_row] = [v / coeff for v in tab[pivot_row]]
        for i in range(m):
            if i != pivot_row and tab[i][entering] != 0:
                factor = tab[i][entering]
                tab[i] = [v - factor * p for v, p in zip(tab[i], tab[pivot_row])]
        if obj[entering] != 0:
            factor = obj[entering]
            obj = [v - factor * p for v, p in zip(obj, tab[pivot_row])]
        basis[pivot_row] = entering
    raise InternalError("simplex failed to converge")


def fractional_cover_value(
    bag: frozenset[str],
    cost_edges: Sequence[tuple[frozenset[str], object]],
    exact: bool,
):
    """Optimal value of the fractional edge cover LP for one bag.

    cost_edges pairs each edge's attribute set with its cost (1 in unit mode,
    log_IN of the relation size in data-aware mode).
    """
    if not bag:
        return Fraction(0) if exact else 0.0
    attrs = sorted(bag)
    useful = [(e & bag, c) for e, c in cost_edges if e & bag]
    covered = set().union(*(e for e, _ in useful)) if useful else set()
    if covered != bag:
        raise InternalError(f"attributes {bag - covered} not covered by any edge")
    objective = [1] * len(attrs)
    rows = [[1 if a in e else 0 for a in attrs] for e, _ in useful]
    rhs = [c for _, c in useful]
    return maximize(objective, rows, rhs, exact=exact)
