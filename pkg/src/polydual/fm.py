"""Projection of polyhedra by Fourier-Motzkin elimination.

Equalities are used for substitution first; inequalities are then eliminated
one variable at a time with Chernikov's origin-set rule to discard most
redundant combinations early, and an LP pass prunes whatever is left.
"""
from __future__ import annotations

from typing import Sequence

from gmpy2 import mpq

from . import lp
from .errors import InputError
from .polyhedron import Polyhedron, prune
from .rational import from_mpq, to_mpq

_ZERO = mpq(0)
# rebuild-and-prune when a single elimination step leaves more rows than this
_PRUNE_THRESHOLD = 60


def _normalize(row):
    """Scale an mpq row (coeffs + rhs) so the first nonzero coefficient has modulus 1."""
    for v in row[:-1]:
        if v:
            s = abs(v)
            return [x / s for x in row] if s != 1 else row
    return row


def _dedupe(rows, origins):
    best = {}
    for row, org in zip(rows, origins):
        key = tuple(row[:-1])
        prev = best.get(key)
        if prev is None or row[-1] < prev[0][-1] or (row[-1] == prev[0][-1] and len(org) < len(prev[1])):
            best[key] = (row, org)
    return [r for r, _ in best.values()], [o for _, o in best.values()]


def _lp_prune(rows, origins, eqs):
    """Drop rows implied by the others (rows are ``coeffs + [rhs]`` in mpq)."""
    E = [e[:-1] for e in eqs]
    d = [e[-1] for e in eqs]
    keep = list(range(len(rows)))
    i = 0
    while i < len(keep):
        r = rows[keep[i]]
        others = keep[:i] + keep[i + 1:]
        A = [rows[k][:-1] for k in others]
        b = [rows[k][-1] for k in others]
        status, _, val, *_ = lp.solve_mpq(r[:-1], A, b, E, d, "max")
        if status == lp.OPTIMAL and val <= r[-1]:
            keep = others
        elif status == lp.INFEASIBLE:
            return None, None
        else:
            i += 1
    return [rows[k] for k in keep], [origins[k] for k in keep]


def eliminate(ineqs: list, eqs: list, drop: set, nvars: int):
    """Eliminate the variables in ``drop`` from mpq rows ``coeffs + [rhs]``.

    Returns ``(ineqs, eqs)`` still indexed over all ``nvars`` columns (dropped
    columns are zero), or ``None`` if infeasibility was detected on the way.
    """
    ineqs = [list(r) for r in ineqs]
    eqs = [list(r) for r in eqs]
    # substitution through equalities
    for j in sorted(drop):
        piv = next((e for e in eqs if e[j]), None)
        if piv is None:
            continue
        eqs.remove(piv)
        p = piv[j]
        piv = [v / p for v in piv]
        for rows in (ineqs, eqs):
            for k, r in enumerate(rows):
                f = r[j]
                if f:
                    rows[k] = [u - f * v for u, v in zip(r, piv)]
    for r in eqs:
        if not any(r[:-1]) and r[-1]:
            return None
    eqs = [_normalize(e) for e in eqs if any(e[:-1])]

    rows = []
    for r in ineqs:
        if any(r[:-1]):
            rows.append(_normalize(r))
        elif r[-1] < 0:
            return None
    origins = [frozenset([k]) for k in range(len(rows))]
    rows, origins = _dedupe(rows, origins)

    remaining = [j for j in sorted(drop) if any(r[j] for r in rows)]
    eliminated = 0
    while remaining:
        def cost(j):
            pos = sum(1 for r in rows if r[j] > 0)
            neg = sum(1 for r in rows if r[j] < 0)
            return pos * neg - pos - neg
        j = min(remaining, key=cost)
        remaining.remove(j)
        eliminated += 1
        pos = [(r, o) for r, o in zip(rows, origins) if r[j] > 0]
        neg = [(r, o) for r, o in zip(rows, origins) if r[j] < 0]
        new_rows = [r for r in rows if not r[j]]
        new_orig = [o for r, o in zip(rows, origins) if not r[j]]
        limit = eliminated + 1
        for rp, op in pos:
            for rn, on in neg:
                org = op | on
                if len(org) > limit:
                    continue
                fp, fn = rp[j], -rn[j]
                comb = [fn * u + fp * v for u, v in zip(rp, rn)]
                comb[j] = _ZERO
                if not any(comb[:-1]):
                    if comb[-1] < 0:
                        return None
                    continue
                new_rows.append(_normalize(comb))
                new_orig.append(org)
        rows, origins = _dedupe(new_rows, new_orig)
        if len(rows) > _PRUNE_THRESHOLD:
            rows, origins = _lp_prune(rows, origins, eqs)
            if rows is None:
                return None
        remaining = [k for k in remaining if any(r[k] for r in rows)]
    return rows, eqs


def project(P: Polyhedron, keep: Sequence[int]) -> Polyhedron:
    """Projection of ``P`` onto the coordinates ``keep`` (in that order), pruned of redundant rows."""
    keep = list(keep)
    if len(set(keep)) != len(keep) or any(not 0 <= k < P.dim for k in keep):
        raise InputError(f"invalid coordinate selection {keep} for dimension {P.dim}")
    k = len(keep)
    if P.is_empty():
        return Polyhedron.empty(k)
    drop = set(range(P.dim)) - set(keep)
    ineqs = [to_mpq(a) + [mpq(o.numerator, o.denominator)] for a, o in P.ineqs]
    eqs = [to_mpq(a) + [mpq(o.numerator, o.denominator)] for a, o in P.eqs]
    out = eliminate(ineqs, eqs, drop, P.dim)
    if out is None:
        return Polyhedron.empty(k)
    rows, eqs = out

    def pick(r):
        return from_mpq([r[c] for c in keep]), from_mpq([r[-1]])[0]

    return prune(Polyhedron(k, tuple(pick(r) for r in rows), tuple(pick(e) for e in eqs)))


def vrep_to_hrep(dim: int, points: Sequence = (), rays: Sequence = (), lines: Sequence = ()) -> Polyhedron:
    """H-representation of ``conv(points) + cone(rays) + span(lines)``.

    With no points the result is empty.
    """
    points = [to_mpq(p) for p in points]
    gens = [to_mpq(r) for r in rays] + [to_mpq(r) for r in lines]
    if not points:
        return Polyhedron.empty(dim)
    for v in points + gens:
        if len(v) != dim:
            raise InputError(f"generator of length {len(v)} in dimension {dim}")
    np_, ng = len(points), len(gens)
    nl = len(lines)
    nvars = dim + np_ + ng
    one, zero = mpq(1), _ZERO
    eqs = []
    for i in range(dim):
        row = [zero] * nvars + [zero]
        row[i] = one
        for t, p in enumerate(points):
            row[dim + t] = -p[i]
        for t, r in enumerate(gens):
            row[dim + np_ + t] = -r[i]
        eqs.append(row)
    conv = [zero] * nvars + [one]
    for t in range(np_):
        conv[dim + t] = one
    eqs.append(conv)
    ineqs = []
    for t in range(np_ + ng - nl):
        row = [zero] * nvars + [zero]
        row[dim + t] = -one
        ineqs.append(row)
    out = eliminate(ineqs, eqs, set(range(dim, nvars)), nvars)
    if out is None:
        return Polyhedron.empty(dim)
    rows, eqs = out

    def pick(r):
        return from_mpq(r[:dim]), from_mpq([r[-1]])[0]

    return prune(Polyhedron(dim, tuple(pick(r) for r in rows), tuple(pick(e) for e in eqs)))
