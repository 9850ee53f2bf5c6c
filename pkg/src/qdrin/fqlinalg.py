"""Dense linear algebra over a prime-power field, on raw integer codes.

Matrices are lists of rows; every function takes the :class:`FieldSpec`
whose codes the entries are.
"""

from __future__ import annotations

from .fqpoly import FieldSpec


def rref(rows: list[list[int]], F: FieldSpec) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [list(r) for r in rows]
    if not M:
        return M, []
    ncols = len(M[0])
    pivots = []
    prow = 0
    add, mul, neg, inv = F._add, F._mul, F._neg, F._inv
    for col in range(ncols):
        sel = None
        for i in range(prow, len(M)):
            if M[i][col]:
                sel = i
                break
        if sel is None:
            continue
        M[prow], M[sel] = M[sel], M[prow]
        piv = M[prow]
        s = inv(piv[col])
        if s != 1:
            piv[:] = [mul(s, x) for x in piv]
        for i in range(len(M)):
            if i != prow and M[i][col]:
                f = neg(M[i][col])
                row = M[i]
                for j in range(col, ncols):
                    if piv[j]:
                        row[j] = add(row[j], mul(f, piv[j]))
        pivots.append(col)
        prow += 1
        if prow == len(M):
            break
    return M[:prow], pivots


def rank(rows: list[list[int]], F: FieldSpec) -> int:
    return len(rref(rows, F)[1])


def nullspace(rows: list[list[int]], ncols: int, F: FieldSpec) -> list[list[int]]:
    """Basis of {x : M x = 0}, one vector per free column, in column order."""
    R, pivots = rref(rows, F) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for r, pc in zip(R, pivots):
            if r[fcol]:
                v[pc] = F._neg(r[fcol])
        basis.append(v)
    return basis


def solve(rows: list[list[int]], rhs: list[int], F: FieldSpec) -> list[int] | None:
    """One solution of M x = rhs, or None if the system is inconsistent."""
    ncols = len(rows[0]) if rows else 0
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, pivots = rref(aug, F)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for r, pc in zip(R, pivots):
        x[pc] = r[ncols]
    return x


def transpose(rows: list[list[int]]) -> list[list[int]]:
    return [list(c) for c in zip(*rows)]


def matmul(A: list[list[int]], B: list[list[int]], F: FieldSpec) -> list[list[int]]:
    add, mul = F._add, F._mul
    Bt = transpose(B)
    out = []
    for row in A:
        out_row = []
        for col in Bt:
            acc = 0
            for x, y in zip(row, col):
                if x and y:
                    acc = add(acc, mul(x, y))
            out_row.append(acc)
        out.append(out_row)
    return out


def matvec(A: list[list[int]], v: list[int], F: FieldSpec) -> list[int]:
    add, mul = F._add, F._mul
    out = []
    for row in A:
        acc = 0
        for x, y in zip(row, v):
            if x and y:
                acc = add(acc, mul(x, y))
        out.append(acc)
    return out
