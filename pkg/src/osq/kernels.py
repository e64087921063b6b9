"""Statevector kernels over the d-ary digit decomposition of a register.

A register of ``m`` qudits of dimension ``d`` is a flat complex vector of
length ``d**m``; qudit 0 is the most significant digit. Each kernel exists
twice: a pure-numpy version (``*_np``) built on reshapes, and a loop version
(``*_nb``) compiled with numba. The public names point at one of the two,
chosen by :data:`osq._jit.USE_NUMBA`.

Permutation operators are passed as ``(perm, phases)`` with column ``j``
holding the single nonzero ``phases[j]`` at row ``perm[j]``.
"""
import numpy as np

from ._jit import USE_NUMBA, njit

__all__ = [
    "BACKEND",
    "apply_dense",
    "apply_diagonal",
    "apply_permutation",
    "marginal_probs",
    "sample_index",
]


def _as_targets(targets):
    return np.ascontiguousarray(targets, dtype=np.int64)


# ---------------------------------------------------------------- numpy path

def _front(psi, d, m, targets):
    k = len(targets)
    t = psi.reshape((d,) * m)
    t = np.moveaxis(t, list(targets), list(range(k)))
    return t.reshape(d**k, -1)


def _back(block, d, m, targets):
    k = len(targets)
    t = block.reshape((d,) * m)
    t = np.moveaxis(t, list(range(k)), list(targets))
    return np.ascontiguousarray(t).reshape(-1)


def apply_dense_np(psi, d, m, targets, mat):
    block = _front(psi, d, m, targets)
    return _back(mat @ block, d, m, targets)


def apply_diagonal_np(psi, d, m, targets, diag):
    block = _front(psi, d, m, targets)
    return _back(diag[:, None] * block, d, m, targets)


def apply_permutation_np(psi, d, m, targets, perm, phases):
    block = _front(psi, d, m, targets)
    out = np.empty_like(block)
    out[perm] = phases[:, None] * block
    return _back(out, d, m, targets)


def marginal_probs_np(psi, d, m, q):
    p = np.abs(psi.reshape((d,) * m)) ** 2
    axes = tuple(a for a in range(m) if a != q)
    return p.sum(axis=axes) if axes else p


def sample_index_np(probs, u):
    cum = np.cumsum(probs)
    x = u * cum[-1]
    i = int(np.searchsorted(cum, x, side="right"))
    if i >= len(probs):
        # rounding put x at the top edge; take the last outcome with weight
        i = int(np.flatnonzero(probs > 0)[-1])
    return i


# ---------------------------------------------------------------- numba path

@njit
def _strides(d, m):
    st = np.empty(m, dtype=np.int64)
    acc = 1
    for q in range(m - 1, -1, -1):
        st[q] = acc
        acc *= d
    return st


@njit
def _offsets(d, m, targets):
    """Flat offset of every target sub-index (target digits only)."""
    st = _strides(d, m)
    k = targets.shape[0]
    sub = 1
    for _ in range(k):
        sub *= d
    off = np.zeros(sub, dtype=np.int64)
    for j in range(sub):
        rem = j
        acc = 0
        for t in range(k - 1, -1, -1):
            acc += (rem % d) * st[targets[t]]
            rem //= d
        off[j] = acc
    return off


@njit
def _bases(d, m, targets):
    """Flat index of every register entry whose target digits are all zero."""
    st = _strides(d, m)
    is_target = np.zeros(m, dtype=np.bool_)
    for t in range(targets.shape[0]):
        is_target[targets[t]] = True
    nrest = 1
    for q in range(m):
        if not is_target[q]:
            nrest *= d
    out = np.zeros(nrest, dtype=np.int64)
    for b in range(nrest):
        rem = b
        acc = 0
        for q in range(m - 1, -1, -1):
            if not is_target[q]:
                acc += (rem % d) * st[q]
                rem //= d
        out[b] = acc
    return out


@njit
def _apply_dense_nb(psi, d, m, targets, mat):
    off = _offsets(d, m, targets)
    bases = _bases(d, m, targets)
    sub = off.shape[0]
    out = np.empty_like(psi)
    vec = np.empty(sub, dtype=psi.dtype)
    for b in range(bases.shape[0]):
        i = bases[b]
        for j in range(sub):
            vec[j] = psi[i + off[j]]
        for r in range(sub):
            acc = 0j
            for j in range(sub):
                acc += mat[r, j] * vec[j]
            out[i + off[r]] = acc
    return out


@njit
def _apply_diagonal_nb(psi, d, m, targets, diag):
    off = _offsets(d, m, targets)
    bases = _bases(d, m, targets)
    out = np.empty_like(psi)
    for b in range(bases.shape[0]):
        i = bases[b]
        for j in range(off.shape[0]):
            out[i + off[j]] = diag[j] * psi[i + off[j]]
    return out


@njit
def _apply_permutation_nb(psi, d, m, targets, perm, phases):
    off = _offsets(d, m, targets)
    bases = _bases(d, m, targets)
    out = np.empty_like(psi)
    for b in range(bases.shape[0]):
        i = bases[b]
        for j in range(off.shape[0]):
            out[i + off[perm[j]]] = phases[j] * psi[i + off[j]]
    return out


@njit
def _marginal_probs_nb(psi, d, m, q):
    p = np.zeros(d)
    stride = _strides(d, m)[q]
    block = stride * d
    for hi in range(0, psi.shape[0], block):
        for k in range(d):
            acc = 0.0
            start = hi + k * stride
            for i in range(start, start + stride):
                z = psi[i]
                acc += z.real * z.real + z.imag * z.imag
            p[k] += acc
    return p


@njit
def _sample_index_nb(probs, u):
    n = probs.shape[0]
    cum = np.cumsum(probs)
    x = u * cum[n - 1]
    for i in range(n):
        if x < cum[i]:
            return i
    for i in range(n - 1, -1, -1):
        if probs[i] > 0:
            return i
    return n - 1


def apply_dense_nb(psi, d, m, targets, mat):
    return _apply_dense_nb(psi, d, m, _as_targets(targets), np.ascontiguousarray(mat))


def apply_diagonal_nb(psi, d, m, targets, diag):
    return _apply_diagonal_nb(psi, d, m, _as_targets(targets), np.ascontiguousarray(diag))


def apply_permutation_nb(psi, d, m, targets, perm, phases):
    return _apply_permutation_nb(
        psi, d, m, _as_targets(targets),
        np.ascontiguousarray(perm, dtype=np.int64), np.ascontiguousarray(phases),
    )


def marginal_probs_nb(psi, d, m, q):
    return _marginal_probs_nb(psi, d, m, q)


def sample_index_nb(probs, u):
    return int(_sample_index_nb(np.ascontiguousarray(probs, dtype=np.float64), float(u)))


NUMPY_KERNELS = {
    "apply_dense": apply_dense_np,
    "apply_diagonal": apply_diagonal_np,
    "apply_permutation": apply_permutation_np,
    "marginal_probs": marginal_probs_np,
    "sample_index": sample_index_np,
}
NUMBA_KERNELS = {
    "apply_dense": apply_dense_nb,
    "apply_diagonal": apply_diagonal_nb,
    "apply_permutation": apply_permutation_nb,
    "marginal_probs": marginal_probs_nb,
    "sample_index": sample_index_nb,
}

if USE_NUMBA:
    BACKEND = "numba"
    apply_dense = apply_dense_nb
    apply_diagonal = apply_diagonal_nb
    apply_permutation = apply_permutation_nb
    marginal_probs = marginal_probs_nb
    sample_index = sample_index_nb
else:
    BACKEND = "numpy"
    apply_dense = apply_dense_np
    apply_diagonal = apply_diagonal_np
    apply_permutation = apply_permutation_np
    marginal_probs = marginal_probs_np
    sample_index = sample_index_np
