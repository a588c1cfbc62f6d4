"""Pure-Python (numpy) versions of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable or when
``IRSMATCH_BACKEND=python`` is set. Signatures and return conventions are
identical to the Cython module so the two are interchangeable.
"""
import numpy as np

PIVOT_RTOL = 1e-12


def gauss_solve(a, b, pivot_rtol=PIVOT_RTOL):
    """Solve ``a @ x = b`` by Gaussian elimination with partial pivoting.

    Returns ``(x, ok, min_pivot, max_pivot)``. When a pivot magnitude falls
    below ``pivot_rtol`` times the largest initial row norm of ``a``, the
    elimination stops, ``ok`` is False and ``min_pivot`` holds the offending
    pivot magnitude; ``x`` is then meaningless.
    """
    a = np.array(a, dtype=np.complex128, copy=True)
    x = np.array(b, dtype=np.complex128, copy=True)
    n = a.shape[0]
    row_scale = 0.0
    for i in range(n):
        row_scale = max(row_scale, float(np.sqrt(np.sum(np.abs(a[i]) ** 2))))
    thresh = pivot_rtol * row_scale
    min_piv = np.inf
    max_piv = 0.0

    for col in range(n):
        mags = np.abs(a[col:, col])
        p = col + int(np.argmax(mags))
        piv = float(mags[p - col])
        if piv <= thresh or piv == 0.0:
            return x, False, piv, max_piv
        min_piv = min(min_piv, piv)
        max_piv = max(max_piv, piv)
        if p != col:
            a[[col, p]] = a[[p, col]]
            x[[col, p]] = x[[p, col]]
        for r in range(col + 1, n):
            factor = a[r, col] / a[col, col]
            if factor != 0:
                a[r, col:] -= factor * a[col, col:]
                x[r] -= factor * x[col]

    for col in range(n - 1, -1, -1):
        acc = x[col].copy()
        for c in range(col + 1, n):
            acc -= a[col, c] * x[c]
        x[col] = acc / a[col, col]
    return x, True, min_piv, max_piv


def greedy_phases(f, g_col, phasors):
    """Greedy per-element phase selection over a discrete alphabet.

    ``f`` and ``g_col`` are length-N complex arrays (IRS-user channel and the
    chosen BS-IRS column), ``phasors`` holds ``exp(1j * theta)`` for every
    alphabet entry. Returns ``(indices, s_final)``.

    Maximizing ``|s + a e^{j theta}|`` over theta is the same as maximizing
    ``Re(conj(s) a e^{j theta})``, which ties exactly when ``s == 0``; ties
    resolve to the smallest index.
    """
    f = np.asarray(f, dtype=np.complex128)
    g_col = np.asarray(g_col, dtype=np.complex128)
    phasors = np.asarray(phasors, dtype=np.complex128)
    n = f.shape[0]
    idx = np.zeros(n, dtype=np.int64)
    s = 0j
    for i in range(n):
        a = f[i].conjugate() * g_col[i]
        scores = (s.conjugate() * a * phasors).real
        best = 0
        best_val = scores[0]
        for t in range(1, scores.shape[0]):
            if scores[t] > best_val:
                best_val = scores[t]
                best = t
        idx[i] = best
        s = s + a * phasors[best]
    return idx, complex(s)


def zf_rates(h_desired, composite, powers, noise_power, pivot_rtol=PIVOT_RTOL):
    """Per-user rates under normalized ZF precoding.

    The precoder is built from the rows of ``h_desired`` (K x M); the received
    channel of user k is row k of ``composite``. Returns
    ``(rates, ok, min_pivot)``.
    """
    h = np.asarray(h_desired, dtype=np.complex128)
    c = np.asarray(composite, dtype=np.complex128)
    gram = h @ h.conj().T
    # W = H^H (H H^H)^{-1}  =>  W^H = (H H^H)^{-1} H  since the Gram is Hermitian
    y, ok, min_piv, _ = gauss_solve(gram, h, pivot_rtol)
    if not ok:
        return np.zeros(h.shape[0]), False, min_piv
    norms = np.sqrt(np.sum(np.abs(y) ** 2, axis=1))
    gains = np.abs(c @ y.conj().T) ** 2 / norms[None, :] ** 2
    p = np.asarray(powers, dtype=np.float64)
    signal = p * np.diag(gains)
    interference = gains @ p - signal
    sinr = signal / (interference + noise_power)
    return np.log2(1.0 + sinr), True, min_piv
