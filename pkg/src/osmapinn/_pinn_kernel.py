"""Compiled full-batch loss/gradient and ADAM loop for the tanh MLP.

Mirrors ``pinn.loss`` exactly but walks one point at a time so the whole
training loop stays inside compiled code.  Parameters are a flat vector,
layer by layer: row-major weight matrix ``(fan_out, fan_in)`` then bias.
Points are summed in index order, so results are bit-reproducible.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def loss_grad(theta, sizes, X, T, nd, c, w_pde, grad):
    """Return ``(data_loss, pde_loss)`` and write the gradient of
    ``data + w_pde * pde`` into ``grad``.

    ``X`` holds the scaled data points first (``nd`` rows, targets ``T``)
    followed by the scaled collocation points; ``c`` multiplies the scaled
    Laplacian in the Helmholtz residual.
    """
    nlay = sizes.shape[0] - 1
    wmax = 0
    for s in sizes:
        wmax = max(wmax, s)
    B = X.shape[0]
    A = B - nd
    H = np.zeros((nlay + 1, wmax))
    J = np.zeros((nlay + 1, 3, wmax))
    Lp = np.zeros((nlay + 1, wmax))
    JZ = np.zeros((nlay, 3, wmax))
    LZ = np.zeros((nlay, wmax))
    D1 = np.zeros((nlay, wmax))
    D2 = np.zeros((nlay, wmax))
    QS = np.zeros((nlay, wmax))
    gh = np.zeros(wmax)
    gJ = np.zeros((3, wmax))
    gL = np.zeros(wmax)
    gh2 = np.zeros(wmax)
    gJ2 = np.zeros((3, wmax))
    gL2 = np.zeros(wmax)
    gz = np.zeros(wmax)
    gJz = np.zeros((3, wmax))
    gLz = np.zeros(wmax)
    offs = np.zeros(nlay + 1, np.int64)
    for l in range(nlay):
        offs[l + 1] = offs[l] + sizes[l] * sizes[l + 1] + sizes[l + 1]
    grad[:] = 0.0
    ld = 0.0
    lp = 0.0
    for p in range(B):
        for i in range(3):
            H[0, i] = X[p, i]
            Lp[0, i] = 0.0
            for j in range(3):
                J[0, i, j] = 1.0 if i == j else 0.0
        # forward: value, input Jacobian and input Laplacian of every unit
        for l in range(nlay):
            fi = sizes[l]
            fo = sizes[l + 1]
            o = offs[l]
            bo = o + fi * fo
            last = l == nlay - 1
            for n in range(fo):
                z = theta[bo + n]
                lz = 0.0
                j0 = 0.0
                j1 = 0.0
                j2 = 0.0
                for m in range(fi):
                    w = theta[o + n * fi + m]
                    z += w * H[l, m]
                    lz += w * Lp[l, m]
                    j0 += w * J[l, 0, m]
                    j1 += w * J[l, 1, m]
                    j2 += w * J[l, 2, m]
                if last:
                    H[l + 1, n] = z
                    Lp[l + 1, n] = lz
                else:
                    hn = np.tanh(z)
                    d1 = 1.0 - hn * hn
                    d2 = -2.0 * hn * d1
                    q = j0 * j0 + j1 * j1 + j2 * j2
                    JZ[l, 0, n] = j0
                    JZ[l, 1, n] = j1
                    JZ[l, 2, n] = j2
                    LZ[l, n] = lz
                    D1[l, n] = d1
                    D2[l, n] = d2
                    QS[l, n] = q
                    H[l + 1, n] = hn
                    J[l + 1, 0, n] = d1 * j0
                    J[l + 1, 1, n] = d1 * j1
                    J[l + 1, 2, n] = d1 * j2
                    Lp[l + 1, n] = d1 * lz + d2 * q
        nout = sizes[nlay]
        for n in range(nout):
            gh[n] = 0.0
            gL[n] = 0.0
        if p < nd:
            for n in range(nout):
                r = H[nlay, n] - T[p, n]
                ld += r * r
                gh[n] = 2.0 * r / nd
        else:
            for n in range(nout):
                r = Lp[nlay, n] * c + H[nlay, n]
                lp += r * r
                g = 2.0 * w_pde * r / A
                gh[n] = g
                gL[n] = g * c
        # reverse sweep through the forward-mode quantities
        have_j = False
        for l in range(nlay - 1, -1, -1):
            fi = sizes[l]
            fo = sizes[l + 1]
            o = offs[l]
            bo = o + fi * fo
            last = l == nlay - 1
            for n in range(fo):
                if last:
                    gz[n] = gh[n]
                    gLz[n] = gL[n]
                    gJz[0, n] = 0.0
                    gJz[1, n] = 0.0
                    gJz[2, n] = 0.0
                else:
                    d1 = D1[l, n]
                    d2 = D2[l, n]
                    hn = H[l + 1, n]
                    gLz[n] = gL[n] * d1
                    gq = gL[n] * d2
                    gd1 = gL[n] * LZ[l, n]
                    gd2 = gL[n] * QS[l, n]
                    for i in range(3):
                        jz = JZ[l, i, n]
                        if have_j:
                            gd1 += gJ[i, n] * jz
                            gJz[i, n] = gJ[i, n] * d1 + 2.0 * jz * gq
                        else:
                            gJz[i, n] = 2.0 * jz * gq
                    ghn = gh[n] - 2.0 * hn * gd1 + (6.0 * hn * hn - 2.0) * gd2
                    gz[n] = ghn * d1
            for n in range(fo):
                grad[bo + n] += gz[n]
                for m in range(fi):
                    grad[o + n * fi + m] += (gz[n] * H[l, m] + gLz[n] * Lp[l, m]
                                             + gJz[0, n] * J[l, 0, m]
                                             + gJz[1, n] * J[l, 1, m]
                                             + gJz[2, n] * J[l, 2, m])
            if l > 0:
                for m in range(fi):
                    a = 0.0
                    b = 0.0
                    j0 = 0.0
                    j1 = 0.0
                    j2 = 0.0
                    for n in range(fo):
                        w = theta[o + n * fi + m]
                        a += gz[n] * w
                        b += gLz[n] * w
                        j0 += gJz[0, n] * w
                        j1 += gJz[1, n] * w
                        j2 += gJz[2, n] * w
                    gh2[m] = a
                    gL2[m] = b
                    gJ2[0, m] = j0
                    gJ2[1, m] = j1
                    gJ2[2, m] = j2
                for m in range(fi):
                    gh[m] = gh2[m]
                    gL[m] = gL2[m]
                    gJ[0, m] = gJ2[0, m]
                    gJ[1, m] = gJ2[1, m]
                    gJ[2, m] = gJ2[2, m]
                have_j = True
    return ld / nd, lp / A


@numba.njit(cache=True)
def adam_train(theta, m, v, t0, sizes, X, T, nd, c, w_pde, epochs, lr, b1, b2, eps,
               log_every, hist):
    """Run ``epochs`` ADAM steps in place.

    Returns ``(n_logged, bad_epoch)`` where ``bad_epoch`` is -1 unless the
    loss went non-finite.
    """
    P = theta.shape[0]
    g = np.zeros(P)
    k = 0
    for e in range(epochs):
        ld, lp = loss_grad(theta, sizes, X, T, nd, c, w_pde, g)
        total = ld + w_pde * lp
        if not np.isfinite(total):
            return k, e
        if e % log_every == 0 and k < hist.shape[0]:
            hist[k, 0] = e
            hist[k, 1] = total
            hist[k, 2] = ld
            hist[k, 3] = lp
            k += 1
        t = t0 + e + 1
        bc1 = 1.0 - b1 ** t
        bc2 = 1.0 - b2 ** t
        for i in range(P):
            m[i] = b1 * m[i] + (1.0 - b1) * g[i]
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i]
            theta[i] -= lr * (m[i] / bc1) / (np.sqrt(v[i] / bc2) + eps)
    return k, -1
