"""Pure numpy implementations of the batched information-term kernels.

Every kernel takes a batch of candidate distributions and returns one row of
information terms per candidate. ``_kernels.pyx`` implements the same
functions in Cython; the two must agree to rounding.
"""
import numpy as np

ZERO_MASS = 1e-15

# column layout of relay_terms output
I_XV_Y, I_X_Y_GIVEN_T, I_X_Y, I_X_Y_GIVEN_V, I_T_V, I_V_Y, I_T_V_GIVEN_Y = range(7)
RELAY_TERMS = 7


def _neg_plogp(p):
    safe = np.where(p > ZERO_MASS, p, 1.0)
    return np.where(p > ZERO_MASS, -p * np.log2(safe), 0.0)


def _h(p, axes):
    return _neg_plogp(p).sum(axis=axes)


def _row_entropies(k):
    return _h(k, -1)


def cutset_terms(px, pt, kernel):
    """Columns: I(X;Y), I(X;Y|T) for each row of ``px`` (shape (B, X))."""
    px = np.asarray(px, dtype=float)
    pt = np.asarray(pt, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    h_xt = _row_entropies(kernel)                       # (X, T)
    h_y_given_xt = px @ (h_xt @ pt)                     # (B,)
    p_y_given_x = np.einsum("t,xty->xy", pt, kernel)
    h_y_given_x = px @ _row_entropies(p_y_given_x)
    p_y_given_t = np.einsum("bx,xty->bty", px, kernel)  # (B, T, Y)
    h_y_given_t = _h(p_y_given_t, -1) @ pt
    p_y = np.einsum("t,bty->by", pt, p_y_given_t)
    h_y = _h(p_y, -1)
    out = np.empty((px.shape[0], 2))
    out[:, 0] = h_y - h_y_given_x
    out[:, 1] = h_y_given_t - h_y_given_xt
    return out


def relay_terms(px, pt, kernel, q):
    """Information terms of ``p(x)p(t)p(v|t)p(y|x,t)`` for a batch.

    ``px`` has shape (B, X), ``q`` shape (B, T, V). Columns follow the
    ``I_*`` indices of this module.
    """
    px = np.asarray(px, dtype=float)
    pt = np.asarray(pt, dtype=float)
    kernel = np.asarray(kernel, dtype=float)
    q = np.asarray(q, dtype=float)

    h_t = _h(pt, -1)
    h_y_given_xt = px @ (_row_entropies(kernel) @ pt)
    h_y_given_x = px @ _row_entropies(np.einsum("t,xty->xy", pt, kernel))
    h_x = _h(px, -1)

    p_tv = pt[None, :, None] * q                         # (B, T, V)
    p_v = p_tv.sum(axis=1)
    h_v = _h(p_v, -1)
    h_tv = _h(p_tv, (1, 2))

    p_y_given_t = np.einsum("bx,xty->bty", px, kernel)   # (B, T, Y)
    p_ty = pt[None, :, None] * p_y_given_t
    h_ty = _h(p_ty, (1, 2))
    p_y = p_ty.sum(axis=1)
    h_y = _h(p_y, -1)

    p_tvy = p_tv[:, :, :, None] * p_y_given_t[:, :, None, :]
    h_tvy = _h(p_tvy, (1, 2, 3))
    p_vy = p_tvy.sum(axis=1)
    h_vy = _h(p_vy, (1, 2))

    p_xvy = px[:, :, None, None] * np.einsum("btv,xty->bxvy", p_tv, kernel)
    h_xvy = _h(p_xvy, (1, 2, 3))
    h_y_given_xv = h_xvy - h_x - h_v

    out = np.empty((px.shape[0], RELAY_TERMS))
    out[:, I_XV_Y] = h_y - h_y_given_xv
    out[:, I_X_Y_GIVEN_T] = (h_ty - h_t) - h_y_given_xt
    out[:, I_X_Y] = h_y - h_y_given_x
    out[:, I_X_Y_GIVEN_V] = (h_vy - h_v) - h_y_given_xv
    out[:, I_T_V] = h_t + h_v - h_tv
    out[:, I_V_Y] = h_v + h_y - h_vy
    out[:, I_T_V_GIVEN_Y] = h_ty + h_vy - h_tvy - h_y
    return out


def aux_terms(pt, w, q):
    """Columns: H(U|V), H(T|V), I(T;V) for ``p(t)p(v|t)p(u|t)``, batched over ``q``."""
    pt = np.asarray(pt, dtype=float)
    w = np.asarray(w, dtype=float)
    q = np.asarray(q, dtype=float)
    p_tv = pt[None, :, None] * q
    p_v = p_tv.sum(axis=1)
    h_v = _h(p_v, -1)
    h_tv = _h(p_tv, (1, 2))
    p_uv = np.einsum("btv,tu->buv", p_tv, w)
    h_uv = _h(p_uv, (1, 2))
    out = np.empty((q.shape[0], 3))
    out[:, 0] = h_uv - h_v
    out[:, 1] = h_tv - h_v
    out[:, 2] = _h(pt, -1) - out[:, 1]
    return out
