// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cstddef>

// Dense compute kernels behind the tensor ops. Each kernel exists twice:
// an OpenMP-parallel variant used in production and a naive serial
// reference under kernels::serial used by the tests and the benchmark.
// Both variants accumulate in identical order, so outputs are
// bit-identical regardless of thread count.
//
// Layouts: activations are [B,H,W,C] row-major, conv kernels are
// [KH,KW,Cin,Cout], matrices row-major. conv2d uses stride 1 and same
// (zero) padding with odd kernel sizes. conv2d_transpose with stride
// (sh,sw) maps [B,H,W,Cin] to [B,H*sh,W*sw,Cout] and requires
// KH >= sh, KW >= sw with even KH-sh and KW-sw.

namespace cebed::kernels {

namespace serial {

template <class T>
void matmul_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            T acc = accumulate ? c[static_cast<std::size_t>(i) * n + j] : T(0);
            for (int p = 0; p < k; ++p)
                acc += a[static_cast<std::size_t>(i) * k + p] * b[static_cast<std::size_t>(p) * n + j];
            c[static_cast<std::size_t>(i) * n + j] = acc;
        }
}

// c[m,n] = a[m,k] * b[n,k]^T
template <class T>
void matmul_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            T acc = accumulate ? c[static_cast<std::size_t>(i) * n + j] : T(0);
            for (int p = 0; p < k; ++p)
                acc += a[static_cast<std::size_t>(i) * k + p] * b[static_cast<std::size_t>(j) * k + p];
            c[static_cast<std::size_t>(i) * n + j] = acc;
        }
}

// c[m,n] = a[k,m]^T * b[k,n]
template <class T>
void matmul_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            T acc = accumulate ? c[static_cast<std::size_t>(i) * n + j] : T(0);
            for (int p = 0; p < k; ++p)
                acc += a[static_cast<std::size_t>(p) * m + i] * b[static_cast<std::size_t>(p) * n + j];
            c[static_cast<std::size_t>(i) * n + j] = acc;
        }
}

template <class T>
void conv2d_forward(const T* x, const T* w, const T* bias, T* y, int bsz, int h, int wd, int ci,
                    int co, int kh, int kw) {
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    for (int b = 0; b < bsz; ++b)
        for (int oh = 0; oh < h; ++oh)
            for (int ow = 0; ow < wd; ++ow)
                for (int c = 0; c < co; ++c) {
                    T acc = bias ? bias[c] : T(0);
                    for (int r = 0; r < kh; ++r)
                        for (int s = 0; s < kw; ++s) {
                            const int ih = oh + r - ph, iw = ow + s - pw;
                            if (ih < 0 || ih >= h || iw < 0 || iw >= wd) continue;
                            const T* xp = x + ((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci) * co + c;
                            for (int q = 0; q < ci; ++q) acc += xp[q] * wp[static_cast<std::size_t>(q) * co];
                        }
                    y[((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co + c] = acc;
                }
}

template <class T>
void conv2d_backward_input(const T* dy, const T* w, T* dx, int bsz, int h, int wd, int ci, int co,
                           int kh, int kw) {
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    for (int b = 0; b < bsz; ++b)
        for (int ih = 0; ih < h; ++ih)
            for (int iw = 0; iw < wd; ++iw)
                for (int q = 0; q < ci; ++q) {
                    T acc = T(0);
                    for (int r = 0; r < kh; ++r)
                        for (int s = 0; s < kw; ++s) {
                            const int oh = ih - r + ph, ow = iw - s + pw;
                            if (oh < 0 || oh >= h || ow < 0 || ow >= wd) continue;
                            const T* dyp =
                                dy + ((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci + q) * co;
                            for (int c = 0; c < co; ++c) acc += dyp[c] * wp[c];
                        }
                    dx[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] = acc;
                }
}

template <class T>
void conv2d_backward_kernel(const T* x, const T* dy, T* dw, T* dbias, int bsz, int h, int wd,
                            int ci, int co, int kh, int kw) {
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    for (int r = 0; r < kh; ++r)
        for (int s = 0; s < kw; ++s)
            for (int q = 0; q < ci; ++q)
                for (int c = 0; c < co; ++c) {
                    T acc = T(0);
                    for (int b = 0; b < bsz; ++b)
                        for (int oh = 0; oh < h; ++oh) {
                            const int ih = oh + r - ph;
                            if (ih < 0 || ih >= h) continue;
                            for (int ow = 0; ow < wd; ++ow) {
                                const int iw = ow + s - pw;
                                if (iw < 0 || iw >= wd) continue;
                                acc += x[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] *
                                       dy[((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co + c];
                            }
                        }
                    dw[((static_cast<std::size_t>(r) * kw + s) * ci + q) * co + c] = acc;
                }
    if (dbias) {
        for (int c = 0; c < co; ++c) {
            T acc = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(bsz) * h * wd; ++i)
                acc += dy[i * co + c];
            dbias[c] = acc;
        }
    }
}

template <class T>
void conv2dt_forward(const T* x, const T* w, const T* bias, T* y, int bsz, int h, int wd, int ci,
                     int co, int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
    const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
    for (int b = 0; b < bsz; ++b)
        for (int oh = 0; oh < oh_total; ++oh)
            for (int ow = 0; ow < ow_total; ++ow)
                for (int c = 0; c < co; ++c) {
                    T acc = bias ? bias[c] : T(0);
                    for (int r = 0; r < kh; ++r) {
                        const int num_h = oh + ph - r;
                        if (num_h < 0 || num_h % sh != 0) continue;
                        const int ih = num_h / sh;
                        if (ih >= h) continue;
                        for (int s = 0; s < kw; ++s) {
                            const int num_w = ow + pw - s;
                            if (num_w < 0 || num_w % sw != 0) continue;
                            const int iw = num_w / sw;
                            if (iw >= wd) continue;
                            const T* xp = x + ((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci) * co + c;
                            for (int q = 0; q < ci; ++q) acc += xp[q] * wp[static_cast<std::size_t>(q) * co];
                        }
                    }
                    y[((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) * co + c] = acc;
                }
}

template <class T>
void conv2dt_backward_input(const T* dy, const T* w, T* dx, int bsz, int h, int wd, int ci, int co,
                            int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
    const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
    for (int b = 0; b < bsz; ++b)
        for (int ih = 0; ih < h; ++ih)
            for (int iw = 0; iw < wd; ++iw)
                for (int q = 0; q < ci; ++q) {
                    T acc = T(0);
                    for (int r = 0; r < kh; ++r) {
                        const int oh = ih * sh + r - ph;
                        if (oh < 0 || oh >= oh_total) continue;
                        for (int s = 0; s < kw; ++s) {
                            const int ow = iw * sw + s - pw;
                            if (ow < 0 || ow >= ow_total) continue;
                            const T* dyp =
                                dy + ((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) * co;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci + q) * co;
                            for (int c = 0; c < co; ++c) acc += dyp[c] * wp[c];
                        }
                    }
                    dx[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] = acc;
                }
}

template <class T>
void conv2dt_backward_kernel(const T* x, const T* dy, T* dw, T* dbias, int bsz, int h, int wd,
                             int ci, int co, int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
    const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
    for (int r = 0; r < kh; ++r)
        for (int s = 0; s < kw; ++s)
            for (int q = 0; q < ci; ++q)
                for (int c = 0; c < co; ++c) {
                    T acc = T(0);
                    for (int b = 0; b < bsz; ++b)
                        for (int ih = 0; ih < h; ++ih) {
                            const int oh = ih * sh + r - ph;
                            if (oh < 0 || oh >= oh_total) continue;
                            for (int iw = 0; iw < wd; ++iw) {
                                const int ow = iw * sw + s - pw;
                                if (ow < 0 || ow >= ow_total) continue;
                                acc += x[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] *
                                       dy[((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) *
                                              co +
                                          c];
                            }
                        }
                    dw[((static_cast<std::size_t>(r) * kw + s) * ci + q) * co + c] = acc;
                }
    if (dbias) {
        for (int c = 0; c < co; ++c) {
            T acc = T(0);
            for (std::size_t i = 0; i < static_cast<std::size_t>(bsz) * oh_total * ow_total; ++i)
                acc += dy[i * co + c];
            dbias[c] = acc;
        }
    }
}

}  // namespace serial

// --- OpenMP variants -------------------------------------------------
// Row- or element-owned parallel loops; no shared accumulators.

template <class T>
void matmul_nn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::size_t>(i) * n;
        if (!accumulate)
            for (int j = 0; j < n; ++j) crow[j] = T(0);
        const T* arow = a + static_cast<std::size_t>(i) * k;
        for (int p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void matmul_nt(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        const T* arow = a + static_cast<std::size_t>(i) * k;
        T* crow = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            T acc = accumulate ? crow[j] : T(0);
            const T* brow = b + static_cast<std::size_t>(j) * k;
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] = acc;
        }
    }
}

template <class T>
void matmul_tn(const T* a, const T* b, T* c, int m, int k, int n, bool accumulate = false) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < m; ++i) {
        T* crow = c + static_cast<std::size_t>(i) * n;
        if (!accumulate)
            for (int j = 0; j < n; ++j) crow[j] = T(0);
        for (int p = 0; p < k; ++p) {
            const T av = a[static_cast<std::size_t>(p) * m + i];
            const T* brow = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <class T>
void conv2d_forward(const T* x, const T* w, const T* bias, T* y, int bsz, int h, int wd, int ci,
                    int co, int kh, int kw) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < bsz; ++b)
        for (int oh = 0; oh < h; ++oh) {
            const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
            for (int ow = 0; ow < wd; ++ow) {
                T* yp = y + ((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co;
                for (int c = 0; c < co; ++c) yp[c] = bias ? bias[c] : T(0);
                for (int r = 0; r < kh; ++r) {
                    const int ih = oh + r - ph;
                    if (ih < 0 || ih >= h) continue;
                    for (int s = 0; s < kw; ++s) {
                        const int iw = ow + s - pw;
                        if (iw < 0 || iw >= wd) continue;
                        const T* xp = x + ((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci;
                        const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci) * co;
                        for (int q = 0; q < ci; ++q) {
                            const T xv = xp[q];
                            const T* wq = wp + static_cast<std::size_t>(q) * co;
                            for (int c = 0; c < co; ++c) yp[c] += xv * wq[c];
                        }
                    }
                }
            }
        }
}

template <class T>
void conv2d_backward_input(const T* dy, const T* w, T* dx, int bsz, int h, int wd, int ci, int co,
                           int kh, int kw) {
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < bsz; ++b)
        for (int ih = 0; ih < h; ++ih)
            for (int iw = 0; iw < wd; ++iw)
                for (int q = 0; q < ci; ++q) {
                    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
                    T acc = T(0);
                    for (int r = 0; r < kh; ++r) {
                        const int oh = ih - r + ph;
                        if (oh < 0 || oh >= h) continue;
                        for (int s = 0; s < kw; ++s) {
                            const int ow = iw - s + pw;
                            if (ow < 0 || ow >= wd) continue;
                            const T* dyp =
                                dy + ((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci + q) * co;
                            for (int c = 0; c < co; ++c) acc += dyp[c] * wp[c];
                        }
                    }
                    dx[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] = acc;
                }
}

template <class T>
void conv2d_backward_kernel(const T* x, const T* dy, T* dw, T* dbias, int bsz, int h, int wd,
                            int ci, int co, int kh, int kw) {
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    const int tasks = kh * kw * ci;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < tasks; ++t) {
        const int r = t / (kw * ci);
        const int s = (t / ci) % kw;
        const int q = t % ci;
        T* dwp = dw + static_cast<std::size_t>(t) * co;
        for (int c = 0; c < co; ++c) dwp[c] = T(0);
        for (int b = 0; b < bsz; ++b)
            for (int oh = 0; oh < h; ++oh) {
                const int ih = oh + r - ph;
                if (ih < 0 || ih >= h) continue;
                for (int ow = 0; ow < wd; ++ow) {
                    const int iw = ow + s - pw;
                    if (iw < 0 || iw >= wd) continue;
                    const T xv = x[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q];
                    const T* dyp = dy + ((static_cast<std::size_t>(b) * h + oh) * wd + ow) * co;
                    for (int c = 0; c < co; ++c) dwp[c] += xv * dyp[c];
                }
            }
    }
    if (dbias) {
        for (int c = 0; c < co; ++c) dbias[c] = T(0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(bsz) * h * wd; ++i) {
            const T* dyp = dy + i * co;
            for (int c = 0; c < co; ++c) dbias[c] += dyp[c];
        }
    }
}

template <class T>
void conv2dt_forward(const T* x, const T* w, const T* bias, T* y, int bsz, int h, int wd, int ci,
                     int co, int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < bsz; ++b)
        for (int oh = 0; oh < oh_total; ++oh) {
            const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
            for (int ow = 0; ow < ow_total; ++ow) {
                T* yp = y + ((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) * co;
                for (int c = 0; c < co; ++c) yp[c] = bias ? bias[c] : T(0);
                for (int r = 0; r < kh; ++r) {
                    const int num_h = oh + ph - r;
                    if (num_h < 0 || num_h % sh != 0) continue;
                    const int ih = num_h / sh;
                    if (ih >= h) continue;
                    for (int s = 0; s < kw; ++s) {
                        const int num_w = ow + pw - s;
                        if (num_w < 0 || num_w % sw != 0) continue;
                        const int iw = num_w / sw;
                        if (iw >= wd) continue;
                        const T* xp = x + ((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci;
                        const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci) * co;
                        for (int q = 0; q < ci; ++q) {
                            const T xv = xp[q];
                            const T* wq = wp + static_cast<std::size_t>(q) * co;
                            for (int c = 0; c < co; ++c) yp[c] += xv * wq[c];
                        }
                    }
                }
            }
        }
}

template <class T>
void conv2dt_backward_input(const T* dy, const T* w, T* dx, int bsz, int h, int wd, int ci, int co,
                            int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
#pragma omp parallel for collapse(2) schedule(static)
    for (int b = 0; b < bsz; ++b)
        for (int ih = 0; ih < h; ++ih)
            for (int iw = 0; iw < wd; ++iw)
                for (int q = 0; q < ci; ++q) {
                    const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
                    T acc = T(0);
                    for (int r = 0; r < kh; ++r) {
                        const int oh = ih * sh + r - ph;
                        if (oh < 0 || oh >= oh_total) continue;
                        for (int s = 0; s < kw; ++s) {
                            const int ow = iw * sw + s - pw;
                            if (ow < 0 || ow >= ow_total) continue;
                            const T* dyp =
                                dy + ((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) * co;
                            const T* wp = w + ((static_cast<std::size_t>(r) * kw + s) * ci + q) * co;
                            for (int c = 0; c < co; ++c) acc += dyp[c] * wp[c];
                        }
                    }
                    dx[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q] = acc;
                }
}

template <class T>
void conv2dt_backward_kernel(const T* x, const T* dy, T* dw, T* dbias, int bsz, int h, int wd,
                             int ci, int co, int kh, int kw, int sh, int sw) {
    const int oh_total = h * sh, ow_total = wd * sw;
    const int ph = (kh - sh) / 2, pw = (kw - sw) / 2;
    const int tasks = kh * kw * ci;
#pragma omp parallel for schedule(static)
    for (int t = 0; t < tasks; ++t) {
        const int r = t / (kw * ci);
        const int s = (t / ci) % kw;
        const int q = t % ci;
        T* dwp = dw + static_cast<std::size_t>(t) * co;
        for (int c = 0; c < co; ++c) dwp[c] = T(0);
        for (int b = 0; b < bsz; ++b)
            for (int ih = 0; ih < h; ++ih) {
                const int oh = ih * sh + r - ph;
                if (oh < 0 || oh >= oh_total) continue;
                for (int iw = 0; iw < wd; ++iw) {
                    const int ow = iw * sw + s - pw;
                    if (ow < 0 || ow >= ow_total) continue;
                    const T xv = x[((static_cast<std::size_t>(b) * h + ih) * wd + iw) * ci + q];
                    const T* dyp =
                        dy + ((static_cast<std::size_t>(b) * oh_total + oh) * ow_total + ow) * co;
                    for (int c = 0; c < co; ++c) dwp[c] += xv * dyp[c];
                }
            }
    }
    if (dbias) {
        for (int c = 0; c < co; ++c) dbias[c] = T(0);
        for (std::size_t i = 0; i < static_cast<std::size_t>(bsz) * oh_total * ow_total; ++i) {
            const T* dyp = dy + i * co;
            for (int c = 0; c < co; ++c) dbias[c] += dyp[c];
        }
    }
}

}  // namespace cebed::kernels
