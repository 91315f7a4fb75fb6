// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors

#pragma once

#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cebed/kernels.hpp"

namespace cebed::nn {

// Dense real tensor. float is the training dtype; the double
// instantiation exists for gradient checking.
template <class T>
struct TensorT {
    std::vector<int> shape;
    std::vector<T> v;

    TensorT() = default;
    explicit TensorT(std::vector<int> s) : shape(std::move(s)) { v.assign(numel_of(shape), T(0)); }
    TensorT(std::vector<int> s, std::vector<T> data) : shape(std::move(s)), v(std::move(data)) {
        if (v.size() != numel_of(shape)) throw std::invalid_argument("Tensor: shape/data mismatch");
    }

    static std::size_t numel_of(const std::vector<int>& s) {
        std::size_t n = 1;
        for (int d : s) {
            if (d < 1) throw std::invalid_argument("Tensor: dimensions must be >= 1");
            n *= static_cast<std::size_t>(d);
        }
        return n;
    }

    std::size_t numel() const { return v.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }
    int last_dim() const { return shape.empty() ? 1 : shape.back(); }

    void check_finite(const char* where) const {
        for (T x : v)
            if (!std::isfinite(static_cast<double>(x)))
                throw std::runtime_error(std::string("non-finite tensor after ") + where);
    }
};

using Tensor = TensorT<float>;

// Reverse-mode tape. Nodes are appended in topological order, so the
// backward sweep is a single reverse pass that touches each node once.
template <class T>
class TapeT {
  public:
    using Tens = TensorT<T>;

    int input(Tens value) { return add_leaf(std::move(value), false); }

    int param(const std::string& name, Tens value) {
        const int id = add_leaf(std::move(value), true);
        params_.emplace_back(name, id);
        return id;
    }

    const Tens& value(int id) const { return nodes_[check(id)].value; }
    const Tens& grad(int id) const {
        const Node& n = nodes_[check(id)];
        if (n.grad.v.empty()) throw std::logic_error("tape: gradient not computed for node");
        return n.grad;
    }
    const std::vector<std::pair<std::string, int>>& params() const { return params_; }

    // ---- primitives --------------------------------------------------

    int dense(int x, int w, int b) {
        const Tens& xv = value(x);
        const Tens& wv = value(w);
        const Tens& bv = value(b);
        if (xv.rank() != 2 || wv.rank() != 2 || bv.rank() != 1)
            throw std::invalid_argument("dense: expects x[B,I], w[I,O], b[O]");
        const int bsz = xv.dim(0), in = xv.dim(1), out = wv.dim(1);
        if (wv.dim(0) != in || bv.dim(0) != out) throw std::invalid_argument("dense: shape mismatch");

        Tens y({bsz, out});
        kernels::matmul_nn(xv.v.data(), wv.v.data(), y.v.data(), bsz, in, out);
        for (int i = 0; i < bsz; ++i)
            for (int j = 0; j < out; ++j) y.v[static_cast<std::size_t>(i) * out + j] += bv.v[j];

        return add_node(std::move(y), {x, w, b}, [x, w, b, bsz, in, out](TapeT& t, const Tens& dy) {
            if (t.wants_grad(x))
                kernels::matmul_nt(dy.v.data(), t.value(w).v.data(), t.grad_buf(x), bsz, out, in,
                                   true);
            if (t.wants_grad(w))
                kernels::matmul_tn(t.value(x).v.data(), dy.v.data(), t.grad_buf(w), in, bsz, out,
                                   true);
            if (t.wants_grad(b)) {
                T* db = t.grad_buf(b);
                for (int i = 0; i < bsz; ++i)
                    for (int j = 0; j < out; ++j) db[j] += dy.v[static_cast<std::size_t>(i) * out + j];
            }
        });
    }

    int conv2d(int x, int w, int b) {
        const Tens& xv = value(x);
        const Tens& wv = value(w);
        const Tens& bv = value(b);
        if (xv.rank() != 4 || wv.rank() != 4 || bv.rank() != 1)
            throw std::invalid_argument("conv2d: expects x[B,H,W,Ci], w[KH,KW,Ci,Co], b[Co]");
        const int bsz = xv.dim(0), h = xv.dim(1), wd = xv.dim(2), ci = xv.dim(3);
        const int kh = wv.dim(0), kw = wv.dim(1), co = wv.dim(3);
        if (wv.dim(2) != ci || bv.dim(0) != co) throw std::invalid_argument("conv2d: shape mismatch");
        if (kh % 2 == 0 || kw % 2 == 0)
            throw std::invalid_argument("conv2d: kernel sizes must be odd for same padding");

        Tens y({bsz, h, wd, co});
        kernels::conv2d_forward(xv.v.data(), wv.v.data(), bv.v.data(), y.v.data(), bsz, h, wd, ci,
                                co, kh, kw);

        return add_node(std::move(y), {x, w, b},
                        [=](TapeT& t, const Tens& dy) {
                            if (t.wants_grad(x)) {
                                Tens dx({bsz, h, wd, ci});
                                kernels::conv2d_backward_input(dy.v.data(), t.value(w).v.data(),
                                                               dx.v.data(), bsz, h, wd, ci, co, kh, kw);
                                t.accumulate(x, dx.v);
                            }
                            if (t.wants_grad(w)) {
                                Tens dw({kh, kw, ci, co});
                                Tens db({co});
                                kernels::conv2d_backward_kernel(t.value(x).v.data(), dy.v.data(),
                                                                dw.v.data(), db.v.data(), bsz, h, wd,
                                                                ci, co, kh, kw);
                                t.accumulate(w, dw.v);
                                if (t.wants_grad(b)) t.accumulate(b, db.v);
                            } else if (t.wants_grad(b)) {
                                Tens db({co});
                                kernels::conv2d_backward_kernel(t.value(x).v.data(), dy.v.data(),
                                                                static_cast<T*>(nullptr),
                                                                db.v.data(), bsz, h, wd, ci, co, kh,
                                                                kw);
                                t.accumulate(b, db.v);
                            }
                        });
    }

    int conv2d_transpose(int x, int w, int b, int sh, int sw) {
        const Tens& xv = value(x);
        const Tens& wv = value(w);
        const Tens& bv = value(b);
        if (xv.rank() != 4 || wv.rank() != 4 || bv.rank() != 1)
            throw std::invalid_argument("conv2d_transpose: expects x[B,H,W,Ci], w[KH,KW,Ci,Co], b[Co]");
        const int bsz = xv.dim(0), h = xv.dim(1), wd = xv.dim(2), ci = xv.dim(3);
        const int kh = wv.dim(0), kw = wv.dim(1), co = wv.dim(3);
        if (wv.dim(2) != ci || bv.dim(0) != co)
            throw std::invalid_argument("conv2d_transpose: shape mismatch");
        if (sh < 1 || sw < 1 || kh < sh || kw < sw || (kh - sh) % 2 != 0 || (kw - sw) % 2 != 0)
            throw std::invalid_argument("conv2d_transpose: kernel must be stride + even margin");

        Tens y({bsz, h * sh, wd * sw, co});
        kernels::conv2dt_forward(xv.v.data(), wv.v.data(), bv.v.data(), y.v.data(), bsz, h, wd, ci,
                                 co, kh, kw, sh, sw);

        return add_node(std::move(y), {x, w, b}, [=](TapeT& t, const Tens& dy) {
            if (t.wants_grad(x)) {
                Tens dx({bsz, h, wd, ci});
                kernels::conv2dt_backward_input(dy.v.data(), t.value(w).v.data(), dx.v.data(), bsz,
                                                h, wd, ci, co, kh, kw, sh, sw);
                t.accumulate(x, dx.v);
            }
            if (t.wants_grad(w) || t.wants_grad(b)) {
                Tens dw({kh, kw, ci, co});
                Tens db({co});
                kernels::conv2dt_backward_kernel(t.value(x).v.data(), dy.v.data(), dw.v.data(),
                                                 db.v.data(), bsz, h, wd, ci, co, kh, kw, sh, sw);
                if (t.wants_grad(w)) t.accumulate(w, dw.v);
                if (t.wants_grad(b)) t.accumulate(b, db.v);
            }
        });
    }

    // Half-pixel-aligned bilinear resize of [B,H,W,C] to [B,OH,OW,C].
    int bilinear_upsample(int x, int oh, int ow) {
        const Tens& xv = value(x);
        if (xv.rank() != 4) throw std::invalid_argument("bilinear_upsample: expects x[B,H,W,C]");
        if (oh < 1 || ow < 1) throw std::invalid_argument("bilinear_upsample: bad output size");
        const int bsz = xv.dim(0), h = xv.dim(1), wd = xv.dim(2), c = xv.dim(3);

        // Per-axis corner indices and weights are shared by every batch.
        std::vector<int> y0(oh), y1(oh), x0(ow), x1(ow);
        std::vector<T> wy(oh), wx(ow);
        resize_axis(h, oh, y0, y1, wy);
        resize_axis(wd, ow, x0, x1, wx);

        Tens y({bsz, oh, ow, c});
        for (int b = 0; b < bsz; ++b)
            for (int i = 0; i < oh; ++i)
                for (int j = 0; j < ow; ++j) {
                    const T* r00 = &xv.v[((static_cast<std::size_t>(b) * h + y0[i]) * wd + x0[j]) * c];
                    const T* r01 = &xv.v[((static_cast<std::size_t>(b) * h + y0[i]) * wd + x1[j]) * c];
                    const T* r10 = &xv.v[((static_cast<std::size_t>(b) * h + y1[i]) * wd + x0[j]) * c];
                    const T* r11 = &xv.v[((static_cast<std::size_t>(b) * h + y1[i]) * wd + x1[j]) * c];
                    T* out = &y.v[((static_cast<std::size_t>(b) * oh + i) * ow + j) * c];
                    const T a = (T(1) - wy[i]) * (T(1) - wx[j]);
                    const T bw = (T(1) - wy[i]) * wx[j];
                    const T cw = wy[i] * (T(1) - wx[j]);
                    const T dw = wy[i] * wx[j];
                    for (int q = 0; q < c; ++q)
                        out[q] = a * r00[q] + bw * r01[q] + cw * r10[q] + dw * r11[q];
                }

        return add_node(std::move(y), {x},
                        [x, bsz, h, wd, c, oh, ow, y0, y1, x0, x1, wy, wx](TapeT& t, const Tens& dy) {
                            if (!t.wants_grad(x)) return;
                            T* dx = t.grad_buf(x);
                            for (int b = 0; b < bsz; ++b)
                                for (int i = 0; i < oh; ++i)
                                    for (int j = 0; j < ow; ++j) {
                                        const T* g =
                                            &dy.v[((static_cast<std::size_t>(b) * oh + i) * ow + j) * c];
                                        const T a = (T(1) - wy[i]) * (T(1) - wx[j]);
                                        const T bw = (T(1) - wy[i]) * wx[j];
                                        const T cw = wy[i] * (T(1) - wx[j]);
                                        const T dw2 = wy[i] * wx[j];
                                        T* d00 = dx + ((static_cast<std::size_t>(b) * h + y0[i]) * wd +
                                                       x0[j]) * c;
                                        T* d01 = dx + ((static_cast<std::size_t>(b) * h + y0[i]) * wd +
                                                       x1[j]) * c;
                                        T* d10 = dx + ((static_cast<std::size_t>(b) * h + y1[i]) * wd +
                                                       x0[j]) * c;
                                        T* d11 = dx + ((static_cast<std::size_t>(b) * h + y1[i]) * wd +
                                                       x1[j]) * c;
                                        for (int q = 0; q < c; ++q) {
                                            d00[q] += a * g[q];
                                            d01[q] += bw * g[q];
                                            d10[q] += cw * g[q];
                                            d11[q] += dw2 * g[q];
                                        }
                                    }
                        });
    }

    int relu(int x) {
        const Tens& xv = value(x);
        Tens y = xv;
        for (T& t : y.v) t = t > T(0) ? t : T(0);
        return add_node(std::move(y), {x}, [x](TapeT& t, const Tens& dy) {
            if (!t.wants_grad(x)) return;
            const Tens& xv = t.value(x);
            T* dx = t.grad_buf(x);
            for (std::size_t i = 0; i < dy.v.size(); ++i)
                if (xv.v[i] > T(0)) dx[i] += dy.v[i];
        });
    }

    // Normalizes the last axis to zero mean, unit variance, then applies
    // the affine pair (gamma, beta).
    int layer_norm(int x, int gamma, int beta) {
        const Tens& xv = value(x);
        const Tens& gv = value(gamma);
        const Tens& bv = value(beta);
        const int d = xv.last_dim();
        if (gv.rank() != 1 || bv.rank() != 1 || gv.dim(0) != d || bv.dim(0) != d)
            throw std::invalid_argument("layer_norm: gamma/beta must match the last axis");
        const std::size_t rows = xv.numel() / static_cast<std::size_t>(d);
        constexpr T eps = T(1e-5);

        Tens y(xv.shape);
        std::vector<T> xhat(xv.numel()), inv_std(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const T* in = &xv.v[r * d];
            T mean = T(0);
            for (int i = 0; i < d; ++i) mean += in[i];
            mean /= T(d);
            T var = T(0);
            for (int i = 0; i < d; ++i) var += (in[i] - mean) * (in[i] - mean);
            var /= T(d);
            const T is = T(1) / std::sqrt(var + eps);
            inv_std[r] = is;
            for (int i = 0; i < d; ++i) {
                const T xh = (in[i] - mean) * is;
                xhat[r * d + i] = xh;
                y.v[r * d + i] = xh * gv.v[i] + bv.v[i];
            }
        }

        return add_node(std::move(y), {x, gamma, beta},
                        [x, gamma, beta, d, rows, xhat = std::move(xhat),
                         inv_std = std::move(inv_std)](TapeT& t, const Tens& dy) {
                            const Tens& gv = t.value(gamma);
                            for (std::size_t r = 0; r < rows; ++r) {
                                const T* g = &dy.v[r * d];
                                const T* xh = &xhat[r * d];
                                if (t.wants_grad(gamma)) {
                                    T* dg = t.grad_buf(gamma);
                                    for (int i = 0; i < d; ++i) dg[i] += g[i] * xh[i];
                                }
                                if (t.wants_grad(beta)) {
                                    T* db = t.grad_buf(beta);
                                    for (int i = 0; i < d; ++i) db[i] += g[i];
                                }
                                if (t.wants_grad(x)) {
                                    T sum_g = T(0), sum_gx = T(0);
                                    for (int i = 0; i < d; ++i) {
                                        const T gg = g[i] * gv.v[i];
                                        sum_g += gg;
                                        sum_gx += gg * xh[i];
                                    }
                                    T* dx = t.grad_buf(x);
                                    for (int i = 0; i < d; ++i) {
                                        const T gg = g[i] * gv.v[i];
                                        dx[r * d + i] += (gg - sum_g / T(d) - xh[i] * sum_gx / T(d)) *
                                                         inv_std[r];
                                    }
                                }
                            }
                        });
    }

    int softmax(int x) {
        const Tens& xv = value(x);
        const int d = xv.last_dim();
        const std::size_t rows = xv.numel() / static_cast<std::size_t>(d);
        Tens y(xv.shape);
        std::copy(xv.v.begin(), xv.v.end(), y.v.begin());
        softmax_rows(y.v.data(), static_cast<int>(rows), d);
        const int id = add_node(std::move(y), {x}, nullptr);
        Node& n = nodes_[static_cast<std::size_t>(id)];
        if (n.requires_grad)
            n.backward = [x, id, d, rows](TapeT& t, const Tens& dy) {
                if (!t.wants_grad(x)) return;
                const Tens& yv = t.value(id);
                T* dx = t.grad_buf(x);
                for (std::size_t r = 0; r < rows; ++r) {
                    const T* yr = &yv.v[r * d];
                    const T* gr = &dy.v[r * d];
                    T dot = T(0);
                    for (int i = 0; i < d; ++i) dot += gr[i] * yr[i];
                    for (int i = 0; i < d; ++i) dx[r * d + i] += yr[i] * (gr[i] - dot);
                }
            };
        return id;
    }

    // y[b,...] = x[b,...] + p[...] with p broadcast over the batch axis.
    int broadcast_add(int x, int p) {
        const Tens& xv = value(x);
        const Tens& pv = value(p);
        if (xv.rank() < 2 ||
            std::vector<int>(xv.shape.begin() + 1, xv.shape.end()) != pv.shape)
            throw std::invalid_argument("broadcast_add: p must match x without the batch axis");
        const int bsz = xv.dim(0);
        const std::size_t stride = pv.numel();
        Tens y(xv.shape);
        for (int b = 0; b < bsz; ++b)
            for (std::size_t i = 0; i < stride; ++i)
                y.v[static_cast<std::size_t>(b) * stride + i] = xv.v[b * stride + i] + pv.v[i];
        return add_node(std::move(y), {x, p}, [x, p, bsz, stride](TapeT& t, const Tens& dy) {
            if (t.wants_grad(x)) t.accumulate(x, dy.v);
            if (t.wants_grad(p)) {
                T* dp = t.grad_buf(p);
                for (int b = 0; b < bsz; ++b)
                    for (std::size_t i = 0; i < stride; ++i)
                        dp[i] += dy.v[static_cast<std::size_t>(b) * stride + i];
            }
        });
    }

    int residual_add(int a, int b) {
        const Tens& av = value(a);
        const Tens& bv = value(b);
        if (av.shape != bv.shape) throw std::invalid_argument("residual_add: shape mismatch");
        Tens y(av.shape);
        for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] = av.v[i] + bv.v[i];
        return add_node(std::move(y), {a, b}, [a, b](TapeT& t, const Tens& dy) {
            if (t.wants_grad(a)) t.accumulate(a, dy.v);
            if (t.wants_grad(b)) t.accumulate(b, dy.v);
        });
    }

    int reshape(int x, std::vector<int> shape) {
        const Tens& xv = value(x);
        if (Tens::numel_of(shape) != xv.numel())
            throw std::invalid_argument("reshape: element count mismatch");
        Tens y(std::move(shape), xv.v);
        return add_node(std::move(y), {x}, [x](TapeT& t, const Tens& dy) {
            if (t.wants_grad(x)) t.accumulate(x, dy.v);
        });
    }

    // Multi-head scaled dot-product attention over [B,S,D] inputs; the
    // feature axis is split into `heads` contiguous chunks.
    int scaled_dot_attention(int q, int k, int v, int heads) {
        const Tens& qv = value(q);
        const Tens& kv = value(k);
        const Tens& vv = value(v);
        if (qv.rank() != 3 || kv.shape != qv.shape || vv.shape != qv.shape)
            throw std::invalid_argument("scaled_dot_attention: expects equal [B,S,D] inputs");
        const int bsz = qv.dim(0), slen = qv.dim(1), dmodel = qv.dim(2);
        if (heads < 1 || dmodel % heads != 0)
            throw std::invalid_argument("scaled_dot_attention: heads must divide the feature axis");
        const int dh = dmodel / heads;
        const T scale = T(1) / std::sqrt(static_cast<T>(dh));

        Tens y(qv.shape);
        // Row-softmaxed attention weights per (batch, head), kept for backward.
        std::vector<T> attn(static_cast<std::size_t>(bsz) * heads * slen * slen);
        std::vector<T> qh(static_cast<std::size_t>(slen) * dh), khb(qh.size()), vhb(qh.size());
        std::vector<T> logits(static_cast<std::size_t>(slen) * slen), yh(qh.size());
        for (int b = 0; b < bsz; ++b)
            for (int hd = 0; hd < heads; ++hd) {
                gather_head(qv, b, hd, dh, qh);
                gather_head(kv, b, hd, dh, khb);
                gather_head(vv, b, hd, dh, vhb);
                kernels::matmul_nt(qh.data(), khb.data(), logits.data(), slen, dh, slen);
                for (T& t : logits) t *= scale;
                softmax_rows(logits.data(), slen, slen);
                std::copy(logits.begin(), logits.end(),
                          attn.begin() + (static_cast<std::size_t>(b) * heads + hd) * slen * slen);
                kernels::matmul_nn(logits.data(), vhb.data(), yh.data(), slen, slen, dh);
                scatter_head(yh, b, hd, dh, y);
            }

        return add_node(
            std::move(y), {q, k, v},
            [q, k, v, bsz, slen, dmodel, heads, dh, scale, attn = std::move(attn)](TapeT& t,
                                                                                   const Tens& dy) {
                std::vector<T> dyh(static_cast<std::size_t>(slen) * dh),
                    buf(static_cast<std::size_t>(slen) * dh);
                std::vector<T> da(static_cast<std::size_t>(slen) * slen), dl(da.size());
                Tens dq({bsz, slen, dmodel}), dk({bsz, slen, dmodel}), dv({bsz, slen, dmodel});
                std::vector<T> qh(static_cast<std::size_t>(slen) * dh), khb(qh.size()),
                    vhb(qh.size());
                for (int b = 0; b < bsz; ++b)
                    for (int hd = 0; hd < heads; ++hd) {
                        const T* a =
                            attn.data() + (static_cast<std::size_t>(b) * heads + hd) * slen * slen;
                        gather_head(dy, b, hd, dh, dyh);
                        gather_head(t.value(q), b, hd, dh, qh);
                        gather_head(t.value(k), b, hd, dh, khb);
                        gather_head(t.value(v), b, hd, dh, vhb);
                        // dV = A^T dY
                        kernels::matmul_tn(a, dyh.data(), buf.data(), slen, slen, dh);
                        scatter_head_add(buf, b, hd, dh, dv);
                        // dA = dY V^T ; dL = A (dA - rowsum(dA*A))
                        kernels::matmul_nt(dyh.data(), vhb.data(), da.data(), slen, dh, slen);
                        for (int i = 0; i < slen; ++i) {
                            T dot = T(0);
                            for (int j = 0; j < slen; ++j)
                                dot += da[static_cast<std::size_t>(i) * slen + j] *
                                       a[static_cast<std::size_t>(i) * slen + j];
                            for (int j = 0; j < slen; ++j)
                                dl[static_cast<std::size_t>(i) * slen + j] =
                                    a[static_cast<std::size_t>(i) * slen + j] *
                                    (da[static_cast<std::size_t>(i) * slen + j] - dot) * scale;
                        }
                        // dQ = dL K ; dK = dL^T Q
                        kernels::matmul_nn(dl.data(), khb.data(), buf.data(), slen, slen, dh);
                        scatter_head_add(buf, b, hd, dh, dq);
                        kernels::matmul_tn(dl.data(), qh.data(), buf.data(), slen, slen, dh);
                        scatter_head_add(buf, b, hd, dh, dk);
                    }
                if (t.wants_grad(q)) t.accumulate(q, dq.v);
                if (t.wants_grad(k)) t.accumulate(k, dk.v);
                if (t.wants_grad(v)) t.accumulate(v, dv.v);
            });
    }

    // Mean over all elements of (pred - target)^2, accumulated in double.
    int mse_loss(int pred, int target) {
        const Tens& pv = value(pred);
        const Tens& tv = value(target);
        if (pv.shape != tv.shape) throw std::invalid_argument("mse_loss: shape mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < pv.v.size(); ++i) {
            const double d = static_cast<double>(pv.v[i]) - static_cast<double>(tv.v[i]);
            acc += d * d;
        }
        Tens y({1});
        y.v[0] = static_cast<T>(acc / static_cast<double>(pv.v.size()));
        return add_node(std::move(y), {pred, target}, [pred, target](TapeT& t, const Tens& dy) {
            const Tens& pv = t.value(pred);
            const Tens& tv = t.value(target);
            const T s = dy.v[0] * T(2) / static_cast<T>(pv.v.size());
            if (t.wants_grad(pred)) {
                T* dp = t.grad_buf(pred);
                for (std::size_t i = 0; i < pv.v.size(); ++i) dp[i] += s * (pv.v[i] - tv.v[i]);
            }
            if (t.wants_grad(target)) {
                T* dt = t.grad_buf(target);
                for (std::size_t i = 0; i < pv.v.size(); ++i) dt[i] -= s * (pv.v[i] - tv.v[i]);
            }
        });
    }

    // Reverse sweep from a scalar loss. Gradients of all parameters (and
    // intermediate nodes) become available through grad().
    void backward(int loss) {
        Node& ln = nodes_[check(loss)];
        if (ln.value.numel() != 1) throw std::invalid_argument("backward: loss must be scalar");
        if (!ln.requires_grad)
            throw std::invalid_argument("backward: loss is not reachable from any parameter");
        for (Node& n : nodes_)
            if (n.requires_grad) n.grad = Tens(n.value.shape);
        ln.grad.v[0] = T(1);
        for (int id = loss; id >= 0; --id) {
            Node& n = nodes_[static_cast<std::size_t>(id)];
            if (n.requires_grad && n.backward) n.backward(*this, n.grad);
        }
    }

  private:
    struct Node {
        Tens value;
        Tens grad;
        bool requires_grad = false;
        std::function<void(TapeT&, const Tens&)> backward;
    };

    int check(int id) const {
        if (id < 0 || id >= static_cast<int>(nodes_.size()))
            throw std::logic_error("tape: bad node id");
        return id;
    }

    int add_leaf(Tens value, bool requires_grad) {
        Node n;
        n.value = std::move(value);
        n.requires_grad = requires_grad;
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    int add_node(Tens value, std::initializer_list<int> parents,
                 std::function<void(TapeT&, const Tens&)> bwd) {
        value.check_finite("forward op");
        Node n;
        n.value = std::move(value);
        for (int p : parents) n.requires_grad |= nodes_[check(p)].requires_grad;
        if (n.requires_grad) n.backward = std::move(bwd);
        nodes_.push_back(std::move(n));
        return static_cast<int>(nodes_.size()) - 1;
    }

    bool wants_grad(int id) const { return nodes_[check(id)].requires_grad; }

    T* grad_buf(int id) { return nodes_[check(id)].grad.v.data(); }

    void accumulate(int id, const std::vector<T>& g) {
        Tens& dst = nodes_[check(id)].grad;
        if (dst.v.size() != g.size()) throw std::logic_error("tape: gradient size mismatch");
        for (std::size_t i = 0; i < g.size(); ++i) dst.v[i] += g[i];
    }

    static void resize_axis(int in, int out, std::vector<int>& i0, std::vector<int>& i1,
                            std::vector<T>& w) {
        for (int o = 0; o < out; ++o) {
            double src = (o + 0.5) * static_cast<double>(in) / out - 0.5;
            if (src < 0.0) src = 0.0;
            if (src > in - 1) src = in - 1;
            const int lo = static_cast<int>(src);
            i0[o] = lo;
            i1[o] = std::min(lo + 1, in - 1);
            w[o] = static_cast<T>(src - lo);
        }
    }

    static void gather_head(const Tens& t, int b, int head, int dh, std::vector<T>& out) {
        const int slen = t.dim(1), dmodel = t.dim(2);
        for (int s = 0; s < slen; ++s) {
            const T* row = &t.v[(static_cast<std::size_t>(b) * slen + s) * dmodel + head * dh];
            std::copy(row, row + dh, out.begin() + static_cast<std::size_t>(s) * dh);
        }
    }

    static void scatter_head(const std::vector<T>& in, int b, int head, int dh, Tens& t) {
        const int slen = t.dim(1), dmodel = t.dim(2);
        for (int s = 0; s < slen; ++s)
            std::copy(in.begin() + static_cast<std::size_t>(s) * dh,
                      in.begin() + static_cast<std::size_t>(s + 1) * dh,
                      &t.v[(static_cast<std::size_t>(b) * slen + s) * dmodel + head * dh]);
    }

    static void scatter_head_add(const std::vector<T>& in, int b, int head, int dh, Tens& t) {
        const int slen = t.dim(1), dmodel = t.dim(2);
        for (int s = 0; s < slen; ++s) {
            T* row = &t.v[(static_cast<std::size_t>(b) * slen + s) * dmodel + head * dh];
            for (int i = 0; i < dh; ++i) row[i] += in[static_cast<std::size_t>(s) * dh + i];
        }
    }

    static void softmax_rows(T* m, int rows, int cols) {
        for (int r = 0; r < rows; ++r) {
            T* row = m + static_cast<std::size_t>(r) * cols;
            T mx = row[0];
            for (int i = 1; i < cols; ++i) mx = std::max(mx, row[i]);
            T sum = T(0);
            for (int i = 0; i < cols; ++i) {
                row[i] = std::exp(row[i] - mx);
                sum += row[i];
            }
            for (int i = 0; i < cols; ++i) row[i] /= sum;
        }
    }

    std::vector<Node> nodes_;
    std::vector<std::pair<std::string, int>> params_;
};

using Tape = TapeT<float>;

}  // namespace cebed::nn
