// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 the cebed authors
//
// Compares the OpenMP kernels against the serial reference on shapes the
// model zoo actually runs, and verifies both produce identical bits.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cebed/kernels.hpp"
#include "cebed/rng.hpp"

using namespace cebed;

namespace {

std::vector<float> random_vec(std::size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
    return v;
}

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void row(const char* name, double gflop, double serial_s, double omp_s, bool identical) {
    std::printf("%-28s %8.2f ms %8.2f ms %6.2fx %7.2f GF/s  %s\n", name, serial_s * 1e3,
                omp_s * 1e3, serial_s / omp_s, gflop / omp_s, identical ? "bitwise-equal" : "DIFF");
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 5;
    if (argc > 1) reps = std::atoi(argv[1]);
#ifdef _OPENMP
    std::printf("threads: %d, reps: %d\n", omp_get_max_threads(), reps);
#else
    std::printf("threads: 1 (OpenMP disabled), reps: %d\n", reps);
#endif
    std::printf("%-28s %11s %11s %7s %12s\n", "kernel", "serial", "openmp", "speedup",
                "omp rate");
    Rng rng(1);

    {
        // DDAE-sized dense layer: [256, 2016] x [2016, 1024]
        const int m = 256, k = 2016, n = 1024;
        const auto a = random_vec(static_cast<std::size_t>(m) * k, rng);
        const auto b = random_vec(static_cast<std::size_t>(k) * n, rng);
        std::vector<float> c1(static_cast<std::size_t>(m) * n), c2 = c1;
        const double s = time_of([&] { kernels::serial::matmul_nn(a.data(), b.data(), c1.data(), m, k, n); }, reps);
        const double p = time_of([&] { kernels::matmul_nn(a.data(), b.data(), c2.data(), m, k, n); }, reps);
        row("matmul 256x2016x1024", 2.0 * m * k * n * 1e-9, s, p, c1 == c2);
    }
    {
        // ReEsNet trunk conv: [256, 72, 2, 16] with 3x3x16x16 kernels
        const int bsz = 256, h = 72, w = 2, ci = 16, co = 16, kh = 3, kw = 3;
        const auto x = random_vec(static_cast<std::size_t>(bsz) * h * w * ci, rng);
        const auto wt = random_vec(static_cast<std::size_t>(kh) * kw * ci * co, rng);
        const auto bias = random_vec(co, rng);
        std::vector<float> y1(static_cast<std::size_t>(bsz) * h * w * co), y2 = y1;
        const double s = time_of([&] {
            kernels::serial::conv2d_forward(x.data(), wt.data(), bias.data(), y1.data(), bsz, h, w,
                                            ci, co, kh, kw);
        }, reps);
        const double p = time_of([&] {
            kernels::conv2d_forward(x.data(), wt.data(), bias.data(), y2.data(), bsz, h, w, ci, co,
                                    kh, kw);
        }, reps);
        row("conv2d 256x72x2x16 3x3", 2.0 * bsz * h * w * co * kh * kw * ci * 1e-9, s, p, y1 == y2);
    }
    {
        // ChannelNet denoiser conv: [32, 72, 14, 64] with 3x3x64x64
        const int bsz = 32, h = 72, w = 14, ci = 64, co = 64, kh = 3, kw = 3;
        const auto x = random_vec(static_cast<std::size_t>(bsz) * h * w * ci, rng);
        const auto wt = random_vec(static_cast<std::size_t>(kh) * kw * ci * co, rng);
        const auto bias = random_vec(co, rng);
        std::vector<float> y1(static_cast<std::size_t>(bsz) * h * w * co), y2 = y1;
        const double s = time_of([&] {
            kernels::serial::conv2d_forward(x.data(), wt.data(), bias.data(), y1.data(), bsz, h, w,
                                            ci, co, kh, kw);
        }, reps);
        const double p = time_of([&] {
            kernels::conv2d_forward(x.data(), wt.data(), bias.data(), y2.data(), bsz, h, w, ci, co,
                                    kh, kw);
        }, reps);
        row("conv2d 32x72x14x64 3x3", 2.0 * bsz * h * w * co * kh * kw * ci * 1e-9, s, p, y1 == y2);
    }
    {
        // ReEsNet upsampler: transposed conv stride (1,7), kernel 3x15
        const int bsz = 256, h = 72, w = 2, ci = 16, co = 16, sh = 1, sw = 7;
        const int kh = 2 * sh + 2 - sh % 2, kw = 2 * sw + 2 - sw % 2;
        const auto x = random_vec(static_cast<std::size_t>(bsz) * h * w * ci, rng);
        const auto wt = random_vec(static_cast<std::size_t>(kh) * kw * ci * co, rng);
        const auto bias = random_vec(co, rng);
        std::vector<float> y1(static_cast<std::size_t>(bsz) * h * sh * w * sw * co), y2 = y1;
        const double s = time_of([&] {
            kernels::serial::conv2dt_forward(x.data(), wt.data(), bias.data(), y1.data(), bsz, h,
                                             w, ci, co, kh, kw, sh, sw);
        }, reps);
        const double p = time_of([&] {
            kernels::conv2dt_forward(x.data(), wt.data(), bias.data(), y2.data(), bsz, h, w, ci,
                                     co, kh, kw, sh, sw);
        }, reps);
        row("conv2dt 256x72x2x16 s(1,7)", 2.0 * bsz * h * w * ci * kh * kw * co * 1e-9, s, p,
            y1 == y2);
    }
    {
        // conv2d weight gradient at ReEsNet batch scale
        const int bsz = 256, h = 72, w = 2, ci = 16, co = 16, kh = 3, kw = 3;
        const auto x = random_vec(static_cast<std::size_t>(bsz) * h * w * ci, rng);
        const auto dy = random_vec(static_cast<std::size_t>(bsz) * h * w * co, rng);
        std::vector<float> dw1(static_cast<std::size_t>(kh) * kw * ci * co), dw2 = dw1;
        std::vector<float> db1(co), db2(co);
        const double s = time_of([&] {
            kernels::serial::conv2d_backward_kernel(x.data(), dy.data(), dw1.data(), db1.data(),
                                                    bsz, h, w, ci, co, kh, kw);
        }, reps);
        const double p = time_of([&] {
            kernels::conv2d_backward_kernel(x.data(), dy.data(), dw2.data(), db2.data(), bsz, h, w,
                                            ci, co, kh, kw);
        }, reps);
        row("conv2d dW 256x72x2x16", 2.0 * bsz * h * w * co * kh * kw * ci * 1e-9, s, p,
            dw1 == dw2 && db1 == db2);
    }
    return 0;
}
