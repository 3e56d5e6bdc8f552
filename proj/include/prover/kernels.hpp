#pragma once

#include <string>

namespace prover::kern {

// Dense double-precision primitives behind the training loop. Two
// implementations ship: a scalar reference and an AVX2+FMA variant; the
// active one is picked at load time from CPUID and can be forced with the
// FRINGE_KERNELS environment variable ("scalar" or "avx2") or select().
//
// Matrices are row-major. All "acc" operations accumulate into the output.
struct Ops {
    const char* name;

    // y += A x           (A: rows x cols, x: cols, y: rows)
    void (*matvec_acc)(const double* A, const double* x, double* y, int rows, int cols);
    // y += A^T x         (A: rows x cols, x: rows, y: cols)
    void (*matvec_t_acc)(const double* A, const double* x, double* y, int rows, int cols);
    // A += x y^T         (x: rows, y: cols)
    void (*outer_acc)(double* A, const double* x, const double* y, int rows, int cols);
    // y += a x
    void (*axpy)(double a, const double* x, double* y, int n);
    double (*dot)(const double* x, const double* y, int n);
    double (*sum)(const double* x, int n);
    // z = x .* y
    void (*mul)(const double* x, const double* y, double* z, int n);
    // z += x .* y
    void (*mul_acc)(const double* x, const double* y, double* z, int n);
    void (*scale)(double* x, double a, int n);
    // acc = decay acc + (1-decay) g.^2 ; p -= lr g ./ sqrt(acc + eps)
    void (*rmsprop)(double* p, double* acc, const double* g, int n,
                    double lr, double decay, double eps);
};

const Ops& scalar_ops();
// nullptr when the binary or the CPU lacks AVX2+FMA.
const Ops* avx2_ops();

// The active implementation.
const Ops& ops();

// Force an implementation by name; throws std::runtime_error if unavailable.
void select(const std::string& name);

// Elementwise transcendentals. Plain loops in both builds (no vector libm
// here), so they live outside Ops.
void tanh_vec(const double* x, double* y, int n);
void sigmoid_vec(const double* x, double* y, int n);

}  // namespace prover::kern
