#include <cmath>

#include "prover/kernels.hpp"

namespace prover::kern {

namespace {

void s_matvec_acc(const double* A, const double* x, double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* row = A + static_cast<long>(i) * cols;
        double acc = 0.0;
        for (int j = 0; j < cols; ++j) acc += row[j] * x[j];
        y[i] += acc;
    }
}

void s_matvec_t_acc(const double* A, const double* x, double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* row = A + static_cast<long>(i) * cols;
        double xi = x[i];
        for (int j = 0; j < cols; ++j) y[j] += row[j] * xi;
    }
}

void s_outer_acc(double* A, const double* x, const double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        double* row = A + static_cast<long>(i) * cols;
        double xi = x[i];
        for (int j = 0; j < cols; ++j) row[j] += xi * y[j];
    }
}

void s_axpy(double a, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += a * x[i];
}

double s_dot(const double* x, const double* y, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double s_sum(const double* x, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void s_mul(const double* x, const double* y, double* z, int n) {
    for (int i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void s_mul_acc(const double* x, const double* y, double* z, int n) {
    for (int i = 0; i < n; ++i) z[i] += x[i] * y[i];
}

void s_scale(double* x, double a, int n) {
    for (int i = 0; i < n; ++i) x[i] *= a;
}

void s_rmsprop(double* p, double* acc, const double* g, int n,
               double lr, double decay, double eps) {
    for (int i = 0; i < n; ++i) {
        acc[i] = decay * acc[i] + (1.0 - decay) * g[i] * g[i];
        p[i] -= lr * g[i] / std::sqrt(acc[i] + eps);
    }
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",   s_matvec_acc, s_matvec_t_acc, s_outer_acc, s_axpy,
        s_dot,      s_sum,        s_mul,          s_mul_acc,   s_scale,
        s_rmsprop,
    };
    return ops;
}

void tanh_vec(const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] = std::tanh(x[i]);
}

void sigmoid_vec(const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

}  // namespace prover::kern
