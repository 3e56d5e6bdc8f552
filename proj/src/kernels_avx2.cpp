// Compiled with -mavx2 -mfma (see CMakeLists); only reached after a CPUID
// check, so no illegal-instruction risk on older cores.
#include "prover/kernels.hpp"

#ifdef __AVX2__

#include <immintrin.h>

namespace prover::kern {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void v_matvec_acc(const double* A, const double* x, double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* row = A + static_cast<long>(i) * cols;
        __m256d acc = _mm256_setzero_pd();
        int j = 0;
        for (; j + 4 <= cols; j += 4)
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j), acc);
        double s = hsum(acc);
        for (; j < cols; ++j) s += row[j] * x[j];
        y[i] += s;
    }
}

void v_matvec_t_acc(const double* A, const double* x, double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        const double* row = A + static_cast<long>(i) * cols;
        __m256d xi = _mm256_set1_pd(x[i]);
        int j = 0;
        for (; j + 4 <= cols; j += 4) {
            __m256d yj = _mm256_loadu_pd(y + j);
            yj = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), xi, yj);
            _mm256_storeu_pd(y + j, yj);
        }
        for (; j < cols; ++j) y[j] += row[j] * x[i];
    }
}

void v_outer_acc(double* A, const double* x, const double* y, int rows, int cols) {
    for (int i = 0; i < rows; ++i) {
        double* row = A + static_cast<long>(i) * cols;
        __m256d xi = _mm256_set1_pd(x[i]);
        int j = 0;
        for (; j + 4 <= cols; j += 4) {
            __m256d r = _mm256_loadu_pd(row + j);
            r = _mm256_fmadd_pd(xi, _mm256_loadu_pd(y + j), r);
            _mm256_storeu_pd(row + j, r);
        }
        for (; j < cols; ++j) row[j] += x[i] * y[j];
    }
}

void v_axpy(double a, const double* x, double* y, int n) {
    __m256d av = _mm256_set1_pd(a);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

double v_dot(const double* x, const double* y, int n) {
    __m256d acc = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

double v_sum(const double* x, int n) {
    __m256d acc = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

void v_mul(const double* x, const double* y, double* z, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(z + i,
                         _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void v_mul_acc(const double* x, const double* y, double* z, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d zi = _mm256_loadu_pd(z + i);
        zi = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), zi);
        _mm256_storeu_pd(z + i, zi);
    }
    for (; i < n; ++i) z[i] += x[i] * y[i];
}

void v_scale(double* x, double a, int n) {
    __m256d av = _mm256_set1_pd(a);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_mul_pd(_mm256_loadu_pd(x + i), av));
    for (; i < n; ++i) x[i] *= a;
}

void v_rmsprop(double* p, double* acc, const double* g, int n,
               double lr, double decay, double eps) {
    __m256d dv = _mm256_set1_pd(decay);
    __m256d cv = _mm256_set1_pd(1.0 - decay);
    __m256d lv = _mm256_set1_pd(lr);
    __m256d ev = _mm256_set1_pd(eps);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d gi = _mm256_loadu_pd(g + i);
        __m256d ai = _mm256_loadu_pd(acc + i);
        ai = _mm256_fmadd_pd(cv, _mm256_mul_pd(gi, gi), _mm256_mul_pd(dv, ai));
        _mm256_storeu_pd(acc + i, ai);
        __m256d denom = _mm256_sqrt_pd(_mm256_add_pd(ai, ev));
        __m256d pi = _mm256_loadu_pd(p + i);
        pi = _mm256_sub_pd(pi, _mm256_div_pd(_mm256_mul_pd(lv, gi), denom));
        _mm256_storeu_pd(p + i, pi);
    }
    for (; i < n; ++i) {
        acc[i] = decay * acc[i] + (1.0 - decay) * g[i] * g[i];
        p[i] -= lr * g[i] / __builtin_sqrt(acc[i] + eps);
    }
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma"))
        return nullptr;
    static const Ops ops = {
        "avx2",  v_matvec_acc, v_matvec_t_acc, v_outer_acc, v_axpy,
        v_dot,   v_sum,        v_mul,          v_mul_acc,   v_scale,
        v_rmsprop,
    };
    return &ops;
}

}  // namespace prover::kern

#else

namespace prover::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace prover::kern

#endif
