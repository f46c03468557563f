#include "surftopt/kernels.hpp"

#include <cmath>
#include <stdexcept>

#if defined(__x86_64__)
#include <immintrin.h>
#endif
#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace surftopt::kernels {

// ---------------------------------------------------------------- scalar

namespace ref {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void zpbp(const double* z, double beta, double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void csr_spmv(const int* row_ptr, const int* cols, const double* vals,
              std::size_t rows, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

}  // namespace ref

// ----------------------------------------------------------------- AVX2

#if defined(__x86_64__)
namespace avx2 {

// In-order pairwise reduction of one vector register; fixed order keeps
// results reproducible from run to run.
__attribute__((target("avx2"))) static inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s2 = _mm_add_pd(lo, hi);                      // {v0+v2, v1+v3}
    __m128d s1 = _mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)); // (v0+v2)+(v1+v3)
    return _mm_cvtsd_f64(s1);
}

__attribute__((target("avx2"))) double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

__attribute__((target("avx2"))) double nrm2(const double* a, std::size_t n) {
    return std::sqrt(dot(a, a, n));
}

__attribute__((target("avx2"))) void axpy(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

__attribute__((target("avx2"))) void zpbp(const double* z, double beta, double* p, std::size_t n) {
    __m256d vb = _mm256_set1_pd(beta);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vz = _mm256_loadu_pd(z + i);
        __m256d vp = _mm256_loadu_pd(p + i);
        _mm256_storeu_pd(p + i, _mm256_add_pd(vz, _mm256_mul_pd(vb, vp)));
    }
    for (; i < n; ++i) p[i] = z[i] + beta * p[i];
}

__attribute__((target("avx2"))) void hadamard(const double* a, const double* b, double* out,
                                              std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d va = _mm256_loadu_pd(a + i);
        __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(va, vb));
    }
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

__attribute__((target("avx2"))) void csr_spmv(const int* row_ptr, const int* cols,
                                              const double* vals, std::size_t rows,
                                              const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        int k = row_ptr[r];
        const int end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        for (; k + 4 <= end; k += 4) {
            __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            __m256d vx = _mm256_i32gather_pd(x, idx, 8);
            __m256d vv = _mm256_loadu_pd(vals + k);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(vv, vx));
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

}  // namespace avx2
#endif  // __x86_64__

// ----------------------------------------------------------------- NEON

#if defined(__aarch64__)
namespace neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
    double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double nrm2(const double* a, std::size_t n) { return std::sqrt(dot(a, a, n)); }

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void zpbp(const double* z, double beta, double* p, std::size_t n) {
    float64x2_t vb = vdupq_n_f64(beta);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(p + i, vfmaq_f64(vld1q_f64(z + i), vb, vld1q_f64(p + i)));
    for (; i < n; ++i) p[i] = z[i] + beta * p[i];
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void csr_spmv(const int* row_ptr, const int* cols, const double* vals,
              std::size_t rows, const double* x, double* y) {
    // Gather is not profitable on NEON for irregular columns; only the
    // multiply-accumulate is vectorized through pairwise loads.
    for (std::size_t r = 0; r < rows; ++r) {
        int k = row_ptr[r];
        const int end = row_ptr[r + 1];
        float64x2_t acc = vdupq_n_f64(0.0);
        for (; k + 2 <= end; k += 2) {
            double xs[2] = {x[cols[k]], x[cols[k + 1]]};
            acc = vfmaq_f64(acc, vld1q_f64(vals + k), vld1q_f64(xs));
        }
        double s = vgetq_lane_f64(acc, 0) + vgetq_lane_f64(acc, 1);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

}  // namespace neon
#endif  // __aarch64__

// -------------------------------------------------------------- dispatch

namespace {

struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*nrm2)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*zpbp)(const double*, double, double*, std::size_t);
    void (*hadamard)(const double*, const double*, double*, std::size_t);
    void (*csr_spmv)(const int*, const int*, const double*, std::size_t,
                     const double*, double*);
    Isa isa;
};

constexpr KernelTable kScalarTable = {ref::dot,  ref::nrm2,     ref::axpy,
                                      ref::zpbp, ref::hadamard, ref::csr_spmv,
                                      Isa::scalar};

#if defined(__x86_64__)
constexpr KernelTable kAvx2Table = {avx2::dot,  avx2::nrm2,     avx2::axpy,
                                    avx2::zpbp, avx2::hadamard, avx2::csr_spmv,
                                    Isa::avx2};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeonTable = {neon::dot,  neon::nrm2,     neon::axpy,
                                    neon::zpbp, neon::hadamard, neon::csr_spmv,
                                    Isa::neon};
#endif

const KernelTable* resolve() {
#if defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return &kAvx2Table;
#endif
#if defined(__aarch64__)
    return &kNeonTable;
#endif
    return &kScalarTable;
}

const KernelTable* g_table = resolve();

}  // namespace

Isa active_isa() { return g_table->isa; }

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "unknown";
}

void set_active_isa(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            g_table = &kScalarTable;
            return;
        case Isa::avx2:
#if defined(__x86_64__)
            if (__builtin_cpu_supports("avx2")) {
                g_table = &kAvx2Table;
                return;
            }
#endif
            break;
        case Isa::neon:
#if defined(__aarch64__)
            g_table = &kNeonTable;
            return;
#else
            break;
#endif
    }
    throw std::invalid_argument("requested instruction set not available on this host");
}

double dot(const double* a, const double* b, std::size_t n) { return g_table->dot(a, b, n); }
double nrm2(const double* a, std::size_t n) { return g_table->nrm2(a, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
    g_table->axpy(alpha, x, y, n);
}
void zpbp(const double* z, double beta, double* p, std::size_t n) {
    g_table->zpbp(z, beta, p, n);
}
void hadamard(const double* a, const double* b, double* out, std::size_t n) {
    g_table->hadamard(a, b, out, n);
}
void csr_spmv(const int* row_ptr, const int* cols, const double* vals, std::size_t rows,
              const double* x, double* y) {
    g_table->csr_spmv(row_ptr, cols, vals, rows, x, y);
}

}  // namespace surftopt::kernels
