// Dense and sparse linear-algebra kernels used by the FEM solver.
//
// Each kernel has a scalar reference implementation (kernels::ref) plus
// optional SIMD variants (AVX2 on x86-64, NEON on aarch64). The active
// variant is chosen once per process from CPU capabilities; all variants
// of a kernel agree to rounding error and each variant is individually
// deterministic, so repeated runs on one machine are bit-identical.

#pragma once

#include <cstddef>
#include <cstdint>

namespace surftopt::kernels {

enum class Isa { scalar, avx2, neon };

// Instruction set selected at process start (overridable for tests).
Isa active_isa();
const char* isa_name(Isa isa);

// Force a variant (throws std::invalid_argument if unavailable on this
// host). Intended for equivalence tests; not thread safe.
void set_active_isa(Isa isa);

// sum_i a[i]*b[i]
double dot(const double* a, const double* b, std::size_t n);
// sqrt(dot(a,a))
double nrm2(const double* a, std::size_t n);
// y[i] += alpha*x[i]
void axpy(double alpha, const double* x, double* y, std::size_t n);
// p[i] = z[i] + beta*p[i]    (CG direction update)
void zpbp(const double* z, double beta, double* p, std::size_t n);
// out[i] = a[i]*b[i]         (Jacobi preconditioner application)
void hadamard(const double* a, const double* b, double* out, std::size_t n);
// y = A*x for CSR A with row_ptr[rows+1], cols/vals[nnz]
void csr_spmv(const int* row_ptr, const int* cols, const double* vals,
              std::size_t rows, const double* x, double* y);

// Scalar reference implementations, always available.
namespace ref {
double dot(const double* a, const double* b, std::size_t n);
double nrm2(const double* a, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void zpbp(const double* z, double beta, double* p, std::size_t n);
void hadamard(const double* a, const double* b, double* out, std::size_t n);
void csr_spmv(const int* row_ptr, const int* cols, const double* vals,
              std::size_t rows, const double* x, double* y);
}  // namespace ref

}  // namespace surftopt::kernels
