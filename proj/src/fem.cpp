#include "surftopt/fem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "surftopt/error.hpp"
#include "surftopt/kernels.hpp"

namespace surftopt {

void ProblemCoefficients::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(beta1) || !positive(beta2))
        throw ConfigError("diffusion coefficients beta1/beta2 must be finite and > 0");
    if (!positive(gamma1) || !positive(gamma2))
        throw ConfigError("reaction coefficients gamma1/gamma2 must be finite and > 0");
    if (!std::isfinite(f1) || !std::isfinite(f2))
        throw ConfigError("source values f1/f2 must be finite");
    if (!std::isfinite(alpha1) || !std::isfinite(alpha2) || alpha1 < 0.0 || alpha2 < 0.0)
        throw ConfigError("objective weights alpha1/alpha2 must be finite and >= 0");
    if (alpha1 == 0.0 && alpha2 == 0.0)
        throw ConfigError("objective weights alpha1 and alpha2 cannot both be zero");
}

ProblemCoefficients ProblemCoefficients::swapped() const {
    ProblemCoefficients s = *this;
    std::swap(s.beta1, s.beta2);
    std::swap(s.gamma1, s.gamma2);
    std::swap(s.f1, s.f2);
    return s;
}

void SparseSystem::multiply(const double* x, double* y) const {
    kernels::csr_spmv(row_ptr.data(), cols.data(), vals.data(),
                      static_cast<std::size_t>(rows()), x, y);
}

std::vector<double> SparseSystem::diagonal() const {
    std::vector<double> d(rows(), 0.0);
    for (int r = 0; r < rows(); ++r)
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            if (cols[k] == r) d[r] = vals[k];
    return d;
}

double SparseSystem::max_abs_entry() const {
    double m = 0.0;
    for (double v : vals) m = std::max(m, std::abs(v));
    return m;
}

double SparseSystem::max_asymmetry() const {
    double gap = 0.0;
    for (int r = 0; r < rows(); ++r) {
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            const int c = cols[k];
            // Locate A(c, r) by binary search in row c.
            const int* first = cols.data() + row_ptr[c];
            const int* last = cols.data() + row_ptr[c + 1];
            const int* it = std::lower_bound(first, last, r);
            const double transposed =
                (it != last && *it == r) ? vals[it - cols.data()] : 0.0;
            gap = std::max(gap, std::abs(vals[k] - transposed));
        }
    }
    return gap;
}

std::vector<double> solve_cg(const SparseSystem& A, std::span<const double> b,
                             const SolverOptions& opts, CgInfo* info) {
    const int n = A.rows();
    if (static_cast<int>(b.size()) != n)
        throw SolverError("right-hand side size does not match the system", 0, 0.0);
    if (!(opts.tol > 0.0) || opts.tol > 1e-2)
        throw SolverError("solver tolerance must lie in (0, 1e-2]", 0, 0.0);
    const int max_iter = opts.max_iter > 0 ? opts.max_iter : 20 * n;

    std::vector<double> x(n, 0.0);
    const double bnorm = kernels::nrm2(b.data(), n);
    if (bnorm == 0.0) {
        if (info) *info = {0, 0.0};
        return x;
    }

    std::vector<double> inv_diag(n);
    {
        const std::vector<double> d = A.diagonal();
        for (int i = 0; i < n; ++i) {
            if (!(d[i] > 0.0))
                throw SolverError("non-positive diagonal entry at row " + std::to_string(i),
                                  0, 1.0);
            inv_diag[i] = 1.0 / d[i];
        }
    }

    std::vector<double> r(n), z(n), p(n), Ap(n);
    int total_iter = 0;
    double rel = 1.0;

    // Outer restarts re-derive the residual from x; they fire only when
    // the recurrence residual drifts from the true one near convergence.
    for (int attempt = 0; attempt < 3; ++attempt) {
        A.multiply(x.data(), Ap.data());
        for (int i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
        double rnorm = kernels::nrm2(r.data(), n);
        if (rnorm <= opts.tol * bnorm) {
            if (info) *info = {total_iter, rnorm / bnorm};
            return x;
        }
        kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
        std::copy(z.begin(), z.end(), p.begin());
        double rz = kernels::dot(r.data(), z.data(), n);

        while (total_iter < max_iter) {
            A.multiply(p.data(), Ap.data());
            const double pAp = kernels::dot(p.data(), Ap.data(), n);
            if (!(pAp > 0.0))
                throw SolverError("conjugate gradient breakdown: matrix is not positive "
                                  "definite",
                                  total_iter, rnorm / bnorm);
            const double alpha = rz / pAp;
            kernels::axpy(alpha, p.data(), x.data(), n);
            kernels::axpy(-alpha, Ap.data(), r.data(), n);
            ++total_iter;
            rnorm = kernels::nrm2(r.data(), n);
            if (rnorm <= opts.tol * bnorm) break;
            kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
            const double rz_next = kernels::dot(r.data(), z.data(), n);
            kernels::zpbp(z.data(), rz_next / rz, p.data(), n);
            rz = rz_next;
        }
        rel = rnorm / bnorm;
        if (rnorm > opts.tol * bnorm)
            throw SolverError("conjugate gradient did not converge within " +
                              std::to_string(max_iter) + " iterations",
                              total_iter, rel);
    }
    throw SolverError("conjugate gradient stalled: true residual stayed above tolerance",
                      total_iter, rel);
}

namespace {

// CSR sparsity pattern of the P1 system: self plus one-ring couplings,
// columns ascending.
void build_pattern(const SurfaceMesh& mesh, std::vector<int>& row_ptr,
                   std::vector<int>& cols) {
    const int nv = mesh.num_vertices();
    row_ptr.assign(nv + 1, 0);
    cols.clear();
    std::vector<int> ring;
    std::vector<std::vector<int>> per_row(nv);
    for (int v = 0; v < nv; ++v) {
        ring.clear();
        ring.push_back(v);
        for (int t : mesh.incident_triangles(v))
            for (int i = 0; i < 3; ++i) ring.push_back(mesh.triangle(t)[i]);
        std::sort(ring.begin(), ring.end());
        ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
        per_row[v] = ring;
        row_ptr[v + 1] = row_ptr[v] + static_cast<int>(ring.size());
    }
    cols.reserve(row_ptr[nv]);
    for (int v = 0; v < nv; ++v) cols.insert(cols.end(), per_row[v].begin(), per_row[v].end());
}

int csr_index(const std::vector<int>& row_ptr, const std::vector<int>& cols, int r, int c) {
    const int* first = cols.data() + row_ptr[r];
    const int* last = cols.data() + row_ptr[r + 1];
    const int* it = std::lower_bound(first, last, c);
    return static_cast<int>(it - cols.data());
}

}  // namespace

SparseSystem assemble_system(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                             const ProblemCoefficients& c) {
    ensure_bound(mesh, materials, "assemble_system");
    c.validate();

    SparseSystem A;
    A.mesh_id = mesh.id();
    build_pattern(mesh, A.row_ptr, A.cols);
    A.vals.assign(A.cols.size(), 0.0);
    A.rhs.assign(mesh.num_vertices(), 0.0);

    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double at = mesh.area(t);
        const Material m = materials.labels[t];
        const double beta = c.beta(m);
        const double gamma = c.gamma(m);
        const double f = c.source(m);
        for (int i = 0; i < 3; ++i) {
            const Vec3& gi = mesh.basis_gradient(t, i);
            for (int j = 0; j < 3; ++j) {
                const double stiff = beta * at * dot(gi, mesh.basis_gradient(t, j));
                const double mass = gamma * at / 12.0 * (i == j ? 2.0 : 1.0);
                A.vals[csr_index(A.row_ptr, A.cols, tri[i], tri[j])] += stiff + mass;
            }
            A.rhs[tri[i]] += f * at / 3.0;
        }
    }
    return A;
}

void mass_apply(const SurfaceMesh& mesh, const double* x, double* y) {
    std::fill(y, y + mesh.num_vertices(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double w = mesh.area(t) / 12.0;
        const double sum = x[tri[0]] + x[tri[1]] + x[tri[2]];
        for (int i = 0; i < 3; ++i) y[tri[i]] += w * (sum + x[tri[i]]);
    }
}

void unit_stiffness_apply(const SurfaceMesh& mesh, const double* x, double* y) {
    std::fill(y, y + mesh.num_vertices(), 0.0);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        const double at = mesh.area(t);
        const Vec3 grad = mesh.basis_gradient(t, 0) * x[tri[0]] +
                          mesh.basis_gradient(t, 1) * x[tri[1]] +
                          mesh.basis_gradient(t, 2) * x[tri[2]];
        for (int i = 0; i < 3; ++i) y[tri[i]] += at * dot(mesh.basis_gradient(t, i), grad);
    }
}

double unit_stiffness_energy(const SurfaceMesh& mesh, const VertexField& e) {
    ensure_bound(mesh, e, "unit_stiffness_energy");
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Vec3 g = element_gradient(mesh, e, t);
        s += mesh.area(t) * dot(g, g);
    }
    return s;
}

std::vector<double> assemble_adjoint_load(const SurfaceMesh& mesh, const VertexField& u,
                                          const VertexField& u_d,
                                          const ProblemCoefficients& c) {
    ensure_bound(mesh, u, "assemble_adjoint_load");
    ensure_bound(mesh, u_d, "assemble_adjoint_load");
    const int n = mesh.num_vertices();
    std::vector<double> err(n), tmp(n), rhs(n, 0.0);
    for (int i = 0; i < n; ++i) err[i] = u.values[i] - u_d.values[i];
    mass_apply(mesh, err.data(), tmp.data());
    for (int i = 0; i < n; ++i) rhs[i] = -2.0 * c.alpha1 * tmp[i];
    if (c.alpha2 != 0.0) {
        unit_stiffness_apply(mesh, err.data(), tmp.data());
        kernels::axpy(-2.0 * c.alpha2, tmp.data(), rhs.data(), n);
    }
    return rhs;
}

FieldSolution solve_state(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                          const ProblemCoefficients& c, const SolverOptions& opts) {
    const SparseSystem A = assemble_system(mesh, materials, c);
    FieldSolution out{VertexField::zeros(mesh), {}};
    out.field.values = solve_cg(A, A.rhs, opts, &out.cg);
    return out;
}

FieldSolution solve_adjoint(const SurfaceMesh& mesh, const SparseSystem& system,
                            const VertexField& u, const VertexField& u_d,
                            const ProblemCoefficients& c, const SolverOptions& opts) {
    if (system.mesh_id != mesh.id())
        throw MeshError("solve_adjoint: system is not bound to this mesh");
    const std::vector<double> rhs = assemble_adjoint_load(mesh, u, u_d, c);
    FieldSolution out{VertexField::zeros(mesh), {}};
    out.field.values = solve_cg(system, rhs, opts, &out.cg);
    return out;
}

FieldSolution solve_adjoint(const SurfaceMesh& mesh, const MaterialIndicator& materials,
                            const VertexField& u, const VertexField& u_d,
                            const ProblemCoefficients& c, const SolverOptions& opts) {
    const SparseSystem A = assemble_system(mesh, materials, c);
    return solve_adjoint(mesh, A, u, u_d, c, opts);
}

double objective(const SurfaceMesh& mesh, const VertexField& u, const VertexField& u_d,
                 const ProblemCoefficients& c) {
    ensure_bound(mesh, u, "objective");
    ensure_bound(mesh, u_d, "objective");
    VertexField err = VertexField::zeros(mesh);
    for (int i = 0; i < mesh.num_vertices(); ++i)
        err.values[i] = u.values[i] - u_d.values[i];
    double j = c.alpha1 * l2_inner(mesh, err, err);
    if (c.alpha2 != 0.0) j += c.alpha2 * unit_stiffness_energy(mesh, err);
    return j;
}

Vec3 element_gradient(const SurfaceMesh& mesh, const VertexField& f, int t) {
    const auto& tri = mesh.triangle(t);
    return mesh.basis_gradient(t, 0) * f.values[tri[0]] +
           mesh.basis_gradient(t, 1) * f.values[tri[1]] +
           mesh.basis_gradient(t, 2) * f.values[tri[2]];
}

}  // namespace surftopt
