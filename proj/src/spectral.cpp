#include "stochem/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace stochem::spectral {

namespace {

// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// A forward/inverse pair of 2D real-to-real transforms over one buffer, with
// the separable eigenvalues of -lap_h in the transformed basis.
class SeparableSolver {
public:
    SeparableSolver(int rows, int cols, fftw_r2r_kind fwd_row, fftw_r2r_kind fwd_col,
                    fftw_r2r_kind inv_row, fftw_r2r_kind inv_col, std::vector<double> eig_row,
                    std::vector<double> eig_col, double normalization)
        : rows_(rows),
          cols_(cols),
          eig_row_(std::move(eig_row)),
          eig_col_(std::move(eig_col)),
          normalization_(normalization) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        buffer_ = fftw_alloc_real(static_cast<std::size_t>(rows) * cols);
        forward_ = fftw_plan_r2r_2d(rows, cols, buffer_, buffer_, fwd_row, fwd_col, FFTW_ESTIMATE);
        inverse_ = fftw_plan_r2r_2d(rows, cols, buffer_, buffer_, inv_row, inv_col, FFTW_ESTIMATE);
    }
    SeparableSolver(const SeparableSolver&) = delete;
    SeparableSolver& operator=(const SeparableSolver&) = delete;
    ~SeparableSolver() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(inverse_);
        fftw_free(buffer_);
    }

    double* buffer() { return buffer_; }

    // Divides each transformed coefficient by (alpha + beta * eigenvalue);
    // a zero denominator pins that coefficient to zero.
    void solve_in_place(double alpha, double beta) {
        fftw_execute(forward_);
        for (int r = 0; r < rows_; ++r) {
            for (int c = 0; c < cols_; ++c) {
                const double denom = alpha + beta * (eig_row_[r] + eig_col_[c]);
                double& v = buffer_[static_cast<std::size_t>(r) * cols_ + c];
                v = denom == 0.0 ? 0.0 : v / (denom * normalization_);
            }
        }
        fftw_execute(inverse_);
    }

private:
    int rows_;
    int cols_;
    std::vector<double> eig_row_;
    std::vector<double> eig_col_;
    double normalization_;
    double* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan inverse_ = nullptr;
};

// Cell-centred Neumann (DCT-II basis).
std::vector<double> neumann_eigs(int n, double h) {
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k) e[k] = neumann_eigenvalue(k, n, h);
    return e;
}

// Cell-centred values with Dirichlet walls on the faces (DST-II basis).
std::vector<double> dirichlet_face_eigs(int n, double h) {
    std::vector<double> e(n);
    for (int k = 0; k < n; ++k) {
        e[k] = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * (k + 1) / n));
    }
    return e;
}

// Node-centred interior values with Dirichlet end nodes (DST-I basis), n-1 unknowns.
std::vector<double> dirichlet_node_eigs(int n, double h) {
    std::vector<double> e(n - 1);
    for (int k = 0; k < n - 1; ++k) {
        e[k] = 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * (k + 1) / n));
    }
    return e;
}

struct GridSolvers {
    explicit GridSolvers(const Grid& g)
        : scalar(g.ny, g.nx, FFTW_REDFT10, FFTW_REDFT10, FFTW_REDFT01, FFTW_REDFT01,
                 neumann_eigs(g.ny, g.dy), neumann_eigs(g.nx, g.dx), 4.0 * g.nx * g.ny),
          ux(g.ny, g.nx - 1, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01, FFTW_RODFT00,
             dirichlet_face_eigs(g.ny, g.dy), dirichlet_node_eigs(g.nx, g.dx),
             4.0 * g.ny * g.nx),
          uy(g.ny - 1, g.nx, FFTW_RODFT00, FFTW_RODFT10, FFTW_RODFT00, FFTW_RODFT01,
             dirichlet_node_eigs(g.ny, g.dy), dirichlet_face_eigs(g.nx, g.dx),
             4.0 * g.ny * g.nx) {}

    SeparableSolver scalar;
    SeparableSolver ux;
    SeparableSolver uy;
};

GridSolvers& solvers_for(const Grid& g) {
    using Key = std::tuple<int, int, double, double>;
    thread_local std::map<Key, std::unique_ptr<GridSolvers>> cache;
    auto key = Key{g.nx, g.ny, g.dx, g.dy};
    auto it = cache.find(key);
    if (it == cache.end()) {
        it = cache.emplace(key, std::make_unique<GridSolvers>(g)).first;
    }
    return *it->second;
}

ScalarField solve_scalar(const ScalarField& rhs, double alpha, double beta) {
    const Grid& g = rhs.grid();
    auto& s = solvers_for(g).scalar;
    double* buf = s.buffer();
    const auto in = rhs.values();
    std::copy(in.begin(), in.end(), buf);
    s.solve_in_place(alpha, beta);
    ScalarField out(g);
    auto o = out.values();
    std::copy(buf, buf + o.size(), o.begin());
    return out;
}

}  // namespace

double neumann_eigenvalue(int k, int n, double h) {
    return 2.0 / (h * h) * (1.0 - std::cos(std::numbers::pi * k / n));
}

ScalarField poisson_neumann(const ScalarField& rhs) {
    // lap_h p = rhs  <=>  (0 - 1 * lap_h) p = -rhs
    ScalarField neg = rhs;
    neg *= -1.0;
    return solve_scalar(neg, 0.0, 1.0);
}

ScalarField helmholtz_neumann(const ScalarField& rhs, double beta) {
    if (beta < 0.0) throw InvalidArgument("helmholtz_neumann: beta must be non-negative");
    if (beta == 0.0) return rhs;
    return solve_scalar(rhs, 1.0, beta);
}

VectorField helmholtz_velocity(const VectorField& rhs, double beta) {
    if (beta < 0.0) throw InvalidArgument("helmholtz_velocity: beta must be non-negative");
    const Grid& g = rhs.grid();
    VectorField out(g);
    if (beta == 0.0) {
        out = rhs;
        out.enforce_no_slip();
        return out;
    }
    auto& solvers = solvers_for(g);
    {
        double* buf = solvers.ux.buffer();
        const int m = g.nx - 1;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) buf[static_cast<std::size_t>(j) * m + (i - 1)] = rhs.ux(i, j);
        solvers.ux.solve_in_place(1.0, beta);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i) out.ux(i, j) = buf[static_cast<std::size_t>(j) * m + (i - 1)];
    }
    {
        double* buf = solvers.uy.buffer();
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) buf[static_cast<std::size_t>(j - 1) * g.nx + i] = rhs.uy(i, j);
        solvers.uy.solve_in_place(1.0, beta);
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) out.uy(i, j) = buf[static_cast<std::size_t>(j - 1) * g.nx + i];
    }
    return out;
}

}  // namespace stochem::spectral
