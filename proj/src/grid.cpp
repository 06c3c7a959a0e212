#include "stochem/grid.hpp"

#include <algorithm>
#include <cmath>

namespace stochem {

Grid make_grid(int nx, int ny, double lx, double ly) {
    if (nx < 4 || ny < 4) {
        throw InvalidArgument("make_grid: need at least 4 cells per direction, got " +
                              std::to_string(nx) + "x" + std::to_string(ny));
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw InvalidArgument("make_grid: domain side lengths must be positive and finite");
    }
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.lx = lx;
    g.ly = ly;
    g.dx = lx / nx;
    g.dy = ly / ny;
    return g;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) {
        throw InvalidArgument(std::string(where) + ": fields live on different grids");
    }
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(const Grid& grid, double value)
    : grid_(grid), values_(grid.cells(), value) {}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::operator+=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::operator-=");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

ScalarField& ScalarField::operator*=(double a) {
    for (double& v : values_) v *= a;
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "ScalarField::axpy");
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * other.values_[k];
    return *this;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// VectorField

VectorField::VectorField(const Grid& grid)
    : grid_(grid),
      ux_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, 0.0),
      uy_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), 0.0) {}

VectorField& VectorField::operator+=(const VectorField& other) {
    require_same_grid(grid_, other.grid_, "VectorField::operator+=");
    for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] += other.ux_[k];
    for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] += other.uy_[k];
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
    require_same_grid(grid_, other.grid_, "VectorField::operator-=");
    for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] -= other.ux_[k];
    for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] -= other.uy_[k];
    return *this;
}

VectorField& VectorField::operator*=(double a) {
    for (double& v : ux_) v *= a;
    for (double& v : uy_) v *= a;
    return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& other) {
    require_same_grid(grid_, other.grid_, "VectorField::axpy");
    for (std::size_t k = 0; k < ux_.size(); ++k) ux_[k] += a * other.ux_[k];
    for (std::size_t k = 0; k < uy_.size(); ++k) uy_[k] += a * other.uy_[k];
    return *this;
}

void VectorField::enforce_no_slip() {
    const int nx = grid_.nx;
    const int ny = grid_.ny;
    for (int j = 0; j < ny; ++j) {
        ux(0, j) = 0.0;
        ux(nx, j) = 0.0;
    }
    for (int i = 0; i < nx; ++i) {
        uy(i, 0) = 0.0;
        uy(i, ny) = 0.0;
    }
}

double VectorField::max_boundary_normal() const {
    double m = 0.0;
    for (int j = 0; j < grid_.ny; ++j) {
        m = std::max({m, std::abs(ux(0, j)), std::abs(ux(grid_.nx, j))});
    }
    for (int i = 0; i < grid_.nx; ++i) {
        m = std::max({m, std::abs(uy(i, 0)), std::abs(uy(i, grid_.ny))});
    }
    return m;
}

bool VectorField::all_finite() const {
    auto finite = [](double v) { return std::isfinite(v); };
    return std::all_of(ux_.begin(), ux_.end(), finite) &&
           std::all_of(uy_.begin(), uy_.end(), finite);
}

// ---------------------------------------------------------------------------
// Pairings and norms

double inner_product(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s * a.grid().cell_area();
}

double inner_product(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    double s = 0.0;
    const auto ax = a.ux_values();
    const auto bx = b.ux_values();
    for (std::size_t k = 0; k < ax.size(); ++k) s += ax[k] * bx[k];
    const auto ay = a.uy_values();
    const auto by = b.uy_values();
    for (std::size_t k = 0; k < ay.size(); ++k) s += ay[k] * by[k];
    return s * a.grid().cell_area();
}

namespace {

double scalar_gradient_sq(const ScalarField& f) {
    const Grid& g = f.grid();
    double sx = 0.0;
    double sy = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i + 1 < g.nx; ++i) {
            const double d = f(i + 1, j) - f(i, j);
            sx += d * d;
        }
    }
    for (int j = 0; j + 1 < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const double d = f(i, j + 1) - f(i, j);
            sy += d * d;
        }
    }
    return (sx / (g.dx * g.dx) + sy / (g.dy * g.dy)) * g.cell_area();
}

// Gradient energy of the staggered field with no-slip ghosts; matches the
// summation-by-parts partner of the staggered vector Laplacian.
double vector_gradient_sq(const VectorField& u) {
    const Grid& g = u.grid();
    const int nx = g.nx;
    const int ny = g.ny;
    const double idx2 = 1.0 / (g.dx * g.dx);
    const double idy2 = 1.0 / (g.dy * g.dy);
    double s = 0.0;
    // u_x: x-differences across cells, y-differences across interior rows,
    // half-weighted wall differences against the reflected ghost.
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double d = u.ux(i + 1, j) - u.ux(i, j);
            s += d * d * idx2;
        }
    }
    for (int i = 1; i < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double d = u.ux(i, j + 1) - u.ux(i, j);
            s += d * d * idy2;
        }
        const double lo = 2.0 * u.ux(i, 0);
        const double hi = 2.0 * u.ux(i, ny - 1);
        s += 0.5 * (lo * lo + hi * hi) * idy2;
    }
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j) {
            const double d = u.uy(i, j + 1) - u.uy(i, j);
            s += d * d * idy2;
        }
    }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double d = u.uy(i + 1, j) - u.uy(i, j);
            s += d * d * idx2;
        }
        const double lo = 2.0 * u.uy(0, j);
        const double hi = 2.0 * u.uy(nx - 1, j);
        s += 0.5 * (lo * lo + hi * hi) * idx2;
    }
    return s * g.cell_area();
}

}  // namespace

double norm(const ScalarField& field, NormKind kind) {
    switch (kind) {
        case NormKind::L2:
            return std::sqrt(inner_product(field, field));
        case NormKind::Linf: {
            double m = 0.0;
            for (double v : field.values()) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::H1Semi:
            return std::sqrt(scalar_gradient_sq(field));
    }
    return 0.0;
}

double norm(const VectorField& field, NormKind kind) {
    switch (kind) {
        case NormKind::L2:
            return std::sqrt(inner_product(field, field));
        case NormKind::Linf: {
            double m = 0.0;
            for (double v : field.ux_values()) m = std::max(m, std::abs(v));
            for (double v : field.uy_values()) m = std::max(m, std::abs(v));
            return m;
        }
        case NormKind::H1Semi:
            return std::sqrt(vector_gradient_sq(field));
    }
    return 0.0;
}

ScalarField divergence(const VectorField& v) {
    const Grid& g = v.grid();
    ScalarField d(g);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            d(i, j) = (v.ux(i + 1, j) - v.ux(i, j)) / g.dx + (v.uy(i, j + 1) - v.uy(i, j)) / g.dy;
        }
    }
    return d;
}

}  // namespace stochem
