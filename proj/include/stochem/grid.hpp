#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stochem {

/// Raised when a precondition on shapes, sizes or parameters is violated.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class ScalarBoundary { HomogeneousNeumann };
enum class VelocityBoundary { NoSlip };

/// Uniform rectangular grid on [0, lx] x [0, ly].
///
/// Scalars live at cell centres (nx * ny values, row-major with x fastest).
/// Velocities use the MAC layout: u_x on the nx+1 vertical faces of every
/// row, u_y on the ny+1 horizontal faces of every column.
struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 0.0;
    double ly = 0.0;
    double dx = 0.0;
    double dy = 0.0;
    ScalarBoundary bc_scalar = ScalarBoundary::HomogeneousNeumann;
    VelocityBoundary bc_velocity = VelocityBoundary::NoSlip;

    [[nodiscard]] std::size_t cells() const { return static_cast<std::size_t>(nx) * ny; }
    [[nodiscard]] double cell_area() const { return dx * dy; }
    [[nodiscard]] double area() const { return lx * ly; }
    [[nodiscard]] double xc(int i) const { return (i + 0.5) * dx; }
    [[nodiscard]] double yc(int j) const { return (j + 0.5) * dy; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Builds a grid; requires nx, ny >= 4 and positive side lengths.
Grid make_grid(int nx, int ny, double lx, double ly);

/// Cell-centred scalar field.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0);

    [[nodiscard]] const Grid& grid() const { return grid_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    double& operator()(int i, int j) { return values_[index(i, j)]; }
    double operator()(int i, int j) const { return values_[index(i, j)]; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }

    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    [[nodiscard]] std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j) * grid_.nx + i;
    }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double a);
    /// this += a * other
    ScalarField& axpy(double a, const ScalarField& other);

    [[nodiscard]] bool all_finite() const;

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid grid_{};
    std::vector<double> values_;
};

/// Staggered (MAC) velocity-like field.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const Grid& grid);

    [[nodiscard]] const Grid& grid() const { return grid_; }

    /// u_x at vertical face i in [0, nx], row j in [0, ny).
    double& ux(int i, int j) { return ux_[ux_index(i, j)]; }
    double ux(int i, int j) const { return ux_[ux_index(i, j)]; }
    /// u_y at column i in [0, nx), horizontal face j in [0, ny].
    double& uy(int i, int j) { return uy_[uy_index(i, j)]; }
    double uy(int i, int j) const { return uy_[uy_index(i, j)]; }

    [[nodiscard]] std::span<double> ux_values() { return ux_; }
    [[nodiscard]] std::span<const double> ux_values() const { return ux_; }
    [[nodiscard]] std::span<double> uy_values() { return uy_; }
    [[nodiscard]] std::span<const double> uy_values() const { return uy_; }

    [[nodiscard]] std::size_t ux_index(int i, int j) const {
        return static_cast<std::size_t>(j) * (grid_.nx + 1) + i;
    }
    [[nodiscard]] std::size_t uy_index(int i, int j) const {
        return static_cast<std::size_t>(j) * grid_.nx + i;
    }

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double a);
    VectorField& axpy(double a, const VectorField& other);

    /// Zeroes the boundary-normal faces (no-penetration part of no-slip).
    void enforce_no_slip();
    [[nodiscard]] double max_boundary_normal() const;
    [[nodiscard]] bool all_finite() const;

    friend bool operator==(const VectorField&, const VectorField&) = default;

private:
    Grid grid_{};
    std::vector<double> ux_;
    std::vector<double> uy_;
};

enum class NormKind { L2, Linf, H1Semi };

/// Discrete L2 pairing: sum a_i b_i dx dy.
double inner_product(const ScalarField& a, const ScalarField& b);
/// Discrete L2 pairing of staggered fields, face-weighted by dx dy.
double inner_product(const VectorField& a, const VectorField& b);

double norm(const ScalarField& field, NormKind kind);
double norm(const VectorField& field, NormKind kind);

/// Cell-centred discrete divergence of a staggered field.
ScalarField divergence(const VectorField& v);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace stochem
