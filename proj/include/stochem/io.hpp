#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "stochem/diagnostics.hpp"
#include "stochem/model.hpp"

namespace stochem {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Binary snapshot: "CNS1", u32 nx ny, f64 lx ly t, then n, c, u_x, u_y as
/// little-endian f64 arrays.
void write_snapshot(const State& state, const std::filesystem::path& path);
State read_snapshot(const std::filesystem::path& path);
std::size_t snapshot_size(int nx, int ny);

/// Shortest round-trip decimal, independent of the locale.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "step,t,mass_n,min_n,max_c,l2_u,h1_c,entropy,energy_residual,clip_count,div_residual";

std::string csv_row(const DiagnosticsRow& row);
void write_csv(const DiagnosticsSeries& series, std::ostream& out);
void write_csv(const DiagnosticsSeries& series, const std::filesystem::path& path);

}  // namespace stochem
