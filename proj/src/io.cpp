#include "stochem/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>
#include <vector>

namespace stochem {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'N', 'S', '1'};

template <class T>
void put_le(std::vector<char>& buf, T value) {
    static_assert(sizeof(T) == 4 || sizeof(T) == 8);
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    const U bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(T); ++b) buf.push_back(static_cast<char>((bits >> (8 * b)) & 0xffu));
}

class Reader {
public:
    explicit Reader(const std::vector<char>& data) : data_(data) {}

    template <class T>
    T get() {
        using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
        if (pos_ + sizeof(T) > data_.size()) throw IoError("snapshot: truncated file");
        U bits = 0;
        for (std::size_t b = 0; b < sizeof(T); ++b)
            bits |= static_cast<U>(static_cast<unsigned char>(data_[pos_ + b])) << (8 * b);
        pos_ += sizeof(T);
        return std::bit_cast<T>(bits);
    }

private:
    const std::vector<char>& data_;
    std::size_t pos_ = 4;
};

}  // namespace

std::size_t snapshot_size(int nx, int ny) {
    const auto cells = static_cast<std::size_t>(nx) * ny;
    const std::size_t values = 2 * cells + static_cast<std::size_t>(nx + 1) * ny + static_cast<std::size_t>(nx) * (ny + 1);
    return 4 + 8 + 24 + 8 * values;
}

void write_snapshot(const State& s, const std::filesystem::path& path) {
    const Grid& g = s.grid();
    std::vector<char> buf(kMagic.begin(), kMagic.end());
    buf.reserve(snapshot_size(g.nx, g.ny));
    put_le(buf, static_cast<std::uint32_t>(g.nx));
    put_le(buf, static_cast<std::uint32_t>(g.ny));
    put_le(buf, g.lx);
    put_le(buf, g.ly);
    put_le(buf, s.t);
    for (double v : s.n.values()) put_le(buf, v);
    for (double v : s.c.values()) put_le(buf, v);
    for (double v : s.u.ux_values()) put_le(buf, v);
    for (double v : s.u.uy_values()) put_le(buf, v);

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("snapshot: cannot open " + path.string() + " for writing");
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("snapshot: write failed for " + path.string());
}

State read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("snapshot: cannot open " + path.string());
    const std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 4 || !std::equal(kMagic.begin(), kMagic.end(), data.begin()))
        throw IoError("snapshot: bad magic in " + path.string());
    Reader r(data);
    const auto nx = r.get<std::uint32_t>();
    const auto ny = r.get<std::uint32_t>();
    const double lx = r.get<double>();
    const double ly = r.get<double>();
    const double t = r.get<double>();
    if (nx > 1u << 20 || ny > 1u << 20) throw IoError("snapshot: implausible grid size");
    if (data.size() != snapshot_size(static_cast<int>(nx), static_cast<int>(ny)))
        throw IoError("snapshot: size " + std::to_string(data.size()) + " does not match a " +
                      std::to_string(nx) + "x" + std::to_string(ny) + " grid");
    const Grid g = make_grid(static_cast<int>(nx), static_cast<int>(ny), lx, ly);
    State s{VectorField(g), ScalarField(g), ScalarField(g), t};
    for (double& v : s.n.values()) v = r.get<double>();
    for (double& v : s.c.values()) v = r.get<double>();
    for (double& v : s.u.ux_values()) v = r.get<double>();
    for (double& v : s.u.uy_values()) v = r.get<double>();
    return s;
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string csv_row(const DiagnosticsRow& r) {
    std::string line = std::to_string(r.step);
    for (double v : {r.t, r.mass_n, r.min_n, r.max_c, r.l2_u, r.h1_c, r.entropy, r.energy_residual}) {
        line += ',';
        line += format_double(v);
    }
    line += ',';
    line += std::to_string(r.clip_count);
    line += ',';
    line += format_double(r.div_residual);
    return line;
}

void write_csv(const DiagnosticsSeries& series, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const auto& row : series) out << csv_row(row) << '\n';
}

void write_csv(const DiagnosticsSeries& series, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("csv: cannot open " + path.string() + " for writing");
    write_csv(series, out);
    if (!out) throw IoError("csv: write failed for " + path.string());
}

}  // namespace stochem
