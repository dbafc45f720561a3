#pragma once

// Field files.
//
// Binary layout (little-endian):
//   u64 magic "ORLFLD01"; u64 dim; u64 extents[dim]; f64 spacing;
//   u64 components; f64 origin[dim]; u64 frames; f64 tau;
//   f64 payload[frames][nodes][components]
// A single elliptic field is stored with frames = 1 and tau = 0.
//
// CSV: header "frame,t,x0[,x1[,x2]],u0[,u1...]", one row per node and
// frame. Meant for small grids; the grid is recovered from the coordinates.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "orlicz/config.hpp"
#include "orlicz/errors.hpp"
#include "orlicz/fields.hpp"

namespace orlicz {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

/// One or more frames on a shared grid.
struct FieldFile {
    std::vector<VectorField> frames;
    double tau = 0.0;

    [[nodiscard]] bool is_time_series() const { return frames.size() > 1; }
    [[nodiscard]] SpaceTimeField as_space_time() const { return SpaceTimeField(tau, frames); }
};

/// Writes `content` to `path` via a sibling temp file and rename.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

namespace detail {

inline constexpr char kFieldMagic[8] = {'O', 'R', 'L', 'F', 'L', 'D', '0', '1'};

template <typename T>
void put(std::string& buf, T v) {
    char raw[sizeof(T)];
    std::memcpy(raw, &v, sizeof(T));
    buf.append(raw, sizeof(T));
}

class Reader {
public:
    explicit Reader(std::string data) : data_(std::move(data)) {}

    template <typename T>
    T get() {
        if (pos_ + sizeof(T) > data_.size()) throw ConfigError("field file is truncated");
        T v;
        std::memcpy(&v, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    [[nodiscard]] bool done() const { return pos_ == data_.size(); }

private:
    std::string data_;
    std::size_t pos_ = 0;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

inline std::string encode_binary(const FieldFile& file) {
    if (file.frames.empty()) throw DomainError("nothing to write");
    const UniformGrid& g = file.frames.front().grid();
    const int m = file.frames.front().components();
    std::string buf(detail::kFieldMagic, sizeof(detail::kFieldMagic));
    detail::put<std::uint64_t>(buf, static_cast<std::uint64_t>(g.dim()));
    for (int a = 0; a < g.dim(); ++a) detail::put<std::uint64_t>(buf, static_cast<std::uint64_t>(g.extent(a)));
    detail::put<double>(buf, g.spacing());
    detail::put<std::uint64_t>(buf, static_cast<std::uint64_t>(m));
    for (int a = 0; a < g.dim(); ++a) detail::put<double>(buf, g.origin()[a]);
    detail::put<std::uint64_t>(buf, file.frames.size());
    detail::put<double>(buf, file.tau);
    for (const auto& f : file.frames) {
        if (!(f.grid() == g) || f.components() != m) throw DomainError("frames must share grid and components");
        for (double v : f.values()) detail::put<double>(buf, v);
    }
    return buf;
}

inline FieldFile decode_binary(std::string data) {
    if (data.size() < sizeof(detail::kFieldMagic) ||
        std::memcmp(data.data(), detail::kFieldMagic, sizeof(detail::kFieldMagic)) != 0) {
        throw ConfigError("not a field file (bad magic)");
    }
    detail::Reader r(data.substr(sizeof(detail::kFieldMagic)));
    const auto dim = r.get<std::uint64_t>();
    if (dim < 1 || dim > 3) throw ConfigError("field file has invalid dimension");
    Index ext{1, 1, 1};
    for (std::uint64_t a = 0; a < dim; ++a) {
        const auto e = r.get<std::uint64_t>();
        if (e < 3 || e > (1u << 20)) throw ConfigError("field file has invalid extents");
        ext[a] = static_cast<int>(e);
    }
    const double h = r.get<double>();
    const auto m = r.get<std::uint64_t>();
    if (m < 1 || m > 64) throw ConfigError("field file has invalid component count");
    Point origin{};
    for (std::uint64_t a = 0; a < dim; ++a) origin[a] = r.get<double>();
    const auto frames = r.get<std::uint64_t>();
    const double tau = r.get<double>();
    if (frames < 1 || frames > (1u << 20)) throw ConfigError("field file has invalid frame count");
    const UniformGrid g(static_cast<int>(dim), ext, h, origin);
    FieldFile out;
    out.tau = tau;
    for (std::uint64_t k = 0; k < frames; ++k) {
        std::vector<double> values(g.cells() * m);
        for (double& v : values) v = r.get<double>();
        out.frames.emplace_back(g, static_cast<int>(m), std::move(values));
    }
    if (!r.done()) throw ConfigError("field file has trailing bytes");
    return out;
}

inline std::string encode_csv(const FieldFile& file) {
    if (file.frames.empty()) throw DomainError("nothing to write");
    const UniformGrid& g = file.frames.front().grid();
    const int m = file.frames.front().components();
    std::string out = "frame,t";
    for (int a = 0; a < g.dim(); ++a) out += ",x" + std::to_string(a);
    for (int k = 0; k < m; ++k) out += ",u" + std::to_string(k);
    out += '\n';
    for (std::size_t f = 0; f < file.frames.size(); ++f) {
        const VectorField& u = file.frames[f];
        for (std::size_t c = 0; c < g.cells(); ++c) {
            out += std::to_string(f) + ',' + detail::format_double(file.tau * static_cast<double>(f));
            const Point x = g.position(c);
            for (int a = 0; a < g.dim(); ++a) out += ',' + detail::format_double(x[a]);
            for (int k = 0; k < m; ++k) out += ',' + detail::format_double(u(c, k));
            out += '\n';
        }
    }
    return out;
}

inline FieldFile decode_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV field file");
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string cell;
        while (std::getline(hs, cell, ',')) header.push_back(trim(cell));
    }
    int dim = 0, m = 0;
    for (const auto& h : header) {
        if (!h.empty() && h[0] == 'x') ++dim;
        if (!h.empty() && h[0] == 'u') ++m;
    }
    if (header.size() < 4 || header[0] != "frame" || header[1] != "t" || dim < 1 || dim > 3 || m < 1 ||
        static_cast<int>(header.size()) != 2 + dim + m) {
        throw ConfigError("CSV field header must be frame,t,x0..,u0..");
    }
    struct Row {
        std::size_t frame;
        double t;
        Point x;
        std::vector<double> u;
    };
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("bad number in CSV field file: " + cell);
            }
        }
        if (static_cast<int>(vals.size()) != 2 + dim + m) throw ConfigError("CSV row has the wrong column count");
        Row r{static_cast<std::size_t>(vals[0]), vals[1], {}, {}};
        for (int a = 0; a < dim; ++a) r.x[a] = vals[2 + a];
        r.u.assign(vals.begin() + 2 + dim, vals.end());
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw ConfigError("CSV field file has no rows");
    std::size_t frames = 0;
    for (const auto& r : rows) frames = std::max(frames, r.frame + 1);
    // Recover the grid from the coordinates of frame 0.
    Point lo{}, hi{};
    std::array<std::map<double, int>, 3> coords;
    for (const auto& r : rows) {
        if (r.frame != 0) continue;
        for (int a = 0; a < dim; ++a) coords[a][r.x[a]] = 0;
    }
    Index ext{1, 1, 1};
    double h = 0.0;
    for (int a = 0; a < dim; ++a) {
        ext[a] = static_cast<int>(coords[a].size());
        if (ext[a] < 3) throw ConfigError("CSV grid needs at least 3 nodes per axis");
        lo[a] = coords[a].begin()->first;
        hi[a] = coords[a].rbegin()->first;
        const double ha = (hi[a] - lo[a]) / (ext[a] - 1);
        if (a == 0) h = ha;
        if (std::abs(ha - h) > 1e-9 * h) throw ConfigError("CSV grid spacing differs between axes");
    }
    const UniformGrid g(dim, ext, h, lo);
    if (rows.size() != frames * g.cells()) throw ConfigError("CSV field file does not cover the grid");
    FieldFile out;
    out.frames.assign(frames, VectorField(g, m));
    double t1 = 0.0;
    for (const auto& r : rows) {
        Index i{0, 0, 0};
        for (int a = 0; a < dim; ++a) i[a] = static_cast<int>(std::lround((r.x[a] - lo[a]) / h));
        const std::size_t c = g.flat(i);
        for (int k = 0; k < m; ++k) out.frames[r.frame](c, k) = r.u[k];
        if (r.frame == 1) t1 = r.t;
    }
    out.tau = frames > 1 ? t1 : 0.0;
    return out;
}

/// Reads a binary or CSV field file (CSV by ".csv" extension).
inline FieldFile read_field_file(const std::filesystem::path& path) {
    std::string data = detail::slurp(path);
    if (path.extension() == ".csv") return decode_csv(data);
    return decode_binary(std::move(data));
}

inline void write_field_file(const std::filesystem::path& path, const FieldFile& file) {
    write_atomic(path, path.extension() == ".csv" ? encode_csv(file) : encode_binary(file));
}

}  // namespace orlicz
