#include "roughflow/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace roughflow {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'R', 'F', 'L', 'O', 'W', 'B', 'I', 'N'};

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("container: truncated header");
    return v;
}

}  // namespace

std::size_t FieldContainer::node_count() const {
    std::size_t n = 1;
    for (std::uint32_t a = 0; a < dim; ++a) n *= points_per_axis;
    return n;
}

void write_container(const std::filesystem::path& path, const FieldContainer& c) {
    if (c.payload.size() != c.times.size() * c.node_count() * c.components)
        throw std::invalid_argument("container: payload size does not match header");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("container: cannot open " + path.string());
    os.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(os, kContainerVersion);
    put<std::uint32_t>(os, c.dim);
    put<std::uint32_t>(os, c.points_per_axis);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(c.kind));
    put<std::uint32_t>(os, c.components);
    put<std::uint64_t>(os, c.times.size());
    os.write(reinterpret_cast<const char*>(c.times.data()), static_cast<std::streamsize>(c.times.size() * 8));
    os.write(reinterpret_cast<const char*>(c.payload.data()), static_cast<std::streamsize>(c.payload.size() * 8));
    if (!os) throw std::runtime_error("container: write failed for " + path.string());
}

FieldContainer read_container(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("container: cannot open " + path.string());
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("container: bad magic");
    if (get<std::uint32_t>(is) != kContainerVersion) throw std::runtime_error("container: unsupported version");
    FieldContainer c;
    c.dim = get<std::uint32_t>(is);
    c.points_per_axis = get<std::uint32_t>(is);
    c.kind = static_cast<ValueKind>(get<std::uint32_t>(is));
    c.components = get<std::uint32_t>(is);
    const auto s = get<std::uint64_t>(is);
    c.times.resize(s);
    is.read(reinterpret_cast<char*>(c.times.data()), static_cast<std::streamsize>(s * 8));
    c.payload.resize(s * c.node_count() * c.components);
    is.read(reinterpret_cast<char*>(c.payload.data()), static_cast<std::streamsize>(c.payload.size() * 8));
    if (!is) throw std::runtime_error("container: truncated payload");
    return c;
}

FieldContainer pack_snapshots(const std::vector<ScalarField>& snapshots, const std::vector<double>& times,
                              ValueKind kind) {
    if (snapshots.empty() || snapshots.size() != times.size())
        throw std::invalid_argument("pack_snapshots: need one time per snapshot");
    if (kind == ValueKind::vector) throw std::invalid_argument("pack_snapshots: scalar kinds only");
    const auto& g = snapshots.front().grid();
    FieldContainer c;
    c.dim = static_cast<std::uint32_t>(g.dim());
    c.points_per_axis = static_cast<std::uint32_t>(g.points_per_axis());
    c.kind = kind;
    c.components = kind == ValueKind::real ? 1 : 2;
    c.times = times;
    c.payload.reserve(snapshots.size() * g.node_count() * c.components);
    for (const auto& s : snapshots) {
        if (!(s.grid() == g)) throw std::invalid_argument("pack_snapshots: grid mismatch");
        for (const auto& z : s.values()) {
            c.payload.push_back(z.real());
            if (kind == ValueKind::complex) c.payload.push_back(z.imag());
        }
    }
    return c;
}

std::vector<ScalarField> unpack_snapshots(const FieldContainer& c) {
    if (c.kind == ValueKind::vector) throw std::invalid_argument("unpack_snapshots: scalar kinds only");
    const PeriodicGrid g(static_cast<int>(c.dim), static_cast<int>(c.points_per_axis));
    std::vector<ScalarField> out;
    std::size_t k = 0;
    for (std::size_t s = 0; s < c.times.size(); ++s) {
        ScalarField f(g);
        for (std::size_t i = 0; i < g.node_count(); ++i) {
            const double re = c.payload[k++];
            const double im = c.kind == ValueKind::complex ? c.payload[k++] : 0.0;
            f[i] = Complex(re, im);
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& f) {
    const auto& g = f.grid();
    std::vector<std::string> header = g.dim() == 1 ? std::vector<std::string>{"x", "re", "im"}
                                                   : std::vector<std::string>{"x", "y", "re", "im"};
    std::vector<std::vector<double>> rows;
    rows.reserve(g.node_count());
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto x = g.coordinate(i);
        if (g.dim() == 1)
            rows.push_back({x[0], f[i].real(), f[i].imag()});
        else
            rows.push_back({x[0], x[1], f[i].real(), f[i].imag()});
    }
    write_csv(path, header, rows);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << format_double(r[i]);
        os << '\n';
    }
}

}  // namespace roughflow
