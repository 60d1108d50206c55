#include "fracond/gridio.hpp"

#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace fracond {

void write_csv(const GridFunction& u, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_csv: cannot open " + path.string());
    out << std::setprecision(17);
    out << (u.spec.dim == 1 ? "index,x,value\n" : "index,x,y,value\n");
    for (long i = 0; i < u.size(); ++i) {
        auto x = u.spec.node(i);
        out << i << ',' << x[0];
        if (u.spec.dim == 2) out << ',' << x[1];
        out << ',' << u[i] << '\n';
    }
    if (!out) throw IoError("write_csv: write failed for " + path.string());
}

GridFunction read_csv(const std::filesystem::path& path, const GridSpec& expected) {
    std::ifstream in(path);
    if (!in) throw IoError("read_csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError("read_csv: empty file " + path.string());
    GridFunction u(expected);
    long count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        long idx;
        double x, y = 0.0, v;
        if (expected.dim == 1) {
            if (!(ss >> idx >> x >> v))
                throw IoError("read_csv: malformed row in " + path.string());
        } else {
            if (!(ss >> idx >> x >> y >> v))
                throw IoError("read_csv: malformed row in " + path.string());
        }
        if (idx < 0 || idx >= expected.node_count())
            throw IoError("read_csv: node index out of range in " + path.string());
        u[idx] = v;
        ++count;
    }
    if (count != expected.node_count())
        throw IoError("read_csv: expected " + std::to_string(expected.node_count()) +
                      " rows, got " + std::to_string(count));
    return u;
}

namespace {
constexpr char kMagic[4] = {'F', 'C', 'G', 'F'};
}

void write_binary(const GridFunction& u, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_binary: cannot open " + path.string());
    out.write(kMagic, 4);
    std::int32_t dim = u.spec.dim, n = u.spec.nodes_per_axis;
    double L = u.spec.half_width;
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(&L), sizeof L);
    out.write(reinterpret_cast<const char*>(u.values.data()),
              static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!out) throw IoError("write_binary: write failed for " + path.string());
}

GridFunction read_binary(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_binary: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw IoError("read_binary: bad magic in " + path.string());
    std::int32_t dim, n;
    double L;
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    in.read(reinterpret_cast<char*>(&n), sizeof n);
    in.read(reinterpret_cast<char*>(&L), sizeof L);
    if (!in) throw IoError("read_binary: truncated header in " + path.string());
    GridFunction u(build_grid(dim, L, n));
    in.read(reinterpret_cast<char*>(u.values.data()),
            static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!in) throw IoError("read_binary: truncated payload in " + path.string());
    return u;
}

namespace {
std::uint64_t fnv1a(const unsigned char* p, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}
}  // namespace

std::uint64_t content_hash(const std::vector<double>& values) {
    return fnv1a(reinterpret_cast<const unsigned char*>(values.data()),
                 values.size() * sizeof(double));
}

std::uint64_t content_hash(const std::vector<long>& values) {
    return fnv1a(reinterpret_cast<const unsigned char*>(values.data()),
                 values.size() * sizeof(long));
}

}  // namespace fracond
