#include "sks/snapshot.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sks {

namespace {
constexpr char kMagic[4] = {'S', 'K', 'S', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::ifstream& in, const std::string& what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("snapshot: truncated while reading " + what);
    return v;
}
}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_snapshot(const std::string& path, const Field& f, double t,
                    std::uint64_t params_digest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("snapshot: cannot open " + path + " for writing");
    out.write(kMagic, 4);
    put(out, static_cast<std::uint32_t>(f.domain.n));
    put(out, f.domain.half_width);
    put(out, t);
    put(out, params_digest);
    out.write(reinterpret_cast<const char*>(f.values.data()),
              static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!out) throw std::runtime_error("snapshot: write failed for " + path);
}

Field read_snapshot(const std::string& path, SnapshotHeader* header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("snapshot: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("snapshot: bad magic in " + path);
    SnapshotHeader h;
    h.n = take<std::uint32_t>(in, "n");
    h.half_width = take<double>(in, "L");
    h.t = take<double>(in, "t");
    h.params_digest = take<std::uint64_t>(in, "digest");
    if (h.n < 16 || (h.n & (h.n - 1)) != 0 || !(h.half_width > 0.0))
        throw std::runtime_error("snapshot: corrupted header in " + path);
    Field f(DomainSpec(h.half_width, static_cast<int>(h.n)));
    in.read(reinterpret_cast<char*>(f.values.data()),
            static_cast<std::streamsize>(f.values.size() * sizeof(double)));
    if (!in) throw std::runtime_error("snapshot: truncated payload in " + path);
    char extra;
    if (in.read(&extra, 1))
        throw std::runtime_error("snapshot: trailing bytes in " + path);
    if (header) *header = h;
    return f;
}

}  // namespace sks
