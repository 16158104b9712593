#include "kgz/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace kgz {

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes little-endian");

namespace {

constexpr char kMagic[8] = {'K', 'G', 'Z', 'C', 'K', 'P', 'T', '\0'};

template <class T>
void put(std::vector<unsigned char>& buf, const T& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    buf.insert(buf.end(), p, p + sizeof(T));
}

class Reader {
public:
    Reader(const std::vector<unsigned char>& buf, std::string file) : buf_(buf), file_(std::move(file)) {}

    template <class T>
    T get() {
        if (pos_ + sizeof(T) > buf_.size()) fail("truncated");
        T v;
        std::memcpy(&v, buf_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }

    std::size_t pos() const { return pos_; }
    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("checkpoint " + file_ + ": " + what);
    }

private:
    const std::vector<unsigned char>& buf_;
    std::string file_;
    std::size_t pos_ = 0;
};

std::uint32_t crc(const unsigned char* p, std::size_t n) {
    return static_cast<std::uint32_t>(::crc32(::crc32(0L, Z_NULL, 0), p, static_cast<uInt>(n)));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& file, const SpectralState& s, double h1_reference) {
    std::vector<unsigned char> buf;
    buf.insert(buf.end(), std::begin(kMagic), std::end(kMagic));
    put(buf, kCheckpointVersion);
    put(buf, s.t);
    put(buf, s.alpha);
    put(buf, s.grid().radius());
    put(buf, static_cast<std::uint64_t>(s.grid().intervals()));
    put(buf, h1_reference);
    for (const SpectralField* f : {&s.u, &s.udot, &s.n, &s.ndot}) {
        for (double x : f->a) put(buf, x);
    }
    put(buf, crc(buf.data(), buf.size()));

    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + file.string());
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw std::runtime_error("failed writing checkpoint: " + file.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + file.string());
    const std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
    Reader rd(buf, file.string());

    char magic[8];
    for (char& c : magic) c = rd.get<char>();
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) rd.fail("not a checkpoint file");
    const auto version = rd.get<std::uint32_t>();
    if (version != kCheckpointVersion) rd.fail("unsupported version " + std::to_string(version));
    const double t = rd.get<double>();
    const double alpha = rd.get<double>();
    const double R = rd.get<double>();
    const auto N = rd.get<std::uint64_t>();
    const double h1_reference = rd.get<double>();

    const RadialGrid grid = RadialGrid::make(R, static_cast<std::size_t>(N));
    std::vector<SpectralField> fields;
    for (int f = 0; f < 4; ++f) {
        SpectralField sf{grid, std::vector<double>(grid.size())};
        for (double& x : sf.a) x = rd.get<double>();
        fields.push_back(std::move(sf));
    }
    const std::size_t body = rd.pos();
    const auto stored = rd.get<std::uint32_t>();
    if (rd.pos() != buf.size()) rd.fail("trailing bytes");
    if (stored != crc(buf.data(), body)) rd.fail("checksum mismatch");

    return Checkpoint{SpectralState(t, alpha, std::move(fields[0]), std::move(fields[1]),
                                    std::move(fields[2]), std::move(fields[3])),
                      h1_reference};
}

}  // namespace kgz
