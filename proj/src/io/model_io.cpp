#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "cflb/error.hpp"
#include "cflb/io.hpp"

namespace cflb::io {
namespace fs = std::filesystem;
namespace {

constexpr char kMagic[8] = {'C', 'F', 'L', 'B', 'F', 'L', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 64;

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    void u32(std::uint32_t v) {
        for (int k = 0; k < 4; ++k) buf_.push_back(static_cast<unsigned char>(v >> (8 * k)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) {
        for (int k = 0; k < 8; ++k) buf_.push_back(static_cast<unsigned char>(v >> (8 * k)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    std::vector<unsigned char> take() { return std::move(buf_); }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    explicit Reader(const std::vector<unsigned char>& b) : b_(b) {}
    void need(std::size_t n) const {
        if (pos_ + n > b_.size()) throw IoError("decode_model: truncated container");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * k);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * k);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void skip(std::size_t n) {
        need(n);
        pos_ += n;
    }
    [[nodiscard]] std::size_t pos() const { return pos_; }

private:
    const std::vector<unsigned char>& b_;
    std::size_t pos_ = 0;
};

void put_spectrum(Writer& w, const Spectrum2D& s) {
    for (auto z : s.coefficients()) {
        w.f64(z.real());
        w.f64(z.imag());
    }
}

Spectrum2D get_spectrum(Reader& r, Shape shape) {
    std::vector<Complex> c(shape.count());
    for (auto& z : c) {
        const double re = r.f64();
        const double im = r.f64();
        z = Complex(re, im);
    }
    try {
        return Spectrum2D(shape.height, shape.width, std::move(c));
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("decode_model: ") + e.what());
    }
}

}  // namespace

std::vector<unsigned char> encode_model(const FilterModel& m) {
    m.mask.validate();
    if (m.h.shape() != m.mask.inner || m.energies.shape() != m.mask.outer) {
        throw InvalidArgument("encode_model: model fields disagree with its mask");
    }
    Writer w;
    w.bytes(kMagic, sizeof kMagic);
    w.u32(kVersion);
    w.u32(0);  // flags, reserved
    w.i32(m.mask.outer.height);
    w.i32(m.mask.outer.width);
    w.i32(m.mask.inner.height);
    w.i32(m.mask.inner.width);
    w.i32(m.mask.offset.row);
    w.i32(m.mask.offset.col);
    w.f64(m.lambda);
    w.u64(m.energies.count);
    w.f64(m.energies.s_yy);
    for (double v : m.h.samples()) w.f64(v);
    put_spectrum(w, m.energies.s_xx);
    put_spectrum(w, m.energies.s_xy);
    return w.take();
}

FilterModel decode_model(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw IoError("decode_model: not a filter model container");
    }
    Reader r(bytes);
    r.skip(sizeof kMagic);
    const std::uint32_t version = r.u32();
    if (version != kVersion) throw IoError("decode_model: unsupported version " + std::to_string(version));
    r.u32();
    MaskSpec mask;
    mask.outer = {r.i32(), r.i32()};
    mask.inner = {r.i32(), r.i32()};
    mask.offset = {r.i32(), r.i32()};
    try {
        mask.validate();
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("decode_model: ") + e.what());
    }
    const double lambda = r.f64();
    SpectralEnergies e;
    e.count = r.u64();
    e.s_yy = r.f64();
    const std::size_t expected =
        kHeaderBytes + 8 * mask.inner.count() + 2 * 16 * mask.outer.count();
    if (bytes.size() != expected) throw IoError("decode_model: container size does not match its header");
    std::vector<double> h(mask.inner.count());
    for (auto& v : h) v = r.f64();
    e.s_xx = get_spectrum(r, mask.outer);
    e.s_xy = get_spectrum(r, mask.outer);
    Signal2D filter;
    try {
        filter = Signal2D(mask.inner.height, mask.inner.width, std::move(h));
    } catch (const InvalidArgument& ex) {
        throw IoError(std::string("decode_model: ") + ex.what());
    }
    return FilterModel::from_filter(std::move(filter), mask, std::move(e), lambda);
}

void save_model(const fs::path& path, const FilterModel& model) {
    const auto bytes = encode_model(model);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("save_model: cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("save_model: write failed for " + path.string());
}

FilterModel load_model(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_model: cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_model(bytes);
}

}  // namespace cflb::io
