#include "dmtk/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace dmtk {

namespace {

constexpr char kMagic[4] = {'D', 'N', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian hosts are not supported");

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        if constexpr (sizeof(T) == 4) {
            const std::uint32_t s = __builtin_bswap32(std::bit_cast<std::uint32_t>(v));
            return std::bit_cast<T>(s);
        } else {
            const std::uint64_t s = __builtin_bswap64(std::bit_cast<std::uint64_t>(v));
            return std::bit_cast<T>(s);
        }
    }
    return v;
}

template <typename T>
T from_little(T v) {
    return to_little(v);
}

void read_exact(std::ifstream& in, char* dst, std::size_t count, std::uint64_t offset,
                const char* what) {
    in.read(dst, static_cast<std::streamsize>(count));
    const std::uint64_t got = static_cast<std::uint64_t>(in.gcount());
    if (got != count) {
        throw TensorFileError(std::string("tensor file truncated reading ") + what + ": expected " +
                              std::to_string(count) + " bytes at offset " + std::to_string(offset) +
                              ", got " + std::to_string(got));
    }
}

}  // namespace

void write_tensor(const std::string& path, const DenseTensor& tensor) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw TensorFileError("cannot open '" + path + "' for writing");

    out.write(kMagic, 4);
    const std::uint32_t version = to_little(kVersion);
    out.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint32_t n = to_little(static_cast<std::uint32_t>(tensor.shape().ndim()));
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (std::int64_t d : tensor.shape().dims()) {
        const std::uint64_t ext = to_little(static_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(&ext), 8);
    }

    if constexpr (std::endian::native == std::endian::little) {
        const auto values = tensor.values();
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
    } else {
        for (double v : tensor.values()) {
            const double le = to_little(v);
            out.write(reinterpret_cast<const char*>(&le), 8);
        }
    }
    out.flush();
    if (!out) throw TensorFileError("write to '" + path + "' failed");
}

DenseTensor read_tensor(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw TensorFileError("cannot open '" + path + "' for reading");

    char magic[4];
    read_exact(in, magic, 4, 0, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw TensorFileError("'" + path + "' is not a tensor file: bad magic at offset 0");
    }
    std::uint32_t version = 0;
    read_exact(in, reinterpret_cast<char*>(&version), 4, 4, "version");
    version = from_little(version);
    if (version != kVersion) {
        throw TensorFileError("unsupported tensor file version " + std::to_string(version) +
                              " (expected " + std::to_string(kVersion) + ")");
    }
    std::uint32_t n = 0;
    read_exact(in, reinterpret_cast<char*>(&n), 4, 8, "mode count");
    n = from_little(n);
    if (n < 1 || n > 64) {
        throw TensorFileError("tensor file declares " + std::to_string(n) + " modes");
    }

    std::vector<std::int64_t> dims(n);
    std::uint64_t offset = 12;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint64_t ext = 0;
        read_exact(in, reinterpret_cast<char*>(&ext), 8, offset, "extent");
        ext = from_little(ext);
        if (ext < 1 || ext > static_cast<std::uint64_t>(INT64_MAX)) {
            throw TensorFileError("tensor file declares extent " + std::to_string(ext) +
                                  " for mode " + std::to_string(i));
        }
        dims[i] = static_cast<std::int64_t>(ext);
        offset += 8;
    }

    Shape shape(dims);  // validates and checks for overflow
    std::vector<double> values(static_cast<std::size_t>(shape.total()));
    const std::size_t payload = values.size() * sizeof(double);
    read_exact(in, reinterpret_cast<char*>(values.data()), payload, offset, "payload");
    if constexpr (std::endian::native == std::endian::big) {
        for (double& v : values) v = from_little(v);
    }

    char extra;
    if (in.read(&extra, 1); in.gcount() != 0) {
        throw TensorFileError("tensor file has trailing bytes after offset " +
                              std::to_string(offset + payload));
    }
    return DenseTensor(std::move(shape), std::move(values));
}

}  // namespace dmtk
