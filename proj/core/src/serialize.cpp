#include "ttsvd/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "ttsvd/errors.hpp"

namespace ttsvd {

namespace {

constexpr std::array<char, 4> kMagic{'T', 'T', 'S', 'V'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint8_t kScalarBytes = 8;
// Refuse headers that would make us allocate absurd amounts of memory.
constexpr std::uint64_t kMaxCores = 1u << 16;
constexpr std::uint64_t kMaxCoreEntries = std::uint64_t{1} << 32;

enum class Kind : std::uint8_t { vector = 1, matrix = 2, block = 3 };

void put_bytes(std::ostream& out, std::uint64_t v, int n) {
    char buf[8];
    for (int k = 0; k < n; ++k) buf[k] = static_cast<char>((v >> (8 * k)) & 0xffu);
    out.write(buf, n);
}

std::uint64_t get_bytes(std::istream& in, int n) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), n);
    if (in.gcount() != n) throw FormatError("TT container truncated");
    std::uint64_t v = 0;
    for (int k = 0; k < n; ++k) v |= static_cast<std::uint64_t>(buf[k]) << (8 * k);
    return v;
}

void put_u64(std::ostream& out, std::uint64_t v) { put_bytes(out, v, 8); }
std::uint64_t get_u64(std::istream& in) { return get_bytes(in, 8); }

void put_core(std::ostream& out, const DenseTensor& c) {
    for (double x : c.values()) put_u64(out, std::bit_cast<std::uint64_t>(x));
}

DenseTensor get_core(std::istream& in, std::vector<Index> shape) {
    std::uint64_t n = 1;
    for (Index e : shape) {
        n *= static_cast<std::uint64_t>(e);
        if (n > kMaxCoreEntries) throw FormatError("TT container core too large");
    }
    std::vector<double> data(n);
    for (double& x : data) x = std::bit_cast<double>(get_u64(in));
    return DenseTensor(std::move(shape), std::move(data));
}

void put_header(std::ostream& out, Kind kind, std::uint64_t n, std::uint64_t k, std::uint64_t block) {
    out.write(kMagic.data(), 4);
    put_bytes(out, kVersion, 4);
    put_bytes(out, static_cast<std::uint8_t>(kind), 1);
    put_bytes(out, kScalarBytes, 1);
    put_bytes(out, 0, 2);
    put_u64(out, n);
    put_u64(out, k);
    put_u64(out, block);
}

void put_tags(std::ostream& out, const std::vector<Orth>& tags) {
    for (Orth t : tags) put_bytes(out, static_cast<std::uint8_t>(t), 1);
}

Orth get_tag(std::istream& in) {
    const auto t = get_bytes(in, 1);
    if (t > 2) throw FormatError("TT container has an invalid orthogonality tag");
    return static_cast<Orth>(t);
}

Index to_index(std::uint64_t v) {
    if (v == 0 || v > (std::uint64_t{1} << 40)) throw FormatError("TT container has an invalid extent");
    return static_cast<Index>(v);
}

}  // namespace

void write_tt(std::ostream& out, const TTValue& value) {
    if (const auto* x = std::get_if<VectorTT>(&value)) {
        put_header(out, Kind::vector, static_cast<std::uint64_t>(x->length()), 0, 0);
        for (Index m : x->mode_sizes()) put_u64(out, static_cast<std::uint64_t>(m));
        for (Index r : x->ranks()) put_u64(out, static_cast<std::uint64_t>(r));
        put_tags(out, x->tags());
        for (const DenseTensor& c : x->cores()) put_core(out, c);
    } else if (const auto* a = std::get_if<MatrixTT>(&value)) {
        put_header(out, Kind::matrix, static_cast<std::uint64_t>(a->length()), 0, 0);
        for (Index m : a->row_sizes()) put_u64(out, static_cast<std::uint64_t>(m));
        for (Index m : a->col_sizes()) put_u64(out, static_cast<std::uint64_t>(m));
        for (Index r : a->ranks()) put_u64(out, static_cast<std::uint64_t>(r));
        for (const DenseTensor& c : a->cores()) put_core(out, c);
    } else {
        const auto& u = std::get<BlockTT>(value);
        put_header(out, Kind::block, static_cast<std::uint64_t>(u.length()),
                   static_cast<std::uint64_t>(u.block_size()), static_cast<std::uint64_t>(u.block_position()));
        for (Index m : u.mode_sizes()) put_u64(out, static_cast<std::uint64_t>(m));
        for (Index r : u.ranks()) put_u64(out, static_cast<std::uint64_t>(r));
        put_tags(out, u.tags());
        for (const DenseTensor& c : u.cores()) put_core(out, c);
    }
    if (!out) throw Error("failed writing TT container");
}

TTValue read_tt(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (in.gcount() != 4 || magic != kMagic) throw FormatError("not a TT container (bad magic)");
    if (get_bytes(in, 4) != kVersion) throw FormatError("unsupported TT container version");
    const auto kind = static_cast<Kind>(get_bytes(in, 1));
    if (get_bytes(in, 1) != kScalarBytes) throw FormatError("unsupported scalar width");
    get_bytes(in, 2);
    const std::uint64_t n = get_u64(in);
    const std::uint64_t k = get_u64(in);
    const std::uint64_t block = get_u64(in);
    if (n == 0 || n > kMaxCores) throw FormatError("TT container has an invalid chain length");

    auto read_list = [&](std::uint64_t count) {
        std::vector<Index> v;
        for (std::uint64_t j = 0; j < count; ++j) v.push_back(to_index(get_u64(in)));
        return v;
    };
    const auto nn = static_cast<std::size_t>(n);
    switch (kind) {
    case Kind::vector: {
        const auto modes = read_list(n);
        const auto ranks = read_list(n + 1);
        std::vector<Orth> tags;
        for (std::size_t j = 0; j < nn; ++j) tags.push_back(get_tag(in));
        std::vector<DenseTensor> cores;
        for (std::size_t j = 0; j < nn; ++j) cores.push_back(get_core(in, {ranks[j], modes[j], ranks[j + 1]}));
        return VectorTT(std::move(cores), std::move(tags));
    }
    case Kind::matrix: {
        const auto rows = read_list(n);
        const auto cols = read_list(n);
        const auto ranks = read_list(n + 1);
        std::vector<DenseTensor> cores;
        for (std::size_t j = 0; j < nn; ++j) {
            cores.push_back(get_core(in, {ranks[j], rows[j], cols[j], ranks[j + 1]}));
        }
        return MatrixTT(std::move(cores));
    }
    case Kind::block: {
        if (block >= n) throw FormatError("TT container block position outside the chain");
        const Index kk = to_index(k);
        const auto modes = read_list(n);
        const auto ranks = read_list(n + 1);
        std::vector<Orth> tags;
        for (std::size_t j = 0; j < nn; ++j) tags.push_back(get_tag(in));
        std::vector<DenseTensor> cores;
        for (std::size_t j = 0; j < nn; ++j) {
            if (j == block) {
                cores.push_back(get_core(in, {ranks[j], kk, modes[j], ranks[j + 1]}));
            } else {
                cores.push_back(get_core(in, {ranks[j], modes[j], ranks[j + 1]}));
            }
        }
        return BlockTT(std::move(cores), static_cast<int>(block), std::move(tags));
    }
    }
    throw FormatError("TT container has an unknown kind");
}

void save_tt(const std::filesystem::path& path, const TTValue& value) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_tt(out, value);
}

TTValue load_tt(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_tt(in);
}

}  // namespace ttsvd
