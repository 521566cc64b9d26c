#pragma once

#include <filesystem>
#include <iosfwd>
#include <variant>

#include "ttsvd/tt.hpp"

namespace ttsvd {

using TTValue = std::variant<VectorTT, MatrixTT, BlockTT>;

/// Binary container; the byte layout is documented in docs/tt_format.md.
/// Round trips are bit-exact.
void write_tt(std::ostream& out, const TTValue& value);
TTValue read_tt(std::istream& in);

void save_tt(const std::filesystem::path& path, const TTValue& value);
TTValue load_tt(const std::filesystem::path& path);

}  // namespace ttsvd
