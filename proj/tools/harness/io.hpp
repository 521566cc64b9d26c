#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "experiment.hpp"

namespace ttsvd::harness {

/// results.csv columns, in order. The aggregate row of a group has rep "mean".
const std::vector<std::string>& results_columns();
/// timings.csv columns: the identifying columns of results.csv plus wall times.
const std::vector<std::string>& timings_columns();

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_timings_csv(std::ostream& out, const std::vector<ResultRow>& rows);
/// Parses results.csv; throws FormatError on schema mismatch.
std::vector<ResultRow> read_results_csv(std::istream& in);
/// Merges timings.csv into rows read from results.csv (matched by position).
void merge_timings_csv(std::istream& in, std::vector<ResultRow>& rows);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace ttsvd::harness
