#pragma once

#include <string>

#include "ttsvd/solver.hpp"

namespace ttsvd {

/// The report as a JSON document; the shape is described in docs/report_format.md.
std::string report_to_json(const SweepReport& report, const Vector& sigma, int indent = 2);

}  // namespace ttsvd
