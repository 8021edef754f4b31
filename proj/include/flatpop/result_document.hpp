#pragma once

#include <string>

#include "flatpop/driver.hpp"
#include "flatpop/relaxation.hpp"

namespace flatpop {

inline constexpr int kResultSchemaVersion = 1;

/// JSON document describing a hierarchy run. Non-finite numbers are written as
/// null; `certificate` is null unless the run is certified. Wall-clock times
/// only appear under `timings`.
std::string result_document(const Problem& prob, const HierarchyRun& run, const HierarchyOptions& opts,
                            int indent = 2);

/// JSON table of compare_flavors.
std::string comparison_document(const Problem& prob, const FlavorComparison& cmp, int indent = 2);

}  // namespace flatpop
