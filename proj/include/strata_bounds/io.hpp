#pragma once

#include <string>

#include "json.hpp"
#include "strata_bounds/trial_data.hpp"

namespace strata_bounds {

// Parses trial counts from a file, dispatching on the .json / .csv
// extension. Throws InputError with a position diagnostic on bad input.
TrialCounts ingest_file(const std::string& path);

// {"arms": [{"z": 0, "survived_y1": ..., "survived_y0": ...,
//            "survived_y_missing": ..., "died": ...}, ...]}
// survived_y_missing defaults to 0. Arms may appear in any order but the
// z values must be exactly 0..m with no gaps or duplicates.
TrialCounts ingest_json(const std::string& text);

// Header row naming the same fields (survived_y_missing optional), then
// one row per arm.
TrialCounts ingest_csv(const std::string& text);

// Reports keep insertion order so emitted documents read top-down.
using Report = nlohmann::ordered_json;

Report counts_to_json(const TrialCounts& counts);

// FNV-1a 64-bit digest of the canonical count serialization; ties every
// report to its input.
std::string input_digest(const TrialCounts& counts);

// Flattens a report document to "key,value" CSV rows; arrays of uniform
// objects become proper tables.
std::string report_to_csv(const Report& report);

}  // namespace strata_bounds
