#pragma once

#include <filesystem>
#include <string>

#include "selfplay/loop.hpp"
#include "util/jsonio.hpp"

namespace stp::report {

// Pass-rate histogram buckets: exactly 0, (0, 1/8], (1/8, 1/4], (1/4, 1/2],
// (1/2, 1]. The 1/4 and 1/2 edges are the pipeline's own filter boundaries.
inline constexpr int kHistogramBuckets = 5;
int pass_rate_bucket(double p);

// The per-iteration report row. Wall-clock time goes to the console log only;
// every serialized field is a pure function of (config, corpus, seed) so run
// directories stay byte-reproducible.
util::Json build_report_row(const selfplay::IterationArtifacts& artifacts,
                            const selfplay::RunState& state, const selfplay::StepContext& ctx);

// Appends the row to <run_dir>/report.jsonl and writes
// <run_dir>/iterations/NNNN/report.json.
util::Json record_iteration(const std::filesystem::path& run_dir,
                            const selfplay::IterationArtifacts& artifacts,
                            const selfplay::RunState& state, const selfplay::StepContext& ctx);

// Fixed CSV column order (histograms flattened to one column per bucket);
// see the README for the list.
extern const char* const kCsvColumns[];
extern const std::size_t kCsvColumnCount;

// Lossless tabular export of report.jsonl. Throws MissingRunError when the
// run directory has no report rows.
void emit_report(const std::filesystem::path& run_dir, const std::string& format,
                 const std::filesystem::path& out_file);

}  // namespace stp::report
