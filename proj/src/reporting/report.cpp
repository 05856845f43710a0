#include "reporting/report.hpp"

#include <fstream>

#include "util/error.hpp"

namespace stp::report {

int pass_rate_bucket(double p) {
  if (p <= 0.0) return 0;
  if (p <= 0.125) return 1;
  if (p <= 0.25) return 2;
  if (p <= 0.5) return 3;
  return 4;
}

util::Json build_report_row(const selfplay::IterationArtifacts& art,
                            const selfplay::RunState& state, const selfplay::StepContext& ctx) {
  std::vector<int> conjecture_hist(kHistogramBuckets, 0);
  std::vector<int> statement_hist(kHistogramBuckets, 0);
  for (const auto& target : art.targets) {
    double p = art.rates.pass_rate(target.statement.text());
    if (target.kind == selfplay::AttemptKind::conjecture)
      ++conjecture_hist[static_cast<std::size_t>(pass_rate_bucket(p))];
    else
      ++statement_hist[static_cast<std::size_t>(pass_rate_bucket(p))];
  }

  const auto dataset_size = static_cast<long long>(ctx.dataset.size());
  const auto proved_total = static_cast<long long>(state.proved.size());

  util::Json row;
  row["iteration"] = art.iteration;
  row["conjectures_generated"] = art.conjectures_generated;
  row["conjectures_kept"] = art.conjectures_kept;
  row["proofs_sampled"] = art.attempts.size();
  row["cumulative_proofs"] = state.cumulative_proofs;
  row["newly_proved"] = art.newly_proved;
  row["proved_total"] = proved_total;
  row["dataset_size"] = dataset_size;
  row["unproved_count"] = art.unproved_count;
  row["cumulative_pass_rate"] =
      dataset_size == 0 ? 0.0
                        : static_cast<double>(proved_total) / static_cast<double>(dataset_size);
  row["conjecturer_dataset_size"] = art.conjecturer_dataset.examples.size();
  row["prover_dataset_size"] = art.prover_dataset.size();
  row["conjecture_hist"] = conjecture_hist;
  row["statement_hist"] = statement_hist;
  return row;
}

util::Json record_iteration(const std::filesystem::path& run_dir,
                            const selfplay::IterationArtifacts& art,
                            const selfplay::RunState& state, const selfplay::StepContext& ctx) {
  util::Json row = build_report_row(art, state, ctx);

  auto dir = selfplay::Runner::iteration_dir(run_dir, art.iteration);
  std::filesystem::create_directories(dir);
  util::write_text_file(dir / "report.json", row.dump(2) + "\n");

  // append-only run log; rebuilt from per-iteration files on resume overlap
  auto log_path = run_dir / "report.jsonl";
  std::vector<util::Json> rows;
  if (std::filesystem::exists(log_path)) rows = util::read_jsonl(log_path);
  while (!rows.empty() && rows.back().at("iteration").get<int>() >= art.iteration) rows.pop_back();
  rows.push_back(row);
  util::write_jsonl(log_path, rows);
  return row;
}

const char* const kCsvColumns[] = {
    "iteration",
    "conjectures_generated",
    "conjectures_kept",
    "proofs_sampled",
    "cumulative_proofs",
    "newly_proved",
    "proved_total",
    "dataset_size",
    "unproved_count",
    "cumulative_pass_rate",
    "conjecturer_dataset_size",
    "prover_dataset_size",
    "conjecture_hist_0",
    "conjecture_hist_1",
    "conjecture_hist_2",
    "conjecture_hist_3",
    "conjecture_hist_4",
    "statement_hist_0",
    "statement_hist_1",
    "statement_hist_2",
    "statement_hist_3",
    "statement_hist_4",
};
const std::size_t kCsvColumnCount = sizeof(kCsvColumns) / sizeof(kCsvColumns[0]);

namespace {

util::Json csv_cell(const util::Json& row, const std::string& column) {
  auto hist = column.rfind("_hist_");
  if (hist != std::string::npos && hist + 6 < column.size()) {
    std::string key = column.substr(0, hist + 5);
    std::size_t bucket = std::stoull(column.substr(hist + 6));
    return row.at(key).at(bucket);
  }
  return row.at(column);
}

}  // namespace

void emit_report(const std::filesystem::path& run_dir, const std::string& format,
                 const std::filesystem::path& out_file) {
  auto log_path = run_dir / "report.jsonl";
  if (!std::filesystem::exists(log_path))
    throw MissingRunError("no report rows in " + run_dir.string());
  std::vector<util::Json> rows = util::read_jsonl(log_path);

  if (format == "jsonl") {
    util::write_jsonl(out_file, rows);
    return;
  }
  if (format != "csv") throw ConfigError("unknown report format: " + format);

  std::string out;
  for (std::size_t c = 0; c < kCsvColumnCount; ++c) {
    if (c > 0) out += ",";
    out += kCsvColumns[c];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < kCsvColumnCount; ++c) {
      if (c > 0) out += ",";
      out += csv_cell(row, kCsvColumns[c]).dump();
    }
    out += "\n";
  }
  util::write_text_file(out_file, out);
}

}  // namespace stp::report
