#include "policy/ngram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>

#include "policy/tokenizer.hpp"
#include "util/error.hpp"
#include "util/jsonio.hpp"
#include "util/rng.hpp"

namespace stp::policy {

namespace {

constexpr int kMaxOrder = 8;  // context ids are packed into 63 bits

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) throw ConfigError("bad number in model snapshot");
  return v;
}

}  // namespace

NgramModel::NgramModel(int order, double alpha) : order_(order), alpha_(alpha) {
  if (order < 1 || order > kMaxOrder)
    throw ConfigError("ngram order must be in 1.." + std::to_string(kMaxOrder));
  if (alpha <= 0) throw ConfigError("smoothing alpha must be positive");
}

NgramModel::NgramModel(const NgramModel& other)
    : order_(other.order_),
      alpha_(other.alpha_),
      counts_(other.counts_),
      finalized_(other.finalized_),
      vocab_(other.vocab_),
      vocab_index_(other.vocab_index_),
      tables_(other.tables_) {}

NgramModel::NgramModel(NgramModel&& other) noexcept
    : order_(other.order_),
      alpha_(other.alpha_),
      counts_(std::move(other.counts_)),
      finalized_(other.finalized_),
      vocab_(std::move(other.vocab_)),
      vocab_index_(std::move(other.vocab_index_)),
      tables_(std::move(other.tables_)) {
  other.finalized_ = false;
}

NgramModel& NgramModel::operator=(const NgramModel& other) {
  if (this == &other) return *this;
  order_ = other.order_;
  alpha_ = other.alpha_;
  counts_ = other.counts_;
  finalized_ = other.finalized_;
  vocab_ = other.vocab_;
  vocab_index_ = other.vocab_index_;
  tables_ = other.tables_;
  return *this;
}

NgramModel& NgramModel::operator=(NgramModel&& other) noexcept {
  if (this == &other) return *this;
  order_ = other.order_;
  alpha_ = other.alpha_;
  counts_ = std::move(other.counts_);
  finalized_ = other.finalized_;
  vocab_ = std::move(other.vocab_);
  vocab_index_ = std::move(other.vocab_index_);
  tables_ = std::move(other.tables_);
  other.finalized_ = false;
  return *this;
}

void NgramModel::add(std::span<const std::string> prompt_tokens,
                     std::span<const std::string> completion_tokens, double weight) {
  if (weight <= 0) throw ConfigError("training weight must be positive");
  finalized_ = false;

  std::vector<std::string> seq;
  seq.reserve(prompt_tokens.size() + completion_tokens.size() + 1);
  seq.insert(seq.end(), prompt_tokens.begin(), prompt_tokens.end());
  seq.insert(seq.end(), completion_tokens.begin(), completion_tokens.end());
  seq.emplace_back(kEndToken);

  for (std::size_t p = prompt_tokens.size(); p < seq.size(); ++p) {
    int max_ctx = static_cast<int>(std::min<std::size_t>(p, static_cast<std::size_t>(order_ - 1)));
    for (int len = 0; len <= max_ctx; ++len) {
      std::vector<std::string> ctx(seq.begin() + static_cast<std::ptrdiff_t>(p - len),
                                   seq.begin() + static_cast<std::ptrdiff_t>(p));
      counts_[std::move(ctx)][seq[p]] += weight;
    }
  }
}

std::vector<std::string> NgramModel::vocabulary() const {
  std::map<std::string, bool> seen;
  seen[kEndToken] = true;
  seen[kUnkToken] = true;
  for (const auto& [ctx, row] : counts_) {
    for (const auto& t : ctx) seen[t] = true;
    for (const auto& [tok, w] : row) seen[tok] = true;
  }
  std::vector<std::string> out;
  out.reserve(seen.size());
  for (const auto& [tok, unused] : seen) out.push_back(tok);
  return out;
}

void NgramModel::ensure_finalized() const {
  std::lock_guard<std::mutex> lock(finalize_mutex_);
  if (finalized_) return;
  vocab_ = vocabulary();
  if (vocab_.size() >= 512)
    throw ConfigError("vocabulary too large for packed contexts (" +
                      std::to_string(vocab_.size()) + " >= 512)");
  vocab_index_.clear();
  for (std::uint32_t i = 0; i < vocab_.size(); ++i) vocab_index_[vocab_[i]] = i;

  tables_.assign(static_cast<std::size_t>(order_), {});
  std::vector<std::uint32_t> ids;
  for (const auto& [ctx, row] : counts_) {
    ids.clear();
    for (const auto& t : ctx) ids.push_back(vocab_index_.at(t));
    std::uint64_t key = pack_context(ids.data(), static_cast<int>(ids.size()));
    SparseRow& sparse = tables_[ctx.size()][key];
    for (const auto& [tok, w] : row) sparse.entries.emplace_back(vocab_index_.at(tok), w);
    // map iteration is sorted by token text, not id; sort by id for the walk
    std::sort(sparse.entries.begin(), sparse.entries.end());
  }
  finalized_ = true;
}

std::uint32_t NgramModel::token_id(const std::string& token) const {
  auto it = vocab_index_.find(token);
  if (it != vocab_index_.end()) return it->second;
  return vocab_index_.at(kUnkToken);
}

std::uint64_t NgramModel::pack_context(const std::uint32_t* ids, int len) const {
  std::uint64_t key = static_cast<std::uint64_t>(len);
  for (int i = 0; i < len; ++i) key = (key << 9) | (ids[i] + 1);
  return key;
}

std::uint32_t NgramModel::draw(const std::vector<std::uint32_t>& context, double temperature,
                               double u) const {
  const std::size_t vocab_size = vocab_.size();
  const SparseRow* row = nullptr;
  int max_len = std::min<int>(static_cast<int>(context.size()), order_ - 1);
  for (int len = max_len; len >= 0; --len) {
    std::uint64_t key =
        pack_context(context.data() + (context.size() - static_cast<std::size_t>(len)), len);
    auto it = tables_[static_cast<std::size_t>(len)].find(key);
    if (it != tables_[static_cast<std::size_t>(len)].end() && !it->second.entries.empty()) {
      row = &it->second;
      break;
    }
  }

  static const std::vector<std::pair<std::uint32_t, double>> kEmpty;
  const auto& sparse = row ? row->entries : kEmpty;

  // Smoothed weights in log space: every token carries alpha, sparse entries
  // carry count + alpha. Normalize by the max before exponentiating so that
  // low temperatures stay finite (non-argmax mass may underflow to zero).
  double log_base = std::log(alpha_);
  double max_log = log_base;
  for (const auto& [id, w] : sparse) max_log = std::max(max_log, std::log(w + alpha_));

  double base = std::exp((log_base - max_log) / temperature);
  double total = 0;
  double sparse_total = 0;
  for (const auto& [id, w] : sparse) sparse_total += std::exp((std::log(w + alpha_) - max_log) / temperature);
  total = base * static_cast<double>(vocab_size - sparse.size()) + sparse_total;

  double target = u * total;
  double cum = 0;
  std::uint32_t prev = 0;  // next unprocessed id
  for (const auto& [id, w] : sparse) {
    // uniform block of non-sparse ids in [prev, id)
    double block = base * static_cast<double>(id - prev);
    if (target < cum + block && base > 0) {
      auto offset = static_cast<std::uint32_t>((target - cum) / base);
      if (offset >= id - prev) offset = id - prev - 1;
      return prev + offset;
    }
    cum += block;
    double sw = std::exp((std::log(w + alpha_) - max_log) / temperature);
    if (target < cum + sw) return id;
    cum += sw;
    prev = id + 1;
  }
  double tail = base * static_cast<double>(vocab_size - prev);
  if (target < cum + tail && base > 0) {
    auto offset = static_cast<std::uint32_t>((target - cum) / base);
    if (offset >= vocab_size - prev) offset = static_cast<std::uint32_t>(vocab_size - prev) - 1;
    return prev + offset;
  }
  // numeric edge: fall back to the heaviest sparse entry, else the last token
  if (!sparse.empty()) {
    auto best = sparse.front();
    for (const auto& e : sparse)
      if (e.second > best.second) best = e;
    return best.first;
  }
  return static_cast<std::uint32_t>(vocab_size - 1);
}

std::vector<std::string> NgramModel::sample(std::span<const std::string> prompt_tokens,
                                            double temperature, int max_tokens,
                                            std::uint64_t seed) const {
  if (temperature <= 0) throw ConfigError("temperature must be positive");
  if (max_tokens < 1) throw ConfigError("max_tokens must be at least 1");
  ensure_finalized();

  util::Rng rng(seed);
  std::vector<std::uint32_t> context;
  context.reserve(prompt_tokens.size() + static_cast<std::size_t>(max_tokens));
  for (const auto& t : prompt_tokens) context.push_back(token_id(t));

  const std::uint32_t end_id = vocab_index_.at(kEndToken);
  std::vector<std::string> out;
  for (int i = 0; i < max_tokens; ++i) {
    std::uint32_t id = draw(context, temperature, rng.uniform_real());
    if (id == end_id) break;
    out.push_back(vocab_[id]);
    context.push_back(id);
  }
  return out;
}

std::string NgramModel::sample_text(const PromptRecord& prompt, double temperature, int max_tokens,
                                    std::uint64_t seed) const {
  auto completion = sample(prompt.tokens(), temperature, max_tokens, seed);
  return join_tokens(completion);
}

std::vector<std::pair<std::string, double>> NgramModel::distribution(
    std::span<const std::string> context, double temperature) const {
  if (temperature <= 0) throw ConfigError("temperature must be positive");
  ensure_finalized();

  std::vector<std::uint32_t> ids;
  for (const auto& t : context) ids.push_back(token_id(t));

  const SparseRow* row = nullptr;
  int max_len = std::min<int>(static_cast<int>(ids.size()), order_ - 1);
  for (int len = max_len; len >= 0; --len) {
    std::uint64_t key = pack_context(ids.data() + (ids.size() - static_cast<std::size_t>(len)), len);
    auto it = tables_[static_cast<std::size_t>(len)].find(key);
    if (it != tables_[static_cast<std::size_t>(len)].end() && !it->second.entries.empty()) {
      row = &it->second;
      break;
    }
  }

  std::vector<double> weight(vocab_.size());
  double log_base = std::log(alpha_);
  double max_log = log_base;
  if (row)
    for (const auto& [id, w] : row->entries) max_log = std::max(max_log, std::log(w + alpha_));
  for (std::size_t i = 0; i < vocab_.size(); ++i)
    weight[i] = std::exp((log_base - max_log) / temperature);
  if (row)
    for (const auto& [id, w] : row->entries)
      weight[id] = std::exp((std::log(w + alpha_) - max_log) / temperature);

  double total = 0;
  for (double w : weight) total += w;
  std::vector<std::pair<std::string, double>> out;
  out.reserve(vocab_.size());
  for (std::size_t i = 0; i < vocab_.size(); ++i) out.emplace_back(vocab_[i], weight[i] / total);
  return out;
}

std::string NgramModel::snapshot_text() const {
  std::string out = "stp-ngram 1\n";
  out += "order " + std::to_string(order_) + "\n";
  out += "alpha " + format_double(alpha_) + "\n";
  auto vocab = vocabulary();
  out += "vocab " + std::to_string(vocab.size()) + "\n";
  for (const auto& t : vocab) {
    out += t;
    out += "\n";
  }
  std::size_t rows = 0;
  for (const auto& [ctx, row] : counts_) rows += row.size();
  out += "counts " + std::to_string(rows) + "\n";
  for (const auto& [ctx, row] : counts_) {
    for (const auto& [tok, w] : row) {
      out += std::to_string(ctx.size());
      for (const auto& t : ctx) {
        out += "\t";
        out += t;
      }
      out += "\t";
      out += tok;
      out += "\t";
      out += format_double(w);
      out += "\n";
    }
  }
  return out;
}

void NgramModel::save(const std::filesystem::path& path) const {
  util::write_text_file(path, snapshot_text());
}

NgramModel NgramModel::from_snapshot_text(const std::string& text) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= text.size()) throw ConfigError("truncated model snapshot");
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    pos = end + 1;
    return line;
  };

  if (next_line() != "stp-ngram 1") throw ConfigError("bad model snapshot header");
  std::string order_line = next_line();
  if (order_line.rfind("order ", 0) != 0) throw ConfigError("bad model snapshot: order");
  int order = std::stoi(order_line.substr(6));
  std::string alpha_line = next_line();
  if (alpha_line.rfind("alpha ", 0) != 0) throw ConfigError("bad model snapshot: alpha");
  double alpha = parse_double(std::string_view(alpha_line).substr(6));

  NgramModel model(order, alpha);

  std::string vocab_line = next_line();
  if (vocab_line.rfind("vocab ", 0) != 0) throw ConfigError("bad model snapshot: vocab");
  std::size_t vocab_count = std::stoull(vocab_line.substr(6));
  for (std::size_t i = 0; i < vocab_count; ++i) next_line();  // vocabulary is derived

  std::string counts_line = next_line();
  if (counts_line.rfind("counts ", 0) != 0) throw ConfigError("bad model snapshot: counts");
  std::size_t rows = std::stoull(counts_line.substr(7));
  for (std::size_t i = 0; i < rows; ++i) {
    std::string line = next_line();
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() < 3) throw ConfigError("bad model snapshot row");
    std::size_t ctx_len = std::stoull(fields[0]);
    if (fields.size() != ctx_len + 3) throw ConfigError("bad model snapshot row");
    std::vector<std::string> ctx(fields.begin() + 1, fields.begin() + 1 + static_cast<std::ptrdiff_t>(ctx_len));
    model.counts_[std::move(ctx)][fields[ctx_len + 1]] = parse_double(fields[ctx_len + 2]);
  }
  return model;
}

NgramModel NgramModel::load(const std::filesystem::path& path) {
  return from_snapshot_text(util::read_text_file(path));
}

NgramModel train(NgramModel model, std::span<const WeightedExample> examples) {
  for (const WeightedExample& ex : examples) {
    auto prompt_tokens = ex.prompt.tokens();
    auto completion_tokens = tokenize(ex.completion);
    model.add(prompt_tokens, completion_tokens, ex.weight);
  }
  return model;
}

}  // namespace stp::policy
