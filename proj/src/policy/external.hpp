#pragma once

#include <chrono>
#include <span>
#include <string>
#include <vector>

#include "policy/prompt.hpp"

namespace stp::policy {

// Wire protocol for plugging an external generator: newline-delimited JSON
// records over a TCP byte stream. Request fields {id, role, prompt_text};
// response fields {id, completion}; ids echo back, unknown fields are
// ignored, responses may arrive in any order.
struct ExternalOptions {
  std::chrono::milliseconds request_timeout{5000};
};

// One completion per prompt, order-preserving. Prompts whose response is
// missing, late or malformed yield empty completions (handled downstream as
// unparseable). Throws TransportError only when the endpoint ("host:port")
// is unreachable at batch start.
std::vector<std::string> external_generate(std::span<const PromptRecord> prompts,
                                           const std::string& endpoint,
                                           const ExternalOptions& options = {});

}  // namespace stp::policy
