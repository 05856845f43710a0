#include "policy/external.hpp"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>

#include "util/error.hpp"
#include "util/jsonio.hpp"

namespace stp::policy {

namespace {

struct FdGuard {
  int fd = -1;
  ~FdGuard() {
    if (fd >= 0) ::close(fd);
  }
};

int connect_endpoint(const std::string& endpoint) {
  auto colon = endpoint.rfind(':');
  if (colon == std::string::npos)
    throw TransportError("endpoint must be host:port, got '" + endpoint + "'");
  std::string host = endpoint.substr(0, colon);
  std::string port = endpoint.substr(colon + 1);

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* info = nullptr;
  if (::getaddrinfo(host.c_str(), port.c_str(), &hints, &info) != 0 || info == nullptr)
    throw TransportError("cannot resolve endpoint " + endpoint);

  int fd = -1;
  for (addrinfo* ai = info; ai != nullptr; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(info);
  if (fd < 0) throw TransportError("cannot connect to " + endpoint);
  return fd;
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

std::vector<std::string> external_generate(std::span<const PromptRecord> prompts,
                                           const std::string& endpoint,
                                           const ExternalOptions& options) {
  std::vector<std::string> completions(prompts.size());
  if (prompts.empty()) return completions;

  FdGuard guard;
  guard.fd = connect_endpoint(endpoint);

  std::string batch;
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    util::Json req;
    req["id"] = i;
    req["role"] = role_name(prompts[i].role);
    req["prompt_text"] = prompts[i].text();
    batch += req.dump();
    batch += '\n';
  }
  if (!send_all(guard.fd, batch)) return completions;
  ::shutdown(guard.fd, SHUT_WR);

  std::vector<bool> seen(prompts.size(), false);
  std::size_t remaining = prompts.size();
  std::string buffer;
  char chunk[4096];

  // The per-request clock restarts whenever a response arrives; a silent
  // endpoint forfeits the rest of the batch.
  while (remaining > 0) {
    pollfd pfd{guard.fd, POLLIN, 0};
    int ready = ::poll(&pfd, 1, static_cast<int>(options.request_timeout.count()));
    if (ready <= 0) break;
    ssize_t n = ::recv(guard.fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t start = 0;
    while (true) {
      std::size_t nl = buffer.find('\n', start);
      if (nl == std::string::npos) break;
      std::string line = buffer.substr(start, nl - start);
      start = nl + 1;
      if (line.empty()) continue;
      try {
        util::Json resp = util::Json::parse(line);
        std::size_t id = resp.at("id").get<std::size_t>();
        if (id < prompts.size() && !seen[id]) {
          completions[id] = resp.at("completion").get<std::string>();
          seen[id] = true;
          --remaining;
        }
      } catch (...) {
        // malformed record: the corresponding id (if any) stays empty
      }
    }
    buffer.erase(0, start);
  }
  return completions;
}

}  // namespace stp::policy
