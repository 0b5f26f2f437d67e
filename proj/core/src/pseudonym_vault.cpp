#include "twcrawl/pseudonym_vault.hpp"

#include <fcntl.h>
#include <sys/random.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <sstream>
#include <tuple>

#include "twcrawl/errors.hpp"

namespace twcrawl {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return out;
}

bool leaks_identifier(const std::string& code, std::span<const std::string> identifiers) {
  for (const std::string& id : identifiers) {
    if (id.size() >= 4 && code.find(lower_ascii(id)) != std::string::npos) return true;
  }
  return false;
}

// Bounds the loop against a broken CodeSource.
constexpr int kMaxCodeAttempts = 64;

}  // namespace

std::string secure_random_code() {
  std::array<unsigned char, 16> bytes{};
  std::size_t got = 0;
  while (got < bytes.size()) {
    const ssize_t n = ::getrandom(bytes.data() + got, bytes.size() - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw VaultError(std::string("getrandom failed: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string code;
  code.reserve(32);
  for (unsigned char b : bytes) {
    code += kHex[b >> 4];
    code += kHex[b & 0x0f];
  }
  return code;
}

PseudonymVault::PseudonymVault(Clock& clock, std::optional<std::string> path, CodeSource source)
    : clock_(clock), path_(std::move(path)), source_(std::move(source)) {
  if (!path_) return;
  namespace fs = std::filesystem;
  const fs::path p(*path_);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  if (fs::exists(p)) {
    std::ifstream in(*path_, std::ios::binary);
    if (!in) throw VaultError("cannot read vault " + *path_);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        const std::string op = j.at("op").get<std::string>();
        if (op == "bind") {
          PseudonymBinding b{j.at("user_key").get<std::string>(), j.at("code").get<std::string>(),
                             from_epoch_ms(j.at("created_at_ms").get<std::int64_t>())};
          by_code_[b.code] = b.user_key;
          by_user_[b.user_key] = std::move(b);
        } else if (op == "erase") {
          const std::string code = j.at("code").get<std::string>();
          if (auto it = by_code_.find(code); it != by_code_.end()) {
            by_user_.erase(it->second);
            by_code_.erase(it);
          }
        } else {
          throw VaultError("unknown vault op '" + op + "'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw VaultError("vault " + *path_ + " line " + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  fd_ = ::open(path_->c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0600);
  if (fd_ < 0) throw VaultError("cannot open vault " + *path_ + ": " + std::strerror(errno));
}

PseudonymVault::~PseudonymVault() {
  if (fd_ >= 0) ::close(fd_);
}

void PseudonymVault::append_line(const std::string& line) {
  if (fd_ < 0) return;
  std::string_view data = line;
  while (!data.empty()) {
    const ssize_t n = ::write(fd_, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw VaultError("vault write failed: " + std::string(std::strerror(errno)));
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  if (::fdatasync(fd_) != 0) throw VaultError("vault sync failed: " + std::string(std::strerror(errno)));
}

std::string PseudonymVault::register_user(const std::string& user_key,
                                          std::span<const std::string> identifiers) {
  if (user_key.empty()) throw std::invalid_argument("user key must be non-empty");
  {
    std::shared_lock lock(mu_);
    if (auto it = by_user_.find(user_key); it != by_user_.end()) return it->second.code;
  }
  std::unique_lock lock(mu_);
  if (auto it = by_user_.find(user_key); it != by_user_.end()) return it->second.code;

  std::vector<std::string> checked(identifiers.begin(), identifiers.end());
  checked.push_back(user_key);
  for (int attempt = 0; attempt < kMaxCodeAttempts; ++attempt) {
    std::string code = source_();
    if (by_code_.contains(code) || leaks_identifier(code, checked)) continue;
    PseudonymBinding b{user_key, code, clock_.now()};
    append_line(nlohmann::json{{"op", "bind"},
                               {"user_key", b.user_key},
                               {"code", b.code},
                               {"created_at_ms", to_epoch_ms(b.created_at)}}
                    .dump() +
                "\n");
    by_code_[code] = user_key;
    by_user_[user_key] = std::move(b);
    return code;
  }
  throw VaultError("could not draw an unused pseudonym code");
}

std::optional<std::string> PseudonymVault::code_of(const std::string& user_key) const {
  std::shared_lock lock(mu_);
  if (auto it = by_user_.find(user_key); it != by_user_.end()) return it->second.code;
  return std::nullopt;
}

std::string PseudonymVault::owner_of(const std::string& code) const {
  std::shared_lock lock(mu_);
  if (auto it = by_code_.find(code); it != by_code_.end()) return it->second;
  throw UnknownCodeError("no live binding for code " + code);
}

bool PseudonymVault::contains_code(const std::string& code) const {
  std::shared_lock lock(mu_);
  return by_code_.contains(code);
}

std::string PseudonymVault::erase(const std::string& user_key) {
  std::unique_lock lock(mu_);
  auto it = by_user_.find(user_key);
  if (it == by_user_.end()) throw UnknownUserError("user is not registered");
  std::string code = it->second.code;
  append_line(nlohmann::json{{"op", "erase"}, {"code", code}}.dump() + "\n");
  by_code_.erase(code);
  by_user_.erase(it);
  return code;
}

std::size_t PseudonymVault::size() const {
  std::shared_lock lock(mu_);
  return by_user_.size();
}

std::optional<PseudonymBinding> PseudonymVault::binding(const std::string& user_key) const {
  std::shared_lock lock(mu_);
  if (auto it = by_user_.find(user_key); it != by_user_.end()) return it->second;
  return std::nullopt;
}

void PseudonymVault::compact() {
  if (!path_) return;
  std::unique_lock lock(mu_);
  std::vector<const PseudonymBinding*> live;
  for (const auto& [_, b] : by_user_) live.push_back(&b);
  std::sort(live.begin(), live.end(), [](const auto* a, const auto* b) {
    return std::tie(a->created_at, a->code) < std::tie(b->created_at, b->code);
  });
  const std::string tmp = *path_ + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto* b : live) {
      out << nlohmann::json{{"op", "bind"},
                            {"user_key", b->user_key},
                            {"code", b->code},
                            {"created_at_ms", to_epoch_ms(b->created_at)}}
                 .dump()
          << "\n";
    }
    out.flush();
    if (!out) throw VaultError("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, *path_);
  if (fd_ >= 0) ::close(fd_);
  fd_ = ::open(path_->c_str(), O_WRONLY | O_APPEND | O_CLOEXEC);
  if (fd_ < 0) throw VaultError("cannot reopen vault " + *path_);
}

}  // namespace twcrawl
