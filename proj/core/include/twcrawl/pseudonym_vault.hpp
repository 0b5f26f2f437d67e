#pragma once

#include <functional>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>

#include "twcrawl/clock.hpp"

namespace twcrawl {

struct PseudonymBinding {
  std::string user_key;
  std::string code;
  Timestamp created_at{};
};

// 128 bits from the kernel CSPRNG as 32 lowercase hex digits. Throws
// VaultError when the entropy source fails.
std::string secure_random_code();

using CodeSource = std::function<std::string()>;

// Holds the only link between real identities and pseudonym codes.
//
// With a path, every bind and erase is appended to a JSON-lines file and
// replayed on open; an erased binding is tombstoned and never loaded again.
// Writes are serialized; lookups run concurrently between writes.
class PseudonymVault {
 public:
  explicit PseudonymVault(Clock& clock, std::optional<std::string> path = std::nullopt,
                          CodeSource source = secure_random_code);
  ~PseudonymVault();

  PseudonymVault(const PseudonymVault&) = delete;
  PseudonymVault& operator=(const PseudonymVault&) = delete;

  // Idempotent. New codes are regenerated until they are unused and contain
  // none of `identifiers` (those of 4+ characters, case-insensitively).
  std::string register_user(const std::string& user_key,
                            std::span<const std::string> identifiers = {});

  std::optional<std::string> code_of(const std::string& user_key) const;
  // Throws UnknownCodeError.
  std::string owner_of(const std::string& code) const;
  bool contains_code(const std::string& code) const;
  // Removes the binding and returns its code. Throws UnknownUserError.
  std::string erase(const std::string& user_key);

  std::size_t size() const;
  std::optional<PseudonymBinding> binding(const std::string& user_key) const;

  // Rewrites the backing file with live bindings only, dropping erased
  // identities from disk entirely.
  void compact();

 private:
  void append_line(const std::string& line);

  Clock& clock_;
  std::optional<std::string> path_;
  CodeSource source_;
  int fd_ = -1;
  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, PseudonymBinding> by_user_;
  std::unordered_map<std::string, std::string> by_code_;
};

}  // namespace twcrawl
