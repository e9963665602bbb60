/*
 * Copyright (c) 2026, The ShellFT Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SHELLFT_APP_KV_HPP_
#define SHELLFT_APP_KV_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace shellft::app {

enum class KvOp : uint8_t { Put, Get, Update };

struct KvCommand {
  KvOp op = KvOp::Get;
  std::string key;
  std::vector<std::pair<std::string, std::string>> fields;
};

// Command payloads are field-separated text; field values are printable
// in this artifact so no escaping is needed.
std::string encode_kv(const KvCommand& cmd);
std::optional<KvCommand> decode_kv(std::string_view payload);

// Replicated key-value store: key -> record (field -> value).
class KvState {
 public:
  // Deterministic application; malformed payloads yield a deterministic
  // error reply.
  std::string apply(std::string_view payload);

  std::string snapshot() const;
  bool restore(std::string_view snapshot);

  size_t record_count() const { return records_.size(); }
  const std::map<std::string, std::map<std::string, std::string>>& records()
      const {
    return records_;
  }

  bool operator==(const KvState&) const = default;

 private:
  std::map<std::string, std::map<std::string, std::string>> records_;
};

}  // namespace shellft::app

#endif  // SHELLFT_APP_KV_HPP_
