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

#include "shellft/app/kv.hpp"

#include <sstream>

namespace shellft::app {

namespace {

constexpr char kUnit = '\x1f';    // separates tokens
constexpr char kRecord = '\x1e';  // separates fields

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace

std::string encode_kv(const KvCommand& cmd) {
  std::string out;
  out += cmd.op == KvOp::Put ? 'P' : (cmd.op == KvOp::Get ? 'G' : 'U');
  out += kUnit;
  out += cmd.key;
  for (const auto& [name, value] : cmd.fields) {
    out += kRecord;
    out += name;
    out += kUnit;
    out += value;
  }
  return out;
}

std::optional<KvCommand> decode_kv(std::string_view payload) {
  if (payload.empty()) return std::nullopt;
  KvCommand cmd;
  auto groups = split(payload, kRecord);
  auto head = split(groups[0], kUnit);
  if (head.size() != 2 || head[0].size() != 1) return std::nullopt;
  switch (head[0][0]) {
    case 'P': cmd.op = KvOp::Put; break;
    case 'G': cmd.op = KvOp::Get; break;
    case 'U': cmd.op = KvOp::Update; break;
    default: return std::nullopt;
  }
  if (head[1].empty()) return std::nullopt;
  cmd.key = std::string(head[1]);
  for (size_t i = 1; i < groups.size(); ++i) {
    auto kv = split(groups[i], kUnit);
    if (kv.size() != 2 || kv[0].empty()) return std::nullopt;
    cmd.fields.emplace_back(std::string(kv[0]), std::string(kv[1]));
  }
  if (cmd.op == KvOp::Get && !cmd.fields.empty()) return std::nullopt;
  if (cmd.op != KvOp::Get && cmd.fields.empty()) return std::nullopt;
  return cmd;
}

std::string KvState::apply(std::string_view payload) {
  auto cmd = decode_kv(payload);
  if (!cmd) return "ERR malformed";
  switch (cmd->op) {
    case KvOp::Put: {
      auto& record = records_[cmd->key];
      record.clear();
      for (const auto& [name, value] : cmd->fields) record[name] = value;
      return "OK";
    }
    case KvOp::Update: {
      auto& record = records_[cmd->key];
      for (const auto& [name, value] : cmd->fields) record[name] = value;
      return "OK";
    }
    case KvOp::Get: {
      auto it = records_.find(cmd->key);
      if (it == records_.end()) return "NOTFOUND";
      std::string out = "OK";
      for (const auto& [name, value] : it->second) {
        out += kRecord;
        out += name;
        out += kUnit;
        out += value;
      }
      return out;
    }
  }
  return "ERR malformed";
}

std::string KvState::snapshot() const {
  std::ostringstream out;
  out << records_.size() << '\n';
  for (const auto& [key, record] : records_) {
    out << key.size() << ' ' << key << ' ' << record.size() << '\n';
    for (const auto& [name, value] : record) {
      out << name.size() << ' ' << name << ' ' << value.size() << ' ' << value
          << '\n';
    }
  }
  return out.str();
}

bool KvState::restore(std::string_view snapshot) {
  records_.clear();
  std::istringstream in{std::string(snapshot)};
  size_t n = 0;
  if (!(in >> n)) return false;
  auto read_blob = [&in](std::string& out) {
    size_t len = 0;
    if (!(in >> len)) return false;
    if (in.get() != ' ') return false;
    out.resize(len);
    in.read(out.data(), static_cast<std::streamsize>(len));
    return static_cast<bool>(in);
  };
  for (size_t i = 0; i < n; ++i) {
    std::string key;
    if (!read_blob(key)) return false;
    size_t fields = 0;
    if (!(in >> fields)) return false;
    auto& record = records_[key];
    for (size_t j = 0; j < fields; ++j) {
      std::string name, value;
      if (!read_blob(name) || !read_blob(value)) return false;
      record[name] = value;
    }
  }
  return true;
}

}  // namespace shellft::app
