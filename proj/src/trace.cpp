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

#include "shellft/sim/trace.hpp"

#include <sstream>

namespace shellft::sim {

namespace {

constexpr std::pair<TraceKind, std::string_view> kKindNames[] = {
    {TraceKind::Submit, "submit"},
    {TraceKind::FeAccept, "fe_accept"},
    {TraceKind::Commit, "commit"},
    {TraceKind::Execute, "execute"},
    {TraceKind::ReplyDeliver, "reply_deliver"},
    {TraceKind::ViewAnnounce, "view_announce"},
    {TraceKind::NewView, "new_view"},
    {TraceKind::Checkpoint, "checkpoint"},
    {TraceKind::CheckpointInstall, "checkpoint_install"},
    {TraceKind::Alarm, "alarm"},
    {TraceKind::Fault, "fault"},
    {TraceKind::CommandDef, "command"},
    {TraceKind::Deliver, "deliver"},
};

std::string_view kind_name(TraceKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::optional<TraceKind> parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::string hex_encode(std::string_view bytes) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char c : bytes) {
    out += kHex[c >> 4];
    out += kHex[c & 0xf];
  }
  return out.empty() ? "-" : out;
}

std::optional<std::string> hex_decode(std::string_view hex) {
  if (hex == "-") return std::string();
  if (hex.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::string out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = nibble(hex[i]);
    int lo = nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out += static_cast<char>((hi << 4) | lo);
  }
  return out;
}

}  // namespace

std::string TraceRecord::to_line() const {
  std::ostringstream out;
  out << time << ' ' << kind_name(kind);
  switch (kind) {
    case TraceKind::Submit:
      out << " client=" << client << " counter=" << counter
          << " digest=" << digest;
      break;
    case TraceKind::FeAccept:
      out << " fe=" << who.str() << " client=" << client
          << " counter=" << counter;
      break;
    case TraceKind::Commit:
      out << " executor=" << who.str() << " seq=" << seq << " view=" << view
          << " digest=" << digest;
      break;
    case TraceKind::Execute:
      out << " executor=" << who.str() << " seq=" << seq << " digest=" << digest
          << " dup=" << (dup ? 1 : 0) << " noop=" << (noop ? 1 : 0);
      break;
    case TraceKind::ReplyDeliver:
      out << " client=" << client << " counter=" << counter
          << " digest=" << digest;
      break;
    case TraceKind::ViewAnnounce:
      out << " controller=" << who.str() << " view=" << view;
      break;
    case TraceKind::NewView:
      out << " proposer=" << who.str() << " view=" << view;
      break;
    case TraceKind::Checkpoint:
    case TraceKind::CheckpointInstall:
      out << " executor=" << who.str() << " number=" << seq
          << " digest=" << digest;
      break;
    case TraceKind::Alarm:
      out << " replica=" << who.str() << " what=" << text;
      break;
    case TraceKind::Fault:
      out << " target=" << who.str() << " kind=" << text;
      break;
    case TraceKind::CommandDef:
      out << " digest=" << digest << " client=" << client
          << " counter=" << counter << " payload=" << hex_encode(text);
      break;
    case TraceKind::Deliver:
      out << " from=" << who.str() << " to=" << text << " seq=" << seq;
      break;
  }
  return out.str();
}

std::optional<TraceRecord> TraceRecord::from_line(const std::string& line) {
  std::istringstream in(line);
  TraceRecord rec;
  std::string kind_word;
  if (!(in >> rec.time >> kind_word)) return std::nullopt;
  auto kind = parse_kind(kind_word);
  if (!kind) return std::nullopt;
  rec.kind = *kind;
  std::string token;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    if (key == "client") rec.client = static_cast<uint32_t>(std::stoul(value));
    else if (key == "counter") rec.counter = std::stoull(value);
    else if (key == "digest") rec.digest = std::stoull(value);
    else if (key == "seq" || key == "number") rec.seq = std::stoull(value);
    else if (key == "view") rec.view = std::stoull(value);
    else if (key == "dup") rec.dup = value == "1";
    else if (key == "noop") rec.noop = value == "1";
    else if (key == "fe" || key == "executor" || key == "controller" ||
             key == "proposer" || key == "replica" || key == "target" ||
             key == "from") {
      auto id = parse_replica_id(value);
      if (!id) return std::nullopt;
      rec.who = *id;
    } else if (key == "what" || key == "kind" || key == "to") {
      rec.text = value;
    } else if (key == "payload") {
      auto decoded = hex_decode(value);
      if (!decoded) return std::nullopt;
      rec.text = *decoded;
    } else {
      return std::nullopt;
    }
  }
  return rec;
}

bool TraceFile::is_correct(const ReplicaId& id) const {
  for (const auto& r : replicas) {
    if (r.id == id) return r.correct;
  }
  return false;
}

std::vector<ReplicaId> TraceFile::correct_members(ClusterRole role) const {
  std::vector<ReplicaId> out;
  for (const auto& r : replicas) {
    if (r.id.cluster == role && r.correct) out.push_back(r.id);
  }
  return out;
}

std::string TraceFile::serialize() const {
  std::ostringstream out;
  out << "shellft-trace v1\n";
  out << "meta preset=" << (preset.empty() ? "-" : preset) << " f=" << f
      << " seed=" << seed << " horizon=" << horizon_ms
      << " within_model=" << (within_model ? 1 : 0) << "\n";
  for (const auto& r : replicas) {
    out << "replica " << r.id.str() << " machine=" << r.machine_group << "/"
        << r.machine_index << " status="
        << (r.correct ? "correct" : ("faulty:" + r.fault)) << "\n";
  }
  for (const auto& rec : records) out << rec.to_line() << "\n";
  return out.str();
}

std::optional<TraceFile> TraceFile::parse(const std::string& text,
                                          std::string* error) {
  auto fail = [error](const std::string& msg) -> std::optional<TraceFile> {
    if (error) *error = msg;
    return std::nullopt;
  };
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "shellft-trace v1") {
    return fail("bad trace header");
  }
  TraceFile trace;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("meta ", 0) == 0) {
      std::istringstream ls(line.substr(5));
      std::string token;
      while (ls >> token) {
        auto eq = token.find('=');
        if (eq == std::string::npos) return fail("bad meta: " + line);
        std::string key = token.substr(0, eq);
        std::string value = token.substr(eq + 1);
        if (key == "preset") trace.preset = value == "-" ? "" : value;
        else if (key == "f") trace.f = static_cast<uint32_t>(std::stoul(value));
        else if (key == "seed") trace.seed = std::stoull(value);
        else if (key == "horizon") trace.horizon_ms = std::stoull(value);
        else if (key == "within_model") trace.within_model = value == "1";
      }
      continue;
    }
    if (line.rfind("replica ", 0) == 0) {
      std::istringstream ls(line.substr(8));
      std::string id_text, machine, status;
      ls >> id_text >> machine >> status;
      auto id = parse_replica_id(id_text);
      if (!id || machine.rfind("machine=", 0) != 0 ||
          status.rfind("status=", 0) != 0) {
        return fail("bad replica line: " + line);
      }
      ReplicaStatus rs;
      rs.id = *id;
      std::string loc = machine.substr(8);
      auto slash = loc.rfind('/');
      if (slash == std::string::npos) return fail("bad machine: " + line);
      rs.machine_group = loc.substr(0, slash);
      rs.machine_index = static_cast<uint32_t>(std::stoul(loc.substr(slash + 1)));
      std::string st = status.substr(7);
      if (st == "correct") {
        rs.correct = true;
      } else if (st.rfind("faulty:", 0) == 0) {
        rs.correct = false;
        rs.fault = st.substr(7);
      } else {
        return fail("bad status: " + line);
      }
      trace.replicas.push_back(std::move(rs));
      continue;
    }
    auto rec = TraceRecord::from_line(line);
    if (!rec) return fail("bad record: " + line);
    trace.records.push_back(std::move(*rec));
  }
  return trace;
}

}  // namespace shellft::sim
