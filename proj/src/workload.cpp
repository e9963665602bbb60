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

#include "shellft/app/workload.hpp"

#include <algorithm>
#include <cmath>

#include "shellft/app/kv.hpp"

namespace shellft::app {

ZipfianGenerator::ZipfianGenerator(uint64_t n, double s) {
  cdf_.reserve(n);
  double total = 0.0;
  for (uint64_t i = 1; i <= n; ++i) {
    total += 1.0 / std::pow(static_cast<double>(i), s);
    cdf_.push_back(total);
  }
  for (auto& v : cdf_) v /= total;
}

uint64_t ZipfianGenerator::sample(Rng& rng) const {
  double u = rng.real01();
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) return cdf_.size();
  return static_cast<uint64_t>(it - cdf_.begin()) + 1;
}

double ZipfianGenerator::probability(uint64_t rank) const {
  if (rank == 0 || rank > cdf_.size()) return 0.0;
  double lo = rank == 1 ? 0.0 : cdf_[rank - 2];
  return cdf_[rank - 1] - lo;
}

std::optional<WorkloadSpec> parse_workload_spec(const std::string& text,
                                                const WorkloadSpec& defaults) {
  WorkloadSpec spec = defaults;
  if (text.empty()) return spec;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(start, end - start);
    start = end + 1;
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) return std::nullopt;
    std::string key = item.substr(0, eq);
    std::string value = item.substr(eq + 1);
    try {
      if (key == "clients") spec.clients = static_cast<uint32_t>(std::stoul(value));
      else if (key == "rate") spec.rate = std::stod(value);
      else if (key == "ratio") spec.update_ratio = std::stod(value);
      else if (key == "keys") spec.keys = std::stoull(value);
      else if (key == "fields") spec.fields = static_cast<uint32_t>(std::stoul(value));
      else if (key == "fieldlen") spec.field_len = static_cast<uint32_t>(std::stoul(value));
      else if (key == "zipf") spec.zipf_s = std::stod(value);
      else if (key == "start") spec.start_ms = std::stoull(value);
      else if (key == "duration") spec.duration_ms = std::stoull(value);
      else return std::nullopt;
    } catch (...) {
      return std::nullopt;
    }
  }
  if (spec.clients == 0 || spec.rate <= 0.0 || spec.keys == 0) return std::nullopt;
  return spec;
}

namespace {

std::string random_value(Rng& rng, uint32_t len) {
  static constexpr char kAlphabet[] =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out;
  out.reserve(len);
  for (uint32_t i = 0; i < len; ++i) {
    out += kAlphabet[rng.uniform(0, sizeof(kAlphabet) - 2)];
  }
  return out;
}

}  // namespace

std::vector<std::vector<ScheduledCommand>> workload_generate(
    const WorkloadSpec& spec, uint64_t seed) {
  ZipfianGenerator zipf(spec.keys, spec.zipf_s);
  std::vector<std::vector<ScheduledCommand>> schedules(spec.clients);
  Rng root(seed);
  double interval = 1000.0 / spec.rate;
  for (uint32_t c = 0; c < spec.clients; ++c) {
    Rng rng = root.fork(c + 1);
    double t = static_cast<double>(spec.start_ms) +
               interval * rng.real01();  // de-synchronize clients
    while (t < static_cast<double>(spec.start_ms + spec.duration_ms)) {
      KvCommand cmd;
      cmd.key = "user" + std::to_string(zipf.sample(rng));
      if (rng.real01() < spec.update_ratio) {
        cmd.op = KvOp::Update;
        // A single-field write; full records are created on first touch.
        uint32_t field = static_cast<uint32_t>(rng.uniform(0, spec.fields - 1));
        cmd.fields.emplace_back("field" + std::to_string(field),
                                random_value(rng, spec.field_len));
      } else {
        cmd.op = KvOp::Get;
      }
      schedules[c].push_back(ScheduledCommand{
          static_cast<uint64_t>(t), encode_kv(cmd)});
      t += interval;
    }
  }
  return schedules;
}

}  // namespace shellft::app
