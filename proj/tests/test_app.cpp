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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "shellft/app/kv.hpp"
#include "shellft/app/workload.hpp"

using namespace shellft;
using namespace shellft::app;

TEST_CASE("kv put/get/update") {
  KvState kv;
  CHECK(kv.apply(encode_kv({KvOp::Put, "k", {{"f1", "v"}}})) == "OK");
  auto got = kv.apply(encode_kv({KvOp::Get, "k", {}}));
  CHECK(got.find("f1") != std::string::npos);
  CHECK(got.find('v') != std::string::npos);
  CHECK(kv.apply(encode_kv({KvOp::Get, "absent", {}})) == "NOTFOUND");
  CHECK(kv.apply(encode_kv({KvOp::Update, "k", {{"f2", "w"}}})) == "OK");
  auto merged = kv.apply(encode_kv({KvOp::Get, "k", {}}));
  CHECK(merged.find("f1") != std::string::npos);
  CHECK(merged.find("f2") != std::string::npos);
}

TEST_CASE("kv malformed commands get a deterministic error reply") {
  KvState kv;
  CHECK(kv.apply("") == "ERR malformed");
  CHECK(kv.apply("garbage") == "ERR malformed");
  CHECK(kv.apply(kv.apply("Z\x1fkey")) == "ERR malformed");
  // state untouched
  CHECK(kv.record_count() == 0);
}

TEST_CASE("kv snapshot/restore round-trips exactly") {
  KvState kv;
  kv.apply(encode_kv({KvOp::Put, "a", {{"f1", "1"}, {"f2", "two"}}}));
  kv.apply(encode_kv({KvOp::Put, "b", {{"x", std::string(100, 'q')}}}));
  kv.apply(encode_kv({KvOp::Update, "a", {{"f3", "three"}}}));
  auto snap = kv.snapshot();
  KvState restored;
  REQUIRE(restored.restore(snap));
  CHECK(restored == kv);
  CHECK(restored.snapshot() == snap);
}

TEST_CASE("kv codec round-trip") {
  KvCommand cmd{KvOp::Update, "user42", {{"field3", "abc"}}};
  auto decoded = decode_kv(encode_kv(cmd));
  REQUIRE(decoded.has_value());
  CHECK(decoded->op == KvOp::Update);
  CHECK(decoded->key == "user42");
  REQUIRE(decoded->fields.size() == 1);
  CHECK(decoded->fields[0].first == "field3");
}

TEST_CASE("workload determinism") {
  WorkloadSpec spec;
  spec.clients = 3;
  spec.rate = 50;
  spec.duration_ms = 2000;
  auto a = workload_generate(spec, 99);
  auto b = workload_generate(spec, 99);
  REQUIRE(a.size() == b.size());
  for (size_t c = 0; c < a.size(); ++c) {
    REQUIRE(a[c].size() == b[c].size());
    for (size_t i = 0; i < a[c].size(); ++i) {
      REQUIRE(a[c][i].at_ms == b[c][i].at_ms);
      REQUIRE(a[c][i].payload == b[c][i].payload);
    }
  }
  auto other = workload_generate(spec, 100);
  bool differs = false;
  for (size_t c = 0; c < a.size() && !differs; ++c) {
    for (size_t i = 0; i < std::min(a[c].size(), other[c].size()); ++i) {
      if (a[c][i].payload != other[c][i].payload) {
        differs = true;
        break;
      }
    }
  }
  CHECK(differs);
}

TEST_CASE("workload ratio 1.0 emits no reads") {
  WorkloadSpec spec;
  spec.clients = 2;
  spec.rate = 100;
  spec.duration_ms = 1000;
  spec.update_ratio = 1.0;
  auto schedules = workload_generate(spec, 5);
  for (const auto& schedule : schedules) {
    for (const auto& cmd : schedule) {
      auto decoded = decode_kv(cmd.payload);
      REQUIRE(decoded.has_value());
      CHECK(decoded->op == KvOp::Update);
    }
  }
}

TEST_CASE("zipfian hotspot beats uniform and tracks the formula") {
  const uint64_t keys = 1000;
  const double s = 0.99;
  ZipfianGenerator zipf(keys, s);
  // expected P(rank 1) = (1/1^s) / H where H = sum 1/i^s
  double h = 0.0;
  for (uint64_t i = 1; i <= keys; ++i) h += 1.0 / std::pow(double(i), s);
  double expected = 1.0 / h;
  Rng rng(123);
  const int samples = 200000;
  int top = 0;
  for (int i = 0; i < samples; ++i) {
    if (zipf.sample(rng) == 1) ++top;
  }
  double freq = double(top) / samples;
  CHECK(freq > 1.0 / keys);  // hotter than uniform
  CHECK(freq == doctest::Approx(expected).epsilon(0.1));
  CHECK(zipf.probability(1) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("workload spec parsing") {
  WorkloadSpec defaults;
  auto spec = parse_workload_spec(
      "clients=2,rate=10,ratio=0.7,keys=50,duration=1234", defaults);
  REQUIRE(spec.has_value());
  CHECK(spec->clients == 2);
  CHECK(spec->rate == doctest::Approx(10.0));
  CHECK(spec->update_ratio == doctest::Approx(0.7));
  CHECK(spec->keys == 50);
  CHECK(spec->duration_ms == 1234);
  CHECK_FALSE(parse_workload_spec("bogus=1", defaults).has_value());
  CHECK_FALSE(parse_workload_spec("clients=0", defaults).has_value());
}
