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

#ifndef SHELLFT_CORE_WINDOW_HPP_
#define SHELLFT_CORE_WINDOW_HPP_

#include <cstdint>
#include <map>

namespace shellft {

// Sliding sequence-number window. Populated slots always satisfy
// low <= s < low + capacity, and low never moves backwards. Shifting
// the window discards every slot below the new low (checkpoint-driven
// garbage collection).
template <typename Slot>
class Window {
 public:
  explicit Window(uint64_t capacity = 256, uint64_t low = 0)
      : low_(low), capacity_(capacity) {}

  uint64_t low() const { return low_; }
  uint64_t capacity() const { return capacity_; }
  uint64_t high() const { return low_ + capacity_; }  // exclusive

  bool in_range(uint64_t seq) const { return seq >= low_ && seq < high(); }
  bool contains(uint64_t seq) const { return slots_.count(seq) != 0; }

  Slot& slot(uint64_t seq) { return slots_[seq]; }

  const Slot* find(uint64_t seq) const {
    auto it = slots_.find(seq);
    return it == slots_.end() ? nullptr : &it->second;
  }
  Slot* find(uint64_t seq) {
    auto it = slots_.find(seq);
    return it == slots_.end() ? nullptr : &it->second;
  }

  // Only moves forward; slots below the new low are dropped.
  void shift(uint64_t new_low) {
    if (new_low <= low_) return;
    low_ = new_low;
    slots_.erase(slots_.begin(), slots_.lower_bound(new_low));
  }

  void erase(uint64_t seq) { slots_.erase(seq); }

  const std::map<uint64_t, Slot>& slots() const { return slots_; }
  std::map<uint64_t, Slot>& slots() { return slots_; }

  bool empty() const { return slots_.empty(); }
  size_t size() const { return slots_.size(); }

 private:
  uint64_t low_;
  uint64_t capacity_;
  std::map<uint64_t, Slot> slots_;
};

}  // namespace shellft

#endif  // SHELLFT_CORE_WINDOW_HPP_
