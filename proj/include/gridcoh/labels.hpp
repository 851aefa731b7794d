/*
 * Copyright (c) 2026, The gridcoh Authors.
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

#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace gridcoh {

inline constexpr int kNoise = -1;

/// Per-bus cluster labels. Ids are 0..k-1; kNoise marks buses not yet
/// assigned to any cluster.
struct Partition {
  std::vector<int> labels;
  int k = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t noise_count() const
  {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise));
  }
  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Renumbers clusters by ascending smallest member index; noise stays noise.
inline Partition canonicalize(const std::vector<int>& labels)
{
  int max_label = -1;
  for (int l : labels) max_label = std::max(max_label, l);
  std::vector<int> remap(static_cast<std::size_t>(max_label + 1), -1);
  Partition out;
  out.labels.resize(labels.size(), kNoise);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    int l = labels[i];
    if (l < 0) continue;
    auto& slot = remap[static_cast<std::size_t>(l)];
    if (slot < 0) slot = out.k++;
    out.labels[i] = slot;
  }
  return out;
}

/// Members of each cluster, ascending bus index.
inline std::vector<std::vector<std::size_t>> members(const Partition& p)
{
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(p.k));
  for (std::size_t i = 0; i < p.labels.size(); ++i)
    if (p.labels[i] >= 0) out[static_cast<std::size_t>(p.labels[i])].push_back(i);
  return out;
}

}  // namespace gridcoh
