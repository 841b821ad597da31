// nfbt - near-field beam training simulator for multiuser XL-MIMO
// Copyright 2026 the nfbt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "nfbt/beam_alloc.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "nfbt/errors.hpp"

namespace nfbt {

std::vector<int> select_candidates(const RVector& probabilities, int num_users) {
  if (num_users < 1 || num_users > probabilities.size())
    throw ConfigError("select_candidates: need 1 <= K <= codebook size");

  std::vector<int> order(static_cast<std::size_t>(probabilities.size()));
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + num_users, order.end(),
                    [&probabilities](int a, int b) {
                      if (probabilities[a] != probabilities[b])
                        return probabilities[a] > probabilities[b];
                      return a < b;
                    });
  std::vector<int> top(order.begin(), order.begin() + num_users);
  for (int& idx : top) idx += 1;  // 1-based flat indices
  return top;
}

SortedCandidates sort_candidates(const std::vector<int>& candidates, const CVector& probe) {
  if (static_cast<Eigen::Index>(candidates.size()) != probe.size())
    throw ConfigError("sort_candidates: candidate and probe lengths differ");

  std::vector<int> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&probe](int a, int b) {
    return std::abs(probe[a]) > std::abs(probe[b]);
  });

  SortedCandidates sorted;
  sorted.indices.reserve(candidates.size());
  sorted.moduli.reserve(candidates.size());
  for (int i : order) {
    sorted.indices.push_back(candidates[static_cast<std::size_t>(i)]);
    sorted.moduli.push_back(std::abs(probe[i]));
  }
  return sorted;
}

AllocationResult allocate_beams(const std::vector<SortedCandidates>& users,
                                std::vector<AllocationEvent>* trace) {
  const int num_users = static_cast<int>(users.size());
  if (num_users == 0) throw ConfigError("allocate_beams: no users");
  for (const SortedCandidates& u : users) {
    if (u.indices.size() != u.moduli.size() || u.indices.empty())
      throw ConfigError("allocate_beams: malformed candidate list");
    std::set<int> unique(u.indices.begin(), u.indices.end());
    if (unique.size() != u.indices.size())
      throw ConfigError("allocate_beams: duplicate candidates within one user");
  }

  std::vector<std::size_t> head(users.size(), 0);
  std::vector<bool> done(users.size(), false);
  std::set<int> taken;
  AllocationResult result;
  result.assigned.assign(users.size(), 0);

  const long iteration_bound = static_cast<long>(num_users) * num_users + num_users;
  int remaining = num_users;
  long iteration = 0;
  while (remaining > 0) {
    if (++iteration > iteration_bound)
      throw NumericalError("allocate_beams: iteration bound exceeded");

    // highest-priority user: largest current head modulus, lowest index on ties
    int k_max = -1;
    for (int k = 0; k < num_users; ++k) {
      if (done[k]) continue;
      if (k_max < 0 || users[k].moduli[head[k]] > users[k_max].moduli[head[k_max]]) k_max = k;
    }

    const int codeword = users[k_max].indices[head[k_max]];
    const bool free = taken.find(codeword) == taken.end();
    if (trace)
      trace->push_back({static_cast<int>(iteration), k_max, codeword,
                        users[k_max].moduli[head[k_max]], free});
    if (free) {
      result.assigned[k_max] = codeword;
      taken.insert(codeword);
      done[k_max] = true;
      --remaining;
    } else {
      if (++head[k_max] >= users[k_max].indices.size())
        throw ConfigError("allocate_beams: candidate list exhausted (need K distinct candidates)");
    }
  }
  return result;
}

}  // namespace nfbt
