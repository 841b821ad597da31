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

#pragma once

#include <vector>

#include "nfbt/linalg.hpp"

namespace nfbt {

/// One user's candidate codewords ordered by descending measured pilot
/// modulus. Indices are 1-based flat codeword indices and must be distinct.
struct SortedCandidates {
  std::vector<int> indices;   // c_k
  std::vector<double> moduli; // r_sort, non-increasing
};

/// Conflict-free assignment: entry k is the flat codeword index of user k;
/// entries are pairwise distinct.
struct AllocationResult {
  std::vector<int> assigned;
};

/// Decision log of the allocation loop, for the --trace-alloc debug dump.
struct AllocationEvent {
  int iteration = 0;
  int user = 0;
  int codeword = 0;
  double modulus = 0.0;
  bool assigned = false;  // false = head popped because of a conflict
};

/// Flat indices (1-based) of the K largest probabilities, descending; ties
/// go to the smaller index.
std::vector<int> select_candidates(const RVector& probabilities, int num_users);

/// Reorders candidates by descending |r_2nd| entries, stable on ties.
SortedCandidates sort_candidates(const std::vector<int>& candidates, const CVector& probe);

/// Greedy conflict-free allocation: repeatedly give the user with the
/// largest current head modulus its head codeword if unused, otherwise pop
/// that user's head. Terminates within K^2 iterations; with K distinct
/// candidates per user a codeword is always left (pigeonhole).
AllocationResult allocate_beams(const std::vector<SortedCandidates>& users,
                                std::vector<AllocationEvent>* trace = nullptr);

}  // namespace nfbt
