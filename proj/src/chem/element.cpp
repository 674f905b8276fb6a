// SPDX-FileCopyrightText: Copyright (c) 2026 The molseq Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "molseq/chem/element.hpp"

#include <array>

namespace molseq::chem {

namespace {

struct ElementInfo {
  std::string_view symbol;
  int atomic_number;
  int max_neutral;
  int max_plus;   // charge +1, 0 = unsupported
  int max_minus;  // charge -1, 0 = unsupported
  std::array<int, 3> normal_valences;  // ascending, 0 = unused
};

// Capacities follow the default selfies semantic constraints.
const ElementInfo& info(Element e) noexcept {
  static const ElementInfo table[] = {
      {"B", 5, 3, 2, 4, {3, 0, 0}},
      {"C", 6, 4, 3, 3, {4, 0, 0}},
      {"N", 7, 3, 4, 2, {3, 0, 0}},
      {"O", 8, 2, 3, 1, {2, 0, 0}},
      {"S", 16, 6, 5, 5, {2, 4, 6}},
      {"P", 15, 5, 4, 6, {3, 5, 0}},
      {"F", 9, 1, 0, 0, {1, 0, 0}},
      {"Cl", 17, 1, 0, 0, {1, 0, 0}},
      {"Br", 35, 1, 0, 0, {1, 0, 0}},
      {"I", 53, 1, 0, 0, {1, 0, 0}},
      {"H", 1, 1, 0, 0, {0, 0, 0}},
  };
  return table[static_cast<int>(e)];
}

}  // namespace

std::string_view symbol(Element e) noexcept {
  return info(e).symbol;
}

int atomic_number(Element e) noexcept {
  return info(e).atomic_number;
}

std::optional<Element> element_from_symbol(std::string_view s) noexcept {
  for (Element e : kAllElements) {
    if (info(e).symbol == s) return e;
  }
  return std::nullopt;
}

std::optional<int> max_valence(Element e, int charge) noexcept {
  const auto& row = info(e);
  if (charge == 0) return row.max_neutral;
  if (charge == 1 && row.max_plus > 0) return row.max_plus;
  if (charge == -1 && row.max_minus > 0) return row.max_minus;
  return std::nullopt;
}

int implicit_hydrogens(Element e, int bond_order_sum) noexcept {
  for (int v : info(e).normal_valences) {
    if (v > 0 && v >= bond_order_sum) return v - bond_order_sum;
  }
  return 0;
}

int default_valence(Element e) noexcept {
  const int v = info(e).normal_valences[0];
  return v == 0 ? 1 : v;
}

bool in_organic_subset(Element e) noexcept {
  return e != Element::H;
}

}  // namespace molseq::chem
