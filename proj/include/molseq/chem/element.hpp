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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace molseq::chem {

//! The supported element set. Declaration order is the SELFIES alphabet order.
enum class Element : std::uint8_t { B, C, N, O, S, P, F, Cl, Br, I, H };

inline constexpr std::array<Element, 11> kAllElements = {
    Element::B, Element::C,  Element::N,  Element::O, Element::S, Element::P,
    Element::F, Element::Cl, Element::Br, Element::I, Element::H,
};

std::string_view symbol(Element e) noexcept;
int atomic_number(Element e) noexcept;
std::optional<Element> element_from_symbol(std::string_view s) noexcept;

//! Maximum total bond order (bonds + attached H) for an element at a formal charge.
//! Returns nullopt for charge states outside the supported table.
std::optional<int> max_valence(Element e, int charge) noexcept;

//! Hydrogens implied on an unbracketed (organic-subset) atom whose bond orders
//! sum to `bond_order_sum`: fill up to the smallest normal valence that fits.
int implicit_hydrogens(Element e, int bond_order_sum) noexcept;

//! Smallest normal valence of the neutral element; used for aromatic atoms.
int default_valence(Element e) noexcept;

//! True for B C N O S P F Cl Br I (writable without brackets).
bool in_organic_subset(Element e) noexcept;

}  // namespace molseq::chem
