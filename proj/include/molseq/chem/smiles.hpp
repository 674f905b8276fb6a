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

#include <span>
#include <string>
#include <string_view>

#include "molseq/chem/molgraph.hpp"

namespace molseq::chem {

/// Parses the supported SMILES subset: organic-subset and bracket atoms
/// (charge, H count), bonds - = # :, branches, ring closures 1-9 and %nn.
/// Aromatic input is kekulized; the result is always a valid, connected graph.
///
/// Throws ParseError (with offset) on syntax errors, unsupported features
/// (stereo, isotopes, '.'), unclosed rings/branches and failed kekulization;
/// domain_error on valence violations.
MolecularGraph parse_smiles(std::string_view text);

/// Kekulé SMILES following input atom order (atom 0 is the root).
std::string write_smiles(const MolecularGraph& graph);

/// Kekulé SMILES where `rank` decides the root (lowest rank) and the order in
/// which neighbours are visited. `rank` must be a permutation of 0..n-1.
std::string write_smiles(const MolecularGraph& graph, std::span<const int> rank);

}  // namespace molseq::chem
