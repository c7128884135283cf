/*
 * Copyright 2026 The cosim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <vector>

#include "cosim/ahb.hpp"

namespace cosim {

// One 32-bit word per selected field, in FieldId order. The layout is pinned
// by a golden vector in the tests and documented in docs/wire_format.md.

/// Words produced for `mask`; a pure function of the mask (master count and
/// sideband count both fit their single mask word).
uint32_t packed_word_count(FieldMask mask);

/// Serialize the masked fields of `s`, appending to `out`.
void pack_snapshot_into(const MsabsSnapshot& s, FieldMask mask,
                        std::vector<uint32_t>& out);

std::vector<uint32_t> pack_snapshot(const MsabsSnapshot& s, FieldMask mask);

/// Read back fields packed with `mask`, starting at `words[pos]`; advances
/// `pos`. Unselected fields of `s` are left untouched. Throws MalformedFlush
/// on truncated input or out-of-range enum codes.
void unpack_snapshot_into(const std::vector<uint32_t>& words, size_t& pos,
                          FieldMask mask, size_t sideband_count, MsabsSnapshot& s);

MsabsSnapshot unpack_snapshot(const std::vector<uint32_t>& words, FieldMask mask,
                              size_t sideband_count);

}  // namespace cosim
