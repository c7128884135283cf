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

#include "cosim/pack.hpp"

namespace cosim {

uint32_t packed_word_count(FieldMask mask) {
    uint32_t n = 0;
    for (int i = 0; i < kFieldCount; ++i)
        if (mask & (FieldMask{1} << i)) ++n;
    return n;
}

void pack_snapshot_into(const MsabsSnapshot& s, FieldMask mask,
                        std::vector<uint32_t>& out) {
    if (mask_has(mask, FieldId::Haddr)) out.push_back(s.haddr);
    if (mask_has(mask, FieldId::Htrans)) out.push_back(static_cast<uint32_t>(s.htrans));
    if (mask_has(mask, FieldId::Hwrite)) out.push_back(s.hwrite ? 1u : 0u);
    if (mask_has(mask, FieldId::Hsize)) out.push_back(static_cast<uint32_t>(s.hsize));
    if (mask_has(mask, FieldId::Hburst)) out.push_back(static_cast<uint32_t>(s.hburst));
    if (mask_has(mask, FieldId::Hprot)) out.push_back(s.hprot & 0xFu);
    if (mask_has(mask, FieldId::Hwdata)) out.push_back(s.hwdata);
    if (mask_has(mask, FieldId::Hrdata)) out.push_back(s.hrdata);
    if (mask_has(mask, FieldId::Hresp)) out.push_back(static_cast<uint32_t>(s.hresp));
    if (mask_has(mask, FieldId::Hready)) out.push_back(s.hready ? 1u : 0u);
    if (mask_has(mask, FieldId::Hsplit)) out.push_back(s.hsplit);
    if (mask_has(mask, FieldId::Hbusreq)) out.push_back(s.hbusreq);
    if (mask_has(mask, FieldId::Sideband)) {
        uint32_t bits = 0;
        for (size_t i = 0; i < s.sideband.size() && i < 32; ++i)
            if (s.sideband[i]) bits |= (1u << i);
        out.push_back(bits);
    }
}

std::vector<uint32_t> pack_snapshot(const MsabsSnapshot& s, FieldMask mask) {
    std::vector<uint32_t> out;
    out.reserve(packed_word_count(mask));
    pack_snapshot_into(s, mask, out);
    return out;
}

namespace {

uint32_t take(const std::vector<uint32_t>& words, size_t& pos) {
    if (pos >= words.size()) throw MalformedFlush("truncated packed snapshot");
    return words[pos++];
}

}  // namespace

void unpack_snapshot_into(const std::vector<uint32_t>& words, size_t& pos,
                          FieldMask mask, size_t sideband_count, MsabsSnapshot& s) {
    if (mask_has(mask, FieldId::Haddr)) s.haddr = take(words, pos);
    if (mask_has(mask, FieldId::Htrans)) {
        uint32_t v = take(words, pos);
        if (v > 3) throw MalformedFlush("bad htrans code");
        s.htrans = static_cast<Htrans>(v);
    }
    if (mask_has(mask, FieldId::Hwrite)) s.hwrite = take(words, pos) != 0;
    if (mask_has(mask, FieldId::Hsize)) {
        uint32_t v = take(words, pos);
        if (v != 1 && v != 2 && v != 4) throw MalformedFlush("bad hsize code");
        s.hsize = static_cast<Hsize>(v);
    }
    if (mask_has(mask, FieldId::Hburst)) {
        uint32_t v = take(words, pos);
        if (v > 7) throw MalformedFlush("bad hburst code");
        s.hburst = static_cast<Hburst>(v);
    }
    if (mask_has(mask, FieldId::Hprot)) s.hprot = static_cast<uint8_t>(take(words, pos) & 0xFu);
    if (mask_has(mask, FieldId::Hwdata)) s.hwdata = take(words, pos);
    if (mask_has(mask, FieldId::Hrdata)) s.hrdata = take(words, pos);
    if (mask_has(mask, FieldId::Hresp)) {
        uint32_t v = take(words, pos);
        if (v > 3) throw MalformedFlush("bad hresp code");
        s.hresp = static_cast<Hresp>(v);
    }
    if (mask_has(mask, FieldId::Hready)) s.hready = take(words, pos) != 0;
    if (mask_has(mask, FieldId::Hsplit)) s.hsplit = take(words, pos);
    if (mask_has(mask, FieldId::Hbusreq)) s.hbusreq = take(words, pos);
    if (mask_has(mask, FieldId::Sideband)) {
        uint32_t bits = take(words, pos);
        s.sideband.assign(sideband_count, 0);
        for (size_t i = 0; i < sideband_count && i < 32; ++i)
            s.sideband[i] = (bits >> i) & 1u;
    }
}

MsabsSnapshot unpack_snapshot(const std::vector<uint32_t>& words, FieldMask mask,
                              size_t sideband_count) {
    MsabsSnapshot s;
    s.sideband.assign(sideband_count, 0);
    size_t pos = 0;
    unpack_snapshot_into(words, pos, mask, sideband_count, s);
    return s;
}

}  // namespace cosim
