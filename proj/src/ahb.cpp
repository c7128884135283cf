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

#include "cosim/ahb.hpp"

namespace cosim {

const char* to_string(Htrans t) {
    switch (t) {
        case Htrans::Idle: return "IDLE";
        case Htrans::Busy: return "BUSY";
        case Htrans::Nonseq: return "NONSEQ";
        case Htrans::Seq: return "SEQ";
    }
    return "?";
}

const char* to_string(Hburst b) {
    switch (b) {
        case Hburst::Single: return "SINGLE";
        case Hburst::Incr: return "INCR";
        case Hburst::Wrap4: return "WRAP4";
        case Hburst::Incr4: return "INCR4";
        case Hburst::Wrap8: return "WRAP8";
        case Hburst::Incr8: return "INCR8";
        case Hburst::Wrap16: return "WRAP16";
        case Hburst::Incr16: return "INCR16";
    }
    return "?";
}

const char* to_string(Hresp r) {
    switch (r) {
        case Hresp::Okay: return "OKAY";
        case Hresp::Error: return "ERROR";
        case Hresp::Retry: return "RETRY";
        case Hresp::Split: return "SPLIT";
    }
    return "?";
}

const char* to_string(SignalClass c) {
    switch (c) {
        case SignalClass::PredictableLinear: return "predictable-linear";
        case SignalClass::PredictableProducerConsumer: return "predictable-producer-consumer";
        case SignalClass::PredictableLastValue: return "predictable-last-value";
        case SignalClass::NonPredictableData: return "non-predictable-data";
    }
    return "?";
}

std::optional<uint32_t> burst_beats(Hburst b) {
    switch (b) {
        case Hburst::Single: return 1u;
        case Hburst::Incr: return std::nullopt;
        case Hburst::Wrap4:
        case Hburst::Incr4: return 4u;
        case Hburst::Wrap8:
        case Hburst::Incr8: return 8u;
        case Hburst::Wrap16:
        case Hburst::Incr16: return 16u;
    }
    return std::nullopt;
}

bool is_wrap(Hburst b) {
    return b == Hburst::Wrap4 || b == Hburst::Wrap8 || b == Hburst::Wrap16;
}

FieldMask full_mask(bool with_sideband) {
    FieldMask m = 0;
    for (int i = 0; i < kFieldCount - 1; ++i) m |= (FieldMask{1} << i);
    if (with_sideband) m |= field_bit(FieldId::Sideband);
    return m;
}

const char* field_name(FieldId f) {
    switch (f) {
        case FieldId::Haddr: return "haddr";
        case FieldId::Htrans: return "htrans";
        case FieldId::Hwrite: return "hwrite";
        case FieldId::Hsize: return "hsize";
        case FieldId::Hburst: return "hburst";
        case FieldId::Hprot: return "hprot";
        case FieldId::Hwdata: return "hwdata";
        case FieldId::Hrdata: return "hrdata";
        case FieldId::Hresp: return "hresp";
        case FieldId::Hready: return "hready";
        case FieldId::Hsplit: return "hsplit";
        case FieldId::Hbusreq: return "hbusreq";
        case FieldId::Sideband: return "sideband";
    }
    return "?";
}

void merge_fields(MsabsSnapshot& dst, const MsabsSnapshot& src, FieldMask mask) {
    if (mask_has(mask, FieldId::Haddr)) dst.haddr = src.haddr;
    if (mask_has(mask, FieldId::Htrans)) dst.htrans = src.htrans;
    if (mask_has(mask, FieldId::Hwrite)) dst.hwrite = src.hwrite;
    if (mask_has(mask, FieldId::Hsize)) dst.hsize = src.hsize;
    if (mask_has(mask, FieldId::Hburst)) dst.hburst = src.hburst;
    if (mask_has(mask, FieldId::Hprot)) dst.hprot = src.hprot;
    if (mask_has(mask, FieldId::Hwdata)) dst.hwdata = src.hwdata;
    if (mask_has(mask, FieldId::Hrdata)) dst.hrdata = src.hrdata;
    if (mask_has(mask, FieldId::Hresp)) dst.hresp = src.hresp;
    if (mask_has(mask, FieldId::Hready)) dst.hready = src.hready;
    if (mask_has(mask, FieldId::Hsplit)) dst.hsplit |= src.hsplit;
    if (mask_has(mask, FieldId::Hbusreq)) dst.hbusreq |= src.hbusreq;
    if (mask_has(mask, FieldId::Sideband)) {
        if (dst.sideband.size() < src.sideband.size())
            dst.sideband.resize(src.sideband.size(), 0);
        for (size_t i = 0; i < src.sideband.size(); ++i)
            dst.sideband[i] = static_cast<uint8_t>(dst.sideband[i] | src.sideband[i]);
    }
}

bool fields_equal(const MsabsSnapshot& a, const MsabsSnapshot& b, FieldMask mask) {
    if (mask_has(mask, FieldId::Haddr) && a.haddr != b.haddr) return false;
    if (mask_has(mask, FieldId::Htrans) && a.htrans != b.htrans) return false;
    if (mask_has(mask, FieldId::Hwrite) && a.hwrite != b.hwrite) return false;
    if (mask_has(mask, FieldId::Hsize) && a.hsize != b.hsize) return false;
    if (mask_has(mask, FieldId::Hburst) && a.hburst != b.hburst) return false;
    if (mask_has(mask, FieldId::Hprot) && a.hprot != b.hprot) return false;
    if (mask_has(mask, FieldId::Hwdata) && a.hwdata != b.hwdata) return false;
    if (mask_has(mask, FieldId::Hrdata) && a.hrdata != b.hrdata) return false;
    if (mask_has(mask, FieldId::Hresp) && a.hresp != b.hresp) return false;
    if (mask_has(mask, FieldId::Hready) && a.hready != b.hready) return false;
    if (mask_has(mask, FieldId::Hsplit) && a.hsplit != b.hsplit) return false;
    if (mask_has(mask, FieldId::Hbusreq) && a.hbusreq != b.hbusreq) return false;
    if (mask_has(mask, FieldId::Sideband)) {
        size_t n = std::max(a.sideband.size(), b.sideband.size());
        for (size_t i = 0; i < n; ++i) {
            uint8_t av = i < a.sideband.size() ? a.sideband[i] : 0;
            uint8_t bv = i < b.sideband.size() ? b.sideband[i] : 0;
            if (av != bv) return false;
        }
    }
    return true;
}

SignalClass classify(FieldId f) {
    switch (f) {
        case FieldId::Haddr:
        case FieldId::Htrans:
        case FieldId::Hwrite:
        case FieldId::Hsize:
        case FieldId::Hburst:
        case FieldId::Hprot:
            return SignalClass::PredictableLinear;
        case FieldId::Hwdata:
        case FieldId::Hrdata:
            return SignalClass::NonPredictableData;
        case FieldId::Hresp:
        case FieldId::Hready:
            return SignalClass::PredictableProducerConsumer;
        case FieldId::Hsplit:
            return SignalClass::PredictableProducerConsumer;
        case FieldId::Hbusreq:
        case FieldId::Sideband:
            return SignalClass::PredictableLastValue;
    }
    throw UnknownSignal("unknown field id");
}

SignalClass classify(const std::string& name,
                     const std::vector<std::string>& sideband_names) {
    for (int i = 0; i < kFieldCount; ++i) {
        auto f = static_cast<FieldId>(i);
        if (name == field_name(f)) return classify(f);
    }
    for (const auto& s : sideband_names) {
        if (name == s) return SignalClass::PredictableLastValue;
    }
    throw UnknownSignal("unknown signal name: " + name);
}

uint32_t next_burst_address(const BurstCursor& cursor) {
    const uint32_t size = static_cast<uint32_t>(cursor.hsize);
    if (cursor.start_addr % size != 0)
        throw MisalignedAddress("burst start address not aligned to transfer size");
    auto beats = burst_beats(cursor.hburst);
    if (beats && cursor.beat_index >= *beats)
        throw BeatOutOfRange("beat index past end of fixed-length burst");

    uint32_t linear = cursor.start_addr + cursor.beat_index * size;
    if (!is_wrap(cursor.hburst)) return linear;

    const uint32_t boundary = *beats * size;
    return (cursor.start_addr & ~(boundary - 1)) | (linear & (boundary - 1));
}

}  // namespace cosim
