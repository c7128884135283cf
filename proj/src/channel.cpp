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

#include "cosim/channel.hpp"

namespace cosim {

const char* to_string(PacketKind k) {
    switch (k) {
        case PacketKind::ConvOut: return "CONV_OUT";
        case PacketKind::ConvIn: return "CONV_IN";
        case PacketKind::LobFlush: return "LOB_FLUSH";
        case PacketKind::LaggerResponse: return "LAGGER_RESPONSE";
        case PacketKind::ReportAllOk: return "REPORT_ALL_OK";
        case PacketKind::ReportFail: return "REPORT_FAIL";
        case PacketKind::FailActual: return "FAIL_ACTUAL";
    }
    return "?";
}

namespace {

void check_flush_shape(size_t count, size_t index, bool has_prediction) {
    const bool final_entry = (index + 1 == count);
    if (final_entry && has_prediction)
        throw MalformedFlush("final flush entry must not carry a prediction");
    if (!final_entry && !has_prediction)
        throw MalformedFlush("non-final flush entry missing its prediction");
}

uint32_t take(const std::vector<uint32_t>& w, size_t& pos) {
    if (pos >= w.size()) throw MalformedFlush("truncated flush payload");
    return w[pos++];
}

}  // namespace

ChannelPacket encode_lob_flush(const std::vector<LobEntry>& entries,
                               Direction direction, size_t sideband_count,
                               size_t lob_depth) {
    (void)sideband_count;
    if (entries.empty()) throw MalformedFlush("flush must carry at least one entry");
    if (entries.size() > lob_depth)
        throw MalformedFlush("flush exceeds configured LOB depth");

    ChannelPacket p;
    p.kind = PacketKind::LobFlush;
    p.direction = direction;
    p.cycle = entries.front().cycle;
    p.payload.push_back(static_cast<uint32_t>(entries.size()));
    for (size_t i = 0; i < entries.size(); ++i) {
        const LobEntry& e = entries[i];
        check_flush_shape(entries.size(), i, e.prediction.has_value());
        p.payload.push_back(static_cast<uint32_t>(e.cycle));
        p.payload.push_back(static_cast<uint32_t>(e.cycle >> 32));
        p.payload.push_back(e.leader_outputs.mask);
        pack_snapshot_into(e.leader_outputs.values, e.leader_outputs.mask, p.payload);
        p.payload.push_back(e.prediction ? 1u : 0u);
        if (e.prediction) {
            p.payload.push_back(e.prediction->mask);
            pack_snapshot_into(e.prediction->values, e.prediction->mask, p.payload);
        }
    }
    return p;
}

std::vector<LobEntry> decode_lob_flush(const ChannelPacket& packet,
                                       size_t sideband_count) {
    size_t pos = 0;
    const auto& w = packet.payload;
    uint32_t count = take(w, pos);
    if (count == 0) throw MalformedFlush("flush must carry at least one entry");

    std::vector<LobEntry> entries;
    entries.reserve(count);
    for (uint32_t i = 0; i < count; ++i) {
        LobEntry e;
        uint64_t lo = take(w, pos);
        uint64_t hi = take(w, pos);
        e.cycle = lo | (hi << 32);
        e.leader_outputs.mask = take(w, pos);
        e.leader_outputs.values.sideband.assign(sideband_count, 0);
        unpack_snapshot_into(w, pos, e.leader_outputs.mask, sideband_count,
                             e.leader_outputs.values);
        bool has_pred = take(w, pos) != 0;
        check_flush_shape(count, i, has_pred);
        if (has_pred) {
            FieldSet fs;
            fs.mask = take(w, pos);
            fs.values.sideband.assign(sideband_count, 0);
            unpack_snapshot_into(w, pos, fs.mask, sideband_count, fs.values);
            e.prediction = std::move(fs);
        }
        entries.push_back(std::move(e));
    }
    if (pos != w.size()) throw MalformedFlush("trailing words in flush payload");
    return entries;
}

std::vector<uint32_t> encode_fieldset(const FieldSet& fs) {
    std::vector<uint32_t> out;
    out.push_back(fs.mask);
    pack_snapshot_into(fs.values, fs.mask, out);
    return out;
}

FieldSet decode_fieldset(const std::vector<uint32_t>& words, size_t sideband_count) {
    FieldSet fs;
    size_t pos = 0;
    fs.mask = take(words, pos);
    fs.values.sideband.assign(sideband_count, 0);
    unpack_snapshot_into(words, pos, fs.mask, sideband_count, fs.values);
    if (pos != words.size()) throw MalformedFlush("trailing words in fieldset payload");
    return fs;
}

}  // namespace cosim
