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

#include <doctest.h>

#include <set>

#include "cosim/ahb.hpp"

using namespace cosim;

namespace {

// Independent wrap oracle: walk the burst linearly and fold every address
// into the aligned wrap window.
uint32_t wrap_oracle(uint32_t start, Hsize size, Hburst burst, uint32_t beat) {
    uint32_t bytes = static_cast<uint32_t>(size);
    uint32_t beats = *burst_beats(burst);
    uint32_t boundary = beats * bytes;
    uint32_t offset = (start % boundary) + beat * bytes;
    return start - (start % boundary) + (offset % boundary);
}

}  // namespace

TEST_CASE("incrementing burst advances by transfer size") {
    CHECK(next_burst_address({0x100, Hsize::Word, Hburst::Incr4, 1}) == 0x104);
    CHECK(next_burst_address({0x100, Hsize::Word, Hburst::Incr4, 3}) == 0x10C);
    CHECK(next_burst_address({0x80, Hsize::Halfword, Hburst::Incr8, 5}) == 0x8A);
    CHECK(next_burst_address({0x40, Hsize::Word, Hburst::Incr, 1000}) == 0x40 + 4000);
}

TEST_CASE("single burst is the identity on beat zero") {
    CHECK(next_burst_address({0x200, Hsize::Byte, Hburst::Single, 0}) == 0x200);
}

TEST_CASE("wrap burst stays inside its aligned window") {
    // full documented sequence for a WRAP4 word burst starting at 0x3C
    CHECK(next_burst_address({0x3C, Hsize::Word, Hburst::Wrap4, 0}) == 0x3C);
    CHECK(next_burst_address({0x3C, Hsize::Word, Hburst::Wrap4, 1}) == 0x30);
    CHECK(next_burst_address({0x3C, Hsize::Word, Hburst::Wrap4, 2}) == 0x34);
    CHECK(next_burst_address({0x3C, Hsize::Word, Hburst::Wrap4, 3}) == 0x38);
}

TEST_CASE("wrap arithmetic matches brute force over a 64-byte page") {
    for (Hsize size : {Hsize::Byte, Hsize::Halfword, Hsize::Word}) {
        uint32_t bytes = static_cast<uint32_t>(size);
        for (Hburst burst : {Hburst::Wrap4, Hburst::Wrap8, Hburst::Wrap16}) {
            uint32_t beats = *burst_beats(burst);
            for (uint32_t start = 0; start < 64; start += bytes) {
                std::set<uint32_t> got, want;
                for (uint32_t beat = 0; beat < beats; ++beat) {
                    got.insert(next_burst_address({start, size, burst, beat}));
                    want.insert(wrap_oracle(start, size, burst, beat));
                    CHECK(next_burst_address({start, size, burst, beat}) ==
                          wrap_oracle(start, size, burst, beat));
                }
                // wrap closure: same address set as linear arithmetic mod window
                CHECK(got == want);
            }
        }
    }
}

TEST_CASE("burst bounds and alignment are enforced") {
    CHECK_THROWS_AS(next_burst_address({0x200, Hsize::Word, Hburst::Wrap4, 4}),
                    BeatOutOfRange);
    CHECK_THROWS_AS(next_burst_address({0x200, Hsize::Word, Hburst::Single, 1}),
                    BeatOutOfRange);
    CHECK_THROWS_AS(next_burst_address({0x201, Hsize::Word, Hburst::Incr4, 0}),
                    MisalignedAddress);
    CHECK_THROWS_AS(next_burst_address({0x202, Hsize::Halfword, Hburst::Wrap8, 9}),
                    BeatOutOfRange);
}

TEST_CASE("signal classification is total and fixed") {
    CHECK(classify(FieldId::Haddr) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Htrans) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Hwrite) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Hsize) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Hburst) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Hprot) == SignalClass::PredictableLinear);
    CHECK(classify(FieldId::Hwdata) == SignalClass::NonPredictableData);
    CHECK(classify(FieldId::Hrdata) == SignalClass::NonPredictableData);
    CHECK(classify(FieldId::Hresp) == SignalClass::PredictableProducerConsumer);
    CHECK(classify(FieldId::Hready) == SignalClass::PredictableProducerConsumer);
    CHECK(classify(FieldId::Hbusreq) == SignalClass::PredictableLastValue);
    CHECK(classify(FieldId::Sideband) == SignalClass::PredictableLastValue);

    // every field id yields exactly one class
    for (int i = 0; i < kFieldCount; ++i)
        CHECK_NOTHROW(classify(static_cast<FieldId>(i)));
}

TEST_CASE("classification by name covers sideband signals") {
    std::vector<std::string> sb = {"irq0", "dma_done"};
    CHECK(classify("haddr", sb) == SignalClass::PredictableLinear);
    CHECK(classify("hrdata", sb) == SignalClass::NonPredictableData);
    CHECK(classify("hbusreq", sb) == SignalClass::PredictableLastValue);
    CHECK(classify("irq0", sb) == SignalClass::PredictableLastValue);
    CHECK(classify("dma_done", sb) == SignalClass::PredictableLastValue);
    CHECK_THROWS_AS(classify("hgrant", sb), UnknownSignal);
    CHECK_THROWS_AS(classify("", sb), UnknownSignal);
}

TEST_CASE("field merge honors the bit ownership convention") {
    MsabsSnapshot a, b;
    a.hbusreq = 0b01;
    b.hbusreq = 0b10;
    b.haddr = 0x44;
    MsabsSnapshot dst;
    merge_fields(dst, a, field_bit(FieldId::Hbusreq));
    merge_fields(dst, b, field_bit(FieldId::Hbusreq) | field_bit(FieldId::Haddr));
    CHECK(dst.hbusreq == 0b11);
    CHECK(dst.haddr == 0x44);
    CHECK(fields_equal(dst, b, field_bit(FieldId::Haddr)));
    CHECK(!fields_equal(dst, b, field_bit(FieldId::Hbusreq)));
}
