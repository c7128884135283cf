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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosim {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BeatOutOfRange : SimError {
    using SimError::SimError;
};
struct MisalignedAddress : SimError {
    using SimError::SimError;
};
struct UnknownSignal : SimError {
    using SimError::SimError;
};
struct ProtocolViolation : SimError {
    using SimError::SimError;
};
struct MissingProxyInput : SimError {
    using SimError::SimError;
};
struct MalformedFlush : SimError {
    using SimError::SimError;
};
struct NoCheckpoint : SimError {
    using SimError::SimError;
};
struct DesyncDetected : SimError {
    using SimError::SimError;
};
struct IllegalState : SimError {
    using SimError::SimError;
};
struct UnpredictableField : SimError {
    using SimError::SimError;
};
struct ConfigError : SimError {
    using SimError::SimError;
};

// ---------------------------------------------------------------------------
// Bus signal vocabulary
// ---------------------------------------------------------------------------

enum class Htrans : uint8_t { Idle = 0, Busy = 1, Nonseq = 2, Seq = 3 };

enum class Hburst : uint8_t {
    Single = 0,
    Incr   = 1,
    Wrap4  = 2,
    Incr4  = 3,
    Wrap8  = 4,
    Incr8  = 5,
    Wrap16 = 6,
    Incr16 = 7,
};

// Bytes per beat; 32-bit data bus, so nothing wider than a word.
enum class Hsize : uint8_t { Byte = 1, Halfword = 2, Word = 4 };

enum class Hresp : uint8_t { Okay = 0, Error = 1, Retry = 2, Split = 3 };

const char* to_string(Htrans t);
const char* to_string(Hburst b);
const char* to_string(Hresp r);

/// Number of beats in a fixed-length burst; nullopt for INCR (unbounded).
std::optional<uint32_t> burst_beats(Hburst b);

bool is_wrap(Hburst b);

// ---------------------------------------------------------------------------
// MSABS snapshot: the per-cycle truth exchanged between verification domains.
// hbusreq/hsplit are bitmasks over master indices; sideband carries one bit
// per registered sideband signal (interrupts and the like).
// ---------------------------------------------------------------------------

struct MsabsSnapshot {
    uint32_t haddr = 0;
    Htrans htrans  = Htrans::Idle;
    bool hwrite    = false;
    Hsize hsize    = Hsize::Word;
    Hburst hburst  = Hburst::Single;
    uint8_t hprot  = 0;
    uint32_t hwdata = 0;
    uint32_t hrdata = 0;
    Hresp hresp    = Hresp::Okay;
    bool hready    = true;
    uint32_t hsplit  = 0;
    uint32_t hbusreq = 0;
    std::vector<uint8_t> sideband;  // 0/1 per registered signal

    bool operator==(const MsabsSnapshot&) const = default;
};

// ---------------------------------------------------------------------------
// Field identities and masks
// ---------------------------------------------------------------------------

enum class FieldId : uint8_t {
    Haddr = 0,
    Htrans,
    Hwrite,
    Hsize,
    Hburst,
    Hprot,
    Hwdata,
    Hrdata,
    Hresp,
    Hready,
    Hsplit,
    Hbusreq,
    Sideband,  // all registered sideband bits, packed into one slot
};

inline constexpr int kFieldCount = 13;

/// Bit set over FieldId. Bit ownership convention for the mask-word fields:
/// a packed hbusreq/hsplit/sideband word carries only the sender's local
/// bits; merging two domain contributions ORs the words.
using FieldMask = uint32_t;

inline constexpr FieldMask field_bit(FieldId f) {
    return FieldMask{1} << static_cast<unsigned>(f);
}
inline constexpr bool mask_has(FieldMask m, FieldId f) {
    return (m & field_bit(f)) != 0;
}

/// Every field except Sideband; add Sideband when signals are registered.
FieldMask full_mask(bool with_sideband);

/// Address/control group driven by the granted master.
inline constexpr FieldMask addr_ctrl_mask() {
    return field_bit(FieldId::Haddr) | field_bit(FieldId::Htrans) |
           field_bit(FieldId::Hwrite) | field_bit(FieldId::Hsize) |
           field_bit(FieldId::Hburst) | field_bit(FieldId::Hprot);
}

/// Response group driven by the data-phase slave.
inline constexpr FieldMask response_mask() {
    return field_bit(FieldId::Hresp) | field_bit(FieldId::Hready);
}

const char* field_name(FieldId f);

/// Copy the fields selected by `mask` from `src` into `dst`. Mask-word
/// fields (hbusreq/hsplit/sideband) are ORed, per the ownership convention.
void merge_fields(MsabsSnapshot& dst, const MsabsSnapshot& src, FieldMask mask);

/// Field-wise equality restricted to `mask`.
bool fields_equal(const MsabsSnapshot& a, const MsabsSnapshot& b, FieldMask mask);

/// A partial snapshot: `values` is meaningful only on `mask` bits.
struct FieldSet {
    FieldMask mask = 0;
    MsabsSnapshot values;

    bool operator==(const FieldSet& o) const {
        return mask == o.mask && fields_equal(values, o.values, mask);
    }
};

// ---------------------------------------------------------------------------
// Predictability classification
// ---------------------------------------------------------------------------

enum class SignalClass : uint8_t {
    PredictableLinear,            // address/control: advances linearly in a burst
    PredictableProducerConsumer,  // slave responses: mirrored fifo model
    PredictableLastValue,         // request/sideband: repeats previous value
    NonPredictableData,           // read/write data
};

const char* to_string(SignalClass c);

SignalClass classify(FieldId f);

/// Classify by name; accepts MSABS field names and registered sideband names.
/// Throws UnknownSignal otherwise.
SignalClass classify(const std::string& name,
                     const std::vector<std::string>& sideband_names);

// ---------------------------------------------------------------------------
// Burst address arithmetic
// ---------------------------------------------------------------------------

struct BurstCursor {
    uint32_t start_addr = 0;
    Hsize hsize         = Hsize::Word;
    Hburst hburst       = Hburst::Single;
    uint32_t beat_index = 0;
};

/// Address of beat `cursor.beat_index`. INCR* add hsize per beat; WRAP*
/// wrap within a (beats x hsize)-byte boundary aligned to itself.
/// Throws BeatOutOfRange past the end of a fixed-length burst and
/// MisalignedAddress when start_addr is not hsize-aligned.
uint32_t next_burst_address(const BurstCursor& cursor);

}  // namespace cosim
