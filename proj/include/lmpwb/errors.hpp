/*
 * Copyright 2026 the lmpwb authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace lmpwb {

enum class errc {
    bad_model,
    unknown_label_or_state,
    non_measurable_kernel,
    non_measurable_transition,
    mass_exceeds_one,
    label_mismatch,
    not_equivalence,
    not_symmetric,
    not_stable,
    not_surjective,
    not_zigzag,
    not_injective,
    not_hit_bisim,
    leakage_outside_b,
    pair_not_separable,
    syntax_error,
    too_large,
};

inline const char* errc_name(errc c) {
    switch (c) {
    case errc::bad_model: return "BadModel";
    case errc::unknown_label_or_state: return "UnknownLabelOrState";
    case errc::non_measurable_kernel: return "NonMeasurableKernel";
    case errc::non_measurable_transition: return "NonMeasurableTransition";
    case errc::mass_exceeds_one: return "MassExceedsOne";
    case errc::label_mismatch: return "LabelMismatch";
    case errc::not_equivalence: return "NotEquivalence";
    case errc::not_symmetric: return "NotSymmetric";
    case errc::not_stable: return "NotStable";
    case errc::not_surjective: return "NotSurjective";
    case errc::not_zigzag: return "NotZigzag";
    case errc::not_injective: return "NotInjective";
    case errc::not_hit_bisim: return "NotHitBisim";
    case errc::leakage_outside_b: return "LeakageOutsideB";
    case errc::pair_not_separable: return "PairNotSeparable";
    case errc::syntax_error: return "SyntaxError";
    case errc::too_large: return "TooLarge";
    }
    return "Error";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

// Guard for exponential enumerations (2^bits subsets).
inline void require_enumerable(int bits, int limit_bits, const char* what) {
    if (bits > limit_bits)
        fail(errc::too_large, std::string(what) + ": 2^" + std::to_string(bits) +
                                  " exceeds enumeration bound 2^" + std::to_string(limit_bits));
}

} // namespace lmpwb
