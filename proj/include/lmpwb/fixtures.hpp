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

#include "lmpwb/nlmp.hpp"

namespace lmpwb::fixtures {

namespace detail {
inline Measure weights(const FinSpace& sp, std::vector<std::pair<std::string, Rational>> entries) {
    Measure m(sp.num_atoms());
    for (auto& [name, v] : entries) m.w[sp.atom_of[sp.state_index(name)]] = v;
    return m;
}
} // namespace detail

// Two-state chain: x reaches y with probability one, y halts.
inline Lmp two_chain() {
    FinSpace sp = powerset_space({"x", "y"});
    return validate_lmp(sp, {"a"},
                        {{detail::weights(sp, {{"y", 1}}), detail::weights(sp, {})}});
}

// Copy of the chain plus an isolated sink state z'.
inline Lmp three_sink() {
    FinSpace sp = powerset_space({"x'", "y'", "z'"});
    return validate_lmp(sp, {"a"},
                        {{detail::weights(sp, {{"y'", 1}}), detail::weights(sp, {}),
                          detail::weights(sp, {})}});
}

// Two sources feeding one sink.
inline Lmp fan() {
    FinSpace sp = powerset_space({"s1", "s2", "s3"});
    return validate_lmp(sp, {"a"},
                        {{detail::weights(sp, {{"s3", 1}}), detail::weights(sp, {{"s3", 1}}),
                          detail::weights(sp, {})}});
}

// One source feeding a sink, next to a self-looping state.
inline Lmp fan_loop() {
    FinSpace sp = powerset_space({"s1'", "s3'", "s4'"});
    return validate_lmp(sp, {"a"},
                        {{detail::weights(sp, {{"s3'", 1}}), detail::weights(sp, {}),
                          detail::weights(sp, {{"s4'", 1}})}});
}

// A self-looping state next to one that refuses the action.
inline Lmp dirac_pair() {
    FinSpace sp = powerset_space({"s", "t"});
    return validate_lmp(sp, {"a"},
                        {{detail::weights(sp, {{"s", 1}}), detail::weights(sp, {})}});
}

// Three states with two-measure nondeterminism at the top.
inline Nlmp nd_branch() {
    FinSpace sp = powerset_space({"u", "v", "w"});
    std::vector<std::vector<std::vector<Measure>>> per_state(1);
    per_state[0] = {{detail::weights(sp, {{"v", 1}}), detail::weights(sp, {{"w", rat(1, 2)}})},
                    {detail::weights(sp, {{"w", 1}})},
                    {}};
    return validate_nlmp(sp, {"a"}, per_state);
}

// Two processes over coarse sigma-algebras, seeds for separation searches.
inline std::pair<Lmp, Lmp> coarse_pair() {
    FinSpace sp1 = make_space({"p", "q", "r"}, {bit(0) | bit(1), bit(2)});
    Lmp first = validate_lmp(
        sp1, {"a"},
        {{detail::weights(sp1, {{"p", rat(1, 2)}, {"r", rat(1, 2)}}),
          detail::weights(sp1, {{"p", rat(1, 2)}, {"r", rat(1, 2)}}), detail::weights(sp1, {})}});
    FinSpace sp2 = make_space({"p'", "q'"}, {bit(0) | bit(1)});
    Lmp second = validate_lmp(sp2, {"a"},
                              {{detail::weights(sp2, {{"p'", 1}}), detail::weights(sp2, {{"p'", 1}})}});
    return {first, second};
}

} // namespace lmpwb::fixtures
