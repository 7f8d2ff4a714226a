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

#include <algorithm>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lmpwb/errors.hpp"

namespace lmpwb {

// All probabilities and linear-algebra entries are exact rationals; GMP keeps
// them in lowest terms with a positive denominator.
using Rational = mpq_class;

inline Rational rat(long num, long den = 1) {
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// Accepts "p", "-p" and "p/q" with q > 0 after sign normalization.
inline Rational parse_rational(const std::string& text) {
    mpq_class v;
    if (text.empty() || v.set_str(text, 10) != 0)
        fail(errc::syntax_error, "bad rational '" + text + "'");
    if (v.get_den() == 0)
        fail(errc::syntax_error, "zero denominator in '" + text + "'");
    v.canonicalize();
    return v;
}

inline std::string to_string(const Rational& r) { return r.get_str(); }

inline Rational midpoint(const Rational& a, const Rational& b) { return (a + b) / 2; }

// Candidate thresholds that realize every distinct set {v : v > q} and
// {v : v < q} as q ranges over all rationals: the attained values, 0 and 1,
// one value strictly between each consecutive pair, and one beyond each end.
inline std::vector<Rational> critical_thresholds(std::vector<Rational> values) {
    values.push_back(0);
    values.push_back(1);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<Rational> out;
    out.push_back(values.front() - 1);
    for (size_t i = 0; i < values.size(); ++i) {
        out.push_back(values[i]);
        if (i + 1 < values.size())
            out.push_back(midpoint(values[i], values[i + 1]));
    }
    out.push_back(values.back() + 1);
    return out;
}

} // namespace lmpwb
