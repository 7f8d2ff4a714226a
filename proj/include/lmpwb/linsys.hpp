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

#include <optional>
#include <vector>

#include "lmpwb/errors.hpp"
#include "lmpwb/rational.hpp"

namespace lmpwb {

// Equality system A x = b with x >= 0, all entries exact rationals.
struct LinSystem {
    int num_vars = 0;
    std::vector<std::vector<Rational>> rows;
    std::vector<Rational> rhs;

    void add_equation(std::vector<Rational> coeffs, Rational b) {
        if (static_cast<int>(coeffs.size()) != num_vars)
            fail(errc::bad_model, "coefficient vector length mismatch");
        rows.push_back(std::move(coeffs));
        rhs.push_back(std::move(b));
    }

    bool satisfied_by(const std::vector<Rational>& x) const {
        if (static_cast<int>(x.size()) != num_vars) return false;
        for (const auto& v : x)
            if (v < 0) return false;
        for (size_t i = 0; i < rows.size(); ++i) {
            Rational acc(0);
            for (int j = 0; j < num_vars; ++j) acc += rows[i][j] * x[j];
            if (acc != rhs[i]) return false;
        }
        return true;
    }
};

// Feasibility by phase-1 simplex: minimize the sum of artificial variables
// with Bland's rule (lowest index enters, lowest basic index breaks ratio
// ties), which cannot cycle, so termination is guaranteed over exact
// rationals. Returns a nonnegative solution or nullopt.
inline std::optional<std::vector<Rational>> feasible(const LinSystem& sys) {
    const int n = sys.num_vars;
    const int m = static_cast<int>(sys.rows.size());
    if (m == 0) return std::vector<Rational>(n, Rational(0));
    const int cols = n + m + 1; // structural, artificial, rhs
    std::vector<std::vector<Rational>> t(m + 1, std::vector<Rational>(cols, Rational(0)));
    for (int i = 0; i < m; ++i) {
        bool flip = sys.rhs[i] < 0;
        for (int j = 0; j < n; ++j) t[i][j] = flip ? -sys.rows[i][j] : sys.rows[i][j];
        t[i][n + i] = 1;
        t[i][cols - 1] = flip ? -sys.rhs[i] : sys.rhs[i];
    }
    // Objective row: reduced costs for min sum of artificials, basis = artificials.
    for (int j = 0; j < n; ++j) {
        Rational z(0);
        for (int i = 0; i < m; ++i) z += t[i][j];
        t[m][j] = -z;
    }
    Rational w(0);
    for (int i = 0; i < m; ++i) w += t[i][cols - 1];
    t[m][cols - 1] = -w;

    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    while (true) {
        int enter = -1;
        for (int j = 0; j < n + m; ++j)
            if (t[m][j] < 0) {
                enter = j;
                break;
            }
        if (enter < 0) break;
        int leave = -1;
        Rational best;
        for (int i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            Rational ratio = t[i][cols - 1] / t[i][enter];
            if (leave < 0 || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave < 0) break; // cannot happen for phase 1 (objective bounded below)
        Rational piv = t[leave][enter];
        for (int j = 0; j < cols; ++j) t[leave][j] /= piv;
        for (int i = 0; i <= m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            Rational f = t[i][enter];
            for (int j = 0; j < cols; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    if (t[m][cols - 1] != 0) return std::nullopt; // residual artificial mass
    std::vector<Rational> x(n, Rational(0));
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = t[i][cols - 1];
    if (!sys.satisfied_by(x)) fail(errc::bad_model, "simplex returned an invalid solution");
    return x;
}

} // namespace lmpwb
