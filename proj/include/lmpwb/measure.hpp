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

#include <vector>

#include "lmpwb/finspace.hpp"
#include "lmpwb/rational.hpp"

namespace lmpwb {

// Subprobability measure on a FinSpace: one nonnegative weight per atom,
// total at most 1. Values on measurable sets are sums of atom weights.
struct Measure {
    std::vector<Rational> w;

    Measure() = default;
    explicit Measure(int num_atoms) : w(num_atoms, Rational(0)) {}

    int num_atoms() const { return static_cast<int>(w.size()); }

    Rational mass(Mask atom_set) const {
        Rational out(0);
        for (int a : mask_bits(atom_set)) out += w[a];
        return out;
    }

    Rational total() const { return mass(full_mask(num_atoms())); }

    bool operator==(const Measure& o) const { return w == o.w; }
    bool operator<(const Measure& o) const {
        return std::lexicographical_compare(w.begin(), w.end(), o.w.begin(), o.w.end());
    }
};

inline Measure zero_measure(const FinSpace& s) { return Measure(s.num_atoms()); }

inline Measure dirac(const FinSpace& s, int state) {
    Measure m(s.num_atoms());
    m.w[s.atom_of[state]] = 1;
    return m;
}

inline void check_subprobability(const Measure& m) {
    for (const auto& v : m.w)
        if (v < 0) fail(errc::bad_model, "negative atom weight");
    if (m.total() > 1) fail(errc::mass_exceeds_one, "total mass " + to_string(m.total()));
}

enum class Cmp { lt, le, gt, ge };

inline const char* cmp_name(Cmp c) {
    switch (c) {
    case Cmp::lt: return "<";
    case Cmp::le: return "<=";
    case Cmp::gt: return ">";
    case Cmp::ge: return ">=";
    }
    return "?";
}

inline bool cmp_holds(const Rational& v, Cmp c, const Rational& q) {
    switch (c) {
    case Cmp::lt: return v < q;
    case Cmp::le: return v <= q;
    case Cmp::gt: return v > q;
    case Cmp::ge: return v >= q;
    }
    return false;
}

// Delta^{bowtie q}(E) restricted to a finite universe of measures: the mask
// of universe indices whose mass on E satisfies the comparison.
inline Mask delta_bowtie(const std::vector<Measure>& universe, Mask e_atoms, Cmp c, const Rational& q) {
    Mask out = 0;
    for (size_t i = 0; i < universe.size(); ++i)
        if (cmp_holds(universe[i].mass(e_atoms), c, q)) out |= bit(static_cast<int>(i));
    return out;
}

// Partition of a measure universe by agreement on every member of the family
// (equivalently on each block, by additivity). Classes ordered by least index.
inline std::vector<Mask> measure_classes(const std::vector<Measure>& universe,
                                         const std::vector<Mask>& family_atoms) {
    const int n = static_cast<int>(universe.size());
    std::vector<Mask> classes;
    std::vector<int> rep;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (size_t k = 0; k < classes.size(); ++k) {
            bool same = true;
            for (Mask f : family_atoms)
                if (universe[rep[k]].mass(f) != universe[i].mass(f)) {
                    same = false;
                    break;
                }
            if (same) {
                classes[k] |= bit(i);
                placed = true;
                break;
            }
        }
        if (!placed) {
            classes.push_back(bit(i));
            rep.push_back(i);
        }
    }
    return classes;
}

// All attained masses of the universe on a set, fed to critical_thresholds.
inline std::vector<Rational> attained_masses(const std::vector<Measure>& universe, Mask e_atoms) {
    std::vector<Rational> vals;
    for (const auto& m : universe) vals.push_back(m.mass(e_atoms));
    return vals;
}

} // namespace lmpwb
