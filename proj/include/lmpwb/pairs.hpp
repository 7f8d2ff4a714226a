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

#include <set>
#include <utility>
#include <vector>

#include "lmpwb/measure.hpp"
#include "lmpwb/rel.hpp"

namespace lmpwb {

// Family of set pairs. Coordinates are masks over two (possibly different)
// index spaces: sigma-algebra atoms for closed-pair families, measure-universe
// indices for Delta traces. `bi_sigma_closed` records whether the family is a
// nonempty family closed under coordinatewise complement and unions; the
// closure of the empty family stays empty with the flag unset.
struct PairFamily {
    std::set<std::pair<Mask, Mask>> pairs;
    bool bi_sigma_closed = false;

    bool contains(Mask a, Mask b) const { return pairs.count({a, b}) > 0; }
    size_t size() const { return pairs.size(); }

    std::vector<Mask> project_left() const {
        std::set<Mask> out;
        for (const auto& [a, b] : pairs) out.insert(a);
        return {out.begin(), out.end()};
    }
    std::vector<Mask> project_right() const {
        std::set<Mask> out;
        for (const auto& [a, b] : pairs) out.insert(b);
        return {out.begin(), out.end()};
    }
};

// R-closed pair test on state masks: R never crosses the boundary, i.e.
// every related pair is in both sets or in neither.
inline bool is_r_closed_pair_states(const Rel& r, Mask a_states, Mask b_states) {
    for (int i = 0; i < r.n_left; ++i) {
        bool in_a = has_bit(a_states, i);
        Mask row = r.rows[i];
        if (in_a ? (row & ~b_states) : (row & b_states)) return false;
    }
    return true;
}

inline bool is_r_closed_pair(const FinSpace& left, const FinSpace& right, const Rel& r,
                             Mask a_atoms, Mask b_atoms) {
    return is_r_closed_pair_states(r, left.states_of(a_atoms), right.states_of(b_atoms));
}

// Sigma^x(R): all measurable R-closed pairs, by plain enumeration. Always a
// bi-sigma-algebra.
inline PairFamily closed_pairs(const FinSpace& left, const FinSpace& right, const Rel& r) {
    require_enumerable(left.num_atoms() + right.num_atoms(), 24, "closed-pair enumeration");
    PairFamily out;
    out.bi_sigma_closed = true;
    const Mask la = left.all_atoms(), ra = right.all_atoms();
    // Precompute state views per atom mask on the smaller side of the loop.
    for (Mask a = 0;; ++a) {
        Mask a_states = left.states_of(a);
        for (Mask b = 0;; ++b) {
            if (is_r_closed_pair_states(r, a_states, right.states_of(b))) out.pairs.insert({a, b});
            if (b == ra) break;
        }
        if (a == la) break;
    }
    return out;
}

// sigma^x(D): least family containing D closed under coordinatewise
// complement and (finite = countable here) unions.
inline PairFamily bi_sigma_close(int left_bits, int right_bits, const PairFamily& d,
                                 size_t budget = 1 << 20) {
    PairFamily out;
    if (d.pairs.empty()) return out; // degenerate: flag stays unset
    const Mask lu = full_mask(left_bits), ru = full_mask(right_bits);
    out.pairs = d.pairs;
    std::vector<std::pair<Mask, Mask>> work(d.pairs.begin(), d.pairs.end());
    while (!work.empty()) {
        auto [a, b] = work.back();
        work.pop_back();
        auto push = [&](Mask x, Mask y) {
            if (out.pairs.insert({x, y}).second) {
                if (out.pairs.size() > budget) fail(errc::too_large, "bi-sigma closure exceeds budget");
                work.emplace_back(x, y);
            }
        };
        push(~a & lu, ~b & ru);
        for (const auto& [c, e] : out.pairs) {
            push(a | c, b | e);
        }
    }
    out.bi_sigma_closed = true;
    return out;
}

// Lifting of R to measures (internal form): agreement on every R-closed
// measurable set.
inline bool lift_measures_int(const FinSpace& space, const Rel& r, const Measure& mu,
                              const Measure& nu) {
    SigmaAlgebra sig = r_closed_sets(space, r);
    for (Mask q : sig.members())
        if (mu.mass(q) != nu.mass(q)) return false;
    return true;
}

// External lifting: agreement on every R-closed measurable pair.
inline bool lift_measures_ext_family(const PairFamily& family, const Measure& mu, const Measure& nu) {
    for (const auto& [q, q2] : family.pairs)
        if (mu.mass(q) != nu.mass(q2)) return false;
    return true;
}

inline bool lift_measures_ext(const FinSpace& left, const FinSpace& right, const Rel& r,
                              const Measure& mu, const Measure& nu) {
    return lift_measures_ext_family(closed_pairs(left, right, r), mu, nu);
}

// Trace of Delta(A) on a finite measure universe: the sigma-algebra over
// universe indices generated by the sets {mu : mu(E) < q}, E a member of A.
// Returned as the list of members.
inline std::vector<Mask> delta_trace(const std::vector<Measure>& universe,
                                     const std::vector<Mask>& family_members) {
    std::vector<Mask> generators;
    for (Mask e : family_members) {
        for (const auto& q : critical_thresholds(attained_masses(universe, e)))
            generators.push_back(delta_bowtie(universe, e, Cmp::lt, q));
    }
    SigmaAlgebra classes = sigma_close_atoms(static_cast<int>(universe.size()), generators);
    return classes.members();
}

// Trace of Delta^x(D) on two finite measure universes: bi-sigma closure of
// the generator pairs (Delta^{<q}(Q), Delta^{<q}(Q')) over critical q. The
// critical thresholds realize every distinct generator pair, since both
// coordinates change only when q crosses an attained mass.
inline PairFamily delta_times_trace(const std::vector<Measure>& universe_left,
                                    const std::vector<Measure>& universe_right,
                                    const PairFamily& d) {
    PairFamily generators;
    for (const auto& [q1, q2] : d.pairs) {
        std::vector<Rational> vals = attained_masses(universe_left, q1);
        for (const auto& v : attained_masses(universe_right, q2)) vals.push_back(v);
        for (const auto& q : critical_thresholds(vals))
            generators.pairs.insert({delta_bowtie(universe_left, q1, Cmp::lt, q),
                                     delta_bowtie(universe_right, q2, Cmp::lt, q)});
    }
    return bi_sigma_close(static_cast<int>(universe_left.size()),
                          static_cast<int>(universe_right.size()), generators);
}

} // namespace lmpwb
