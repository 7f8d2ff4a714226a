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
#include <string>
#include <vector>

#include "lmpwb/measure.hpp"
#include "lmpwb/pairs.hpp"
#include "lmpwb/rel.hpp"

namespace lmpwb {

// Labelled Markov process over a finite measurable space. Kernels are stored
// per atom: validation establishes that s -> tau_a(s, A) is constant on
// atoms, which is the finite form of kernel measurability.
struct Lmp {
    FinSpace space;
    std::vector<std::string> labels;
    std::vector<std::vector<Measure>> kernel; // [label][atom]

    int num_labels() const { return static_cast<int>(labels.size()); }

    int label_index(const std::string& name) const {
        for (int a = 0; a < num_labels(); ++a)
            if (labels[a] == name) return a;
        return -1;
    }

    const Measure& tau(int label, int state) const { return kernel[label][space.atom_of[state]]; }
    Rational tau_mass(int label, int state, Mask atom_set) const {
        return tau(label, state).mass(atom_set);
    }

    // Every kernel weight that occurs, for threshold enumeration.
    std::vector<Measure> occurring_measures() const {
        std::vector<Measure> out;
        for (const auto& per_atom : kernel)
            for (const auto& m : per_atom) out.push_back(m);
        return out;
    }
};

struct PointedLmp {
    Lmp process;
    int initial_state = 0;
};

// Validates a per-state kernel table and returns the canonical per-atom
// form. Labels are sorted so equal label sets compare equal.
inline Lmp validate_lmp(const FinSpace& space, std::vector<std::string> labels,
                        const std::vector<std::vector<Measure>>& per_state) {
    std::vector<int> order(labels.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
    for (size_t i = 1; i < order.size(); ++i)
        if (labels[order[i - 1]] == labels[order[i]])
            fail(errc::bad_model, "duplicate label '" + labels[order[i]] + "'");
    if (per_state.size() != labels.size())
        fail(errc::unknown_label_or_state, "kernel table has wrong label count");

    Lmp out;
    out.space = space;
    for (int a : order) out.labels.push_back(labels[a]);
    out.kernel.resize(labels.size());
    for (size_t li = 0; li < order.size(); ++li) {
        const auto& rows = per_state[order[li]];
        if (static_cast<int>(rows.size()) != space.num_states())
            fail(errc::unknown_label_or_state, "kernel row count differs from state count");
        for (const auto& m : rows) {
            if (m.num_atoms() != space.num_atoms())
                fail(errc::unknown_label_or_state, "measure arity differs from atom count");
            check_subprobability(m);
        }
        auto& per_atom = out.kernel[li];
        per_atom.assign(space.num_atoms(), Measure(space.num_atoms()));
        for (int at = 0; at < space.num_atoms(); ++at) {
            const auto idx = mask_bits(space.atoms[at]);
            per_atom[at] = rows[idx[0]];
            for (int s : idx)
                if (!(rows[s] == per_atom[at]))
                    fail(errc::non_measurable_kernel,
                         "label '" + out.labels[li] + "': states '" + space.states[idx[0]] +
                             "' and '" + space.states[s] + "' share an atom but differ");
        }
    }
    return out;
}

// Convenience for building from per-atom data that is already known valid.
inline Lmp make_lmp(const FinSpace& space, std::vector<std::string> labels,
                    std::vector<std::vector<Measure>> per_atom_kernel) {
    std::vector<std::vector<Measure>> per_state(labels.size());
    for (size_t li = 0; li < labels.size(); ++li) {
        per_state[li].resize(space.num_states(), Measure(space.num_atoms()));
        for (int s = 0; s < space.num_states(); ++s)
            per_state[li][s] = per_atom_kernel[li][space.atom_of[s]];
    }
    return validate_lmp(space, std::move(labels), per_state);
}

// Total map between the state sets of two processes.
struct Morphism {
    std::vector<int> map; // source state index -> target state index

    int operator()(int s) const { return map[s]; }

    bool is_surjective(int target_states) const {
        Mask hit = 0;
        for (int t : map) hit |= bit(t);
        return hit == full_mask(target_states);
    }

    Mask preimage_states(const FinSpace& target, Mask target_atoms) const {
        Mask ts = target.states_of(target_atoms);
        Mask out = 0;
        for (size_t s = 0; s < map.size(); ++s)
            if (has_bit(ts, map[s])) out |= bit(static_cast<int>(s));
        return out;
    }
};

struct ZigzagWitness {
    std::string label; // empty when the failure is measurability
    int state = -1;
    Mask target_atoms = 0;
    std::string describe(const Lmp& src, const Lmp& dst) const;
};

struct ZigzagResult {
    bool ok = false;
    std::optional<ZigzagWitness> witness;
};

// Zigzag check: f measurable and tau_a(s, f^-1[B]) = tau'_a(f(s), B) for all
// a, s and measurable B. Both sides are additive in B, so the target atoms
// decide the identity; witnesses are therefore single target atoms.
inline ZigzagResult check_zigzag(const Lmp& src, const Lmp& dst, const Morphism& f) {
    if (src.labels != dst.labels) fail(errc::label_mismatch, "zigzag needs equal label sets");
    if (static_cast<int>(f.map.size()) != src.space.num_states())
        fail(errc::bad_model, "morphism is not total");
    for (int t : f.map)
        if (t < 0 || t >= dst.space.num_states()) fail(errc::bad_model, "morphism leaves the target");

    for (int b = 0; b < dst.space.num_atoms(); ++b) {
        Mask pre = f.preimage_states(dst.space, bit(b));
        if (!src.space.measurable(pre))
            return {false, ZigzagWitness{"", -1, bit(b)}};
    }
    for (int li = 0; li < src.num_labels(); ++li)
        for (int s = 0; s < src.space.num_states(); ++s)
            for (int b = 0; b < dst.space.num_atoms(); ++b) {
                Mask pre_atoms = src.space.atoms_of(f.preimage_states(dst.space, bit(b)));
                if (src.tau_mass(li, s, pre_atoms) != dst.tau_mass(li, f(s), bit(b)))
                    return {false, ZigzagWitness{src.labels[li], s, bit(b)}};
            }
    return {true, std::nullopt};
}

inline std::string ZigzagWitness::describe(const Lmp& src, const Lmp& dst) const {
    if (label.empty())
        return "preimage of target atom " + std::to_string(mask_bits(target_atoms)[0]) +
               " is not measurable";
    std::string b = "{";
    for (int i : mask_bits(dst.space.states_of(target_atoms))) {
        if (b.size() > 1) b += ",";
        b += dst.space.states[i];
    }
    b += "}";
    return "(" + label + ", " + src.space.states[state] + ", " + b + ")";
}

// Direct sum of two processes with the same label set.
struct LmpSum {
    Lmp lmp;
    SumSpace sum;
    Morphism inl, inr; // the inclusion zigzags
};

inline LmpSum direct_sum(const Lmp& left, const Lmp& right) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "direct sum needs equal label sets");
    LmpSum out;
    out.sum = sum_space(left.space, right.space);
    const int la = left.space.num_atoms();
    const int na = out.sum.space.num_atoms();
    std::vector<std::vector<Measure>> kernel(left.labels.size());
    for (size_t li = 0; li < left.labels.size(); ++li) {
        kernel[li].assign(na, Measure(na));
        for (int at = 0; at < la; ++at)
            for (int k = 0; k < la; ++k) kernel[li][at].w[k] = left.kernel[li][at].w[k];
        for (int at = 0; at < right.space.num_atoms(); ++at)
            for (int k = 0; k < right.space.num_atoms(); ++k)
                kernel[li][la + at].w[la + k] = right.kernel[li][at].w[k];
    }
    out.lmp = make_lmp(out.sum.space, left.labels, std::move(kernel));
    out.inl.map.resize(left.space.num_states());
    for (int s = 0; s < left.space.num_states(); ++s) out.inl.map[s] = out.sum.inl_state(s);
    out.inr.map.resize(right.space.num_states());
    for (int s = 0; s < right.space.num_states(); ++s) out.inr.map[s] = out.sum.inr_state(s);
    return out;
}

// Sub-LMP on a measurable B whose complement is never reached from B.
inline Lmp restrict_sublmp(const Lmp& s, Mask b_atoms) {
    const Mask out_atoms = s.space.all_atoms() & ~b_atoms;
    for (int li = 0; li < s.num_labels(); ++li)
        for (int st = 0; st < s.space.num_states(); ++st) {
            if (!has_bit(b_atoms, s.space.atom_of[st])) continue;
            if (s.tau_mass(li, st, out_atoms) != 0)
                fail(errc::leakage_outside_b, "(" + s.space.states[st] + ", " + s.labels[li] + ")");
        }
    RestrictedSpace rs = restrict_space(s.space, b_atoms);
    std::vector<std::vector<Measure>> kernel(s.labels.size());
    for (int li = 0; li < s.num_labels(); ++li) {
        kernel[li].assign(rs.space.num_atoms(), Measure(rs.space.num_atoms()));
        for (int at = 0; at < s.space.num_atoms(); ++at) {
            if (rs.atom_map[at] < 0) continue;
            for (int k = 0; k < s.space.num_atoms(); ++k)
                if (rs.atom_map[k] >= 0)
                    kernel[li][rs.atom_map[at]].w[rs.atom_map[k]] = s.kernel[li][at].w[k];
        }
    }
    return make_lmp(rs.space, s.labels, std::move(kernel));
}

} // namespace lmpwb
