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
#include <vector>

#include "lmpwb/logic.hpp"

namespace lmpwb {

// Image-finite nondeterministic LMP: each state and label carries a finite
// set of subprobability measures. Transition sets are stored per atom;
// validation establishes hit-measurability, whose finite form is that states
// sharing an atom have identical transition sets (distinct measures on a
// finite space are always separated by some measurable hit set). An empty
// transition set differs from {zero measure}; both are representable.
struct Nlmp {
    FinSpace space;
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<Measure>>> trans; // [label][atom] -> sorted, deduped

    int num_labels() const { return static_cast<int>(labels.size()); }

    int label_index(const std::string& name) const {
        for (int a = 0; a < num_labels(); ++a)
            if (labels[a] == name) return a;
        return -1;
    }

    const std::vector<Measure>& tset(int label, int state) const {
        return trans[label][space.atom_of[state]];
    }

    // All measures occurring in transition sets, sorted and deduplicated:
    // the universe every hit test interrogates.
    std::vector<Measure> universe() const {
        std::vector<Measure> out;
        for (const auto& per_atom : trans)
            for (const auto& ts : per_atom) out.insert(out.end(), ts.begin(), ts.end());
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

inline std::vector<Measure> canonical_tset(std::vector<Measure> ts) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    return ts;
}

inline Nlmp validate_nlmp(const FinSpace& space, std::vector<std::string> labels,
                          const std::vector<std::vector<std::vector<Measure>>>& per_state) {
    std::vector<int> order(labels.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return labels[a] < labels[b]; });
    for (size_t i = 1; i < order.size(); ++i)
        if (labels[order[i - 1]] == labels[order[i]])
            fail(errc::bad_model, "duplicate label '" + labels[order[i]] + "'");
    if (per_state.size() != labels.size())
        fail(errc::unknown_label_or_state, "transition table has wrong label count");

    Nlmp out;
    out.space = space;
    for (int a : order) out.labels.push_back(labels[a]);
    out.trans.resize(labels.size());
    for (size_t li = 0; li < order.size(); ++li) {
        const auto& rows = per_state[order[li]];
        if (static_cast<int>(rows.size()) != space.num_states())
            fail(errc::unknown_label_or_state, "transition row count differs from state count");
        for (const auto& ts : rows)
            for (const auto& m : ts) {
                if (m.num_atoms() != space.num_atoms())
                    fail(errc::unknown_label_or_state, "measure arity differs from atom count");
                check_subprobability(m);
            }
        auto& per_atom = out.trans[li];
        per_atom.resize(space.num_atoms());
        for (int at = 0; at < space.num_atoms(); ++at) {
            const auto idx = mask_bits(space.atoms[at]);
            per_atom[at] = canonical_tset(rows[idx[0]]);
            for (int s : idx)
                if (canonical_tset(rows[s]) != per_atom[at])
                    fail(errc::non_measurable_transition,
                         "label '" + out.labels[li] + "': states '" + space.states[idx[0]] +
                             "' and '" + space.states[s] +
                             "' share an atom but hit different measure classes");
        }
    }
    return out;
}

// An LMP is an NLMP with singleton transition sets; zero kernels embed as
// {zero measure}, not as refusal.
inline Nlmp embed_lmp(const Lmp& s) {
    std::vector<std::vector<std::vector<Measure>>> per_state(s.labels.size());
    for (int li = 0; li < s.num_labels(); ++li) {
        per_state[li].resize(s.space.num_states());
        for (int st = 0; st < s.space.num_states(); ++st)
            per_state[li][st] = {s.tau(li, st)};
    }
    return validate_nlmp(s.space, s.labels, per_state);
}

// Validity sets over NLMP: the modality holds when some enabled measure
// satisfies the comparison.
inline Mask nlmp_semantics(const Nlmp& n, const FormulaPtr& f) {
    switch (f->kind) {
    case Formula::Kind::truth: return n.space.all_atoms();
    case Formula::Kind::conj: return nlmp_semantics(n, f->lhs) & nlmp_semantics(n, f->rhs);
    case Formula::Kind::diamond: {
        int li = n.label_index(f->label);
        if (li < 0) fail(errc::unknown_label_or_state, "unknown label '" + f->label + "'");
        Mask sub = nlmp_semantics(n, f->sub);
        Mask out = 0;
        for (int at = 0; at < n.space.num_atoms(); ++at)
            for (const auto& m : n.trans[li][at])
                if (cmp_holds(m.mass(sub), f->cmp, f->q)) {
                    out |= bit(at);
                    break;
                }
        return out;
    }
    }
    return 0;
}

} // namespace lmpwb
