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
#include <string>
#include <vector>

#include "lmpwb/formula.hpp"
#include "lmpwb/lmp.hpp"

namespace lmpwb {

// Validity set of a formula, as an atom mask. Kernel atom-constancy makes
// every validity set measurable. LMP mode admits only the ">" modality.
inline Mask semantics(const Lmp& s, const FormulaPtr& f) {
    switch (f->kind) {
    case Formula::Kind::truth: return s.space.all_atoms();
    case Formula::Kind::conj: return semantics(s, f->lhs) & semantics(s, f->rhs);
    case Formula::Kind::diamond: {
        if (f->cmp != Cmp::gt)
            fail(errc::bad_model, "LMP semantics admits only the '>' comparator");
        int li = s.label_index(f->label);
        if (li < 0) fail(errc::unknown_label_or_state, "unknown label '" + f->label + "'");
        Mask sub = semantics(s, f->sub);
        Mask out = 0;
        for (int at = 0; at < s.space.num_atoms(); ++at)
            if (s.kernel[li][at].mass(sub) > f->q) out |= bit(at);
        return out;
    }
    }
    return 0;
}

// All distinct sets {s : tau_a(s, A) > r}, one per label and critical r.
// Only attained kernel masses can change a threshold set, so the critical
// candidates decide every r in [0,1] (cap) Q.
inline std::vector<Mask> threshold_sets(const Lmp& s, Mask a_atoms) {
    std::vector<Mask> out;
    for (int li = 0; li < s.num_labels(); ++li) {
        std::vector<Rational> vals;
        for (int at = 0; at < s.space.num_atoms(); ++at)
            vals.push_back(s.kernel[li][at].mass(a_atoms));
        for (const auto& r : critical_thresholds(vals)) {
            if (r < 0 || r > 1) continue;
            Mask t = 0;
            for (int at = 0; at < s.space.num_atoms(); ++at)
                if (s.kernel[li][at].mass(a_atoms) > r) t |= bit(at);
            out.push_back(t);
        }
    }
    return out;
}

// Stability of an arbitrary family of measurable sets: closed under all
// threshold sets.
inline bool is_stable_family(const Lmp& s, const std::vector<Mask>& family) {
    std::set<Mask> in(family.begin(), family.end());
    for (Mask a : family)
        for (Mask t : threshold_sets(s, a))
            if (!in.count(t)) return false;
    return true;
}

inline bool is_stable(const Lmp& s, const SigmaAlgebra& lambda) {
    return is_stable_family(s, lambda.members());
}

// Smallest stable sigma-algebra: least fixpoint of closing {0, S} under
// threshold sets. Equals sigma of the logic's validity sets.
inline SigmaAlgebra smallest_stable(const Lmp& s, int* iterations = nullptr) {
    SigmaAlgebra cur = trivial_algebra(s.space.num_atoms());
    int rounds = 0;
    while (true) {
        std::vector<Mask> gens = cur.blocks;
        for (Mask a : cur.members())
            for (Mask t : threshold_sets(s, a)) gens.push_back(t);
        SigmaAlgebra next = sigma_close_atoms(s.space.num_atoms(), gens);
        ++rounds;
        if (next == cur) break;
        cur = next;
    }
    if (iterations) *iterations = rounds;
    return cur;
}

// sigma of the depth-bounded validity sets, for cross-checking
// smallest_stable against the logical characterization. Within each modal
// level the collection is closed under intersection (conjunction).
inline SigmaAlgebra sigma_of_logic(const Lmp& s, int depth = 3) {
    std::set<Mask> all = {s.space.all_atoms()};
    for (int d = 0; d < depth; ++d) {
        for (bool grew = true; grew;) {
            grew = false;
            std::vector<Mask> cur(all.begin(), all.end());
            for (Mask a : cur)
                for (Mask b : cur)
                    if (all.insert(a & b).second) grew = true;
        }
        std::set<Mask> next;
        for (Mask a : all)
            for (Mask t : threshold_sets(s, a)) next.insert(t);
        all.insert(next.begin(), next.end());
    }
    return sigma_close_atoms(s.space.num_atoms(), {all.begin(), all.end()});
}

// Bounded syntactic formula enumeration, deduplicated by validity set on the
// given process; thresholds are drawn from the process's critical masses.
inline std::vector<FormulaPtr> enumerate_formulas(const Lmp& s, int depth, size_t budget = 4000) {
    std::vector<FormulaPtr> out = {f_true()};
    std::set<Mask> seen = {s.space.all_atoms()};
    for (int d = 0; d < depth && out.size() < budget; ++d) {
        size_t level_end = out.size();
        for (size_t i = 0; i < level_end && out.size() < budget; ++i)
            for (size_t j = i + 1; j < level_end && out.size() < budget; ++j) {
                FormulaPtr f = f_and(out[i], out[j]);
                if (seen.insert(semantics(s, f)).second) out.push_back(f);
            }
        level_end = out.size();
        for (size_t i = 0; i < level_end && out.size() < budget; ++i)
            for (int li = 0; li < s.num_labels(); ++li) {
                Mask sub = semantics(s, out[i]);
                std::vector<Rational> vals;
                for (int at = 0; at < s.space.num_atoms(); ++at)
                    vals.push_back(s.kernel[li][at].mass(sub));
                for (const auto& r : critical_thresholds(vals)) {
                    if (r < 0 || r > 1 || out.size() >= budget) continue;
                    FormulaPtr f = f_diamond(s.labels[li], Cmp::gt, r, out[i]);
                    if (seen.insert(semantics(s, f)).second) out.push_back(f);
                }
            }
    }
    return out;
}

// Quotient of S by a stable sub-sigma-algebra: states are the R(Lambda)
// classes (the blocks), the image sigma-algebra is the powerset, kernels
// push forward through the projection.
struct Quotient {
    Lmp lmp;
    Morphism pi;
};

inline Quotient quotient(const Lmp& s, const SigmaAlgebra& lambda) {
    if (!is_stable(s, lambda)) fail(errc::not_stable, "family is not stable");
    const int nb = lambda.num_blocks();
    std::vector<std::string> names(nb);
    std::vector<int> block_of_state(s.space.num_states());
    for (int st = 0; st < s.space.num_states(); ++st)
        block_of_state[st] = lambda.block_of_atom(s.space.atom_of[st]);
    for (int b = 0; b < nb; ++b) {
        std::vector<std::string> members;
        for (int st = 0; st < s.space.num_states(); ++st)
            if (block_of_state[st] == b) members.push_back(s.space.states[st]);
        std::sort(members.begin(), members.end());
        std::string n;
        for (const auto& m : members) n += (n.empty() ? "" : "+") + m;
        names[b] = n;
    }
    FinSpace qspace = powerset_space(names);
    std::vector<std::vector<Measure>> kernel(s.labels.size());
    for (int li = 0; li < s.num_labels(); ++li) {
        kernel[li].assign(nb, Measure(nb));
        for (int b = 0; b < nb; ++b) {
            int rep = mask_bits(lambda.blocks[b])[0];
            for (int b2 = 0; b2 < nb; ++b2)
                kernel[li][b].w[b2] = s.kernel[li][rep].mass(lambda.blocks[b2]);
            // well-definedness: every atom of the block must agree
            for (int at : mask_bits(lambda.blocks[b]))
                for (int b2 = 0; b2 < nb; ++b2)
                    if (s.kernel[li][at].mass(lambda.blocks[b2]) != kernel[li][b].w[b2])
                        fail(errc::not_stable, "quotient kernel not well defined");
        }
    }
    Quotient out;
    out.lmp = make_lmp(qspace, s.labels, std::move(kernel));
    out.pi.map = block_of_state;
    return out;
}

// Same states and kernels, sigma-algebra coarsened to the smallest stable
// one. State bisimilarity on the companion equals event bisimilarity on S.
inline Lmp event_companion(const Lmp& s) {
    SigmaAlgebra stable = smallest_stable(s);
    std::vector<Mask> atoms;
    for (Mask b : stable.blocks) atoms.push_back(s.space.states_of(b));
    FinSpace espace = make_space(s.space.states, atoms);
    const int nb = stable.num_blocks();
    std::vector<std::vector<Measure>> kernel(s.labels.size());
    for (int li = 0; li < s.num_labels(); ++li) {
        kernel[li].assign(nb, Measure(nb));
        for (int b = 0; b < nb; ++b) {
            int rep = mask_bits(stable.blocks[b])[0];
            for (int b2 = 0; b2 < nb; ++b2)
                kernel[li][b].w[b2] = s.kernel[li][rep].mass(stable.blocks[b2]);
        }
    }
    return make_lmp(espace, s.labels, std::move(kernel));
}

} // namespace lmpwb
