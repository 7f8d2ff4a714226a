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

#include "lmpwb/linsys.hpp"
#include "lmpwb/logic.hpp"

namespace lmpwb {

struct BisimWitness {
    std::string label;
    int left_state = -1, right_state = -1;
    Mask set_a = 0, set_b = 0; // offending set (internal: set_a only) or pair, atom masks
    bool is_pair = false;
    std::string note;
};

struct BisimVerdict {
    bool holds = false;
    std::optional<BisimWitness> witness;
    std::optional<SigmaAlgebra> stable_family; // event-bisimulation certificate
    std::optional<Rel> relation;               // search-produced certificate

    static BisimVerdict yes() { return {true, std::nullopt, std::nullopt, std::nullopt}; }
    static BisimVerdict no(BisimWitness w) { return {false, std::move(w), std::nullopt, std::nullopt}; }
};

// ---------------------------------------------------------------------------
// Internal state bisimulation

// R is a state bisimulation iff related states give equal kernel mass to
// every R-closed measurable set.
inline BisimVerdict is_state_bisim(const Lmp& s, const Rel& r) {
    SigmaAlgebra sig = r_closed_sets(s.space, r);
    const std::vector<Mask> members = sig.members();
    for (auto [x, y] : r.pairs())
        for (int li = 0; li < s.num_labels(); ++li)
            for (Mask c : members)
                if (s.tau_mass(li, x, c) != s.tau_mass(li, y, c))
                    return BisimVerdict::no({s.labels[li], x, y, c, 0, false, ""});
    return BisimVerdict::yes();
}

// Greatest fixpoint of F(R) = {(s,t) : kernels agree on Sigma(R)}, starting
// from the total relation. F is monotone because Sigma(.) is antimonotone,
// so the decreasing iteration stabilizes at the union of all bisimulations.
inline Rel state_bisimilarity(const Lmp& s) {
    const int n = s.space.num_states();
    Rel r = Rel::total(n, n);
    while (true) {
        SigmaAlgebra sig = r_closed_sets(s.space, r);
        const std::vector<Mask> members = sig.members();
        Rel next(n, n);
        for (auto [x, y] : r.pairs()) {
            bool ok = true;
            for (int li = 0; li < s.num_labels() && ok; ++li)
                for (Mask c : members)
                    if (s.tau_mass(li, x, c) != s.tau_mass(li, y, c)) {
                        ok = false;
                        break;
                    }
            if (ok) next.add(x, y);
        }
        if (next == r) return r;
        r = next;
    }
}

// Test oracle: the union of all state-bisimulation equivalences, by
// exhaustive partition search. Complete because every state bisimulation is
// contained in one that is an equivalence.
inline Rel brute_oracle_state_bisimilarity(const Lmp& s) {
    const int n = s.space.num_states();
    if (n > 6) fail(errc::too_large, "oracle limited to 6 states");
    Rel out(n, n);
    for_each_partition(n, [&](const std::vector<int>& block_of) {
        Rel cand = partition_rel(block_of);
        if (is_state_bisim(s, cand).holds) out = out.unite(cand);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Event bisimulation

inline Rel event_bisimilarity(const Lmp& s) {
    return relation_of(s.space, smallest_stable(s).blocks);
}

// Searches the coarsenings of Sigma for a stable sub-sigma-algebra whose
// indistinguishability relation is exactly R.
inline BisimVerdict is_event_bisim(const Lmp& s, const Rel& r) {
    const int na = s.space.num_atoms();
    if (na > 10) fail(errc::too_large, "event-bisimulation search limited to 10 atoms");
    BisimVerdict out;
    out.holds = false;
    for_each_partition(na, [&](const std::vector<int>& block_of) {
        SigmaAlgebra cand;
        int nb = 0;
        for (int b : block_of) nb = std::max(nb, b + 1);
        cand.blocks.assign(nb, 0);
        for (int at = 0; at < na; ++at) cand.blocks[block_of[at]] |= bit(at);
        if (!(relation_of(s.space, cand.blocks) == r)) return true;
        if (!is_stable(s, cand)) return true;
        out.holds = true;
        out.stable_family = cand;
        return false;
    });
    if (!out.holds)
        out.witness = BisimWitness{"", -1, -1, 0, 0, false, "no stable family induces R"};
    return out;
}

// ---------------------------------------------------------------------------
// External (x-) bisimulation

inline BisimVerdict is_ext_bisim(const Lmp& left, const Lmp& right, const Rel& r) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "external check needs equal labels");
    PairFamily family = closed_pairs(left.space, right.space, r);
    for (auto [x, y] : r.pairs())
        for (int li = 0; li < left.num_labels(); ++li)
            for (const auto& [q, q2] : family.pairs)
                if (left.tau_mass(li, x, q) != right.tau_mass(li, y, q2))
                    return BisimVerdict::no({left.labels[li], x, y, q, q2, true, ""});
    return BisimVerdict::yes();
}

inline Rel ext_bisimilarity(const Lmp& left, const Lmp& right) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "external check needs equal labels");
    Rel r = Rel::total(left.space.num_states(), right.space.num_states());
    while (true) {
        PairFamily family = closed_pairs(left.space, right.space, r);
        Rel next(r.n_left, r.n_right);
        for (auto [x, y] : r.pairs()) {
            bool ok = true;
            for (int li = 0; li < left.num_labels() && ok; ++li)
                for (const auto& [q, q2] : family.pairs)
                    if (left.tau_mass(li, x, q) != right.tau_mass(li, y, q2)) {
                        ok = false;
                        break;
                    }
            if (ok) next.add(x, y);
        }
        if (next == r) return r;
        r = next;
    }
}

inline Rel graph_rel(const Morphism& f, int target_states) {
    Rel r(static_cast<int>(f.map.size()), target_states);
    for (size_t s = 0; s < f.map.size(); ++s) r.add(static_cast<int>(s), f.map[s]);
    return r;
}

// ---------------------------------------------------------------------------
// oplus-bisimulation (equivalences on the sum constraining cross pairs only)

inline BisimVerdict is_oplus_bisim(const Lmp& left, const Lmp& right, const Rel& r) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "oplus check needs equal labels");
    SumSpace sum = sum_space(left.space, right.space);
    if (r.n_left != sum.space.num_states() || r.n_right != sum.space.num_states())
        fail(errc::bad_model, "relation does not live on the sum");
    if (!r.is_equivalence()) fail(errc::not_equivalence, "oplus-bisimulations are equivalences");
    SigmaAlgebra sig = r_closed_sets(sum.space, r);
    for (Mask c : sig.members()) {
        Mask a = sum.left_part_atoms(c), b = sum.right_part_atoms(c);
        for (int x = 0; x < sum.left_states; ++x)
            for (int y = 0; y < sum.right_states; ++y) {
                if (!r.contains(sum.inl_state(x), sum.inr_state(y))) continue;
                for (int li = 0; li < left.num_labels(); ++li)
                    if (left.tau_mass(li, x, a) != right.tau_mass(li, y, b))
                        return BisimVerdict::no({left.labels[li], sum.inl_state(x),
                                                 sum.inr_state(y), a, b, true, ""});
            }
    }
    return BisimVerdict::yes();
}

namespace detail {

// Cross-pair kernel agreement checked on the blocks of Sigma(R) only; by
// finite additivity this is equivalent to agreement on every member. The
// final candidate is re-checked with the plain enumerating checker.
inline bool oplus_condition_blocks(const Lmp& left, const Lmp& right, const SumSpace& sum,
                                   const Rel& r) {
    SigmaAlgebra sig = r_closed_sets(sum.space, r);
    for (int x = 0; x < sum.left_states; ++x)
        for (int y = 0; y < sum.right_states; ++y) {
            if (!r.contains(sum.inl_state(x), sum.inr_state(y))) continue;
            for (const Mask blk : sig.blocks) {
                Mask a = sum.left_part_atoms(blk), b = sum.right_part_atoms(blk);
                for (int li = 0; li < left.num_labels(); ++li)
                    if (left.tau_mass(li, x, a) != right.tau_mass(li, y, b)) return false;
            }
        }
    return true;
}

} // namespace detail

// Decides s ~oplus s' by exhaustive search over the equivalence relations on
// S (+) S' that merge inl(s) and inr(s'): partitions are enumerated with the
// target pair treated as one element.
inline BisimVerdict oplus_bisimilar(const Lmp& left, const Lmp& right, int s, int s2) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "oplus search needs equal labels");
    SumSpace sum = sum_space(left.space, right.space);
    const int n = sum.space.num_states();
    if (n > 12) fail(errc::too_large, "oplus search limited to 12 sum states");
    const int u = sum.inl_state(s), v = sum.inr_state(s2);
    // element order: merged {u,v} first, then the remaining sum states
    std::vector<int> elems = {u};
    for (int i = 0; i < n; ++i)
        if (i != u && i != v) elems.push_back(i);
    BisimVerdict out;
    out.holds = false;
    for_each_partition(n - 1, [&](const std::vector<int>& block_of) {
        std::vector<int> blocks(n, -1);
        for (size_t e = 0; e < elems.size(); ++e) blocks[elems[e]] = block_of[e];
        blocks[v] = block_of[0];
        Rel cand = partition_rel(blocks);
        if (!detail::oplus_condition_blocks(left, right, sum, cand)) return true;
        if (!is_oplus_bisim(left, right, cand).holds) return true; // plain re-check
        out.holds = true;
        out.relation = cand;
        return false;
    });
    if (!out.holds)
        out.witness = BisimWitness{"", s, s2, 0, 0, false, "no oplus-bisimulation merges the pair"};
    return out;
}

// ---------------------------------------------------------------------------
// vee-bisimilarity (cospans / event bisimilarity in the sum)

struct Cospan {
    Lmp apex;
    Morphism f, g;
};

// Event bisimilarity of the direct sum, restricted to cross pairs.
inline Rel vee_bisimilarity(const Lmp& left, const Lmp& right) {
    LmpSum sum = direct_sum(left, right);
    Rel event_in_sum = event_bisimilarity(sum.lmp);
    return descend(sum.sum, event_in_sum);
}

// Cospan of zigzags through the quotient of the sum by its smallest stable
// sigma-algebra; exists exactly for vee-bisimilar pairs.
inline std::optional<Cospan> make_cospan_witness(const Lmp& left, const Lmp& right, int s, int s2) {
    LmpSum sum = direct_sum(left, right);
    SigmaAlgebra stable = smallest_stable(sum.lmp);
    Rel event_in_sum = relation_of(sum.sum.space, stable.blocks);
    if (!event_in_sum.contains(sum.sum.inl_state(s), sum.sum.inr_state(s2))) return std::nullopt;
    Quotient q = quotient(sum.lmp, stable);
    Cospan out;
    out.apex = q.lmp;
    out.f.map.resize(left.space.num_states());
    for (int i = 0; i < left.space.num_states(); ++i) out.f.map[i] = q.pi(sum.sum.inl_state(i));
    out.g.map.resize(right.space.num_states());
    for (int i = 0; i < right.space.num_states(); ++i) out.g.map[i] = q.pi(sum.sum.inr_state(i));
    return out;
}

struct CospanVerdict {
    BisimVerdict verdict;
    bool surjective = false; // reported, not required
};

inline CospanVerdict is_cospan(const Lmp& left, const Lmp& right, const Cospan& c, int s, int s2) {
    CospanVerdict out;
    ZigzagResult zf = check_zigzag(left, c.apex, c.f);
    if (!zf.ok) {
        out.verdict = BisimVerdict::no({"", s, s2, 0, 0, false,
                                        "left map not zigzag: " + zf.witness->describe(left, c.apex)});
        return out;
    }
    ZigzagResult zg = check_zigzag(right, c.apex, c.g);
    if (!zg.ok) {
        out.verdict = BisimVerdict::no({"", s, s2, 0, 0, false,
                                        "right map not zigzag: " + zg.witness->describe(right, c.apex)});
        return out;
    }
    out.surjective = c.f.is_surjective(c.apex.space.num_states()) &&
                     c.g.is_surjective(c.apex.space.num_states());
    if (c.f(s) != c.g(s2)) {
        out.verdict = BisimVerdict::no({"", s, s2, 0, 0, false, "maps do not identify the pair"});
        return out;
    }
    out.verdict = BisimVerdict::yes();
    return out;
}

struct SpanVerdict {
    BisimVerdict verdict;
    Rel image;                  // (f x g)[W]
    BisimVerdict image_is_ext;  // must hold when the span is valid
};

inline SpanVerdict is_span(const Lmp& left, const Lmp& right, const Lmp& apex, const Morphism& f,
                           const Morphism& g) {
    SpanVerdict out;
    out.image = Rel(left.space.num_states(), right.space.num_states());
    ZigzagResult zf = check_zigzag(apex, left, f);
    if (!zf.ok) {
        out.verdict = BisimVerdict::no(
            {"", -1, -1, 0, 0, false, "left leg not zigzag: " + zf.witness->describe(apex, left)});
        return out;
    }
    ZigzagResult zg = check_zigzag(apex, right, g);
    if (!zg.ok) {
        out.verdict = BisimVerdict::no(
            {"", -1, -1, 0, 0, false, "right leg not zigzag: " + zg.witness->describe(apex, right)});
        return out;
    }
    for (int w = 0; w < apex.space.num_states(); ++w) out.image.add(f(w), g(w));
    out.verdict = BisimVerdict::yes();
    out.image_is_ext = is_ext_bisim(left, right, out.image);
    return out;
}

// ---------------------------------------------------------------------------
// Coalgebraic (Delta-) bisimulation via exact couplings

struct TraceAtom {
    int left_atom = 0, right_atom = 0; // atom rectangle
    std::vector<std::pair<int, int>> cells; // the R-pairs inside it
};

// The trace of the product sigma-algebra on R: nonempty intersections of R
// with atom rectangles.
inline std::vector<TraceAtom> trace_atoms(const FinSpace& left, const FinSpace& right, const Rel& r) {
    std::vector<TraceAtom> out;
    for (int i = 0; i < left.num_atoms(); ++i)
        for (int j = 0; j < right.num_atoms(); ++j) {
            TraceAtom t{i, j, {}};
            for (auto [x, y] : r.pairs())
                if (left.atom_of[x] == i && right.atom_of[y] == j) t.cells.emplace_back(x, y);
            if (!t.cells.empty()) out.push_back(std::move(t));
        }
    return out;
}

struct DeltaVerdict {
    bool holds = false;
    // couplings[label][trace atom index] = measure over trace atoms
    std::vector<std::vector<std::vector<Rational>>> couplings;
    std::optional<std::pair<int, std::string>> infeasible; // trace atom index, label
};

// R carries the trace sigma-algebra; the coalgebra structure assigns to each
// trace atom and label one measure on R whose marginals match the kernels of
// every pair in the atom. Kernel atom-constancy collapses those constraints
// to one transportation system per (trace atom, label), solved exactly.
inline DeltaVerdict is_delta_bisim(const Lmp& left, const Lmp& right, const Rel& r) {
    if (left.labels != right.labels) fail(errc::label_mismatch, "delta check needs equal labels");
    std::vector<TraceAtom> atoms = trace_atoms(left.space, right.space, r);
    const int nt = static_cast<int>(atoms.size());
    DeltaVerdict out;
    out.holds = true;
    out.couplings.assign(left.num_labels(), {});
    for (int li = 0; li < left.num_labels(); ++li) out.couplings[li].assign(nt, {});
    for (int li = 0; li < left.num_labels(); ++li)
        for (int t = 0; t < nt; ++t) {
            const auto [sx, sy] = atoms[t].cells.front();
            LinSystem sys;
            sys.num_vars = nt;
            for (int k = 0; k < left.space.num_atoms(); ++k) {
                std::vector<Rational> row(nt, Rational(0));
                for (int v = 0; v < nt; ++v)
                    if (atoms[v].left_atom == k) row[v] = 1;
                sys.add_equation(std::move(row), left.tau_mass(li, sx, bit(k)));
            }
            for (int k = 0; k < right.space.num_atoms(); ++k) {
                std::vector<Rational> row(nt, Rational(0));
                for (int v = 0; v < nt; ++v)
                    if (atoms[v].right_atom == k) row[v] = 1;
                sys.add_equation(std::move(row), right.tau_mass(li, sy, bit(k)));
            }
            auto sol = feasible(sys);
            if (!sol) {
                out.holds = false;
                out.infeasible = {t, left.labels[li]};
                return out;
            }
            out.couplings[li][t] = *sol;
        }
    return out;
}

// Largest certified sub-relation of ext-bisimilarity: drop the pairs of
// every infeasible trace atom and retry. The result passes is_delta_bisim;
// `exact` marks whether it is known to be the full Delta-bisimilarity
// (trivially so when nothing was dropped).
struct DeltaCertificate {
    Rel rel;
    bool exact = false;
};

inline DeltaCertificate delta_certify(const Lmp& left, const Lmp& right) {
    Rel r = ext_bisimilarity(left, right);
    bool dropped = false;
    while (true) {
        if (r.is_empty()) break;
        DeltaVerdict v = is_delta_bisim(left, right, r);
        if (v.holds) break;
        dropped = true;
        std::vector<TraceAtom> atoms = trace_atoms(left.space, right.space, r);
        for (auto [x, y] : atoms[v.infeasible->first].cells) r.remove(x, y);
    }
    return {r, !dropped};
}

// Exact decision on small instances: some Delta-bisimulation relates (s,s')
// iff some subset of ext-bisimilarity containing the pair passes the
// coupling check (every Delta-bisimulation is an ext-bisimulation).
inline std::optional<bool> delta_bisimilar_exact(const Lmp& left, const Lmp& right, int s, int s2,
                                                 int budget_bits = 16) {
    Rel top = ext_bisimilarity(left, right);
    if (!top.contains(s, s2)) return false;
    auto all = top.pairs();
    int free = static_cast<int>(all.size()) - 1;
    if (free > budget_bits) return std::nullopt;
    for (Mask pick = 0; pick < (Mask{1} << free); ++pick) {
        Rel cand(top.n_left, top.n_right);
        cand.add(s, s2);
        int b = 0;
        for (auto [x, y] : all) {
            if (x == s && y == s2) continue;
            if (has_bit(pick, b)) cand.add(x, y);
            ++b;
        }
        if (is_delta_bisim(left, right, cand).holds) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Monic spans

// The relation LMP induced by a monic span, with the final sigma-algebra
// with respect to f x g and the pushed-forward kernels.
struct RelationLmp {
    Lmp lmp;
    Morphism proj_left, proj_right;
};

inline RelationLmp monic_span_lmp(const Lmp& left, const Lmp& right, const Lmp& apex,
                                  const Morphism& f, const Morphism& g) {
    if (!check_zigzag(apex, left, f).ok) fail(errc::not_zigzag, "left leg");
    if (!check_zigzag(apex, right, g).ok) fail(errc::not_zigzag, "right leg");
    const int n = apex.space.num_states();
    std::vector<std::pair<int, int>> image(n);
    for (int t = 0; t < n; ++t) {
        image[t] = {f(t), g(t)};
        for (int t2 = 0; t2 < t; ++t2)
            if (image[t2] == image[t]) fail(errc::not_injective, "f x g is not injective");
    }
    std::vector<std::string> names(n);
    for (int t = 0; t < n; ++t)
        names[t] = "(" + left.space.states[f(t)] + "," + right.space.states[g(t)] + ")";
    std::vector<Mask> atoms;
    for (Mask a : apex.space.atoms) atoms.push_back(a); // image of each apex atom, same indices
    FinSpace rspace = make_space(names, atoms);
    std::vector<std::vector<Measure>> kernel(apex.labels.size());
    for (int li = 0; li < apex.num_labels(); ++li) kernel[li] = apex.kernel[li];
    RelationLmp out;
    out.lmp = make_lmp(rspace, apex.labels, std::move(kernel));
    out.proj_left.map.resize(n);
    out.proj_right.map.resize(n);
    for (int t = 0; t < n; ++t) {
        out.proj_left.map[t] = image[t].first;
        out.proj_right.map[t] = image[t].second;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Greatest stable subalgebras and V-finality

struct StableSearch {
    std::vector<SigmaAlgebra> maximal;
    std::optional<SigmaAlgebra> greatest;
};

// All inclusion-maximal stable sub-sigma-algebras of Sigma0, and the
// greatest one when it exists (every stable subalgebra sits below some
// maximal one, so a unique maximal is greatest).
inline StableSearch greatest_stable_within(const Lmp& s, const SigmaAlgebra& sigma0) {
    const int nb = sigma0.num_blocks();
    if (nb > 10) fail(errc::too_large, "stable-subalgebra search limited to 10 atoms");
    std::vector<SigmaAlgebra> stable;
    for_each_partition(nb, [&](const std::vector<int>& block_of) {
        SigmaAlgebra cand;
        int k = 0;
        for (int b : block_of) k = std::max(k, b + 1);
        cand.blocks.assign(k, 0);
        for (int i = 0; i < nb; ++i) cand.blocks[block_of[i]] |= sigma0.blocks[i];
        if (is_stable(s, cand)) stable.push_back(cand);
        return true;
    });
    StableSearch out;
    for (const auto& a : stable) {
        bool maximal = true;
        for (const auto& b : stable)
            if (!(a == b) && b.contains_algebra(a)) {
                maximal = false;
                break;
            }
        if (maximal) out.maximal.push_back(a);
    }
    if (out.maximal.size() == 1) out.greatest = out.maximal.front();
    return out;
}

// V-finality of a surjective zigzag: the preimage algebra must be the
// greatest stable sub-sigma-algebra of Sigma(ker pi).
inline bool v_final_check(const Lmp& src, const Lmp& dst, const Morphism& pi) {
    if (!pi.is_surjective(dst.space.num_states())) fail(errc::not_surjective, "projection");
    if (!check_zigzag(src, dst, pi).ok) fail(errc::not_zigzag, "projection");
    Rel kernel(src.space.num_states(), src.space.num_states());
    for (int x = 0; x < src.space.num_states(); ++x)
        for (int y = 0; y < src.space.num_states(); ++y)
            if (pi(x) == pi(y)) kernel.add(x, y);
    SigmaAlgebra lambda;
    for (int b = 0; b < dst.space.num_atoms(); ++b)
        lambda.blocks.push_back(src.space.atoms_of(pi.preimage_states(dst.space, bit(b))));
    StableSearch search = greatest_stable_within(src, r_closed_sets(src.space, kernel));
    return search.greatest.has_value() && *search.greatest == lambda;
}

// ---------------------------------------------------------------------------
// Panangaden's oplus_P-bisimilarity

struct OplusPWitness {
    Lmp w;      // auxiliary summand: the event companion of the sum
    Rel rel;    // state-bisimulation equivalence on (S (+) S') (+) W
    int tagged_left = -1, tagged_right = -1; // the related tagged states
};

struct OplusPVerdict {
    bool holds = false;
    std::optional<OplusPWitness> witness;
};

// Decided through the equivalence with vee-bisimilarity; positive answers
// come with the explicit state bisimulation on (S (+) S') (+) W, W the event
// companion of the sum, re-verified by is_state_bisim.
inline OplusPVerdict oplus_P_bisimilar(const Lmp& left, const Lmp& right, int s, int s2) {
    LmpSum sum = direct_sum(left, right);
    SigmaAlgebra stable = smallest_stable(sum.lmp);
    Rel event_in_sum = relation_of(sum.sum.space, stable.blocks);
    OplusPVerdict out;
    if (!event_in_sum.contains(sum.sum.inl_state(s), sum.sum.inr_state(s2))) return out;
    Lmp w = event_companion(sum.lmp);
    LmpSum big = direct_sum(sum.lmp, w);
    const int nt = sum.sum.space.num_states();
    const int n = big.sum.space.num_states();
    Rel rel(n, n);
    auto cls = [&](int u) { return u < nt ? u : u - nt; }; // both summands carry the same states
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (event_in_sum.contains(cls(u), cls(v))) rel.add(u, v);
    BisimVerdict check = is_state_bisim(big.lmp, rel);
    if (!check.holds) fail(errc::bad_model, "oplus_P witness failed re-verification");
    out.holds = true;
    out.witness = OplusPWitness{w, rel, big.sum.inl_state(sum.sum.inl_state(s)),
                                big.sum.inl_state(sum.sum.inr_state(s2))};
    if (!rel.contains(out.witness->tagged_left, out.witness->tagged_right))
        fail(errc::bad_model, "oplus_P witness does not relate the pair");
    return out;
}

} // namespace lmpwb
