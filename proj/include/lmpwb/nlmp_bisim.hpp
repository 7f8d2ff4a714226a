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

#include <map>

#include "lmpwb/bisim.hpp"
#include "lmpwb/nlmp.hpp"

namespace lmpwb {

namespace detail {

// Index of a measure inside a sorted universe.
inline int universe_index(const std::vector<Measure>& universe, const Measure& m) {
    auto it = std::lower_bound(universe.begin(), universe.end(), m);
    return static_cast<int>(it - universe.begin());
}

// Per label and atom, the universe-index mask of the transition set.
inline std::vector<std::vector<Mask>> hit_masks(const Nlmp& n, const std::vector<Measure>& universe) {
    std::vector<std::vector<Mask>> out(n.num_labels());
    for (int li = 0; li < n.num_labels(); ++li) {
        out[li].resize(n.space.num_atoms());
        for (int at = 0; at < n.space.num_atoms(); ++at) {
            Mask m = 0;
            for (const auto& mu : n.trans[li][at]) m |= bit(universe_index(universe, mu));
            out[li][at] = m;
        }
    }
    return out;
}

// Internal measure lifting against a fixed member list of Sigma(R).
inline bool lifted_int(const std::vector<Mask>& members, const Measure& mu, const Measure& nu) {
    for (Mask q : members)
        if (mu.mass(q) != nu.mass(q)) return false;
    return true;
}

inline bool zigzag_sets_int(const std::vector<Mask>& members, const std::vector<Measure>& a,
                            const std::vector<Measure>& b) {
    for (const auto& mu : a) {
        bool matched = false;
        for (const auto& nu : b)
            if (lifted_int(members, mu, nu)) {
                matched = true;
                break;
            }
        if (!matched) return false;
    }
    return true;
}

inline bool zigzag_sets_ext(const PairFamily& family, const std::vector<Measure>& a,
                            const std::vector<Measure>& b, bool left_to_right) {
    for (const auto& mu : a) {
        bool matched = false;
        for (const auto& nu : b) {
            const Measure& l = left_to_right ? mu : nu;
            const Measure& r = left_to_right ? nu : mu;
            if (lift_measures_ext_family(family, l, r)) {
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Internal notions

inline BisimVerdict is_int_state_bisim(const Nlmp& n, const Rel& r) {
    if (!r.is_symmetric()) fail(errc::not_symmetric, "state bisimulations are symmetric");
    const std::vector<Mask> members = r_closed_sets(n.space, r).members();
    for (auto [s, t] : r.pairs())
        for (int li = 0; li < n.num_labels(); ++li)
            if (!detail::zigzag_sets_int(members, n.tset(li, s), n.tset(li, t)))
                return BisimVerdict::no({n.labels[li], s, t, 0, 0, false, "unmatched measure"});
    return BisimVerdict::yes();
}

inline Rel int_state_bisimilarity(const Nlmp& n) {
    const int ns = n.space.num_states();
    Rel r = Rel::total(ns, ns);
    while (true) {
        const std::vector<Mask> members = r_closed_sets(n.space, r).members();
        Rel next(ns, ns);
        for (auto [s, t] : r.pairs()) {
            bool ok = true;
            for (int li = 0; li < n.num_labels() && ok; ++li)
                ok = detail::zigzag_sets_int(members, n.tset(li, s), n.tset(li, t)) &&
                     detail::zigzag_sets_int(members, n.tset(li, t), n.tset(li, s));
            if (ok) next.add(s, t);
        }
        if (next == r) return r;
        r = next;
    }
}

// Hit condition: the transition sets intersect the same members of the
// Delta(Sigma(R)) trace over the occurring-measure universe. For image-
// finite processes this is the same as hitting the same measure classes;
// both routes are computed and cross-checked.
inline BisimVerdict is_int_hit_bisim(const Nlmp& n, const Rel& r) {
    if (!r.is_symmetric()) fail(errc::not_symmetric, "hit bisimulations are symmetric");
    const std::vector<Measure> universe = n.universe();
    const auto masks = detail::hit_masks(n, universe);
    SigmaAlgebra sig = r_closed_sets(n.space, r);
    const std::vector<Mask> trace = delta_trace(universe, sig.members());
    const std::vector<Mask> classes = measure_classes(universe, sig.blocks);
    for (auto [s, t] : r.pairs())
        for (int li = 0; li < n.num_labels(); ++li) {
            Mask hs = masks[li][n.space.atom_of[s]], ht = masks[li][n.space.atom_of[t]];
            bool by_trace = true;
            for (Mask xi : trace)
                if (((hs & xi) != 0) != ((ht & xi) != 0)) {
                    by_trace = false;
                    break;
                }
            bool by_classes = true;
            for (Mask c : classes)
                if (((hs & c) != 0) != ((ht & c) != 0)) {
                    by_classes = false;
                    break;
                }
            if (by_trace != by_classes)
                fail(errc::bad_model, "hit criterion routes disagree");
            if (!by_trace)
                return BisimVerdict::no({n.labels[li], s, t, 0, 0, false, "hit sets differ"});
        }
    return BisimVerdict::yes();
}

inline Rel int_hit_bisimilarity(const Nlmp& n) {
    const int ns = n.space.num_states();
    const std::vector<Measure> universe = n.universe();
    const auto masks = detail::hit_masks(n, universe);
    Rel r = Rel::total(ns, ns);
    while (true) {
        SigmaAlgebra sig = r_closed_sets(n.space, r);
        const std::vector<Mask> classes = measure_classes(universe, sig.blocks);
        Rel next(ns, ns);
        for (auto [s, t] : r.pairs()) {
            bool ok = true;
            for (int li = 0; li < n.num_labels() && ok; ++li) {
                Mask hs = masks[li][n.space.atom_of[s]], ht = masks[li][n.space.atom_of[t]];
                for (Mask c : classes)
                    if (((hs & c) != 0) != ((ht & c) != 0)) {
                        ok = false;
                        break;
                    }
            }
            if (ok) next.add(s, t);
        }
        if (next == r) return r;
        r = next;
    }
}

// Event bisimulation for NLMP: Lambda such that every transition map is
// measurable from (S, Lambda) into the hit algebra over Delta(Lambda). Since
// hits distribute over unions, closing under the single measure classes of
// the occurring universe decides measurability.
inline bool is_int_event(const Nlmp& n, const SigmaAlgebra& lambda) {
    const std::vector<Measure> universe = n.universe();
    const auto masks = detail::hit_masks(n, universe);
    const std::vector<Mask> classes = measure_classes(universe, lambda.members());
    for (int li = 0; li < n.num_labels(); ++li)
        for (Mask c : classes) {
            Mask pre = 0;
            for (int at = 0; at < n.space.num_atoms(); ++at)
                if (masks[li][at] & c) pre |= bit(at);
            if (!lambda.contains(pre)) return false;
        }
    return true;
}

inline SigmaAlgebra int_event_smallest(const Nlmp& n) {
    const std::vector<Measure> universe = n.universe();
    const auto masks = detail::hit_masks(n, universe);
    SigmaAlgebra cur = trivial_algebra(n.space.num_atoms());
    while (true) {
        std::vector<Mask> gens = cur.blocks;
        for (Mask c : measure_classes(universe, cur.members()))
            for (int li = 0; li < n.num_labels(); ++li) {
                Mask pre = 0;
                for (int at = 0; at < n.space.num_atoms(); ++at)
                    if (masks[li][at] & c) pre |= bit(at);
                gens.push_back(pre);
            }
        SigmaAlgebra next = sigma_close_atoms(n.space.num_atoms(), gens);
        if (next == cur) return cur;
        cur = next;
    }
}

// ---------------------------------------------------------------------------
// External notions

inline BisimVerdict is_ext_state_bisim(const Nlmp& n, const Nlmp& n2, const Rel& r) {
    if (n.labels != n2.labels) fail(errc::label_mismatch, "external check needs equal labels");
    PairFamily family = closed_pairs(n.space, n2.space, r);
    for (auto [s, t] : r.pairs())
        for (int li = 0; li < n.num_labels(); ++li) {
            if (!detail::zigzag_sets_ext(family, n.tset(li, s), n2.tset(li, t), true))
                return BisimVerdict::no({n.labels[li], s, t, 0, 0, false, "zig fails"});
            if (!detail::zigzag_sets_ext(family, n2.tset(li, t), n.tset(li, s), false))
                return BisimVerdict::no({n.labels[li], s, t, 0, 0, false, "zag fails"});
        }
    return BisimVerdict::yes();
}

inline Rel ext_state_bisimilarity(const Nlmp& n, const Nlmp& n2) {
    if (n.labels != n2.labels) fail(errc::label_mismatch, "external check needs equal labels");
    Rel r = Rel::total(n.space.num_states(), n2.space.num_states());
    while (true) {
        PairFamily family = closed_pairs(n.space, n2.space, r);
        Rel next(r.n_left, r.n_right);
        for (auto [s, t] : r.pairs()) {
            bool ok = true;
            for (int li = 0; li < n.num_labels() && ok; ++li)
                ok = detail::zigzag_sets_ext(family, n.tset(li, s), n2.tset(li, t), true) &&
                     detail::zigzag_sets_ext(family, n2.tset(li, t), n.tset(li, s), false);
            if (ok) next.add(s, t);
        }
        if (next == r) return r;
        r = next;
    }
}

inline BisimVerdict is_ext_hit_bisim(const Nlmp& n, const Nlmp& n2, const Rel& r) {
    if (n.labels != n2.labels) fail(errc::label_mismatch, "external check needs equal labels");
    const std::vector<Measure> ul = n.universe(), ur = n2.universe();
    const auto ml = detail::hit_masks(n, ul), mr = detail::hit_masks(n2, ur);
    PairFamily trace = delta_times_trace(ul, ur, closed_pairs(n.space, n2.space, r));
    for (auto [s, t] : r.pairs())
        for (int li = 0; li < n.num_labels(); ++li) {
            Mask hs = ml[li][n.space.atom_of[s]], ht = mr[li][n2.space.atom_of[t]];
            for (const auto& [theta, theta2] : trace.pairs)
                if (((hs & theta) != 0) != ((ht & theta2) != 0))
                    return BisimVerdict::no({n.labels[li], s, t, theta, theta2, true,
                                             "hit sets differ on a trace pair"});
        }
    return BisimVerdict::yes();
}

// Separating pair of measure sets for a pair failing the ext-state zig or
// zag: one threshold conjunct per opposing measure. Also returns the
// measurable hit-preimage pair (C, C'), which is R-closed whenever R is the
// full ext-state bisimilarity.
struct SeparatingTheta {
    std::string label;
    Mask theta = 0, theta2 = 0; // masks over occurring-measure universes
    Mask c_atoms = 0, c2_atoms = 0;
};

inline SeparatingTheta separating_theta(const Nlmp& n, const Nlmp& n2, const Rel& r, int s, int t) {
    if (n.labels != n2.labels) fail(errc::label_mismatch, "external check needs equal labels");
    PairFamily family = closed_pairs(n.space, n2.space, r);
    const std::vector<Measure> ul = n.universe(), ur = n2.universe();
    const auto ml = detail::hit_masks(n, ul), mr = detail::hit_masks(n2, ur);
    for (int li = 0; li < n.num_labels(); ++li)
        for (int dir = 0; dir < 2; ++dir) {
            const bool zig = dir == 0;
            const auto& mine = zig ? n.tset(li, s) : n2.tset(li, t);
            const auto& theirs = zig ? n2.tset(li, t) : n.tset(li, s);
            for (const auto& mu : mine) {
                bool unmatched = true;
                for (const auto& nu : theirs)
                    if (lift_measures_ext_family(family, zig ? mu : nu, zig ? nu : mu)) {
                        unmatched = false;
                        break;
                    }
                if (!unmatched) continue;
                // Build the conjunction: one inequality witness per opposing measure.
                Mask theta_mine = zig ? full_mask(static_cast<int>(ul.size()))
                                      : full_mask(static_cast<int>(ur.size()));
                Mask theta_theirs = zig ? full_mask(static_cast<int>(ur.size()))
                                        : full_mask(static_cast<int>(ul.size()));
                for (const auto& nu : theirs) {
                    for (const auto& [q, q2] : family.pairs) {
                        const Rational mm = mu.mass(zig ? q : q2);
                        const Rational tm = nu.mass(zig ? q2 : q);
                        if (mm == tm) continue;
                        Cmp c = mm < tm ? Cmp::lt : Cmp::gt;
                        Rational mid = midpoint(std::min(mm, tm), std::max(mm, tm));
                        if (zig) {
                            theta_mine &= delta_bowtie(ul, q, c, mid);
                            theta_theirs &= delta_bowtie(ur, q2, c, mid);
                        } else {
                            theta_mine &= delta_bowtie(ur, q2, c, mid);
                            theta_theirs &= delta_bowtie(ul, q, c, mid);
                        }
                        break;
                    }
                }
                SeparatingTheta out;
                out.label = n.labels[li];
                out.theta = zig ? theta_mine : theta_theirs;
                out.theta2 = zig ? theta_theirs : theta_mine;
                for (int at = 0; at < n.space.num_atoms(); ++at)
                    if (ml[li][at] & out.theta) out.c_atoms |= bit(at);
                for (int at = 0; at < n2.space.num_atoms(); ++at)
                    if (mr[li][at] & out.theta2) out.c2_atoms |= bit(at);
                return out;
            }
        }
    fail(errc::pair_not_separable, "pair satisfies zig and zag");
}

// Times-stability of a family of measurable pairs: hit preimages of its
// Delta^x trace pairs stay in the family.
inline bool is_times_stable(const Nlmp& n, const Nlmp& n2, const PairFamily& c) {
    const std::vector<Measure> ul = n.universe(), ur = n2.universe();
    const auto ml = detail::hit_masks(n, ul), mr = detail::hit_masks(n2, ur);
    PairFamily trace = delta_times_trace(ul, ur, c);
    for (const auto& [theta, theta2] : trace.pairs)
        for (int li = 0; li < n.num_labels(); ++li) {
            Mask pre = 0, pre2 = 0;
            for (int at = 0; at < n.space.num_atoms(); ++at)
                if (ml[li][at] & theta) pre |= bit(at);
            for (int at = 0; at < n2.space.num_atoms(); ++at)
                if (mr[li][at] & theta2) pre2 |= bit(at);
            if (!c.contains(pre, pre2)) return false;
        }
    return true;
}

// From an external hit bisimulation to the induced external event
// bisimulation R^x(Sigma^x(R)), with its certifying family.
struct ExtEventResult {
    Rel rel;
    PairFamily family;
};

inline Rel relation_of_pairs(const FinSpace& left, const FinSpace& right, const PairFamily& d) {
    Rel r(left.num_states(), right.num_states());
    for (int s = 0; s < left.num_states(); ++s)
        for (int t = 0; t < right.num_states(); ++t) {
            bool ok = true;
            for (const auto& [q, q2] : d.pairs)
                if (has_bit(q, left.atom_of[s]) != has_bit(q2, right.atom_of[t])) {
                    ok = false;
                    break;
                }
            if (ok) r.add(s, t);
        }
    return r;
}

inline ExtEventResult ext_event_from_hit(const Nlmp& n, const Nlmp& n2, const Rel& r) {
    if (!is_ext_hit_bisim(n, n2, r).holds)
        fail(errc::not_hit_bisim, "input is not an external hit bisimulation");
    ExtEventResult out;
    out.family = closed_pairs(n.space, n2.space, r);
    out.rel = relation_of_pairs(n.space, n2.space, out.family);
    if (!r.subset_of(out.rel)) fail(errc::bad_model, "R not below R^x(Sigma^x(R))");
    PairFamily again = closed_pairs(n.space, n2.space, out.rel);
    if (again.pairs != out.family.pairs) fail(errc::bad_model, "Sigma^x fixpoint violated");
    return out;
}

// Bounded search for a times-stable bi-sigma-algebra D with R^x(D) = R. Any
// such D consists of R-closed pairs, so candidates are bi-sigma closures of
// subfamilies of Sigma^x(R). The search is exhaustive (hence complete) when
// the family is small; otherwise only the canonical candidate and the
// closures of subfamilies of size <= 2 are tried, and `complete` is false.
struct ExtEventVerdict {
    bool holds = false;
    bool complete = true;
    std::optional<PairFamily> family;
};

inline ExtEventVerdict is_ext_event_bisim(const Nlmp& n, const Nlmp& n2, const Rel& r) {
    if (n.labels != n2.labels) fail(errc::label_mismatch, "external check needs equal labels");
    PairFamily top = closed_pairs(n.space, n2.space, r);
    const std::vector<std::pair<Mask, Mask>> base(top.pairs.begin(), top.pairs.end());
    const int m = static_cast<int>(base.size());
    const int lb = n.space.num_atoms(), rb = n2.space.num_atoms();
    ExtEventVerdict out;

    auto try_candidate = [&](const PairFamily& cand) {
        if (!cand.bi_sigma_closed) return false;
        if (!(relation_of_pairs(n.space, n2.space, cand) == r)) return false;
        if (!is_times_stable(n, n2, cand)) return false;
        out.holds = true;
        out.family = cand;
        return true;
    };

    if (try_candidate(top)) return out;
    if (m <= 14) {
        for (Mask pick = 0; pick < (Mask{1} << m); ++pick) {
            PairFamily gen;
            for (int i : mask_bits(pick)) gen.pairs.insert(base[i]);
            if (gen.pairs.empty()) continue;
            if (try_candidate(bi_sigma_close(lb, rb, gen))) return out;
        }
        return out; // exhaustive: every bi-sigma-algebra is its own closure
    }
    out.complete = false;
    for (int i = 0; i < m && !out.holds; ++i)
        for (int j = i; j < m && !out.holds; ++j) {
            PairFamily gen;
            gen.pairs.insert(base[i]);
            gen.pairs.insert(base[j]);
            try_candidate(bi_sigma_close(lb, rb, gen));
        }
    return out;
}

} // namespace lmpwb
