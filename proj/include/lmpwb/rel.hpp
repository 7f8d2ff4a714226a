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

#include <utility>
#include <vector>

#include "lmpwb/finspace.hpp"

namespace lmpwb {

// Binary relation between two state sets (which may coincide), stored as one
// right-state mask per left state.
struct Rel {
    int n_left = 0, n_right = 0;
    std::vector<Mask> rows;

    Rel() = default;
    Rel(int nl, int nr) : n_left(nl), n_right(nr), rows(nl, 0) {}

    static Rel empty(int nl, int nr) { return Rel(nl, nr); }
    static Rel total(int nl, int nr) {
        Rel r(nl, nr);
        for (auto& row : r.rows) row = full_mask(nr);
        return r;
    }
    static Rel identity(int n) {
        Rel r(n, n);
        for (int i = 0; i < n; ++i) r.rows[i] = bit(i);
        return r;
    }

    bool contains(int i, int j) const { return has_bit(rows[i], j); }
    void add(int i, int j) { rows[i] |= bit(j); }
    void remove(int i, int j) { rows[i] &= ~bit(j); }

    bool is_empty() const {
        for (Mask m : rows)
            if (m) return false;
        return true;
    }

    int size() const {
        int n = 0;
        for (Mask m : rows) n += popcount(m);
        return n;
    }

    std::vector<std::pair<int, int>> pairs() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 0; i < n_left; ++i)
            for (int j : mask_bits(rows[i])) out.emplace_back(i, j);
        return out;
    }

    Rel converse() const {
        Rel r(n_right, n_left);
        for (int i = 0; i < n_left; ++i)
            for (int j : mask_bits(rows[i])) r.add(j, i);
        return r;
    }

    bool subset_of(const Rel& o) const {
        for (int i = 0; i < n_left; ++i)
            if (rows[i] & ~o.rows[i]) return false;
        return true;
    }

    Rel intersect(const Rel& o) const {
        Rel r(n_left, n_right);
        for (int i = 0; i < n_left; ++i) r.rows[i] = rows[i] & o.rows[i];
        return r;
    }

    Rel unite(const Rel& o) const {
        Rel r(n_left, n_right);
        for (int i = 0; i < n_left; ++i) r.rows[i] = rows[i] | o.rows[i];
        return r;
    }

    bool operator==(const Rel& o) const {
        return n_left == o.n_left && n_right == o.n_right && rows == o.rows;
    }

    bool is_reflexive() const {
        for (int i = 0; i < n_left; ++i)
            if (!contains(i, i)) return false;
        return true;
    }

    bool is_symmetric() const {
        for (int i = 0; i < n_left; ++i)
            for (int j : mask_bits(rows[i]))
                if (!contains(j, i)) return false;
        return true;
    }

    bool is_transitive() const {
        for (int i = 0; i < n_left; ++i)
            for (int j : mask_bits(rows[i]))
                if (rows[j] & ~rows[i]) return false;
        return true;
    }

    bool is_equivalence() const {
        return n_left == n_right && is_reflexive() && is_symmetric() && is_transitive();
    }

    // State masks of the equivalence classes, ordered by least member.
    std::vector<Mask> classes() const {
        std::vector<Mask> out;
        Mask seen = 0;
        for (int i = 0; i < n_left; ++i) {
            if (has_bit(seen, i)) continue;
            out.push_back(rows[i] | bit(i));
            seen |= rows[i] | bit(i);
        }
        return out;
    }
};

// Smallest equivalence relation containing R (R must be square).
inline Rel equivalence_closure(const Rel& r) {
    Rel e = r;
    for (int i = 0; i < e.n_left; ++i) e.add(i, i);
    e = e.unite(e.converse());
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < e.n_left; ++i)
            for (int j : mask_bits(e.rows[i]))
                if (e.rows[j] & ~e.rows[i]) {
                    e.rows[i] |= e.rows[j];
                    changed = true;
                }
    }
    return e;
}

// Sigma(R): the R-closed measurable sets, always a sub-sigma-algebra. Its
// blocks are the atoms merged along (either direction of) R.
inline SigmaAlgebra r_closed_sets(const FinSpace& space, const Rel& r) {
    const int n = space.num_atoms();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < r.n_left; ++i)
        for (int j : mask_bits(r.rows[i])) {
            int a = find(space.atom_of[i]), b = find(space.atom_of[j]);
            if (a != b) parent[a] = b;
        }
    SigmaAlgebra out;
    std::vector<int> block_index(n, -1);
    for (int a = 0; a < n; ++a) {
        int root = find(a);
        if (block_index[root] < 0) {
            block_index[root] = static_cast<int>(out.blocks.size());
            out.blocks.push_back(0);
        }
        out.blocks[block_index[root]] |= bit(a);
    }
    return out;
}

// R(Lambda): relates states with the same membership pattern across the
// family (given as atom masks). Always an equivalence.
inline Rel relation_of(const FinSpace& space, const std::vector<Mask>& family_atoms) {
    const int n = space.num_states();
    Rel r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool same = true;
            for (Mask f : family_atoms)
                if (has_bit(f, space.atom_of[i]) != has_bit(f, space.atom_of[j])) {
                    same = false;
                    break;
                }
            if (same) r.add(i, j);
        }
    return r;
}

// Descent of a relation on a sum: the cross pairs inl(s) R inr(s').
inline Rel descend(const SumSpace& sum, const Rel& r) {
    Rel out(sum.left_states, sum.right_states);
    for (int s = 0; s < sum.left_states; ++s)
        for (int t = 0; t < sum.right_states; ++t)
            if (r.contains(sum.inl_state(s), sum.inr_state(t))) out.add(s, t);
    return out;
}

// Lift of a cross relation to the sum: only pairs (inl(s), inr(s')).
inline Rel lift_cross(const SumSpace& sum, const Rel& r) {
    Rel out(sum.space.num_states(), sum.space.num_states());
    for (auto [s, t] : r.pairs()) out.add(sum.inl_state(s), sum.inr_state(t));
    return out;
}

// Complete lift R+ of a relation on S to S (+) S: all four tag combinations
// of each related pair. R+ is an equivalence iff R is.
inline Rel lift_complete(const SumSpace& sum, const Rel& r) {
    if (sum.left_states != sum.right_states || r.n_left != sum.left_states)
        fail(errc::bad_model, "complete lift needs equal summands");
    Rel out(sum.space.num_states(), sum.space.num_states());
    for (auto [s, t] : r.pairs()) {
        out.add(sum.inl_state(s), sum.inl_state(t));
        out.add(sum.inl_state(s), sum.inr_state(t));
        out.add(sum.inr_state(s), sum.inl_state(t));
        out.add(sum.inr_state(s), sum.inr_state(t));
    }
    return out;
}

enum class Side { left, right };

inline Rel lift_side(const SumSpace& sum, const Rel& r, Side side) {
    Rel out(sum.space.num_states(), sum.space.num_states());
    for (auto [s, t] : r.pairs()) {
        if (side == Side::left)
            out.add(sum.inl_state(s), sum.inl_state(t));
        else
            out.add(sum.inr_state(s), sum.inr_state(t));
    }
    return out;
}

// Restriction of a relation on a sum to one summand.
inline Rel restrict_rel(const SumSpace& sum, const Rel& r, Side side) {
    int n = side == Side::left ? sum.left_states : sum.right_states;
    Rel out(n, n);
    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) {
            int u = side == Side::left ? sum.inl_state(s) : sum.inr_state(s);
            int v = side == Side::left ? sum.inl_state(t) : sum.inr_state(t);
            if (r.contains(u, v)) out.add(s, t);
        }
    return out;
}

// Least superset closed under (x,x'),(y,x'),(y,y') => (x,y').
inline Rel z_closure(const Rel& r) {
    Rel out = r;
    for (bool changed = true; changed;) {
        changed = false;
        for (int x = 0; x < out.n_left; ++x)
            for (int y = 0; y < out.n_left; ++y) {
                if (x == y || !(out.rows[x] & out.rows[y])) continue;
                if (out.rows[y] & ~out.rows[x]) {
                    out.rows[x] |= out.rows[y];
                    changed = true;
                }
            }
    }
    return out;
}

// Enumerates set partitions of {0..n-1} in restricted-growth-string order;
// visit receives the block id of each element and may return false to stop.
template <typename F>
void for_each_partition(int n, F&& visit) {
    std::vector<int> rgs(n, 0);
    auto prefix_max = [&](int i) {
        int m = 0;
        for (int j = 0; j < i; ++j) m = std::max(m, rgs[j]);
        return m;
    };
    while (true) {
        if (!visit(static_cast<const std::vector<int>&>(rgs))) return;
        int i = n - 1;
        while (i > 0 && rgs[i] > prefix_max(i)) --i;
        if (i <= 0) return;
        ++rgs[i];
        for (int j = i + 1; j < n; ++j) rgs[j] = 0;
    }
}

inline Rel partition_rel(const std::vector<int>& block_of) {
    const int n = static_cast<int>(block_of.size());
    Rel r(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (block_of[i] == block_of[j]) r.add(i, j);
    return r;
}

} // namespace lmpwb
