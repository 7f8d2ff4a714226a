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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lmpwb/errors.hpp"

namespace lmpwb {

// Finite sets of states or atoms are bit masks. Which index space a mask
// lives in is part of the surrounding context (names carry _states/_atoms
// suffixes where it is not obvious).
using Mask = std::uint64_t;

inline Mask bit(int i) { return Mask{1} << i; }
inline bool has_bit(Mask m, int i) { return (m >> i) & 1; }
inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline Mask full_mask(int n) { return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

inline std::vector<int> mask_bits(Mask m) {
    std::vector<int> out;
    while (m) {
        int i = __builtin_ctzll(m);
        out.push_back(i);
        m &= m - 1;
    }
    return out;
}

// A finite measurable space: states plus the atom partition of its
// sigma-algebra. A set is measurable iff it is a union of atoms; the
// powerset case has singleton atoms.
struct FinSpace {
    std::vector<std::string> states;
    std::vector<Mask> atoms;   // state masks, disjoint, nonempty, covering
    std::vector<int> atom_of;  // state index -> atom index

    int num_states() const { return static_cast<int>(states.size()); }
    int num_atoms() const { return static_cast<int>(atoms.size()); }
    Mask all_states() const { return full_mask(num_states()); }
    Mask all_atoms() const { return full_mask(num_atoms()); }

    int state_index(const std::string& name) const {
        for (int i = 0; i < num_states(); ++i)
            if (states[i] == name) return i;
        return -1;
    }

    Mask states_of(Mask atom_set) const {
        Mask out = 0;
        for (int a : mask_bits(atom_set)) out |= atoms[a];
        return out;
    }

    bool measurable(Mask state_set) const {
        for (const Mask a : atoms) {
            Mask inter = a & state_set;
            if (inter != 0 && inter != a) return false;
        }
        return true;
    }

    // Atom view of a measurable state set.
    Mask atoms_of(Mask state_set) const {
        Mask out = 0;
        for (int a = 0; a < num_atoms(); ++a) {
            Mask inter = atoms[a] & state_set;
            if (inter == atoms[a])
                out |= bit(a);
            else if (inter != 0)
                fail(errc::bad_model, "set is not measurable in this space");
        }
        return out;
    }

    bool operator==(const FinSpace& o) const {
        return states == o.states && atoms == o.atoms;
    }
};

namespace detail {
inline void check_space(const FinSpace& s) {
    if (s.states.empty()) fail(errc::bad_model, "state set must be nonempty");
    if (s.states.size() > 60) fail(errc::too_large, "more than 60 states");
    std::map<std::string, int> seen;
    for (const auto& n : s.states)
        if (n.empty() || seen[n]++) fail(errc::bad_model, "duplicate or empty state id '" + n + "'");
    Mask covered = 0;
    for (const Mask a : s.atoms) {
        if (a == 0) fail(errc::bad_model, "empty atom");
        if (a & covered) fail(errc::bad_model, "atoms overlap");
        covered |= a;
    }
    if (covered != s.all_states()) fail(errc::bad_model, "atoms do not cover the state set");
}
} // namespace detail

inline FinSpace make_space(std::vector<std::string> states, std::vector<Mask> atoms) {
    FinSpace s;
    s.states = std::move(states);
    s.atoms = std::move(atoms);
    detail::check_space(s);
    s.atom_of.assign(s.num_states(), -1);
    for (int a = 0; a < s.num_atoms(); ++a)
        for (int i : mask_bits(s.atoms[a])) s.atom_of[i] = a;
    return s;
}

inline FinSpace powerset_space(std::vector<std::string> states) {
    std::vector<Mask> atoms;
    for (size_t i = 0; i < states.size(); ++i) atoms.push_back(bit(static_cast<int>(i)));
    return make_space(std::move(states), std::move(atoms));
}

// Smallest sigma-algebra containing the generators, by membership-pattern
// refinement: two states share an atom iff they lie in exactly the same
// generators.
inline FinSpace sigma_generate(std::vector<std::string> states, const std::vector<Mask>& generators) {
    const int n = static_cast<int>(states.size());
    if (n == 0) fail(errc::bad_model, "state set must be nonempty");
    if (n > 60) fail(errc::too_large, "more than 60 states");
    for (Mask g : generators)
        if (g & ~full_mask(n)) fail(errc::unknown_label_or_state, "generator mentions unknown state");
    std::vector<std::vector<bool>> pattern(n);
    for (int i = 0; i < n; ++i)
        for (Mask g : generators) pattern[i].push_back(has_bit(g, i));
    std::vector<Mask> atoms;
    std::vector<int> rep;
    for (int i = 0; i < n; ++i) {
        bool placed = false;
        for (size_t k = 0; k < atoms.size(); ++k)
            if (pattern[rep[k]] == pattern[i]) {
                atoms[k] |= bit(i);
                placed = true;
                break;
            }
        if (!placed) {
            atoms.push_back(bit(i));
            rep.push_back(i);
        }
    }
    return make_space(std::move(states), std::move(atoms));
}

// A sub-sigma-algebra of a FinSpace, stored as the partition of the base
// atoms into blocks; members are exactly the unions of blocks.
struct SigmaAlgebra {
    std::vector<Mask> blocks; // atom masks over the base space

    int num_blocks() const { return static_cast<int>(blocks.size()); }

    bool contains(Mask atom_set) const {
        for (const Mask b : blocks) {
            Mask inter = b & atom_set;
            if (inter != 0 && inter != b) return false;
        }
        return true;
    }

    int block_of_atom(int atom) const {
        for (int k = 0; k < num_blocks(); ++k)
            if (has_bit(blocks[k], atom)) return k;
        return -1;
    }

    // All members (unions of blocks), the empty set first.
    std::vector<Mask> members() const {
        require_enumerable(num_blocks(), 22, "sigma-algebra member enumeration");
        std::vector<Mask> out;
        const Mask top = full_mask(num_blocks());
        for (Mask pick = 0;; ++pick) {
            Mask m = 0;
            for (int k : mask_bits(pick)) m |= blocks[k];
            out.push_back(m);
            if (pick == top) break;
        }
        return out;
    }

    // True iff every member of `other` is a member of *this.
    bool contains_algebra(const SigmaAlgebra& other) const {
        for (const Mask b : other.blocks)
            if (!contains(b)) return false;
        return true;
    }

    bool operator==(const SigmaAlgebra& o) const { return canonical() == o.canonical(); }

    std::vector<Mask> canonical() const {
        std::vector<Mask> c = blocks;
        std::sort(c.begin(), c.end());
        return c;
    }
};

// Partition of atom indices 0..n-1 by membership pattern across the given
// generating atom sets; yields the smallest sub-sigma-algebra containing them.
inline SigmaAlgebra sigma_close_atoms(int num_atoms, const std::vector<Mask>& generators) {
    std::vector<std::vector<bool>> pattern(num_atoms);
    for (int i = 0; i < num_atoms; ++i)
        for (Mask g : generators) pattern[i].push_back(has_bit(g, i));
    SigmaAlgebra out;
    std::vector<int> rep;
    for (int i = 0; i < num_atoms; ++i) {
        bool placed = false;
        for (size_t k = 0; k < out.blocks.size(); ++k)
            if (pattern[rep[k]] == pattern[i]) {
                out.blocks[k] |= bit(i);
                placed = true;
                break;
            }
        if (!placed) {
            out.blocks.push_back(bit(i));
            rep.push_back(i);
        }
    }
    return out;
}

inline SigmaAlgebra full_algebra(int num_atoms) {
    SigmaAlgebra s;
    for (int i = 0; i < num_atoms; ++i) s.blocks.push_back(bit(i));
    return s;
}

inline SigmaAlgebra trivial_algebra(int num_atoms) {
    SigmaAlgebra s;
    s.blocks.push_back(full_mask(num_atoms));
    return s;
}

// Direct sum of two spaces. States are tagged inl(.)/inr(.); left states and
// atoms come first, so the untag maps are index shifts. Measurable sets of
// the sum are exactly the A (+) A'.
struct SumSpace {
    FinSpace space;
    int left_states = 0, right_states = 0;
    int left_atoms = 0, right_atoms = 0;

    int inl_state(int i) const { return i; }
    int inr_state(int j) const { return left_states + j; }
    bool is_left_state(int u) const { return u < left_states; }
    int untag_state(int u) const { return is_left_state(u) ? u : u - left_states; }

    Mask oplus_atoms(Mask left, Mask right) const { return left | (right << left_atoms); }
    Mask left_part_atoms(Mask sum) const { return sum & full_mask(left_atoms); }
    Mask right_part_atoms(Mask sum) const { return sum >> left_atoms; }

    Mask oplus_states(Mask left, Mask right) const { return left | (right << left_states); }
    Mask left_part_states(Mask sum) const { return sum & full_mask(left_states); }
    Mask right_part_states(Mask sum) const { return sum >> left_states; }
};

inline SumSpace sum_space(const FinSpace& left, const FinSpace& right) {
    SumSpace s;
    s.left_states = left.num_states();
    s.right_states = right.num_states();
    s.left_atoms = left.num_atoms();
    s.right_atoms = right.num_atoms();
    std::vector<std::string> states;
    for (const auto& n : left.states) states.push_back("inl(" + n + ")");
    for (const auto& n : right.states) states.push_back("inr(" + n + ")");
    std::vector<Mask> atoms;
    for (Mask a : left.atoms) atoms.push_back(a);
    for (Mask a : right.atoms) atoms.push_back(a << s.left_states);
    s.space = make_space(std::move(states), std::move(atoms));
    return s;
}

// Restriction of a space to a measurable subset B (given as an atom mask).
// Kept atoms survive unchanged; state indices are remapped densely.
struct RestrictedSpace {
    FinSpace space;
    std::vector<int> state_map; // old state index -> new index or -1
    std::vector<int> atom_map;  // old atom index -> new index or -1
};

inline RestrictedSpace restrict_space(const FinSpace& s, Mask keep_atoms) {
    RestrictedSpace out;
    out.state_map.assign(s.num_states(), -1);
    out.atom_map.assign(s.num_atoms(), -1);
    std::vector<std::string> states;
    for (int i = 0; i < s.num_states(); ++i)
        if (has_bit(keep_atoms, s.atom_of[i])) {
            out.state_map[i] = static_cast<int>(states.size());
            states.push_back(s.states[i]);
        }
    std::vector<Mask> atoms;
    for (int a = 0; a < s.num_atoms(); ++a) {
        if (!has_bit(keep_atoms, a)) continue;
        Mask m = 0;
        for (int i : mask_bits(s.atoms[a])) m |= bit(out.state_map[i]);
        out.atom_map[a] = static_cast<int>(atoms.size());
        atoms.push_back(m);
    }
    out.space = make_space(std::move(states), std::move(atoms));
    return out;
}

} // namespace lmpwb
