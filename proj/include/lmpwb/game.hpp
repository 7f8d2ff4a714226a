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

#include <functional>
#include <map>

#include "lmpwb/nlmp_bisim.hpp"

namespace lmpwb {

// The bisimilarity game between two image-finite NLMPs. Spoiler challenges a
// pair of states with a label, a side, one of that side's measures and, for
// every measure of the opposing set, a measurable pair on which the masses
// differ. Duplicator answers with a new pair of states straddling one of the
// proposed pairs. Duplicator wins infinite plays.
struct GamePosition {
    int x0 = 0, x1 = 0;
};

struct SpoilerMove {
    std::string label;
    int side = 0;     // which process the chosen measure comes from
    int mu_index = 0; // index into the canonical (sorted) transition set
    // k-th entry challenges the k-th opposing measure: (C_k, C'_k) with
    // C_k over the chosen side's atoms, C'_k over the opposing side's.
    std::vector<std::pair<Mask, Mask>> set_pairs;
};

struct DuplicatorMove {
    int y0 = 0, y1 = 0;
    int k = 0;
};

struct GameSolution {
    Rel region;                            // positions winning for Duplicator
    std::vector<std::vector<int>> rank;    // [x0][x1] removal round, -1 inside the region
    std::map<std::pair<int, int>, SpoilerMove> spoiler_moves; // for removed positions
};

namespace detail {

// Canonical winning pair selection against the current safe set: the least
// family pair (in the move's own orientation) with unequal masses. A pair
// closed for W admits no Duplicator reply inside W.
inline bool pick_closed_pair(const std::vector<std::pair<Mask, Mask>>& fam_oriented,
                             const Measure& mu, const Measure& nu, std::pair<Mask, Mask>& out) {
    for (const auto& [c, c2] : fam_oriented) {
        if (mu.mass(c) != nu.mass(c2)) {
            out = {c, c2};
            return true;
        }
    }
    return false;
}

} // namespace detail

// Backward induction over the finite arena: a position falls at round r when
// Spoiler has a move whose every challenged pair is closed for the round's
// safe set, leaving Duplicator no reply that stays safe.
inline GameSolution solve(const Nlmp& n0, const Nlmp& n1) {
    if (n0.labels != n1.labels) fail(errc::label_mismatch, "game needs equal label sets");
    const int a0 = n0.space.num_states(), a1 = n1.space.num_states();
    GameSolution out;
    out.region = Rel::total(a0, a1);
    out.rank.assign(a0, std::vector<int>(a1, -1));
    for (int round = 0;; ++round) {
        PairFamily family = closed_pairs(n0.space, n1.space, out.region);
        // both orientations, each sorted in its own lexicographic order
        std::vector<std::pair<Mask, Mask>> fam01(family.pairs.begin(), family.pairs.end());
        std::vector<std::pair<Mask, Mask>> fam10;
        for (const auto& [q, q2] : family.pairs) fam10.emplace_back(q2, q);
        std::sort(fam10.begin(), fam10.end());

        std::vector<std::pair<int, int>> removed;
        for (auto [x0, x1] : out.region.pairs()) {
            bool beaten = false;
            SpoilerMove winning;
            for (int li = 0; li < n0.num_labels() && !beaten; ++li)
                for (int side = 0; side < 2 && !beaten; ++side) {
                    const auto& mine = side == 0 ? n0.tset(li, x0) : n1.tset(li, x1);
                    const auto& opposing = side == 0 ? n1.tset(li, x1) : n0.tset(li, x0);
                    for (size_t mi = 0; mi < mine.size() && !beaten; ++mi) {
                        std::vector<std::pair<Mask, Mask>> pairs;
                        bool all = true;
                        for (const auto& nu : opposing) {
                            std::pair<Mask, Mask> pick;
                            if (!detail::pick_closed_pair(side == 0 ? fam01 : fam10, mine[mi], nu,
                                                          pick)) {
                                all = false;
                                break;
                            }
                            pairs.push_back(pick);
                        }
                        if (all) {
                            beaten = true;
                            winning = SpoilerMove{n0.labels[li], side, static_cast<int>(mi),
                                                  std::move(pairs)};
                        }
                    }
                }
            if (beaten) {
                removed.emplace_back(x0, x1);
                out.rank[x0][x1] = round;
                out.spoiler_moves[{x0, x1}] = std::move(winning);
            }
        }
        if (removed.empty()) break;
        for (auto [x0, x1] : removed) out.region.remove(x0, x1);
    }
    return out;
}

// Representative legal Spoiler moves: per (label, side, measure), the
// lexicographically least measurable pair with unequal mass for each
// opposing measure. A move exists unless some opposing measure agrees with
// the chosen one on every measurable pair (both are the zero measure).
inline std::vector<SpoilerMove> legal_spoiler_moves(const Nlmp& n0, const Nlmp& n1,
                                                    GamePosition pos) {
    std::vector<SpoilerMove> out;
    auto least_unequal = [](const FinSpace& mine_sp, const FinSpace& opp_sp, const Measure& mu,
                            const Measure& nu, std::pair<Mask, Mask>& pick) {
        const Mask la = mine_sp.all_atoms(), ra = opp_sp.all_atoms();
        for (Mask c = 0;; ++c) {
            for (Mask c2 = 0;; ++c2) {
                if (mu.mass(c) != nu.mass(c2)) {
                    pick = {c, c2};
                    return true;
                }
                if (c2 == ra) break;
            }
            if (c == la) break;
        }
        return false;
    };
    for (int li = 0; li < n0.num_labels(); ++li)
        for (int side = 0; side < 2; ++side) {
            const auto& mine = side == 0 ? n0.tset(li, pos.x0) : n1.tset(li, pos.x1);
            const auto& opposing = side == 0 ? n1.tset(li, pos.x1) : n0.tset(li, pos.x0);
            const FinSpace& mine_sp = side == 0 ? n0.space : n1.space;
            const FinSpace& opp_sp = side == 0 ? n1.space : n0.space;
            for (size_t mi = 0; mi < mine.size(); ++mi) {
                std::vector<std::pair<Mask, Mask>> pairs;
                bool all = true;
                for (const auto& nu : opposing) {
                    std::pair<Mask, Mask> pick;
                    if (!least_unequal(mine_sp, opp_sp, mine[mi], nu, pick)) {
                        all = false;
                        break;
                    }
                    pairs.push_back(pick);
                }
                if (all)
                    out.push_back(SpoilerMove{n0.labels[li], side, static_cast<int>(mi), pairs});
            }
        }
    return out;
}

inline std::vector<DuplicatorMove> legal_duplicator_moves(const Nlmp& n0, const Nlmp& n1,
                                                          const SpoilerMove& smove) {
    std::vector<DuplicatorMove> out;
    for (int y0 = 0; y0 < n0.space.num_states(); ++y0)
        for (int y1 = 0; y1 < n1.space.num_states(); ++y1)
            for (size_t k = 0; k < smove.set_pairs.size(); ++k) {
                const auto& [c, c2] = smove.set_pairs[k];
                const int yi = smove.side == 0 ? y0 : y1;
                const int yo = smove.side == 0 ? y1 : y0;
                const FinSpace& si = smove.side == 0 ? n0.space : n1.space;
                const FinSpace& so = smove.side == 0 ? n1.space : n0.space;
                if (has_bit(c, si.atom_of[yi]) != !has_bit(c2, so.atom_of[yo])) continue;
                out.push_back(DuplicatorMove{y0, y1, static_cast<int>(k)});
            }
    return out;
}

struct StepOutcome {
    enum class Kind { next_position, spoiler_illegal, duplicator_illegal } kind;
    GamePosition next;
    std::string reason;
};

// Rule check for Spoiler's half of an exchange; empty result means legal.
inline std::optional<std::string> spoiler_move_illegal(const Nlmp& n0, const Nlmp& n1,
                                                       GamePosition pos, const SpoilerMove& smove) {
    int li = n0.label_index(smove.label);
    if (li < 0) return "unknown label";
    if (smove.side != 0 && smove.side != 1) return "bad side";
    const auto& mine = smove.side == 0 ? n0.tset(li, pos.x0) : n1.tset(li, pos.x1);
    const auto& opposing = smove.side == 0 ? n1.tset(li, pos.x1) : n0.tset(li, pos.x0);
    if (smove.mu_index < 0 || smove.mu_index >= static_cast<int>(mine.size()))
        return "measure index out of range";
    if (smove.set_pairs.size() != opposing.size())
        return "enumeration does not cover the opposing set";
    const FinSpace& si = smove.side == 0 ? n0.space : n1.space;
    const FinSpace& so = smove.side == 0 ? n1.space : n0.space;
    for (size_t k = 0; k < opposing.size(); ++k) {
        const auto& [c, c2] = smove.set_pairs[k];
        if ((c & ~si.all_atoms()) || (c2 & ~so.all_atoms()))
            return "pair outside the sigma-algebras";
        if (mine[smove.mu_index].mass(c) == opposing[k].mass(c2))
            return "claimed inequality fails at pair " + std::to_string(k);
    }
    return std::nullopt;
}

// Rule check for one exchange; an illegal move loses for its mover.
inline StepOutcome referee_step(const Nlmp& n0, const Nlmp& n1, GamePosition pos,
                                const SpoilerMove& smove, const DuplicatorMove& dmove) {
    if (auto bad = spoiler_move_illegal(n0, n1, pos, smove))
        return {StepOutcome::Kind::spoiler_illegal, {}, *bad};
    if (dmove.y0 < 0 || dmove.y0 >= n0.space.num_states() || dmove.y1 < 0 ||
        dmove.y1 >= n1.space.num_states())
        return {StepOutcome::Kind::duplicator_illegal, {}, "reply state out of range"};
    if (dmove.k < 0 || dmove.k >= static_cast<int>(smove.set_pairs.size()))
        return {StepOutcome::Kind::duplicator_illegal, {}, "pair index out of range"};
    const FinSpace& si = smove.side == 0 ? n0.space : n1.space;
    const FinSpace& so = smove.side == 0 ? n1.space : n0.space;
    const auto& [c, c2] = smove.set_pairs[dmove.k];
    const int yi = smove.side == 0 ? dmove.y0 : dmove.y1;
    const int yo = smove.side == 0 ? dmove.y1 : dmove.y0;
    if (has_bit(c, si.atom_of[yi]) == has_bit(c2, so.atom_of[yo]))
        return {StepOutcome::Kind::duplicator_illegal, {}, "membership condition violated"};
    return {StepOutcome::Kind::next_position, {dmove.y0, dmove.y1}, ""};
}

// Strategy accessors. Spoiler follows the recorded winning move outside the
// region; the rank strictly drops along replies, so Duplicator gets stuck.
// Duplicator answers with the least reply that stays in the region.
inline std::optional<SpoilerMove> strategy_spoiler(const GameSolution& sol, const Nlmp& n0,
                                                   const Nlmp& n1, GamePosition pos) {
    auto it = sol.spoiler_moves.find({pos.x0, pos.x1});
    if (it != sol.spoiler_moves.end()) return it->second;
    auto legal = legal_spoiler_moves(n0, n1, pos);
    if (legal.empty()) return std::nullopt;
    return legal.front(); // inside the region: any legal move (cannot win)
}

inline std::optional<DuplicatorMove> strategy_duplicator(const GameSolution& sol, const Nlmp& n0,
                                                         const Nlmp& n1, GamePosition pos,
                                                         const SpoilerMove& smove) {
    for (const auto& d : legal_duplicator_moves(n0, n1, smove))
        if (sol.region.contains(d.y0, d.y1)) return d;
    auto all = legal_duplicator_moves(n0, n1, smove);
    if (all.empty()) return std::nullopt;
    return all.front();
}

struct PlayRound {
    GamePosition position;
    SpoilerMove smove;
    bool dmove_made = false;
    DuplicatorMove dmove;
};

struct Transcript {
    GamePosition start;
    std::vector<PlayRound> rounds;
    std::string winner; // "spoiler" or "duplicator"
    std::string reason;
    bool abandoned = false;
};

using SpoilerFn = std::function<std::optional<SpoilerMove>(GamePosition)>;
using DuplicatorFn = std::function<std::optional<DuplicatorMove>(GamePosition, const SpoilerMove&)>;

// Drives a play to a verdict. Plays reaching the cutoff (defaulted to
// #positions + 1, enough for a position to repeat) are infinite plays, won
// by Duplicator: the arena is finite and the solution positional.
inline Transcript simulate_play(const Nlmp& n0, const Nlmp& n1, GamePosition start,
                                const SpoilerFn& spoiler, const DuplicatorFn& duplicator,
                                int cutoff = -1) {
    if (cutoff < 0) cutoff = n0.space.num_states() * n1.space.num_states() + 1;
    Transcript t;
    t.start = start;
    GamePosition pos = start;
    for (int round = 0; round < cutoff; ++round) {
        auto sm = spoiler(pos);
        if (!sm) {
            t.winner = "duplicator";
            t.reason = "spoiler cannot move";
            return t;
        }
        PlayRound rec;
        rec.position = pos;
        rec.smove = *sm;
        if (auto bad = spoiler_move_illegal(n0, n1, pos, *sm)) {
            t.rounds.push_back(rec);
            t.winner = "duplicator";
            t.reason = "illegal spoiler move: " + *bad;
            return t;
        }
        auto dm = duplicator(pos, *sm);
        if (dm) {
            rec.dmove_made = true;
            rec.dmove = *dm;
        }
        t.rounds.push_back(rec);
        if (!dm) {
            t.winner = "spoiler";
            t.reason = "duplicator cannot move";
            return t;
        }
        StepOutcome step = referee_step(n0, n1, pos, *sm, *dm);
        switch (step.kind) {
        case StepOutcome::Kind::spoiler_illegal:
            t.winner = "duplicator";
            t.reason = "illegal spoiler move: " + step.reason;
            return t;
        case StepOutcome::Kind::duplicator_illegal:
            t.winner = "spoiler";
            t.reason = "illegal duplicator move: " + step.reason;
            return t;
        case StepOutcome::Kind::next_position: pos = step.next;
        }
    }
    t.winner = "duplicator";
    t.reason = "all positions repeat";
    return t;
}

// Replays a transcript move by move; the verdict must reproduce.
inline std::string replay_verdict(const Nlmp& n0, const Nlmp& n1, const Transcript& t) {
    GamePosition pos = t.start;
    for (const auto& r : t.rounds) {
        if (spoiler_move_illegal(n0, n1, pos, r.smove)) return "duplicator";
        if (!r.dmove_made) return "spoiler";
        StepOutcome step = referee_step(n0, n1, pos, r.smove, r.dmove);
        if (step.kind == StepOutcome::Kind::spoiler_illegal) return "duplicator";
        if (step.kind == StepOutcome::Kind::duplicator_illegal) return "spoiler";
        pos = step.next;
    }
    return "duplicator";
}

} // namespace lmpwb
