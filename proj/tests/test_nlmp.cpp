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

#include <catch2/catch_amalgamated.hpp>

#include "lmpwb/fixtures.hpp"
#include "lmpwb/nlmp_bisim.hpp"
#include "testutil.hpp"

using namespace lmpwb;
using namespace lmpwb::testutil;

namespace {

Nlmp random_nlmp(int seed, int max_states = 4, bool coarse = false) {
    GenSpec spec;
    spec.max_states = max_states;
    spec.denominator_bound = 4;
    spec.seed = static_cast<std::uint64_t>(seed);
    spec.coarse = coarse;
    spec.max_measures = 2;
    return gen_random_nlmp(spec);
}

// Oracle: union of all symmetric relations passing the checker.
Rel oracle_int_state(const Nlmp& n) {
    const int ns = n.space.num_states();
    REQUIRE(ns <= 5);
    Rel out(ns, ns);
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < ns; ++i)
        for (int j = i; j < ns; ++j) slots.emplace_back(i, j);
    for (Mask pick = 0; pick < (Mask{1} << slots.size()); ++pick) {
        Rel cand(ns, ns);
        for (int b : mask_bits(pick)) {
            cand.add(slots[b].first, slots[b].second);
            cand.add(slots[b].second, slots[b].first);
        }
        if (is_int_state_bisim(n, cand).holds) out = out.unite(cand);
    }
    return out;
}

Rel oracle_int_hit(const Nlmp& n) {
    const int ns = n.space.num_states();
    REQUIRE(ns <= 5);
    Rel out(ns, ns);
    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < ns; ++i)
        for (int j = i; j < ns; ++j) slots.emplace_back(i, j);
    for (Mask pick = 0; pick < (Mask{1} << slots.size()); ++pick) {
        Rel cand(ns, ns);
        for (int b : mask_bits(pick)) {
            cand.add(slots[b].first, slots[b].second);
            cand.add(slots[b].second, slots[b].first);
        }
        if (is_int_hit_bisim(n, cand).holds) out = out.unite(cand);
    }
    return out;
}

Rel oracle_ext_state(const Nlmp& a, const Nlmp& b) {
    const int nl = a.space.num_states(), nr = b.space.num_states();
    REQUIRE(nl * nr <= 12);
    Rel out(nl, nr);
    for (Mask pick = 0; pick < (Mask{1} << (nl * nr)); ++pick) {
        Rel cand(nl, nr);
        for (int bitpos : mask_bits(pick)) cand.add(bitpos / nr, bitpos % nr);
        if (is_ext_state_bisim(a, b, cand).holds) out = out.unite(cand);
    }
    return out;
}

} // namespace

TEST_CASE("validate_nlmp accepts embeds and the branching fixture") {
    Nlmp e = embed_lmp(fixtures::two_chain());
    CHECK(e.tset(0, 0).size() == 1);
    CHECK(e.tset(0, 1).size() == 1); // the zero measure, not refusal
    CHECK(e.tset(0, 1)[0].total() == rat(0));

    Nlmp nd = fixtures::nd_branch();
    CHECK(nd.tset(0, 0).size() == 2);
    CHECK(nd.tset(0, 2).empty());
}

TEST_CASE("validate_nlmp rejects transition sets that split an atom") {
    FinSpace sp = make_space({"a", "b"}, {bit(0) | bit(1)});
    Measure d(1);
    d.w[0] = rat(1);
    std::vector<std::vector<std::vector<Measure>>> per_state(1);
    per_state[0] = {{d}, {}};
    try {
        validate_nlmp(sp, {"l"}, per_state);
        FAIL("expected NonMeasurableTransition");
    } catch (const error& e) {
        CHECK(e.code() == errc::non_measurable_transition);
    }
}

TEST_CASE("nlmp_semantics handles all comparators") {
    Nlmp nd = fixtures::nd_branch();
    CHECK(nlmp_semantics(nd, parse_formula("tt")) == nd.space.all_atoms());
    // u has measures delta_v and (1/2) delta_w: <a>{>1/2}tt holds at u (delta_v), v
    CHECK(nlmp_semantics(nd, parse_formula("<a>{>1/2} tt")) == (bit(0) | bit(1)));
    // the 1/2-branch: <a>{<=1/2} tt holds where some measure has mass <= 1/2
    CHECK(nlmp_semantics(nd, parse_formula("<a>{<=1/2} tt")) == bit(0));

    // two-measure state with masses {1/4, 3/4}: the 3/4 branch clears > 1/2
    FinSpace sp = powerset_space({"p", "q"});
    Measure q1(2), q3(2);
    q1.w[1] = rat(1, 4);
    q3.w[1] = rat(3, 4);
    std::vector<std::vector<std::vector<Measure>>> per_state(1);
    per_state[0] = {{q1, q3}, {}};
    Nlmp n = validate_nlmp(sp, {"a"}, per_state);
    CHECK(nlmp_semantics(n, parse_formula("<a>{>1/2} tt")) == bit(0));
}

TEST_CASE("embedded LMP semantics agrees with LMP semantics on >") {
    for (int seed = 0; seed < 15; ++seed) {
        GenSpec spec;
        spec.max_states = 4;
        spec.seed = 5000 + seed;
        spec.coarse = seed % 2;
        Lmp s = gen_random_lmp(spec);
        Nlmp n = embed_lmp(s);
        for (const FormulaPtr& f : enumerate_formulas(s, 2, 60))
            CHECK(nlmp_semantics(n, f) == semantics(s, f));
    }
}

TEST_CASE("int_state: checker requires symmetry; embeds match LMP bisimilarity") {
    Nlmp nd = fixtures::nd_branch();
    Rel asym(3, 3);
    asym.add(0, 1);
    CHECK_THROWS_AS(is_int_state_bisim(nd, asym), error);
    CHECK(is_int_state_bisim(nd, Rel::identity(3)).holds);

    for (int seed = 0; seed < 20; ++seed) {
        GenSpec spec;
        spec.max_states = 4;
        spec.seed = 5100 + seed;
        spec.coarse = seed % 2;
        Lmp s = gen_random_lmp(spec);
        CHECK(int_state_bisimilarity(embed_lmp(s)) == state_bisimilarity(s));
    }
}

TEST_CASE("int_state distinguishes a state with an extra measure") {
    // s has {dirac_s, dirac_t}, t has {dirac_s}; u is a sink separating them
    FinSpace sp = powerset_space({"s", "t", "u"});
    Measure ds = dirac(sp, 0), dt = dirac(sp, 2);
    std::vector<std::vector<std::vector<Measure>>> per_state(1);
    per_state[0] = {{ds, dt}, {ds}, {}};
    Nlmp n = validate_nlmp(sp, {"a"}, per_state);
    Rel bis = int_state_bisimilarity(n);
    CHECK_FALSE(bis.contains(0, 1));
    CHECK(bis == oracle_int_state(n));
}

TEST_CASE("int_state and int_hit match their oracles and collapse on image-finite models") {
    for (int seed = 0; seed < 20; ++seed) {
        Nlmp n = random_nlmp(5200 + seed, 4, seed % 2);
        Rel st = int_state_bisimilarity(n);
        Rel hit = int_hit_bisimilarity(n);
        REQUIRE(st == oracle_int_state(n));
        REQUIRE(hit == oracle_int_hit(n));
        CHECK(st.subset_of(hit));
        CHECK(st == hit); // image-finite collapse
        CHECK(is_int_state_bisim(n, st).holds);
        CHECK(is_int_hit_bisim(n, hit).holds);
    }
}

TEST_CASE("int_event: the full algebra always qualifies; no transitions stay trivial") {
    for (int seed = 0; seed < 10; ++seed) {
        Nlmp n = random_nlmp(5300 + seed, 4, seed % 2);
        CHECK(is_int_event(n, full_algebra(n.space.num_atoms())));
    }
    FinSpace sp = powerset_space({"a", "b"});
    std::vector<std::vector<std::vector<Measure>>> none(1);
    none[0] = {{}, {}};
    Nlmp silent = validate_nlmp(sp, {"l"}, none);
    CHECK(int_event_smallest(silent).num_blocks() == 1);
}

TEST_CASE("int_event smallest agrees with smallest_stable on embeds") {
    for (int seed = 0; seed < 20; ++seed) {
        GenSpec spec;
        spec.max_states = 4;
        spec.seed = 5400 + seed;
        spec.coarse = seed % 2;
        Lmp s = gen_random_lmp(spec);
        CHECK(int_event_smallest(embed_lmp(s)) == smallest_stable(s));
    }
}

TEST_CASE("int_event checker: single classes decide full unions") {
    for (int seed = 0; seed < 10; ++seed) {
        Nlmp n = random_nlmp(5500 + seed, 3, seed % 2);
        SigmaAlgebra lam = int_event_smallest(n);
        REQUIRE(is_int_event(n, lam));
        // cross-check against the exhaustive union criterion
        const std::vector<Measure> universe = n.universe();
        auto classes = measure_classes(universe, lam.members());
        const int nc = static_cast<int>(classes.size());
        for (Mask pick = 0; pick < (Mask{1} << nc); ++pick) {
            Mask xi = 0;
            for (int c : mask_bits(pick)) xi |= classes[c];
            for (int li = 0; li < n.num_labels(); ++li) {
                Mask pre = 0;
                for (int at = 0; at < n.space.num_atoms(); ++at)
                    for (const auto& m : n.trans[li][at])
                        if (has_bit(xi, static_cast<int>(std::lower_bound(universe.begin(),
                                                                          universe.end(), m) -
                                                         universe.begin()))) {
                            pre |= bit(at);
                            break;
                        }
                CHECK(lam.contains(pre));
            }
        }
        // int-event relation is coarser than int-state
        CHECK(int_state_bisimilarity(n).subset_of(relation_of(n.space, lam.blocks)));
    }
}

TEST_CASE("ext_state on embeds of the chain and the sink") {
    Nlmp a = embed_lmp(fixtures::two_chain());
    Nlmp b = embed_lmp(fixtures::three_sink());
    Rel bis = ext_state_bisimilarity(a, b);
    CHECK(bis.contains(0, 0));
    CHECK(bis.contains(1, 1));
    CHECK(bis.contains(1, 2));
    CHECK(bis.size() == 3);
    CHECK(is_ext_state_bisim(a, b, bis).holds);
    CHECK(bis == oracle_ext_state(a, b));
}

TEST_CASE("one-sided refusal breaks the zig or zag") {
    FinSpace sp = powerset_space({"p"});
    std::vector<std::vector<std::vector<Measure>>> none(1), some(1);
    none[0] = {{}};
    some[0] = {{Measure(1)}}; // the zero measure, an actual transition
    Nlmp refuses = validate_nlmp(sp, {"a"}, none);
    Nlmp moves = validate_nlmp(sp, {"a"}, some);
    CHECK(ext_state_bisimilarity(refuses, moves).is_empty());
    CHECK(ext_state_bisimilarity(refuses, refuses) == Rel::total(1, 1));
}

TEST_CASE("reflexive external notions coincide with internal ones") {
    std::mt19937_64 g(67);
    for (int seed = 0; seed < 15; ++seed) {
        Nlmp n = random_nlmp(5600 + seed, 3, seed % 2);
        const int ns = n.space.num_states();
        Rel r = random_rel(g, ns, ns, 30);
        for (int i = 0; i < ns; ++i) r.add(i, i);
        Rel sym = r.unite(r.converse());
        CHECK(is_ext_state_bisim(n, n, sym).holds == is_int_state_bisim(n, sym).holds);
        CHECK(is_ext_hit_bisim(n, n, sym).holds == is_int_hit_bisim(n, sym).holds);
        CHECK(ext_state_bisimilarity(n, n) == int_state_bisimilarity(n));
    }
}

TEST_CASE("ext_state implies ext_hit; certified relations pass the hit checker") {
    for (int seed = 0; seed < 15; ++seed) {
        Nlmp a = random_nlmp(5700 + seed, 3, seed % 2);
        Nlmp b = random_nlmp(5800 + seed, 3, (seed + 1) % 2);
        Rel bis = ext_state_bisimilarity(a, b);
        CHECK(is_ext_hit_bisim(a, b, bis).holds);
    }
}

TEST_CASE("separating_theta produces a separating hit pair") {
    Nlmp a = embed_lmp(fixtures::two_chain());
    Nlmp b = embed_lmp(fixtures::three_sink());
    Rel bis = ext_state_bisimilarity(a, b);
    // (x, z') is not bisimilar: the Dirac vs the zero measure
    REQUIRE_FALSE(bis.contains(0, 2));
    SeparatingTheta sep = separating_theta(a, b, bis, 0, 2);
    CHECK(sep.label == "a");
    bool s_hits = (detail::hit_masks(a, a.universe())[0][a.space.atom_of[0]] & sep.theta) != 0;
    bool t_hits = (detail::hit_masks(b, b.universe())[0][b.space.atom_of[2]] & sep.theta2) != 0;
    CHECK(s_hits);
    CHECK_FALSE(t_hits);
    CHECK(has_bit(sep.c_atoms, a.space.atom_of[0]));
    CHECK_FALSE(has_bit(sep.c2_atoms, b.space.atom_of[2]));
    // the hit-preimage pair is closed for the bisimilarity
    CHECK(is_r_closed_pair(a.space, b.space, bis, sep.c_atoms, sep.c2_atoms));

    CHECK_THROWS_AS(separating_theta(a, b, bis, 0, 0), error); // bisimilar pair
}

TEST_CASE("separating pairs are closed for ext-state bisimilarity on random instances") {
    for (int seed = 0; seed < 12; ++seed) {
        Nlmp a = random_nlmp(5900 + seed, 3, seed % 2);
        Nlmp b = random_nlmp(6000 + seed, 3, (seed + 1) % 2);
        Rel bis = ext_state_bisimilarity(a, b);
        for (int s = 0; s < a.space.num_states(); ++s)
            for (int t = 0; t < b.space.num_states(); ++t) {
                if (bis.contains(s, t)) continue;
                SeparatingTheta sep = separating_theta(a, b, bis, s, t);
                CHECK(is_r_closed_pair(a.space, b.space, bis, sep.c_atoms, sep.c2_atoms));
                bool in_c = has_bit(sep.c_atoms, a.space.atom_of[s]);
                bool in_c2 = has_bit(sep.c2_atoms, b.space.atom_of[t]);
                CHECK(in_c != in_c2);
            }
    }
}

TEST_CASE("times-stability: full family, stable diagonals, certified closed pairs") {
    Nlmp nd = fixtures::nd_branch();
    PairFamily all = closed_pairs(nd.space, nd.space, Rel::empty(3, 3));
    CHECK(is_times_stable(nd, nd, all));

    // diagonal family of a stable algebra is times-stable, of an unstable one is not
    Nlmp chain = embed_lmp(fixtures::two_chain());
    SigmaAlgebra stable = int_event_smallest(chain);
    PairFamily diag;
    for (Mask m : stable.members()) diag.pairs.insert({m, m});
    CHECK(is_times_stable(chain, chain, diag));
    PairFamily trivial;
    trivial.pairs.insert({0, 0});
    trivial.pairs.insert({chain.space.all_atoms(), chain.space.all_atoms()});
    CHECK_FALSE(is_times_stable(chain, chain, trivial)); // {0,S} is not stable here

    for (int seed = 0; seed < 10; ++seed) {
        Nlmp a = random_nlmp(6100 + seed, 3, seed % 2);
        Nlmp b = random_nlmp(6200 + seed, 3, (seed + 1) % 2);
        Rel bis = ext_state_bisimilarity(a, b);
        CHECK(is_times_stable(a, b, closed_pairs(a.space, b.space, bis)));
    }
}

TEST_CASE("ext_event_from_hit closes up the fixture relation") {
    Nlmp a = embed_lmp(fixtures::two_chain());
    Nlmp b = embed_lmp(fixtures::three_sink());
    Rel bis = ext_state_bisimilarity(a, b);
    ExtEventResult r = ext_event_from_hit(a, b, bis);
    CHECK(bis.subset_of(r.rel));
    CHECK(r.rel == bis); // already closed here
    CHECK_THROWS_AS(ext_event_from_hit(a, b, Rel::total(2, 3)), error);
}

TEST_CASE("ext_event_from_hit: fixpoint property on random instances") {
    for (int seed = 0; seed < 10; ++seed) {
        Nlmp a = random_nlmp(6300 + seed, 3, seed % 2);
        Nlmp b = random_nlmp(6400 + seed, 3, (seed + 1) % 2);
        Rel bis = ext_state_bisimilarity(a, b);
        ExtEventResult r = ext_event_from_hit(a, b, bis);
        CHECK(bis.subset_of(r.rel));
        // the result is itself an external event and hit bisimulation
        CHECK(is_ext_hit_bisim(a, b, r.rel).holds);
        ExtEventVerdict v = is_ext_event_bisim(a, b, r.rel);
        CHECK(v.holds);
    }
}

TEST_CASE("is_ext_event_bisim: positive and negative pinned cases") {
    FinSpace sp = powerset_space({"p"});
    std::vector<std::vector<std::vector<Measure>>> none(1);
    none[0] = {{}};
    Nlmp silent = validate_nlmp(sp, {"a"}, none);
    ExtEventVerdict v = is_ext_event_bisim(silent, silent, Rel::total(1, 1));
    CHECK(v.holds);
    REQUIRE(v.family.has_value());
    CHECK(v.family->contains(0, 0));
    CHECK(v.family->contains(bit(0), bit(0)));

    // the chain against itself: the empty relation is certified by the full
    // pair family (pairs like (Q, 0) cut every candidate), and so is the
    // identity; {(x,x)} alone admits no certifying family, because any
    // family excluding (y,y) breaks times-stability. The search is
    // exhaustive at this size, so the refutation is complete.
    Nlmp chain = embed_lmp(fixtures::two_chain());
    CHECK(is_ext_event_bisim(chain, chain, Rel::empty(2, 2)).holds);
    CHECK(is_ext_event_bisim(chain, chain, Rel::identity(2)).holds);
    Rel only_x(2, 2);
    only_x.add(0, 0);
    ExtEventVerdict w = is_ext_event_bisim(chain, chain, only_x);
    CHECK_FALSE(w.holds);
    CHECK(w.complete);
    ExtEventVerdict tot = is_ext_event_bisim(chain, chain, Rel::total(2, 2));
    CHECK_FALSE(tot.holds);
    CHECK(tot.complete);
}
