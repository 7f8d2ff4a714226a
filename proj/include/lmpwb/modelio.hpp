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

#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "lmpwb/game.hpp"
#include "lmpwb/nlmp.hpp"

namespace lmpwb {

using json = nlohmann::ordered_json;

// Model files hold one process each: states, an optional atom partition
// ("sigma", omitted for the powerset), and kernels or transition sets with
// rationals written as strings. Weights are keyed by state name and attach
// to that state's atom. Loading canonicalizes: states sorted, atoms ordered
// by least state, labels sorted.
struct Model {
    std::string kind; // "lmp" or "nlmp"
    Lmp lmp;
    Nlmp nlmp;
    std::string note;

    const FinSpace& space() const { return kind == "lmp" ? lmp.space : nlmp.space; }
    const std::vector<std::string>& labels() const {
        return kind == "lmp" ? lmp.labels : nlmp.labels;
    }
};

namespace detail {

inline FinSpace space_from_json(const json& j) {
    if (!j.contains("states") || !j["states"].is_array())
        fail(errc::bad_model, "missing 'states' array");
    std::vector<std::string> states = j["states"].get<std::vector<std::string>>();
    std::sort(states.begin(), states.end());
    if (!j.contains("sigma")) return powerset_space(states);
    FinSpace tmp = powerset_space(states);
    std::vector<Mask> atoms;
    for (const auto& block : j["sigma"]) {
        Mask m = 0;
        for (const auto& name : block) {
            int idx = tmp.state_index(name.get<std::string>());
            if (idx < 0) fail(errc::unknown_label_or_state, "sigma mentions unknown state");
            m |= bit(idx);
        }
        atoms.push_back(m);
    }
    std::sort(atoms.begin(), atoms.end(),
              [](Mask a, Mask b) { return mask_bits(a)[0] < mask_bits(b)[0]; });
    return make_space(states, atoms);
}

inline Measure measure_from_json(const FinSpace& sp, const json& j) {
    Measure m(sp.num_atoms());
    std::vector<bool> set(sp.num_atoms(), false);
    for (auto it = j.begin(); it != j.end(); ++it) {
        int idx = sp.state_index(it.key());
        if (idx < 0) fail(errc::unknown_label_or_state, "weight for unknown state '" + it.key() + "'");
        int at = sp.atom_of[idx];
        if (set[at]) fail(errc::bad_model, "two weights land in the atom of '" + it.key() + "'");
        set[at] = true;
        m.w[at] = parse_rational(it.value().get<std::string>());
        if (m.w[at] < 0) fail(errc::bad_model, "negative weight");
    }
    return m;
}

inline json measure_to_json(const FinSpace& sp, const Measure& m) {
    json out = json::object();
    for (int at = 0; at < sp.num_atoms(); ++at)
        if (m.w[at] != 0) out[sp.states[mask_bits(sp.atoms[at])[0]]] = to_string(m.w[at]);
    return out;
}

} // namespace detail

inline Model parse_model(const json& j) {
    Model out;
    out.kind = j.value("kind", "lmp");
    out.note = j.value("note", "");
    FinSpace sp = detail::space_from_json(j);
    std::vector<std::string> labels;
    if (!j.contains("labels")) fail(errc::bad_model, "missing 'labels'");
    for (const auto& l : j["labels"]) labels.push_back(l.get<std::string>());
    if (out.kind == "lmp") {
        if (!j.contains("kernel")) fail(errc::bad_model, "missing 'kernel'");
        std::vector<std::vector<Measure>> per_state(labels.size());
        for (size_t li = 0; li < labels.size(); ++li) {
            per_state[li].assign(sp.num_states(), Measure(sp.num_atoms()));
            if (!j["kernel"].contains(labels[li])) continue; // all-zero rows
            const json& rows = j["kernel"][labels[li]];
            for (auto it = rows.begin(); it != rows.end(); ++it) {
                int idx = sp.state_index(it.key());
                if (idx < 0)
                    fail(errc::unknown_label_or_state, "kernel row for unknown state '" + it.key() + "'");
                per_state[li][idx] = detail::measure_from_json(sp, it.value());
            }
        }
        out.lmp = validate_lmp(sp, labels, per_state);
    } else if (out.kind == "nlmp") {
        if (!j.contains("transitions")) fail(errc::bad_model, "missing 'transitions'");
        std::vector<std::vector<std::vector<Measure>>> per_state(labels.size());
        for (size_t li = 0; li < labels.size(); ++li) {
            per_state[li].assign(sp.num_states(), {});
            if (!j["transitions"].contains(labels[li])) continue; // empty sets
            const json& rows = j["transitions"][labels[li]];
            for (auto it = rows.begin(); it != rows.end(); ++it) {
                int idx = sp.state_index(it.key());
                if (idx < 0)
                    fail(errc::unknown_label_or_state,
                         "transitions for unknown state '" + it.key() + "'");
                for (const auto& mj : it.value())
                    per_state[li][idx].push_back(detail::measure_from_json(sp, mj));
            }
        }
        out.nlmp = validate_nlmp(sp, labels, per_state);
    } else {
        fail(errc::bad_model, "kind must be 'lmp' or 'nlmp'");
    }
    return out;
}

inline json sigma_to_json(const FinSpace& sp) {
    json sigma = json::array();
    for (Mask a : sp.atoms) {
        json block = json::array();
        for (int i : mask_bits(a)) block.push_back(sp.states[i]);
        sigma.push_back(block);
    }
    return sigma;
}

inline json serialize(const Lmp& s, const std::string& note = "") {
    json out;
    out["kind"] = "lmp";
    out["labels"] = s.labels;
    out["states"] = s.space.states;
    out["sigma"] = sigma_to_json(s.space);
    json kernel = json::object();
    for (int li = 0; li < s.num_labels(); ++li) {
        json rows = json::object();
        for (int st = 0; st < s.space.num_states(); ++st)
            rows[s.space.states[st]] = detail::measure_to_json(s.space, s.tau(li, st));
        kernel[s.labels[li]] = rows;
    }
    out["kernel"] = kernel;
    if (!note.empty()) out["note"] = note;
    return out;
}

inline json serialize(const Nlmp& n, const std::string& note = "") {
    json out;
    out["kind"] = "nlmp";
    out["labels"] = n.labels;
    out["states"] = n.space.states;
    out["sigma"] = sigma_to_json(n.space);
    json trans = json::object();
    for (int li = 0; li < n.num_labels(); ++li) {
        json rows = json::object();
        for (int st = 0; st < n.space.num_states(); ++st) {
            json ts = json::array();
            for (const auto& m : n.tset(li, st)) ts.push_back(detail::measure_to_json(n.space, m));
            rows[n.space.states[st]] = ts;
        }
        trans[n.labels[li]] = rows;
    }
    out["transitions"] = trans;
    if (!note.empty()) out["note"] = note;
    return out;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::bad_model, "cannot open '" + path + "'");
    json j;
    in >> j;
    return j;
}

inline Model load_model_file(const std::string& path) { return parse_model(load_json_file(path)); }

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) fail(errc::bad_model, "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

// --------------------------------------------------------------------------
// Relations, morphisms and set families

inline Rel relation_from_json(const json& j, const FinSpace& left, const FinSpace& right) {
    Rel r(left.num_states(), right.num_states());
    if (!j.contains("pairs")) fail(errc::bad_model, "missing 'pairs'");
    for (const auto& p : j["pairs"]) {
        int a = left.state_index(p.at(0).get<std::string>());
        int b = right.state_index(p.at(1).get<std::string>());
        if (a < 0 || b < 0) fail(errc::unknown_label_or_state, "relation mentions unknown state");
        r.add(a, b);
    }
    return r;
}

inline json relation_to_json(const Rel& r, const FinSpace& left, const FinSpace& right) {
    json pairs = json::array();
    for (auto [a, b] : r.pairs()) pairs.push_back({left.states[a], right.states[b]});
    json out;
    out["pairs"] = pairs;
    return out;
}

inline Morphism morphism_from_json(const json& j, const FinSpace& src, const FinSpace& dst) {
    if (!j.contains("map")) fail(errc::bad_model, "missing 'map'");
    Morphism f;
    f.map.assign(src.num_states(), -1);
    for (auto it = j["map"].begin(); it != j["map"].end(); ++it) {
        int a = src.state_index(it.key());
        int b = dst.state_index(it.value().get<std::string>());
        if (a < 0 || b < 0) fail(errc::unknown_label_or_state, "map mentions unknown state");
        f.map[a] = b;
    }
    for (int v : f.map)
        if (v < 0) fail(errc::bad_model, "map is not total");
    return f;
}

inline std::vector<Mask> family_from_json(const json& j, const FinSpace& sp) {
    std::vector<Mask> out;
    if (!j.contains("sets")) fail(errc::bad_model, "missing 'sets'");
    for (const auto& set : j["sets"]) {
        Mask m = 0;
        for (const auto& name : set) {
            int idx = sp.state_index(name.get<std::string>());
            if (idx < 0) fail(errc::unknown_label_or_state, "family mentions unknown state");
            m |= bit(idx);
        }
        if (!sp.measurable(m)) fail(errc::bad_model, "family contains a non-measurable set");
        out.push_back(sp.atoms_of(m));
    }
    return out;
}

// --------------------------------------------------------------------------
// Game transcripts

inline json transcript_to_json(const Nlmp& n0, const Nlmp& n1, const Transcript& t) {
    json out;
    out["start"] = {n0.space.states[t.start.x0], n1.space.states[t.start.x1]};
    json rounds = json::array();
    for (const auto& r : t.rounds) {
        json jr;
        jr["position"] = {n0.space.states[r.position.x0], n1.space.states[r.position.x1]};
        json sm;
        sm["label"] = r.smove.label;
        sm["side"] = r.smove.side;
        sm["mu"] = r.smove.mu_index;
        json pairs = json::array();
        const FinSpace& si = r.smove.side == 0 ? n0.space : n1.space;
        const FinSpace& so = r.smove.side == 0 ? n1.space : n0.space;
        for (const auto& [c, c2] : r.smove.set_pairs) {
            json left = json::array(), right = json::array();
            for (int i : mask_bits(si.states_of(c))) left.push_back(si.states[i]);
            for (int i : mask_bits(so.states_of(c2))) right.push_back(so.states[i]);
            pairs.push_back({left, right});
        }
        sm["pairs"] = pairs;
        jr["spoiler"] = sm;
        if (r.dmove_made)
            jr["duplicator"] = {{"x0", n0.space.states[r.dmove.y0]},
                                {"x1", n1.space.states[r.dmove.y1]},
                                {"k", r.dmove.k}};
        rounds.push_back(jr);
    }
    out["rounds"] = rounds;
    out["winner"] = t.winner;
    out["reason"] = t.reason;
    out["abandoned"] = t.abandoned;
    return out;
}

inline Transcript transcript_from_json(const Nlmp& n0, const Nlmp& n1, const json& j) {
    Transcript t;
    t.start.x0 = n0.space.state_index(j["start"].at(0).get<std::string>());
    t.start.x1 = n1.space.state_index(j["start"].at(1).get<std::string>());
    for (const auto& jr : j["rounds"]) {
        PlayRound r;
        r.position.x0 = n0.space.state_index(jr["position"].at(0).get<std::string>());
        r.position.x1 = n1.space.state_index(jr["position"].at(1).get<std::string>());
        const json& sm = jr["spoiler"];
        r.smove.label = sm["label"].get<std::string>();
        r.smove.side = sm["side"].get<int>();
        r.smove.mu_index = sm["mu"].get<int>();
        const FinSpace& si = r.smove.side == 0 ? n0.space : n1.space;
        const FinSpace& so = r.smove.side == 0 ? n1.space : n0.space;
        for (const auto& jp : sm["pairs"]) {
            Mask c = 0, c2 = 0;
            for (const auto& name : jp.at(0)) c |= bit(si.state_index(name.get<std::string>()));
            for (const auto& name : jp.at(1)) c2 |= bit(so.state_index(name.get<std::string>()));
            r.smove.set_pairs.emplace_back(si.atoms_of(c), so.atoms_of(c2));
        }
        if (jr.contains("duplicator")) {
            r.dmove_made = true;
            r.dmove.y0 = n0.space.state_index(jr["duplicator"]["x0"].get<std::string>());
            r.dmove.y1 = n1.space.state_index(jr["duplicator"]["x1"].get<std::string>());
            r.dmove.k = jr["duplicator"]["k"].get<int>();
        }
        t.rounds.push_back(std::move(r));
    }
    t.winner = j.value("winner", "");
    t.reason = j.value("reason", "");
    t.abandoned = j.value("abandoned", false);
    return t;
}

// --------------------------------------------------------------------------
// Random model generation (deterministic per seed; avoids std distributions,
// whose output is implementation-defined)

struct GenSpec {
    int max_states = 4;
    int max_atoms = 4;
    int denominator_bound = 8;
    std::vector<std::string> labels = {"a"};
    std::uint64_t seed = 0;
    bool nlmp = false;
    bool coarse = false; // at least one non-singleton atom
    int max_measures = 2;
};

namespace detail {

inline std::uint64_t draw(std::mt19937_64& g, std::uint64_t n) { return n == 0 ? 0 : g() % n; }

inline Measure random_measure(std::mt19937_64& g, int num_atoms, int den_bound) {
    int den = 1 + static_cast<int>(draw(g, den_bound));
    int budget = static_cast<int>(draw(g, den + 1)); // total mass = budget/den
    Measure m(num_atoms);
    for (int at = 0; at < num_atoms && budget > 0; ++at) {
        int take = static_cast<int>(draw(g, budget + 1));
        if (at == num_atoms - 1 && draw(g, 2) == 0) take = budget; // sometimes spend the rest
        m.w[at] = rat(take, den);
        budget -= take;
    }
    check_subprobability(m);
    return m;
}

} // namespace detail

inline json gen_random(const GenSpec& spec) {
    if (spec.max_states < 1 || spec.max_atoms < 1 || spec.denominator_bound < 1)
        fail(errc::bad_model, "bounds must be positive");
    std::mt19937_64 g(spec.seed);
    const int n = 1 + static_cast<int>(detail::draw(g, spec.max_states));
    std::vector<std::string> states;
    for (int i = 0; i < n; ++i) {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "q%02d", i);
        states.emplace_back(buf);
    }
    // atom partition: powerset unless coarse is requested
    std::vector<Mask> atoms;
    if (spec.coarse && n >= 2) {
        int target = std::max(1, std::min(spec.max_atoms, n - 1));
        int blocks = 1 + static_cast<int>(detail::draw(g, target));
        std::vector<int> block_of(n);
        for (int i = 0; i < n; ++i) block_of[i] = static_cast<int>(detail::draw(g, blocks));
        block_of[detail::draw(g, n)] = 0; // keep block 0 nonempty
        std::vector<Mask> blocks_mask(blocks, 0);
        for (int i = 0; i < n; ++i) blocks_mask[block_of[i]] |= bit(i);
        for (Mask m : blocks_mask)
            if (m) atoms.push_back(m);
        // force a non-singleton atom
        bool coarse_ok = false;
        for (Mask m : atoms) coarse_ok |= popcount(m) > 1;
        if (!coarse_ok) {
            atoms.clear();
            atoms.push_back(bit(0) | bit(1));
            for (int i = 2; i < n; ++i) atoms.push_back(bit(i));
        }
        std::sort(atoms.begin(), atoms.end(),
                  [](Mask a, Mask b) { return mask_bits(a)[0] < mask_bits(b)[0]; });
    } else {
        for (int i = 0; i < n; ++i) atoms.push_back(bit(i));
    }
    FinSpace sp = make_space(states, atoms);

    if (!spec.nlmp) {
        std::vector<std::vector<Measure>> per_atom(spec.labels.size());
        for (size_t li = 0; li < spec.labels.size(); ++li)
            for (int at = 0; at < sp.num_atoms(); ++at)
                per_atom[li].push_back(
                    detail::random_measure(g, sp.num_atoms(), spec.denominator_bound));
        Lmp lmp = make_lmp(sp, spec.labels, per_atom);
        return serialize(lmp);
    }
    std::vector<std::vector<std::vector<Measure>>> per_state(spec.labels.size());
    for (size_t li = 0; li < spec.labels.size(); ++li) {
        per_state[li].resize(sp.num_states());
        for (int at = 0; at < sp.num_atoms(); ++at) {
            int count = static_cast<int>(detail::draw(g, spec.max_measures + 1));
            std::vector<Measure> ts;
            for (int k = 0; k < count; ++k)
                ts.push_back(detail::random_measure(g, sp.num_atoms(), spec.denominator_bound));
            for (int st : mask_bits(sp.atoms[at])) per_state[li][st] = ts;
        }
    }
    Nlmp nlmp = validate_nlmp(sp, spec.labels, per_state);
    return serialize(nlmp);
}

inline Lmp gen_random_lmp(const GenSpec& spec) { return parse_model(gen_random(spec)).lmp; }
inline Nlmp gen_random_nlmp(const GenSpec& spec) {
    GenSpec s = spec;
    s.nlmp = true;
    return parse_model(gen_random(s)).nlmp;
}

} // namespace lmpwb
