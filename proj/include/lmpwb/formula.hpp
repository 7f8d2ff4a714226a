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

#include <cctype>
#include <memory>
#include <string>

#include "lmpwb/measure.hpp"

namespace lmpwb {

// Formulas of the modal logic: tt, conjunction, and the probabilistic
// modality <a>{cmp q} phi. LMP semantics admits only ">"; the NLMP semantics
// takes any comparator.
struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { truth, conj, diamond };
    Kind kind = Kind::truth;
    FormulaPtr lhs, rhs;              // conj
    std::string label;                // diamond
    Cmp cmp = Cmp::gt;                // diamond
    Rational q;                       // diamond
    FormulaPtr sub;                   // diamond
};

inline FormulaPtr f_true() {
    static const FormulaPtr t = std::make_shared<Formula>();
    return t;
}

inline FormulaPtr f_and(FormulaPtr l, FormulaPtr r) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::conj;
    f->lhs = std::move(l);
    f->rhs = std::move(r);
    return f;
}

inline FormulaPtr f_diamond(std::string label, Cmp cmp, Rational q, FormulaPtr sub) {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::diamond;
    f->label = std::move(label);
    f->cmp = cmp;
    f->q = std::move(q);
    f->sub = std::move(sub);
    return f;
}

inline std::string to_string(const FormulaPtr& f) {
    switch (f->kind) {
    case Formula::Kind::truth: return "tt";
    case Formula::Kind::conj: return "(" + to_string(f->lhs) + " & " + to_string(f->rhs) + ")";
    case Formula::Kind::diamond:
        return "<" + f->label + ">{" + cmp_name(f->cmp) + to_string(f->q) + "} " + to_string(f->sub);
    }
    return "tt";
}

inline int modal_depth(const FormulaPtr& f) {
    switch (f->kind) {
    case Formula::Kind::truth: return 0;
    case Formula::Kind::conj: return std::max(modal_depth(f->lhs), modal_depth(f->rhs));
    case Formula::Kind::diamond: return 1 + modal_depth(f->sub);
    }
    return 0;
}

namespace detail {

class FormulaParser {
public:
    explicit FormulaParser(const std::string& text) : text_(text) {}

    FormulaPtr parse() {
        FormulaPtr f = formula();
        skip_ws();
        if (pos_ != text_.size()) err("trailing input");
        return f;
    }

private:
    const std::string& text_;
    size_t pos_ = 0;

    [[noreturn]] void err(const std::string& what) {
        fail(errc::syntax_error, what + " at position " + std::to_string(pos_));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!eat(c)) err(std::string("expected '") + c + "'");
    }

    FormulaPtr formula() {
        skip_ws();
        if (pos_ + 1 < text_.size() && text_.compare(pos_, 2, "tt") == 0) {
            pos_ += 2;
            return f_true();
        }
        if (eat('(')) {
            FormulaPtr l = formula();
            expect('&');
            FormulaPtr r = formula();
            expect(')');
            return f_and(std::move(l), std::move(r));
        }
        if (eat('<')) {
            skip_ws();
            size_t start = pos_;
            while (pos_ < text_.size() && text_[pos_] != '>') ++pos_;
            if (pos_ == text_.size() || pos_ == start) err("expected label");
            std::string label = text_.substr(start, pos_ - start);
            while (!label.empty() && std::isspace(static_cast<unsigned char>(label.back())))
                label.pop_back();
            ++pos_; // '>'
            expect('{');
            Cmp cmp = comparator();
            Rational q = rational();
            expect('}');
            FormulaPtr sub = formula();
            return f_diamond(std::move(label), cmp, std::move(q), std::move(sub));
        }
        err("expected formula");
    }

    Cmp comparator() {
        skip_ws();
        if (pos_ >= text_.size()) err("expected comparator");
        char c = text_[pos_];
        if (c == '<') {
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') {
                ++pos_;
                return Cmp::le;
            }
            return Cmp::lt;
        }
        if (c == '>') {
            ++pos_;
            if (pos_ < text_.size() && text_[pos_] == '=') {
                ++pos_;
                return Cmp::ge;
            }
            return Cmp::gt;
        }
        err("expected comparator");
    }

    Rational rational() {
        skip_ws();
        size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/' ||
                text_[pos_] == '-'))
            ++pos_;
        if (pos_ == start) err("expected rational");
        Rational q = parse_rational(text_.substr(start, pos_ - start));
        if (q < 0 || q > 1) err("threshold outside [0,1]");
        return q;
    }
};

} // namespace detail

inline FormulaPtr parse_formula(const std::string& text) {
    return detail::FormulaParser(text).parse();
}

} // namespace lmpwb
