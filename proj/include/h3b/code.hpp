#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "h3b/core.hpp"
#include "h3b/polyhedron.hpp"

// Symbol sequences over the face alphabet {1..k} and the billiard grammar.
//
// Rule (a): no symbol repeats immediately.
// Rule (b): for adjacent faces i,j no factor equals (ij)^(lambda_ij + 1);
//           equivalently no alternating {i,j} run reaches 2 lambda_ij + 2
//           symbols. Odd runs one symbol short of that bound, like 1212121
//           for lambda = 3, pass this check by design; whether such runs
//           are realizable by an actual trajectory is a separate geometric
//           question (reconstruction reports failures on its own).
// Rule (c): no periodic tail whose symbol set lies inside one vertex's
//           incident face set. Decidable only with a periodic tail in hand,
//           hence vacuous on finite words.
//
// The class of eventually periodic bi-infinite sequences (left period +
// finite core + right period) is the shape every rule test here needs:
// rules (a) and (b) are factor-local and a bounded window suffices, and
// rule (c) needs exactly the tail periods.

namespace h3b {

struct Word {
    std::vector<int> symbols;
    int point = 0;  // index of the symbol right of the point, in [0, size]

    int size() const { return static_cast<int>(symbols.size()); }
    // symbol at position n relative to the point
    int at(long n) const { return symbols.at(static_cast<std::size_t>(n + point)); }
    long min_pos() const { return -point; }
    long max_pos() const { return size() - point - 1; }
};

struct EventuallyPeriodicCode {
    std::vector<int> left_period;   // repeats to -infinity
    Word core;                      // carries the point
    std::vector<int> right_period;  // repeats to +infinity
    int alphabet = 0;

    int at(long n) const {
        long lo = -core.point;
        long hi = core.size() - core.point;  // one past the core
        if (n >= hi) {
            long m = (n - hi) % static_cast<long>(right_period.size());
            return right_period[static_cast<std::size_t>(m)];
        }
        if (n < lo) {
            long m = (lo - 1 - n) % static_cast<long>(left_period.size());
            return left_period[left_period.size() - 1 - static_cast<std::size_t>(m)];
        }
        return core.symbols[static_cast<std::size_t>(n + core.point)];
    }
};

enum class Rule { A, B, C };

struct RuleViolation {
    Rule rule;
    enum class Tail { none, left, right };
    long position = 0;    // position of the witness relative to the point
    Tail tail = Tail::none;
    std::string witness;  // the offending factor (or period, for rule C)

    std::string to_string() const {
        std::string r = rule == Rule::A ? "A" : rule == Rule::B ? "B" : "C";
        std::string where = tail == Tail::left    ? "left tail"
                            : tail == Tail::right ? "right tail"
                                                  : "position " + std::to_string(position);
        return "RuleViolation(" + r + ", " + where + ", \"" + witness + "\")";
    }
};

// nullopt means the sequence is admissible
using ValidationResult = std::optional<RuleViolation>;

namespace detail {

inline void check_alphabet(const std::vector<int>& symbols, int k) {
    for (int s : symbols)
        if (s < 1 || s > k)
            throw Error(Errc::alphabet_mismatch,
                        "symbol " + std::to_string(s) + " outside 1.." + std::to_string(k));
}

inline std::string symbols_to_string(const std::vector<int>& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::to_string(w[i]);
    return s;
}

// rules (a) and (b) on a plain symbol vector; positions are reported
// relative to `base` (the relative position of symbols[0])
inline ValidationResult check_factor_rules(const std::vector<int>& w, long base,
                                           const IdealPolyhedron& poly) {
    int n = static_cast<int>(w.size());
    for (int i = 0; i + 1 < n; ++i)
        if (w[static_cast<std::size_t>(i)] == w[static_cast<std::size_t>(i + 1)])
            return RuleViolation{Rule::A, base + i, RuleViolation::Tail::none,
                                 std::to_string(w[static_cast<std::size_t>(i)]) + " " +
                                     std::to_string(w[static_cast<std::size_t>(i)])};
    int i = 0;
    while (i + 1 < n) {
        int a = w[static_cast<std::size_t>(i)], b = w[static_cast<std::size_t>(i + 1)];
        int j = i + 1;
        while (j + 1 < n && w[static_cast<std::size_t>(j + 1)] == w[static_cast<std::size_t>(j - 1)])
            ++j;
        if (poly.adjacent(a, b)) {
            int forb = 2 * poly.lambda(a, b) + 2;  // length of (ab)^(lambda+1)
            if (j - i + 1 >= forb) {
                std::vector<int> factor(w.begin() + i, w.begin() + i + forb);
                return RuleViolation{Rule::B, base + i, RuleViolation::Tail::none,
                                     symbols_to_string(factor)};
            }
        }
        i = j;
    }
    return std::nullopt;
}

}  // namespace detail

// Rules (a) and (b) on a finite pointed word; rule (c) is vacuous here.
inline ValidationResult validate_word(const Word& w, const IdealPolyhedron& poly) {
    detail::check_alphabet(w.symbols, poly.face_count());
    return detail::check_factor_rules(w.symbols, -w.point, poly);
}

// All three rules on an eventually periodic code. Rules (a) and (b) are
// checked on a window of the core plus 2 max(lambda) + 2 period copies per
// side, which any bounded forbidden factor must intersect; rule (c) holds
// iff neither tail's symbol set fits inside one vertex's incident set.
inline ValidationResult validate_code(const EventuallyPeriodicCode& c,
                                      const IdealPolyhedron& poly) {
    if (c.left_period.empty() || c.right_period.empty())
        throw Error(Errc::invalid_spec, "periods must be nonempty");
    detail::check_alphabet(c.left_period, poly.face_count());
    detail::check_alphabet(c.right_period, poly.face_count());
    detail::check_alphabet(c.core.symbols, poly.face_count());

    int copies = 2 * poly.max_lambda() + 2;
    std::vector<int> window;
    for (int r = 0; r < copies; ++r)
        window.insert(window.end(), c.left_period.begin(), c.left_period.end());
    window.insert(window.end(), c.core.symbols.begin(), c.core.symbols.end());
    for (int r = 0; r < copies; ++r)
        window.insert(window.end(), c.right_period.begin(), c.right_period.end());
    long base = -static_cast<long>(copies * c.left_period.size()) - c.core.point;
    if (auto v = detail::check_factor_rules(window, base, poly)) return v;

    auto tail_in_vertex = [&](const std::vector<int>& period) {
        for (const Vertex& v : poly.vertices()) {
            bool all = true;
            for (int s : period)
                if (std::find(v.incident_labels.begin(), v.incident_labels.end(), s) ==
                    v.incident_labels.end()) {
                    all = false;
                    break;
                }
            if (all) return true;
        }
        return false;
    };
    if (tail_in_vertex(c.left_period))
        return RuleViolation{Rule::C, 0, RuleViolation::Tail::left,
                             detail::symbols_to_string(c.left_period)};
    if (tail_in_vertex(c.right_period))
        return RuleViolation{Rule::C, 0, RuleViolation::Tail::right,
                             detail::symbols_to_string(c.right_period)};
    return std::nullopt;
}

// The finite forbidden set: every immediate repetition ii, and for each
// adjacent pair the alternations (ij)^(lambda+1) and (ji)^(lambda+1).
inline std::vector<std::vector<int>> forbidden_words(const IdealPolyhedron& poly) {
    std::vector<std::vector<int>> out;
    for (int i = 1; i <= poly.face_count(); ++i) out.push_back({i, i});
    for (const AdjacencyEntry& e : poly.adjacency()) {
        std::vector<int> ij, ji;
        for (int r = 0; r < e.lambda + 1; ++r) {
            ij.push_back(e.i);
            ij.push_back(e.j);
            ji.push_back(e.j);
            ji.push_back(e.i);
        }
        out.push_back(ij);
        out.push_back(ji);
    }
    return out;
}

inline bool in_X_tilde(const EventuallyPeriodicCode& c, const IdealPolyhedron& poly) {
    auto v = validate_code(c, poly);
    return !v || v->rule == Rule::C;
}

inline bool in_X(const EventuallyPeriodicCode& c, const IdealPolyhedron& poly) {
    return !validate_code(c, poly).has_value();
}

inline Word shift(const Word& w, int s) {
    int p = w.point + s;
    if (p < 0 || p > w.size())
        throw Error(Errc::point_out_of_range,
                    "shift by " + std::to_string(s) + " leaves the word");
    Word r = w;
    r.point = p;
    return r;
}

// The point moves by s; the underlying bi-infinite sequence is unchanged.
// The core absorbs period copies when the point would leave it.
inline EventuallyPeriodicCode shift(const EventuallyPeriodicCode& c, int s) {
    EventuallyPeriodicCode r = c;
    r.core.point += s;
    while (r.core.point > r.core.size()) {
        r.core.symbols.insert(r.core.symbols.end(), r.right_period.begin(),
                              r.right_period.end());
    }
    while (r.core.point < 0) {
        r.core.symbols.insert(r.core.symbols.begin(), r.left_period.begin(),
                              r.left_period.end());
        r.core.point += static_cast<int>(r.left_period.size());
    }
    return r;
}

struct SequenceDistance {
    double value = 0;
    bool at_horizon = false;  // agreement persisted to the horizon
};

// d(x,y) = 1/2^m for the largest m with x_n = y_n whenever |n| < m.
// Structural equality of the representations is decided exactly (two
// eventually periodic tails agreeing on a stretch longer than the sum of
// their periods agree forever), in which case the distance is 0.
inline SequenceDistance sequence_metric(const EventuallyPeriodicCode& x,
                                        const EventuallyPeriodicCode& y, int horizon) {
    if (x.alphabet != y.alphabet)
        throw Error(Errc::alphabet_mismatch, "codes over different alphabets");
    long right = std::max(x.core.size() - x.core.point, y.core.size() - y.core.point) +
                 static_cast<long>(x.right_period.size() + y.right_period.size()) + 2;
    long left = std::max(x.core.point, y.core.point) +
                static_cast<long>(x.left_period.size() + y.left_period.size()) + 2;
    bool equal = true;
    for (long n = -left; n < right && equal; ++n) equal = x.at(n) == y.at(n);
    if (equal) return {0.0, false};

    for (int m = 0; m < horizon; ++m)
        if (x.at(m) != y.at(m) || x.at(-m) != y.at(-m))
            return {std::pow(0.5, m), false};
    return {std::pow(0.5, horizon), true};
}

// true iff some re-pointing by |s| <= horizon makes the sequences agree on
// |n| < horizon
inline bool orbit_equal(const EventuallyPeriodicCode& x, const EventuallyPeriodicCode& y,
                        int horizon) {
    if (x.alphabet != y.alphabet)
        throw Error(Errc::alphabet_mismatch, "codes over different alphabets");
    for (int s = -horizon; s <= horizon; ++s) {
        bool ok = true;
        for (long n = -horizon + 1; n < horizon && ok; ++n) ok = x.at(n + s) == y.at(n);
        if (ok) return true;
    }
    return false;
}

// ---- text format ----
// Finite word:          "1 2 . 1 3"    (the point defaults to 0 if omitted)
// Eventually periodic:  "(3 4)* 1 2 . 1 3 (2 4)*"

inline std::string format_word(const Word& w) {
    std::string s;
    for (int i = 0; i <= w.size(); ++i) {
        if (i == w.point) s += s.empty() ? "." : " .";
        if (i < w.size()) {
            if (!s.empty()) s += " ";
            s += std::to_string(w.symbols[static_cast<std::size_t>(i)]);
        }
    }
    return s;
}

inline std::string format_code(const EventuallyPeriodicCode& c) {
    return "(" + detail::symbols_to_string(c.left_period) + ")* " + format_word(c.core) +
           " (" + detail::symbols_to_string(c.right_period) + ")*";
}

inline std::variant<Word, EventuallyPeriodicCode> parse_code(const std::string& text,
                                                             int alphabet = 0) {
    std::vector<std::vector<int>> periods;
    std::vector<int> core;
    std::optional<int> point;
    std::vector<int> period_slots;  // token index where each period appeared

    std::size_t i = 0;
    int token_count = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto read_int = [&]() -> int {
        std::size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) throw Error(Errc::invalid_spec, "expected a symbol in code text");
        int v = std::stoi(text.substr(i, j - i));
        i = j;
        return v;
    };
    while (skip_ws(), i < text.size()) {
        if (text[i] == '(') {
            ++i;
            std::vector<int> p;
            while (skip_ws(), i < text.size() && text[i] != ')') p.push_back(read_int());
            if (i >= text.size() || text[i] != ')')
                throw Error(Errc::invalid_spec, "unterminated period group");
            ++i;
            skip_ws();
            if (i >= text.size() || text[i] != '*')
                throw Error(Errc::invalid_spec, "period group must be followed by '*'");
            ++i;
            if (p.empty()) throw Error(Errc::invalid_spec, "empty period");
            periods.push_back(std::move(p));
            period_slots.push_back(token_count++);
        } else if (text[i] == '.') {
            ++i;
            if (point) throw Error(Errc::invalid_spec, "more than one point in code text");
            point = static_cast<int>(core.size());
        } else {
            core.push_back(read_int());
            ++token_count;
        }
    }

    auto infer_alphabet = [&](int seen) {
        int m = seen;
        for (int s : core) m = std::max(m, s);
        for (const auto& p : periods)
            for (int s : p) m = std::max(m, s);
        return m;
    };

    if (periods.empty()) {
        Word w{core, point.value_or(0)};
        return w;
    }
    if (periods.size() != 2 || period_slots.front() != 0 ||
        period_slots.back() != token_count - 1)
        throw Error(Errc::invalid_spec,
                    "eventually periodic codes need one period at each end");
    EventuallyPeriodicCode c;
    c.left_period = periods[0];
    c.right_period = periods[1];
    c.core = Word{core, point.value_or(0)};
    c.alphabet = alphabet > 0 ? alphabet : infer_alphabet(0);
    return c;
}

}  // namespace h3b
