#include "pbvi/pomdp_file.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "pbvi/errors.hpp"

namespace pbvi {

namespace {

struct Token {
    std::string text;
    std::size_t line;
};

struct Directive {
    std::string key;
    std::vector<std::string> values;
    std::size_t line;
};

struct Lexed {
    std::vector<Token> tokens;
    std::vector<Directive> directives;
};

Lexed lex(std::string_view text) {
    Lexed out;
    std::size_t line = 1;
    std::size_t i = 0;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            out.tokens.push_back({std::move(current), line});
            current.clear();
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (c == '#') {
            flush();
            const std::size_t end = std::min(text.find('\n', i), text.size());
            std::string_view comment = text.substr(i, end - i);
            if (comment.size() > 2 && comment[1] == '!') {
                // "#! key: v1 v2 ..."
                std::string body(comment.substr(2));
                const auto colon = body.find(':');
                if (colon != std::string::npos) {
                    Directive d;
                    std::istringstream keyStream(body.substr(0, colon));
                    keyStream >> d.key;
                    std::istringstream rest(body.substr(colon + 1));
                    for (std::string v; rest >> v;) d.values.push_back(v);
                    d.line = line;
                    out.directives.push_back(std::move(d));
                }
            }
            i = end;
            continue;
        }
        if (c == '\n') {
            flush();
            ++line;
        } else if (c == ':') {
            flush();
            out.tokens.push_back({":", line});
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
            flush();
        } else {
            current.push_back(c);
        }
        ++i;
    }
    flush();
    return out;
}

std::optional<double> to_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

bool is_unsigned_integer(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr std::array<std::string_view, 9> kKeywords = {"discount", "values", "states",  "actions", "observations",
                                                       "start",    "T",      "O",       "R"};

enum class Kind { State, Action, Observation };

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::State: return "state";
        case Kind::Action: return "action";
        case Kind::Observation: return "observation";
    }
    return "";
}

struct RewardRule {
    long action, start, end, obs;  // -1 = wildcard
    double value;
};

class Parser {
public:
    explicit Parser(Lexed lexed) : tokens_(std::move(lexed.tokens)), directives_(std::move(lexed.directives)) {}

    PomdpModel parse() {
        while (pos_ < tokens_.size()) {
            const Token& t = tokens_[pos_];
            if (!at_keyword()) throw ParseError("unexpected token '" + t.text + "'", t.line);
            if (t.text == "discount") parse_discount();
            else if (t.text == "values") parse_values();
            else if (t.text == "states") parse_declaration(Kind::State);
            else if (t.text == "actions") parse_declaration(Kind::Action);
            else if (t.text == "observations") parse_declaration(Kind::Observation);
            else if (t.text == "start") parse_start();
            else if (t.text == "T") parse_transition();
            else if (t.text == "O") parse_observation();
            else parse_reward();
        }
        return finish();
    }

private:
    std::vector<Token> tokens_;
    std::vector<Directive> directives_;
    std::size_t pos_ = 0;

    std::optional<double> discount_;
    bool cost_ = false;
    std::size_t counts_[3] = {0, 0, 0};
    std::vector<std::string> names_[3];
    std::unordered_map<std::string, std::size_t> lookup_[3];
    std::vector<double> start_;
    std::vector<double> transition_;
    std::vector<double> observation_;
    std::vector<RewardRule> rewards_;

    std::size_t S() const { return counts_[0]; }
    std::size_t A() const { return counts_[1]; }
    std::size_t Z() const { return counts_[2]; }

    std::size_t line() const { return pos_ < tokens_.size() ? tokens_[pos_].line : (tokens_.empty() ? 0 : tokens_.back().line); }

    bool at_keyword(std::size_t at) const {
        if (at >= tokens_.size()) return false;
        const std::string& t = tokens_[at].text;
        if (std::find(kKeywords.begin(), kKeywords.end(), t) == kKeywords.end()) return false;
        if (at + 1 >= tokens_.size()) return false;
        const std::string& next = tokens_[at + 1].text;
        return next == ":" || (t == "start" && (next == "include" || next == "exclude"));
    }
    bool at_keyword() const { return at_keyword(pos_); }

    const Token& next(const char* expecting) {
        if (pos_ >= tokens_.size()) throw ParseError(std::string("unexpected end of input, expected ") + expecting, line());
        return tokens_[pos_++];
    }

    void expect_colon() {
        const Token& t = next("':'");
        if (t.text != ":") throw ParseError("expected ':' but found '" + t.text + "'", t.line);
    }

    bool peek_colon() const { return pos_ < tokens_.size() && tokens_[pos_].text == ":"; }

    bool peek_is(std::string_view word) const { return pos_ < tokens_.size() && tokens_[pos_].text == word; }

    double number(const char* what) {
        const Token& t = next(what);
        auto v = to_number(t.text);
        if (!v) throw ParseError(std::string("expected ") + what + " but found '" + t.text + "'", t.line);
        return *v;
    }

    std::vector<double> numbers(std::size_t n, const char* what) {
        std::vector<double> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (pos_ >= tokens_.size() || at_keyword())
                throw ParseError("expected " + std::to_string(n) + " " + what + " values, found " + std::to_string(i), line());
            out.push_back(number(what));
        }
        return out;
    }

    void require_counts(bool needObservations = true) {
        if (S() == 0 || A() == 0 || (needObservations && Z() == 0))
            throw ParseError("states, actions and observations must be declared before this entry", line());
    }

    void ensure_tables() {
        if (transition_.empty()) transition_.assign(A() * S() * S(), 0.0);
        if (observation_.empty()) observation_.assign(A() * S() * Z(), 0.0);
    }

    /// Resolves a name, index or '*' to the list of matching indices (-1 for wildcard).
    long identifier(Kind kind) {
        const Token& t = next(kind_name(kind));
        if (t.text == "*") return -1;
        const auto k = static_cast<std::size_t>(kind);
        if (is_unsigned_integer(t.text)) {
            const unsigned long long idx = std::strtoull(t.text.c_str(), nullptr, 10);
            if (idx >= counts_[k])
                throw ParseError(std::string(kind_name(kind)) + " index " + t.text + " out of range", t.line);
            return static_cast<long>(idx);
        }
        auto it = lookup_[k].find(t.text);
        if (it == lookup_[k].end()) throw UnknownIdentifier(t.text, t.line);
        return static_cast<long>(it->second);
    }

    static std::pair<std::size_t, std::size_t> span_of(long id, std::size_t n) {
        return id < 0 ? std::pair<std::size_t, std::size_t>{0, n}
                      : std::pair<std::size_t, std::size_t>{static_cast<std::size_t>(id), static_cast<std::size_t>(id) + 1};
    }

    void parse_discount() {
        pos_++;
        expect_colon();
        const std::size_t l = line();
        const double d = number("discount");
        if (!(d >= 0.0 && d < 1.0)) throw ModelError("line " + std::to_string(l) + ": discount must lie in [0, 1)");
        discount_ = d;
    }

    void parse_values() {
        pos_++;
        expect_colon();
        const Token& t = next("'reward' or 'cost'");
        if (t.text == "reward") cost_ = false;
        else if (t.text == "cost") cost_ = true;
        else throw ParseError("values must be 'reward' or 'cost', found '" + t.text + "'", t.line);
    }

    void parse_declaration(Kind kind) {
        const std::size_t k = static_cast<std::size_t>(kind);
        const std::size_t declLine = tokens_[pos_].line;
        pos_++;
        expect_colon();
        if (counts_[k] != 0) throw ParseError(std::string(kind_name(kind)) + "s declared twice", declLine);
        if (pos_ < tokens_.size() && is_unsigned_integer(tokens_[pos_].text) &&
            (pos_ + 1 >= tokens_.size() || at_keyword(pos_ + 1))) {
            counts_[k] = std::strtoull(tokens_[pos_].text.c_str(), nullptr, 10);
            pos_++;
        } else {
            while (pos_ < tokens_.size() && !at_keyword()) {
                const Token& t = tokens_[pos_++];
                if (t.text == ":" || t.text == "*") throw ParseError("invalid name '" + t.text + "'", t.line);
                if (!lookup_[k].emplace(t.text, names_[k].size()).second)
                    throw ParseError("duplicate name '" + t.text + "'", t.line);
                names_[k].push_back(t.text);
            }
            counts_[k] = names_[k].size();
        }
        if (counts_[k] == 0) throw ParseError(std::string("no ") + kind_name(kind) + "s declared", declLine);
    }

    void parse_start() {
        pos_++;
        require_counts(false);
        if (peek_is("include") || peek_is("exclude")) {
            const bool include = tokens_[pos_].text == "include";
            pos_++;
            expect_colon();
            std::vector<char> listed(S(), 0);
            std::size_t n = 0;
            while (pos_ < tokens_.size() && !at_keyword()) {
                const long id = identifier(Kind::State);
                auto [lo, hi] = span_of(id, S());
                for (std::size_t s = lo; s < hi; ++s) listed[s] = 1;
                ++n;
            }
            if (n == 0) throw ParseError("empty start include/exclude list", line());
            start_.assign(S(), 0.0);
            std::size_t members = 0;
            for (std::size_t s = 0; s < S(); ++s)
                if ((listed[s] != 0) == include) ++members;
            if (members == 0) throw ModelError("start distribution excludes every state");
            for (std::size_t s = 0; s < S(); ++s)
                if ((listed[s] != 0) == include) start_[s] = 1.0 / static_cast<double>(members);
            return;
        }
        expect_colon();
        if (peek_is("uniform")) {
            pos_++;
            start_.assign(S(), 1.0 / static_cast<double>(S()));
            return;
        }
        // A lone identifier followed by the next keyword names a start state.
        if (pos_ < tokens_.size() && S() > 1 && (pos_ + 1 >= tokens_.size() || at_keyword(pos_ + 1))) {
            const long id = identifier(Kind::State);
            if (id < 0) {
                start_.assign(S(), 1.0 / static_cast<double>(S()));
            } else {
                start_.assign(S(), 0.0);
                start_[static_cast<std::size_t>(id)] = 1.0;
            }
            return;
        }
        start_ = numbers(S(), "start probability");
    }

    std::vector<double> row_or_keyword(std::size_t n, const char* what) {
        if (peek_is("uniform")) {
            pos_++;
            return std::vector<double>(n, 1.0 / static_cast<double>(n));
        }
        return numbers(n, what);
    }

    void parse_transition() {
        pos_++;
        expect_colon();
        require_counts();
        ensure_tables();
        const long a = identifier(Kind::Action);
        auto [a0, a1] = span_of(a, A());
        auto at = [&](std::size_t act, std::size_t s, std::size_t n) -> double& {
            return transition_[(act * S() + s) * S() + n];
        };
        if (!peek_colon()) {
            std::vector<double> m;
            if (peek_is("identity")) {
                pos_++;
                m.assign(S() * S(), 0.0);
                for (std::size_t s = 0; s < S(); ++s) m[s * S() + s] = 1.0;
            } else if (peek_is("uniform")) {
                pos_++;
                m.assign(S() * S(), 1.0 / static_cast<double>(S()));
            } else {
                m = numbers(S() * S(), "transition");
            }
            for (std::size_t act = a0; act < a1; ++act)
                for (std::size_t s = 0; s < S(); ++s)
                    for (std::size_t n = 0; n < S(); ++n) at(act, s, n) = m[s * S() + n];
            return;
        }
        expect_colon();
        const long s = identifier(Kind::State);
        auto [s0, s1] = span_of(s, S());
        if (!peek_colon()) {
            const std::vector<double> row = row_or_keyword(S(), "transition");
            for (std::size_t act = a0; act < a1; ++act)
                for (std::size_t st = s0; st < s1; ++st)
                    for (std::size_t n = 0; n < S(); ++n) at(act, st, n) = row[n];
            return;
        }
        expect_colon();
        const long e = identifier(Kind::State);
        auto [e0, e1] = span_of(e, S());
        const double p = number("transition probability");
        for (std::size_t act = a0; act < a1; ++act)
            for (std::size_t st = s0; st < s1; ++st)
                for (std::size_t n = e0; n < e1; ++n) at(act, st, n) = p;
    }

    void parse_observation() {
        pos_++;
        expect_colon();
        require_counts();
        ensure_tables();
        const long a = identifier(Kind::Action);
        auto [a0, a1] = span_of(a, A());
        auto at = [&](std::size_t act, std::size_t n, std::size_t z) -> double& {
            return observation_[(act * S() + n) * Z() + z];
        };
        if (!peek_colon()) {
            std::vector<double> m;
            if (peek_is("uniform")) {
                pos_++;
                m.assign(S() * Z(), 1.0 / static_cast<double>(Z()));
            } else {
                m = numbers(S() * Z(), "observation");
            }
            for (std::size_t act = a0; act < a1; ++act)
                for (std::size_t n = 0; n < S(); ++n)
                    for (std::size_t z = 0; z < Z(); ++z) at(act, n, z) = m[n * Z() + z];
            return;
        }
        expect_colon();
        const long e = identifier(Kind::State);
        auto [e0, e1] = span_of(e, S());
        if (!peek_colon()) {
            const std::vector<double> row = row_or_keyword(Z(), "observation");
            for (std::size_t act = a0; act < a1; ++act)
                for (std::size_t n = e0; n < e1; ++n)
                    for (std::size_t z = 0; z < Z(); ++z) at(act, n, z) = row[z];
            return;
        }
        expect_colon();
        const long z = identifier(Kind::Observation);
        auto [z0, z1] = span_of(z, Z());
        const double p = number("observation probability");
        for (std::size_t act = a0; act < a1; ++act)
            for (std::size_t n = e0; n < e1; ++n)
                for (std::size_t zz = z0; zz < z1; ++zz) at(act, n, zz) = p;
    }

    void parse_reward() {
        pos_++;
        expect_colon();
        require_counts();
        const long a = identifier(Kind::Action);
        expect_colon();
        const long s = identifier(Kind::State);
        if (!peek_colon()) {
            const std::vector<double> m = numbers(S() * Z(), "reward");
            for (std::size_t n = 0; n < S(); ++n)
                for (std::size_t z = 0; z < Z(); ++z)
                    rewards_.push_back({a, s, static_cast<long>(n), static_cast<long>(z), m[n * Z() + z]});
            return;
        }
        expect_colon();
        const long e = identifier(Kind::State);
        if (!peek_colon()) {
            const std::vector<double> row = numbers(Z(), "reward");
            for (std::size_t z = 0; z < Z(); ++z) rewards_.push_back({a, s, e, static_cast<long>(z), row[z]});
            return;
        }
        expect_colon();
        const long z = identifier(Kind::Observation);
        rewards_.push_back({a, s, e, z, number("reward")});
    }

    static void normalize_rows(std::vector<double>& table, std::size_t rows, std::size_t cols, const char* what,
                               const std::vector<std::string>& rowLabels) {
        for (std::size_t r = 0; r < rows; ++r) {
            double total = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                const double p = table[r * cols + c];
                if (p < 0.0) throw ModelError(std::string(what) + " " + rowLabels[r] + " has a negative entry");
                total += p;
            }
            const double dev = std::abs(total - 1.0);
            // Decimal inputs such as 0.333333 x 3 land a hair past 1e-6 in binary.
            if (dev > kFileRowTolerance + 1e-12) {
                std::ostringstream os;
                os.precision(10);
                os << what << " " << rowLabels[r] << " sums to " << total;
                throw ModelError(os.str());
            }
            if (dev > kNormalizationTol)
                for (std::size_t c = 0; c < cols; ++c) table[r * cols + c] /= total;
        }
    }

    std::vector<std::size_t> directive_states(const Directive& d) {
        std::vector<std::size_t> out;
        for (const std::string& v : d.values) {
            if (is_unsigned_integer(v)) {
                const auto idx = std::strtoull(v.c_str(), nullptr, 10);
                if (idx >= S()) throw ParseError("state index " + v + " out of range", d.line);
                out.push_back(idx);
            } else {
                auto it = lookup_[0].find(v);
                if (it == lookup_[0].end()) throw UnknownIdentifier(v, d.line);
                out.push_back(it->second);
            }
        }
        return out;
    }

    PomdpModel finish() {
        if (!discount_) throw ParseError("missing 'discount:'", 0);
        require_counts();
        ensure_tables();
        ModelData m;
        m.nStates = S();
        m.nActions = A();
        m.nObservations = Z();
        m.discount = *discount_;
        m.stateNames = names_[0];
        m.actionNames = names_[1];
        m.observationNames = names_[2];

        std::vector<std::string> tLabels, oLabels;
        tLabels.reserve(A() * S());
        for (std::size_t a = 0; a < A(); ++a)
            for (std::size_t s = 0; s < S(); ++s) {
                tLabels.push_back("row (a=" + std::to_string(a) + ", s=" + std::to_string(s) + ")");
            }
        oLabels = tLabels;
        normalize_rows(transition_, A() * S(), S(), "transition", tLabels);
        normalize_rows(observation_, A() * S(), Z(), "observation", oLabels);
        if (start_.empty()) start_.assign(S(), 1.0 / static_cast<double>(S()));
        normalize_rows(start_, 1, S(), "start", {"distribution"});

        m.reward.assign(S() * A(), 0.0);
        const double sign = cost_ ? -1.0 : 1.0;
        auto matches = [](long pattern, std::size_t v) { return pattern < 0 || static_cast<std::size_t>(pattern) == v; };
        std::vector<const RewardRule*> local;
        for (std::size_t a = 0; a < A(); ++a) {
            for (std::size_t s = 0; s < S(); ++s) {
                local.clear();
                for (const RewardRule& r : rewards_)
                    if (matches(r.action, a) && matches(r.start, s)) local.push_back(&r);
                if (local.empty()) continue;
                if (local.back()->end < 0 && local.back()->obs < 0) {
                    m.reward[s * A() + a] = sign * local.back()->value;
                    continue;
                }
                double total = 0.0;
                for (std::size_t n = 0; n < S(); ++n) {
                    const double t = transition_[(a * S() + s) * S() + n];
                    if (t == 0.0) continue;
                    for (std::size_t z = 0; z < Z(); ++z) {
                        const double o = observation_[(a * S() + n) * Z() + z];
                        if (o == 0.0) continue;
                        // Later rules override earlier ones.
                        for (auto it = local.rbegin(); it != local.rend(); ++it) {
                            if (matches((*it)->end, n) && matches((*it)->obs, z)) {
                                total += t * o * (*it)->value;
                                break;
                            }
                        }
                    }
                }
                m.reward[s * A() + a] = sign * total;
            }
        }

        bool goalDirective = false;
        for (const Directive& d : directives_) {
            if (d.key == "goal-states") {
                goalDirective = true;
                m.goalStates = directive_states(d);
            } else if (d.key == "terminal-states") {
                m.terminalStates = directive_states(d);
            }
        }
        if (!goalDirective) {
            std::vector<char> goal(S(), 0);
            for (const RewardRule& r : rewards_)
                if (r.end >= 0 && sign * r.value > 0.0) goal[static_cast<std::size_t>(r.end)] = 1;
            for (std::size_t s = 0; s < S(); ++s)
                if (goal[s]) m.goalStates.push_back(s);
        }

        m.transition = std::move(transition_);
        m.observation = std::move(observation_);
        m.initialBelief = std::move(start_);
        return PomdpModel(std::move(m));
    }
};

std::string format_double(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

PomdpModel parse_pomdp(std::string_view text) {
    Parser parser(lex(text));
    return parser.parse();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("failed writing '" + path + "'");
}

PomdpModel load_pomdp_file(const std::string& path) { return parse_pomdp(read_text_file(path)); }

std::string write_pomdp(const PomdpModel& model) {
    const ModelData& d = model.data();
    std::ostringstream os;
    auto declare = [&](const char* key, std::size_t n, const std::vector<std::string>& names) {
        os << key << ": ";
        if (names.empty()) {
            os << n;
        } else {
            for (std::size_t i = 0; i < names.size(); ++i) os << (i ? " " : "") << names[i];
        }
        os << '\n';
    };
    os << "discount: " << format_double(d.discount) << '\n';
    os << "values: reward\n";
    declare("states", d.nStates, d.stateNames);
    declare("actions", d.nActions, d.actionNames);
    declare("observations", d.nObservations, d.observationNames);
    os << "start:";
    for (double p : d.initialBelief) os << ' ' << format_double(p);
    os << '\n';
    os << "#! goal-states:";
    for (std::size_t s : d.goalStates) os << ' ' << s;
    os << '\n';
    if (!d.terminalStates.empty()) {
        os << "#! terminal-states:";
        for (std::size_t s : d.terminalStates) os << ' ' << s;
        os << '\n';
    }
    for (std::size_t a = 0; a < d.nActions; ++a)
        for (std::size_t s = 0; s < d.nStates; ++s)
            for (const SparseEntry& e : model.successors(a, s))
                os << "T: " << a << " : " << s << " : " << e.index << ' ' << format_double(e.prob) << '\n';
    for (std::size_t a = 0; a < d.nActions; ++a)
        for (std::size_t n = 0; n < d.nStates; ++n)
            for (const SparseEntry& e : model.observations(a, n))
                os << "O: " << a << " : " << n << " : " << e.index << ' ' << format_double(e.prob) << '\n';
    for (std::size_t a = 0; a < d.nActions; ++a)
        for (std::size_t s = 0; s < d.nStates; ++s) {
            const double r = model.reward(s, a);
            if (r != 0.0) os << "R: " << a << " : " << s << " : * : * " << format_double(r) << '\n';
        }
    return os.str();
}

std::string write_policy(const ValueFunction& vf, const PomdpModel& model) {
    if (vf.nStates() != model.nStates()) throw DimensionMismatch("value function size does not match model");
    std::ostringstream os;
    os << "discount: " << format_double(model.discount()) << '\n';
    os << "states: " << model.nStates() << '\n';
    for (const AlphaVector& v : vf) {
        os << '\n' << v.action << '\n';
        for (std::size_t s = 0; s < v.coeffs.size(); ++s) os << (s ? " " : "") << format_double(v.coeffs[s]);
        os << '\n';
    }
    return os.str();
}

ValueFunction read_policy(std::string_view text, const PomdpModel& model) {
    std::vector<AlphaVector> vectors;
    std::optional<std::size_t> states;
    constexpr std::size_t kNoAction = std::numeric_limits<std::size_t>::max();
    std::size_t pendingAction = kNoAction;
    std::size_t lineNo = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string line(text.substr(pos, end - pos));
        pos = end + 1;
        ++lineNo;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream in(line);
        std::vector<std::string> fields;
        for (std::string f; in >> f;) fields.push_back(f);
        if (fields.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (fields[0] == "discount:") {
            if (fields.size() != 2 || !to_number(fields[1])) throw ParseError("malformed discount line", lineNo);
        } else if (fields[0] == "states:") {
            if (fields.size() != 2 || !is_unsigned_integer(fields[1])) throw ParseError("malformed states line", lineNo);
            states = std::strtoull(fields[1].c_str(), nullptr, 10);
            if (*states != model.nStates())
                throw DimensionMismatch("policy has " + fields[1] + " states, model has " +
                                        std::to_string(model.nStates()));
        } else if (pendingAction == kNoAction) {
            if (!states) throw ParseError("missing 'states:' header before alpha vectors", lineNo);
            if (fields.size() != 1 || !is_unsigned_integer(fields[0]))
                throw ParseError("expected an action index", lineNo);
            const auto a = std::strtoull(fields[0].c_str(), nullptr, 10);
            if (a >= model.nActions()) throw ParseError("action index " + fields[0] + " out of range", lineNo);
            pendingAction = a;
        } else {
            if (fields.size() != model.nStates())
                throw DimensionMismatch("line " + std::to_string(lineNo) + ": alpha vector has " +
                                        std::to_string(fields.size()) + " coefficients, expected " +
                                        std::to_string(model.nStates()));
            AlphaVector v;
            v.action = pendingAction;
            v.coeffs.reserve(fields.size());
            for (const std::string& f : fields) {
                auto x = to_number(f);
                if (!x) throw ParseError("bad coefficient '" + f + "'", lineNo);
                v.coeffs.push_back(*x);
            }
            vectors.push_back(std::move(v));
            pendingAction = kNoAction;
        }
        if (end == text.size()) break;
    }
    if (pendingAction != kNoAction) throw ParseError("alpha block without coefficients", lineNo);
    if (vectors.empty()) throw ParseError("policy contains no alpha vectors", lineNo);
    return ValueFunction(std::move(vectors));
}

}  // namespace pbvi
