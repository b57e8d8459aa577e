#include "driftpac/lp_format.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace driftpac {

namespace {

constexpr int kTermsPerLine = 8;

std::string num(double v) {
    if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_terms(std::ostringstream& os, const std::vector<Term>& terms, const MilpModel& m) {
    int on_line = 0;
    for (const auto& t : terms) {
        if (on_line == kTermsPerLine) {
            os << "\n  ";
            on_line = 0;
        }
        os << (t.coef < 0 ? " - " : " + ") << num(std::fabs(t.coef)) << ' '
           << m.variables[static_cast<std::size_t>(t.var)].name;
        ++on_line;
    }
}

}  // namespace

std::string export_lp(const MilpModel& model) {
    std::ostringstream os;
    os << "\\ minimal-disagreement model: " << model.variables.size() << " variables, "
       << model.constraints.size() << " constraints\n";
    os << "Minimize\n obj:";
    std::vector<Term> obj;
    for (std::size_t k = 0; k < model.variables.size(); ++k)
        if (model.variables[k].objective != 0.0) obj.push_back({static_cast<int>(k), model.variables[k].objective});
    write_terms(os, obj, model);
    os << '\n';
    if (!model.constraints.empty()) {
        os << "Subject To\n";
        for (const auto& c : model.constraints) {
            os << ' ' << c.name << ':';
            write_terms(os, c.terms, model);
            os << (c.sense == Sense::LessEqual ? " <= " : c.sense == Sense::GreaterEqual ? " >= " : " = ")
               << num(c.rhs) << '\n';
        }
    }
    os << "Bounds\n";
    for (const auto& v : model.variables) os << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
    bool any_binary = false;
    for (const auto& v : model.variables) any_binary |= v.type == VarType::Binary;
    if (any_binary) {
        os << "Binary\n";
        for (const auto& v : model.variables)
            if (v.type == VarType::Binary) os << ' ' << v.name << '\n';
    }
    os << "End\n";
    return os.str();
}

namespace {

enum class Section { None, Objective, Constraints, Bounds, Binary, General, Done };

struct Token {
    std::string text;
    int line = 0;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (c == '\n') {
            out.push_back({"\n", line});
            ++line;
            ++i;
        } else if (c == '\\') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '<' || c == '>' || c == '=') {
            std::string op(1, c);
            ++i;
            if (i < text.size() && (text[i] == '=' || text[i] == '<' || text[i] == '>')) op += text[i++];
            if (op == "=<") op = "<=";
            if (op == "=>") op = ">=";
            if (op == "<") op = "<=";
            if (op == ">") op = ">=";
            out.push_back({op, line});
        } else if (c == '+' || c == '-') {
            // signed infinity stays one token
            std::size_t j = i + 1;
            while (j < text.size() && std::isalpha(static_cast<unsigned char>(text[j]))) ++j;
            std::string word(text.substr(i + 1, j - i - 1));
            for (auto& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            if (word == "inf" || word == "infinity") {
                out.push_back({std::string(1, c) + "inf", line});
                i = j;
            } else {
                out.push_back({std::string(1, c), line});
                ++i;
            }
        } else if (c == ':') {
            out.push_back({":", line});
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && text[j] != ':' &&
                   text[j] != '<' && text[j] != '>' && text[j] != '=' && text[j] != '\\' &&
                   !((text[j] == '+' || text[j] == '-') && j > i && text[j - 1] != 'e' && text[j - 1] != 'E'))
                ++j;
            out.push_back({std::string(text.substr(i, j - i)), line});
            i = j;
        }
    }
    out.push_back({"\n", line});
    return out;
}

bool is_number(const std::string& s, double& v) {
    if (s == "+inf" || s == "inf") {
        v = INFINITY;
        return true;
    }
    if (s == "-inf") {
        v = -INFINITY;
        return true;
    }
    if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.')) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] void fail(int line, const std::string& what) {
    throw std::runtime_error("LP parse error at line " + std::to_string(line) + ": " + what);
}

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    MilpModel run() {
        // Lines are grouped into statements: a statement continues until a
        // line break followed by something that starts a new statement.
        std::vector<std::vector<Token>> lines(1);
        for (auto& t : toks_) {
            if (t.text == "\n") {
                if (!lines.back().empty()) lines.emplace_back();
            } else {
                lines.back().push_back(t);
            }
        }
        if (lines.back().empty()) lines.pop_back();

        // First pass: variable order from Bounds, types from Binary/General.
        Section sec = Section::None;
        for (const auto& ln : lines) {
            if (auto s = header(ln)) {
                sec = *s;
                continue;
            }
            if (sec == Section::Bounds) {
                for (const auto& t : ln) {
                    double v;
                    if (!is_number(t.text, v) && t.text != "<=" && t.text != ">=" && t.text != "=" &&
                        lower(t.text) != "free" && t.text != "+" && t.text != "-")
                        var(t.text);
                }
            }
        }

        sec = Section::None;
        std::vector<Token> stmt;
        auto flush = [&] {
            if (stmt.empty()) return;
            if (sec == Section::Objective) objective(stmt);
            if (sec == Section::Constraints) constraint(stmt);
            stmt.clear();
        };
        for (const auto& ln : lines) {
            if (auto s = header(ln)) {
                flush();
                sec = *s;
                if (sec == Section::Done) break;
                continue;
            }
            switch (sec) {
                case Section::Objective:
                case Section::Constraints: {
                    // A new statement starts with "name:"
                    const bool starts = ln.size() >= 2 && ln[1].text == ":";
                    if (starts) flush();
                    stmt.insert(stmt.end(), ln.begin(), ln.end());
                    break;
                }
                case Section::Bounds: bound(ln); break;
                case Section::Binary:
                    for (const auto& t : ln) {
                        auto& v = model_.variables[static_cast<std::size_t>(var(t.text))];
                        v.type = VarType::Binary;
                        if (!bounded_.count(t.text)) {
                            v.lower = 0.0;
                            v.upper = 1.0;
                        }
                    }
                    break;
                case Section::General:
                    fail(ln.front().line, "general integer variables are not supported");
                default: fail(ln.front().line, "content outside of a section");
            }
        }
        if (sec != Section::Done) fail(toks_.back().line, "missing End");
        return std::move(model_);
    }

  private:
    std::optional<Section> header(const std::vector<Token>& ln) const {
        std::string s;
        for (const auto& t : ln) s += (s.empty() ? "" : " ") + lower(t.text);
        if (s == "minimize" || s == "minimise" || s == "min") return Section::Objective;
        if (s == "subject to" || s == "such that" || s == "st" || s == "s.t.") return Section::Constraints;
        if (s == "bounds" || s == "bound") return Section::Bounds;
        if (s == "binary" || s == "binaries" || s == "bin") return Section::Binary;
        if (s == "general" || s == "generals" || s == "gen") return Section::General;
        if (s == "end") return Section::Done;
        return std::nullopt;
    }

    int var(const std::string& name) {
        auto it = index_.find(name);
        if (it != index_.end()) return it->second;
        const int id = model_.add_variable(name, 0.0, INFINITY, VarType::Continuous);
        index_.emplace(name, id);
        return id;
    }

    // Parses "[+|-] [coef] name ..." from pos until a relational operator.
    std::vector<Term> linear(const std::vector<Token>& s, std::size_t& pos) {
        std::vector<Term> terms;
        while (pos < s.size() && s[pos].text != "<=" && s[pos].text != ">=" && s[pos].text != "=") {
            double sign = 1.0;
            if (s[pos].text == "+" || s[pos].text == "-") {
                sign = s[pos].text == "-" ? -1.0 : 1.0;
                ++pos;
            }
            if (pos >= s.size()) fail(s.back().line, "dangling sign");
            double coef = 1.0;
            if (is_number(s[pos].text, coef)) ++pos;
            if (pos >= s.size()) fail(s.back().line, "coefficient without variable");
            terms.push_back({var(s[pos].text), sign * coef});
            ++pos;
        }
        return terms;
    }

    void objective(const std::vector<Token>& s) {
        std::size_t pos = 0;
        if (s.size() >= 2 && s[1].text == ":") pos = 2;
        for (const auto& t : linear(s, pos)) {
            model_.variables[static_cast<std::size_t>(t.var)].objective += t.coef;
        }
        if (pos != s.size()) fail(s[pos].line, "unexpected token in objective");
    }

    void constraint(const std::vector<Token>& s) {
        std::size_t pos = 0;
        std::string name = "c" + std::to_string(model_.constraints.size() + 1);
        if (s.size() >= 2 && s[1].text == ":") {
            name = s[0].text;
            pos = 2;
        }
        auto terms = linear(s, pos);
        if (pos >= s.size()) fail(s.back().line, "constraint without relation");
        const std::string op = s[pos++].text;
        double sign = 1.0;
        if (pos < s.size() && (s[pos].text == "-" || s[pos].text == "+")) {
            sign = s[pos].text == "-" ? -1.0 : 1.0;
            ++pos;
        }
        double rhs = 0.0;
        if (pos >= s.size() || !is_number(s[pos].text, rhs)) fail(s.back().line, "constraint right-hand side");
        ++pos;
        if (pos != s.size()) fail(s[pos].line, "trailing tokens after constraint");
        const Sense sense = op == "<=" ? Sense::LessEqual : op == ">=" ? Sense::GreaterEqual : Sense::Equal;
        model_.add_constraint(name, std::move(terms), sense, sign * rhs);
    }

    void bound(const std::vector<Token>& s) {
        // forms: lo <= x <= hi | x <= hi | x >= lo | x = v | x free
        auto read_num = [&](std::size_t& pos, double& v) {
            double sign = 1.0;
            if (pos < s.size() && (s[pos].text == "-" || s[pos].text == "+") && pos + 1 < s.size()) {
                sign = s[pos].text == "-" ? -1.0 : 1.0;
                ++pos;
            }
            if (pos >= s.size() || !is_number(s[pos].text, v)) return false;
            v *= sign;
            ++pos;
            return true;
        };
        std::size_t pos = 0;
        double lo = 0.0;
        if (read_num(pos, lo)) {
            if (pos + 1 >= s.size() || s[pos].text != "<=") fail(s.front().line, "bound: expected <=");
            const std::string name = s[pos + 1].text;
            pos += 2;
            auto& v = model_.variables[static_cast<std::size_t>(var(name))];
            v.lower = lo;
            bounded_.insert({name, true});
            if (pos < s.size()) {
                double hi;
                if (s[pos].text != "<=") fail(s[pos].line, "bound: expected <=");
                ++pos;
                if (!read_num(pos, hi)) fail(s.front().line, "bound: upper value");
                v.upper = hi;
            }
            if (pos != s.size()) fail(s.front().line, "bound: trailing tokens");
            return;
        }
        const std::string name = s[0].text;
        auto& v = model_.variables[static_cast<std::size_t>(var(name))];
        bounded_.insert({name, true});
        if (s.size() == 2 && lower(s[1].text) == "free") {
            v.lower = -INFINITY;
            v.upper = INFINITY;
            return;
        }
        pos = 1;
        if (pos >= s.size()) fail(s[0].line, "bound: missing relation");
        const std::string op = s[pos++].text;
        double val;
        if (!read_num(pos, val) || pos != s.size()) fail(s[0].line, "bound: value");
        if (op == "<=") v.upper = val;
        else if (op == ">=") v.lower = val;
        else v.lower = v.upper = val;
    }

    std::vector<Token> toks_;
    MilpModel model_;
    std::unordered_map<std::string, int> index_;
    std::unordered_map<std::string, bool> bounded_;
};

}  // namespace

MilpModel parse_lp(std::string_view text) { return Parser(tokenize(text)).run(); }

}  // namespace driftpac
