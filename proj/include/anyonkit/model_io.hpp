#pragma once

// Line-oriented `.anyon` model format: parser, canonical serializer and the
// bundled model texts.
//
// Grammar (one declaration per line, `#` starts a comment, blanks ignored):
//   model <name>
//   labels <l1> <l2> ...            first listed label is the unit
//   dual <l> <l*>                   one line per non-self-dual pair
//   fuse <a> <b> -> <c1>[*<m1>] ... multiplicity suffix defaults to 1
//
// Unit-law fuse lines are auto-filled and omitted on output. A missing
// `fuse b a` is mirrored from `fuse a b` (commutative completion) and the
// completion is flagged on the document.

#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "anyonkit/fusion_ring.hpp"

namespace anyonkit {

struct ParseError {
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    std::string message;
};

struct ModelDocument {
    std::string name;
    std::string raw_text;
    FusionRing ring;
    std::map<std::string, int> declaration_lines;      // "labels", "dual <l>", "fuse <a> <b>"
    std::vector<std::pair<LabelId, LabelId>> mirrored;  // (b,a) pairs filled by completion
};

struct ParseResult {
    std::optional<ModelDocument> document;
    std::vector<ParseError> errors;
    bool ok() const { return document.has_value() && errors.empty(); }
};

namespace detail {

struct Token {
    std::string text;
    int column;  // 1-based
};

inline std::vector<Token> tokenize_line(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) { ++i; continue; }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#')
            ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

}  // namespace detail

inline ParseResult parse_model(const std::string& text) {
    ParseResult result;
    std::vector<ParseError>& errors = result.errors;

    std::string name;
    std::vector<std::string> label_names;
    std::map<std::string, LabelId> label_ids;
    std::map<std::string, int> decl_lines;
    // Declared dual pairs and fuse right-hand sides, kept textual until all
    // labels are known.
    struct DualDecl { std::string a, b; int line, column; };
    struct FuseDecl {
        std::string a, b;
        std::vector<std::pair<std::string, std::uint32_t>> rhs;
        int line, column;
    };
    std::vector<DualDecl> dual_decls;
    std::vector<FuseDecl> fuse_decls;

    std::istringstream stream(text);
    std::string line;
    int line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        auto tokens = detail::tokenize_line(line);
        if (tokens.empty()) continue;
        const std::string& keyword = tokens[0].text;
        if (keyword == "model") {
            if (tokens.size() != 2) {
                errors.push_back({line_no, tokens[0].column, "model line expects one name"});
                continue;
            }
            name = tokens[1].text;
            decl_lines["model"] = line_no;
        } else if (keyword == "labels") {
            if (!label_names.empty()) {
                errors.push_back({line_no, tokens[0].column, "duplicate labels line"});
                continue;
            }
            if (tokens.size() < 2) {
                errors.push_back({line_no, tokens[0].column, "labels line expects at least one label"});
                continue;
            }
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                if (label_ids.count(tokens[i].text)) {
                    errors.push_back({line_no, tokens[i].column,
                                      "duplicate label '" + tokens[i].text + "'"});
                    continue;
                }
                label_ids[tokens[i].text] = static_cast<LabelId>(label_names.size());
                label_names.push_back(tokens[i].text);
            }
            decl_lines["labels"] = line_no;
        } else if (keyword == "dual") {
            if (tokens.size() != 3) {
                errors.push_back({line_no, tokens[0].column, "dual line expects two labels"});
                continue;
            }
            dual_decls.push_back({tokens[1].text, tokens[2].text, line_no, tokens[1].column});
            decl_lines["dual " + tokens[1].text] = line_no;
        } else if (keyword == "fuse") {
            if (tokens.size() < 5 || tokens[3].text != "->") {
                errors.push_back({line_no, tokens[0].column,
                                  "fuse line expects 'fuse <a> <b> -> <c>[*m] ...'"});
                continue;
            }
            FuseDecl decl{tokens[1].text, tokens[2].text, {}, line_no, tokens[1].column};
            bool bad = false;
            for (std::size_t i = 4; i < tokens.size(); ++i) {
                std::string tok = tokens[i].text;
                std::uint32_t mult = 1;
                if (auto star = tok.find('*'); star != std::string::npos) {
                    std::string mstr = tok.substr(star + 1);
                    tok = tok.substr(0, star);
                    try {
                        long long m = std::stoll(mstr);
                        if (m <= 0) {
                            errors.push_back({line_no, tokens[i].column,
                                              "multiplicity must be a positive integer"});
                            bad = true;
                            continue;
                        }
                        mult = static_cast<std::uint32_t>(m);
                    } catch (const std::exception&) {
                        errors.push_back({line_no, tokens[i].column,
                                          "malformed multiplicity '" + mstr + "'"});
                        bad = true;
                        continue;
                    }
                }
                decl.rhs.emplace_back(tok, mult);
            }
            if (!bad) {
                fuse_decls.push_back(std::move(decl));
                decl_lines["fuse " + tokens[1].text + " " + tokens[2].text] = line_no;
            }
        } else {
            errors.push_back({line_no, tokens[0].column, "unknown keyword '" + keyword + "'"});
        }
    }

    if (name.empty())
        errors.push_back({1, 1, "missing model declaration"});
    if (label_names.empty()) {
        errors.push_back({1, 1, "missing labels declaration"});
        return result;
    }

    const LabelId L = static_cast<LabelId>(label_names.size());
    auto lookup = [&](const std::string& n, int line_no_, int col,
                      const char* what) -> std::optional<LabelId> {
        auto it = label_ids.find(n);
        if (it == label_ids.end()) {
            errors.push_back({line_no_, col,
                              std::string("unknown label '") + n + "' in " + what + " line"});
            return std::nullopt;
        }
        return it->second;
    };

    // Duals: self-dual by default.
    std::vector<LabelId> dual_map(L);
    for (LabelId i = 0; i < L; ++i) dual_map[i] = i;
    std::vector<bool> dual_set(L, false);
    for (const auto& d : dual_decls) {
        auto a = lookup(d.a, d.line, d.column, "dual");
        auto b = lookup(d.b, d.line, d.column, "dual");
        if (!a || !b) continue;
        if ((dual_set[*a] && dual_map[*a] != *b) || (dual_set[*b] && dual_map[*b] != *a)) {
            errors.push_back({d.line, d.column, "conflicting dual declaration for '" + d.a + "'"});
            continue;
        }
        dual_map[*a] = *b;
        dual_map[*b] = *a;
        dual_set[*a] = dual_set[*b] = true;
    }

    std::vector<std::uint32_t> tensor(static_cast<std::size_t>(L) * L * L, 0);
    auto slot = [&](LabelId a, LabelId b, LabelId c) -> std::uint32_t& {
        return tensor[(static_cast<std::size_t>(a) * L + b) * L + c];
    };
    std::vector<bool> declared(static_cast<std::size_t>(L) * L, false);
    auto declared_at = [&](LabelId a, LabelId b) -> std::vector<bool>::reference {
        return declared[static_cast<std::size_t>(a) * L + b];
    };

    for (const auto& f : fuse_decls) {
        auto a = lookup(f.a, f.line, f.column, "fuse");
        auto b = lookup(f.b, f.line, f.column, "fuse");
        if (!a || !b) continue;
        std::vector<std::uint32_t> row(L, 0);
        bool bad = false;
        for (const auto& [cname, mult] : f.rhs) {
            auto c = lookup(cname, f.line, f.column, "fuse");
            if (!c) { bad = true; continue; }
            row[*c] += mult;
        }
        if (bad) continue;
        if (declared_at(*a, *b)) {
            bool same = true;
            for (LabelId c = 0; c < L; ++c)
                if (slot(*a, *b, c) != row[c]) same = false;
            if (!same) {
                errors.push_back({f.line, f.column,
                                  "conflicting duplicate fuse declaration for (" + f.a + "," +
                                      f.b + ")"});
                continue;
            }
        }
        for (LabelId c = 0; c < L; ++c) slot(*a, *b, c) = row[c];
        declared_at(*a, *b) = true;
    }

    if (!errors.empty()) return result;

    // Unit-law completion.
    for (LabelId x = 0; x < L; ++x) {
        if (!declared_at(kUnit, x)) { slot(kUnit, x, x) = 1; declared_at(kUnit, x) = true; }
        if (!declared_at(x, kUnit)) { slot(x, kUnit, x) = 1; declared_at(x, kUnit) = true; }
    }
    // Commutative completion for pairs declared in one order only.
    std::vector<std::pair<LabelId, LabelId>> mirrored;
    for (LabelId a = 0; a < L; ++a)
        for (LabelId b = 0; b < L; ++b)
            if (declared_at(a, b) && !declared_at(b, a)) {
                for (LabelId c = 0; c < L; ++c) slot(b, a, c) = slot(a, b, c);
                declared_at(b, a) = true;
                mirrored.emplace_back(b, a);
            }

    FusionRing ring(label_names, std::move(dual_map), std::move(tensor));
    result.document = ModelDocument{name, text, std::move(ring), std::move(decl_lines),
                                    std::move(mirrored)};
    return result;
}

/// Canonical text form: labels in declaration order, dual pairs in id order,
/// fuse lines sorted by (a,b); unit-law and mirror-redundant lines omitted.
inline std::string serialize_model(const FusionRing& ring, const std::string& name) {
    std::ostringstream out;
    out << "model " << name << "\n";
    out << "labels";
    for (const Label& l : ring.labels()) out << " " << l.name;
    out << "\n";
    for (LabelId a = 0; a < ring.size(); ++a)
        if (ring.dual(a) > a)
            out << "dual " << ring.label(a).name << " " << ring.label(ring.dual(a)).name << "\n";
    const LabelId L = static_cast<LabelId>(ring.size());
    for (LabelId a = 1; a < L; ++a) {
        for (LabelId b = 1; b < L; ++b) {
            if (b < a) {
                // Skip when the mirror row is identical; the parser restores it.
                bool same = true;
                for (LabelId c = 0; c < L; ++c)
                    if (ring.n(a, b, c) != ring.n(b, a, c)) { same = false; break; }
                if (same) continue;
            }
            bool empty = true;
            for (LabelId c = 0; c < L; ++c)
                if (ring.n(a, b, c) > 0) { empty = false; break; }
            if (empty) continue;
            out << "fuse " << ring.label(a).name << " " << ring.label(b).name << " ->";
            for (LabelId c = 0; c < L; ++c) {
                std::uint32_t m = ring.n(a, b, c);
                if (m == 0) continue;
                out << " " << ring.label(c).name;
                if (m > 1) out << "*" << m;
            }
            out << "\n";
        }
    }
    return out.str();
}

inline constexpr const char* kFibonacciModelText =
    "model fibonacci\n"
    "labels 1 tau\n"
    "fuse tau tau -> 1 tau\n";

inline constexpr const char* kIsingModelText =
    "model ising\n"
    "labels 1 sigma psi\n"
    "fuse sigma sigma -> 1 psi\n"
    "fuse sigma psi -> sigma\n"
    "fuse psi psi -> 1\n";

inline constexpr const char* kMooreReadModelText =
    "model moore_read\n"
    "labels 1 alpha alphap sigma sigmap psi\n"
    "dual alpha alphap\n"
    "dual sigma sigmap\n"
    "fuse alpha alpha -> psi\n"
    "fuse alpha alphap -> 1\n"
    "fuse alpha sigma -> sigmap\n"
    "fuse alpha sigmap -> sigma\n"
    "fuse alpha psi -> alphap\n"
    "fuse alphap alphap -> psi\n"
    "fuse alphap sigma -> sigmap\n"
    "fuse alphap sigmap -> sigma\n"
    "fuse alphap psi -> alpha\n"
    "fuse sigma sigma -> alpha alphap\n"
    "fuse sigma sigmap -> 1 psi\n"
    "fuse sigma psi -> sigma\n"
    "fuse sigmap sigmap -> alpha alphap\n"
    "fuse sigmap psi -> sigmap\n"
    "fuse psi psi -> 1\n";

/// Parses and returns the three models shipped with the library.
inline std::map<std::string, ModelDocument> bundled_models() {
    std::map<std::string, ModelDocument> out;
    for (const char* text : {kFibonacciModelText, kIsingModelText, kMooreReadModelText}) {
        ParseResult r = parse_model(text);
        if (!r.ok()) throw std::logic_error("bundled model text failed to parse");
        out.emplace(r.document->name, std::move(*r.document));
    }
    return out;
}

}  // namespace anyonkit
