// anyonkit command-line tool.
//
// Subcommands: validate, homcats, dims, solve, verify, braid, compile.
// Machine-readable JSON on stdout, human diagnostics on stderr.
// Exit codes: 0 success, 1 domain failure, 2 usage error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anyonkit/anyonkit.hpp"

namespace {

using namespace anyonkit;

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ModelDocument load_model(const std::string& path) {
    ParseResult result = parse_model(read_file(path));
    if (!result.ok()) {
        std::string payload = "{\n  \"errors\": [\n";
        for (std::size_t i = 0; i < result.errors.size(); ++i) {
            const ParseError& e = result.errors[i];
            payload += "    {\"column\": " + std::to_string(e.column) +
                       ", \"line\": " + std::to_string(e.line) + ", \"message\": \"" + e.message +
                       "\"}";
            payload += (i + 1 < result.errors.size()) ? ",\n" : "\n";
        }
        payload += "  ]\n}\n";
        std::cout << payload;
        for (const ParseError& e : result.errors)
            std::cerr << path << ":" << e.line << ":" << e.column << ": " << e.message << "\n";
        std::exit(1);
    }
    return std::move(*result.document);
}

std::vector<LabelId> parse_anyons(const FusionRing& ring, const std::string& text) {
    std::istringstream ss(text);
    std::string token;
    std::vector<LabelId> leaves;
    while (ss >> token) leaves.push_back(ring.find(token));
    if (leaves.empty()) throw DomainError("--anyons is empty");
    return leaves;
}

std::string matrix_json(const Eigen::MatrixXcd& m) {
    std::string out = "[";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out += (i ? ", [" : "[");
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ", ";
            out += "[" + num17(m(i, j).real()) + ", " + num17(m(i, j).imag()) + "]";
        }
        out += "]";
    }
    return out + "]";
}

Eigen::MatrixXcd parse_matrix_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("malformed matrix JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw DomainError("matrix JSON must be a nonempty array");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw DomainError("matrix JSON is ragged");
        for (Eigen::Index jx = 0; jx < cols; ++jx) {
            const auto& cell = j[i][jx];
            if (cell.is_number()) {
                m(i, jx) = Complex(cell.get<double>(), 0.0);
            } else if (cell.is_array() && cell.size() == 2) {
                m(i, jx) = Complex(cell[0].get<double>(), cell[1].get<double>());
            } else {
                throw DomainError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return m;
}

Eigen::VectorXcd parse_vector_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("malformed state JSON: ") + e.what());
    }
    if (!j.is_array() || j.empty()) throw DomainError("state JSON must be a nonempty array");
    Eigen::VectorXcd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& cell = j[static_cast<std::size_t>(i)];
        if (cell.is_number()) {
            v[i] = Complex(cell.get<double>(), 0.0);
        } else if (cell.is_array() && cell.size() == 2 && cell[0].is_number()) {
            v[i] = Complex(cell[0].get<double>(), cell[1].get<double>());
        } else {
            throw DomainError("state entries must be numbers or [re, im] pairs");
        }
    }
    return v;
}

int cmd_validate(const std::string& model_path) {
    ModelDocument doc = load_model(model_path);
    std::vector<RingViolation> report = verify_ring(doc.ring);
    std::string payload = "{\n  \"labels\": " + std::to_string(doc.ring.size()) +
                          ",\n  \"model\": \"" + doc.name + "\",\n  \"violations\": [\n";
    for (std::size_t i = 0; i < report.size(); ++i) {
        payload += "    {\"axiom\": \"" + report[i].axiom + "\", \"message\": \"" +
                   report[i].message + "\"}";
        payload += (i + 1 < report.size()) ? ",\n" : "\n";
    }
    payload += "  ]\n}\n";
    std::cout << payload;
    for (const RingViolation& v : report) std::cerr << v.axiom << ": " << v.message << "\n";
    return report.empty() ? 0 : 1;
}

int cmd_homcats(const std::string& model_path, const std::string& charge_name) {
    ModelDocument doc = load_model(model_path);
    std::vector<LabelId> charges;
    if (!charge_name.empty()) {
        if (!doc.ring.has_label(charge_name)) {
            std::cerr << "unknown charge '" << charge_name << "'\n";
            return 2;
        }
        charges.push_back(doc.ring.find(charge_name));
    } else {
        for (const Label& l : doc.ring.labels()) charges.push_back(l.id);
    }
    std::string payload = "{\n  \"homcats\": [\n";
    for (std::size_t ci = 0; ci < charges.size(); ++ci) {
        HomCategoryIndex idx = homcat(doc.ring, charges[ci]);
        payload += "    {\"charge\": \"" + doc.ring.label(idx.charge).name +
                   "\", \"simple_objects\": [";
        for (std::size_t i = 0; i < idx.simple_objects.size(); ++i) {
            if (i) payload += ", ";
            payload += "[\"" + doc.ring.label(idx.simple_objects[i].first).name + "\", \"" +
                       doc.ring.label(idx.simple_objects[i].second).name + "\"]";
        }
        payload += "]}";
        payload += (ci + 1 < charges.size()) ? ",\n" : "\n";
    }
    payload += "  ]\n}\n";
    std::cout << payload;
    return 0;
}

int cmd_dims(const std::string& model_path, const std::string& anyons,
             const std::string& charge_name) {
    ModelDocument doc = load_model(model_path);
    std::vector<LabelId> leaves;
    try {
        leaves = parse_anyons(doc.ring, anyons);
        if (!charge_name.empty() && !doc.ring.has_label(charge_name))
            throw DomainError("unknown label: " + charge_name);
    } catch (const DomainError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }
    std::vector<LabelId> charges;
    if (!charge_name.empty())
        charges.push_back(doc.ring.find(charge_name));
    else
        for (const Label& l : doc.ring.labels()) charges.push_back(l.id);
    std::string payload = "{\n  \"dims\": [\n";
    for (std::size_t i = 0; i < charges.size(); ++i) {
        payload += "    {\"charge\": \"" + doc.ring.label(charges[i]).name +
                   "\", \"dim\": " + std::to_string(dim(doc.ring, leaves, charges[i])) + "}";
        payload += (i + 1 < charges.size()) ? ",\n" : "\n";
    }
    payload += "  ]\n}\n";
    std::cout << payload;
    return 0;
}

int cmd_solve(const std::string& model_path, double tol, std::uint64_t seed, int restarts,
              const std::string& out_path) {
    ModelDocument doc = load_model(model_path);
    if (!verify_ring(doc.ring).empty()) {
        std::cerr << "model does not pass verify_ring\n";
        return 1;
    }
    SolverConfig config;
    config.tolerance = tol;
    config.seed = seed;
    config.restarts = restarts;

    CoherenceSolveResult solved;
    try {
        solved = solve_coherence(doc.ring, config);
    } catch (const UnsupportedFeatureError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 1;
    }
    const PentagonSolveResult& pent = solved.pentagon;
    const HexagonSolveResult& hex = solved.hexagon;
    if (!solved.success) {
        double best = pent.success ? hex.best_residual : pent.best_residual;
        std::cerr << "solver failed; best residual " << best << "\n";
        std::cout << "{\n  \"success\": false,\n  \"best_residual\": " << num17(best) << "\n}\n";
        return 1;
    }

    std::string symbols = export_symbols(doc.ring, pent.table, hex.table, doc.name);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 1;
        }
        out << symbols;
    }
    double hex_fwd = hexagon_residual(doc.ring, pent.table, hex.table, false);
    double hex_inv = hexagon_residual(doc.ring, pent.table, hex.table, true);
    std::string payload = "{\n";
    payload += "  \"f_unitarity\": " + num17(pent.unitarity) + ",\n";
    payload += "  \"hexagon_inverse_residual\": " + num17(hex_inv) + ",\n";
    payload += "  \"hexagon_residual\": " + num17(hex_fwd) + ",\n";
    payload += "  \"hexagon_solution_count\": " + std::to_string(hex.solution_count) + ",\n";
    payload += "  \"model\": \"" + doc.name + "\",\n";
    payload += "  \"pentagon_residual\": " + num17(pent.residual) + ",\n";
    payload += "  \"pentagon_restart\": " + std::to_string(pent.restart_index) + ",\n";
    payload += "  \"r_unitarity\": " + num17(hex.unitarity) + ",\n";
    payload += "  \"success\": true\n";
    payload += "}\n";
    std::cout << payload;
    return 0;
}

int cmd_verify(const std::string& model_path, const std::string& symbols_path, double tol) {
    ModelDocument doc = load_model(model_path);
    ImportedSymbols symbols = import_symbols(doc.ring, read_file(symbols_path));
    double pent, hex_fwd, hex_inv, f_unit, r_unit;
    try {
        pent = pentagon_residual(doc.ring, symbols.F);
        hex_fwd = hexagon_residual(doc.ring, symbols.F, symbols.R, false);
        hex_inv = hexagon_residual(doc.ring, symbols.F, symbols.R, true);
        f_unit = f_unitarity_deviation(doc.ring, symbols.F);
        r_unit = r_unitarity_deviation(doc.ring, symbols.R);
    } catch (const IncompleteTableError& e) {
        std::cerr << "incomplete table: " << e.what() << "\n";
        std::cout << "{\n  \"error\": \"incomplete-table\",\n  \"detail\": \"" << e.what()
                  << "\"\n}\n";
        return 1;
    }
    bool pass = pent < tol && hex_fwd < tol && hex_inv < tol && f_unit < tol && r_unit < tol;
    std::string payload = "{\n";
    payload += "  \"f_unitarity\": " + num17(f_unit) + ",\n";
    payload += "  \"hexagon_inverse_residual\": " + num17(hex_inv) + ",\n";
    payload += "  \"hexagon_residual\": " + num17(hex_fwd) + ",\n";
    payload += "  \"pass\": " + std::string(pass ? "true" : "false") + ",\n";
    payload += "  \"pentagon_residual\": " + num17(pent) + ",\n";
    payload += "  \"r_unitarity\": " + num17(r_unit) + ",\n";
    payload += "  \"tolerance\": " + num17(tol) + "\n";
    payload += "}\n";
    std::cout << payload;
    return pass ? 0 : 1;
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BraidSetup {
    ModelDocument doc;
    ImportedSymbols symbols;
    FusionBasis basis;
    std::vector<Unitary> generators;
};

BraidSetup load_braid_setup(const std::string& model_path, const std::string& symbols_path,
                            const std::string& anyons, const std::string& charge_name) {
    ModelDocument doc = load_model(model_path);
    ImportedSymbols symbols = import_symbols(doc.ring, read_file(symbols_path));
    std::vector<LabelId> leaves;
    try {
        leaves = parse_anyons(doc.ring, anyons);
        if (!doc.ring.has_label(charge_name))
            throw DomainError("unknown label: " + charge_name);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    LabelId charge = doc.ring.find(charge_name);
    FusionBasis basis = enumerate_basis(doc.ring, leaves, charge);
    if (basis.size() == 0)
        throw DomainError("fusion space is zero-dimensional for this (anyons, charge) pair");
    std::vector<Unitary> generators;
    for (int i = 1; i < static_cast<int>(leaves.size()); ++i)
        generators.push_back(braid_generator(doc.ring, symbols.F, symbols.R, basis, i));
    return BraidSetup{std::move(doc), std::move(symbols), std::move(basis),
                      std::move(generators)};
}

int cmd_braid(const std::string& model_path, const std::string& symbols_path,
              const std::string& anyons, const std::string& charge_name,
              const std::string& word_text, const std::string& state_text) {
    BraidSetup setup = load_braid_setup(model_path, symbols_path, anyons, charge_name);
    BraidWord word =
        parse_braid_word(word_text, static_cast<int>(setup.basis.leaves.size()));
    Unitary u = evaluate_word(word, setup.generators);

    std::string payload = "{\n";
    payload += "  \"charge\": \"" + charge_name + "\",\n";
    payload += "  \"dim\": " + std::to_string(setup.basis.size()) + ",\n";
    payload += "  \"unitary\": " + matrix_json(u.matrix);
    if (!state_text.empty()) {
        Eigen::VectorXcd v = parse_vector_json(state_text);
        if (v.size() != static_cast<Eigen::Index>(setup.basis.size()))
            throw DomainError("--state length does not match the basis dimension");
        ChargedState evolved{setup.basis, u.matrix * v};
        payload += ",\n  \"state\": [";
        for (Eigen::Index i = 0; i < evolved.amplitudes.size(); ++i) {
            if (i) payload += ", ";
            payload += "[" + num17(evolved.amplitudes[i].real()) + ", " +
                       num17(evolved.amplitudes[i].imag()) + "]";
        }
        payload += "],\n  \"measure_pair\": [";
        auto probs = measure_pair(evolved);
        for (std::size_t i = 0; i < probs.size(); ++i) {
            if (i) payload += ", ";
            payload += "{\"outcome\": \"" + setup.doc.ring.label(probs[i].first).name +
                       "\", \"probability\": " + num17(probs[i].second) + "}";
        }
        payload += "]";
    }
    payload += "\n}\n";
    std::cout << payload;
    return 0;
}

int cmd_compile(const std::string& model_path, const std::string& symbols_path,
                const std::string& anyons, const std::string& charge_name,
                const std::string& target_text, int max_len) {
    BraidSetup setup = load_braid_setup(model_path, symbols_path, anyons, charge_name);
    Eigen::MatrixXcd target = parse_matrix_json(target_text);
    if (target.rows() != static_cast<Eigen::Index>(setup.basis.size()) ||
        target.cols() != static_cast<Eigen::Index>(setup.basis.size())) {
        std::cerr << "target dimension mismatch: basis dim " << setup.basis.size() << "\n";
        return 2;
    }
    CompileResult res = compile_gate(target, setup.generators, max_len);
    std::string payload = "{\n";
    payload += "  \"distance\": " + num17(res.distance) + ",\n";
    payload += "  \"max_word_length\": " + std::to_string(max_len) + ",\n";
    payload += "  \"word\": \"" + format_braid_word(res.word) + "\",\n";
    payload += "  \"words_searched\": " + std::to_string(res.words_searched) + "\n";
    payload += "}\n";
    std::cout << payload;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Anyon model validation, coherence solving and braiding"};
    app.require_subcommand(1);
    // Global flags may appear before or after the subcommand.
    app.fallthrough();

    bool json_output = false;  // stdout is always JSON; flag kept for scripts
    double tol = 1e-10;
    std::uint64_t seed = 0;
    app.add_flag("--json", json_output, "machine-readable output (default)");
    app.add_option("--tol", tol, "numerical tolerance");
    app.add_option("--seed", seed, "random seed for the solver");

    std::string model_path, symbols_path, charge, anyons, word, state, target, out_path;
    int restarts = 64, max_len = 8;

    auto* validate = app.add_subcommand("validate", "check a model against the ring axioms");
    validate->add_option("model", model_path)->required();

    auto* homcats = app.add_subcommand("homcats", "list Hom-categories and their fusion spaces");
    homcats->add_option("model", model_path)->required();
    homcats->add_option("--charge", charge, "restrict to one total charge");

    auto* dims = app.add_subcommand("dims", "fusion space dimensions for an anyon word");
    dims->add_option("model", model_path)->required();
    dims->add_option("--anyons", anyons, "whitespace-separated anyon labels")->required();
    dims->add_option("--charge", charge, "restrict to one total charge");

    auto* solve = app.add_subcommand("solve", "solve the pentagon and hexagon equations");
    solve->add_option("model", model_path)->required();
    solve->add_option("--out", out_path, "write the symbol tables to this JSON file");
    solve->add_option("--restarts", restarts, "random restarts");

    auto* verify = app.add_subcommand("verify", "re-verify a symbols file independently");
    verify->add_option("model", model_path)->required();
    verify->add_option("symbols", symbols_path)->required();

    auto* braid = app.add_subcommand("braid", "evaluate a braid word on a fusion basis");
    braid->add_option("model", model_path)->required();
    braid->add_option("symbols", symbols_path)->required();
    braid->add_option("--anyons", anyons)->required();
    braid->add_option("--charge", charge)->required();
    braid->add_option("--word", word, "braid word, e.g. 's1 s2^-1'");
    braid->add_option("--state", state, "initial amplitudes as JSON [re,im] pairs");

    auto* compile = app.add_subcommand("compile", "search braid words approximating a gate");
    compile->add_option("model", model_path)->required();
    compile->add_option("symbols", symbols_path)->required();
    compile->add_option("--anyons", anyons)->required();
    compile->add_option("--charge", charge)->required();
    compile->add_option("--target", target, "target unitary as JSON matrix")->required();
    compile->add_option("--max-len", max_len, "maximum word length (<= 14)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(model_path);
        if (homcats->parsed()) return cmd_homcats(model_path, charge);
        if (dims->parsed()) return cmd_dims(model_path, anyons, charge);
        if (solve->parsed()) return cmd_solve(model_path, tol, seed, restarts, out_path);
        if (verify->parsed()) return cmd_verify(model_path, symbols_path, tol);
        if (braid->parsed()) return cmd_braid(model_path, symbols_path, anyons, charge, word, state);
        if (compile->parsed())
            return cmd_compile(model_path, symbols_path, anyons, charge, target, max_len);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedFeatureError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return 1;
    } catch (const IncompleteTableError& e) {
        std::cerr << "incomplete table: " << e.what() << "\n";
        return 1;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
