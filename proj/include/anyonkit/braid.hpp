#pragma once

// Unitary braid-group representation on left-associated fusion bases,
// group-closure probing, brute-force gate compilation and fusion readout.
//
// sigma_1 acts diagonally through R on the first internal channel. For
// i > 1 the strands are brought into adjacent fusion position with an
// F-move, braided with R, and moved back:
//   sigma_i = (F_{xba}^T)^{-1} . diag(R^{ab}_c) . F_{xab}^T
// acting on the channel between the first i and the remaining leaves,
// where x is the charge of the first i-1 leaves and the matrices act on
// coefficient vectors of the canonical basis.

#include <cmath>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anyonkit/coherence.hpp"
#include "anyonkit/fusion_ring.hpp"
#include "anyonkit/fusion_space.hpp"

namespace anyonkit {

struct BraidLetter {
    int generator = 1;  // 1-based strand index
    int exponent = 1;   // +1 or -1
    bool operator==(const BraidLetter&) const = default;
};

struct BraidWord {
    std::vector<BraidLetter> letters;
    int arity = 2;  // number of strands
};

/// Parses the `s<k>` / `s<k>^-1` token syntax, e.g. "s1 s2^-1 s1".
inline BraidWord parse_braid_word(const std::string& text, int arity) {
    BraidWord word;
    word.arity = arity;
    std::istringstream stream(text);
    std::string token;
    while (stream >> token) {
        int exponent = 1;
        std::string base = token;
        if (auto caret = token.find('^'); caret != std::string::npos) {
            std::string suffix = token.substr(caret + 1);
            base = token.substr(0, caret);
            if (suffix == "-1")
                exponent = -1;
            else if (suffix != "1")
                throw DomainError("braid word: bad exponent '" + suffix + "'");
        }
        if (base.size() < 2 || base[0] != 's')
            throw DomainError("braid word: bad token '" + token + "'");
        int gen = 0;
        try {
            gen = std::stoi(base.substr(1));
        } catch (const std::exception&) {
            throw DomainError("braid word: bad token '" + token + "'");
        }
        if (gen < 1 || gen > arity - 1)
            throw DomainError("braid word: generator index " + std::to_string(gen) +
                              " out of range for " + std::to_string(arity) + " strands");
        word.letters.push_back({gen, exponent});
    }
    return word;
}

inline std::string format_braid_word(const BraidWord& word) {
    std::string out;
    for (const BraidLetter& l : word.letters) {
        if (!out.empty()) out += " ";
        out += "s" + std::to_string(l.generator);
        if (l.exponent < 0) out += "^-1";
    }
    return out;
}

struct Unitary {
    Eigen::MatrixXcd matrix;
    FusionBasis basis;

    double unitarity_deviation() const {
        return (matrix * matrix.adjoint() -
                Eigen::MatrixXcd::Identity(matrix.rows(), matrix.rows()))
            .cwiseAbs()
            .maxCoeff();
    }
};

/// The braid generator sigma_i on the basis; requires identical leaf
/// labels at strand positions i and i+1 so the basis is preserved.
inline Unitary braid_generator(const FusionRing& ring, const FSymbolTable& F,
                               const RSymbolTable& R, const FusionBasis& basis, int i) {
    const int n = static_cast<int>(basis.leaves.size());
    if (i < 1 || i > n - 1) throw DomainError("braid_generator: strand index out of range");
    const LabelId a = basis.leaves[static_cast<std::size_t>(i - 1)];
    const LabelId b = basis.leaves[static_cast<std::size_t>(i)];
    if (a != b)
        throw UnsupportedFeatureError(
            "braid_generator: mixed-type braiding (unequal leaves) is not supported");
    if (!ring.multiplicity_free())
        throw UnsupportedFeatureError("braid_generator: multiplicity-free rings only");

    const Eigen::Index d = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);

    if (i == 1) {
        for (Eigen::Index t = 0; t < d; ++t) {
            LabelId c = basis.trees[static_cast<std::size_t>(t)].chain_charge(2);
            out(t, t) = R.at({a, b, c});
        }
        return {out, basis};
    }

    // Group basis trees by everything except the channel c_i; within each
    // group apply (F^T)^-1 diag(R) F^T.
    for (Eigen::Index s = 0; s < d; ++s) {
        const FusionTree& tree = basis.trees[static_cast<std::size_t>(s)];
        LabelId x = tree.chain_charge(static_cast<std::size_t>(i - 1));
        LabelId y = tree.chain_charge(static_cast<std::size_t>(i + 1));
        FBlockShape shape = f_block_shape(ring, x, a, b, y);
        Eigen::MatrixXcd fxab(shape.rows.size(), shape.cols.size());
        for (std::size_t r = 0; r < shape.rows.size(); ++r)
            for (std::size_t c = 0; c < shape.cols.size(); ++c)
                fxab(r, c) = F.at({x, a, b, y, shape.rows[r], shape.cols[c]});
        Eigen::VectorXcd rdiag(shape.cols.size());
        for (std::size_t c = 0; c < shape.cols.size(); ++c)
            rdiag[static_cast<Eigen::Index>(c)] = R.at({a, b, shape.cols[c]});
        // Identical leaves: F^{xba}_y == F^{xab}_y, so the block is reused.
        Eigen::MatrixXcd local = fxab.transpose().inverse() * rdiag.asDiagonal() *
                                 fxab.transpose();

        LabelId m = tree.chain_charge(static_cast<std::size_t>(i));
        std::size_t mi = 0;
        while (shape.rows[mi] != m) ++mi;
        for (std::size_t mj = 0; mj < shape.rows.size(); ++mj) {
            FusionTree target = tree;
            target.internals[static_cast<std::size_t>(i - 2)] = shape.rows[mj];
            // Locate the target tree in the basis.
            for (Eigen::Index t = 0; t < d; ++t)
                if (basis.trees[static_cast<std::size_t>(t)] == target) {
                    out(t, s) = local(static_cast<Eigen::Index>(mj),
                                      static_cast<Eigen::Index>(mi));
                    break;
                }
        }
    }
    return {out, basis};
}

/// Ordered product of generator matrices; the empty word is the identity.
inline Unitary evaluate_word(const BraidWord& word, const std::vector<Unitary>& generators) {
    if (generators.empty()) throw DomainError("evaluate_word: no generators");
    if (static_cast<int>(generators.size()) != word.arity - 1)
        throw DomainError("evaluate_word: generator count does not match word arity");
    for (const Unitary& g : generators)
        if (g.basis != generators[0].basis)
            throw DomainError("evaluate_word: generators on different bases");
    const Eigen::Index d = generators[0].matrix.rows();
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(d, d);
    for (const BraidLetter& l : word.letters) {
        const Eigen::MatrixXcd& g = generators[static_cast<std::size_t>(l.generator - 1)].matrix;
        acc = (l.exponent > 0 ? g : Eigen::MatrixXcd(g.adjoint())) * acc;
    }
    return {acc, generators[0].basis};
}

/// Global-phase-invariant operator distance min_phi ||U - e^{i phi} V||_F.
inline double phase_distance(const Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
    double overlap = std::abs((u.adjoint() * v).trace());
    double val = u.squaredNorm() + v.squaredNorm() - 2.0 * overlap;
    return std::sqrt(std::max(val, 0.0));
}

namespace detail {

/// Canonical representative mod global phase: scale so the largest-modulus
/// entry is real positive.
inline Eigen::MatrixXcd phase_align(const Eigen::MatrixXcd& m) {
    Eigen::Index bi = 0, bj = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > best) {
                best = std::abs(m(i, j));
                bi = i;
                bj = j;
            }
    Complex pivot = m(bi, bj);
    if (std::abs(pivot) == 0.0) return m;
    return m * (std::conj(pivot) / std::abs(pivot));
}

}  // namespace detail

struct GroupClosureReport {
    std::size_t element_count = 0;
    bool saturated = false;
    int max_word_length = 0;
};

/// Breadth-first closure of the generated group mod global phase. Stops
/// when no new elements appear, or when element_cap or max_word_length is
/// exceeded (reported, not an error).
inline GroupClosureReport group_closure(const std::vector<Unitary>& generators,
                                        double dedup_tol = 1e-8,
                                        std::size_t element_cap = 2000,
                                        int max_word_length = 20) {
    if (generators.empty()) throw DomainError("group_closure: no generators");
    const Eigen::Index d = generators[0].matrix.rows();

    std::vector<Eigen::MatrixXcd> steps;
    for (const Unitary& g : generators) {
        steps.push_back(g.matrix);
        steps.push_back(g.matrix.adjoint());
    }

    std::vector<Eigen::MatrixXcd> elements;  // phase-aligned
    auto known = [&](const Eigen::MatrixXcd& m) {
        for (const auto& e : elements)
            if ((e - m).cwiseAbs().maxCoeff() < dedup_tol) return true;
        return false;
    };

    elements.push_back(detail::phase_align(Eigen::MatrixXcd::Identity(d, d)));
    std::deque<Eigen::MatrixXcd> frontier;  // unaligned representatives
    frontier.push_back(Eigen::MatrixXcd::Identity(d, d));

    GroupClosureReport report;
    int length = 0;
    while (!frontier.empty() && length < max_word_length) {
        ++length;
        std::deque<Eigen::MatrixXcd> next;
        for (const auto& u : frontier) {
            for (const auto& s : steps) {
                Eigen::MatrixXcd v = s * u;
                Eigen::MatrixXcd canon = detail::phase_align(v);
                if (known(canon)) continue;
                elements.push_back(canon);
                if (elements.size() > element_cap) {
                    report.element_count = elements.size();
                    report.saturated = false;
                    report.max_word_length = length;
                    return report;
                }
                next.push_back(std::move(v));
            }
        }
        if (next.empty()) {
            report.saturated = true;
            break;
        }
        frontier = std::move(next);
        report.max_word_length = length;
    }
    report.element_count = elements.size();
    if (frontier.empty()) report.saturated = true;
    return report;
}

struct CompileResult {
    BraidWord word;
    double distance = 0.0;
    std::uint64_t words_searched = 0;
};

/// Exhaustive search over reduced braid words up to max_word_length for
/// the word closest to the target in phase-invariant distance. Immediate
/// inverse cancellations are skipped; the searched set of group elements
/// equals that of the full enumeration.
inline CompileResult compile_gate(const Eigen::MatrixXcd& target,
                                  const std::vector<Unitary>& generators, int max_word_length) {
    if (generators.empty()) throw DomainError("compile_gate: no generators");
    if (max_word_length < 0 || max_word_length > 14)
        throw DomainError("compile_gate: max word length must be in [0, 14]");
    const Eigen::Index d = generators[0].matrix.rows();
    if (target.rows() != d || target.cols() != d)
        throw DomainError("compile_gate: target dimension mismatch");

    struct Step {
        BraidLetter letter;
        Eigen::MatrixXcd matrix;
    };
    std::vector<Step> steps;
    for (std::size_t g = 0; g < generators.size(); ++g) {
        steps.push_back({{static_cast<int>(g + 1), 1}, generators[g].matrix});
        steps.push_back({{static_cast<int>(g + 1), -1},
                         Eigen::MatrixXcd(generators[g].matrix.adjoint())});
    }

    CompileResult best;
    best.word.arity = static_cast<int>(generators.size()) + 1;
    best.distance = phase_distance(target, Eigen::MatrixXcd::Identity(d, d));
    best.words_searched = 1;

    struct Node {
        std::vector<BraidLetter> letters;
        Eigen::MatrixXcd matrix;
    };
    std::deque<Node> frontier;
    frontier.push_back({{}, Eigen::MatrixXcd::Identity(d, d)});
    for (int length = 1; length <= max_word_length; ++length) {
        std::deque<Node> next;
        for (const auto& node : frontier) {
            for (const auto& step : steps) {
                if (!node.letters.empty()) {
                    const BraidLetter& last = node.letters.back();
                    if (last.generator == step.letter.generator &&
                        last.exponent == -step.letter.exponent)
                        continue;  // reduced words only
                }
                Node child{node.letters, step.matrix * node.matrix};
                child.letters.push_back(step.letter);
                ++best.words_searched;
                double dist = phase_distance(target, child.matrix);
                if (dist < best.distance - 1e-15) {
                    best.distance = dist;
                    best.word.letters = child.letters;
                }
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    return best;
}

/// Born-rule readout of the first fusion channel: probability of each
/// outcome k1 is the squared norm of the amplitudes whose trees share
/// that internal label.
inline std::vector<std::pair<LabelId, double>> measure_pair(const ChargedState& state) {
    if (state.basis.leaves.size() < 3)
        throw DomainError("measure_pair: needs at least 3 anyons");
    if (std::abs(state.norm() - 1.0) > 1e-6)
        throw DomainError("measure_pair: state is not normalized");
    std::map<LabelId, double> probs;
    for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
        LabelId k1 = state.basis.trees[static_cast<std::size_t>(i)].internals[0];
        probs[k1] += std::norm(state.amplitudes[i]);
    }
    std::vector<std::pair<LabelId, double>> out(probs.begin(), probs.end());
    return out;
}

}  // namespace anyonkit
