#pragma once

// Object-level data of an anyonic theory: labels, duals and integer fusion
// coefficients, plus the ring-level axiom checks.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace anyonkit {

/// Index into a model's label list. Id 0 is always the unit label.
using LabelId = std::uint32_t;

constexpr LabelId kUnit = 0;

struct Label {
    LabelId id = 0;
    std::string name;
};

class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnsupportedFeatureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One violated ring axiom with the witnessing label tuple.
struct RingViolation {
    std::string axiom;             // "unit", "duality", "finiteness", "associativity"
    std::vector<LabelId> witness;  // labels involved
    std::string message;
};

/// Immutable after construction; all member functions are const and pure.
class FusionRing {
public:
    FusionRing(std::vector<std::string> label_names,
               std::vector<LabelId> dual_map,
               std::vector<std::uint32_t> fusion_tensor)
        : num_labels_(label_names.size()),
          dual_(std::move(dual_map)),
          tensor_(std::move(fusion_tensor)) {
        if (num_labels_ == 0)
            throw DomainError("fusion ring needs at least the unit label");
        if (dual_.size() != num_labels_ ||
            tensor_.size() != num_labels_ * num_labels_ * num_labels_)
            throw DomainError("fusion ring data has inconsistent sizes");
        labels_.reserve(num_labels_);
        for (LabelId i = 0; i < num_labels_; ++i)
            labels_.push_back(Label{i, label_names[i]});
    }

    std::size_t size() const { return num_labels_; }
    const std::vector<Label>& labels() const { return labels_; }
    const Label& label(LabelId a) const {
        check_label(a);
        return labels_[a];
    }

    LabelId unit() const { return kUnit; }
    LabelId dual(LabelId a) const {
        check_label(a);
        return dual_[a];
    }

    /// Fusion multiplicity N(a,b,c).
    std::uint32_t n(LabelId a, LabelId b, LabelId c) const {
        check_label(a);
        check_label(b);
        check_label(c);
        return tensor_[(a * num_labels_ + b) * num_labels_ + c];
    }

    bool admissible(LabelId a, LabelId b, LabelId c) const { return n(a, b, c) > 0; }

    bool multiplicity_free() const {
        return std::all_of(tensor_.begin(), tensor_.end(),
                           [](std::uint32_t m) { return m <= 1; });
    }

    /// Looks up a label id by display name; throws DomainError if unknown.
    LabelId find(const std::string& name) const {
        for (const Label& l : labels_)
            if (l.name == name) return l.id;
        throw DomainError("unknown label: " + name);
    }

    bool has_label(const std::string& name) const {
        return std::any_of(labels_.begin(), labels_.end(),
                           [&](const Label& l) { return l.name == name; });
    }

    /// Fusion matrix of a: (N_a)_{bc} = N(a,b,c).
    Eigen::MatrixXd fusion_matrix(LabelId a) const {
        check_label(a);
        Eigen::MatrixXd m(num_labels_, num_labels_);
        for (LabelId b = 0; b < num_labels_; ++b)
            for (LabelId c = 0; c < num_labels_; ++c)
                m(b, c) = static_cast<double>(n(a, b, c));
        return m;
    }

private:
    void check_label(LabelId a) const {
        if (a >= num_labels_) throw DomainError("label id out of range");
    }

    std::size_t num_labels_;
    std::vector<Label> labels_;
    std::vector<LabelId> dual_;
    std::vector<std::uint32_t> tensor_;
};

/// {(c, N(a,b,c)) : N(a,b,c) > 0}, ordered by label id.
inline std::vector<std::pair<LabelId, std::uint32_t>> fuse(const FusionRing& ring,
                                                           LabelId a, LabelId b) {
    std::vector<std::pair<LabelId, std::uint32_t>> out;
    for (LabelId c = 0; c < ring.size(); ++c)
        if (std::uint32_t m = ring.n(a, b, c); m > 0) out.emplace_back(c, m);
    return out;
}

/// Left-associated iterated fusion of a nonempty word.
inline std::vector<std::pair<LabelId, std::uint32_t>> fuse_word(
    const FusionRing& ring, const std::vector<LabelId>& word) {
    if (word.empty()) throw DomainError("fuse_word: empty word");
    std::vector<std::uint64_t> acc(ring.size(), 0);
    acc.at(word[0]) = 1;  // .at also validates the label
    for (std::size_t i = 1; i < word.size(); ++i) {
        LabelId b = word[i];
        if (b >= ring.size()) throw DomainError("fuse_word: unknown label");
        std::vector<std::uint64_t> next(ring.size(), 0);
        for (LabelId a = 0; a < ring.size(); ++a) {
            if (acc[a] == 0) continue;
            for (LabelId c = 0; c < ring.size(); ++c)
                next[c] += acc[a] * ring.n(a, b, c);
        }
        acc = std::move(next);
    }
    std::vector<std::pair<LabelId, std::uint32_t>> out;
    for (LabelId c = 0; c < ring.size(); ++c)
        if (acc[c] > 0) out.emplace_back(c, static_cast<std::uint32_t>(acc[c]));
    return out;
}

/// Checks every ring-level axiom; empty result means the ring is valid.
inline std::vector<RingViolation> verify_ring(const FusionRing& ring) {
    std::vector<RingViolation> report;
    const LabelId L = static_cast<LabelId>(ring.size());
    const LabelId u = ring.unit();

    for (LabelId x = 0; x < L; ++x) {
        for (LabelId y = 0; y < L; ++y) {
            std::uint32_t expect = (x == y) ? 1 : 0;
            if (ring.n(u, x, y) != expect)
                report.push_back({"unit", {u, x, y},
                                  "N(unit," + ring.label(x).name + "," + ring.label(y).name +
                                      ") != " + std::to_string(expect)});
            if (ring.n(x, u, y) != expect)
                report.push_back({"unit", {x, u, y},
                                  "N(" + ring.label(x).name + ",unit," + ring.label(y).name +
                                      ") != " + std::to_string(expect)});
        }
    }

    if (ring.dual(u) != u)
        report.push_back({"duality", {u}, "dual(unit) != unit"});
    for (LabelId x = 0; x < L; ++x) {
        if (ring.dual(x) >= L) {
            report.push_back({"duality", {x}, "dual out of range"});
            continue;
        }
        if (ring.dual(ring.dual(x)) != x)
            report.push_back({"duality", {x}, "dual(dual(" + ring.label(x).name + ")) != " +
                                                  ring.label(x).name});
        if (ring.n(x, ring.dual(x), u) < 1)
            report.push_back({"duality", {x, ring.dual(x), u},
                              "N(" + ring.label(x).name + ", dual, unit) == 0"});
    }

    for (LabelId a = 0; a < L; ++a)
        for (LabelId b = 0; b < L; ++b) {
            bool any = false;
            for (LabelId c = 0; c < L; ++c)
                if (ring.n(a, b, c) > 0) { any = true; break; }
            if (!any)
                report.push_back({"finiteness", {a, b},
                                  "fuse(" + ring.label(a).name + "," + ring.label(b).name +
                                      ") is empty"});
        }

    // Exact integer check of sum_p N(i,j,p) N(p,k,l) == sum_q N(j,k,q) N(i,q,l).
    for (LabelId i = 0; i < L; ++i)
        for (LabelId j = 0; j < L; ++j)
            for (LabelId k = 0; k < L; ++k)
                for (LabelId l = 0; l < L; ++l) {
                    std::uint64_t lhs = 0, rhs = 0;
                    for (LabelId p = 0; p < L; ++p)
                        lhs += static_cast<std::uint64_t>(ring.n(i, j, p)) * ring.n(p, k, l);
                    for (LabelId q = 0; q < L; ++q)
                        rhs += static_cast<std::uint64_t>(ring.n(j, k, q)) * ring.n(i, q, l);
                    if (lhs != rhs)
                        report.push_back({"associativity", {i, j, k, l},
                                          "associativity fails at (" + ring.label(i).name + "," +
                                              ring.label(j).name + "," + ring.label(k).name +
                                              "," + ring.label(l).name + ")"});
                }
    return report;
}

/// Perron-Frobenius eigenvalue of each label's fusion matrix.
inline std::vector<double> quantum_dimensions(const FusionRing& ring) {
    if (!verify_ring(ring).empty())
        throw DomainError("quantum_dimensions: ring does not pass verify_ring");
    std::vector<double> d(ring.size());
    for (LabelId a = 0; a < ring.size(); ++a) {
        Eigen::EigenSolver<Eigen::MatrixXd> es(ring.fusion_matrix(a), false);
        double rho = 0.0;
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            rho = std::max(rho, std::abs(es.eigenvalues()[k]));
        d[a] = rho;
    }
    return d;
}

}  // namespace anyonkit
