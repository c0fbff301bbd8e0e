#pragma once

// Canonical left-associated fusion-tree bases, dimension bookkeeping,
// Hom-category indexing and the superselection-respecting state type.

#include <complex>
#include <cstdint>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "anyonkit/fusion_ring.hpp"

namespace anyonkit {

using Complex = std::complex<double>;

/// A left-associated ("caterpillar") fusion tree. For n leaves the
/// intermediate charges are the results of fusing the first 2, 3, ...,
/// n-1 leaves, so internals has length n-2 (empty for n <= 2).
struct FusionTree {
    std::vector<LabelId> leaves;
    std::vector<LabelId> internals;
    LabelId charge = kUnit;

    bool operator==(const FusionTree&) const = default;

    /// Charge after fusing the first k leaves, 1 <= k <= n.
    LabelId chain_charge(std::size_t k) const {
        if (k == 1) return leaves[0];
        if (k == leaves.size()) return charge;
        return internals[k - 2];
    }
};

struct FusionBasis {
    std::vector<LabelId> leaves;
    LabelId charge = kUnit;
    std::vector<FusionTree> trees;  // lexicographic in internal label ids

    std::size_t size() const { return trees.size(); }

    bool operator==(const FusionBasis&) const = default;
};

/// dim V^charge_{leaves} by iterated fusion-matrix product; valid for
/// arbitrary multiplicities.
inline std::uint64_t dim(const FusionRing& ring, const std::vector<LabelId>& leaves,
                         LabelId charge) {
    if (leaves.empty()) throw DomainError("dim: empty leaves");
    if (charge >= ring.size()) throw DomainError("dim: unknown charge");
    std::vector<std::uint64_t> acc(ring.size(), 0);
    acc.at(leaves[0]) = 1;
    for (std::size_t i = 1; i < leaves.size(); ++i) {
        LabelId b = leaves[i];
        if (b >= ring.size()) throw DomainError("dim: unknown leaf label");
        std::vector<std::uint64_t> next(ring.size(), 0);
        for (LabelId a = 0; a < ring.size(); ++a) {
            if (acc[a] == 0) continue;
            for (LabelId c = 0; c < ring.size(); ++c)
                next[c] += acc[a] * ring.n(a, b, c);
        }
        acc = std::move(next);
    }
    return acc[charge];
}

/// All admissible left-associated trees over the given leaves and total
/// charge, in deterministic lexicographic order of internal label ids.
inline FusionBasis enumerate_basis(const FusionRing& ring, const std::vector<LabelId>& leaves,
                                   LabelId charge) {
    if (leaves.empty()) throw DomainError("enumerate_basis: empty leaves");
    if (!ring.multiplicity_free())
        throw UnsupportedFeatureError(
            "enumerate_basis: ring has fusion multiplicities > 1; only dim is supported");
    if (charge >= ring.size()) throw DomainError("enumerate_basis: unknown charge");
    for (LabelId l : leaves)
        if (l >= ring.size()) throw DomainError("enumerate_basis: unknown leaf label");

    FusionBasis basis{leaves, charge, {}};
    const std::size_t n = leaves.size();
    if (n == 1) {
        if (leaves[0] == charge) basis.trees.push_back({leaves, {}, charge});
        return basis;
    }
    if (n == 2) {
        if (ring.admissible(leaves[0], leaves[1], charge))
            basis.trees.push_back({leaves, {}, charge});
        return basis;
    }
    std::vector<LabelId> internals(n - 2, kUnit);
    // Depth-first over internal slots; label ids are tried in increasing
    // order, so the output is lexicographic by construction.
    auto recurse = [&](auto&& self, std::size_t slot, LabelId prev) -> void {
        if (slot == n - 2) {
            if (ring.admissible(prev, leaves[n - 1], charge))
                basis.trees.push_back({leaves, internals, charge});
            return;
        }
        for (LabelId k = 0; k < ring.size(); ++k) {
            if (!ring.admissible(prev, leaves[slot + 1], k)) continue;
            internals[slot] = k;
            self(self, slot + 1, k);
        }
    };
    recurse(recurse, 0, leaves[0]);
    return basis;
}

/// Internal-label chains of the direct-sum decomposition into pairwise
/// fusion spaces; bijective with enumerate_basis.
inline std::vector<std::vector<LabelId>> decompose(const FusionRing& ring,
                                                   const std::vector<LabelId>& leaves,
                                                   LabelId charge) {
    FusionBasis basis = enumerate_basis(ring, leaves, charge);
    std::vector<std::vector<LabelId>> chains;
    chains.reserve(basis.size());
    for (const FusionTree& t : basis.trees) chains.push_back(t.internals);
    return chains;
}

/// The Hom-category indexed by one total charge: all pairwise fusion
/// spaces V_ab^charge, listed exhaustively in (a,b) id order.
struct HomCategoryIndex {
    LabelId charge = kUnit;
    std::vector<std::pair<LabelId, LabelId>> simple_objects;
};

inline HomCategoryIndex homcat(const FusionRing& ring, LabelId charge) {
    if (charge >= ring.size()) throw DomainError("homcat: unknown charge");
    HomCategoryIndex idx{charge, {}};
    for (LabelId a = 0; a < ring.size(); ++a)
        for (LabelId b = 0; b < ring.size(); ++b)
            if (ring.admissible(a, b, charge)) idx.simple_objects.emplace_back(a, b);
    return idx;
}

/// Amplitudes over one fusion basis. The sector (leaves, charge) is fixed
/// by the basis, so cross-charge components are unrepresentable.
struct ChargedState {
    FusionBasis basis;
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
};

struct SuperselectionError {
    std::vector<LabelId> leaves1, leaves2;
    LabelId charge1 = kUnit, charge2 = kUnit;
    std::string message;
};

/// c1*s1 + c2*s2 when both states live in the same (leaves, charge)
/// sector; a SuperselectionError otherwise.
inline std::variant<ChargedState, SuperselectionError> superpose(const ChargedState& s1,
                                                                 const ChargedState& s2,
                                                                 Complex c1, Complex c2) {
    if (s1.basis.charge != s2.basis.charge) {
        return SuperselectionError{s1.basis.leaves, s2.basis.leaves, s1.basis.charge,
                                   s2.basis.charge,
                                   "superposition across total charges is not a coherent state"};
    }
    if (s1.basis.leaves != s2.basis.leaves) {
        return SuperselectionError{s1.basis.leaves, s2.basis.leaves, s1.basis.charge,
                                   s2.basis.charge,
                                   "states are over different anyon contents"};
    }
    ChargedState out{s1.basis, c1 * s1.amplitudes + c2 * s2.amplitudes};
    return out;
}

}  // namespace anyonkit
