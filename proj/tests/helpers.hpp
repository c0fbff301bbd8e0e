#pragma once

// Shared oracles and generators used across the test suite. Everything here
// is written independently of the library internals it checks.

#include <map>
#include <random>
#include <string>
#include <vector>

#include "anyonkit/anyonkit.hpp"

namespace testutil {

using namespace anyonkit;

/// Group ring of Z_n: labels g0..g{n-1}, fusion = addition mod n.
inline FusionRing cyclic_ring(unsigned n) {
    std::vector<std::string> names;
    for (unsigned i = 0; i < n; ++i) names.push_back("g" + std::to_string(i));
    std::vector<LabelId> dual(n);
    for (unsigned i = 0; i < n; ++i) dual[i] = static_cast<LabelId>((n - i) % n);
    std::vector<std::uint32_t> tensor(static_cast<std::size_t>(n) * n * n, 0);
    for (unsigned a = 0; a < n; ++a)
        for (unsigned b = 0; b < n; ++b)
            tensor[(static_cast<std::size_t>(a) * n + b) * n + (a + b) % n] = 1;
    return FusionRing(names, std::move(dual), std::move(tensor));
}

/// Product group ring Z_a x Z_b.
inline FusionRing product_ring(unsigned na, unsigned nb) {
    const unsigned n = na * nb;
    auto idx = [&](unsigned i, unsigned j) { return i * nb + j; };
    std::vector<std::string> names(n);
    std::vector<LabelId> dual(n);
    std::vector<std::uint32_t> tensor(static_cast<std::size_t>(n) * n * n, 0);
    for (unsigned i = 0; i < na; ++i)
        for (unsigned j = 0; j < nb; ++j) {
            unsigned a = idx(i, j);
            names[a] = "g" + std::to_string(i) + "_" + std::to_string(j);
            dual[a] = idx((na - i) % na, (nb - j) % nb);
            for (unsigned k = 0; k < na; ++k)
                for (unsigned l = 0; l < nb; ++l) {
                    unsigned b = idx(k, l);
                    unsigned c = idx((i + k) % na, (j + l) % nb);
                    tensor[(static_cast<std::size_t>(a) * n + b) * n + c] = 1;
                }
        }
    return FusionRing(names, std::move(dual), std::move(tensor));
}

/// Brute-force dimension oracle: enumerates every left-associated chain of
/// intermediate charges directly from the fusion tensor, counting
/// multiplicities, with no shared code with dim()/enumerate_basis().
inline std::uint64_t brute_force_dim(const FusionRing& ring, const std::vector<LabelId>& leaves,
                                     LabelId charge) {
    struct Walker {
        const FusionRing& ring;
        const std::vector<LabelId>& leaves;
        LabelId charge;
        std::uint64_t count = 0;
        void walk(std::size_t next, LabelId current, std::uint64_t ways) {
            if (next == leaves.size()) {
                if (current == charge) count += ways;
                return;
            }
            for (LabelId k = 0; k < ring.size(); ++k) {
                std::uint32_t m = ring.n(current, leaves[next], k);
                if (m > 0) walk(next + 1, k, ways * m);
            }
        }
    };
    Walker w{ring, leaves, charge};
    w.walk(1, leaves[0], 1);
    return w.count;
}

/// Random unit-modulus gauge over the non-vacuum fusion spaces.
inline GaugePhases random_gauge(const FusionRing& ring, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    GaugePhases g;
    for (const RKey& k : r_admissible_triples(ring))
        if (k.a != kUnit && k.b != kUnit) g.phases[k] = std::polar(1.0, angle(rng));
    return g;
}

inline const ModelDocument& model(const std::string& name) {
    static const std::map<std::string, ModelDocument> models = bundled_models();
    return models.at(name);
}

/// Solved (F, R) tables per model, computed once per test binary.
struct SolvedModel {
    FSymbolTable F;
    RSymbolTable R;
};

inline const SolvedModel& solved(const std::string& name) {
    static std::map<std::string, SolvedModel> cache;
    auto it = cache.find(name);
    if (it == cache.end()) {
        SolverConfig config;
        CoherenceSolveResult r = solve_coherence(model(name).ring, config);
        if (!r.success) throw std::runtime_error("test setup: solve failed for " + name);
        it = cache.emplace(name, SolvedModel{r.pentagon.table, r.hexagon.table}).first;
    }
    return it->second;
}

}  // namespace testutil
