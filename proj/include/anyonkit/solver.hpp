#pragma once

// Numerical pentagon/hexagon solving for multiplicity-free rings.
//
// The solver flattens the coherence conditions into a real least-squares
// system (scalar pentagon/hexagon identities plus per-block unitarity as
// soft constraints) and runs damped Gauss-Newton from random unitary
// starting points. Accepted solutions are re-verified with the diagram
// evaluators in coherence.hpp, which share no code with this system.

#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "anyonkit/coherence.hpp"
#include "anyonkit/fusion_ring.hpp"

namespace anyonkit {
namespace detail {

struct LMOutcome {
    Eigen::VectorXd theta;
    double residual_inf = 0.0;
    int iterations = 0;
};

/// Damped Gauss-Newton on ||r(theta)||^2 with a central-difference Jacobian.
inline LMOutcome levenberg_marquardt(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    Eigen::VectorXd theta, int max_iterations) {
    const double kStep = 1e-7;
    double lambda = 1e-3;
    LMOutcome out;
    Eigen::VectorXd r = residual(theta);
    for (int iter = 0; iter < max_iterations; ++iter) {
        out.iterations = iter;
        if (r.size() == 0 || r.lpNorm<Eigen::Infinity>() < 1e-13) break;
        Eigen::MatrixXd J(r.size(), theta.size());
        for (Eigen::Index k = 0; k < theta.size(); ++k) {
            Eigen::VectorXd tp = theta, tm = theta;
            tp[k] += kStep;
            tm[k] -= kStep;
            J.col(k) = (residual(tp) - residual(tm)) / (2.0 * kStep);
        }
        Eigen::MatrixXd A = J.transpose() * J;
        Eigen::VectorXd g = J.transpose() * r;
        double n2 = r.squaredNorm();
        bool accepted = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd Ad = A;
            Ad.diagonal().array() += lambda;
            Eigen::VectorXd delta = Ad.ldlt().solve(-g);
            Eigen::VectorXd theta2 = theta + delta;
            Eigen::VectorXd r2 = residual(theta2);
            if (r2.squaredNorm() < n2) {
                theta = theta2;
                r = std::move(r2);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    out.theta = std::move(theta);
    out.residual_inf = r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
    return out;
}

/// Same damping loop with a caller-supplied sparse Jacobian (used by the
/// pentagon stage, where the analytic Jacobian is cheap and very sparse).
inline LMOutcome levenberg_marquardt_sparse(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    const std::function<Eigen::SparseMatrix<double>(const Eigen::VectorXd&)>& jacobian,
    Eigen::VectorXd theta, int max_iterations) {
    double lambda = 1e-3;
    LMOutcome out;
    Eigen::VectorXd r = residual(theta);
    for (int iter = 0; iter < max_iterations; ++iter) {
        out.iterations = iter;
        if (r.size() == 0 || r.lpNorm<Eigen::Infinity>() < 1e-13) break;
        Eigen::SparseMatrix<double> J = jacobian(theta);
        Eigen::MatrixXd A = Eigen::MatrixXd(Eigen::SparseMatrix<double>(J.transpose() * J));
        Eigen::VectorXd g = J.transpose() * r;
        double n2 = r.squaredNorm();
        bool accepted = false;
        for (int tries = 0; tries < 12; ++tries) {
            Eigen::MatrixXd Ad = A;
            Ad.diagonal().array() += lambda;
            Eigen::VectorXd delta = Ad.ldlt().solve(-g);
            Eigen::VectorXd theta2 = theta + delta;
            Eigen::VectorXd r2 = residual(theta2);
            if (r2.squaredNorm() < n2) {
                theta = theta2;
                r = std::move(r2);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
    }
    out.theta = std::move(theta);
    out.residual_inf = r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
    return out;
}

inline std::mt19937_64 restart_rng(std::uint64_t seed, int restart) {
    return std::mt19937_64(seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(restart) +
                           1ull);
}

/// Haar-like random unitary via QR of a complex Gaussian matrix.
inline Eigen::MatrixXcd random_unitary(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
    Eigen::MatrixXcd q = qr.householderQ();
    // Fix the phase of each column so the distribution is Haar.
    Eigen::MatrixXcd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        Complex d = rmat(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

/// Initial guess for one F block. Strategies rotate across restarts: Haar
/// unitaries explore broadly, DFT matrices with random eighth-root phases
/// target the discrete solutions typical of small models, and real
/// orthogonal starts cover the purely real ones.
inline Eigen::MatrixXcd initial_block(std::mt19937_64& rng, int n, int strategy) {
    switch (strategy % 3) {
        case 1: {
            std::uniform_int_distribution<int> root(0, 7);
            const Complex w = std::polar(1.0, M_PI / 4.0);
            Eigen::MatrixXcd q(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    q(i, j) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                         2.0 * M_PI * i * j / n);
            for (int i = 0; i < n; ++i) q.row(i) *= std::pow(w, root(rng));
            for (int j = 0; j < n; ++j) q.col(j) *= std::pow(w, root(rng));
            return q;
        }
        case 2: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            Eigen::MatrixXd m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
            Eigen::MatrixXd q = qr.householderQ();
            return q.cast<Complex>();
        }
        default:
            return random_unitary(rng, n);
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Gauge canonicalization: pick fusion-space phases so that the designated
// entry of each non-vacuum block (first row, first nonzero column) becomes
// real positive wherever the gauge orbit allows it. The phase conditions
// form a small integer linear system in the gauge angles; rows that turn
// out gauge-invariant (e.g. sign obstructions) are left as they are.
// ---------------------------------------------------------------------------

inline FSymbolTable canonicalize_f_gauge(const FusionRing& ring, const FSymbolTable& F) {
    std::map<RKey, int> var_index;
    std::vector<RKey> vars;
    for (const RKey& k : r_admissible_triples(ring))
        if (k.a != kUnit && k.b != kUnit) {
            var_index[k] = static_cast<int>(vars.size());
            vars.push_back(k);
        }
    if (vars.empty()) return F;

    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    for (const auto& [a, b, c, d] : f_blocks(ring)) {
        if (a == kUnit || b == kUnit || c == kUnit) continue;
        FBlockShape shape = f_block_shape(ring, a, b, c, d);
        LabelId e0 = shape.rows[0];
        LabelId f0 = shape.cols[0];
        bool found = false;
        for (LabelId f : shape.cols) {
            if (std::abs(F.at({a, b, c, d, e0, f})) > 1e-9) {
                f0 = f;
                found = true;
                break;
            }
        }
        if (!found) continue;
        std::vector<double> row(vars.size(), 0.0);
        auto add = [&](LabelId p, LabelId q, LabelId r, double w) {
            auto it = var_index.find({p, q, r});
            if (it != var_index.end()) row[it->second] += w;
        };
        add(a, b, e0, 1.0);
        add(e0, c, d, 1.0);
        add(b, c, f0, -1.0);
        add(a, f0, d, -1.0);
        rows.push_back(std::move(row));
        rhs.push_back(-std::arg(F.at({a, b, c, d, e0, f0})));
    }
    if (rows.empty()) return F;

    // Gaussian elimination; rows that reduce to zero are dropped (the
    // designated phase there is gauge-invariant).
    const int m = static_cast<int>(rows.size());
    const int n = static_cast<int>(vars.size());
    std::vector<int> pivot_col;
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int best = -1;
        double best_abs = 1e-9;
        for (int r = rank; r < m; ++r)
            if (std::abs(rows[r][col]) > best_abs) {
                best = r;
                best_abs = std::abs(rows[r][col]);
            }
        if (best < 0) continue;
        std::swap(rows[rank], rows[best]);
        std::swap(rhs[rank], rhs[best]);
        for (int r = 0; r < m; ++r) {
            if (r == rank) continue;
            double factor = rows[r][col] / rows[rank][col];
            if (factor == 0.0) continue;
            for (int cc = 0; cc < n; ++cc) rows[r][cc] -= factor * rows[rank][cc];
            rhs[r] -= factor * rhs[rank];
        }
        pivot_col.push_back(col);
        ++rank;
    }
    std::vector<double> gamma(vars.size(), 0.0);
    for (int r = 0; r < rank; ++r) gamma[pivot_col[r]] = rhs[r] / rows[r][pivot_col[r]];

    GaugePhases g;
    for (std::size_t i = 0; i < vars.size(); ++i)
        g.phases[vars[i]] = std::polar(1.0, gamma[i]);
    return apply_gauge(ring, F, g);
}

// ---------------------------------------------------------------------------
// Pentagon solving
// ---------------------------------------------------------------------------

struct PentagonSolveResult {
    bool success = false;
    FSymbolTable table;
    double residual = 0.0;         // diagram evaluator, accepted solution
    double unitarity = 0.0;        // max per-block deviation
    double best_residual = 0.0;    // best scalar residual seen (failure diagnostics)
    int restart_index = -1;
    int iterations = 0;
};

namespace detail {

struct FSlotTable {
    std::vector<FKey> keys;             // all admissible tuples
    std::vector<int> param_of;          // -1 for vacuum-fixed entries
    std::map<FKey, int> index_of;
    int num_params = 0;                 // complex unknowns

    int slot(const FusionRing& ring, const FKey& k) const {
        if (!f_admissible(ring, k)) return -1;
        return index_of.at(k);
    }
};

inline FSlotTable build_f_slots(const FusionRing& ring) {
    FSlotTable t;
    t.keys = f_admissible_tuples(ring);
    t.param_of.resize(t.keys.size());
    for (std::size_t i = 0; i < t.keys.size(); ++i) {
        const FKey& k = t.keys[i];
        t.index_of[k] = static_cast<int>(i);
        bool vacuum = (k.a == kUnit || k.b == kUnit || k.c == kUnit);
        t.param_of[i] = vacuum ? -1 : t.num_params++;
    }
    return t;
}

struct PentagonInstance {
    int lhs1 = -1, lhs2 = -1;                // slot ids; -1 means structural zero
    std::vector<std::array<int, 3>> rhs;     // slot id triples
};

inline std::vector<PentagonInstance> build_pentagon_instances(const FusionRing& ring,
                                                              const FSlotTable& slots) {
    std::vector<PentagonInstance> instances;
    const LabelId L = static_cast<LabelId>(ring.size());
    for (LabelId x = 1; x < L; ++x)
        for (LabelId y = 1; y < L; ++y)
            for (LabelId z = 1; z < L; ++z)
                for (LabelId w = 1; w < L; ++w)
                    for (LabelId u = 0; u < L; ++u)
                        for (LabelId p = 0; p < L; ++p) {
                            if (!ring.admissible(x, y, p)) continue;
                            for (LabelId q = 0; q < L; ++q) {
                                if (!ring.admissible(p, z, q) || !ring.admissible(q, w, u))
                                    continue;
                                for (LabelId t = 0; t < L; ++t) {
                                    if (!ring.admissible(z, w, t)) continue;
                                    for (LabelId s = 0; s < L; ++s) {
                                        if (!ring.admissible(y, t, s) ||
                                            !ring.admissible(x, s, u))
                                            continue;
                                        PentagonInstance inst;
                                        if (ring.admissible(p, t, u)) {
                                            inst.lhs1 = slots.slot(ring, {p, z, w, u, q, t});
                                            inst.lhs2 = slots.slot(ring, {x, y, t, u, p, s});
                                        }
                                        for (LabelId r = 0; r < L; ++r) {
                                            if (!ring.admissible(y, z, r) ||
                                                !ring.admissible(x, r, q) ||
                                                !ring.admissible(r, w, s))
                                                continue;
                                            inst.rhs.push_back(
                                                {slots.slot(ring, {x, y, z, q, p, r}),
                                                 slots.slot(ring, {x, r, w, u, q, s}),
                                                 slots.slot(ring, {y, z, w, s, r, t})});
                                        }
                                        if (inst.lhs1 >= 0 || !inst.rhs.empty())
                                            instances.push_back(std::move(inst));
                                    }
                                }
                            }
                        }
    return instances;
}

struct UnknownBlock {
    std::vector<std::vector<int>> slot;  // [row][col] slot ids
};

inline std::vector<UnknownBlock> build_unknown_blocks(const FusionRing& ring,
                                                      const FSlotTable& slots) {
    std::vector<UnknownBlock> blocks;
    for (const auto& [a, b, c, d] : f_blocks(ring)) {
        if (a == kUnit || b == kUnit || c == kUnit) continue;
        FBlockShape shape = f_block_shape(ring, a, b, c, d);
        UnknownBlock blk;
        blk.slot.resize(shape.rows.size());
        for (std::size_t i = 0; i < shape.rows.size(); ++i)
            for (std::size_t j = 0; j < shape.cols.size(); ++j)
                blk.slot[i].push_back(slots.slot(ring, {a, b, c, d, shape.rows[i],
                                                        shape.cols[j]}));
        blocks.push_back(std::move(blk));
    }
    return blocks;
}

}  // namespace detail

/// `first_restart` lets a caller resume the scan past a previously returned
/// solution (used when that F class turns out to admit no braiding).
inline PentagonSolveResult solve_pentagon(const FusionRing& ring, const SolverConfig& config,
                                          int first_restart = 0) {
    if (!ring.multiplicity_free())
        throw UnsupportedFeatureError("solve_pentagon: fusion multiplicities > 1 not supported");
    if (ring.size() > 8) throw DomainError("solve_pentagon: more than 8 labels");
    if (!verify_ring(ring).empty())
        throw DomainError("solve_pentagon: ring does not pass verify_ring");

    detail::FSlotTable slots = detail::build_f_slots(ring);

    PentagonSolveResult result;
    if (slots.num_params == 0) {
        // Only vacuum blocks: the table is forced.
        for (std::size_t i = 0; i < slots.keys.size(); ++i)
            result.table.set(slots.keys[i], Complex(1.0));
        result.success = true;
        result.residual = pentagon_residual(ring, result.table);
        result.unitarity = f_unitarity_deviation(ring, result.table);
        result.restart_index = 0;
        return result;
    }

    auto instances = detail::build_pentagon_instances(ring, slots);
    auto blocks = detail::build_unknown_blocks(ring, slots);

    auto slot_value = [&](const Eigen::VectorXd& theta, int slot) -> Complex {
        if (slot < 0) return Complex(0.0);
        int p = slots.param_of[static_cast<std::size_t>(slot)];
        if (p < 0) return Complex(1.0);
        return Complex(theta[2 * p], theta[2 * p + 1]);
    };

    std::size_t unitarity_rows = 0;
    for (const auto& blk : blocks) unitarity_rows += 2 * blk.slot.size() * blk.slot.size();

    auto residual_fn = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        Eigen::VectorXd r(2 * instances.size() + unitarity_rows);
        Eigen::Index idx = 0;
        for (const auto& inst : instances) {
            Complex lhs(0.0);
            if (inst.lhs1 >= 0 && inst.lhs2 >= 0)
                lhs = slot_value(theta, inst.lhs1) * slot_value(theta, inst.lhs2);
            Complex rhs(0.0);
            for (const auto& term : inst.rhs)
                rhs += slot_value(theta, term[0]) * slot_value(theta, term[1]) *
                       slot_value(theta, term[2]);
            Complex diff = lhs - rhs;
            r[idx++] = diff.real();
            r[idx++] = diff.imag();
        }
        for (const auto& blk : blocks) {
            const std::size_t n = blk.slot.size();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    Complex acc = (i == j) ? Complex(-1.0) : Complex(0.0);
                    for (std::size_t k = 0; k < n; ++k)
                        acc += slot_value(theta, blk.slot[i][k]) *
                               std::conj(slot_value(theta, blk.slot[j][k]));
                    r[idx++] = acc.real();
                    r[idx++] = acc.imag();
                }
        }
        return r;
    };

    const Eigen::Index total_rows =
        static_cast<Eigen::Index>(2 * instances.size() + unitarity_rows);
    auto jacobian_fn = [&](const Eigen::VectorXd& theta) -> Eigen::SparseMatrix<double> {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(instances.size() * 32);
        Eigen::Index row = 0;
        // One complex value u contributes holomorphically (coefficient of du)
        // and anti-holomorphically (coefficient of d conj(u)); each expands to
        // four real Jacobian entries over the (Re, Im) row pair.
        auto add_hol = [&](Eigen::Index r, int slot, Complex c) {
            if (slot < 0) return;
            int p = slots.param_of[static_cast<std::size_t>(slot)];
            if (p < 0) return;
            trip.emplace_back(r, 2 * p, c.real());
            trip.emplace_back(r, 2 * p + 1, -c.imag());
            trip.emplace_back(r + 1, 2 * p, c.imag());
            trip.emplace_back(r + 1, 2 * p + 1, c.real());
        };
        auto add_anti = [&](Eigen::Index r, int slot, Complex a) {
            if (slot < 0) return;
            int p = slots.param_of[static_cast<std::size_t>(slot)];
            if (p < 0) return;
            trip.emplace_back(r, 2 * p, a.real());
            trip.emplace_back(r, 2 * p + 1, a.imag());
            trip.emplace_back(r + 1, 2 * p, a.imag());
            trip.emplace_back(r + 1, 2 * p + 1, -a.real());
        };
        for (const auto& inst : instances) {
            if (inst.lhs1 >= 0 && inst.lhs2 >= 0) {
                add_hol(row, inst.lhs1, slot_value(theta, inst.lhs2));
                add_hol(row, inst.lhs2, slot_value(theta, inst.lhs1));
            }
            for (const auto& t : inst.rhs) {
                Complex v0 = slot_value(theta, t[0]);
                Complex v1 = slot_value(theta, t[1]);
                Complex v2 = slot_value(theta, t[2]);
                add_hol(row, t[0], -v1 * v2);
                add_hol(row, t[1], -v0 * v2);
                add_hol(row, t[2], -v0 * v1);
            }
            row += 2;
        }
        for (const auto& blk : blocks) {
            const std::size_t n = blk.slot.size();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    for (std::size_t k = 0; k < n; ++k) {
                        add_hol(row, blk.slot[i][k],
                                std::conj(slot_value(theta, blk.slot[j][k])));
                        add_anti(row, blk.slot[j][k], slot_value(theta, blk.slot[i][k]));
                    }
                    row += 2;
                }
        }
        Eigen::SparseMatrix<double> J(total_rows, theta.size());
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    };

    double best = std::numeric_limits<double>::infinity();
    for (int restart = first_restart; restart < config.restarts; ++restart) {
        std::mt19937_64 rng = detail::restart_rng(config.seed, restart);
        Eigen::VectorXd theta(2 * slots.num_params);
        for (const auto& blk : blocks) {
            Eigen::MatrixXcd q =
                detail::initial_block(rng, static_cast<int>(blk.slot.size()), restart);
            for (std::size_t i = 0; i < blk.slot.size(); ++i)
                for (std::size_t j = 0; j < blk.slot.size(); ++j) {
                    int p = slots.param_of[static_cast<std::size_t>(blk.slot[i][j])];
                    theta[2 * p] = q(i, j).real();
                    theta[2 * p + 1] = q(i, j).imag();
                }
        }
        detail::LMOutcome lm = detail::levenberg_marquardt_sparse(residual_fn, jacobian_fn,
                                                                  theta, config.max_iterations);
        best = std::min(best, lm.residual_inf);
        if (lm.residual_inf < config.tolerance) {
            FSymbolTable table;
            for (std::size_t i = 0; i < slots.keys.size(); ++i)
                table.set(slots.keys[i], slot_value(lm.theta, static_cast<int>(i)));
            table = canonicalize_f_gauge(ring, table);
            double diagram = pentagon_residual(ring, table);
            double unit = f_unitarity_deviation(ring, table);
            if (diagram < config.tolerance && unit < config.tolerance) {
                result.success = true;
                result.table = std::move(table);
                result.residual = diagram;
                result.unitarity = unit;
                result.restart_index = restart;
                result.iterations = lm.iterations;
                result.best_residual = lm.residual_inf;
                return result;
            }
        }
    }
    result.best_residual = best;
    return result;
}

// ---------------------------------------------------------------------------
// Hexagon solving
// ---------------------------------------------------------------------------

struct HexagonSolveResult {
    bool success = false;
    RSymbolTable table;
    double residual = 0.0;      // max of both diagram variants
    double unitarity = 0.0;     // max | |R|-1 |
    double best_residual = 0.0;
    int restart_index = -1;
    int iterations = 0;
    int solution_count = 0;     // distinct solutions found across restarts
};

namespace detail {

struct RSlotTable {
    std::vector<RKey> keys;
    std::vector<int> param_of;  // -1 for unit-fixed entries
    std::map<RKey, int> index_of;
    int num_params = 0;

    int slot(const FusionRing& ring, const RKey& k) const {
        if (!ring.admissible(k.a, k.b, k.c)) return -1;
        return index_of.at(k);
    }
};

inline RSlotTable build_r_slots(const FusionRing& ring) {
    RSlotTable t;
    t.keys = r_admissible_triples(ring);
    t.param_of.resize(t.keys.size());
    for (std::size_t i = 0; i < t.keys.size(); ++i) {
        const RKey& k = t.keys[i];
        t.index_of[k] = static_cast<int>(i);
        bool fixed = (k.a == kUnit || k.b == kUnit);
        t.param_of[i] = fixed ? -1 : t.num_params++;
    }
    return t;
}

// One scalar hexagon identity: prod of two R factors times an F constant on
// the left, a sum of single-R-factor terms on the right. exp = -1 marks a
// reciprocal factor (the inverse-variant diagram).
struct HexTerm {
    Complex coeff;
    int slot1 = -1, slot2 = -1;
    int exp1 = 1, exp2 = 1;
};

struct HexagonInstance {
    HexTerm lhs;
    std::vector<HexTerm> rhs;
};

inline std::vector<HexagonInstance> build_hexagon_instances(const FusionRing& ring,
                                                            const FSymbolTable& F,
                                                            const RSlotTable& slots,
                                                            bool inverse_variant) {
    std::vector<HexagonInstance> instances;
    const LabelId L = static_cast<LabelId>(ring.size());
    auto rslot = [&](LabelId a, LabelId b, LabelId c) -> std::pair<int, int> {
        // (slot, exponent); the inverse variant uses 1/R of the swapped pair.
        if (!inverse_variant) return {slots.slot(ring, {a, b, c}), 1};
        return {slots.slot(ring, {b, a, c}), -1};
    };
    for (LabelId x = 1; x < L; ++x)
        for (LabelId y = 1; y < L; ++y)
            for (LabelId z = 1; z < L; ++z)
                for (LabelId u = 0; u < L; ++u)
                    for (LabelId p = 0; p < L; ++p) {
                        if (!ring.admissible(x, y, p) || !ring.admissible(p, z, u)) continue;
                        for (LabelId q = 0; q < L; ++q) {
                            if (!ring.admissible(x, z, q) || !ring.admissible(y, q, u)) continue;
                            HexagonInstance inst;
                            Complex fmid = F.value_or_zero(ring, {y, x, z, u, p, q});
                            auto [s1, e1] = rslot(x, y, p);
                            auto [s2, e2] = rslot(x, z, q);
                            inst.lhs = {fmid, s1, s2, e1, e2};
                            if (s1 < 0 || s2 < 0) inst.lhs.coeff = Complex(0.0);
                            for (LabelId r = 0; r < L; ++r) {
                                if (!ring.admissible(y, z, r) || !ring.admissible(x, r, u))
                                    continue;
                                Complex coeff = F.value_or_zero(ring, {x, y, z, u, p, r}) *
                                                F.value_or_zero(ring, {y, z, x, u, r, q});
                                auto [sr, er] = rslot(x, r, u);
                                if (sr < 0) continue;
                                inst.rhs.push_back({coeff, sr, -1, er, 1});
                            }
                            instances.push_back(std::move(inst));
                        }
                    }
    return instances;
}

}  // namespace detail

inline HexagonSolveResult solve_hexagon(const FusionRing& ring, const FSymbolTable& F,
                                        const SolverConfig& config) {
    if (!ring.multiplicity_free())
        throw UnsupportedFeatureError("solve_hexagon: fusion multiplicities > 1 not supported");
    if (pentagon_residual(ring, F) >= config.tolerance)
        throw DomainError("solve_hexagon: F table does not satisfy the pentagon equation");

    detail::RSlotTable slots = detail::build_r_slots(ring);

    HexagonSolveResult result;
    if (slots.num_params == 0) {
        for (const RKey& k : slots.keys) result.table.set(k, Complex(1.0));
        result.success = true;
        result.residual = std::max(hexagon_residual(ring, F, result.table, false),
                                   hexagon_residual(ring, F, result.table, true));
        result.restart_index = 0;
        result.solution_count = 1;
        return result;
    }

    std::vector<detail::HexagonInstance> instances =
        detail::build_hexagon_instances(ring, F, slots, false);
    {
        auto inv = detail::build_hexagon_instances(ring, F, slots, true);
        instances.insert(instances.end(), inv.begin(), inv.end());
    }

    auto slot_value = [&](const Eigen::VectorXd& theta, int slot) -> Complex {
        if (slot < 0) return Complex(0.0);
        int p = slots.param_of[static_cast<std::size_t>(slot)];
        if (p < 0) return Complex(1.0);
        return Complex(theta[2 * p], theta[2 * p + 1]);
    };
    auto factor = [&](const Eigen::VectorXd& theta, int slot, int exp) -> Complex {
        Complex v = slot_value(theta, slot);
        return exp < 0 ? Complex(1.0) / v : v;
    };

    auto residual_fn = [&](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
        Eigen::VectorXd r(2 * instances.size() + slots.num_params);
        Eigen::Index idx = 0;
        for (const auto& inst : instances) {
            Complex lhs(0.0);
            if (inst.lhs.slot1 >= 0 && inst.lhs.slot2 >= 0)
                lhs = inst.lhs.coeff * factor(theta, inst.lhs.slot1, inst.lhs.exp1) *
                      factor(theta, inst.lhs.slot2, inst.lhs.exp2);
            Complex rhs(0.0);
            for (const auto& term : inst.rhs)
                rhs += term.coeff * factor(theta, term.slot1, term.exp1);
            Complex diff = lhs - rhs;
            r[idx++] = diff.real();
            r[idx++] = diff.imag();
        }
        for (int p = 0; p < slots.num_params; ++p)
            r[idx++] = theta[2 * p] * theta[2 * p] + theta[2 * p + 1] * theta[2 * p + 1] - 1.0;
        return r;
    };

    struct Candidate {
        Eigen::VectorXd theta;
        double residual;
        int restart;
        int iterations;
    };
    std::vector<Candidate> solutions;  // deduplicated
    double best = std::numeric_limits<double>::infinity();
    int selected = -1;

    for (int restart = 0; restart < config.restarts; ++restart) {
        std::mt19937_64 rng = detail::restart_rng(config.seed ^ 0xC0FFEEull, restart);
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        Eigen::VectorXd theta(2 * slots.num_params);
        for (int p = 0; p < slots.num_params; ++p) {
            double a = angle(rng);
            theta[2 * p] = std::cos(a);
            theta[2 * p + 1] = std::sin(a);
        }
        detail::LMOutcome lm =
            detail::levenberg_marquardt(residual_fn, theta, config.max_iterations);
        best = std::min(best, lm.residual_inf);
        if (lm.residual_inf >= config.tolerance) continue;
        bool duplicate = false;
        for (const auto& c : solutions) {
            double diff = (c.theta - lm.theta).lpNorm<Eigen::Infinity>();
            if (diff < 1e-8) { duplicate = true; break; }
        }
        if (!duplicate)
            solutions.push_back({lm.theta, lm.residual_inf, restart, lm.iterations});
    }
    result.best_residual = best;
    result.solution_count = static_cast<int>(solutions.size());
    if (solutions.empty()) return result;

    // Deterministic selection: smallest converged residual, ties broken by
    // restart index.
    selected = 0;
    for (std::size_t i = 1; i < solutions.size(); ++i)
        if (solutions[i].residual < solutions[selected].residual) selected = static_cast<int>(i);

    const Candidate& chosen = solutions[static_cast<std::size_t>(selected)];
    for (std::size_t i = 0; i < slots.keys.size(); ++i)
        result.table.set(slots.keys[i], slot_value(chosen.theta, static_cast<int>(i)));
    result.residual = std::max(hexagon_residual(ring, F, result.table, false),
                               hexagon_residual(ring, F, result.table, true));
    result.unitarity = r_unitarity_deviation(ring, result.table);
    result.restart_index = chosen.restart;
    result.iterations = chosen.iterations;
    result.success = result.residual < config.tolerance && result.unitarity < config.tolerance;
    return result;
}

// ---------------------------------------------------------------------------
// Combined driver. Distinct pentagon solutions can land in different gauge
// classes, and not every class admits a braiding; when the hexagon fails we
// resume the pentagon scan past the rejected solution and try again.
// ---------------------------------------------------------------------------

struct CoherenceSolveResult {
    bool success = false;
    PentagonSolveResult pentagon;
    HexagonSolveResult hexagon;
};

inline CoherenceSolveResult solve_coherence(const FusionRing& ring, const SolverConfig& config) {
    CoherenceSolveResult out;
    int first_restart = 0;
    while (first_restart < config.restarts) {
        PentagonSolveResult pent = solve_pentagon(ring, config, first_restart);
        if (!pent.success) {
            out.pentagon = std::move(pent);
            return out;
        }
        HexagonSolveResult hex = solve_hexagon(ring, pent.table, config);
        first_restart = pent.restart_index + 1;
        out.pentagon = std::move(pent);
        out.hexagon = std::move(hex);
        if (out.hexagon.success) {
            out.success = true;
            return out;
        }
    }
    return out;
}

}  // namespace anyonkit
