#pragma once

// F/R symbol tables, pentagon and hexagon residual evaluation, gauge
// transformations and the JSON symbol-table serialization.
//
// Index conventions (multiplicity-free):
//   [F^{abc}_d]_{e f}  e = (ab) channel (row), f = (bc) channel (column).
//   Admissible tuple: N(a,b,e) > 0, N(e,c,d) > 0, N(b,c,f) > 0, N(a,f,d) > 0.
//   R^{ab}_c maps V^{ab}_c -> V^{ba}_c; admissible when N(a,b,c) > 0.
//
// The residual evaluators compose whole basis-change matrices between the
// five (pentagon) and six (hexagon) tree bases, path by path, and compare
// the two compositions entrywise. The numerical solver in solver.hpp works
// on a flattened scalar system instead; the two code paths are kept
// independent so each checks the other.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "anyonkit/fusion_ring.hpp"
#include "anyonkit/fusion_space.hpp"

namespace anyonkit {

struct FKey {
    LabelId a, b, c, d, e, f;
    auto operator<=>(const FKey&) const = default;
};

struct RKey {
    LabelId a, b, c;
    auto operator<=>(const RKey&) const = default;
};

class IncompleteTableError : public std::runtime_error {
public:
    IncompleteTableError(const std::string& msg) : std::runtime_error(msg) {}
};

inline bool f_admissible(const FusionRing& ring, const FKey& k) {
    return ring.admissible(k.a, k.b, k.e) && ring.admissible(k.e, k.c, k.d) &&
           ring.admissible(k.b, k.c, k.f) && ring.admissible(k.a, k.f, k.d);
}

inline std::vector<FKey> f_admissible_tuples(const FusionRing& ring) {
    std::vector<FKey> keys;
    const LabelId L = static_cast<LabelId>(ring.size());
    for (LabelId a = 0; a < L; ++a)
        for (LabelId b = 0; b < L; ++b)
            for (LabelId c = 0; c < L; ++c)
                for (LabelId d = 0; d < L; ++d)
                    for (LabelId e = 0; e < L; ++e)
                        for (LabelId f = 0; f < L; ++f)
                            if (f_admissible(ring, {a, b, c, d, e, f}))
                                keys.push_back({a, b, c, d, e, f});
    return keys;
}

inline std::vector<RKey> r_admissible_triples(const FusionRing& ring) {
    std::vector<RKey> keys;
    const LabelId L = static_cast<LabelId>(ring.size());
    for (LabelId a = 0; a < L; ++a)
        for (LabelId b = 0; b < L; ++b)
            for (LabelId c = 0; c < L; ++c)
                if (ring.admissible(a, b, c)) keys.push_back({a, b, c});
    return keys;
}

class FSymbolTable {
public:
    FSymbolTable() = default;

    void set(const FKey& k, Complex v) { entries_[k] = v; }

    bool contains(const FKey& k) const { return entries_.count(k) > 0; }

    /// Admissible entry; throws IncompleteTableError when missing.
    Complex at(const FKey& k) const {
        auto it = entries_.find(k);
        if (it == entries_.end())
            throw IncompleteTableError("missing F entry (" + std::to_string(k.a) + "," +
                                       std::to_string(k.b) + "," + std::to_string(k.c) + ";" +
                                       std::to_string(k.d) + ";" + std::to_string(k.e) + "," +
                                       std::to_string(k.f) + ")");
        return it->second;
    }

    /// Entry lookup that treats inadmissible tuples as structural zeros.
    Complex value_or_zero(const FusionRing& ring, const FKey& k) const {
        if (!f_admissible(ring, k)) return Complex(0.0, 0.0);
        return at(k);
    }

    const std::map<FKey, Complex>& entries() const { return entries_; }

private:
    std::map<FKey, Complex> entries_;
};

class RSymbolTable {
public:
    RSymbolTable() = default;

    void set(const RKey& k, Complex v) { entries_[k] = v; }

    bool contains(const RKey& k) const { return entries_.count(k) > 0; }

    Complex at(const RKey& k) const {
        auto it = entries_.find(k);
        if (it == entries_.end())
            throw IncompleteTableError("missing R entry (" + std::to_string(k.a) + "," +
                                       std::to_string(k.b) + ";" + std::to_string(k.c) + ")");
        return it->second;
    }

    const std::map<RKey, Complex>& entries() const { return entries_; }

private:
    std::map<RKey, Complex> entries_;
};

struct SolverConfig {
    double tolerance = 1e-10;
    int max_iterations = 200;
    int restarts = 64;
    std::uint64_t seed = 0;
};

/// Row (e) and column (f) label ranges of the F block (a,b,c;d).
struct FBlockShape {
    std::vector<LabelId> rows, cols;
};

inline FBlockShape f_block_shape(const FusionRing& ring, LabelId a, LabelId b, LabelId c,
                                 LabelId d) {
    FBlockShape s;
    for (LabelId e = 0; e < ring.size(); ++e)
        if (ring.admissible(a, b, e) && ring.admissible(e, c, d)) s.rows.push_back(e);
    for (LabelId f = 0; f < ring.size(); ++f)
        if (ring.admissible(b, c, f) && ring.admissible(a, f, d)) s.cols.push_back(f);
    return s;
}

inline Eigen::MatrixXcd f_block(const FusionRing& ring, const FSymbolTable& F, LabelId a,
                                LabelId b, LabelId c, LabelId d) {
    FBlockShape s = f_block_shape(ring, a, b, c, d);
    Eigen::MatrixXcd m(s.rows.size(), s.cols.size());
    for (std::size_t i = 0; i < s.rows.size(); ++i)
        for (std::size_t j = 0; j < s.cols.size(); ++j)
            m(i, j) = F.at({a, b, c, d, s.rows[i], s.cols[j]});
    return m;
}

/// All (a,b,c,d) with a nonempty block.
inline std::vector<std::array<LabelId, 4>> f_blocks(const FusionRing& ring) {
    std::vector<std::array<LabelId, 4>> out;
    const LabelId L = static_cast<LabelId>(ring.size());
    for (LabelId a = 0; a < L; ++a)
        for (LabelId b = 0; b < L; ++b)
            for (LabelId c = 0; c < L; ++c)
                for (LabelId d = 0; d < L; ++d)
                    if (!f_block_shape(ring, a, b, c, d).rows.empty())
                        out.push_back({a, b, c, d});
    return out;
}

/// max over blocks of ||F F^dag - I||_max.
inline double f_unitarity_deviation(const FusionRing& ring, const FSymbolTable& F) {
    double dev = 0.0;
    for (const auto& [a, b, c, d] : f_blocks(ring)) {
        Eigen::MatrixXcd m = f_block(ring, F, a, b, c, d);
        Eigen::MatrixXcd g = m * m.adjoint() -
                             Eigen::MatrixXcd::Identity(m.rows(), m.rows());
        dev = std::max(dev, g.cwiseAbs().maxCoeff());
    }
    return dev;
}

inline double r_unitarity_deviation(const FusionRing& ring, const RSymbolTable& R) {
    double dev = 0.0;
    for (const RKey& k : r_admissible_triples(ring))
        dev = std::max(dev, std::abs(std::abs(R.at(k)) - 1.0));
    return dev;
}

// ---------------------------------------------------------------------------
// Pentagon residual: for each (x,y,z,w,u), compose basis-change matrices
// through the five four-leaf tree bases and compare the two paths.
//
//   A = ((xy)z)w   basis (p,q)     B = (xy)(zw)   basis (p,t)
//   C = x(y(zw))   basis (t,s)     D = (x(yz))w   basis (r,q)
//   E = x((yz)w)   basis (r,s)
// ---------------------------------------------------------------------------

inline double pentagon_residual(const FusionRing& ring, const FSymbolTable& F) {
    const LabelId L = static_cast<LabelId>(ring.size());
    double residual = 0.0;
    using Pair = std::pair<LabelId, LabelId>;
    for (LabelId x = 0; x < L; ++x)
        for (LabelId y = 0; y < L; ++y)
            for (LabelId z = 0; z < L; ++z)
                for (LabelId w = 0; w < L; ++w)
                    for (LabelId u = 0; u < L; ++u) {
                        std::vector<Pair> A, B, C, D, E;
                        for (LabelId p = 0; p < L; ++p)
                            for (LabelId q = 0; q < L; ++q)
                                if (ring.admissible(x, y, p) && ring.admissible(p, z, q) &&
                                    ring.admissible(q, w, u))
                                    A.push_back({p, q});
                        if (A.empty()) continue;
                        for (LabelId p = 0; p < L; ++p)
                            for (LabelId t = 0; t < L; ++t)
                                if (ring.admissible(x, y, p) && ring.admissible(z, w, t) &&
                                    ring.admissible(p, t, u))
                                    B.push_back({p, t});
                        for (LabelId t = 0; t < L; ++t)
                            for (LabelId s = 0; s < L; ++s)
                                if (ring.admissible(z, w, t) && ring.admissible(y, t, s) &&
                                    ring.admissible(x, s, u))
                                    C.push_back({t, s});
                        for (LabelId r = 0; r < L; ++r)
                            for (LabelId q = 0; q < L; ++q)
                                if (ring.admissible(y, z, r) && ring.admissible(x, r, q) &&
                                    ring.admissible(q, w, u))
                                    D.push_back({r, q});
                        for (LabelId r = 0; r < L; ++r)
                            for (LabelId s = 0; s < L; ++s)
                                if (ring.admissible(y, z, r) && ring.admissible(r, w, s) &&
                                    ring.admissible(x, s, u))
                                    E.push_back({r, s});

                        auto move = [&](const std::vector<Pair>& src, const std::vector<Pair>& dst,
                                        auto entry) {
                            Eigen::MatrixXcd m(src.size(), dst.size());
                            for (std::size_t i = 0; i < src.size(); ++i)
                                for (std::size_t j = 0; j < dst.size(); ++j)
                                    m(i, j) = entry(src[i], dst[j]);
                            return m;
                        };

                        // A -> B: F^{pzw}_u, q -> t, p preserved.
                        Eigen::MatrixXcd ab = move(A, B, [&](Pair s_, Pair d_) {
                            return s_.first == d_.first
                                       ? F.value_or_zero(ring, {s_.first, z, w, u, s_.second,
                                                                d_.second})
                                       : Complex(0.0);
                        });
                        // B -> C: F^{xyt}_u, p -> s, t preserved.
                        Eigen::MatrixXcd bc = move(B, C, [&](Pair s_, Pair d_) {
                            return s_.second == d_.first
                                       ? F.value_or_zero(ring, {x, y, s_.second, u, s_.first,
                                                                d_.second})
                                       : Complex(0.0);
                        });
                        // A -> D: F^{xyz}_q, p -> r, q preserved.
                        Eigen::MatrixXcd ad = move(A, D, [&](Pair s_, Pair d_) {
                            return s_.second == d_.second
                                       ? F.value_or_zero(ring, {x, y, z, s_.second, s_.first,
                                                                d_.first})
                                       : Complex(0.0);
                        });
                        // D -> E: F^{xrw}_u, q -> s, r preserved.
                        Eigen::MatrixXcd de = move(D, E, [&](Pair s_, Pair d_) {
                            return s_.first == d_.first
                                       ? F.value_or_zero(ring, {x, s_.first, w, u, s_.second,
                                                                d_.second})
                                       : Complex(0.0);
                        });
                        // E -> C: F^{yzw}_s, r -> t, s preserved.
                        Eigen::MatrixXcd ec = move(E, C, [&](Pair s_, Pair d_) {
                            return s_.second == d_.second
                                       ? F.value_or_zero(ring, {y, z, w, s_.second, s_.first,
                                                                d_.first})
                                       : Complex(0.0);
                        });

                        Eigen::MatrixXcd diff = ab * bc - ad * de * ec;
                        if (diff.size() > 0)
                            residual = std::max(residual, diff.cwiseAbs().maxCoeff());
                    }
    return residual;
}

// ---------------------------------------------------------------------------
// Hexagon residual over three-leaf bases, per the two diagram variants:
//   path 1: (R x id), F^{yxz}_u, (id x R)
//   path 2: F^{xyz}_u, (id x R) . swap, F^{yzx}_u
// with every R replaced by the inverse of its leaf-swapped partner in the
// inverse variant.
// ---------------------------------------------------------------------------

inline double hexagon_residual(const FusionRing& ring, const FSymbolTable& F,
                               const RSymbolTable& R, bool inverse_variant) {
    const LabelId L = static_cast<LabelId>(ring.size());
    double residual = 0.0;
    auto rfactor = [&](LabelId a, LabelId b, LabelId c) -> Complex {
        if (!inverse_variant) {
            if (!ring.admissible(a, b, c)) return Complex(0.0);
            return R.at({a, b, c});
        }
        if (!ring.admissible(b, a, c)) return Complex(0.0);
        return Complex(1.0) / R.at({b, a, c});
    };
    for (LabelId x = 0; x < L; ++x)
        for (LabelId y = 0; y < L; ++y)
            for (LabelId z = 0; z < L; ++z)
                for (LabelId u = 0; u < L; ++u) {
                    std::vector<LabelId> P, Q, Rr;
                    for (LabelId p = 0; p < L; ++p)
                        if (ring.admissible(x, y, p) && ring.admissible(p, z, u)) P.push_back(p);
                    if (P.empty()) continue;
                    for (LabelId q = 0; q < L; ++q)
                        if (ring.admissible(x, z, q) && ring.admissible(y, q, u)) Q.push_back(q);
                    for (LabelId r = 0; r < L; ++r)
                        if (ring.admissible(y, z, r) && ring.admissible(x, r, u)) Rr.push_back(r);

                    Eigen::MatrixXcd path1(P.size(), Q.size()), path2(P.size(), Q.size());
                    for (std::size_t i = 0; i < P.size(); ++i)
                        for (std::size_t j = 0; j < Q.size(); ++j) {
                            LabelId p = P[i], q = Q[j];
                            path1(i, j) = rfactor(x, y, p) *
                                          F.value_or_zero(ring, {y, x, z, u, p, q}) *
                                          rfactor(x, z, q);
                            Complex acc(0.0);
                            for (LabelId r : Rr)
                                acc += F.value_or_zero(ring, {x, y, z, u, p, r}) *
                                       rfactor(x, r, u) *
                                       F.value_or_zero(ring, {y, z, x, u, r, q});
                            path2(i, j) = acc;
                        }
                    Eigen::MatrixXcd diff = path1 - path2;
                    if (diff.size() > 0) residual = std::max(residual, diff.cwiseAbs().maxCoeff());
                }
    return residual;
}

// ---------------------------------------------------------------------------
// Gauge transformations. A gauge assigns a unit-modulus phase to each
// fusion space V^{ab}_c (phases of unit-involving triples stay 1 so the
// vacuum-identity convention survives). F and R transform as
//   F'_{ef} = (g^{ab}_e g^{ec}_d) / (g^{bc}_f g^{af}_d) F_{ef}
//   R'^{ab}_c = (g^{ab}_c / g^{ba}_c) R^{ab}_c
// which leaves both residuals invariant.
// ---------------------------------------------------------------------------

struct GaugePhases {
    std::map<RKey, Complex> phases;

    Complex at(LabelId a, LabelId b, LabelId c) const {
        auto it = phases.find({a, b, c});
        return it == phases.end() ? Complex(1.0) : it->second;
    }
};

inline FSymbolTable apply_gauge(const FusionRing& ring, const FSymbolTable& F,
                                const GaugePhases& g) {
    FSymbolTable out;
    for (const auto& [k, v] : F.entries()) {
        Complex factor = g.at(k.a, k.b, k.e) * g.at(k.e, k.c, k.d) /
                         (g.at(k.b, k.c, k.f) * g.at(k.a, k.f, k.d));
        out.set(k, factor * v);
    }
    return out;
}

inline RSymbolTable apply_gauge(const FusionRing& ring, const RSymbolTable& R,
                                const GaugePhases& g) {
    RSymbolTable out;
    for (const auto& [k, v] : R.entries())
        out.set(k, g.at(k.a, k.b, k.c) / g.at(k.b, k.a, k.c) * v);
    return out;
}

// ---------------------------------------------------------------------------
// JSON serialization. Deterministic output: sorted keys, entries sorted by
// index tuple, 17-significant-digit decimals.
// ---------------------------------------------------------------------------

namespace detail {
inline std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}
}  // namespace detail

inline std::string export_symbols(const FusionRing& ring, const FSymbolTable& F,
                                  const RSymbolTable& R, const std::string& model_name) {
    std::string out = "{\n  \"F\": [\n";
    std::size_t i = 0;
    for (const auto& [k, v] : F.entries()) {
        out += "    {\"a\": \"" + ring.label(k.a).name + "\", \"b\": \"" + ring.label(k.b).name +
               "\", \"c\": \"" + ring.label(k.c).name + "\", \"d\": \"" + ring.label(k.d).name +
               "\", \"e\": \"" + ring.label(k.e).name + "\", \"f\": \"" + ring.label(k.f).name +
               "\", \"im\": " + detail::num17(v.imag()) + ", \"re\": " + detail::num17(v.real()) +
               "}";
        out += (++i < F.entries().size()) ? ",\n" : "\n";
    }
    out += "  ],\n  \"R\": [\n";
    i = 0;
    for (const auto& [k, v] : R.entries()) {
        out += "    {\"a\": \"" + ring.label(k.a).name + "\", \"b\": \"" + ring.label(k.b).name +
               "\", \"c\": \"" + ring.label(k.c).name +
               "\", \"im\": " + detail::num17(v.imag()) + ", \"re\": " + detail::num17(v.real()) +
               "}";
        out += (++i < R.entries().size()) ? ",\n" : "\n";
    }
    out += "  ],\n  \"model\": \"" + model_name + "\"\n}\n";
    return out;
}

struct ImportedSymbols {
    FSymbolTable F;
    RSymbolTable R;
    std::string model_name;
};

inline ImportedSymbols import_symbols(const FusionRing& ring, const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(std::string("malformed symbols JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("F") || !j.contains("R"))
        throw DomainError("symbols JSON must contain \"F\" and \"R\" arrays");
    ImportedSymbols out;
    out.model_name = j.value("model", "");
    auto label_of = [&](const nlohmann::json& entry, const char* key) -> LabelId {
        std::string name = entry.at(key).get<std::string>();
        if (!ring.has_label(name)) throw DomainError("unknown label in symbols JSON: " + name);
        return ring.find(name);
    };
    for (const auto& entry : j.at("F")) {
        FKey k{label_of(entry, "a"), label_of(entry, "b"), label_of(entry, "c"),
               label_of(entry, "d"), label_of(entry, "e"), label_of(entry, "f")};
        if (!f_admissible(ring, k)) throw DomainError("inadmissible F tuple in symbols JSON");
        out.F.set(k, Complex(entry.at("re").get<double>(), entry.at("im").get<double>()));
    }
    for (const auto& entry : j.at("R")) {
        RKey k{label_of(entry, "a"), label_of(entry, "b"), label_of(entry, "c")};
        if (!ring.admissible(k.a, k.b, k.c))
            throw DomainError("inadmissible R triple in symbols JSON");
        out.R.set(k, Complex(entry.at("re").get<double>(), entry.at("im").get<double>()));
    }
    return out;
}

}  // namespace anyonkit
