#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace anyonkit;
using testutil::model;
using testutil::solved;

namespace {

std::vector<Unitary> chain_generators(const std::string& name, const std::string& anyon, int n,
                                      const std::string& charge) {
    const FusionRing& ring = model(name).ring;
    FusionBasis basis =
        enumerate_basis(ring, std::vector<LabelId>(n, ring.find(anyon)), ring.find(charge));
    std::vector<Unitary> gens;
    for (int i = 1; i < n; ++i)
        gens.push_back(braid_generator(ring, solved(name).F, solved(name).R, basis, i));
    return gens;
}

}  // namespace

TEST_CASE("braid word parsing and formatting") {
    BraidWord w = parse_braid_word("s1 s2^-1 s1^1", 3);
    REQUIRE(w.letters.size() == 3);
    CHECK(w.letters[0] == BraidLetter{1, 1});
    CHECK(w.letters[1] == BraidLetter{2, -1});
    CHECK(w.letters[2] == BraidLetter{1, 1});
    CHECK(format_braid_word(w) == "s1 s2^-1 s1");

    CHECK(parse_braid_word("", 4).letters.empty());
    CHECK(format_braid_word(parse_braid_word("", 4)).empty());

    CHECK_THROWS_AS(parse_braid_word("s3", 3), DomainError);      // out of range
    CHECK_THROWS_AS(parse_braid_word("s0", 3), DomainError);
    CHECK_THROWS_AS(parse_braid_word("t1", 3), DomainError);      // bad prefix
    CHECK_THROWS_AS(parse_braid_word("s1^2", 3), DomainError);    // bad exponent
    CHECK_THROWS_AS(parse_braid_word("s", 3), DomainError);       // missing index
}

TEST_CASE("braid generators are unitary and basis-preserving") {
    for (const char* name : {"fibonacci", "ising"}) {
        CAPTURE(name);
        std::string anyon = (std::string(name) == "fibonacci") ? "tau" : "sigma";
        std::string charge = (std::string(name) == "fibonacci") ? "tau" : "sigma";
        auto gens = chain_generators(name, anyon, 5, charge);
        for (const Unitary& g : gens) {
            CHECK(g.unitarity_deviation() < 1e-10);
            CHECK(g.matrix.rows() == static_cast<Eigen::Index>(g.basis.size()));
        }
    }
}

TEST_CASE("sigma_1 is diagonal in the R symbols") {
    const FusionRing& fib = model("fibonacci").ring;
    LabelId tau = fib.find("tau");
    FusionBasis basis = enumerate_basis(fib, {tau, tau, tau}, tau);
    Unitary g1 = braid_generator(fib, solved("fibonacci").F, solved("fibonacci").R, basis, 1);
    REQUIRE(g1.matrix.rows() == 2);
    CHECK(std::abs(g1.matrix(0, 1)) < 1e-14);
    CHECK(std::abs(g1.matrix(1, 0)) < 1e-14);
    // Tree order is (internal=1, internal=tau).
    CHECK(std::abs(g1.matrix(0, 0) - solved("fibonacci").R.at({tau, tau, kUnit})) < 1e-14);
    CHECK(std::abs(g1.matrix(1, 1) - solved("fibonacci").R.at({tau, tau, tau})) < 1e-14);
}

TEST_CASE("two-strand braiding is the scalar R phase") {
    const FusionRing& fib = model("fibonacci").ring;
    LabelId tau = fib.find("tau");
    FusionBasis basis = enumerate_basis(fib, {tau, tau}, kUnit);
    Unitary g = braid_generator(fib, solved("fibonacci").F, solved("fibonacci").R, basis, 1);
    REQUIRE(g.matrix.rows() == 1);
    CHECK(std::abs(g.matrix(0, 0) - solved("fibonacci").R.at({tau, tau, kUnit})) < 1e-14);
}

TEST_CASE("braiding unequal leaves is unsupported") {
    const FusionRing& ising = model("ising").ring;
    FusionBasis basis =
        enumerate_basis(ising, {ising.find("sigma"), ising.find("psi"), ising.find("sigma")},
                        kUnit);
    REQUIRE(basis.size() > 0);
    CHECK_THROWS_AS(braid_generator(ising, solved("ising").F, solved("ising").R, basis, 1),
                    UnsupportedFeatureError);
}

TEST_CASE("Yang-Baxter relation holds on three strands") {
    for (const char* name : {"fibonacci", "ising"}) {
        CAPTURE(name);
        std::string anyon = (std::string(name) == "fibonacci") ? "tau" : "sigma";
        std::string charge = anyon;
        auto gens = chain_generators(name, anyon, 3, charge);
        REQUIRE(gens.size() == 2);
        Eigen::MatrixXcd lhs = gens[0].matrix * gens[1].matrix * gens[0].matrix;
        Eigen::MatrixXcd rhs = gens[1].matrix * gens[0].matrix * gens[1].matrix;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("distant generators commute") {
    auto gens = chain_generators("fibonacci", "tau", 5, "tau");
    REQUIRE(gens.size() == 4);
    Eigen::MatrixXcd ab = gens[0].matrix * gens[2].matrix;
    Eigen::MatrixXcd ba = gens[2].matrix * gens[0].matrix;
    CHECK((ab - ba).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("evaluate_word multiplies in braid order") {
    auto gens = chain_generators("fibonacci", "tau", 3, "tau");
    const Eigen::Index d = gens[0].matrix.rows();

    SECTION("empty word is the identity") {
        Unitary u = evaluate_word(parse_braid_word("", 3), gens);
        CHECK((u.matrix - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("a generator followed by its inverse cancels") {
        Unitary u = evaluate_word(parse_braid_word("s1 s1^-1", 3), gens);
        CHECK((u.matrix - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
        Unitary v = evaluate_word(parse_braid_word("s2^-1 s2", 3), gens);
        CHECK((v.matrix - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SECTION("left-to-right letters compose as later-times-earlier matrices") {
        Unitary u = evaluate_word(parse_braid_word("s1 s2", 3), gens);
        CHECK((u.matrix - gens[1].matrix * gens[0].matrix).cwiseAbs().maxCoeff() < 1e-13);
    }
    SECTION("arity mismatch is rejected") {
        CHECK_THROWS_AS(evaluate_word(parse_braid_word("s1", 2), gens), DomainError);
    }
}

TEST_CASE("phase_distance is a phase-invariant metric") {
    auto gens = chain_generators("fibonacci", "tau", 3, "tau");
    const Eigen::MatrixXcd& u = gens[0].matrix;
    CHECK(phase_distance(u, u) < 1e-12);
    CHECK(phase_distance(u, std::polar(1.0, 1.234) * u) < 1e-7);
    CHECK(phase_distance(u, gens[1].matrix) > 0.1);
}

TEST_CASE("group closure distinguishes finite and infinite images") {
    SECTION("a lone identity generator closes immediately") {
        Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
        GroupClosureReport r = group_closure({{id, FusionBasis{}}});
        CHECK(r.saturated);
        CHECK(r.element_count == 1);
    }
    SECTION("ising three-strand image is finite and small") {
        auto gens = chain_generators("ising", "sigma", 3, "sigma");
        GroupClosureReport r = group_closure(gens);
        CHECK(r.saturated);
        CHECK(r.element_count <= 200);
    }
    SECTION("fibonacci three-strand image blows past the cap") {
        auto gens = chain_generators("fibonacci", "tau", 3, "tau");
        GroupClosureReport r = group_closure(gens);
        CHECK_FALSE(r.saturated);
        CHECK(r.element_count > 2000);
        CHECK(r.max_word_length <= 20);
    }
}

TEST_CASE("compile_gate basics") {
    auto gens = chain_generators("fibonacci", "tau", 3, "tau");
    const Eigen::Index d = gens[0].matrix.rows();

    SECTION("identity compiles to the empty word") {
        CompileResult r = compile_gate(Eigen::MatrixXcd::Identity(d, d), gens, 4);
        CHECK(r.word.letters.empty());
        CHECK(r.distance == 0.0);
    }
    SECTION("a generator compiles to itself") {
        CompileResult r = compile_gate(gens[0].matrix, gens, 3);
        REQUIRE(r.word.letters.size() == 1);
        CHECK(r.word.letters[0] == BraidLetter{1, 1});
        CHECK(r.distance < 1e-12);
    }
    SECTION("distance is monotone non-increasing in the length budget") {
        Eigen::MatrixXcd target(2, 2);
        target << 0, 1, 1, 0;  // NOT gate
        double prev = std::numeric_limits<double>::infinity();
        for (int len = 0; len <= 6; ++len) {
            CompileResult r = compile_gate(target, gens, len);
            CHECK(r.distance <= prev + 1e-12);
            prev = r.distance;
        }
    }
    SECTION("length bound above 14 is rejected") {
        CHECK_THROWS_AS(compile_gate(Eigen::MatrixXcd::Identity(d, d), gens, 15), DomainError);
    }
    SECTION("dimension mismatch is rejected") {
        CHECK_THROWS_AS(compile_gate(Eigen::MatrixXcd::Identity(3, 3), gens, 2), DomainError);
    }
}

TEST_CASE("compile_gate ties a brute-force search oracle") {
    // Oracle: enumerate every signed word (including unreduced ones) up to
    // length 5 with plain nested loops and track the best distance.
    auto gens = chain_generators("fibonacci", "tau", 3, "tau");
    std::vector<Eigen::MatrixXcd> steps = {
        gens[0].matrix, gens[0].matrix.adjoint(), gens[1].matrix, gens[1].matrix.adjoint()};
    const Eigen::Index d = gens[0].matrix.rows();

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        // Random unitary target via QR.
        Eigen::MatrixXcd gauss = Eigen::MatrixXcd::Random(d, d);
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gauss);
        Eigen::MatrixXcd target = qr.householderQ();

        double oracle = phase_distance(target, Eigen::MatrixXcd::Identity(d, d));
        std::vector<Eigen::MatrixXcd> frontier = {Eigen::MatrixXcd::Identity(d, d)};
        for (int len = 1; len <= 5; ++len) {
            std::vector<Eigen::MatrixXcd> next;
            for (const auto& u : frontier)
                for (const auto& s : steps) {
                    Eigen::MatrixXcd v = s * u;
                    oracle = std::min(oracle, phase_distance(target, v));
                    next.push_back(std::move(v));
                }
            frontier = std::move(next);
        }

        CompileResult r = compile_gate(target, gens, 5);
        CHECK(std::abs(r.distance - oracle) < 1e-10);
        // The compiled word actually achieves the reported distance.
        Unitary u = evaluate_word(r.word, gens);
        CHECK(std::abs(phase_distance(target, u.matrix) - r.distance) < 1e-12);
    }
    (void)rng;
}

TEST_CASE("measure_pair groups probability by the first fusion channel") {
    const FusionRing& fib = model("fibonacci").ring;
    LabelId tau = fib.find("tau");
    FusionBasis basis = enumerate_basis(fib, {tau, tau, tau}, tau);
    REQUIRE(basis.size() == 2);

    SECTION("basis state gives a definite outcome") {
        Eigen::VectorXcd amp(2);
        amp << 1, 0;
        auto probs = measure_pair({basis, amp});
        REQUIRE(probs.size() == 2);
        CHECK(probs[0].first == kUnit);
        CHECK(probs[0].second == Catch::Approx(1.0));
        CHECK(probs[1].first == tau);
        CHECK(probs[1].second == Catch::Approx(0.0));
    }
    SECTION("equal superposition splits the probability") {
        Eigen::VectorXcd amp(2);
        amp << 1.0 / std::sqrt(2.0), Complex(0, 1.0 / std::sqrt(2.0));
        auto probs = measure_pair({basis, amp});
        CHECK(probs[0].second == Catch::Approx(0.5));
        CHECK(probs[1].second == Catch::Approx(0.5));
    }
    SECTION("unnormalized states are rejected") {
        Eigen::VectorXcd amp(2);
        amp << 2, 0;
        CHECK_THROWS_AS(measure_pair({basis, amp}), DomainError);
    }
    SECTION("fewer than three anyons is rejected") {
        FusionBasis two = enumerate_basis(fib, {tau, tau}, kUnit);
        CHECK_THROWS_AS(measure_pair({two, Eigen::VectorXcd::Ones(1)}), DomainError);
    }
}

TEST_CASE("gauge changes leave braiding observables invariant") {
    const FusionRing& fib = model("fibonacci").ring;
    LabelId tau = fib.find("tau");
    FusionBasis basis = enumerate_basis(fib, {tau, tau, tau}, tau);

    auto gens_of = [&](const FSymbolTable& F, const RSymbolTable& R) {
        std::vector<Unitary> gens;
        for (int i = 1; i < 3; ++i) gens.push_back(braid_generator(fib, F, R, basis, i));
        return gens;
    };
    auto base = gens_of(solved("fibonacci").F, solved("fibonacci").R);
    GroupClosureReport base_closure = group_closure(base);
    // The target must be expressed in the same gauge as the generators; a
    // word too long for the budget gives a nonzero, gauge-independent
    // distance.
    BraidWord probe = parse_braid_word("s1 s1 s2^-1 s1 s1 s2^-1", 3);
    CompileResult base_compile = compile_gate(evaluate_word(probe, base).matrix, base, 3);
    CHECK(base_compile.distance > 1e-3);

    for (std::uint64_t seed = 21; seed <= 25; ++seed) {
        GaugePhases g = testutil::random_gauge(fib, seed);
        FSymbolTable Fg = apply_gauge(fib, solved("fibonacci").F, g);
        RSymbolTable Rg = apply_gauge(fib, solved("fibonacci").R, g);
        auto gens = gens_of(Fg, Rg);
        for (std::size_t i = 0; i < gens.size(); ++i)
            CHECK(gens[i].unitarity_deviation() < 1e-9);

        GroupClosureReport closure = group_closure(gens);
        CHECK(closure.element_count == base_closure.element_count);
        CHECK(closure.saturated == base_closure.saturated);

        CompileResult compiled = compile_gate(evaluate_word(probe, gens).matrix, gens, 3);
        CHECK(std::abs(compiled.distance - base_compile.distance) < 1e-8);
    }
}
