#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "srgeo/examples.hpp"
#include "srgeo/json_io.hpp"

using namespace srgeo;

namespace {

Rational random_coeff(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 3);
    int p = num(rng);
    if (p == 0) p = 1;
    return Rational(p, den(rng));
}

Polynomial random_polynomial(std::mt19937_64& rng, int dim, int max_degree = 3, int terms = 4) {
    Polynomial p(dim);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> axis(0, dim - 1);
    for (int t = 0; t < terms; ++t) {
        Exponents e(static_cast<std::size_t>(dim), 0);
        const int d = deg(rng);
        for (int k = 0; k < d; ++k) e[static_cast<std::size_t>(axis(rng))] += 1;
        p.add_term(e, random_coeff(rng));
    }
    return p;
}

VectorField random_field(std::mt19937_64& rng, int dim) {
    VectorField f(dim);
    for (int i = 0; i < dim; ++i) f.set_coeff(i, random_polynomial(rng, dim));
    return f;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Sum of |coefficient| over all axes, as a crude but monotone size measure.
double field_size(const VectorField& f) {
    double s = 0.0;
    for (int i = 0; i < f.dimension(); ++i)
        for (const auto& [e, c] : f.coeff(i).terms()) s += std::abs(static_cast<double>(c));
    return s;
}

}  // namespace

TEST_CASE("rational parsing, formatting, and powers") {
    for (const char* s : {"3/4", "-7/5", "0", "12", "-1"})
        CHECK(format_rational(parse_rational(s)) == s);
    CHECK(parse_rational("2/4") == Rational(1, 2));
    CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
    CHECK(rational_pow(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(rational_pow(Rational(2, 3), 0) == Rational(1));
    CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
    CHECK(rational_pow(Rational(-7, 5), 3) == Rational(-343, 125));
    // Negative base with negative exponent exercises the inversion path.
    CHECK(rational_pow(Rational(-7, 5), -4) == Rational(625, 2401));
    CHECK(rational_pow(Rational(-7, 5), -3) == Rational(-125, 343));
    CHECK_THROWS_AS(rational_pow(Rational(0), -1), domain_error);
}

TEST_CASE("polynomial arithmetic is exact") {
    const Polynomial x = Polynomial::variable(2, 0);
    const Polynomial y = Polynomial::variable(2, 1);
    CHECK((x + y) * (x - y) == x * x - y * y);
    CHECK((x * y).partial(0) == y);
    CHECK((x * x * y).partial(0) == x.scaled(Rational(2)) * y);
    CHECK((x * x * y).partial(1) == x * x);

    const std::vector<Rational> pt = {Rational(2, 3), Rational(-5, 7)};
    CHECK((x * x + y).eval(pt) == Rational(4, 9) + Rational(-5, 7));

    CHECK(Polynomial::weighted_degree_of({3, 1}, {1, 2}) == 5);
    CHECK(Polynomial::weighted_degree_of({0, 0}, {1, 2}) == 0);
}

TEST_CASE("term order is canonical regardless of insertion order") {
    Polynomial a(2), b(2);
    a.add_term({2, 0}, Rational(1));
    a.add_term({0, 1}, Rational(3));
    a.add_term({1, 1}, Rational(-2));
    b.add_term({1, 1}, Rational(-2));
    b.add_term({0, 1}, Rational(3));
    b.add_term({2, 0}, Rational(1));
    CHECK(a == b);
    CHECK(io::polynomial_to_json(a).dump() == io::polynomial_to_json(b).dump());
}

TEST_CASE("bracket identities on random polynomial fields") {
    std::mt19937_64 rng(20240817);
    for (int trial = 0; trial < 30; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 3);
        const VectorField X = random_field(rng, dim);
        const VectorField Y = random_field(rng, dim);
        const VectorField Z = random_field(rng, dim);
        const Rational a = random_coeff(rng), b = random_coeff(rng);

        CHECK(lie_bracket(X, Y) == -lie_bracket(Y, X));
        CHECK(lie_bracket(X.scaled(a) + Y.scaled(b), Z) ==
              lie_bracket(X, Z).scaled(a) + lie_bracket(Y, Z).scaled(b));
        const VectorField jacobi = lie_bracket(X, lie_bracket(Y, Z)) +
                                   lie_bracket(Y, lie_bracket(Z, X)) +
                                   lie_bracket(Z, lie_bracket(X, Y));
        CHECK(jacobi == VectorField::zero(dim));

        // Derivation rule: [X, fY] = f[X, Y] + (Xf)Y.
        const Polynomial f = random_polynomial(rng, dim);
        VectorField fY(dim), expected(dim);
        const VectorField br = lie_bracket(X, Y);
        const Polynomial Xf = X.apply(f);
        for (int i = 0; i < dim; ++i) {
            fY.set_coeff(i, f * Y.coeff(i));
            expected.set_coeff(i, f * br.coeff(i) + Xf * Y.coeff(i));
        }
        CHECK(lie_bracket(X, fY) == expected);
    }
}

TEST_CASE("model system bracket regression") {
    const Frame ag = examples::ag_frame();
    const VectorField X1 = ag.generator(1);
    const VectorField X2 = ag.generator(2);

    VectorField b12(4);  // [X1, X2] = -4 d3 + 4 x1 x3 d4
    b12.set_coeff(2, Polynomial::constant(4, Rational(-4)));
    b12.set_coeff(3, Polynomial::monomial(4, {1, 0, 1, 0}, Rational(4)));
    CHECK(lie_bracket(X1, X2) == b12);
    CHECK(iterated_commutator(ag, MultiIndex({2, 1})) == b12);

    VectorField b112(4);  // [X1, [X1, X2]] = (12 x3 + 8 x1 x2) d4
    {
        Polynomial p(4);
        p.add_term({0, 0, 1, 0}, Rational(12));
        p.add_term({1, 1, 0, 0}, Rational(8));
        b112.set_coeff(3, p);
    }
    CHECK(lie_bracket(X1, lie_bracket(X1, X2)) == b112);

    VectorField b1112(4);  // [X1, [X1, [X1, X2]]] = 32 x2 d4
    b1112.set_coeff(3, Polynomial::monomial(4, {0, 1, 0, 0}, Rational(32)));
    CHECK(iterated_commutator(ag, MultiIndex({2, 1, 1, 1})) == b1112);

    VectorField top(4);  // [X2, [X1, [X1, [X1, X2]]]] = 32 d4
    top.set_coeff(3, Polynomial::constant(4, Rational(32)));
    CHECK(iterated_commutator(ag, MultiIndex({2, 1, 1, 1, 2})) == top);
}

TEST_CASE("growth report at the origin and at a generic point") {
    const Frame ag = examples::ag_frame();
    const std::vector<Rational> origin(4, Rational(0));

    const GrowthReport at0 = growth_report(ag, origin, 6);
    CHECK(at0.exact);
    CHECK(at0.layer_dims == std::vector<int>{2, 3, 3, 3, 4});
    CHECK(at0.step == 5);
    CHECK(at0.weights == std::vector<int>{1, 1, 2, 5});
    CHECK(at0.bracket_generating);
    CHECK(at0.growth_pause_condition);
    CHECK_FALSE(at0.layer_bracket_condition);

    const std::vector<Rational> generic = {Rational(0), Rational(0), Rational(1), Rational(0)};
    const GrowthReport atg = growth_report(ag, generic, 6);
    CHECK(atg.layer_dims == std::vector<int>{2, 3, 4});
    CHECK(atg.step == 3);
    CHECK(atg.weights == std::vector<int>{1, 1, 2, 3});
    CHECK(atg.layer_bracket_condition);
    CHECK_FALSE(atg.growth_pause_condition);

    // The floating-point rank path agrees with the exact one at the origin.
    const GrowthReport atd = growth_report(ag, std::vector<double>(4, 0.0), 6);
    CHECK_FALSE(atd.exact);
    CHECK(atd.layer_dims == at0.layer_dims);
    CHECK(atd.weights == at0.weights);
    CHECK(atd.growth_pause_condition == at0.growth_pause_condition);
    CHECK(atd.layer_bracket_condition == at0.layer_bracket_condition);
}

TEST_CASE("adapted basis at the origin") {
    const Frame ag = examples::ag_frame();
    const AdaptedBasis basis = adapted_basis(ag, std::vector<Rational>(4, Rational(0)), 6);
    REQUIRE(basis.indices.size() == 4);
    CHECK(basis.indices[0].entries == std::vector<int>{1});
    CHECK(basis.indices[1].entries == std::vector<int>{2});
    CHECK(basis.indices[2].entries == std::vector<int>{2, 1});
    CHECK(basis.indices[3].entries == std::vector<int>{2, 1, 1, 1, 2});
    CHECK(basis.weights == std::vector<int>{1, 1, 2, 5});
    CHECK(basis.fields[2] == iterated_commutator(ag, basis.indices[2]));
}

TEST_CASE("the model frame is its own graded limit") {
    const Frame ag = examples::ag_frame();
    const GradedStructure gs = nilpotentize(ag, examples::ag_weights());
    CHECK(gs.weights == std::vector<int>{1, 1, 2, 5});
    CHECK(gs.homogeneous_dimension == 9);
    for (int i = 1; i <= 2; ++i) CHECK(gs.limit_frame.generator(i) == ag.generator(i));

    // Homogeneity: the dilated field equals the field, exactly, for several λ.
    for (const Rational& lam : {Rational(2), Rational(3), Rational(1, 2)})
        for (int i = 1; i <= 2; ++i)
            CHECK(scale_field(ag.generator(i), gs.weights, 1, lam) == ag.generator(i));
}

TEST_CASE("dilations preserve brackets exactly") {
    const Frame ag = examples::ag_frame();
    const std::vector<int> w = examples::ag_weights();
    std::vector<MultiIndex> betas;
    for (int len = 1; len <= 4; ++len) {
        const int count = 1 << len;
        for (int mask = 0; mask < count; ++mask) {
            std::vector<int> entries;
            for (int k = 0; k < len; ++k) entries.push_back(((mask >> k) & 1) + 1);
            betas.emplace_back(entries);
        }
    }
    for (const MultiIndex& beta : betas) {
        for (const Rational& lam : {Rational(2), Rational(3), Rational(1, 2)})
            CHECK(verify_bracket_preservation(ag, w, beta, lam));
        CHECK(verify_bracket_preservation_at_infinity(ag, w, beta));
    }
}

TEST_CASE("graded decomposition and residual decay") {
    const Frame ag = examples::ag_frame();
    const std::vector<int> w = examples::ag_weights();
    for (int i = 1; i <= 2; ++i) {
        const Decomposition d = decompose(ag.generator(i), w, 1);
        CHECK(d.homogeneous == ag.generator(i));
        CHECK(d.residual == VectorField::zero(4));
    }

    // A higher-order perturbation decays under the dilation family.
    VectorField pert = ag.generator(1);
    pert.set_coeff(3, pert.coeff(3) + Polynomial::monomial(4, {0, 0, 0, 2}, Rational(1, 7)));
    const Decomposition d = decompose(pert, w, 1);
    CHECK(d.homogeneous == ag.generator(1));
    CHECK(d.residual != VectorField::zero(4));
    const VectorField limit = limit_field(pert, w, 1);
    CHECK(limit == ag.generator(1));
    double prev = -1.0;
    for (const Rational& lam : {Rational(10), Rational(100), Rational(1000)}) {
        const double size = field_size(scale_field(pert, w, 1, lam) - limit);
        if (prev >= 0.0) CHECK(size < prev);
        prev = size;
    }
    CHECK(prev < 1e-5);

    // Terms below the admissible weighted degree are rejected.
    VectorField bad = ag.generator(1);
    bad.set_coeff(3, bad.coeff(3) + Polynomial::constant(4, Rational(1)));
    CHECK_THROWS_AS(decompose(bad, w, 1), domain_error);
}

TEST_CASE("triangular chart structure and Z selection") {
    const Frame chart = examples::ag_triangular_frame();
    const std::vector<int> w = examples::ag_triangular_weights();
    CHECK(w == std::vector<int>{1, 1, 2, 5});

    // Generator 1 is a pure coordinate field; generator 2 vanishes on the
    // second axis except for its own direction.
    CHECK(chart.generator(1) == VectorField::coordinate(4, 0));
    const VectorField T2 = chart.generator(2);
    CHECK(T2.coeff(0) == Polynomial::zero(4));
    CHECK(T2.coeff(1) == Polynomial::constant(4, Rational(1)));
    CHECK(T2.coeff(2) == Polynomial::variable(4, 0));
    CHECK(T2.coeff(3).coefficient({3, 1, 0, 0}) == Rational(1, 6));
    CHECK(T2.coeff(3).coefficient({2, 2, 0, 0}) == Rational(-1, 8));
    CHECK(T2.coeff(3).coefficient({2, 0, 1, 0}) == Rational(-3, 4));
    CHECK(T2.coeff(3).coefficient({1, 1, 1, 0}) == Rational(3, 2));

    // The chart is graded for its weights.
    for (int i = 1; i <= 2; ++i) {
        const Decomposition d = decompose(chart.generator(i), w, 1);
        CHECK(d.residual == VectorField::zero(4));
    }

    const TriangularFrame tf(chart, w);
    const AdaptedBasis basis = adapted_basis(chart, std::vector<Rational>(4, Rational(0)), 6);
    const ZChoice zc = choose_Z(tf, basis);
    CHECK(zc.beta.entries == std::vector<int>{2, 1, 1, 1, 2});
    CHECK(zc.beta_hat.entries == std::vector<int>{2, 1, 1, 1});
    CHECK(zc.outer == 2);
    CHECK(zc.scale == Rational(1));
    VectorField zexp(4);
    zexp.set_coeff(3, Polynomial::variable(4, 1));
    CHECK(zc.Z == zexp);
    CHECK(iterated_commutator(chart, zc.beta_hat).scaled(Rational(1) / zc.scale) == zc.Z);

    // Projection drops the top axis and yields the three-dimensional shadow.
    const TriangularFrame shadow = project(tf);
    CHECK(shadow.dimension() == 3);
    CHECK(shadow.weights() == std::vector<int>{1, 1, 2});
    CHECK(shadow.frame().generator(2).coeff(2) == Polynomial::variable(3, 0));
}

TEST_CASE("json round trips are byte stable") {
    for (const Frame& f : {examples::ag_frame(), examples::heisenberg_frame(),
                           examples::euclidean2_frame(), examples::ag_triangular_frame()}) {
        const io::json j1 = io::frame_to_json(f);
        const Frame back = io::frame_from_json(j1);
        CHECK(io::frame_to_json(back).dump() == j1.dump());
    }

    std::vector<std::vector<Rational>> m = {{Rational(2), Rational(1, 2)},
                                            {Rational(1, 2), Rational(3)}};
    const Frame g(2, examples::euclidean2_frame().generators(), Metric::from_matrix(m));
    const io::json jm = io::frame_to_json(g);
    const Frame gback = io::frame_from_json(jm);
    CHECK_FALSE(gback.metric().is_identity());
    CHECK(io::frame_to_json(gback).dump() == jm.dump());

    HorizontalCurve c = examples::ag_corner();
    integrate_states(examples::ag_frame(), c, 1e-10);
    const io::json jc = io::curve_to_json(c);
    const HorizontalCurve cback = io::curve_from_json(jc);
    CHECK(io::curve_to_json(cback).dump() == jc.dump());
}

TEST_CASE("nodal control lists are resampled to cell midpoints") {
    io::json j;
    j["base_point"] = {0.0, 0.0};
    j["times"] = {0.0, 1.0, 2.0};
    j["controls"] = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}};
    const HorizontalCurve c = io::curve_from_json(j);
    REQUIRE(c.controls.size() == 2);
    CHECK(c.controls[0] == std::vector<double>{0.5, 0.0});
    CHECK(c.controls[1] == std::vector<double>{1.0, 0.5});
}

TEST_CASE("shipped frame files match the in-code constructors") {
    const char* dir = std::getenv("SRGEO_DATA_DIR");
    REQUIRE(dir != nullptr);
    const std::string base(dir);
    const std::pair<const char*, Frame> entries[] = {
        {"/ag.json", examples::ag_frame()},
        {"/heisenberg.json", examples::heisenberg_frame()},
        {"/euclidean2.json", examples::euclidean2_frame()},
        {"/ag_triangular.json", examples::ag_triangular_frame()},
    };
    for (const auto& [name, frame] : entries) {
        const std::string text = read_file(base + name);
        CHECK(text == io::frame_to_json(frame).dump(2) + "\n");
        CHECK(io::frame_from_json(io::json::parse(text)).generators() == frame.generators());
    }
}
