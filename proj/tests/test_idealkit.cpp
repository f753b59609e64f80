#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "defect/idealkit.hpp"

using namespace defect;

namespace {

QPoly QP(const Ring& r, const std::string& s) {
  return to_rational(r, parse_poly(r, s));
}

std::vector<QPoly> QPs(const Ring& r, const std::vector<std::string>& ss) {
  std::vector<QPoly> out;
  for (const auto& s : ss) out.push_back(QP(r, s));
  return out;
}

Monomial random_mono(const Ring& r, std::mt19937& rng, int maxdeg) {
  std::uniform_int_distribution<int> ed(0, maxdeg);
  Monomial m(r.vt.nsym());
  for (auto& e : m.e) e = ed(rng);
  return m;
}

QPoly mono_poly(const Monomial& m) { return QPoly{{{m, Rat(1)}}}; }

/* Oracle: intersection of monomial ideals is generated by pairwise lcms. */
std::vector<QPoly> monomial_intersection_oracle(const Ring& r,
                                                const std::vector<Monomial>& a,
                                                const std::vector<Monomial>& b) {
  std::vector<QPoly> out;
  for (const auto& x : a)
    for (const auto& y : b) out.push_back(mono_poly(mono_lcm(x, y)));
  return out;
}

/* Oracle: (J : f) for monomial J and monomial f is (m_i / gcd(m_i, f)). */
std::vector<QPoly> monomial_colon_oracle(const Ring& r,
                                         const std::vector<Monomial>& j,
                                         const Monomial& f) {
  std::vector<QPoly> out;
  for (const auto& m : j) {
    Monomial g(m.e.size());
    for (std::size_t i = 0; i < m.e.size(); ++i)
      g.e[i] = std::max(0, m.e[i] - f.e[i]);
    out.push_back(mono_poly(g));
  }
  return out;
}

}  // namespace

TEST_CASE("intersection agrees with the monomial lcm oracle") {
  Ring r = make_ring({"x", "y", "z"}, {});
  std::mt19937 rng(808);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Monomial> a, b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(random_mono(r, rng, 3));
      b.push_back(random_mono(r, rng, 3));
    }
    std::vector<QPoly> ga, gb;
    for (const auto& m : a) ga.push_back(mono_poly(m));
    for (const auto& m : b) gb.push_back(mono_poly(m));
    auto inter = intersect_pair(r, ga, gb);
    CHECK(ideal_equal(r, inter, monomial_intersection_oracle(r, a, b)));
    CHECK(ideal_equal(r, intersect_pair(r, ga, ga), ga));
  }
}

TEST_CASE("colon agrees with the monomial quotient oracle") {
  Ring r = make_ring({"x", "y"}, {});
  std::mt19937 rng(111);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Monomial> j;
    for (int i = 0; i < 3; ++i) j.push_back(random_mono(r, rng, 3));
    Monomial f = random_mono(r, rng, 2);
    std::vector<QPoly> gj;
    for (const auto& m : j) gj.push_back(mono_poly(m));
    auto got = colon_single(r, gj, mono_poly(f));
    CHECK(ideal_equal(r, got, monomial_colon_oracle(r, j, f)));
  }
  /* (J : (1)) = J */
  auto gj = QPs(r, {"x^2", "x*y"});
  CHECK(ideal_equal(r, colon_ideal(r, gj, QPs(r, {"1"})), gj));
  /* I * (J : I) ⊆ J */
  auto gi = QPs(r, {"x", "y^2"});
  auto c = colon_ideal(r, gj, gi);
  auto gbj = buchberger(r, gj);
  for (const auto& u : c)
    for (const auto& v : gi) CHECK(in_ideal(r, poly_mul(r, u, v), gbj));
}

TEST_CASE("annihilator of the quotient ideal in the determinantal cover") {
  /* in P/(r1,r2,r3), the annihilator of (r4,r5,r6) is
   * ((q-1+a)*al, (q-1+a)*be, c*al, c*be) */
  Ring r = make_ring({"a", "b", "c", "al", "be", "ga"}, {"q_"});
  auto cover = QPs(r, {"al^2 + be*ga", "(q_ - 1 + a)*al + c*be",
                       "(q_ - 1 + a)*a + b*c"});
  auto extra = QPs(r, {"(q_ - 1 + a)*ga - c*al", "a*al + b*ga", "a*be - b*al"});
  auto got = colon_ideal(r, cover, extra);
  std::vector<QPoly> want = QPs(
      r, {"(q_ - 1 + a)*al", "(q_ - 1 + a)*be", "c*al", "c*be"});
  for (const auto& f : cover) want.push_back(f);
  CHECK(ideal_equal(r, got, want));
}

TEST_CASE("staircase: dimensions, bases, degenerate cases") {
  Ring r = make_ring({"x", "y", "z"}, {});
  auto dim_of = [&](const std::vector<std::string>& gens) {
    return staircase(r, buchberger(r, QPs(r, gens))).dimension;
  };
  CHECK(dim_of({"x*y"}) == 2);
  CHECK(dim_of({"x"}) == 2);
  CHECK(dim_of({"x", "y"}) == 1);
  CHECK(dim_of({"x", "y", "z"}) == 0);
  CHECK(dim_of({"1"}) == -1);
  CHECK(staircase(r, buchberger(r, QPs(r, {"2"}))).dimension == -1);

  Ring r1 = make_ring({"x"}, {});
  auto sc = staircase(r1, buchberger(r1, QPs(r1, {"x^2"})));
  REQUIRE(sc.finite);
  REQUIRE(sc.basis.size() == 2);
  CHECK(sc.basis[0].is_one());
  CHECK(sc.basis[1] == parse_poly(r1, "x").t[0].first);

  auto big = staircase(r, buchberger(r, QPs(r, {"x^2", "y^3", "z^2"})));
  CHECK(big.basis.size() == 12);

  auto inf = staircase(r, buchberger(r, QPs(r, {"x^2"})));
  CHECK(!inf.finite);
  CHECK(inf.dimension == 2);
  CHECK(inf.independent.size() == 2);
}

TEST_CASE("multiplication matrices and coordinates") {
  Ring r = make_ring({"x", "y"}, {});
  auto gb = buchberger(r, QPs(r, {"x^2 - y", "y^2"}));
  auto sc = staircase(r, gb);
  REQUIRE(sc.finite);
  REQUIRE(sc.basis.size() == 4);  /* 1, x, y, xy */
  Rat zero(0);
  Mat<Rat> mx = mult_matrix(r, gb, sc.basis, QP(r, "x"), zero);
  /* x*x = y, x*y = xy, x*xy = y^2 = 0 */
  Mat<Rat> mx2 = mult_matrix(r, gb, sc.basis, QP(r, "x^2"), zero);
  Mat<Rat> prod(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      Rat acc(0);
      for (std::size_t k = 0; k < 4; ++k) acc += mx.at(i, k) * mx.at(k, j);
      prod.at(i, j) = acc;
    }
  CHECK(prod == mx2);
  auto coords = nf_coords(r, gb, sc.basis, QP(r, "3*x^2 + x - 5"), zero);
  /* = 3y + x - 5 in the increasing basis 1, y, x, xy (grevlex: y < x) */
  CHECK(coords[0] == Rat(-5));
  CHECK(coords[1] == Rat(3));
  CHECK(coords[2] == Rat(1));
  CHECK(coords[3] == Rat(0));
}

TEST_CASE("socle detects Gorenstein and non-Gorenstein fibers") {
  Ring r = make_ring({"x", "y"}, {});
  Rat zero(0);
  auto socle_dim = [&](const std::vector<std::string>& gens) {
    auto gb = buchberger(r, QPs(r, gens));
    auto sc = staircase(r, gb);
    REQUIRE(sc.finite);
    return socle_basis(r, gb, sc.basis, {0, 1}, zero).size();
  };
  CHECK(socle_dim({"x^2", "y^2"}) == 1);       /* socle xy: Gorenstein */
  CHECK(socle_dim({"x^2", "x*y", "y^2"}) == 2); /* socle x, y */
  CHECK(socle_dim({"x", "y^3"}) == 1);

  /* the socle vector of k[x,y]/(x^2,y^2) is the coordinate of xy */
  auto gb = buchberger(r, QPs(r, {"x^2", "y^2"}));
  auto sc = staircase(r, gb);
  auto soc = socle_basis(r, gb, sc.basis, {0, 1}, zero);
  REQUIRE(soc.size() == 1);
  Monomial xy = parse_poly(r, "x*y").t[0].first;
  for (std::size_t i = 0; i < sc.basis.size(); ++i)
    CHECK((soc[0][i] != 0) == (sc.basis[i] == xy));
}

TEST_CASE("fitting ideals of explicit presentations") {
  Ring r = make_ring({"x", "y"}, {});
  /* 1x1 presentation (d) of P/(d) */
  Mat<QPoly> p1(1, 1);
  p1.at(0, 0) = QP(r, "x^2 - y");
  auto f1 = fitting_ideal(r, p1);
  REQUIRE(f1.size() == 1);
  CHECK(ideal_equal(r, f1, QPs(r, {"x^2 - y"})));

  /* diag(f, g) presents P/(f) ⊕ P/(g); Fitt = (fg) ⊆ Ann = (f) ∩ (g) */
  Mat<QPoly> p2(2, 3);
  p2.at(0, 0) = QP(r, "x^2");
  p2.at(1, 1) = QP(r, "y^3");
  p2.at(0, 2) = QP(r, "x*y");
  p2.at(1, 2) = QP(r, "x + y");
  auto f2 = fitting_ideal(r, p2);
  auto ann = intersect_pair(r, QPs(r, {"x^2", "x*y"}),
                            QPs(r, {"y^3", "x + y"}));
  auto anngb = buchberger(r, ann);
  for (const auto& g : f2) CHECK(in_ideal(r, g, anngb));

  /* fewer columns than rows: zero ideal */
  Mat<QPoly> p3(2, 1);
  p3.at(0, 0) = QP(r, "x");
  CHECK(fitting_ideal(r, p3).empty());
}

TEST_CASE("regular sequence verdicts") {
  Ring r = make_ring({"x", "y"}, {});
  auto rep = is_regular_sequence(r, {}, {parse_poly(r, "x"), parse_poly(r, "y")}, 5);
  CHECK(rep.regular_q);
  CHECK(rep.regular_fp);
  CHECK(rep.final_fp.basis.size() == 1);

  auto bad = is_regular_sequence(
      r, {}, {parse_poly(r, "x"), parse_poly(r, "x + x^2")}, 5);
  CHECK(!bad.regular_q);
  CHECK(!bad.regular_fp);
}

TEST_CASE("regular sequence through the determinantal cover with uniformizer") {
  /* ambient power series in 6 variables, q specialized to 11, p = 5 */
  Ring rp = make_ring({"a", "b", "c", "al", "be", "ga"}, {"q_"});
  Ring r = make_ring({"a", "b", "c", "al", "be", "ga"}, {});
  std::map<std::string, Int> qv = {{"q_", 11}};
  auto S = [&](const std::string& s) {
    return specialize_params(rp, parse_poly(rp, s), qv, r);
  };
  std::vector<IPoly> seq = {S("al^2 + be*ga"),
                            S("(q_ - 1 + a)*al + c*be"),
                            S("(q_ - 1 + a)*a + b*c"),
                            S("ga - be"),
                            S("c + b"),
                            S("be + b"),
                            S("5")};
  auto rep = is_regular_sequence(r, {}, seq, 5);
  CHECK(rep.regular_q);
  CHECK(rep.regular_fp);
  CHECK(rep.uniformizer_at == 6);
  REQUIRE(rep.final_fp.finite);
  /* fiber of the cover: a degree-2 extension of k[a,al]/(al^2-a*al, a^2+a*al),
   * hence of dimension 8 */
  CHECK(rep.final_fp.basis.size() == 8);
}

TEST_CASE("freeness over a subring by fiber ranks") {
  Ring r1 = make_ring({"x"}, {});
  auto rep1 = verify_free_over_subring(r1, {}, {parse_poly(r1, "x")}, 1,
                                       {3, 5, 7});
  CHECK(rep1.ok);
  CHECK(rep1.fibers.size() == 4);

  Ring r = make_ring({"x", "y"}, {});
  auto rep2 = verify_free_over_subring(
      r, {parse_poly(r, "x^2 - y^2")}, {parse_poly(r, "y")}, 2, {3, 5});
  CHECK(rep2.ok);
  CHECK(rep2.basis_q.size() == 2);

  /* wrong expected rank is rejected */
  auto rep3 = verify_free_over_subring(
      r, {parse_poly(r, "x^2 - y^2")}, {parse_poly(r, "y")}, 3, {3});
  CHECK(!rep3.ok);

  /* non-Artinian quotient is flagged */
  auto rep4 = verify_free_over_subring(r, {}, {parse_poly(r, "x")}, 1, {3});
  CHECK(!rep4.ok);
  CHECK(!rep4.artinian);
}

TEST_CASE("st-family fiber ranks: full ring 4, cover 8") {
  Ring rp = make_ring({"a", "b", "c", "al", "be", "ga"}, {"q_"});
  Ring r = make_ring({"a", "b", "c", "al", "be", "ga"}, {});
  std::map<std::string, Int> qv = {{"q_", 11}};
  auto S = [&](const std::string& s) {
    return specialize_params(rp, parse_poly(rp, s), qv, r);
  };
  std::vector<IPoly> cover = {S("al^2 + be*ga"), S("(q_ - 1 + a)*al + c*be"),
                              S("(q_ - 1 + a)*a + b*c")};
  std::vector<IPoly> full = cover;
  full.push_back(S("(q_ - 1 + a)*ga - c*al"));
  full.push_back(S("a*al + b*ga"));
  full.push_back(S("a*be - b*al"));
  std::vector<IPoly> images = {S("ga - be"), S("c + b"), S("be + b")};

  auto repc = verify_free_over_subring(r, cover, images, 8, {5});
  CHECK(repc.ok);
  auto repf = verify_free_over_subring(r, full, images, 4, {5});
  CHECK(repf.ok);
}
