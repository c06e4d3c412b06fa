#include "doctest.h"
#include "fixtures.hpp"

using namespace subdivlab;

TEST_CASE("graph parsing rejects malformed input") {
  CHECK_THROWS_AS(DefiningGraph::from_json_text("{"), ParseError);
  CHECK_THROWS_AS(DefiningGraph::from_json_text(R"({"edges": []})"), ParseError);
  CHECK_THROWS_AS(DefiningGraph::from_json_text(R"({"generators": ["a","a"]})"), ParseError);
  CHECK_THROWS_AS(DefiningGraph::from_json_text(R"({"generators": ["a"], "edges": [["a","a"]]})"),
                  ParseError);
  CHECK_THROWS_AS(DefiningGraph::from_json_text(R"({"generators": ["a"], "edges": [["a","q"]]})"),
                  ParseError);
  CHECK_THROWS_AS(
      DefiningGraph::from_json_text(R"({"generators": ["a","b"], "edges": [["a","b"],["b","a"]]})"),
      ParseError);
}

TEST_CASE("json round trip keeps hash") {
  auto g = fixtures::path_azb();
  auto h = DefiningGraph::from_json_text(g.to_json_text());
  CHECK(g == h);
  CHECK(g.hash() == h.hash());
  CHECK(g.hash() != fixtures::triangle().hash());
}

TEST_CASE("diagonal generator counts") {
  // Sum over cliques K of 2^|K|; counted here by brute force over signed vectors.
  auto brute = [](const DefiningGraph& g) {
    int count = 0;
    int d = g.size();
    int total = 1;
    for (int i = 0; i < d; ++i) total *= 3;
    for (int code = 1; code < total; ++code) {
      SignedSet s;
      int c = code;
      for (int i = 0; i < d; ++i, c /= 3) {
        if (c % 3 == 1) s.pos |= 1U << i;
        if (c % 3 == 2) s.neg |= 1U << i;
      }
      if (g.is_clique(s.support())) ++count;
    }
    return count;
  };
  for (const auto& g : {fixtures::triangle(), fixtures::free3(), fixtures::path_azb(),
                        fixtures::edge_plus_point()}) {
    CHECK(diagonal_elements(g).size() == static_cast<std::size_t>(brute(g)));
  }
  CHECK(diagonal_elements(fixtures::triangle()).size() == 26);
  CHECK(diagonal_elements(fixtures::free3()).size() == 6);
  CHECK(diagonal_elements(fixtures::path_azb()).size() == 14);
}

TEST_CASE("ideal facets are the non-adjacent signed pairs") {
  CHECK(ideal_facets(fixtures::triangle()).empty());
  CHECK(ideal_facets(fixtures::free3()).size() == 12);
  CHECK(ideal_facets(fixtures::path_azb()).size() == 4);
}

TEST_CASE("truncated intersection") {
  auto g = fixtures::path_azb();
  auto c = [&](const char* s) { return CubeCell{parse_signed_set(g, s)}; };
  CHECK(cells_meet_truncated(g, c("a:+"), c("z:+")));
  CHECK_FALSE(cells_meet_truncated(g, c("a:+"), c("a:-")));
  // a and b do not commute: their facets only meet through the ideal cell.
  CHECK_FALSE(cells_meet_truncated(g, c("a:+"), c("b:+")));
  CHECK(cells_meet_truncated(g, c("a:+"), c("a:+,b:+")));
  CHECK_FALSE(cells_meet_truncated(g, c("a:-"), c("a:+,b:+")));
}

TEST_CASE("signed set text round trip") {
  auto g = fixtures::triangle();
  auto s = parse_signed_set(g, "(a:+,c:-)");
  CHECK(format_signed_set(g, s) == "(a:+,c:-)");
  CHECK(format_diagonal(g, s) == "a c^-1");
  CHECK_THROWS_AS(parse_signed_set(g, "a:+,a:-"), ParseError);
  CHECK_THROWS_AS(parse_signed_set(g, "q:+"), ParseError);
}

TEST_CASE("automorphisms") {
  CHECK(fixtures::triangle().automorphisms().size() == 6);
  CHECK(fixtures::path_azb().automorphisms().size() == 2);
  CHECK(fixtures::edge_plus_point().automorphisms().size() == 2);
}
