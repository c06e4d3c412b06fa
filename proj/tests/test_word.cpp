#include <functional>
#include <map>

#include "doctest.h"
#include "fixtures.hpp"
#include "subdivlab/ball.hpp"
#include "subdivlab/oracle.hpp"
#include "subdivlab/word.hpp"

using namespace subdivlab;

namespace {

NormalForm nf(const DefiningGraph& g, const char* w) { return normalize(g, parse_word(g, w)); }

oracle::TraceWord to_trace(const Word& w) {
  oracle::TraceWord t;
  for (auto l : w) t.push_back(l.sign * (l.gen + 1));
  return t;
}

void for_each_word(int d, int max_len, const std::function<void(const Word&)>& f) {
  Word w;
  std::function<void()> rec = [&] {
    f(w);
    if (static_cast<int>(w.size()) == max_len) return;
    for (int gen = 0; gen < d; ++gen)
      for (int s : {1, -1}) {
        w.push_back({gen, s});
        rec();
        w.pop_back();
      }
  };
  rec();
}

}  // namespace

TEST_CASE("word literals") {
  auto g = fixtures::triangle();
  auto w = parse_word(g, "a^5 b^-2 c^3");
  CHECK(w.size() == 10);
  CHECK(format_word(g, w) == "a^5 b^-2 c^3");
  CHECK_THROWS_AS(parse_word(g, "q"), ParseError);
  CHECK_THROWS_AS(parse_word(g, "a^x"), ParseError);
}

TEST_CASE("normal form of a commuting power word") {
  auto g = fixtures::triangle();
  auto n = nf(g, "a^5 b^-2 c^3");
  REQUIRE(n.syllables().size() == 1);
  CHECK(n.tlen() == 5);
  std::vector<std::string> chain;
  for (const auto& t : n.chain()) chain.push_back(format_signed_set(g, t));
  CHECK(chain == std::vector<std::string>{"(a:+)", "(a:+)", "(a:+,c:+)", "(a:+,b:-,c:+)",
                                          "(a:+,b:-,c:+)"});
}

TEST_CASE("free group words keep every letter") {
  auto g = DefiningGraph::edgeless(2);
  auto n = nf(g, "a b a b");
  CHECK(n.syllables().size() == 4);
  CHECK(n.tlen() == 4);
}

TEST_CASE("central letter merges into the first syllable") {
  auto g = fixtures::path_azb();
  CHECK(format_normal_form(g, nf(g, "a z b z")) == "(a z^2)(b)");
}

TEST_CASE("equality") {
  auto g = fixtures::path_azb();
  CHECK(equals(g, parse_word(g, "a z b"), parse_word(g, "a b z")));
  CHECK_FALSE(equals(g, parse_word(g, "a b"), parse_word(g, "b a")));
  CHECK(equals(g, parse_word(g, "a a^-1"), {}));
  CHECK(nf(g, "z a z^-1 a^-1").is_identity());
}

TEST_CASE("translation by diagonal generators") {
  auto g = fixtures::path_azb();
  auto a3 = nf(g, "a^3");
  auto r = translate(g, a3, parse_signed_set(g, "a:+"));
  CHECK(r == nf(g, "a^4"));
  CHECK(r.tlen() == 4);
  CHECK(translate(g, nf(g, "a"), parse_signed_set(g, "a:-")).is_identity());
  auto abz = translate(g, nf(g, "a z"), parse_signed_set(g, "b:+,z:+"));
  CHECK(abz == nf(g, "a b z^2"));
  CHECK(abz.tlen() == 3);
  CHECK_THROWS_AS(translate(g, a3, parse_signed_set(g, "a:+,b:+")), std::invalid_argument);
}

TEST_CASE("predecessor drops the leftmost chain element") {
  auto t = fixtures::triangle();
  CHECK(predecessor(t, nf(t, "a^5 b^-2 c^3")) == nf(t, "a^4 b^-2 c^3"));
  CHECK(predecessor(t, nf(t, "a")).is_identity());
  auto p = fixtures::path_azb();
  CHECK(predecessor(p, nf(p, "a z b z")) == nf(p, "a z b"));
  CHECK_THROWS(predecessor(t, NormalForm{}));
}

TEST_CASE("idempotence and exponent sums on short words") {
  for (const auto& g : {fixtures::path_azb(), fixtures::edge_plus_point(),
                        DefiningGraph({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}})}) {
    for_each_word(g.size(), g.size() == 4 ? 6 : 8, [&](const Word& w) {
      auto n = normalize(g, w);
      REQUIRE(normalize(g, n.flatten()) == n);
      std::vector<int> sums(g.size(), 0);
      for (auto l : w) sums[l.gen] += l.sign;
      REQUIRE(n.exponent_sums(g.size()) == sums);
    });
  }
}

TEST_CASE("normal forms agree with exhaustive rewriting") {
  for (const auto& g : {fixtures::triangle(), fixtures::path_azb(), fixtures::free3(),
                        fixtures::edge_plus_point()}) {
    // Both partitions of all words up to length 6 must coincide.
    std::map<std::vector<std::int32_t>, oracle::TraceWord> by_nf;
    std::map<oracle::TraceWord, std::vector<std::int32_t>> by_key;
    std::size_t words = 0;
    for_each_word(g.size(), 6, [&](const Word& w) {
      ++words;
      auto key = normalize(g, w).key();
      auto ok = oracle::rewriting_key(g, to_trace(w));
      REQUIRE(oracle::trace_normal_form(g, to_trace(w)) == oracle::trace_normal_form(g, ok));
      auto [i, fresh_nf] = by_nf.emplace(key, ok);
      REQUIRE(i->second == ok);
      auto [j, fresh_key] = by_key.emplace(ok, key);
      REQUIRE(j->second == key);
    });
    CHECK(by_nf.size() == by_key.size());
    CHECK(words > 0);
  }
}

TEST_CASE("predecessor chains reach the identity") {
  for (const auto& g : {fixtures::triangle(), fixtures::path_azb(), fixtures::free3()}) {
    auto ball = build_ball(g, 4);
    for (ElemId id = 0; id < static_cast<ElemId>(ball.size()); ++id) {
      NormalForm x = ball.element(id);
      int steps = 0;
      while (!x.is_identity()) {
        x = predecessor(g, x);
        ++steps;
      }
      REQUIRE(steps == ball.element(id).tlen());
    }
  }
}
