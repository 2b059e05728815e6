#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <set>

#include "tiham/spin_basis.hpp"

using namespace tiham;

TEST_CASE("level codec") {
  const SpinBasis b({2, 1, 1});
  CHECK(b.local_dim() == 9);
  CHECK(b.encode(SpinState::Head()) == 0);
  CHECK(b.encode(SpinState::Data(0, 0, 1)) == 1);
  CHECK(b.encode(SpinState::Data(1, 1, 2)) == 8);
  CHECK(b.decode(0) == SpinState::Head());
  CHECK(b.decode(1) == SpinState::Data(0, 0, 1));
  CHECK_THROWS_AS(b.decode(9), Error);
  CHECK_THROWS_AS(b.encode(SpinState::Data(0, 2, 1)), Error);
  CHECK_THROWS_AS(b.encode(SpinState::Data(0, 0, 3)), Error);
  CHECK_THROWS_AS(b.encode(SpinState::Data(2, 0, 1)), Error);

  // interior spins are touched twice per cycle, so labels run to 2R
  const SpinBasis b32({3, 1, 2});
  CHECK(b32.labels() == 5);
  CHECK(b32.local_dim() == 31);
  CHECK(b32.decode(30) == SpinState::Data(1, 4, 3));
}

TEST_CASE("codec is a bijection for N<=4, R<=4") {
  for (int n = 2; n <= 4; ++n) {
    for (int r = 1; r <= 4; ++r) {
      const SpinBasis b({n, 1, r});
      const int labels = n == 2 ? r + 1 : 2 * r + 1;
      CHECK(b.local_dim() == 2 * n * labels + 1);
      std::set<int> seen;
      for (int lvl = 0; lvl < b.local_dim(); ++lvl) {
        const SpinState s = b.decode(lvl);
        CHECK(b.encode(s) == lvl);
        seen.insert(b.encode(s));
      }
      CHECK(static_cast<int>(seen.size()) == b.local_dim());
    }
  }
}

TEST_CASE("ring config index round-trip") {
  const SpinBasis b({2, 1, 1});
  for (ConfigIndex c = 0; c < b.ring_dim(); c += 7) CHECK(config_index(config_from_index(c, b), b) == c);
  CHECK(b.ring_dim() == 729);
}

TEST_CASE("initial_config") {
  const ProblemShape s{2, 1, 1};
  const RingConfig a = initial_config({0, 0}, 0, s);
  CHECK(a == RingConfig{SpinState::Head(), SpinState::Data(0, 0, 1), SpinState::Data(0, 0, 2)});
  const RingConfig w = initial_config({1, 0}, 1, s);
  CHECK(w == RingConfig{SpinState::Data(0, 0, 2), SpinState::Head(), SpinState::Data(1, 0, 1)});
  CHECK(is_legal(w, s).legal);
  CHECK(to_string(w) == "D(0,0,2),H,D(1,0,1)");
  CHECK_THROWS_AS(initial_config({1}, 0, {1, 1, 1}), Error);
  CHECK_THROWS_AS(initial_config({1, 0, 0}, 0, s), Error);
  CHECK_THROWS_AS(initial_config({1, 0}, 3, s), Error);
}

TEST_CASE("initial configurations are legal for every head site and bit string (N<=3)") {
  for (int n = 2; n <= 3; ++n) {
    const ProblemShape s{n, 1, 2};
    for (int bits = 0; bits < (1 << n); ++bits) {
      std::vector<int> x(static_cast<std::size_t>(n));
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = (bits >> j) & 1;
      for (int k = 0; k <= n; ++k) {
        const auto l = is_legal(initial_config(x, k, s), s);
        CHECK(l.legal);
        CHECK(l.violations.empty());
      }
    }
  }
}

TEST_CASE("clock transitions follow the sweep") {
  // N=4, R=2 visits bonds 1,2,3,3,2,1; labels count touches:
  // 0000 1100 1210 1221 1232 1342 2442
  const ProblemShape s{4, 1, 2};
  const auto moves = clock_transitions(s);
  REQUIRE(moves.size() == 6);
  CHECK(moves[0].family == TransitionFamily::Opening);
  CHECK(moves[0].left_position == 1);
  CHECK(moves[0].before == std::array<int, 2>{0, 0});
  CHECK(moves[0].after == std::array<int, 2>{1, 1});
  CHECK(moves[1].family == TransitionFamily::Rightward);
  CHECK(moves[1].before == std::array<int, 2>{1, 0});
  CHECK(moves[1].after == std::array<int, 2>{2, 1});
  CHECK(moves[3].family == TransitionFamily::Turnaround);
  CHECK(moves[3].left_position == 3);
  CHECK(moves[3].before == std::array<int, 2>{2, 1});
  CHECK(moves[3].after == std::array<int, 2>{3, 2});
  CHECK(moves[4].family == TransitionFamily::Leftward);
  CHECK(moves[4].left_position == 2);
  CHECK(moves[4].before == std::array<int, 2>{2, 3});
  CHECK(moves[5].left_position == 1);
  CHECK(moves[5].after == std::array<int, 2>{2, 4});
  for (const auto& mv : moves) {
    CHECK(mv.after[0] == mv.before[0] + 1);
    CHECK(mv.after[1] == mv.before[1] + 1);
  }
}

TEST_CASE("legal orbit sizes") {
  CHECK(enumerate_legal_orbit({2, 1, 1}).size() == 2);
  CHECK(enumerate_legal_orbit({3, 1, 2}).size() == 5);
  CHECK_THROWS_AS(enumerate_legal_orbit({3, 1, 0}), Error);

  const auto orbit = enumerate_legal_orbit({3, 1, 2});
  CHECK(orbit[0].pattern == ClockPattern{0, 0, 0});
  CHECK(orbit[1].pattern == ClockPattern{1, 1, 0});
  CHECK(orbit[2].pattern == ClockPattern{1, 2, 1});
  CHECK(orbit[3].pattern == ClockPattern{1, 3, 2});
  CHECK(orbit[4].pattern == ClockPattern{2, 4, 2});
  CHECK(orbit[3].cycle == 2);
  CHECK(orbit[3].wall == 1);
}

TEST_CASE("legal orbit is a path of T+1 patterns for N<=5, R<=4") {
  for (int n = 2; n <= 5; ++n)
    for (int r = 1; r <= 4; ++r) {
      const ProblemShape s{n, 1, r};
      const auto orbit = enumerate_legal_orbit(s);
      CHECK(static_cast<int>(orbit.size()) == s.total_steps() + 1);
      for (std::size_t t = 0; t < orbit.size(); ++t) CHECK(orbit[t].step == static_cast<int>(t));
      // consecutive patterns differ exactly on the bond of the slot taken
      const auto order = sweep_order(s);
      for (std::size_t t = 0; t + 1 < orbit.size(); ++t) {
        for (int p = 1; p <= n; ++p) {
          const bool on_bond = p == order[t].bond || p == order[t].bond + 1;
          const int delta = orbit[t + 1].pattern[p - 1] - orbit[t].pattern[p - 1];
          CHECK(delta == (on_bond ? 1 : 0));
        }
      }
      ClockPattern last(static_cast<std::size_t>(n), 2 * r);
      last.front() = r;
      last.back() = r;
      CHECK(orbit.back().pattern == last);
    }
}

TEST_CASE("is_legal violations") {
  const ProblemShape s{2, 1, 1};
  SUBCASE("two heads") {
    const RingConfig c{SpinState::Head(), SpinState::Head(), SpinState::Data(0, 0, 2)};
    const auto l = is_legal(c, s);
    CHECK_FALSE(l.legal);
    REQUIRE_FALSE(l.violations.empty());
    CHECK(l.violations[0].kind == Violation::HeadCount);
  }
  SUBCASE("reversed positions") {
    const RingConfig c{SpinState::Head(), SpinState::Data(0, 0, 2), SpinState::Data(0, 0, 1)};
    const auto l = is_legal(c, s);
    CHECK_FALSE(l.legal);
    bool found_pair = false;
    for (const auto& v : l.violations)
      if (v.kind == Violation::PositionIncrement && v.detail == "pair (2,1)") found_pair = true;
    CHECK(found_pair);
    // D(1) wraps around to sit just before the head
    bool adjacency = false;
    for (const auto& v : l.violations) adjacency |= v.kind == Violation::HeadAdjacency;
    CHECK(adjacency);
  }
  SUBCASE("clock pattern outside the orbit") {
    const RingConfig c{SpinState::Head(), SpinState::Data(0, 1, 1), SpinState::Data(0, 0, 2)};
    const auto l = is_legal(c, s);
    CHECK_FALSE(l.legal);
    REQUIRE(l.violations.size() == 1);
    CHECK(l.violations[0].kind == Violation::ClockPattern);
  }
  SUBCASE("final orbit state is legal") {
    const RingConfig c{SpinState::Data(1, 1, 2), SpinState::Head(), SpinState::Data(0, 1, 1)};
    CHECK(is_legal(c, s).legal);
  }
}
