#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mgt/parallel.hpp"

using namespace mgt;

TEST_SUITE_BEGIN("parallel");

TEST_CASE("each index is visited exactly once") {
  for (int threads : {1, 2, 5, 16}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, threads);
    CHECK(std::accumulate(hits.begin(), hits.end(), 0) == 1000);
    CHECK(*std::min_element(hits.begin(), hits.end()) == 1);
  }
}

TEST_CASE("empty and tiny ranges") {
  parallel_for(0, [](std::size_t) { FAIL("must not be called"); }, 4);
  std::vector<int> hits(3, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] = 1; }, 8);
  CHECK(hits == std::vector<int>{1, 1, 1});
}

TEST_CASE("worker exceptions surface on the caller") {
  CHECK_THROWS_AS(
      parallel_for(64, [](std::size_t i) {
        if (i == 40) throw std::runtime_error("boom");
      }, 4),
      std::runtime_error);
}

TEST_CASE("thread count resolution order") {
  const int hw = resolve_thread_count(0);
  CHECK(hw >= 1);
  CHECK(resolve_thread_count(3) == 3);

  set_default_thread_count(2);
  CHECK(resolve_thread_count(0) == 2);
  CHECK(resolve_thread_count(5) == 5);
  set_default_thread_count(0);

  setenv("MGT_THREADS", "7", 1);
  CHECK(resolve_thread_count(0) == 7);
  unsetenv("MGT_THREADS");
  CHECK(resolve_thread_count(0) == hw);
}

TEST_SUITE_END();
