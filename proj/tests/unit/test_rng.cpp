#include "mvbeta/rng.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>
#include <vector>

using namespace mvbeta;

TEST(RngStream, SameSeedSameSequence) {
  RngStream a(5, StreamDomain::kSampling, 3);
  RngStream b(5, StreamDomain::kSampling, 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.normal(), b.normal());
}

TEST(RngStream, DistinctStreamsDiffer) {
  RngStream a(5, StreamDomain::kSampling, 0);
  RngStream b(5, StreamDomain::kSampling, 1);
  RngStream c(5, StreamDomain::kPilot, 0);
  RngStream d(6, StreamDomain::kSampling, 0);
  const double x = a.uniform();
  EXPECT_NE(x, b.uniform());
  EXPECT_NE(x, c.uniform());
  EXPECT_NE(x, d.uniform());
}

TEST(RngStream, DomainsDoNotCollide) {
  EXPECT_NE(stream_id(StreamDomain::kSampling, 0), stream_id(StreamDomain::kPilot, 0));
  EXPECT_NE(stream_id(StreamDomain::kSampling, 1), stream_id(StreamDomain::kBootstrap, 1));
}

TEST(RngStream, IndexInRange) {
  RngStream r(1, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_LT(r.index(7), 7u);
}

TEST(ParallelChunks, VisitsEveryChunkOnce) {
  for (unsigned threads : {1u, 3u, 0u}) {
    std::vector<std::atomic<int>> hits(97);
    parallel_chunks(hits.size(), threads, [&](std::size_t k) { hits[k]++; });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(ParallelChunks, PropagatesExceptions) {
  EXPECT_THROW(parallel_chunks(10, 2,
                               [](std::size_t k) {
                                 if (k == 4) throw std::runtime_error("boom");
                               }),
               std::runtime_error);
}
