#pragma once

// Seeded random streams and a chunked parallel loop.
//
// A stream is identified by (seed, stream id). Distinct ids give independent
// engines. A stream must not be shared between threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace mvbeta {

// Stream-id namespaces, so different consumers of one seed never collide.
enum class StreamDomain : std::uint64_t {
  kSampling = 1,
  kPilot = 2,
  kBootstrap = 3,
  kTestPoints = 4,
  kAuxiliary = 5,
};

class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);
  RngStream(std::uint64_t seed, StreamDomain domain, std::uint64_t index);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  double chi_square(double dof);
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t stream_id(StreamDomain domain, std::uint64_t index);

// Runs body(chunk) for chunk in [0, chunks) on up to `threads` workers
// (0 = hardware concurrency). Chunks are the unit of determinism: results
// must depend only on the chunk index, never on the worker that ran it.
void parallel_chunks(std::size_t chunks, unsigned threads,
                     const std::function<void(std::size_t)>& body);

}  // namespace mvbeta
