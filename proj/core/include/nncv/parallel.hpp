#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <thread>
#include <vector>

namespace nncv {

/// Worker cap for pixel loops. 1 (the default) runs everything inline.
void set_thread_count(int n);
int thread_count();

/// Splits [0, n) into fixed-size chunks, maps each chunk to a partial result
/// and folds the partials in chunk-index order. Chunk boundaries do not
/// depend on the worker count, so results are bit-identical for any thread
/// setting.
template <typename T, typename Map, typename Fold>
T chunked_reduce(std::size_t n, T init, Map map_chunk, Fold fold) {
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = n == 0 ? 0 : (n + kChunk - 1) / kChunk;
  const int workers = std::min<std::size_t>(thread_count(), chunks);
  if (workers <= 1) {
    T acc = std::move(init);
    for (std::size_t c = 0; c < chunks; ++c) {
      acc = fold(std::move(acc), map_chunk(c * kChunk, std::min(n, (c + 1) * kChunk)));
    }
    return acc;
  }
  std::vector<std::optional<T>> partials(chunks);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t c = w; c < chunks; c += workers) {
        partials[c] = map_chunk(c * kChunk, std::min(n, (c + 1) * kChunk));
      }
    });
  }
  for (auto& t : pool) t.join();
  T acc = std::move(init);
  for (std::size_t c = 0; c < chunks; ++c) acc = fold(std::move(acc), std::move(*partials[c]));
  return acc;
}

}  // namespace nncv
