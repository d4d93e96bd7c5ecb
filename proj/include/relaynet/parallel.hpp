// Copyright 2026 The relaynet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace relaynet {

/// Number of work items per chunk in every Monte Carlo loop. Each chunk owns
/// its RNG stream, so the chunk layout (and not the shard count) defines the
/// random sequence.
inline constexpr std::size_t kChunkSize = 256;

inline std::size_t chunk_count(std::size_t items)
{
    return (items + kChunkSize - 1) / kChunkSize;
}

/// Runs fn(chunk) for chunk in [0, chunks) on `shards` worker threads.
/// Results must be written to per-chunk slots and reduced by the caller in
/// chunk order to stay independent of the shard count.
template <class Fn>
void for_each_chunk(std::size_t chunks, unsigned shards, Fn&& fn)
{
    shards = std::max(1u, shards);
    if (shards == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks)
                return;
            try {
                fn(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = chunks;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = static_cast<unsigned>(std::min<std::size_t>(shards, chunks));
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace relaynet
