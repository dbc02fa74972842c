#pragma once

#include <optional>
#include <vector>

#include "pdmplab/parallel.hpp"

namespace pdmplab {

template <class Acc, class Make>
Acc run_chains(const SwitchingParams& p, HybridState initial, std::uint64_t events_per_chain,
               int chains, std::uint64_t seed, Make make) {
  std::vector<std::optional<Acc>> partial(static_cast<std::size_t>(chains));
  parallel_for(partial.size(), [&](std::size_t k) {
    const std::uint64_t base = 2 * static_cast<std::uint64_t>(k) + 2;
    Simulator sim(p, initial, Rng::stream(seed, base));
    Acc acc = make(k, Rng::stream(seed, base + 1));
    for (std::uint64_t e = 0; e < events_per_chain; ++e) acc.add(sim.next());
    partial[k].emplace(std::move(acc));
  });
  Acc total = std::move(*partial.front());
  for (std::size_t k = 1; k < partial.size(); ++k) total.merge(*partial[k]);
  return total;
}

}  // namespace pdmplab
