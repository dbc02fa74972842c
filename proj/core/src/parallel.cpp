#include "pdmplab/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace pdmplab {

int thread_budget() {
  int budget = static_cast<int>(std::thread::hardware_concurrency());
  if (budget < 1) budget = 1;
  if (const char* env = std::getenv("PDMPLAB_THREADS")) {
    int cap = 0;
    const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
    if (ec == std::errc() && cap > 0) budget = std::min(budget, cap);
  }
  return budget;
}

}  // namespace pdmplab
