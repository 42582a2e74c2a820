#include "unifilar/rng.hpp"

namespace unifilar {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter)
    : key_(mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL))),
      counter_(counter) {}

CounterRng::result_type CounterRng::operator()() {
  const std::uint64_t c = counter_++;
  return mix64(key_ ^ mix64(c));
}

double CounterRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

int CounterRng::categorical(const double* probs, int size) {
  const double u = uniform();
  double acc = 0.0;
  int last = 0;
  for (int i = 0; i < size; ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

}  // namespace unifilar
