#include "agequeue/rng.hpp"

#include <cmath>

namespace agequeue {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) + stream * 0x9e3779b97f4a7c15ULL);
}

double Rng::exponential(double rate) { return -std::log(uniform()) / rate; }

}  // namespace agequeue
