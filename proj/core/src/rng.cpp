#include "optomech/rng.hpp"

#include "optomech/errors.hpp"

namespace optomech {

NoiseSampler::NoiseSampler(double psd_level, double dt, std::uint64_t seed, std::uint64_t stream)
    : normal_(seed, stream), variance_(0.0) {
  if (!(psd_level >= 0.0) || !(dt > 0.0))
    throw Error(Errc::InvalidParameter, "noise_sampler needs psd_level >= 0 and dt > 0");
  variance_ = psd_level / dt;
}

std::vector<std::complex<double>> noise_sampler(double psd_level, double dt, std::uint64_t seed,
                                                std::size_t n, std::uint64_t stream) {
  NoiseSampler s(psd_level, dt, seed, stream);
  std::vector<std::complex<double>> out(n);
  for (auto& z : out) z = s.next();
  return out;
}

}  // namespace optomech
