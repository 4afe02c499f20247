#ifndef MELSB_SIGNAL_GEN_H_
#define MELSB_SIGNAL_GEN_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace melsb {

// Speech-like test signal: syllables of formant-filtered harmonic excitation
// with gliding pitch, short fricatives and pauses. Peak amplitude 0.5.
std::vector<double> SpeechLikeSignal(size_t num_samples, int sample_rate,
                                     uint64_t seed);

enum class NoiseKind {
  kWhite,
  kCar,        // low-pass (road/engine-like) noise
  kModulated,  // car noise with slow, deep amplitude modulation
};

NoiseKind ParseNoiseKind(const std::string& name);
std::string ToString(NoiseKind kind);

// Unit-variance noise of the requested kind.
std::vector<double> NoiseSignal(NoiseKind kind, size_t num_samples,
                                int sample_rate, uint64_t seed);

}  // namespace melsb

#endif  // MELSB_SIGNAL_GEN_H_
