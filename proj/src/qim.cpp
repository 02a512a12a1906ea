#include "meshmark/qim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace meshmark::qim {

void check(const QuantizerParams& params) {
  if (!(params.delta > 0.0) || !std::isfinite(params.delta)) {
    throw std::invalid_argument("quantization step must be positive and finite");
  }
}

double dither(int bit, const QuantizerParams& params) { return bit == 0 ? params.delta / 4.0 : -params.delta / 4.0; }

double quantize_bit(double x, int bit, const QuantizerParams& params) {
  const double d = dither(bit, params);
  return params.delta * std::round((x - d) / params.delta) + d;
}

int detect_bit(double x, const QuantizerParams& params) {
  const double e0 = std::abs(x - quantize_bit(x, 0, params));
  const double e1 = std::abs(x - quantize_bit(x, 1, params));
  return e1 < e0 ? 1 : 0;
}

double quantize_bit_bounded(double x, int bit, const QuantizerParams& params, double lo, double hi) {
  check(params);
  if (!(hi - lo >= 2.0 * params.delta)) {
    throw std::invalid_argument("bounded quantization interval narrower than 2*delta: [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  if (!(x >= lo && x <= hi)) throw std::invalid_argument("value outside the quantization interval");

  const double d = dither(bit, params);
  const double q = quantize_bit(x, bit, params);
  if (q >= lo && q <= hi) return q;
  // Lattice points are d + k*delta; step toward the interior.
  double k = 0.0;
  if (q < lo) {
    k = std::ceil((lo - d) / params.delta);
    if (params.delta * k + d < lo) k += 1.0;
  } else {
    k = std::floor((hi - d) / params.delta);
    if (params.delta * k + d > hi) k -= 1.0;
  }
  return params.delta * k + d;
}

}  // namespace meshmark::qim
