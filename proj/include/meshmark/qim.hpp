#pragma once

namespace meshmark::qim {

// Binary dithered scalar QIM. Bit b is carried by the lattice d_b + delta*Z
// with d_0 = +delta/4 and d_1 = -delta/4; the two lattices interleave at
// spacing delta/2.
struct QuantizerParams {
  double delta;  // quantization step, > 0
};

void check(const QuantizerParams& params);

// Dither offset of the lattice carrying `bit`.
double dither(int bit, const QuantizerParams& params);

// Nearest point of the bit lattice: delta * round((x - d_b) / delta) + d_b,
// with round-half-away-from-zero.
double quantize_bit(double x, int bit, const QuantizerParams& params);

// Bit whose lattice lies nearer to x. Exact ties resolve to 0.
int detect_bit(double x, const QuantizerParams& params);

// Nearest point of the bit lattice inside [lo, hi]. Requires hi - lo >= 2 delta
// and lo <= x <= hi; throws std::invalid_argument otherwise.
double quantize_bit_bounded(double x, int bit, const QuantizerParams& params, double lo, double hi);

}  // namespace meshmark::qim
