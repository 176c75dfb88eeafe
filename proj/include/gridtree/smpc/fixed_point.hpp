#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "gridtree/partynet.hpp"

namespace gridtree::smpc {

using net::PartyId;

/// Additive share in Z_2^64. `frac_bits` is the fixed-point scale; 0 means
/// the share is a plain integer.
struct Share {
  std::uint64_t value = 0;
  unsigned frac_bits = 0;
};

/// Series used for ln(1 + eps) after reducing x to 2^j (1 + eps).
///   Atanh:    2 * sum y^(2k+1) / (2k+1), y = eps / (2 + eps)
///   Mercator: sum (-1)^(k+1) eps^k / k
enum class LnSeries { Atanh, Mercator };

struct FixedPointConfig {
  unsigned frac_bits = 32;
  unsigned n_terms = 10;
  LnSeries series = LnSeries::Atanh;
  /// Treat ln(0) as 0 so that 0 ln 0 = 0 instead of raising.
  bool zero_guard = false;
  unsigned key_bits = 128;
  unsigned value_bits = 64;  // charged width of one circuit input
};

std::int64_t to_fixed(double x, unsigned frac_bits);
double from_fixed(std::uint64_t v, unsigned frac_bits);
/// Signed value of a + b.
double reconstruct(const Share& a, const Share& b);

/// Fixed-point approximation of ln x computed inside the ln circuit.
std::int64_t ln_fixed(std::uint64_t x, const FixedPointConfig& cfg);

/// Shares of ln(x_a + x_b) for integer shares x_a (Alice) and x_b (Bob).
/// Throws DomainViolation when the sum is below 1.
std::pair<Share, Share> ln_shares(net::Network& net, PartyId alice, const Share& x_a, PartyId bob,
                                  const Share& x_b, const FixedPointConfig& cfg,
                                  const std::string& tag = "ln");

/// Shares of a * b where Alice holds a and Bob holds b. Throws
/// DomainViolation when a fractional product leaves the signed 64-bit range.
std::pair<Share, Share> mult_shares(net::Network& net, PartyId alice, const Share& a, PartyId bob,
                                    const Share& b, const FixedPointConfig& cfg,
                                    const std::string& tag = "mult");

/// Shares of x ln x for x = x_a + x_b:
///   s_a = x_a u_a + v_a + w_a,  s_b = x_b u_b + v_b + w_b
/// with (u_a, u_b) from ln_shares, (v_a, v_b) = mult(u_a, x_b) and
/// (w_a, w_b) = mult(x_a, u_b).
std::pair<Share, Share> x_ln_x(net::Network& net, PartyId alice, const Share& x_a, PartyId bob,
                               const Share& x_b, const FixedPointConfig& cfg,
                               const std::string& tag = "xlnx");

}  // namespace gridtree::smpc
