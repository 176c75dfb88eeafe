#include "gridtree/smpc/fixed_point.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "gridtree/errors.hpp"
#include "gridtree/smpc/circuits.hpp"

namespace gridtree::smpc {

std::int64_t to_fixed(double x, unsigned frac_bits) {
  return static_cast<std::int64_t>(std::llround(std::ldexp(x, static_cast<int>(frac_bits))));
}

double from_fixed(std::uint64_t v, unsigned frac_bits) {
  return std::ldexp(static_cast<double>(static_cast<std::int64_t>(v)), -static_cast<int>(frac_bits));
}

double reconstruct(const Share& a, const Share& b) {
  if (a.frac_bits != b.frac_bits) throw DomainViolation("shares use different scales");
  return from_fixed(a.value + b.value, a.frac_bits);
}

std::int64_t ln_fixed(std::uint64_t x, const FixedPointConfig& cfg) {
  if (static_cast<std::int64_t>(x) < 1) {
    if (x == 0 && cfg.zero_guard) return 0;
    throw DomainViolation("ln needs an argument of at least 1");
  }
  if (cfg.n_terms < 1) throw DomainViolation("at least one series term is required");
  const unsigned j = static_cast<unsigned>(std::bit_width(x)) - 1;
  const long double base = std::ldexp(1.0L, static_cast<int>(j));
  const long double eps = (static_cast<long double>(x) - base) / base;
  long double series = 0;
  if (cfg.series == LnSeries::Atanh) {
    const long double y = eps / (2 + eps);
    long double p = y;
    for (unsigned k = 0; k < cfg.n_terms; ++k) {
      series += p / (2 * k + 1);
      p *= y * y;
    }
    series *= 2;
  } else {
    long double p = eps;
    for (unsigned k = 1; k <= cfg.n_terms; ++k) {
      series += (k % 2 ? p : -p) / k;
      p *= eps;
    }
  }
  const int f = static_cast<int>(cfg.frac_bits);
  const auto ln2 = std::llround(std::ldexp(std::numbers::ln2_v<long double>, f));
  return static_cast<std::int64_t>(j) * ln2 + std::llround(std::ldexp(series, f));
}

namespace {

IdealCircuitSpec two_party_spec(const std::string& name, PartyId alice, PartyId bob,
                                const FixedPointConfig& cfg, unsigned factor) {
  IdealCircuitSpec spec;
  spec.name = name;
  spec.inputs = {{alice, 1}, {bob, 1}};
  spec.outputs = {{{alice}}, {{bob}}};
  spec.value_bits = cfg.value_bits;
  spec.key_bits = cfg.key_bits;
  spec.factor = factor;
  return spec;
}

}  // namespace

std::pair<Share, Share> ln_shares(net::Network& net, PartyId alice, const Share& x_a, PartyId bob,
                                  const Share& x_b, const FixedPointConfig& cfg,
                                  const std::string& tag) {
  if (x_a.frac_bits != 0 || x_b.frac_bits != 0) throw DomainViolation("ln takes integer shares");
  // reject before anything is sent so a failed call leaves no dangling input
  ln_fixed(x_a.value + x_b.value, cfg);
  auto spec = two_party_spec(tag, alice, bob, cfg, cfg.n_terms);
  Rng& coin = net.rng(PartyId::ideal());
  spec.fn = [&cfg, &coin](const std::vector<Words>& in) {
    const auto u = static_cast<std::uint64_t>(ln_fixed(in[0][0] + in[1][0], cfg));
    const std::uint64_t r = coin.next();
    return std::vector<Words>{{r}, {u - r}};
  };
  const auto out = circuit_backend()(net, spec, {{x_a.value}, {x_b.value}});
  return {Share{out[0][0], cfg.frac_bits}, Share{out[1][0], cfg.frac_bits}};
}

namespace {

std::uint64_t fixed_product(const Share& a, const Share& b, unsigned f) {
  if (a.frac_bits == 0 || b.frac_bits == 0) return a.value * b.value;
  const __int128 p = static_cast<__int128>(static_cast<std::int64_t>(a.value)) *
                     static_cast<std::int64_t>(b.value);
  const unsigned shift = a.frac_bits + b.frac_bits - f;
  const __int128 half = shift ? static_cast<__int128>(1) << (shift - 1) : 0;
  const __int128 q = (p + half) >> shift;
  if (q > INT64_MAX || q < INT64_MIN) throw DomainViolation("fixed-point product overflows");
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(q));
}

unsigned product_scale(const Share& a, const Share& b, unsigned f) {
  if (a.frac_bits == 0) return b.frac_bits;
  if (b.frac_bits == 0) return a.frac_bits;
  if (a.frac_bits + b.frac_bits < f) throw DomainViolation("fixed-point scales are too small");
  return f;
}

}  // namespace

std::pair<Share, Share> mult_shares(net::Network& net, PartyId alice, const Share& a, PartyId bob,
                                    const Share& b, const FixedPointConfig& cfg,
                                    const std::string& tag) {
  const unsigned scale = product_scale(a, b, cfg.frac_bits);
  fixed_product(a, b, cfg.frac_bits);
  auto spec = two_party_spec(tag, alice, bob, cfg, 1);
  Rng& coin = net.rng(PartyId::ideal());
  const unsigned fa = a.frac_bits, fb = b.frac_bits, f = cfg.frac_bits;
  spec.fn = [&coin, fa, fb, f](const std::vector<Words>& in) {
    const std::uint64_t p = fixed_product(Share{in[0][0], fa}, Share{in[1][0], fb}, f);
    const std::uint64_t r = coin.next();
    return std::vector<Words>{{r}, {p - r}};
  };
  const auto out = circuit_backend()(net, spec, {{a.value}, {b.value}});
  return {Share{out[0][0], scale}, Share{out[1][0], scale}};
}

std::pair<Share, Share> x_ln_x(net::Network& net, PartyId alice, const Share& x_a, PartyId bob,
                               const Share& x_b, const FixedPointConfig& cfg,
                               const std::string& tag) {
  const auto [u_a, u_b] = ln_shares(net, alice, x_a, bob, x_b, cfg, tag + ":ln");
  const auto [v_a, v_b] = mult_shares(net, alice, u_a, bob, x_b, cfg, tag + ":mult");
  const auto [w_a, w_b] = mult_shares(net, alice, x_a, bob, u_b, cfg, tag + ":mult");
  const unsigned f = cfg.frac_bits;
  return {Share{x_a.value * u_a.value + v_a.value + w_a.value, f},
          Share{x_b.value * u_b.value + v_b.value + w_b.value, f}};
}

}  // namespace gridtree::smpc
