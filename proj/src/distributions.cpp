#include "msnet/distributions.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "msnet/quadrature.hpp"

namespace msnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double validated_mean(const HeavyTailDist::Params& params) {
  return std::visit(
      Overloaded{
          [](const Pareto& p) {
            require(std::isfinite(p.alpha) && p.alpha > 1.0, "pareto: alpha must exceed 1");
            require(std::isfinite(p.xm) && p.xm > 0.0, "pareto: xm must be positive");
            require(std::isfinite(p.shift) && p.xm + p.shift >= 0.0, "pareto: xm + shift must be >= 0");
            return p.shift + p.alpha * p.xm / (p.alpha - 1.0);
          },
          [](const Weibull& w) {
            require(w.shape > 0.0 && w.shape < 1.0, "weibull: shape must lie in (0, 1)");
            require(std::isfinite(w.scale) && w.scale > 0.0, "weibull: scale must be positive");
            return w.scale * std::tgamma(1.0 + 1.0 / w.shape);
          },
          [](const Lognormal& l) {
            require(std::isfinite(l.mu), "lognormal: mu must be finite");
            require(std::isfinite(l.sigma) && l.sigma > 0.0, "lognormal: sigma must be positive");
            return std::exp(l.mu + 0.5 * l.sigma * l.sigma);
          },
          [](const Exponential& e) {
            require(std::isfinite(e.rate) && e.rate > 0.0, "exponential: rate must be positive");
            return 1.0 / e.rate;
          },
          [](const Deterministic& d) {
            require(std::isfinite(d.value) && d.value >= 0.0, "deterministic: value must be >= 0");
            return d.value;
          },
      },
      params);
}

// Phi^{-1}(u) through erfc^{-1}; accurate deep into both tails.
double normal_quantile(double u) { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u); }

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::pareto: return "pareto";
    case Family::weibull: return "weibull";
    case Family::lognormal: return "lognormal";
    case Family::exponential: return "exponential";
    case Family::deterministic: return "deterministic";
  }
  return "unknown";
}

std::string_view flag_name(Flag f) {
  switch (f) {
    case Flag::no: return "no";
    case Flag::yes: return "yes";
    case Flag::not_applicable: return "n/a";
  }
  return "n/a";
}

HeavyTailDist::HeavyTailDist(Params params) : params_(params), mean_(validated_mean(params_)) {}

HeavyTailDist HeavyTailDist::pareto_with_mean(double alpha, double mean) {
  require(alpha > 1.0 && mean > 0.0, "pareto_with_mean: need alpha > 1 and mean > 0");
  return pareto(alpha, mean * (alpha - 1.0) / alpha);
}

Family HeavyTailDist::family() const { return static_cast<Family>(params_.index()); }

double HeavyTailDist::quantile(double u) const {
  return std::visit(
      Overloaded{
          [u](const Pareto& p) { return p.shift + p.xm * std::pow(1.0 - u, -1.0 / p.alpha); },
          [u](const Weibull& w) { return w.scale * std::pow(-std::log1p(-u), 1.0 / w.shape); },
          [u](const Lognormal& l) { return std::exp(l.mu + l.sigma * normal_quantile(u)); },
          [u](const Exponential& e) { return -std::log1p(-u) / e.rate; },
          [](const Deterministic& d) { return d.value; },
      },
      params_);
}

double HeavyTailDist::tail(double x) const {
  if (x < 0.0) return 1.0;
  return std::visit(
      Overloaded{
          [x](const Pareto& p) { return x <= p.xm + p.shift ? 1.0 : std::pow((x - p.shift) / p.xm, -p.alpha); },
          [x](const Weibull& w) { return std::exp(-std::pow(x / w.scale, w.shape)); },
          [x](const Lognormal& l) {
            if (x == 0.0) return 1.0;
            return normal_tail((std::log(x) - l.mu) / l.sigma);
          },
          [x](const Exponential& e) { return std::exp(-e.rate * x); },
          [x](const Deterministic& d) { return x < d.value ? 1.0 : 0.0; },
      },
      params_);
}

double HeavyTailDist::tail_integral(double x) const {
  if (x == kInf) return 0.0;
  if (x < 0.0) return -x + mean_;
  return std::visit(
      Overloaded{
          [x](const Pareto& p) {
            if (x <= p.xm + p.shift) return (p.xm + p.shift - x) + p.xm / (p.alpha - 1.0);
            return p.xm * std::pow((x - p.shift) / p.xm, 1.0 - p.alpha) / (p.alpha - 1.0);
          },
          [x](const Exponential& e) { return std::exp(-e.rate * x) / e.rate; },
          [x](const Deterministic& d) { return x < d.value ? d.value - x : 0.0; },
          [this, x](const auto&) {
            if (x == 0.0) return mean_;
            return integrate_tail_numeric([this](double u) { return tail(u); }, x).value;
          },
      },
      params_);
}

double HeavyTailDist::integrated_tail(double x) const { return std::min(1.0, tail_integral(x)); }

double HeavyTailDist::variance() const {
  return std::visit(
      Overloaded{
          [](const Pareto& p) {
            if (p.alpha <= 2.0) return kInf;
            return p.alpha * p.xm * p.xm / ((p.alpha - 1.0) * (p.alpha - 1.0) * (p.alpha - 2.0));
          },
          [](const Weibull& w) {
            const double g1 = std::tgamma(1.0 + 1.0 / w.shape);
            return w.scale * w.scale * (std::tgamma(1.0 + 2.0 / w.shape) - g1 * g1);
          },
          [](const Lognormal& l) {
            const double s2 = l.sigma * l.sigma;
            return std::expm1(s2) * std::exp(2.0 * l.mu + s2);
          },
          [](const Exponential& e) { return 1.0 / (e.rate * e.rate); },
          [](const Deterministic&) { return 0.0; },
      },
      params_);
}

double HeavyTailDist::lower_bound() const {
  if (const auto* p = std::get_if<Pareto>(&params_)) return p->xm + p->shift;
  if (const auto* d = std::get_if<Deterministic>(&params_)) return d->value;
  return 0.0;
}

bool HeavyTailDist::is_light_tailed() const {
  const auto f = family();
  return f == Family::exponential || f == Family::deterministic;
}

std::string HeavyTailDist::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const Pareto& p) {
                   os << "pareto(alpha=" << p.alpha << ", xm=" << p.xm;
                   if (p.shift != 0.0) os << ", shift=" << p.shift;
                   os << ")";
                 },
                 [&](const Weibull& w) { os << "weibull(shape=" << w.shape << ", scale=" << w.scale << ")"; },
                 [&](const Lognormal& l) { os << "lognormal(mu=" << l.mu << ", sigma=" << l.sigma << ")"; },
                 [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
                 [&](const Deterministic& d) { os << "deterministic(" << d.value << ")"; },
             },
             params_);
  return os.str();
}

bool operator==(const HeavyTailDist& a, const HeavyTailDist& b) {
  if (a.params_.index() != b.params_.index()) return false;
  return std::visit(
      Overloaded{
          [&](const Pareto& p) {
            const auto& q = std::get<Pareto>(b.params_);
            return p.alpha == q.alpha && p.xm == q.xm && p.shift == q.shift;
          },
          [&](const Weibull& p) {
            const auto& q = std::get<Weibull>(b.params_);
            return p.shape == q.shape && p.scale == q.scale;
          },
          [&](const Lognormal& p) {
            const auto& q = std::get<Lognormal>(b.params_);
            return p.mu == q.mu && p.sigma == q.sigma;
          },
          [&](const Exponential& p) { return p.rate == std::get<Exponential>(b.params_).rate; },
          [&](const Deterministic& p) { return p.value == std::get<Deterministic>(b.params_).value; },
      },
      a.params_);
}

SubexponentialClass is_subexponential_family(const HeavyTailDist& dist) {
  switch (dist.family()) {
    case Family::pareto: return {Flag::yes, Flag::yes, Flag::no, Flag::yes};
    case Family::weibull: return {Flag::yes, Flag::yes, Flag::no, Flag::no};
    case Family::lognormal: return {Flag::yes, Flag::yes, Flag::no, Flag::no};
    case Family::exponential:
    case Family::deterministic: return {Flag::no, Flag::no, Flag::not_applicable, Flag::not_applicable};
  }
  return {Flag::no, Flag::no, Flag::not_applicable, Flag::not_applicable};
}

std::optional<double> tail_equivalence_constant(const HeavyTailDist& dist, const HeavyTailDist& reference) {
  if (dist == reference) return 1.0;
  if (reference.is_light_tailed()) {
    // Only another light law with a no-heavier tail has a finite limit; keep it simple.
    if (dist.family() == Family::deterministic) return 0.0;
    if (dist.family() == Family::exponential && reference.family() == Family::exponential) {
      const double r = std::get<Exponential>(dist.params()).rate;
      const double r0 = std::get<Exponential>(reference.params()).rate;
      if (r > r0) return 0.0;
    }
    return std::nullopt;
  }
  if (dist.is_light_tailed()) return 0.0;

  const auto& p = dist.params();
  const auto& q = reference.params();
  if (dist.family() == Family::pareto && reference.family() == Family::pareto) {
    const auto a = std::get<Pareto>(p);
    const auto b = std::get<Pareto>(q);
    if (a.alpha > b.alpha) return 0.0;
    if (a.alpha < b.alpha) return std::nullopt;
    return std::pow(a.xm / b.xm, a.alpha);
  }
  if (reference.family() == Family::pareto) {
    // Weibull and lognormal tails are o(x^-alpha).
    return 0.0;
  }
  if (dist.family() == Family::pareto) return std::nullopt;
  if (dist.family() == Family::weibull && reference.family() == Family::weibull) {
    const auto a = std::get<Weibull>(p);
    const auto b = std::get<Weibull>(q);
    if (a.shape > b.shape) return 0.0;
    if (a.shape < b.shape) return std::nullopt;
    if (a.scale < b.scale) return 0.0;
    return std::nullopt;
  }
  if (dist.family() == Family::lognormal && reference.family() == Family::lognormal) {
    const auto a = std::get<Lognormal>(p);
    const auto b = std::get<Lognormal>(q);
    if (a.sigma < b.sigma) return 0.0;
    return std::nullopt;
  }
  return std::nullopt;
}

double normal_tail(double x) {
  if (x == -kInf) return 1.0;
  if (x == kInf) return 0.0;
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

}  // namespace msnet
