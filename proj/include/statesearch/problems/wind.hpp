#pragma once

// Hour-ahead wind commitment. A producer pledges x units for the next hour at
// the contract price; any shortfall against the realized wind is bought back
// at the regulating (spot) price.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "statesearch/piecewise_linear.hpp"
#include "statesearch/polytope.hpp"
#include "statesearch/state.hpp"

namespace statesearch::wind {

/// P^C x - P^S max(x - W, 0)
inline double wind_revenue(double x, double wind_next, double contract_price, double spot_price) {
  return contract_price * x - spot_price * std::max(x - wind_next, 0.0);
}

// ---------------------------------------------------------------------------
// Calendar

inline constexpr double kHoursPerDay = 24.0;
inline constexpr double kDaysPerYear = 365.25;

/// Whole hours since 1970-01-01T00:00 UTC.
using HourStamp = std::int64_t;

inline HourStamp make_hour(int y, unsigned m, unsigned d, unsigned h) {
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok() || h > 23) throw std::invalid_argument("invalid calendar date");
  return static_cast<HourStamp>(sys_days{ymd}.time_since_epoch().count()) * 24 + static_cast<HourStamp>(h);
}

struct CalendarHour {
  int year;
  unsigned month;
  unsigned day;
  unsigned hour;
  unsigned day_of_year;  // 0-based
};

inline CalendarHour calendar_of(HourStamp t) {
  using namespace std::chrono;
  const auto days = static_cast<int>(t >= 0 ? t / 24 : (t - 23) / 24);
  const sys_days sd{std::chrono::days{days}};
  const year_month_day ymd{sd};
  const sys_days jan1{ymd.year() / January / 1};
  return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
          static_cast<unsigned>(t - static_cast<HourStamp>(days) * 24),
          static_cast<unsigned>((sd - jan1).count())};
}

/// Hour of day in [0, 24).
inline double hour_of_day(HourStamp t) { return calendar_of(t).hour; }

/// Day of year in [0, 366), with the hour as a fraction.
inline double day_of_year(HourStamp t) {
  const auto c = calendar_of(t);
  return c.day_of_year + c.hour / kHoursPerDay;
}

/// `YYYY-MM-DDTHH:MM`
inline std::string format_hour(HourStamp t) {
  const auto c = calendar_of(t);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:00", c.year, c.month, c.day, c.hour);
  return buf;
}

/// Parses `YYYY-MM-DDTHH:MM`; minutes must be zero.
inline HourStamp parse_hour(std::string_view s) {
  auto field = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    const char* b = s.data() + pos;
    auto [p, ec] = std::from_chars(b, b + len, v);
    if (ec != std::errc{} || p != b + len) throw std::invalid_argument("malformed timestamp");
    return v;
  };
  if (s.size() != 16 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':') {
    throw std::invalid_argument("malformed timestamp");
  }
  if (field(14, 2) != 0) throw std::invalid_argument("timestamp is not on the hour");
  const int h = field(11, 2);
  if (h < 0 || h > 23) throw std::invalid_argument("malformed timestamp");
  return make_hour(field(0, 4), static_cast<unsigned>(field(5, 2)), static_cast<unsigned>(field(8, 2)),
                   static_cast<unsigned>(h));
}

// ---------------------------------------------------------------------------
// Wind series

struct WindRecord {
  HourStamp hour = 0;
  double wind = 0.0;

  bool operator==(const WindRecord&) const = default;
};

/// Longest run of missing hours filled by interpolation.
inline constexpr int kMaxInterpolatedHours = 3;

namespace detail {

inline std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace detail

/// Reads `timestamp,wind` rows. Timestamps must increase; a run of up to
/// three missing hours is filled by linear interpolation.
inline std::vector<WindRecord> read_wind_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw std::invalid_argument("empty wind file");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,wind") throw std::invalid_argument(detail::line_error(1, "expected header timestamp,wind"));

  std::vector<WindRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      throw std::invalid_argument(detail::line_error(lineno, "expected two fields"));
    }
    WindRecord r;
    try {
      r.hour = parse_hour(std::string_view(line).substr(0, comma));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(detail::line_error(lineno, e.what()));
    }
    const char* b = line.data() + comma + 1;
    const char* e = line.data() + line.size();
    auto [p, ec] = std::from_chars(b, e, r.wind);
    if (ec != std::errc{} || p != e || !std::isfinite(r.wind)) {
      throw std::invalid_argument(detail::line_error(lineno, "malformed wind value"));
    }
    if (r.wind < 0.0) throw std::invalid_argument(detail::line_error(lineno, "negative wind value"));
    if (!out.empty()) {
      const WindRecord prev = out.back();
      const HourStamp step = r.hour - prev.hour;
      if (step <= 0) throw std::invalid_argument(detail::line_error(lineno, "timestamps must strictly increase"));
      if (step - 1 > kMaxInterpolatedHours) {
        throw std::invalid_argument(detail::line_error(lineno, "gap of " + std::to_string(step - 1) +
                                                                   " missing hours exceeds the interpolation limit"));
      }
      for (HourStamp k = 1; k < step; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(step);
        out.push_back({prev.hour + k, prev.wind + frac * (r.wind - prev.wind)});
      }
    }
    out.push_back(r);
  }
  if (out.empty()) throw std::invalid_argument("wind file has no records");
  return out;
}

inline std::vector<WindRecord> load_wind_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open wind file: " + path);
  return read_wind_csv(in);
}

inline void write_wind_csv(std::ostream& os, std::span<const WindRecord> records) {
  os << "timestamp,wind\n";
  for (const auto& r : records) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, r.wind);
    os << format_hour(r.hour) << ',' << std::string_view(buf, static_cast<std::size_t>(p - buf)) << '\n';
  }
}

/// W_t = level * exp(z_t), with
///   z_t = A_d sin(2 pi (T^D - phase_d) / 24) + A_s sin(2 pi (T^Y - phase_s) / 365.25) + e_t
/// and e_t a stationary AR(1) with persistence rho and marginal sd noise_sd.
struct SyntheticWindProfile {
  double daily_amplitude = 0.0;
  double seasonal_amplitude = 0.0;
  double level = 1.0;
  double noise_sd = 0.0;
  double persistence = 0.9;
  double daily_phase = 9.0;
  double seasonal_phase = 0.0;
  HourStamp start = make_hour(2002, 1, 1, 0);

  /// Calibrated so four years match a mean of 186.29 and sd of 244.86.
  static SyntheticWindProfile amarillo() {
    SyntheticWindProfile p;
    p.daily_amplitude = 0.7;
    p.seasonal_amplitude = 0.5;
    p.noise_sd = 0.8;
    p.persistence = 0.9;
    p.level = 113.0;
    p.daily_phase = 9.0;
    p.seasonal_phase = 0.0;
    return p;
  }

  void validate() const {
    if (!(level > 0.0)) throw std::invalid_argument("wind level must be positive");
    if (!(noise_sd >= 0.0)) throw std::invalid_argument("wind noise sd must be nonnegative");
    if (!(persistence >= 0.0 && persistence < 1.0)) throw std::invalid_argument("wind persistence must be in [0, 1)");
  }
};

template <class Rng>
std::vector<WindRecord> generate_synthetic_wind(const SyntheticWindProfile& profile, std::size_t n_hours, Rng& rng) {
  if (n_hours < 1) throw std::invalid_argument("series length must be positive");
  profile.validate();
  std::normal_distribution<double> std_normal(0.0, 1.0);
  const double innovation_sd = profile.noise_sd * std::sqrt(1.0 - profile.persistence * profile.persistence);
  double e = profile.noise_sd * std_normal(rng);
  std::vector<WindRecord> out;
  out.reserve(n_hours);
  for (std::size_t t = 0; t < n_hours; ++t) {
    if (t > 0) e = profile.persistence * e + innovation_sd * std_normal(rng);
    const HourStamp h = profile.start + static_cast<HourStamp>(t);
    const double z =
        profile.daily_amplitude * std::sin(2.0 * std::numbers::pi * (hour_of_day(h) - profile.daily_phase) / kHoursPerDay) +
        profile.seasonal_amplitude *
            std::sin(2.0 * std::numbers::pi * (day_of_year(h) - profile.seasonal_phase) / kDaysPerYear) +
        e;
    out.push_back({h, profile.level * std::exp(z)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Prices

inline constexpr double kPriceFloor = 0.01;

/// dP = kappa (m(t) - P) dt + sigma dB with hourly steps and
/// m(t) = level + a_d sin(2 pi T^D / 24) + a_s sin(2 pi T^Y / 365.25).
struct OuParams {
  double kappa = 0.5;
  double sigma = 0.3;
  double level = 2.0;
  double daily_amplitude = 0.5;
  double seasonal_amplitude = 0.3;

  void validate() const {
    if (!(kappa > 0.0 && kappa < 1.0)) throw std::invalid_argument("OU reversion rate must be in (0, 1) per hour");
    if (!(sigma >= 0.0)) throw std::invalid_argument("OU volatility must be nonnegative");
  }

  double mean_at(HourStamp t) const {
    return level + daily_amplitude * std::sin(2.0 * std::numbers::pi * hour_of_day(t) / kHoursPerDay) +
           seasonal_amplitude * std::sin(2.0 * std::numbers::pi * day_of_year(t) / kDaysPerYear);
  }
};

/// Exact hourly discretization started at the mean. The latent path is
/// unfloored; reported prices are floored at 0.01.
template <class Rng>
std::vector<double> ou_simulate(const OuParams& p, std::size_t n_hours, Rng& rng, HourStamp start = make_hour(2002, 1, 1, 0)) {
  if (n_hours < 1) throw std::invalid_argument("series length must be positive");
  p.validate();
  std::normal_distribution<double> std_normal(0.0, 1.0);
  const double decay = std::exp(-p.kappa);
  const double step_sd = p.sigma * std::sqrt((1.0 - std::exp(-2.0 * p.kappa)) / (2.0 * p.kappa));
  std::vector<double> out;
  out.reserve(n_hours);
  double m_prev = p.mean_at(start);
  double latent = m_prev;
  out.push_back(std::max(latent, kPriceFloor));
  for (std::size_t t = 1; t < n_hours; ++t) {
    const double m = p.mean_at(start + static_cast<HourStamp>(t));
    latent = m + (latent - m_prev) * decay + step_sd * std_normal(rng);
    m_prev = m;
    out.push_back(std::max(latent, kPriceFloor));
  }
  return out;
}

/// i.i.d. N(1, 0.1) floored at 0.01.
template <class Rng>
std::vector<double> contract_prices(std::size_t n, Rng& rng) {
  std::normal_distribution<double> dist(1.0, std::sqrt(0.1));
  std::vector<double> out(n);
  for (double& v : out) v = std::max(dist(rng), kPriceFloor);
  return out;
}

// ---------------------------------------------------------------------------
// States and samples

/// Realized randomness for one training hour.
struct WindOutcome {
  double wind_next = 0.0;
  double spot_next = 0.0;
  double contract = 0.0;
};

struct WindSample {
  HourStamp hour = 0;
  StateVector state;
  WindOutcome outcome;
};

/// (T^D, T^Y, P^C, P^S, W_i, W_{i-1})
inline StateVector make_wind_state(HourStamp hour, double contract, double spot, double wind, double wind_prev) {
  static const std::vector<DimKind> kinds = {DimKind::circular(kHoursPerDay), DimKind::circular(kDaysPerYear),
                                             DimKind::linear(), DimKind::linear(),
                                             DimKind::linear(), DimKind::linear()};
  return StateVector({hour_of_day(hour), day_of_year(hour), contract, spot, wind, wind_prev}, kinds);
}

/// One sample per hour i in [1, n-2]: the state needs W_{i-1} and the
/// outcome needs hour i+1.
inline std::vector<WindSample> build_wind_states(std::span<const WindRecord> winds, std::span<const double> contract,
                                                 std::span<const double> spot) {
  if (winds.size() != contract.size() || winds.size() != spot.size()) {
    throw std::invalid_argument("wind and price series must be aligned");
  }
  if (winds.size() < 2) throw std::invalid_argument("at least two hours are required");
  std::vector<WindSample> out;
  if (winds.size() < 3) return out;
  out.reserve(winds.size() - 2);
  for (std::size_t i = 1; i + 1 < winds.size(); ++i) {
    out.push_back({winds[i].hour, make_wind_state(winds[i].hour, contract[i], spot[i], winds[i].wind, winds[i - 1].wind),
                   {winds[i + 1].wind, spot[i + 1], contract[i]}});
  }
  return out;
}

/// Function-based problem adapter for a scalar pledge in [0, x_max].
struct WindProblem {
  using Outcome = WindOutcome;

  double x_max = 1.0;

  /// x_max = 1.5 times the largest training wind.
  static WindProblem from_training(std::span<const WindSample> training) {
    double m = 0.0;
    for (const auto& s : training) m = std::max({m, s.outcome.wind_next, s.state[4], s.state[5]});
    if (!(m > 0.0)) throw std::invalid_argument("training winds are all zero");
    return WindProblem{1.5 * m};
  }

  std::size_t decision_dim() const { return 1; }

  double value(std::span<const double> x, const Outcome& o) const {
    return wind_revenue(x[0], o.wind_next, o.contract, o.spot_next);
  }

  void accumulate(const Outcome& o, double w, SeparablePLBuilder& builder) const {
    builder.add_linear(0, w * o.contract);
    builder.add_hinge(0, o.wind_next, -w * o.spot_next);
  }

  Polytope region() const { return Polytope::box({0.0}, {x_max}); }
};

}  // namespace statesearch::wind
