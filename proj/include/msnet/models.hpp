#pragma once

#include <cstdint>
#include <memory>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "msnet/distributions.hpp"
#include "msnet/kernel.hpp"

namespace msnet {

// --- single-server GI/GI/1 ---------------------------------------------------

class SingleServerModel final : public NetworkKernel {
 public:
  SingleServerModel(HeavyTailDist service, ArrivalSpec arrivals);

  const HeavyTailDist& service() const { return service_; }
  double load() const { return service_.mean() / arrivals().mean_spacing(); }

  std::string name() const override { return "single_server"; }
  int stations() const override { return 1; }
  bool has_aa() const override { return true; }
  double gamma0_reference() const override { return service_.mean(); }
  std::vector<double> component_means() const override { return {service_.mean()}; }
  void sample_customer(RngStream& service, std::vector<Visit>& out) const override;
  std::unique_ptr<NetworkKernel> with_arrivals(ArrivalSpec arrivals) const override;

 protected:
  double evaluate(const RealizedWindow& w) const override;
  bool visits_fit(std::span<const Visit> visits) const override;

 private:
  HeavyTailDist service_;
};

// --- two-station tandem -------------------------------------------------------

enum class ServiceCoupling { independent, comonotone };

class TandemModel final : public NetworkKernel {
 public:
  TandemModel(HeavyTailDist first, HeavyTailDist second, ArrivalSpec arrivals,
              ServiceCoupling coupling = ServiceCoupling::independent);

  const HeavyTailDist& first() const { return first_; }
  const HeavyTailDist& second() const { return second_; }
  ServiceCoupling coupling() const { return coupling_; }

  std::string name() const override { return "tandem"; }
  int stations() const override { return 2; }
  bool has_aa() const override { return true; }
  double gamma0_reference() const override;
  std::vector<double> component_means() const override { return {first_.mean(), second_.mean()}; }
  void sample_customer(RngStream& service, std::vector<Visit>& out) const override;
  std::unique_ptr<NetworkKernel> with_arrivals(ArrivalSpec arrivals) const override;

 protected:
  double evaluate(const RealizedWindow& w) const override;
  bool visits_fit(std::span<const Visit> visits) const override;

 private:
  HeavyTailDist first_;
  HeavyTailDist second_;
  ServiceCoupling coupling_;
};

// --- GI/GI/m (Kiefer-Wolfowitz) -----------------------------------------------

class MultiServerModel final : public NetworkKernel {
 public:
  MultiServerModel(int servers, HeavyTailDist service, ArrivalSpec arrivals);

  int servers() const { return servers_; }
  const HeavyTailDist& service() const { return service_; }
  double load() const { return service_.mean() / (servers_ * arrivals().mean_spacing()); }

  std::string name() const override { return "multiserver"; }
  int stations() const override { return 1; }
  bool has_aa() const override { return false; }
  double gamma0_reference() const override { return service_.mean() / servers_; }
  std::vector<double> component_means() const override { return {service_.mean()}; }
  void sample_customer(RngStream& service, std::vector<Visit>& out) const override;
  std::unique_ptr<NetworkKernel> with_arrivals(ArrivalSpec arrivals) const override;

 protected:
  double evaluate(const RealizedWindow& w) const override;
  bool visits_fit(std::span<const Visit> visits) const override;

 private:
  int servers_;
  HeavyTailDist service_;
};

// --- generalized Jackson network ----------------------------------------------

/// Event record of a Jackson simulation.
struct JacksonEvent {
  enum class Kind { arrival, service_start, departure, exit };
  double epoch;
  Kind kind;
  int station;
  long customer;
};

struct JacksonRun {
  std::vector<JacksonEvent> log;
  double last_activity;  // base epochs
  double maximal_dater;
};

/// Lone-customer decomposition of the (AA) assumption.
struct LoneCustomer {
  std::vector<int> visits;     // nu^(j)
  std::vector<double> work;    // Y^(j)
};

/// Generalized Jackson network with FIFO stations.
///
/// The k-th service at station i uses the k-th entry of that station's stack
/// of (work, next station) pairs. The stacks of a window are the per-station
/// concatenation, in customer order, of each customer's lone route. Routing by
/// station stacks is abelian, so the entries a group of customers consumes do
/// not depend on timing; this keeps the kernel separable as well as monotone.
class JacksonModel final : public NetworkKernel {
 public:
  static constexpr std::uint64_t kDefaultEventCap = 10'000'000;

  /// `routing[i]` has r + 1 entries: probabilities to stations 1..r, then exit.
  /// `entry` has r entries over the stations.
  JacksonModel(std::vector<HeavyTailDist> services, std::vector<std::vector<double>> routing,
               std::vector<double> entry, ArrivalSpec arrivals, std::uint64_t event_cap = kDefaultEventCap);

  const std::vector<HeavyTailDist>& services() const { return services_; }
  const std::vector<std::vector<double>>& routing() const { return routing_; }
  const std::vector<double>& entry() const { return entry_; }
  std::uint64_t event_cap() const { return event_cap_; }
  /// pi^(j) = E nu^(j), from pi = entry (I - P)^{-1}.
  const std::vector<double>& visit_means() const { return visit_means_; }

  std::string name() const override { return "jackson"; }
  int stations() const override { return static_cast<int>(services_.size()); }
  bool has_aa() const override { return true; }
  double gamma0_reference() const override;
  std::vector<double> component_means() const override;
  void sample_customer(RngStream& service, std::vector<Visit>& out) const override;
  std::unique_ptr<NetworkKernel> with_arrivals(ArrivalSpec arrivals) const override;

  /// Full event-driven run over the window, with the event log.
  JacksonRun simulate(const RealizedWindow& w, bool keep_log = true) const;

  /// Lone customer: visit counts and per-station work.
  LoneCustomer single_customer(RngStream& rng) const;

 protected:
  double evaluate(const RealizedWindow& w) const override;
  bool visits_fit(std::span<const Visit> visits) const override;

 private:
  int draw_station(std::span<const double> row, RngStream& rng) const;

  std::vector<HeavyTailDist> services_;
  std::vector<std::vector<double>> routing_;
  std::vector<double> entry_;
  std::uint64_t event_cap_;
  std::vector<double> visit_means_;
};

/// Thrown when a Jackson run or lone route exceeds its event cap.
class EventCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- recursions and oracles -----------------------------------------------------

/// W_0 = 0, W_{k+1} = (W_k + sigma_k - tau_k)^+.
std::vector<double> lindley_path(std::span<const double> service, std::span<const double> gaps);

/// Eq.-10 style sup over m <= p <= q <= n; explicit double loop (oracle).
double tandem_dater_supform(const RealizedWindow& w);

struct TandemPath {
  std::vector<double> wait1;   // W^(1)
  std::vector<double> wait2;   // W^(2)
  std::vector<double> gaps2;   // tau^(2), one fewer than customers
  double dater;                // Z of the last customer
};

/// Waiting-time recursions of both stations, starting empty at the left edge.
TandemPath tandem_path(const RealizedWindow& w);

/// One Kiefer-Wolfowitz step on a nondecreasing workload vector.
std::vector<double> kw_step(std::span<const double> workload, double service, double gap);

/// Z via the Kiefer-Wolfowitz vector: max(W^(1) + sigma_n, W^(m)).
double multiserver_dater(const RealizedWindow& w, int servers);

/// Writes a Jackson event log as CSV: epoch,event,station,customer.
void write_event_log_csv(std::ostream& os, const std::vector<JacksonEvent>& log);

}  // namespace msnet
