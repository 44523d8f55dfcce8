#include "msnet/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace msnet {

// --- single server ----------------------------------------------------------------

SingleServerModel::SingleServerModel(HeavyTailDist service, ArrivalSpec arrivals)
    : NetworkKernel(std::move(arrivals)), service_(std::move(service)) {}

void SingleServerModel::sample_customer(RngStream& service, std::vector<Visit>& out) const {
  out.assign(1, Visit{0, service_.sample(service)});
}

std::unique_ptr<NetworkKernel> SingleServerModel::with_arrivals(ArrivalSpec arrivals) const {
  return std::make_unique<SingleServerModel>(service_, std::move(arrivals));
}

double SingleServerModel::evaluate(const RealizedWindow& w) const {
  const auto epochs = w.epochs();
  const auto visits = w.all_visits();
  double departure = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    departure = std::max(epochs[i], departure) + visits[i].work;
  }
  return departure;
}

bool SingleServerModel::visits_fit(std::span<const Visit> visits) const {
  return visits.size() == 1 && visits[0].station == 0 && visits[0].work >= 0.0;
}

// --- tandem -------------------------------------------------------------------------

TandemModel::TandemModel(HeavyTailDist first, HeavyTailDist second, ArrivalSpec arrivals, ServiceCoupling coupling)
    : NetworkKernel(std::move(arrivals)), first_(std::move(first)), second_(std::move(second)), coupling_(coupling) {}

double TandemModel::gamma0_reference() const { return std::max(first_.mean(), second_.mean()); }

void TandemModel::sample_customer(RngStream& service, std::vector<Visit>& out) const {
  out.resize(2);
  const double u = service.uniform();
  const double v = coupling_ == ServiceCoupling::comonotone ? u : service.uniform();
  out[0] = Visit{0, first_.quantile(u)};
  out[1] = Visit{1, second_.quantile(v)};
}

std::unique_ptr<NetworkKernel> TandemModel::with_arrivals(ArrivalSpec arrivals) const {
  return std::make_unique<TandemModel>(first_, second_, std::move(arrivals), coupling_);
}

double TandemModel::evaluate(const RealizedWindow& w) const {
  const auto epochs = w.epochs();
  const auto visits = w.all_visits();
  double d1 = -std::numeric_limits<double>::infinity();
  double d2 = d1;
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    d1 = std::max(epochs[i], d1) + visits[2 * i].work;
    d2 = std::max(d1, d2) + visits[2 * i + 1].work;
  }
  return d2;
}

bool TandemModel::visits_fit(std::span<const Visit> visits) const {
  return visits.size() == 2 && visits[0].station == 0 && visits[1].station == 1 && visits[0].work >= 0.0 &&
         visits[1].work >= 0.0;
}

// --- multiserver ----------------------------------------------------------------------

MultiServerModel::MultiServerModel(int servers, HeavyTailDist service, ArrivalSpec arrivals)
    : NetworkKernel(std::move(arrivals)), servers_(servers), service_(std::move(service)) {
  if (servers_ < 1) throw std::invalid_argument("multiserver: need at least one server");
}

void MultiServerModel::sample_customer(RngStream& service, std::vector<Visit>& out) const {
  out.assign(1, Visit{0, service_.sample(service)});
}

std::unique_ptr<NetworkKernel> MultiServerModel::with_arrivals(ArrivalSpec arrivals) const {
  return std::make_unique<MultiServerModel>(servers_, service_, std::move(arrivals));
}

double MultiServerModel::evaluate(const RealizedWindow& w) const {
  // Absolute server release times, kept nondecreasing; FCFS to the earliest.
  std::vector<double> release(static_cast<std::size_t>(servers_), -std::numeric_limits<double>::infinity());
  const auto epochs = w.epochs();
  const auto visits = w.all_visits();
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    double done = std::max(epochs[i], release[0]) + visits[i].work;
    std::size_t k = 1;
    for (; k < release.size() && release[k] < done; ++k) release[k - 1] = release[k];
    release[k - 1] = done;
  }
  return release.back();
}

bool MultiServerModel::visits_fit(std::span<const Visit> visits) const {
  return visits.size() == 1 && visits[0].station == 0 && visits[0].work >= 0.0;
}

// --- recursions -----------------------------------------------------------------------

std::vector<double> lindley_path(std::span<const double> service, std::span<const double> gaps) {
  if (service.size() != gaps.size()) throw std::invalid_argument("lindley_path: length mismatch");
  std::vector<double> wait(service.size() + 1, 0.0);
  for (std::size_t k = 0; k < service.size(); ++k) {
    wait[k + 1] = std::max(0.0, wait[k] + service[k] - gaps[k]);
  }
  return wait;
}

namespace {

void require_tandem_shape(const RealizedWindow& w) {
  w.validate();
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto v = w.visits(i);
    if (v.size() != 2 || v[0].station != 0 || v[1].station != 1) {
      throw std::invalid_argument("tandem window: each customer needs (station 1, station 2) services");
    }
  }
}

}  // namespace

double tandem_dater_supform(const RealizedWindow& w) {
  require_tandem_shape(w);
  const std::size_t n = w.size();
  std::vector<double> suffix2(n + 1, 0.0);
  for (std::size_t q = n; q-- > 0;) suffix2[q] = suffix2[q + 1] + w.visits(q)[1].work;
  const double t_last = w.epoch(n - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < n; ++p) {
    double station1 = 0.0;
    for (std::size_t q = p; q < n; ++q) {
      station1 += w.visits(q)[0].work;
      best = std::max(best, station1 + suffix2[q] - (t_last - w.epoch(p)));
    }
  }
  return best;
}

TandemPath tandem_path(const RealizedWindow& w) {
  require_tandem_shape(w);
  const std::size_t n = w.size();
  TandemPath path;
  path.wait1.assign(n, 0.0);
  path.wait2.assign(n, 0.0);
  path.gaps2.assign(n - 1, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double xi1 = w.visits(k)[0].work - w.gap(k);
    const double lead = path.wait1[k] + xi1;
    path.wait1[k + 1] = std::max(0.0, lead);
    path.gaps2[k] = -std::min(0.0, lead) + w.visits(k + 1)[0].work;
    path.wait2[k + 1] = std::max(0.0, path.wait2[k] + w.visits(k)[1].work - path.gaps2[k]);
  }
  const auto last = w.visits(n - 1);
  path.dater = path.wait1[n - 1] + last[0].work + path.wait2[n - 1] + last[1].work;
  return path;
}

std::vector<double> kw_step(std::span<const double> workload, double service, double gap) {
  if (workload.empty()) throw std::invalid_argument("kw_step: empty workload vector");
  for (std::size_t i = 0; i < workload.size(); ++i) {
    if (workload[i] < 0.0) throw std::invalid_argument("kw_step: negative workload");
    if (i > 0 && workload[i] < workload[i - 1]) throw std::invalid_argument("kw_step: workload not sorted");
  }
  std::vector<double> next(workload.begin(), workload.end());
  next[0] += service;
  for (auto& v : next) v = std::max(0.0, v - gap);
  std::sort(next.begin(), next.end());
  return next;
}

double multiserver_dater(const RealizedWindow& w, int servers) {
  if (servers < 1) throw std::invalid_argument("multiserver_dater: need at least one server");
  w.validate();
  std::vector<double> workload(static_cast<std::size_t>(servers), 0.0);
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    workload = kw_step(workload, w.visits(k)[0].work, w.gap(k));
  }
  return std::max(workload.front() + w.visits(w.size() - 1)[0].work, workload.back());
}

void write_event_log_csv(std::ostream& os, const std::vector<JacksonEvent>& log) {
  os << "epoch,event,station,customer\n";
  os.precision(17);
  for (const auto& e : log) {
    const char* kind = "";
    switch (e.kind) {
      case JacksonEvent::Kind::arrival: kind = "arrival"; break;
      case JacksonEvent::Kind::service_start: kind = "service_start"; break;
      case JacksonEvent::Kind::departure: kind = "departure"; break;
      case JacksonEvent::Kind::exit: kind = "exit"; break;
    }
    os << e.epoch << ',' << kind << ',' << (e.station + 1) << ',' << e.customer << '\n';
  }
}

}  // namespace msnet
